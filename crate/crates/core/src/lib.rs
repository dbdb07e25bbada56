//! Lifting rewrite derivations of left-linear constructor systems with
//! extra variables to ground derivations that use a generator function.

pub mod engine;
pub mod generators;
pub mod oracle;
pub mod parser;
pub mod program;
pub mod repl;
pub mod search;
pub mod terms;

pub use engine::{
    all_redexes, demanded_redexes, match_pattern, match_rule, Frontier, MatchOutcome, Redex,
};
pub use generators::{
    genize, synthesize_gen, transform_program, transform_rule, with_gen_rules, GenError, GenRuleSet,
};
pub use parser::{parse_command, parse_module, parse_term, Command, ParseError, ParseErrorKind};
pub use program::{
    Program, RawRule, Rule, RuleId, TermError, ValidationError, ValidationErrorKind,
};
pub use search::{
    lift_check, start_search, SearchConfig, SearchError, Solution, SolutionStream, Strategy, Trace,
};
pub use terms::{Expr, PartialExpr, Position, RawTerm, Signature, Subst, Symbol, SymbolKind};
