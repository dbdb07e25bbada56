//! Constructor-based rewrite rules and programs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::terms::{
    Expr, Name, Position, PositionError, RawTerm, Signature, SignatureError, Subst, Symbol, CHOICE,
    GEN,
};

/// A rule `f(p1,...,pn) -> r` with a linear tuple of c-term patterns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    fun: Symbol,
    patterns: Vec<Expr>,
    rhs: Expr,
}

impl Rule {
    /// Builds a rule, checking the structural invariants. Returns `None` when
    /// `fun` is not a function of the right arity, a pattern is not a c-term,
    /// or the pattern tuple is not linear.
    pub fn new(fun: Symbol, patterns: Vec<Expr>, rhs: Expr) -> Option<Rule> {
        if !fun.is_function() || fun.arity() != patterns.len() {
            return None;
        }
        if !patterns.iter().all(Expr::is_cterm) {
            return None;
        }
        let mut occ = BTreeMap::new();
        patterns.iter().for_each(|p| p.var_occurrences(&mut occ));
        if occ.values().any(|&n| n > 1) {
            return None;
        }
        Some(Rule { fun, patterns, rhs })
    }

    pub fn fun(&self) -> &Symbol {
        &self.fun
    }

    pub fn patterns(&self) -> &[Expr] {
        &self.patterns
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn lhs(&self) -> Expr {
        Expr::app(self.fun.clone(), self.patterns.clone())
    }

    pub fn lhs_vars(&self) -> BTreeSet<Name> {
        self.patterns.iter().flat_map(Expr::vars).collect()
    }

    /// Variables of the right-hand side that do not occur in the patterns.
    pub fn extra_vars(&self) -> BTreeSet<Name> {
        let lhs = self.lhs_vars();
        self.rhs
            .vars()
            .into_iter()
            .filter(|x| !lhs.contains(x))
            .collect()
    }

    pub fn has_extra_vars(&self) -> bool {
        !self.extra_vars().is_empty()
    }

    pub(crate) fn with_rhs(&self, rhs: Expr) -> Rule {
        Rule {
            fun: self.fun.clone(),
            patterns: self.patterns.clone(),
            rhs,
        }
    }

    /// The two implicit rules `X ? Y -> X` and `X ? Y -> Y`.
    pub fn choice_rules() -> [Rule; 2] {
        let pats = vec![Expr::var("X"), Expr::var("Y")];
        [
            Rule {
                fun: Symbol::choice(),
                patterns: pats.clone(),
                rhs: Expr::var("X"),
            },
            Rule {
                fun: Symbol::choice(),
                patterns: pats,
                rhs: Expr::var("Y"),
            },
        ]
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs(), self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rule as parsed from source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRule {
    pub lhs: RawTerm,
    pub rhs: RawTerm,
}

impl RawRule {
    pub fn new(lhs: RawTerm, rhs: RawTerm) -> Self {
        RawRule { lhs, rhs }
    }
}

impl From<&Rule> for RawRule {
    fn from(r: &Rule) -> Self {
        RawRule {
            lhs: RawTerm::from(&r.lhs()),
            rhs: RawTerm::from(r.rhs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationErrorKind {
    #[error("left-hand side must be a function application, found variable `{0}`")]
    VariableLhs(String),
    #[error("rules for the built-in `{0}` cannot be defined")]
    BuiltinRedefined(String),
    #[error("left-hand side is not linear: variable `{0}` occurs more than once")]
    NonLinear(String),
    #[error("function symbol `{0}` occurs inside a pattern")]
    FunctionInPattern(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rule {rule}: {kind}")]
pub struct ValidationError {
    /// 0-based index of the offending rule in source order.
    pub rule: usize,
    pub kind: ValidationErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` has arity {expected} but is applied to {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error("subterm `{found}` at {pos} is not an instance `{expected}` of the rule")]
    NoMatch {
        pos: Position,
        expected: Expr,
        found: Expr,
    },
}

/// Index of a rule inside [`Program::rules`].
pub type RuleId = usize;

/// A validated program: signature, rules in source order, and the implicit
/// rules for `?` appended at the end.
#[derive(Clone)]
pub struct Program {
    signature: Signature,
    rules: Vec<Rule>,
    user_rules: usize,
    by_fun: HashMap<Symbol, Vec<RuleId>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.rules == other.rules
    }
}

impl Eq for Program {}

impl Program {
    /// Assembles a program from already-built rules. Every symbol in the
    /// rules must be declared in `signature` and no rule may be for `?`.
    pub fn new(mut signature: Signature, rules: Vec<Rule>) -> Result<Program, SignatureError> {
        for r in &rules {
            let mut syms = BTreeSet::new();
            r.lhs().symbols(&mut syms);
            r.rhs().symbols(&mut syms);
            for s in syms {
                signature.declare(s)?;
            }
        }
        let user_rules = rules.len();
        let mut all = rules;
        all.extend(Rule::choice_rules());
        let mut by_fun: HashMap<Symbol, Vec<RuleId>> = HashMap::new();
        for (i, r) in all.iter().enumerate() {
            by_fun.entry(r.fun.clone()).or_default().push(i);
        }
        Ok(Program {
            signature,
            rules: all,
            user_rules,
            by_fun,
        })
    }

    /// Checks that `rules` form a left-linear constructor system and infers
    /// the signature: lhs roots are functions, every other applied symbol
    /// that is not `?` or `gen` is a constructor.
    pub fn validate(rules: &[RawRule]) -> Result<Program, Vec<ValidationError>> {
        let mut errors = Vec::new();
        let mut sig = Signature::new();

        for (i, r) in rules.iter().enumerate() {
            match &r.lhs {
                RawTerm::Var(x) => errors.push(ValidationError {
                    rule: i,
                    kind: ValidationErrorKind::VariableLhs(x.clone()),
                }),
                RawTerm::App(name, _) if name == CHOICE || name == GEN => {
                    errors.push(ValidationError {
                        rule: i,
                        kind: ValidationErrorKind::BuiltinRedefined(name.clone()),
                    })
                }
                RawTerm::App(name, args) => {
                    if let Err(e) = sig.declare(Symbol::function(name.as_str(), args.len())) {
                        errors.push(ValidationError {
                            rule: i,
                            kind: e.into(),
                        });
                    }
                }
            }
        }

        let mut built = Vec::new();
        for (i, r) in rules.iter().enumerate() {
            let RawTerm::App(name, args) = &r.lhs else {
                continue;
            };
            if name == CHOICE || name == GEN {
                continue;
            }
            let mut rule_errors = Vec::new();
            let patterns: Vec<Expr> = args
                .iter()
                .map(|a| classify_pattern(&mut sig, a, &mut rule_errors))
                .collect();
            let rhs = classify_rhs(&mut sig, &r.rhs, &mut rule_errors);

            let mut occ = BTreeMap::new();
            patterns.iter().for_each(|p| p.var_occurrences(&mut occ));
            for (x, n) in occ {
                if n > 1 {
                    rule_errors.push(ValidationErrorKind::NonLinear(x.to_string()));
                }
            }
            if rule_errors.is_empty() {
                let fun = sig
                    .lookup(name)
                    .cloned()
                    .filter(|s| s.is_function() && s.arity() == args.len());
                if let Some(fun) = fun {
                    built.push(Rule { fun, patterns, rhs });
                }
            }
            errors.extend(
                rule_errors
                    .into_iter()
                    .map(|kind| ValidationError { rule: i, kind }),
            );
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        Program::new(sig, built).map_err(|e| {
            vec![ValidationError {
                rule: 0,
                kind: e.into(),
            }]
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// All rules, user rules first, followed by the two `?` rules.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The rules that do not belong to the implicit `?` definition.
    pub fn user_rules(&self) -> &[Rule] {
        &self.rules[..self.user_rules]
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    /// Ids of the rules defining `fun`, in program order.
    pub fn rules_for(&self, fun: &Symbol) -> &[RuleId] {
        self.by_fun.get(fun).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_extra_vars(&self) -> bool {
        self.rules.iter().any(Rule::has_extra_vars)
    }

    /// Classifies a parsed term against this program's signature.
    pub fn classify(&self, t: &RawTerm) -> Result<Expr, TermError> {
        match t {
            RawTerm::Var(x) => Ok(Expr::var(x.as_str())),
            RawTerm::App(name, args) => {
                let sym = self
                    .signature
                    .lookup(name)
                    .ok_or_else(|| TermError::UnknownSymbol(name.clone()))?;
                if sym.arity() != args.len() {
                    return Err(TermError::Arity {
                        name: name.clone(),
                        expected: sym.arity(),
                        found: args.len(),
                    });
                }
                let args = args
                    .iter()
                    .map(|a| self.classify(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Expr::app(sym.clone(), args))
            }
        }
    }

    /// Performs one rewrite step with `rule` at `pos` using matcher `theta`.
    pub fn rewrite_step_at(
        &self,
        e: &Expr,
        pos: &Position,
        rule: &Rule,
        theta: &Subst,
    ) -> Result<Expr, StepError> {
        let found = e.subterm_at(pos)?;
        let expected = theta.apply(&rule.lhs());
        if *found != expected {
            return Err(StepError::NoMatch {
                pos: pos.clone(),
                expected,
                found: found.clone(),
            });
        }
        Ok(e.replace_at(pos, theta.apply(rule.rhs()))?)
    }

    pub fn raw_rules(&self) -> Vec<RawRule> {
        self.user_rules().iter().map(RawRule::from).collect()
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Program")
            .field("signature", &self.signature)
            .field("rules", &self.user_rules())
            .finish()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.user_rules() {
            writeln!(f, "{r} .")?;
        }
        Ok(())
    }
}

fn is_reserved_function(name: &str) -> bool {
    name == CHOICE || name == GEN
}

fn classify_pattern(
    sig: &mut Signature,
    t: &RawTerm,
    errors: &mut Vec<ValidationErrorKind>,
) -> Expr {
    match t {
        RawTerm::Var(x) => Expr::var(x.as_str()),
        RawTerm::App(name, args) => {
            let args: Vec<Expr> = args
                .iter()
                .map(|a| classify_pattern(sig, a, errors))
                .collect();
            let is_fun =
                is_reserved_function(name) || sig.lookup(name).is_some_and(|s| s.is_function());
            if is_fun {
                errors.push(ValidationErrorKind::FunctionInPattern(name.clone()));
                return placeholder(name, args);
            }
            let sym = Symbol::constructor(name.as_str(), args.len());
            if let Err(e) = sig.declare(sym.clone()) {
                errors.push(e.into());
                return placeholder(name, args);
            }
            Expr::app(sym, args)
        }
    }
}

fn classify_rhs(sig: &mut Signature, t: &RawTerm, errors: &mut Vec<ValidationErrorKind>) -> Expr {
    match t {
        RawTerm::Var(x) => Expr::var(x.as_str()),
        RawTerm::App(name, args) => {
            let args: Vec<Expr> = args.iter().map(|a| classify_rhs(sig, a, errors)).collect();
            let sym = match sig.lookup(name) {
                Some(s) if s.is_function() => Symbol::function(name.as_str(), args.len()),
                _ if is_reserved_function(name) => Symbol::function(name.as_str(), args.len()),
                _ => Symbol::constructor(name.as_str(), args.len()),
            };
            if let Err(e) = sig.declare(sym.clone()) {
                errors.push(e.into());
                return placeholder(name, args);
            }
            Expr::app(sym, args)
        }
    }
}

/// Stand-in node used only while collecting errors; never escapes validation.
fn placeholder(name: &str, args: Vec<Expr>) -> Expr {
    Expr::App(Symbol::constructor(name, args.len()), Arc::from(args))
}
