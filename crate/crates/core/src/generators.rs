//! The generator function `gen` and the extra-variable elimination
//! transformation.

use thiserror::Error;

use crate::program::{Program, Rule};
use crate::terms::{Expr, Signature, Subst, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("the signature has no constructors, so `gen` would have no rules")]
    NoConstructors,
}

/// The rules `gen -> c(gen,...,gen)`, one per constructor, in canonical
/// constructor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenRuleSet {
    rules: Vec<Rule>,
}

impl GenRuleSet {
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn into_rules(self) -> Vec<Rule> {
        self.rules
    }
}

pub fn synthesize_gen(sig: &Signature) -> Result<GenRuleSet, GenError> {
    let rules: Vec<Rule> = sig
        .constructors()
        .map(|c| {
            let rhs = Expr::app(c.clone(), vec![Expr::gen(); c.arity()]);
            Rule::new(Symbol::gen(), Vec::new(), rhs).expect("gen rules are well formed")
        })
        .collect();
    if rules.is_empty() {
        return Err(GenError::NoConstructors);
    }
    Ok(GenRuleSet { rules })
}

/// Replaces every variable occurrence in `e` by `gen`.
pub fn genize(e: &Expr) -> Expr {
    e.genize()
}

/// Replaces the extra variables of `rule` by `gen`, occurrence by occurrence.
pub fn transform_rule(rule: &Rule) -> Rule {
    let extra = rule.extra_vars();
    if extra.is_empty() {
        return rule.clone();
    }
    let s: Subst = extra.into_iter().map(|x| (x, Expr::gen())).collect();
    rule.with_rhs(s.apply(rule.rhs()))
}

/// The transformed program: every user rule with its extra variables
/// replaced by `gen`, followed by the `gen` rules.
pub fn transform_program(p: &Program) -> Result<Program, GenError> {
    let gen = synthesize_gen(p.signature())?;
    let mut rules: Vec<Rule> = p
        .user_rules()
        .iter()
        .filter(|r| !r.fun().is_gen())
        .map(transform_rule)
        .collect();
    rules.extend(gen.into_rules());
    Ok(Program::new(p.signature().clone(), rules).expect("transformation preserves the signature"))
}

/// `P ∪ gen-rules`: the original rules, extra variables included, extended
/// with the `gen` rules.
pub fn with_gen_rules(p: &Program) -> Result<Program, GenError> {
    let gen = synthesize_gen(p.signature())?;
    let mut rules: Vec<Rule> = p
        .user_rules()
        .iter()
        .filter(|r| !r.fun().is_gen())
        .cloned()
        .collect();
    rules.extend(gen.into_rules());
    Ok(Program::new(p.signature().clone(), rules).expect("gen rules use declared symbols"))
}
