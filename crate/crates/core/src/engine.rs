//! Matching, redex enumeration and the demand-driven redex selection used
//! by the search.

use std::collections::HashSet;

use crate::program::{Program, Rule, RuleId};
use crate::terms::{Expr, Position, Subst};

/// Result of matching a linear c-term pattern against a subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchOutcome {
    Match(Subst),
    /// A constructor clash at a constructor-rooted (or variable) position of
    /// the subject; no amount of rewriting below can fix it.
    NoMatch,
    /// Blocked only by function-rooted subterms at these positions (relative
    /// to the subject) where the pattern needs a constructor.
    Demands(Vec<Position>),
}

#[derive(Default)]
struct MatchState {
    subst: Subst,
    demands: Vec<Position>,
    clash: bool,
}

impl MatchState {
    fn go(&mut self, pattern: &Expr, subject: &Expr, at: &Position) {
        if self.clash {
            return;
        }
        match (pattern, subject) {
            (Expr::Var(x), _) => self.subst.bind(x.clone(), subject.clone()),
            (Expr::App(_, _), Expr::App(g, _)) if g.is_function() => self.demands.push(at.clone()),
            (Expr::App(c, ps), Expr::App(d, es)) if c == d => {
                for (i, (p, e)) in ps.iter().zip(es.iter()).enumerate() {
                    self.go(p, e, &at.child(i + 1));
                }
            }
            _ => self.clash = true,
        }
    }

    fn finish(self) -> MatchOutcome {
        if self.clash {
            MatchOutcome::NoMatch
        } else if !self.demands.is_empty() {
            MatchOutcome::Demands(self.demands)
        } else {
            MatchOutcome::Match(self.subst)
        }
    }
}

/// Three-valued matching of a linear c-term `pattern` against `subject`.
pub fn match_pattern(pattern: &Expr, subject: &Expr) -> MatchOutcome {
    let mut st = MatchState::default();
    st.go(pattern, subject, &Position::root());
    st.finish()
}

/// Matches the left-hand side of `rule` against `subject`.
pub fn match_rule(rule: &Rule, subject: &Expr) -> MatchOutcome {
    match subject {
        Expr::App(f, args) if f == rule.fun() => {
            let mut st = MatchState::default();
            for (i, (p, e)) in rule.patterns().iter().zip(args.iter()).enumerate() {
                st.go(p, e, &Position(vec![i + 1]));
            }
            st.finish()
        }
        _ => MatchOutcome::NoMatch,
    }
}

/// A rule instance at a position: `matcher` applied to the rule's left-hand
/// side equals the subterm at `pos`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Redex {
    pub pos: Position,
    pub rule: RuleId,
    pub matcher: Subst,
}

impl Redex {
    /// Contracts the redex inside `e`.
    pub fn apply(&self, p: &Program, e: &Expr) -> Expr {
        let rule = p.rule(self.rule);
        e.replace_at(&self.pos, self.matcher.apply(rule.rhs()))
            .expect("redex positions are valid for their expression")
    }
}

fn function_positions(
    e: &Expr,
    at: &mut Vec<usize>,
    out: &mut Vec<Position>,
    outermost_only: bool,
) {
    if let Expr::App(s, args) = e {
        if s.is_function() {
            out.push(Position(at.clone()));
            if outermost_only {
                return;
            }
        }
        for (i, a) in args.iter().enumerate() {
            at.push(i + 1);
            function_positions(a, at, out, outermost_only);
            at.pop();
        }
    }
}

/// Every redex of `e`, in preorder of positions and then rule order.
pub fn all_redexes(p: &Program, e: &Expr) -> Vec<Redex> {
    let mut positions = Vec::new();
    function_positions(e, &mut Vec::new(), &mut positions, false);
    let mut out = Vec::new();
    for pos in positions {
        let sub = e.subterm_at(&pos).expect("collected position");
        let Some(f) = sub.symbol() else { continue };
        for &id in p.rules_for(f) {
            if let MatchOutcome::Match(matcher) = match_rule(p.rule(id), sub) {
                out.push(Redex {
                    pos: pos.clone(),
                    rule: id,
                    matcher,
                });
            }
        }
    }
    out
}

/// Redexes selected by demand analysis.
///
/// Walks the outermost function-rooted positions left to right. At the first
/// one that yields anything, rules that match contribute their redex, and
/// rules blocked on function-rooted arguments send the search into those
/// demanded positions recursively. A position whose rules all clash is dead
/// and the next outermost one is tried. The result is always a subset of
/// [`all_redexes`].
pub fn demanded_redexes(p: &Program, e: &Expr) -> Vec<Redex> {
    let mut outermost = Vec::new();
    function_positions(e, &mut Vec::new(), &mut outermost, true);
    for q in outermost {
        let mut found = Vec::new();
        let mut seen_pos = HashSet::new();
        let mut seen_redex = HashSet::new();
        demand_at(p, e, &q, &mut seen_pos, &mut seen_redex, &mut found);
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

fn demand_at(
    p: &Program,
    e: &Expr,
    q: &Position,
    seen_pos: &mut HashSet<Position>,
    seen_redex: &mut HashSet<(Position, RuleId)>,
    out: &mut Vec<Redex>,
) {
    if !seen_pos.insert(q.clone()) {
        return;
    }
    let sub = e.subterm_at(q).expect("demanded position exists");
    let Some(f) = sub.symbol() else { return };
    for &id in p.rules_for(f) {
        match match_rule(p.rule(id), sub) {
            MatchOutcome::Match(matcher) => {
                if seen_redex.insert((q.clone(), id)) {
                    out.push(Redex {
                        pos: q.clone(),
                        rule: id,
                        matcher,
                    });
                }
            }
            MatchOutcome::Demands(ps) => {
                for d in ps {
                    demand_at(p, e, &q.concat(&d), seen_pos, seen_redex, out);
                }
            }
            MatchOutcome::NoMatch => {}
        }
    }
}

/// Which redexes the search expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frontier {
    #[default]
    Demanded,
    All,
}

impl Frontier {
    pub fn redexes(self, p: &Program, e: &Expr) -> Vec<Redex> {
        match self {
            Frontier::Demanded => demanded_redexes(p, e),
            Frontier::All => all_redexes(p, e),
        }
    }
}
