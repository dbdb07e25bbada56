//! Bounded decision procedure for reduction statements `se ⇝ st`.
//!
//! A statement with a set target holds iff every target element is reached
//! from a single element of the source, so the search works element by
//! element. Rule application does not enumerate matchers blindly: the
//! right-hand side is solved first with the rule's variables left open, which
//! yields the least s-csubstitutions making it reach the target, and only then
//! are the arguments checked against the instantiated patterns. Requirements
//! on open variables are collected as maps and joined by union.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::program::Program;
use crate::terms::{Expr, Name};

use super::sexp::{etose_total, ESExp, SExp, SSubst};

/// Bounds for oracle queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Maximum nesting of rule applications in a proof.
    pub depth: usize,
    /// Maximum set cardinality in enumerated s-cterms.
    pub width: usize,
    /// Maximum constructor nesting in enumerated s-cterms.
    pub nesting: usize,
    /// Variables allowed in enumerated s-cterms.
    pub var_pool: Vec<Name>,
}

impl Budget {
    pub fn new(depth: usize) -> Self {
        Budget {
            depth,
            width: 2,
            nesting: 3,
            var_pool: vec!["X".into(), "Y".into()],
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width;
        self
    }

    pub fn with_nesting(mut self, nesting: usize) -> Self {
        self.nesting = nesting;
        self
    }

    pub fn with_vars(mut self, vars: &[&str]) -> Self {
        self.var_pool = vars.iter().map(|&v| Name::from(v)).collect();
        self
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(6)
    }
}

/// Outcome of a bounded query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Proved,
    /// No proof exists at all, independently of the budget.
    Refuted,
    /// No proof within the budget, but the search was cut somewhere.
    Exhausted,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Proved
    }

    fn from_search(found: bool, cut: bool) -> Self {
        match (found, cut) {
            (true, _) => Verdict::Proved,
            (false, false) => Verdict::Refuted,
            (false, true) => Verdict::Exhausted,
        }
    }
}

const HOLE: char = '#';

type Req = BTreeMap<Name, SExp>;
type Alts = BTreeSet<Req>;

fn is_hole(x: &str) -> bool {
    x.starts_with(HOLE)
}

fn has_holes(e: &ESExp) -> bool {
    match e {
        ESExp::Var(x) => is_hole(x),
        ESExp::App(_, args) => args.iter().any(|a| a.iter().any(has_holes)),
    }
}

fn unit() -> Alts {
    BTreeSet::from([Req::new()])
}

fn join(a: &Req, b: &Req) -> Req {
    let mut out = a.clone();
    for (k, v) in b {
        let merged = match out.get(k) {
            Some(w) => w.union(v),
            None => v.clone(),
        };
        out.insert(k.clone(), merged);
    }
    out
}

fn covers(small: &Req, big: &Req) -> bool {
    small.iter().all(|(k, v)| match big.get(k) {
        Some(w) => v.iter().all(|e| w.contains(e)),
        None => v.is_empty(),
    })
}

/// Keeps only the requirement maps not implied by a weaker one.
fn prune(alts: Alts) -> Alts {
    if alts.len() < 2 {
        return alts;
    }
    let v: Vec<Req> = alts.into_iter().collect();
    let mut out = Alts::new();
    for (i, a) in v.iter().enumerate() {
        let dominated = v
            .iter()
            .enumerate()
            .any(|(j, b)| j != i && covers(b, a) && (!covers(a, b) || j < i));
        if !dominated {
            out.insert(a.clone());
        }
    }
    out
}

fn product(a: &Alts, b: &Alts) -> Alts {
    let mut out = Alts::new();
    for x in a {
        for y in b {
            out.insert(join(x, y));
        }
    }
    prune(out)
}

/// A single proof search; memo tables live as long as the value.
pub struct Prover<'p> {
    program: &'p Program,
    fresh: usize,
    memo: HashMap<(ESExp, ESExp, usize), (bool, bool)>,
    cut: bool,
}

impl<'p> Prover<'p> {
    pub fn new(program: &'p Program) -> Self {
        Prover {
            program,
            fresh: 0,
            memo: HashMap::new(),
            cut: false,
        }
    }

    /// Decides `se ⇝ st` within `depth` nested rule applications.
    pub fn derivable(&mut self, se: &SExp, st: &SExp, depth: usize) -> Verdict {
        assert!(st.is_cterm(), "targets must be s-cterms");
        assert!(
            !se.iter().any(has_holes),
            "reserved variable names in the source"
        );
        let saved = std::mem::replace(&mut self.cut, false);
        let found = !self.set(se, st, depth).is_empty();
        let cut = self.cut;
        self.cut |= saved;
        Verdict::from_search(found, cut)
    }

    fn set(&mut self, se: &SExp, st: &SExp, d: usize) -> Alts {
        let mut acc = unit();
        for est in st.iter() {
            let mut options = Alts::new();
            for ese in se.iter() {
                options.extend(self.elem(ese, est, d));
            }
            acc = product(&acc, &prune(options));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    fn elem(&mut self, ese: &ESExp, est: &ESExp, d: usize) -> Alts {
        match ese {
            ESExp::Var(x) if is_hole(x) => {
                BTreeSet::from([Req::from([(x.clone(), SExp::singleton(est.clone()))])])
            }
            ESExp::Var(x) => match est {
                ESExp::Var(y) if x == y => unit(),
                _ => Alts::new(),
            },
            ESExp::App(c, args) if c.is_constructor() => match est {
                ESExp::App(c2, targets) if c == c2 => {
                    let mut acc = unit();
                    for (a, t) in args.iter().zip(targets) {
                        acc = product(&acc, &self.set(a, t, d));
                        if acc.is_empty() {
                            break;
                        }
                    }
                    acc
                }
                _ => Alts::new(),
            },
            ESExp::App(_, _) if !has_holes(ese) => {
                let key = (ese.clone(), est.clone(), d);
                let (found, cut) = match self.memo.get(&key) {
                    Some(&hit) => hit,
                    None => {
                        let saved = std::mem::replace(&mut self.cut, false);
                        let found = !self.apply_rules(ese, est, d).is_empty();
                        let cut = self.cut;
                        self.cut = saved;
                        self.memo.insert(key, (found, cut));
                        (found, cut)
                    }
                };
                self.cut |= cut && !found;
                if found {
                    unit()
                } else {
                    Alts::new()
                }
            }
            ESExp::App(_, _) => self.apply_rules(ese, est, d),
        }
    }

    fn apply_rules(&mut self, ese: &ESExp, est: &ESExp, d: usize) -> Alts {
        let ESExp::App(f, args) = ese else {
            unreachable!()
        };
        if d == 0 {
            if !self.program.rules_for(f).is_empty() {
                self.cut = true;
            }
            return Alts::new();
        }
        let target = SExp::singleton(est.clone());
        let mut out = Alts::new();
        for &id in self.program.rules_for(f) {
            let rule = self.program.rule(id);
            let renaming =
                self.rename(rule.lhs().var_set().into_iter().chain(rule.rhs().var_set()));
            let rhs = etose_total(rule.rhs()).apply(&renaming);
            for theta in self.set(&rhs, &target, d - 1) {
                let mut full = SSubst::new();
                for (x, hole) in renaming.iter() {
                    let hole_name = hole.iter().next().and_then(|e| match e {
                        ESExp::Var(h) => Some(h.clone()),
                        _ => None,
                    });
                    let value = hole_name
                        .and_then(|h| theta.get(&h).cloned())
                        .unwrap_or_default();
                    full.insert(x.clone(), value);
                }
                let mut acc = unit();
                for (a, p) in args.iter().zip(rule.patterns()) {
                    let goal = etose_total(p).apply(&full);
                    acc = product(&acc, &self.set(a, &goal, d - 1));
                    if acc.is_empty() {
                        break;
                    }
                }
                out.extend(acc);
            }
        }
        prune(out)
    }

    fn rename(&mut self, vars: impl Iterator<Item = Name>) -> SSubst {
        let mut out = SSubst::new();
        for x in vars {
            if out.get(&x).is_none() {
                self.fresh += 1;
                let hole: Name = Arc::from(format!("{HOLE}{}", self.fresh).as_str());
                out.insert(x, SExp::singleton(ESExp::Var(hole)));
            }
        }
        out
    }
}

/// Decides `se ⇝ st` under `p` within the budget's proof depth.
pub fn derivable(p: &Program, se: &SExp, st: &SExp, budget: &Budget) -> Verdict {
    Prover::new(p).derivable(se, st, budget.depth)
}

/// Shorthand for `⌈e⌉ ⇝ st`.
pub fn derivable_from(p: &Program, e: &Expr, st: &SExp, budget: &Budget) -> Verdict {
    derivable(p, &etose_total(e), st, budget)
}
