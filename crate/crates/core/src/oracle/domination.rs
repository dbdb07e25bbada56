//! The domination relation between s-cterms and expressions, checked over
//! bounded rewriting.

use std::collections::HashMap;

use crate::program::Program;
use crate::terms::Expr;

use super::calculus::Verdict;
use super::reach::{extra_var_pool, reach, Reach};
use super::sexp::{ESExp, SExp};

struct Checker<'p> {
    program: &'p Program,
    pool: Vec<Expr>,
    reach: HashMap<(Expr, usize), Reach>,
    cut: bool,
}

impl Checker<'_> {
    fn reach(&mut self, e: &Expr, k: usize) -> &Reach {
        let key = (e.clone(), k);
        if !self.reach.contains_key(&key) {
            let r = reach(self.program, e, k, &self.pool);
            self.reach.insert(key.clone(), r);
        }
        &self.reach[&key]
    }

    fn set(&mut self, st: &SExp, e: &Expr, k: usize) -> bool {
        st.iter().all(|est| self.elem(est, e, k))
    }

    fn elem(&mut self, est: &ESExp, e: &Expr, k: usize) -> bool {
        let r = self.reach(e, k).clone();
        self.cut |= r.truncated;
        let mut candidates: Vec<(Expr, usize)> = match est {
            ESExp::Var(x) => {
                return r.contains(&Expr::Var(x.clone()));
            }
            ESExp::App(c, _) => r
                .states
                .iter()
                .filter(|(s, _)| s.symbol() == Some(c))
                .map(|(s, &d)| (s.clone(), d))
                .collect(),
        };
        candidates.sort();
        let ESExp::App(_, sts) = est else {
            unreachable!()
        };
        candidates.into_iter().any(|(s, d)| {
            s.args()
                .iter()
                .zip(sts)
                .all(|(a, st)| self.set(st, a, k - d))
        })
    }
}

/// Whether `st` is dominated by `e`: each element is reached by some bounded
/// rewriting of `e`, constructor elements componentwise.
pub fn dominates(p: &Program, st: &SExp, e: &Expr, bound: usize) -> Verdict {
    let mut c = Checker {
        program: p,
        pool: extra_var_pool(p.signature()),
        reach: HashMap::new(),
        cut: false,
    };
    // A finite pool never covers every instance of an extra variable.
    let found = c.set(st, e, bound);
    match (found, c.cut || p.has_extra_vars()) {
        (true, _) => Verdict::Proved,
        (false, false) => Verdict::Refuted,
        (false, true) => Verdict::Exhausted,
    }
}
