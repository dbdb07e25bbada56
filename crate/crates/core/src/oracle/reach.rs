//! Exhaustive bounded rewriting under the original program. Extra variables
//! are instantiated from a finite pool of ground expressions.

use std::collections::{HashMap, VecDeque};

use crate::engine::all_redexes;
use crate::program::Program;
use crate::terms::{Expr, Name, Signature, Subst, Symbol};

/// Every ground c-term over the constructors of `sig` with depth at most
/// `depth`, in canonical order.
pub fn ground_cterms(sig: &Signature, depth: usize) -> Vec<Expr> {
    let cs: Vec<Symbol> = sig.constructors().cloned().collect();
    terms_over(&cs, depth)
}

/// Every ground expression over `symbols` with depth at most `depth`.
pub fn terms_over(symbols: &[Symbol], depth: usize) -> Vec<Expr> {
    let mut layer: Vec<Expr> = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in symbols {
            let choices = vec![layer.clone(); s.arity()];
            for args in product(&choices) {
                next.push(Expr::app(s.clone(), args));
            }
        }
        next.sort();
        next.dedup();
        layer = next;
    }
    layer
}

fn product(choices: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let mut acc: Vec<Vec<Expr>> = vec![Vec::new()];
    for options in choices {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

/// Below this many depth-2 instances, choices range over all of them.
const SMALL_POOL: usize = 16;

/// Instances tried for extra variables: ground c-terms of depth at most 2,
/// plus binary choices between distinct ground c-terms of depth at most 1,
/// or of depth at most 2 when there are few of those.
pub fn extra_var_pool(sig: &Signature) -> Vec<Expr> {
    extra_var_pool_with(sig, &[])
}

/// [`extra_var_pool`] with the variables `vars` added as instances, alone
/// and inside the binary choices.
pub fn extra_var_pool_with(sig: &Signature, vars: &[Name]) -> Vec<Expr> {
    let mut pool = ground_cterms(sig, 2);
    let mut small: Vec<Expr> = vars.iter().map(|x| Expr::Var(x.clone())).collect();
    pool.extend(small.iter().cloned());
    if pool.len() <= SMALL_POOL {
        small = pool.clone();
    } else {
        small.extend(ground_cterms(sig, 1));
    }
    for (i, a) in small.iter().enumerate() {
        for b in &small[i + 1..] {
            pool.push(Expr::choice(a.clone(), b.clone()));
        }
    }
    pool
}

/// One-step reducts of `e`, every redex and every pool instance of extra
/// variables included.
pub fn successors(p: &Program, e: &Expr, pool: &[Expr]) -> Vec<Expr> {
    let mut out = Vec::new();
    for r in all_redexes(p, e) {
        let rule = p.rule(r.rule);
        let extras: Vec<_> = rule.extra_vars().into_iter().collect();
        if extras.is_empty() {
            out.push(r.apply(p, e));
            continue;
        }
        let choices = vec![pool.to_vec(); extras.len()];
        for values in product(&choices) {
            let mut s: Subst = r.matcher.clone();
            for (x, v) in extras.iter().zip(values) {
                s.bind(x.clone(), v);
            }
            out.push(
                e.replace_at(&r.pos, s.apply(rule.rhs()))
                    .expect("redex position"),
            );
        }
    }
    out
}

/// States reachable within a step bound, each with its least step count.
#[derive(Debug, Clone)]
pub struct Reach {
    pub states: HashMap<Expr, usize>,
    /// Some state at the bound still had a reduct.
    pub truncated: bool,
}

impl Reach {
    pub fn contains(&self, e: &Expr) -> bool {
        self.states.contains_key(e)
    }

    pub fn values(&self) -> impl Iterator<Item = &Expr> {
        self.states.keys().filter(|e| e.is_value())
    }
}

pub fn reach(p: &Program, e: &Expr, bound: usize, pool: &[Expr]) -> Reach {
    let mut states = HashMap::from([(e.clone(), 0)]);
    let mut queue = VecDeque::from([(e.clone(), 0)]);
    let mut truncated = false;
    while let Some((cur, d)) = queue.pop_front() {
        let next = successors(p, &cur, pool);
        if d == bound {
            truncated |= !next.is_empty();
            continue;
        }
        for n in next {
            if !states.contains_key(&n) {
                states.insert(n.clone(), d + 1);
                queue.push_back((n, d + 1));
            }
        }
    }
    Reach { states, truncated }
}

/// Whether `e →* t` within `bound` steps, extra variables drawn from the
/// default pool.
pub fn rewrites_to(p: &Program, e: &Expr, t: &Expr, bound: usize) -> bool {
    reach(p, e, bound, &extra_var_pool(p.signature())).contains(t)
}
