//! Bounded denotations: every s-cterm inside the budget's universe that an
//! s-expression reduces to.
//!
//! Candidates come from a coarse forward evaluation that over-approximates
//! the shapes an s-expression can reach, and each candidate is then decided
//! by the prover. Unconstrained positions (extra variables, truncated depth)
//! stand for the whole universe.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::program::Program;
use crate::terms::{Expr, Name, Symbol};

use super::calculus::{Budget, Prover, Verdict};
use super::sexp::{ESExp, SExp};

/// Upper limit on decided candidates before a denotation gives up.
pub const CANDIDATE_LIMIT: u128 = 250_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Denotation {
    pub members: BTreeSet<SExp>,
    /// Set when some candidate could not be decided within the depth budget
    /// or the candidate space was too large to enumerate.
    pub exhausted: bool,
}

impl Denotation {
    pub fn ground(&self) -> BTreeSet<SExp> {
        self.members
            .iter()
            .filter(|s| s.is_ground())
            .cloned()
            .collect()
    }

    pub fn contains(&self, st: &SExp) -> bool {
        self.members.contains(st)
    }
}

/// Abstract set of elemental s-cterms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Shape {
    top: bool,
    vars: BTreeSet<Name>,
    apps: BTreeMap<Symbol, Vec<Shape>>,
}

impl Shape {
    fn top() -> Self {
        Shape {
            top: true,
            ..Shape::default()
        }
    }

    fn is_empty(&self) -> bool {
        !self.top && self.vars.is_empty() && self.apps.is_empty()
    }

    fn join(&mut self, other: Shape) {
        self.top |= other.top;
        self.vars.extend(other.vars);
        for (c, args) in other.apps {
            match self.apps.get_mut(&c) {
                Some(mine) => mine.iter_mut().zip(args).for_each(|(m, a)| m.join(a)),
                None => {
                    self.apps.insert(c, args);
                }
            }
        }
        if self.top {
            self.apps.clear();
        }
    }

    fn truncate(&mut self, levels: usize) {
        if self.top {
            return;
        }
        if levels == 0 {
            if !self.apps.is_empty() {
                self.apps.clear();
                self.top = true;
            }
            return;
        }
        for args in self.apps.values_mut() {
            args.iter_mut().for_each(|a| a.truncate(levels - 1));
        }
    }
}

struct Abstractor<'p> {
    program: &'p Program,
    precision: usize,
    memo: HashMap<(Symbol, Vec<Shape>, usize), Shape>,
}

type Env = BTreeMap<Name, Shape>;

impl Abstractor<'_> {
    fn sexp(&mut self, se: &SExp, d: usize) -> Shape {
        let mut out = Shape::default();
        for e in se.iter() {
            out.join(self.esexp(e, d));
        }
        out.truncate(self.precision);
        out
    }

    fn esexp(&mut self, e: &ESExp, d: usize) -> Shape {
        match e {
            ESExp::Var(x) => Shape {
                vars: BTreeSet::from([x.clone()]),
                ..Shape::default()
            },
            ESExp::App(c, args) if c.is_constructor() => {
                let args = args.iter().map(|a| self.sexp(a, d)).collect();
                Shape {
                    apps: BTreeMap::from([(c.clone(), args)]),
                    ..Shape::default()
                }
            }
            ESExp::App(f, args) => {
                if d == 0 {
                    return Shape::default();
                }
                let args: Vec<Shape> = args.iter().map(|a| self.sexp(a, d - 1)).collect();
                self.call(f, args, d)
            }
        }
    }

    fn call(&mut self, f: &Symbol, args: Vec<Shape>, d: usize) -> Shape {
        let key = (f.clone(), args, d);
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let mut out = Shape::default();
        for &id in self.program.rules_for(f) {
            let rule = self.program.rule(id);
            let mut env = Env::new();
            if rule
                .patterns()
                .iter()
                .zip(&key.1)
                .all(|(p, a)| match_shape(p, a, &mut env))
            {
                for x in rule.extra_vars() {
                    env.insert(x, Shape::top());
                }
                out.join(self.expr(rule.rhs(), &env, d - 1));
            }
        }
        out.truncate(self.precision);
        self.memo.insert(key, out.clone());
        out
    }

    fn expr(&mut self, e: &Expr, env: &Env, d: usize) -> Shape {
        match e {
            Expr::Var(x) => env.get(x).cloned().unwrap_or_else(Shape::top),
            Expr::App(c, args) if c.is_constructor() => {
                let args = args.iter().map(|a| self.expr(a, env, d)).collect();
                Shape {
                    apps: BTreeMap::from([(c.clone(), args)]),
                    ..Shape::default()
                }
            }
            Expr::App(f, args) => {
                if d == 0 {
                    return Shape::default();
                }
                let args: Vec<Shape> = args.iter().map(|a| self.expr(a, env, d - 1)).collect();
                self.call(f, args, d)
            }
        }
    }
}

/// Matches a linear c-term pattern against a shape, widening the bindings
/// over every element that could match.
fn match_shape(p: &Expr, s: &Shape, env: &mut Env) -> bool {
    match p {
        Expr::Var(x) => {
            env.insert(x.clone(), s.clone());
            true
        }
        Expr::App(c, ps) => {
            if s.top {
                for x in p.var_set() {
                    env.insert(x, Shape::top());
                }
                return true;
            }
            match s.apps.get(c) {
                Some(args) => ps.iter().zip(args).all(|(p, a)| match_shape(p, a, env)),
                None => false,
            }
        }
    }
}

struct Concretizer<'b> {
    budget: &'b Budget,
    constructors: Vec<Symbol>,
    universe: HashMap<usize, Vec<SExp>>,
}

impl Concretizer<'_> {
    fn sets_from(&self, elems: Vec<ESExp>) -> Vec<SExp> {
        let mut out = vec![SExp::empty()];
        subsets(&elems, self.budget.width, &mut out);
        out
    }

    fn universe_sets(&mut self, n: usize) -> Vec<SExp> {
        if let Some(u) = self.universe.get(&n) {
            return u.clone();
        }
        let elems = self.universe_elems(n);
        let sets = self.sets_from(elems);
        self.universe.insert(n, sets.clone());
        sets
    }

    fn universe_elems(&mut self, n: usize) -> Vec<ESExp> {
        if n == 0 {
            return Vec::new();
        }
        let mut out: Vec<ESExp> = self
            .budget
            .var_pool
            .iter()
            .map(|x| ESExp::Var(x.clone()))
            .collect();
        let below = self.universe_sets(n - 1);
        for c in self.constructors.clone() {
            let choices = vec![below.clone(); c.arity()];
            for args in cartesian(&choices) {
                out.push(ESExp::App(c.clone(), args));
            }
        }
        out
    }

    fn elems(&mut self, s: &Shape, n: usize) -> Vec<ESExp> {
        if n == 0 {
            return Vec::new();
        }
        let mut out: BTreeSet<ESExp> = s.vars.iter().map(|x| ESExp::Var(x.clone())).collect();
        if s.top {
            out.extend(self.universe_elems(n));
        }
        for (c, args) in &s.apps {
            let choices: Vec<Vec<SExp>> = args.iter().map(|a| self.sets(a, n - 1)).collect();
            for args in cartesian(&choices) {
                out.insert(ESExp::App(c.clone(), args));
            }
        }
        out.into_iter().collect()
    }

    fn sets(&mut self, s: &Shape, n: usize) -> Vec<SExp> {
        let elems = self.elems(s, n);
        self.sets_from(elems)
    }

    fn count_universe_elems(&self, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        let below = self.count_sets_of(self.count_universe_elems(n - 1));
        let mut total = self.budget.var_pool.len() as u128;
        for c in &self.constructors {
            total = total.saturating_add(below.saturating_pow(c.arity() as u32));
        }
        total
    }

    fn count_sets_of(&self, elems: u128) -> u128 {
        let mut total: u128 = 1;
        let mut binom: u128 = 1;
        for k in 1..=self.budget.width as u128 {
            if k > elems {
                break;
            }
            binom = binom.saturating_mul(elems - k + 1) / k;
            total = total.saturating_add(binom);
        }
        total
    }

    fn count_elems(&self, s: &Shape, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        let mut total = s.vars.len() as u128;
        if s.top {
            total = total.saturating_add(self.count_universe_elems(n));
        }
        for args in s.apps.values() {
            let mut prod: u128 = 1;
            for a in args {
                prod = prod.saturating_mul(self.count_sets_of(self.count_elems(a, n - 1)));
            }
            total = total.saturating_add(prod);
        }
        total
    }
}

fn subsets(elems: &[ESExp], width: usize, out: &mut Vec<SExp>) {
    fn go(elems: &[ESExp], start: usize, width: usize, cur: &mut Vec<ESExp>, out: &mut Vec<SExp>) {
        for i in start..elems.len() {
            cur.push(elems[i].clone());
            out.push(cur.iter().cloned().collect());
            if cur.len() < width {
                go(elems, i + 1, width, cur, out);
            }
            cur.pop();
        }
    }
    if width > 0 {
        go(elems, 0, width, &mut Vec::new(), out);
    }
}

fn cartesian(choices: &[Vec<SExp>]) -> Vec<Vec<SExp>> {
    let mut acc: Vec<Vec<SExp>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for prefix in &acc {
            for o in options {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

fn max_pattern_depth(p: &Program) -> usize {
    p.rules()
        .iter()
        .flat_map(|r| r.patterns().iter().map(Expr::depth))
        .max()
        .unwrap_or(0)
}

/// All s-cterms of the budget's universe derivable from `se`. The empty set
/// is always a member.
pub fn denotation(p: &Program, se: &SExp, budget: &Budget) -> Denotation {
    let mut abs = Abstractor {
        program: p,
        precision: budget.nesting + max_pattern_depth(p),
        memo: HashMap::new(),
    };
    let shape = abs.sexp(se, budget.depth);
    let mut conc = Concretizer {
        budget,
        constructors: p.signature().constructors().cloned().collect(),
        universe: HashMap::new(),
    };
    let mut members = BTreeSet::from([SExp::empty()]);
    if shape.is_empty() {
        return Denotation {
            members,
            exhausted: false,
        };
    }
    if conc.count_sets_of(conc.count_elems(&shape, budget.nesting)) > CANDIDATE_LIMIT {
        return Denotation {
            members,
            exhausted: true,
        };
    }
    let mut prover = Prover::new(p);
    let mut exhausted = false;
    for st in conc.sets(&shape, budget.nesting) {
        if st.is_empty() {
            continue;
        }
        match prover.derivable(se, &st, budget.depth) {
            Verdict::Proved => {
                members.insert(st);
            }
            Verdict::Refuted => {}
            Verdict::Exhausted => exhausted = true,
        }
    }
    Denotation { members, exhausted }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sexp::etose_total;
    use crate::parser::{parse_module, parse_term};

    fn program(src: &str) -> Program {
        let (_, rules) = parse_module(src).unwrap();
        Program::validate(&rules).unwrap()
    }

    fn sc(p: &Program, s: &str) -> SExp {
        etose_total(&p.classify(&parse_term(s).unwrap()).unwrap())
    }

    fn rendered(d: &BTreeSet<SExp>) -> Vec<String> {
        d.iter().map(SExp::to_string).collect()
    }

    #[test]
    fn constants() {
        let p = program(include_str!("../../corpus/clerks.smod"));
        let d = denotation(&p, &sc(&p, "madrid"), &Budget::new(2));
        assert_eq!(rendered(&d.members), ["{}", "{madrid}"]);
        assert!(!d.exhausted);
    }

    #[test]
    fn branches() {
        let p = program(include_str!("../../corpus/clerks.smod"));
        let d = denotation(&p, &sc(&p, "branches"), &Budget::new(3));
        assert_eq!(
            rendered(&d.members),
            ["{}", "{madrid}", "{madrid,vigo}", "{vigo}"]
        );
    }

    #[test]
    fn extra_variable_pair_is_not_diagonal() {
        let p = program("(smod M is f -> pair(X, X) . g -> 0 . g -> 1 . ends)");
        let d = denotation(
            &p,
            &sc(&p, "f"),
            &Budget::new(3).with_nesting(2).with_vars(&[]),
        );
        assert!(d.contains(&sc(&p, "pair(0,1)")));
        assert!(d.contains(&sc(&p, "pair(1,1)")));
    }

    #[test]
    fn generator_reaches_every_small_value() {
        let p =
            crate::generators::with_gen_rules(&program("(smod M is h -> c(a, b) . ends)")).unwrap();
        let budget = Budget::new(4).with_nesting(2).with_vars(&[]);
        let d = denotation(&p, &sc(&p, "gen"), &budget);
        for t in ["a", "b", "c(a,b)", "c(b,b)"] {
            assert!(d.contains(&sc(&p, t)), "{t}");
        }
        assert!(!d.contains(&sc(&p, "c(c(a,a),a)")));
    }

    #[test]
    fn counting_matches_enumeration() {
        let p = program("(smod M is f -> pair(X, X) . g -> 0 . g -> 1 . ends)");
        let budget = Budget::new(1).with_nesting(2);
        let mut conc = Concretizer {
            budget: &budget,
            constructors: p.signature().constructors().cloned().collect(),
            universe: HashMap::new(),
        };
        let n = conc.universe_sets(2).len() as u128;
        assert_eq!(conc.count_sets_of(conc.count_universe_elems(2)), n);
        assert_eq!(conc.count_sets_of(conc.count_universe_elems(1)), 16);
    }
}
