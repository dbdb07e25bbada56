mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, LazyLock};

use proptest::prelude::*;
use proptest::sample::select;

use genlift::oracle::{
    apply_scsubst, denotation, derivable, dominates, etose, etose_total, reach, terms_over, Budget,
    ESExp, SExp, SSubst, Verdict,
};
use genlift::search::reachable_values;
use genlift::{
    all_redexes, demanded_redexes, lift_check, parse_term, start_search, transform_program,
    with_gen_rules, Expr, Frontier, PartialExpr, Program, SearchConfig, Subst, Symbol,
};

use common::*;

static COIN_P: LazyLock<Program> = LazyLock::new(|| program(COIN));
static IPL_P: LazyLock<Program> = LazyLock::new(|| program(IPL));
static CLERKS_P: LazyLock<Program> = LazyLock::new(|| program(CLERKS));
static PAIR_P: LazyLock<Program> =
    LazyLock::new(|| program("(smod P is f -> pair(X, X) . g -> 0 . g -> 1 . ends)"));

fn user_symbols(p: &Program) -> Vec<Symbol> {
    let sig = p.signature();
    sig.constructors()
        .chain(sig.user_functions())
        .cloned()
        .collect()
}

/// Expressions over `symbols` and the variables `vars`.
fn exprs(symbols: Vec<Symbol>, vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Expr> {
    let leaves: Vec<Expr> = symbols
        .iter()
        .filter(|s| s.arity() == 0)
        .map(|s| Expr::constant(s.clone()))
        .chain(vars.iter().map(|&v| Expr::var(v)))
        .collect();
    let inner: Vec<Symbol> = symbols.into_iter().filter(|s| s.arity() > 0).collect();
    let leaf = select(leaves).boxed();
    if inner.is_empty() {
        return leaf;
    }
    let max_arity = inner.iter().map(Symbol::arity).max().unwrap();
    leaf.prop_recursive(depth, 24, max_arity as u32, move |rec| {
        (select(inner.clone()), prop::collection::vec(rec, max_arity))
            .prop_map(|(s, mut args)| {
                args.truncate(s.arity());
                Expr::app(s, args)
            })
            .boxed()
    })
    .boxed()
}

fn with_choice(mut symbols: Vec<Symbol>) -> Vec<Symbol> {
    symbols.push(Symbol::choice());
    symbols
}

/// Cuts subterms of `e` to `⊥` following the bits of `mask`.
fn cut(e: &PartialExpr, mask: &mut u64) -> PartialExpr {
    let bit = *mask & 1 == 1;
    *mask = mask.rotate_right(1);
    if bit && *mask & 1 == 1 {
        *mask = mask.rotate_right(1);
        return PartialExpr::Bottom;
    }
    match e {
        PartialExpr::App(s, args) => {
            PartialExpr::App(s.clone(), args.iter().map(|a| cut(a, mask)).collect())
        }
        other => other.clone(),
    }
}

fn partial(e: &Expr, mut mask: u64) -> PartialExpr {
    cut(&PartialExpr::from(e), &mut mask)
}

fn substs(symbols: Vec<Symbol>) -> impl Strategy<Value = Subst> {
    prop::collection::btree_map(
        select(vec!["X", "Y", "Z"]),
        exprs(symbols, &["X", "Y", "Z"], 2),
        0..3,
    )
    .prop_map(|m| m.into_iter().map(|(k, v)| (k.into(), v)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn approximation_is_a_partial_order(e in exprs(user_symbols(&CLERKS_P), &["X", "Y"], 4), m1: u64, m2: u64, other in exprs(user_symbols(&CLERKS_P), &["X"], 3), m3: u64) {
        let c = PartialExpr::from(&e);
        let b = cut(&c, &mut m1.clone());
        let a = cut(&b, &mut m2.clone());
        prop_assert!(c.approx_leq(&c));
        prop_assert!(a.approx_leq(&b) && b.approx_leq(&c) && a.approx_leq(&c));
        let d = partial(&other, m3);
        if a.approx_leq(&d) && d.approx_leq(&a) {
            prop_assert_eq!(a, d);
        }
    }

    #[test]
    fn shell_is_idempotent_and_below(e in exprs(user_symbols(&CLERKS_P), &["X", "Y"], 4), m: u64) {
        let pe = partial(&e, m);
        let s = pe.shell();
        prop_assert_eq!(s.shell(), s.clone());
        prop_assert!(s.approx_leq(&pe));
        prop_assert!(s.is_cterm());
    }

    #[test]
    fn composition(e in exprs(user_symbols(&IPL_P), &["X", "Y", "Z"], 3), s in substs(user_symbols(&IPL_P)), t in substs(user_symbols(&IPL_P)), u in substs(user_symbols(&IPL_P))) {
        prop_assert_eq!(s.compose(&t).apply(&e), t.apply(&s.apply(&e)));
        prop_assert_eq!(s.compose(&t).compose(&u), s.compose(&t.compose(&u)));
    }

    #[test]
    fn render_parse_round_trip(e in exprs(with_choice(user_symbols(&CLERKS_P)), &["X", "Y"], 4)) {
        let back = CLERKS_P.classify(&parse_term(&e.to_string()).unwrap()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn demanded_redexes_are_redexes(e in exprs(with_choice(user_symbols(&IPL_P)), &[], 4), gens: bool) {
        let tp = transform_program(&IPL_P).unwrap();
        let e = if gens { e } else { e.genize() };
        let all: BTreeSet<_> = all_redexes(&tp, &e).into_iter().map(|r| (r.pos, r.rule)).collect();
        for r in demanded_redexes(&tp, &e) {
            prop_assert!(all.contains(&(r.pos, r.rule)));
        }
    }

    #[test]
    fn etose_laws(e in exprs(with_choice(user_symbols(&CLERKS_P)), &["X", "Y"], 4), s in substs(user_symbols(&CLERKS_P))) {
        let se = etose_total(&e);
        prop_assert_eq!(se.flat(), BTreeSet::from([PartialExpr::from(&e)]));
        prop_assert_eq!(se.setoe(), PartialExpr::from(&e));
        prop_assert_eq!(etose_total(&s.apply(&e)), apply_scsubst(&se, &SSubst::from_subst(&s)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn traces_replay_and_bfs_is_minimal(e in exprs(user_symbols(&COIN_P), &["X", "Y"], 3)) {
        let tp = Arc::new(transform_program(&COIN_P).unwrap());
        let start = e.genize();
        let cfg = SearchConfig::default().with_depth(6).with_frontier(Frontier::All);
        let least = reach(&tp, &start, 6, &[]);
        let mut last = 0;
        for sol in start_search(tp.clone(), start.clone(), cfg).unwrap().take(6) {
            prop_assert!(sol.trace.replay(&tp).is_ok());
            prop_assert_eq!(sol.trace.start(), &start);
            prop_assert_eq!(sol.trace.last(), &sol.value);
            prop_assert!(sol.trace.steps() >= last);
            last = sol.trace.steps();
            prop_assert_eq!(Some(&sol.trace.steps()), least.states.get(&sol.value));
        }
    }

    #[test]
    fn ground_targets_reflect_through_denotations(e in exprs(user_symbols(&COIN_P), &["X"], 2), s in exprs(with_choice(user_symbols(&COIN_P)), &[], 2)) {
        let p = &*COIN_P;
        let budget = Budget::new(6).with_nesting(1).with_vars(&[]);
        let se = etose_total(&e);
        let sigma = SSubst::new().with("X", etose_total(&s));
        let range: Vec<SExp> = denotation(p, &etose_total(&s), &budget).ground().into_iter().collect();
        let constructors: Vec<Symbol> = p.signature().constructors().cloned().collect();
        for st in ground_scterms(&constructors, 2, 1) {
            if derivable(p, &apply_scsubst(&se, &sigma), &st, &budget) != Verdict::Proved {
                continue;
            }
            let reflected = range.iter().any(|r| {
                derivable(p, &apply_scsubst(&se, &SSubst::new().with("X", r.clone())), &st, &budget) == Verdict::Proved
            });
            prop_assert!(reflected, "{} under {} reaches {} with no witness", se, sigma, st);
        }
    }

    #[test]
    fn domination_matches_denotation(which in 0usize..3, pick in any::<prop::sample::Index>()) {
        let (p, starts, nesting): (&Program, &[&str], usize) = match which {
            0 => (&COIN_P, &["coin", "f(coin,coin)", "f(0,coin)", "coin ? 2"], 1),
            1 => (&PAIR_P, &["f", "pair(g,g)", "g"], 2),
            _ => (&CLERKS_P, &["branches", "employees(branches)", "employees(vigo)"], 2),
        };
        let e = term(p, pick.get(starts));
        let budget = Budget::new(8).with_nesting(nesting).with_vars(&[]);
        let den = denotation(p, &etose_total(&e), &budget);
        prop_assume!(!den.exhausted);
        let constructors: Vec<Symbol> = p.signature().constructors().cloned().collect();
        let universe = if which == 2 {
            den.members.iter().cloned().chain(ground_scterms(&constructors, 1, 2).into_iter().take(200)).collect()
        } else {
            ground_scterms(&constructors, 2, nesting)
        };
        for st in universe {
            let d = dominates(p, &st, &e, 6);
            if d == Verdict::Exhausted {
                continue;
            }
            prop_assert_eq!(d.holds(), den.contains(&st), "{} vs {}", st, e);
        }
    }

    #[test]
    fn transformation_is_adequate(rhs in exprs(vec![
        Symbol::constructor("0", 0),
        Symbol::constructor("1", 0),
        Symbol::constructor("pair", 2),
        Symbol::function("g", 1),
        Symbol::function("h", 1),
    ], &["X"], 2)) {
        prop_assume!(rhs.var_set().contains("X"));
        let src = format!("(smod R is f -> {rhs} . g(0) -> 1 . h(1) -> pair(0, 0) . ends)");
        let p = program(&src);
        let f = etose_total(&term(&p, "f"));
        let budget = Budget::new(5).with_nesting(2);
        let left = denotation(&with_gen_rules(&p).unwrap(), &f, &budget);
        let right = denotation(&transform_program(&p).unwrap(), &f, &budget);
        prop_assume!(!left.exhausted && !right.exhausted);
        prop_assert_eq!(left.ground(), right.ground(), "{}", src);
    }

    #[test]
    fn lifting_is_complete(which: bool, e in exprs(user_symbols(&COIN_P), &["X", "Y"], 2), s in exprs(with_choice(user_symbols(&COIN_P)), &[], 2), t in exprs(with_choice(user_symbols(&COIN_P)), &[], 2)) {
        let (p, e) = if which {
            (&*COIN_P, e)
        } else {
            let e = term(&IPL_P, "f(c(X),c(Y))");
            (&*IPL_P, e)
        };
        let (s, t) = if which { (s, t) } else { (term(p, "0"), term(p, "1")) };
        let sigma = Subst::new().with("X", s).with("Y", t);
        for v in reach(p, &sigma.apply(&e), 5, &[]).values() {
            prop_assert!(lift_check(p, &e, v, 10), "{} {} ->* {}", e, sigma, v);
        }
    }

    #[test]
    fn lifting_is_sound(e in exprs(user_symbols(&COIN_P), &["X", "Y"], 2)) {
        let p = &*COIN_P;
        let tp = Arc::new(transform_program(p).unwrap());
        let cfg = SearchConfig::default().with_depth(6).with_frontier(Frontier::All);
        let lifted = reachable_values(tp, e.genize(), cfg).unwrap();
        let constructors: Vec<Symbol> = p.signature().constructors().cloned().collect();
        let floors: Vec<Expr> = ground_scterms(&constructors, 2, 1).iter().filter_map(|st| st.setoe().to_total()).collect();
        let vars: Vec<_> = e.var_set().into_iter().collect();
        let mut witnesses = vec![Subst::new()];
        for x in &vars {
            witnesses = witnesses
                .into_iter()
                .flat_map(|w| floors.iter().map(move |f| w.clone().with(x.clone(), f.clone())))
                .collect();
        }
        for v in &lifted {
            let found = witnesses.iter().any(|w| reach(p, &w.apply(&e), 12, &[]).contains(v));
            prop_assert!(found, "{} lifts to {} without witness", e, v);
        }
    }
}

#[test]
fn generated_expressions_cover_choices() {
    // Sanity check on the shared enumeration helpers.
    let p = &*COIN_P;
    let all = terms_over(&with_choice(user_symbols(p)), 1);
    assert!(all.iter().all(|e| e.depth() == 1));
    let universe = ground_scterms(
        &p.signature().constructors().cloned().collect::<Vec<_>>(),
        2,
        1,
    );
    assert_eq!(universe.len(), 6);
    assert!(universe
        .iter()
        .all(|s| s.iter().all(|e| matches!(e, ESExp::App(..)))));
    assert_eq!(etose(&PartialExpr::Bottom), SExp::empty());
}
