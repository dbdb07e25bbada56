#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Duration;

use genlift::oracle::{etose_total, ESExp, SExp};
use genlift::{parse_module, parse_term, Expr, Program, Symbol};

pub const CLERKS: &str = include_str!("../../corpus/clerks.smod");
pub const IPL: &str = include_str!("../../corpus/ipl.smod");
pub const PARTY: &str = include_str!("../../corpus/party.smod");
pub const COIN: &str = include_str!("../../corpus/coin.smod");

pub fn program(src: &str) -> Program {
    let (_, rules) = parse_module(src).expect("module parses");
    Program::validate(&rules).expect("module validates")
}

pub fn term(p: &Program, s: &str) -> Expr {
    p.classify(&parse_term(s).expect("term parses"))
        .expect("term classifies")
}

pub fn sc(p: &Program, s: &str) -> SExp {
    etose_total(&term(p, s))
}

pub fn script(name: &str) -> (String, String) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/scripts");
    let read = |ext: &str| std::fs::read_to_string(dir.join(format!("{name}.{ext}"))).unwrap();
    (read("script"), read("out"))
}

pub const GOLDEN: [&str; 4] = ["ipl", "clerks", "party", "session"];

/// The c-term `t` with `⌈t⌉ = st`, if there is one.
pub fn as_cterm(st: &SExp) -> Option<Expr> {
    let t = st.setoe().to_total()?;
    (t.is_cterm() && etose_total(&t) == *st).then_some(t)
}

/// Ground s-cterms over `constructors` with set width at most `width` and
/// nesting at most `nesting`, the empty set excluded. Written independently
/// of the library's candidate enumeration.
pub fn ground_scterms(constructors: &[Symbol], width: usize, nesting: usize) -> Vec<SExp> {
    let mut sets: Vec<SExp> = vec![SExp::empty()];
    for _ in 0..nesting {
        let mut elems = Vec::new();
        for c in constructors {
            let mut argss: Vec<Vec<SExp>> = vec![vec![]];
            for _ in 0..c.arity() {
                argss = argss
                    .into_iter()
                    .flat_map(|a| {
                        sets.iter().map(move |s| {
                            let mut a = a.clone();
                            a.push(s.clone());
                            a
                        })
                    })
                    .collect();
            }
            elems.extend(argss.into_iter().map(|args| ESExp::App(c.clone(), args)));
        }
        sets = subsets(&elems, width);
    }
    sets.into_iter().filter(|s| !s.is_empty()).collect()
}

fn subsets(elems: &[ESExp], width: usize) -> Vec<SExp> {
    let mut out: BTreeSet<SExp> = BTreeSet::from([SExp::empty()]);
    for _ in 0..width {
        let grown: Vec<SExp> = out
            .iter()
            .flat_map(|s| {
                elems.iter().map(move |e| {
                    let mut s = s.clone();
                    s.insert(e.clone());
                    s
                })
            })
            .collect();
        out.extend(grown);
    }
    out.into_iter().collect()
}

/// Ground c-terms over `constructors` up to `depth`, counted by hand rather
/// than through the library.
pub fn cterms_by_depth(constructors: &[(&str, usize)], depth: usize) -> BTreeSet<String> {
    let mut terms: BTreeSet<String> = BTreeSet::new();
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for &(c, n) in constructors {
            let mut argss: Vec<Vec<String>> = vec![vec![]];
            for _ in 0..n {
                argss = argss
                    .into_iter()
                    .flat_map(|a| {
                        terms.iter().map(move |t| {
                            let mut a = a.clone();
                            a.push(t.clone());
                            a
                        })
                    })
                    .collect();
            }
            for args in argss {
                next.insert(if args.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}({})", args.join(","))
                });
            }
        }
        terms = next;
    }
    terms
}

pub struct Outcome {
    pub id: &'static str,
    pub what: &'static str,
    pub pass: bool,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
    pub detail: String,
}

impl Outcome {
    /// Prints one line and fails the test when the criterion or its time
    /// limit is missed.
    pub fn report(self) {
        let in_time = self.limit.is_none_or(|l| self.elapsed <= l);
        let ok = self.pass && in_time;
        let limit = self
            .limit
            .map(|l| format!(" / {:.0}s", l.as_secs_f64()))
            .unwrap_or_default();
        println!(
            "[{}] criterion {}: {} ({:.3}s{limit}) {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.what,
            self.elapsed.as_secs_f64(),
            self.detail
        );
        assert!(self.pass, "criterion {} failed: {}", self.id, self.detail);
        assert!(in_time, "criterion {} over its time limit", self.id);
    }
}
