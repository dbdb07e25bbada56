//! Structured sets of expressions and the operators moving between them and
//! ordinary (partial) expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::terms::{Expr, Name, PartialExpr, Subst, Symbol};

/// An elemental s-expression.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ESExp {
    Var(Name),
    App(Symbol, Vec<SExp>),
}

/// A finite set of elemental s-expressions; the empty set stands for `⊥`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SExp(BTreeSet<ESExp>);

impl ESExp {
    pub fn var(name: impl Into<Name>) -> Self {
        ESExp::Var(name.into())
    }

    pub fn app(sym: Symbol, args: Vec<SExp>) -> Self {
        assert_eq!(
            sym.arity(),
            args.len(),
            "arity mismatch when applying {sym:?}"
        );
        ESExp::App(sym, args)
    }

    pub fn is_cterm(&self) -> bool {
        match self {
            ESExp::Var(_) => true,
            ESExp::App(s, args) => s.is_constructor() && args.iter().all(SExp::is_cterm),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            ESExp::Var(_) => false,
            ESExp::App(_, args) => args.iter().all(SExp::is_ground),
        }
    }

    /// Constructor nesting: a constant counts one level.
    pub fn nesting(&self) -> usize {
        match self {
            ESExp::Var(_) => 1,
            ESExp::App(_, args) => 1 + args.iter().map(SExp::nesting).max().unwrap_or(0),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            ESExp::Var(_) => 1,
            ESExp::App(_, args) => args.iter().map(SExp::width).max().unwrap_or(1),
        }
    }

    fn vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            ESExp::Var(x) => {
                out.insert(x.clone());
            }
            ESExp::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn apply(&self, th: &SSubst) -> SExp {
        match self {
            ESExp::Var(x) => th
                .get(x)
                .cloned()
                .unwrap_or_else(|| SExp::singleton(self.clone())),
            ESExp::App(s, args) => SExp::singleton(ESExp::App(
                s.clone(),
                args.iter().map(|a| a.apply(th)).collect(),
            )),
        }
    }

    pub fn flat(&self) -> Vec<PartialExpr> {
        match self {
            ESExp::Var(x) => vec![PartialExpr::Var(x.clone())],
            ESExp::App(s, args) => {
                let mut acc: Vec<Vec<PartialExpr>> = vec![Vec::new()];
                for a in args {
                    let options = a.flat();
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |o| {
                                let mut v = prefix.clone();
                                v.push(o.clone());
                                v
                            })
                        })
                        .collect();
                }
                acc.into_iter()
                    .map(|args| PartialExpr::App(s.clone(), args))
                    .collect()
            }
        }
    }

    pub fn setoe(&self) -> PartialExpr {
        match self {
            ESExp::Var(x) => PartialExpr::Var(x.clone()),
            ESExp::App(s, args) => {
                PartialExpr::App(s.clone(), args.iter().map(SExp::setoe).collect())
            }
        }
    }
}

impl SExp {
    pub fn empty() -> Self {
        SExp(BTreeSet::new())
    }

    pub fn singleton(e: ESExp) -> Self {
        SExp(BTreeSet::from([e]))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ESExp> {
        self.0.iter()
    }

    pub fn contains(&self, e: &ESExp) -> bool {
        self.0.contains(e)
    }

    pub fn insert(&mut self, e: ESExp) {
        self.0.insert(e);
    }

    pub fn union(&self, other: &SExp) -> SExp {
        SExp(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_cterm(&self) -> bool {
        self.0.iter().all(ESExp::is_cterm)
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(ESExp::is_ground)
    }

    /// Constructor nesting depth; `∅` has nesting 0.
    pub fn nesting(&self) -> usize {
        self.0.iter().map(ESExp::nesting).max().unwrap_or(0)
    }

    /// Largest set cardinality anywhere in the structure.
    pub fn width(&self) -> usize {
        self.0
            .iter()
            .map(ESExp::width)
            .fold(self.0.len(), usize::max)
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    fn vars_into(&self, out: &mut BTreeSet<Name>) {
        self.0.iter().for_each(|e| e.vars_into(out));
    }

    /// Applies an s-substitution, distributing over the elements.
    pub fn apply(&self, th: &SSubst) -> SExp {
        let mut out = SExp::empty();
        for e in &self.0 {
            out.0.extend(e.apply(th).0);
        }
        out
    }

    /// The partial expressions contained in the set.
    pub fn flat(&self) -> BTreeSet<PartialExpr> {
        if self.0.is_empty() {
            return BTreeSet::from([PartialExpr::Bottom]);
        }
        self.0.iter().flat_map(ESExp::flat).collect()
    }

    /// Packs the set structure back into an expression with `?`, elements
    /// taken in canonical order and nested to the right.
    pub fn setoe(&self) -> PartialExpr {
        let mut parts: Vec<PartialExpr> = self.0.iter().map(ESExp::setoe).collect();
        let Some(mut acc) = parts.pop() else {
            return PartialExpr::Bottom;
        };
        while let Some(p) = parts.pop() {
            acc = PartialExpr::App(Symbol::choice(), vec![p, acc]);
        }
        acc
    }
}

impl FromIterator<ESExp> for SExp {
    fn from_iter<I: IntoIterator<Item = ESExp>>(iter: I) -> Self {
        SExp(iter.into_iter().collect())
    }
}

impl IntoIterator for SExp {
    type Item = ESExp;
    type IntoIter = std::collections::btree_set::IntoIter<ESExp>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// `⌈e⌉`
pub fn etose(e: &PartialExpr) -> SExp {
    match e {
        PartialExpr::Bottom => SExp::empty(),
        PartialExpr::Var(x) => SExp::singleton(ESExp::Var(x.clone())),
        PartialExpr::App(s, args) => {
            SExp::singleton(ESExp::App(s.clone(), args.iter().map(etose).collect()))
        }
    }
}

/// `⌈e⌉` for a total expression.
pub fn etose_total(e: &Expr) -> SExp {
    match e {
        Expr::Var(x) => SExp::singleton(ESExp::Var(x.clone())),
        Expr::App(s, args) => SExp::singleton(ESExp::App(
            s.clone(),
            args.iter().map(etose_total).collect(),
        )),
    }
}

pub fn flat(se: &SExp) -> BTreeSet<PartialExpr> {
    se.flat()
}

/// `⌊se⌋`
pub fn setoe(se: &SExp) -> PartialExpr {
    se.setoe()
}

/// A finite map from variables to s-expressions.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SSubst(BTreeMap<Name, SExp>);

impl SSubst {
    pub fn new() -> Self {
        SSubst(BTreeMap::new())
    }

    pub fn with(mut self, x: impl Into<Name>, se: SExp) -> Self {
        self.0.insert(x.into(), se);
        self
    }

    pub fn insert(&mut self, x: impl Into<Name>, se: SExp) {
        self.0.insert(x.into(), se);
    }

    pub fn get(&self, x: &str) -> Option<&SExp> {
        self.0.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &SExp)> {
        self.0.iter()
    }

    pub fn is_ground(&self) -> bool {
        self.0.values().all(SExp::is_ground)
    }

    /// True when every range value is an s-cterm.
    pub fn is_scsubst(&self) -> bool {
        self.0.values().all(SExp::is_cterm)
    }

    /// `⌈σ⌉`
    pub fn from_subst(s: &Subst) -> Self {
        SSubst(s.iter().map(|(x, e)| (x.clone(), etose_total(e))).collect())
    }

    /// `⌊θ⌋`, defined only when no range value is `∅`.
    pub fn setoe(&self) -> Option<Subst> {
        self.0
            .iter()
            .map(|(x, se)| se.setoe().to_total().map(|e| (x.clone(), e)))
            .collect()
    }
}

impl FromIterator<(Name, SExp)> for SSubst {
    fn from_iter<I: IntoIterator<Item = (Name, SExp)>>(iter: I) -> Self {
        SSubst(iter.into_iter().collect())
    }
}

pub fn apply_scsubst(se: &SExp, th: &SSubst) -> SExp {
    se.apply(th)
}

fn fmt_set(se: &SExp, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, e) in se.0.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{e}")?;
    }
    f.write_str("}")
}

impl fmt::Display for ESExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ESExp::Var(x) => f.write_str(x),
            ESExp::App(s, args) => {
                f.write_str(s.name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        fmt_set(a, f)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_set(self, f)
    }
}

impl fmt::Debug for ESExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, se)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}/{se}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for SSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
