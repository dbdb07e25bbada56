//! First-order terms over a signature split into constructors and defined
//! functions, together with substitutions, positions, partial terms, the
//! shell operator and the approximation ordering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned-ish identifier used for symbol and variable names.
pub type Name = Arc<str>;

/// Name of the built-in binary choice function.
pub const CHOICE: &str = "?";
/// Name of the reserved generator function.
pub const GEN: &str = "gen";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Constructor,
    Function,
}

/// A symbol with its arity and its side of the signature.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Name,
    arity: usize,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: impl Into<Name>, arity: usize, kind: SymbolKind) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "symbol names are non-empty");
        Symbol { name, arity, kind }
    }

    pub fn constructor(name: impl Into<Name>, arity: usize) -> Self {
        Self::new(name, arity, SymbolKind::Constructor)
    }

    pub fn function(name: impl Into<Name>, arity: usize) -> Self {
        Self::new(name, arity, SymbolKind::Function)
    }

    /// The binary choice function `?`.
    pub fn choice() -> Self {
        Self::function(CHOICE, 2)
    }

    /// The nullary generator function `gen`.
    pub fn gen() -> Self {
        Self::function(GEN, 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_constructor(&self) -> bool {
        self.kind == SymbolKind::Constructor
    }

    pub fn is_function(&self) -> bool {
        self.kind == SymbolKind::Function
    }

    pub fn is_choice(&self) -> bool {
        self.is_function() && self.arity == 2 && &*self.name == CHOICE
    }

    pub fn is_gen(&self) -> bool {
        self.is_function() && self.arity == 0 && &*self.name == GEN
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` is declared both as a constructor and as a function")]
    KindClash(String),
    #[error("symbol `{name}` is used with arity {found} but was declared with arity {declared}")]
    ArityClash {
        name: String,
        declared: usize,
        found: usize,
    },
}

/// A signature `CS ⊎ FS`. Always contains `?/2` and `gen/0` as functions.
#[derive(Clone, PartialEq, Eq)]
pub struct Signature {
    constructors: BTreeMap<Name, Symbol>,
    functions: BTreeMap<Name, Symbol>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    pub fn new() -> Self {
        let mut functions = BTreeMap::new();
        for s in [Symbol::choice(), Symbol::gen()] {
            functions.insert(s.name.clone(), s);
        }
        Signature {
            constructors: BTreeMap::new(),
            functions,
        }
    }

    /// Adds a symbol, checking disjointness and arity consistency.
    pub fn declare(&mut self, sym: Symbol) -> Result<(), SignatureError> {
        let (same, other) = match sym.kind {
            SymbolKind::Constructor => (&mut self.constructors, &self.functions),
            SymbolKind::Function => (&mut self.functions, &self.constructors),
        };
        if other.contains_key(&sym.name) {
            return Err(SignatureError::KindClash(sym.name.to_string()));
        }
        match same.get(&sym.name) {
            Some(existing) if existing.arity != sym.arity => Err(SignatureError::ArityClash {
                name: sym.name.to_string(),
                declared: existing.arity,
                found: sym.arity,
            }),
            Some(_) => Ok(()),
            None => {
                same.insert(sym.name.clone(), sym);
                Ok(())
            }
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.functions
            .get(name)
            .or_else(|| self.constructors.get(name))
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.lookup(sym.name()) == Some(sym)
    }

    /// Constructors in canonical (lexicographic by name) order.
    pub fn constructors(&self) -> impl Iterator<Item = &Symbol> {
        self.constructors.values()
    }

    /// All function symbols, including `?` and `gen`.
    pub fn functions(&self) -> impl Iterator<Item = &Symbol> {
        self.functions.values()
    }

    /// Function symbols other than the built-in `?` and `gen`.
    pub fn user_functions(&self) -> impl Iterator<Item = &Symbol> {
        self.functions
            .values()
            .filter(|s| !s.is_choice() && !s.is_gen())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Signature")
            .field(
                "constructors",
                &self.constructors.values().collect::<Vec<_>>(),
            )
            .field("functions", &self.functions.values().collect::<Vec<_>>())
            .finish()
    }
}

/// A total expression: a variable or a symbol applied to as many arguments
/// as its arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Name),
    App(Symbol, Arc<[Expr]>),
}

impl Expr {
    pub fn var(name: impl Into<Name>) -> Self {
        Expr::Var(name.into())
    }

    /// Builds an application. Panics if the argument count does not match
    /// the arity.
    pub fn app(sym: Symbol, args: Vec<Expr>) -> Self {
        assert_eq!(
            sym.arity(),
            args.len(),
            "arity mismatch when applying {sym:?}"
        );
        Expr::App(sym, args.into())
    }

    pub fn constant(sym: Symbol) -> Self {
        Self::app(sym, Vec::new())
    }

    pub fn choice(left: Expr, right: Expr) -> Self {
        Self::app(Symbol::choice(), vec![left, right])
    }

    pub fn gen() -> Self {
        Self::constant(Symbol::gen())
    }

    pub fn args(&self) -> &[Expr] {
        match self {
            Expr::Var(_) => &[],
            Expr::App(_, args) => args,
        }
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Expr::Var(_) => None,
            Expr::App(s, _) => Some(s),
        }
    }

    pub fn is_function_rooted(&self) -> bool {
        matches!(self, Expr::App(s, _) if s.is_function())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::App(_, args) => args.iter().all(Expr::is_ground),
        }
    }

    /// True for c-terms: no function symbol anywhere.
    pub fn is_cterm(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::App(s, args) => s.is_constructor() && args.iter().all(Expr::is_cterm),
        }
    }

    /// Ground c-terms are the values the search looks for.
    pub fn is_value(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::App(s, args) => s.is_constructor() && args.iter().all(Expr::is_value),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Expr::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Expr::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Name> {
        self.vars().into_iter().collect()
    }

    /// Number of occurrences of each variable.
    pub fn var_occurrences(&self, out: &mut BTreeMap<Name, usize>) {
        match self {
            Expr::Var(x) => *out.entry(x.clone()).or_default() += 1,
            Expr::App(_, args) => args.iter().for_each(|a| a.var_occurrences(out)),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Expr::size).sum::<usize>()
    }

    /// Height of the term tree; constants and variables have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Expr::depth).max().unwrap_or(0)
    }

    pub fn symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Expr::App(s, args) = self {
            out.insert(s.clone());
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Expr, PositionError> {
        let mut cur = self;
        for (depth, &i) in pos.0.iter().enumerate() {
            let args = cur.args();
            if i == 0 || i > args.len() {
                return Err(PositionError { index: i, depth });
            }
            cur = &args[i - 1];
        }
        Ok(cur)
    }

    pub fn replace_at(&self, pos: &Position, new: Expr) -> Result<Expr, PositionError> {
        self.replace_from(&pos.0, 0, new)
    }

    fn replace_from(&self, path: &[usize], depth: usize, new: Expr) -> Result<Expr, PositionError> {
        let Some((&i, rest)) = path.split_first() else {
            return Ok(new);
        };
        match self {
            Expr::App(s, args) if i >= 1 && i <= args.len() => {
                let mut args: Vec<Expr> = args.to_vec();
                args[i - 1] = args[i - 1].replace_from(rest, depth + 1, new)?;
                Ok(Expr::App(s.clone(), args.into()))
            }
            _ => Err(PositionError { index: i, depth }),
        }
    }

    /// Replaces every variable occurrence with `gen`.
    pub fn genize(&self) -> Expr {
        match self {
            Expr::Var(_) => Expr::gen(),
            Expr::App(s, args) => Expr::App(s.clone(), args.iter().map(Expr::genize).collect()),
        }
    }
}

fn fmt_app(
    f: &mut fmt::Formatter<'_>,
    sym: &Symbol,
    args: &[impl fmt::Display + IsChoice],
) -> fmt::Result {
    if sym.name() == CHOICE && args.len() == 2 {
        if args[0].is_choice() {
            write!(f, "({})", args[0])?;
        } else {
            write!(f, "{}", args[0])?;
        }
        return write!(f, " ? {}", args[1]);
    }
    f.write_str(sym.name())?;
    if !args.is_empty() {
        f.write_str("(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

trait IsChoice {
    fn is_choice(&self) -> bool;
}

impl IsChoice for Expr {
    fn is_choice(&self) -> bool {
        matches!(self, Expr::App(s, _) if s.name() == CHOICE && s.arity() == 2)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(x) => f.write_str(x),
            Expr::App(s, args) => fmt_app(f, s, args),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An untyped term as written in source text, before symbols are classified
/// against a signature. Variables start with an uppercase letter.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RawTerm {
    Var(String),
    App(String, Vec<RawTerm>),
}

impl RawTerm {
    pub fn app(name: impl Into<String>, args: Vec<RawTerm>) -> Self {
        RawTerm::App(name.into(), args)
    }

    pub fn var(name: impl Into<String>) -> Self {
        RawTerm::Var(name.into())
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            RawTerm::Var(x) => out.push(x.clone()),
            RawTerm::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }
}

impl IsChoice for RawTerm {
    fn is_choice(&self) -> bool {
        matches!(self, RawTerm::App(n, args) if n == CHOICE && args.len() == 2)
    }
}

impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawTerm::Var(x) => f.write_str(x),
            RawTerm::App(n, args) => {
                let sym = Symbol::function(n.as_str(), args.len());
                fmt_app(f, &sym, args)
            }
        }
    }
}

impl fmt::Debug for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&Expr> for RawTerm {
    fn from(e: &Expr) -> Self {
        match e {
            Expr::Var(x) => RawTerm::Var(x.to_string()),
            Expr::App(s, args) => RawTerm::App(
                s.name().to_string(),
                args.iter().map(RawTerm::from).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid position: index {index} at depth {depth} is out of range")]
pub struct PositionError {
    pub index: usize,
    pub depth: usize,
}

/// A path of 1-based child indices; the root is the empty path.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn concat(&self, other: &Position) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite substitution. Identity bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Subst(BTreeMap<Name, Expr>);

impl Subst {
    pub fn new() -> Self {
        Subst(BTreeMap::new())
    }

    pub fn bind(&mut self, var: impl Into<Name>, e: Expr) {
        let var = var.into();
        if matches!(&e, Expr::Var(y) if *y == var) {
            self.0.remove(&var);
        } else {
            self.0.insert(var, e);
        }
    }

    pub fn with(mut self, var: impl Into<Name>, e: Expr) -> Self {
        self.bind(var, e);
        self
    }

    pub fn get(&self, var: &str) -> Option<&Expr> {
        self.0.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Expr)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Simultaneous replacement of every variable in the domain.
    pub fn apply(&self, e: &Expr) -> Expr {
        if self.0.is_empty() {
            return e.clone();
        }
        match e {
            Expr::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| e.clone()),
            Expr::App(s, args) => {
                Expr::App(s.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// `self` followed by `then`: `X(self·then) = (X self) then`.
    pub fn compose(&self, then: &Subst) -> Subst {
        let mut out = Subst::new();
        for (x, e) in &self.0 {
            out.bind(x.clone(), then.apply(e));
        }
        for (x, e) in &then.0 {
            if !self.0.contains_key(x) {
                out.bind(x.clone(), e.clone());
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.0.values().all(Expr::is_ground)
    }

    pub fn is_csubst(&self) -> bool {
        self.0.values().all(Expr::is_cterm)
    }
}

impl FromIterator<(Name, Expr)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Name, Expr)>>(iter: I) -> Self {
        let mut s = Subst::new();
        for (x, e) in iter {
            s.bind(x, e);
        }
        s
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}/{e}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An expression that may contain the undefined value `⊥`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartialExpr {
    Bottom,
    Var(Name),
    App(Symbol, Vec<PartialExpr>),
}

impl PartialExpr {
    pub fn is_total(&self) -> bool {
        self.to_total().is_some()
    }

    pub fn to_total(&self) -> Option<Expr> {
        match self {
            PartialExpr::Bottom => None,
            PartialExpr::Var(x) => Some(Expr::Var(x.clone())),
            PartialExpr::App(s, args) => {
                let args = args
                    .iter()
                    .map(PartialExpr::to_total)
                    .collect::<Option<Vec<_>>>()?;
                Some(Expr::App(s.clone(), args.into()))
            }
        }
    }

    pub fn is_cterm(&self) -> bool {
        match self {
            PartialExpr::Bottom | PartialExpr::Var(_) => true,
            PartialExpr::App(s, args) => {
                s.is_constructor() && args.iter().all(PartialExpr::is_cterm)
            }
        }
    }

    /// The outer constructed part: function-rooted subterms become `⊥`.
    pub fn shell(&self) -> PartialExpr {
        match self {
            PartialExpr::Bottom => PartialExpr::Bottom,
            PartialExpr::Var(x) => PartialExpr::Var(x.clone()),
            PartialExpr::App(s, _) if s.is_function() => PartialExpr::Bottom,
            PartialExpr::App(s, args) => {
                PartialExpr::App(s.clone(), args.iter().map(PartialExpr::shell).collect())
            }
        }
    }

    /// `self ⊑ other` in the approximation ordering.
    pub fn approx_leq(&self, other: &PartialExpr) -> bool {
        match (self, other) {
            (PartialExpr::Bottom, _) => true,
            (PartialExpr::Var(x), PartialExpr::Var(y)) => x == y,
            (PartialExpr::App(s, a), PartialExpr::App(t, b)) => {
                s == t && a.iter().zip(b).all(|(x, y)| x.approx_leq(y))
            }
            _ => false,
        }
    }
}

impl From<&Expr> for PartialExpr {
    fn from(e: &Expr) -> Self {
        match e {
            Expr::Var(x) => PartialExpr::Var(x.clone()),
            Expr::App(s, args) => {
                PartialExpr::App(s.clone(), args.iter().map(PartialExpr::from).collect())
            }
        }
    }
}

impl From<Expr> for PartialExpr {
    fn from(e: Expr) -> Self {
        PartialExpr::from(&e)
    }
}

impl IsChoice for PartialExpr {
    fn is_choice(&self) -> bool {
        matches!(self, PartialExpr::App(s, _) if s.name() == CHOICE && s.arity() == 2)
    }
}

impl fmt::Display for PartialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartialExpr::Bottom => f.write_str("⊥"),
            PartialExpr::Var(x) => f.write_str(x),
            PartialExpr::App(s, args) => fmt_app(f, s, args),
        }
    }
}

impl fmt::Debug for PartialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shell of a total expression.
pub fn shell(e: &PartialExpr) -> PartialExpr {
    e.shell()
}

pub fn approx_leq(a: &PartialExpr, b: &PartialExpr) -> bool {
    a.approx_leq(b)
}
