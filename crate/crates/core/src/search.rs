//! Exploration of the rewrite graph from a ground expression, streaming the
//! ground constructor terms it reaches together with the derivation that
//! produced each of them.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use thiserror::Error;

use crate::engine::{match_rule, Frontier, MatchOutcome};
use crate::generators::{transform_program, GenError};
use crate::program::{Program, RuleId};
use crate::terms::{Expr, Position};

pub const DEFAULT_MAX_DEPTH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Maximum number of rewrite steps along any explored derivation.
    pub max_depth: NonZeroUsize,
    pub frontier: Frontier,
    /// Emit each distinct value once.
    pub dedup_solutions: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::BreadthFirst,
            max_depth: NonZeroUsize::new(DEFAULT_MAX_DEPTH).unwrap(),
            frontier: Frontier::Demanded,
            dedup_solutions: true,
        }
    }
}

impl SearchConfig {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = NonZeroUsize::new(depth).expect("depth must be positive");
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_frontier(mut self, frontier: Frontier) -> Self {
        self.frontier = frontier;
        self
    }

    pub fn with_dedup(mut self, dedup: bool) -> Self {
        self.dedup_solutions = dedup;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub pos: Position,
    pub rule: RuleId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub expr: Expr,
    pub step: Option<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("trace is empty")]
    Empty,
    #[error("entry {0} has no recorded step")]
    MissingStep(usize),
    #[error("the first entry must not carry a step")]
    StepOnStart,
    #[error("step {index}: rule {rule} does not apply at {pos}")]
    NotApplicable {
        index: usize,
        pos: Position,
        rule: RuleId,
    },
    #[error("step {index}: expected `{expected}`, recorded `{found}`")]
    Mismatch {
        index: usize,
        expected: String,
        found: String,
    },
}

/// A recorded derivation. The first entry is the starting expression and
/// carries no step; every later entry records the step that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace(Vec<TraceEntry>);

pub const ARROW: &str = "--->";

impl Trace {
    pub fn entries(&self) -> &[TraceEntry] {
        &self.0
    }

    pub fn start(&self) -> &Expr {
        &self.0[0].expr
    }

    pub fn last(&self) -> &Expr {
        &self.0[self.0.len() - 1].expr
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    /// The path as shown to users: the expressions produced by each step,
    /// one per line, separated by `--->` lines. A zero-step trace shows its
    /// start.
    pub fn render_path(&self) -> String {
        let shown = if self.0.len() > 1 {
            &self.0[1..]
        } else {
            &self.0[..]
        };
        join_exprs(shown.iter().map(|e| &e.expr))
    }

    /// Every expression of the derivation, starting point included.
    pub fn render_full(&self) -> String {
        join_exprs(self.0.iter().map(|e| &e.expr))
    }

    /// Re-applies every recorded step and compares the rendered result with
    /// the next entry.
    pub fn replay(&self, p: &Program) -> Result<(), ReplayError> {
        let first = self.0.first().ok_or(ReplayError::Empty)?;
        if first.step.is_some() {
            return Err(ReplayError::StepOnStart);
        }
        for (i, pair) in self.0.windows(2).enumerate() {
            let index = i + 1;
            let step = pair[1]
                .step
                .as_ref()
                .ok_or(ReplayError::MissingStep(index))?;
            let not_applicable = || ReplayError::NotApplicable {
                index,
                pos: step.pos.clone(),
                rule: step.rule,
            };
            if step.rule >= p.rules().len() {
                return Err(not_applicable());
            }
            let sub = pair[0]
                .expr
                .subterm_at(&step.pos)
                .map_err(|_| not_applicable())?;
            let rule = p.rule(step.rule);
            let MatchOutcome::Match(theta) = match_rule(rule, sub) else {
                return Err(not_applicable());
            };
            let next = p
                .rewrite_step_at(&pair[0].expr, &step.pos, rule, &theta)
                .map_err(|_| not_applicable())?;
            let (expected, found) = (next.to_string(), pair[1].expr.to_string());
            if expected != found {
                return Err(ReplayError::Mismatch {
                    index,
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }
}

fn join_exprs<'a>(it: impl Iterator<Item = &'a Expr>) -> String {
    let lines: Vec<String> = it.map(Expr::to_string).collect();
    lines.join(&format!("\n{ARROW}\n"))
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_path())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub value: Expr,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the start expression `{0}` is not ground")]
    NonGround(Expr),
    #[error("the program still has extra variables; transform it first")]
    ExtraVariables,
}

struct Node {
    expr: Expr,
    step: Option<Step>,
    parent: Option<Arc<Node>>,
    depth: usize,
}

impl Node {
    fn trace(self: &Arc<Self>) -> Trace {
        let mut out = Vec::with_capacity(self.depth + 1);
        let mut cur = Some(self);
        while let Some(n) = cur {
            out.push(TraceEntry {
                expr: n.expr.clone(),
                step: n.step.clone(),
            });
            cur = n.parent.as_ref();
        }
        out.reverse();
        Trace(out)
    }
}

/// A lazy stream of solutions. Single owner; `next` is sequential.
pub struct SolutionStream {
    program: Arc<Program>,
    cfg: SearchConfig,
    pending: VecDeque<Arc<Node>>,
    /// Shallowest depth at which each non-value state was queued.
    visited: HashMap<Expr, usize>,
    /// Without dedup, derivations are the answers: a state is expanded once
    /// per depth so distinct-length derivations through it survive.
    visited_at: HashSet<(Expr, usize)>,
    emitted: HashSet<Expr>,
    truncated: bool,
    expanded: usize,
}

impl SolutionStream {
    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn program(&self) -> &Arc<Program> {
        &self.program
    }

    /// Whether some state at the depth horizon still had redexes.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Number of states expanded so far.
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    pub fn is_exhausted(&self) -> bool {
        self.pending.is_empty()
    }

    fn pop(&mut self) -> Option<Arc<Node>> {
        match self.cfg.strategy {
            Strategy::BreadthFirst => self.pending.pop_front(),
            Strategy::DepthFirst => self.pending.pop_back(),
        }
    }

    fn expand(&mut self, node: &Arc<Node>) {
        let redexes = self.cfg.frontier.redexes(&self.program, &node.expr);
        if node.depth >= self.cfg.max_depth.get() {
            if !redexes.is_empty() {
                self.truncated = true;
            }
            return;
        }
        self.expanded += 1;
        let depth = node.depth + 1;
        let mut children = Vec::with_capacity(redexes.len());
        for r in redexes {
            let expr = r.apply(&self.program, &node.expr);
            if !expr.is_value() {
                if self.cfg.dedup_solutions {
                    match self.visited.get(&expr) {
                        Some(&d) if d <= depth => continue,
                        _ => {
                            self.visited.insert(expr.clone(), depth);
                        }
                    }
                } else if !self.visited_at.insert((expr.clone(), depth)) {
                    continue;
                }
            }
            children.push(Arc::new(Node {
                expr,
                step: Some(Step {
                    pos: r.pos,
                    rule: r.rule,
                }),
                parent: Some(node.clone()),
                depth,
            }));
        }
        match self.cfg.strategy {
            Strategy::BreadthFirst => self.pending.extend(children),
            Strategy::DepthFirst => self.pending.extend(children.into_iter().rev()),
        }
    }
}

impl Iterator for SolutionStream {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        while let Some(node) = self.pop() {
            if node.expr.is_value() {
                if self.cfg.dedup_solutions && !self.emitted.insert(node.expr.clone()) {
                    continue;
                }
                return Some(Solution {
                    value: node.expr.clone(),
                    trace: node.trace(),
                });
            }
            self.expand(&node);
        }
        None
    }
}

/// Starts a search from a ground expression over an extra-variable-free
/// program. The stream is positioned before the first solution.
pub fn start_search(
    program: Arc<Program>,
    start: Expr,
    cfg: SearchConfig,
) -> Result<SolutionStream, SearchError> {
    if !start.is_ground() {
        return Err(SearchError::NonGround(start));
    }
    if program.has_extra_vars() {
        return Err(SearchError::ExtraVariables);
    }
    let mut visited = HashMap::new();
    visited.insert(start.clone(), 0);
    let root = Arc::new(Node {
        expr: start,
        step: None,
        parent: None,
        depth: 0,
    });
    Ok(SolutionStream {
        program,
        cfg,
        pending: VecDeque::from([root]),
        visited,
        visited_at: HashSet::new(),
        emitted: HashSet::new(),
        truncated: false,
        expanded: 0,
    })
}

/// Every distinct value reachable from `start` within the configured depth.
pub fn reachable_values(
    program: Arc<Program>,
    start: Expr,
    cfg: SearchConfig,
) -> Result<BTreeSet<Expr>, SearchError> {
    Ok(start_search(program, start, cfg.with_dedup(true))?
        .map(|s| s.value)
        .collect())
}

/// Whether `target` is reachable from `genize(e)` under the transformed
/// program within `bound` steps, exploring every redex.
pub fn lift_check(p: &Program, e: &Expr, target: &Expr, bound: usize) -> bool {
    let cfg = SearchConfig::default()
        .with_depth(bound.max(1))
        .with_frontier(Frontier::All);
    lift_check_with(p, e, target, cfg).unwrap_or(false)
}

/// [`lift_check`] under an explicit search configuration.
pub fn lift_check_with(
    p: &Program,
    e: &Expr,
    target: &Expr,
    cfg: SearchConfig,
) -> Result<bool, GenError> {
    if !target.is_value() {
        return Ok(false);
    }
    let transformed = Arc::new(transform_program(p)?);
    let start = e.genize();
    let stream = start_search(transformed, start, cfg.with_dedup(true))
        .expect("genized start over a transformed program");
    Ok(stream.into_iter().any(|s| s.value == *target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_module, parse_term};

    fn program(src: &str) -> Program {
        let (_, rules) = parse_module(src).unwrap();
        Program::validate(&rules).unwrap()
    }

    fn transformed(src: &str) -> Arc<Program> {
        Arc::new(transform_program(&program(src)).unwrap())
    }

    fn term(p: &Program, s: &str) -> Expr {
        p.classify(&parse_term(s).unwrap()).unwrap()
    }

    #[test]
    fn value_start_is_first_solution() {
        let p = transformed(include_str!("../corpus/clerks.smod"));
        let e = term(&p, "madrid");
        let mut s = start_search(p, e.clone(), SearchConfig::default()).unwrap();
        let first = s.next().unwrap();
        assert_eq!(first.value, e);
        assert_eq!(first.trace.steps(), 0);
        assert_eq!(first.trace.render_path(), "madrid");
        assert!(s.next().is_none());
    }

    #[test]
    fn ipl_reaches_two() {
        let p = transformed(include_str!("../corpus/ipl.smod"));
        let e = term(&p, "f(X,X)").genize();
        let values: Vec<Expr> = start_search(p.clone(), e, SearchConfig::default())
            .unwrap()
            .map(|s| s.value)
            .collect();
        assert!(values.iter().any(|v| v.to_string() == "2"), "{values:?}");
    }

    #[test]
    fn clerks_pairs() {
        let p = transformed(include_str!("../corpus/clerks.smod"));
        let e = term(&p, "search(X)").genize();
        let first: Vec<String> = start_search(p, e, SearchConfig::default())
            .unwrap()
            .take(20)
            .map(|s| s.value.to_string())
            .collect();
        let mm = first.iter().position(|v| v == "p(madrid,madrid)").unwrap();
        let mv = first.iter().position(|v| v == "p(madrid,vigo)").unwrap();
        assert!(mm < mv);
    }

    #[test]
    fn rejects_bad_starts() {
        let p = transformed(include_str!("../corpus/ipl.smod"));
        let e = term(&p, "f(X,X)");
        assert!(matches!(
            start_search(p, e, SearchConfig::default()),
            Err(SearchError::NonGround(_))
        ));
        let raw = Arc::new(program("(smod M is f -> g(X) . g(0) -> 1 . ends)"));
        let e = term(&raw, "f");
        assert_eq!(
            start_search(raw, e, SearchConfig::default()).err(),
            Some(SearchError::ExtraVariables)
        );
    }

    #[test]
    fn ground_only_limitation() {
        let p = program("(smod M is g(c(X)) -> X . ends)");
        let tp = Arc::new(transform_program(&p).unwrap());
        let e = term(&p, "g(Y)").genize();
        let mut s = start_search(tp, e, SearchConfig::default().with_depth(10)).unwrap();
        assert!(s.next().is_none());
        assert!(s.truncated());
    }

    #[test]
    fn depth_first_terminates_and_agrees() {
        let p = transformed(include_str!("../corpus/ipl.smod"));
        let e = term(&p, "f(X,X)").genize();
        let cfg = SearchConfig::default().with_depth(12);
        let bfs: BTreeSet<Expr> = reachable_values(p.clone(), e.clone(), cfg).unwrap();
        let dfs: BTreeSet<Expr> =
            reachable_values(p, e, cfg.with_strategy(Strategy::DepthFirst)).unwrap();
        assert_eq!(bfs, dfs);
    }

    #[test]
    fn traces_replay_and_detect_tampering() {
        let p = transformed(include_str!("../corpus/ipl.smod"));
        let e = term(&p, "f(X,X)").genize();
        let sol = start_search(p.clone(), e, SearchConfig::default())
            .unwrap()
            .next()
            .unwrap();
        sol.trace.replay(&p).unwrap();
        let mut bad = sol.trace.clone();
        let last = bad.0.len() - 1;
        bad.0[last].expr = term(&p, "0");
        assert!(matches!(bad.replay(&p), Err(ReplayError::Mismatch { .. })));
    }

    #[test]
    fn lift_check_examples() {
        let coin = program(include_str!("../corpus/coin.smod"));
        let e = term(&coin, "f(X,X)");
        assert!(lift_check(&coin, &e, &term(&coin, "2"), 8));
        assert!(!lift_check(&coin, &e, &term(&coin, "0"), 8));
        let t = term(&coin, "1");
        assert!(lift_check(&coin, &t, &t, 1));
    }
}
