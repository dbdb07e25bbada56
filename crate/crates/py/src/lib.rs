//! Python bindings: load modules, search with generators, check lifting and
//! query the calculus oracle.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use genlift::oracle::{derivable_from, etose_total, rewrites_to, Budget, Verdict};
use genlift::repl::{self, SessionState};
use genlift::{
    parse_module, parse_term as parse_raw, start_search, transform_program, Expr, SearchConfig,
    Strategy,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Parses a term and returns its canonical rendering.
#[pyfunction]
fn parse_term(text: &str) -> PyResult<String> {
    parse_raw(text).map(|t| t.to_string()).map_err(value_error)
}

/// Runs a command script in a fresh session; returns the transcript and
/// whether any parse or validation error occurred.
#[pyfunction]
fn run_script(text: &str) -> (String, bool) {
    let run = repl::run_script(text);
    (run.transcript, run.failed)
}

/// A validated module with its transformed, extra-variable-free version.
#[pyclass(frozen)]
struct Program {
    name: String,
    original: Arc<genlift::Program>,
    transformed: Arc<genlift::Program>,
}

impl Program {
    fn term(&self, text: &str) -> PyResult<Expr> {
        let raw = parse_raw(text).map_err(value_error)?;
        self.original.classify(&raw).map_err(value_error)
    }
}

#[pymethods]
impl Program {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let (name, rules) = parse_module(source).map_err(value_error)?;
        let original = genlift::Program::validate(&rules).map_err(|errs| {
            value_error(
                errs.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        let transformed = transform_program(&original).map_err(value_error)?;
        Ok(Program {
            name,
            original: Arc::new(original),
            transformed: Arc::new(transformed),
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    fn rules(&self) -> Vec<String> {
        self.original
            .user_rules()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn transformed_rules(&self) -> Vec<String> {
        self.transformed
            .user_rules()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn has_extra_vars(&self) -> bool {
        self.original.has_extra_vars()
    }

    /// Values of the genized expression under the transformed program, each
    /// with the expressions along its derivation.
    #[pyo3(signature = (expr, limit=10, max_depth=100, depth_first=false))]
    fn search(
        &self,
        expr: &str,
        limit: usize,
        max_depth: usize,
        depth_first: bool,
    ) -> PyResult<Vec<(String, Vec<String>)>> {
        let start = self.term(expr)?.genize();
        let strategy = if depth_first {
            Strategy::DepthFirst
        } else {
            Strategy::BreadthFirst
        };
        let cfg = SearchConfig::default()
            .with_depth(max_depth)
            .with_strategy(strategy);
        let stream = start_search(self.transformed.clone(), start, cfg).map_err(value_error)?;
        Ok(stream
            .take(limit)
            .map(|s| {
                let path = s
                    .trace
                    .entries()
                    .iter()
                    .map(|e| e.expr.to_string())
                    .collect();
                (s.value.to_string(), path)
            })
            .collect())
    }

    /// Whether `target` is reachable from the genized `expr` within `bound`
    /// steps.
    fn lift_check(&self, expr: &str, target: &str, bound: usize) -> PyResult<bool> {
        Ok(genlift::lift_check(
            &self.original,
            &self.term(expr)?,
            &self.term(target)?,
            bound,
        ))
    }

    /// Bounded reachability under the original program.
    fn rewrites_to(&self, expr: &str, target: &str, bound: usize) -> PyResult<bool> {
        Ok(rewrites_to(
            &self.original,
            &self.term(expr)?,
            &self.term(target)?,
            bound,
        ))
    }

    /// Oracle verdict on `{expr}` reaching `{target}`: "proved", "refuted"
    /// or "exhausted".
    #[pyo3(signature = (expr, target, depth=6))]
    fn derivable(&self, expr: &str, target: &str, depth: usize) -> PyResult<&'static str> {
        let st = etose_total(&self.term(target)?);
        Ok(
            match derivable_from(&self.original, &self.term(expr)?, &st, &Budget::new(depth)) {
                Verdict::Proved => "proved",
                Verdict::Refuted => "refuted",
                Verdict::Exhausted => "exhausted",
            },
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "<Program {} with {} rules>",
            self.name,
            self.original.user_rules().len()
        )
    }
}

/// An interactive session; each line is one command.
#[pyclass(unsendable)]
struct Session {
    state: SessionState,
}

#[pymethods]
impl Session {
    #[new]
    fn new() -> Self {
        Session {
            state: SessionState::new(),
        }
    }

    fn run(&mut self, command: &str) -> String {
        self.state.run_line(command).text
    }
}

#[pymodule]
fn genlift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(parse_term, m)?)?;
    m.add_function(wrap_pyfunction!(run_script, m)?)?;
    Ok(())
}
