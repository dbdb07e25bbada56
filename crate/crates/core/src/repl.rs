//! The command loop: module loading, evaluation with generators, solution
//! streaming and session settings.

use std::num::NonZeroUsize;
use std::sync::Arc;

use thiserror::Error;

use crate::generators::{transform_program, GenError};
use crate::parser::{parse_command, split_script, Command, ParseError};
use crate::program::{Program, TermError, ValidationError};
use crate::search::{
    start_search, SearchConfig, SearchError, Solution, SolutionStream, Strategy, DEFAULT_MAX_DEPTH,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("module {name} rejected: {}", render_validation(.errors))]
    Validation {
        name: String,
        errors: Vec<ValidationError>,
    },
    #[error("module {name} rejected: {source}")]
    Generator { name: String, source: GenError },
    #[error("{0}")]
    Term(#[from] TermError),
    #[error("no module loaded")]
    NoModule,
    #[error("no evaluation in progress")]
    NoStream,
    #[error("path recording was off when the evaluation started")]
    PathOff,
    #[error("no solution to show")]
    NoSolution,
    #[error("{0}")]
    Search(#[from] SearchError),
}

impl SessionError {
    /// Parse and validation problems make a script fail; the rest are
    /// ordinary user mistakes reported in place.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            SessionError::Parse(_)
                | SessionError::Validation { .. }
                | SessionError::Generator { .. }
                | SessionError::Term(_)
        )
    }
}

fn render_validation(errors: &[ValidationError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

struct Loaded {
    name: String,
    original: Arc<Program>,
    transformed: Arc<Program>,
}

struct Evaluation {
    stream: SolutionStream,
    with_path: bool,
    last: Option<Solution>,
}

pub struct SessionState {
    module: Option<Loaded>,
    eval: Option<Evaluation>,
    path_enabled: bool,
    strategy: Strategy,
    max_depth: NonZeroUsize,
}

impl Default for SessionState {
    fn default() -> Self {
        SessionState {
            module: None,
            eval: None,
            path_enabled: false,
            strategy: Strategy::BreadthFirst,
            max_depth: NonZeroUsize::new(DEFAULT_MAX_DEPTH).unwrap(),
        }
    }
}

impl SessionState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn module_name(&self) -> Option<&str> {
        self.module.as_ref().map(|m| m.name.as_str())
    }

    pub fn original(&self) -> Option<&Arc<Program>> {
        self.module.as_ref().map(|m| &m.original)
    }

    pub fn transformed(&self) -> Option<&Arc<Program>> {
        self.module.as_ref().map(|m| &m.transformed)
    }

    pub fn path_enabled(&self) -> bool {
        self.path_enabled
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth.get()
    }

    pub fn last_solution(&self) -> Option<&Solution> {
        self.eval.as_ref().and_then(|e| e.last.as_ref())
    }

    fn config(&self) -> SearchConfig {
        SearchConfig {
            strategy: self.strategy,
            max_depth: self.max_depth,
            // With the path on, equal values reached along different
            // derivations are distinct answers.
            dedup_solutions: !self.path_enabled,
            ..SearchConfig::default()
        }
    }

    /// Runs one command and returns its rendered output.
    pub fn run_command(&mut self, cmd: Command) -> Result<String, SessionError> {
        match cmd {
            Command::LoadModule { name, rules } => {
                let original =
                    Program::validate(&rules).map_err(|errors| SessionError::Validation {
                        name: name.clone(),
                        errors,
                    })?;
                let transformed =
                    transform_program(&original).map_err(|source| SessionError::Generator {
                        name: name.clone(),
                        source,
                    })?;
                let out = format!("Module {name} loaded.");
                self.module = Some(Loaded {
                    name,
                    original: Arc::new(original),
                    transformed: Arc::new(transformed),
                });
                self.eval = None;
                Ok(out)
            }
            Command::EvalGen(raw) => {
                let m = self.module.as_ref().ok_or(SessionError::NoModule)?;
                let e = m.original.classify(&raw)?.genize();
                let stream = start_search(m.transformed.clone(), e, self.config())?;
                self.eval = Some(Evaluation {
                    stream,
                    with_path: self.path_enabled,
                    last: None,
                });
                Ok(self.advance(true))
            }
            Command::Next => {
                if self.eval.is_none() {
                    return Err(SessionError::NoStream);
                }
                Ok(self.advance(false))
            }
            Command::ShowPath => {
                let ev = self.eval.as_ref().ok_or(SessionError::NoStream)?;
                if !ev.with_path {
                    return Err(SessionError::PathOff);
                }
                let sol = ev.last.as_ref().ok_or(SessionError::NoSolution)?;
                Ok(sol.trace.render_path())
            }
            Command::PathOn => {
                self.path_enabled = true;
                Ok("Path activated.".into())
            }
            Command::PathOff => {
                self.path_enabled = false;
                Ok("Path deactivated.".into())
            }
            Command::BreadthFirst => {
                self.strategy = Strategy::BreadthFirst;
                Ok("Breadth-first strategy selected.".into())
            }
            Command::DepthFirst => {
                self.strategy = Strategy::DepthFirst;
                Ok("Depth-first strategy selected.".into())
            }
            Command::Depth(n) => {
                self.max_depth = n;
                Ok(format!("Depth limit set to {n}."))
            }
        }
    }

    fn advance(&mut self, first: bool) -> String {
        let ev = self.eval.as_mut().expect("checked by caller");
        match ev.stream.next() {
            Some(sol) => {
                let out = format!("Result: {}", sol.value);
                ev.last = Some(sol);
                out
            }
            None => {
                ev.last = None;
                let mut out = String::from(if first {
                    "No solution."
                } else {
                    "No more solutions."
                });
                if ev.stream.truncated() {
                    out.push_str(&format!(
                        "\nSearch truncated at depth {}.",
                        ev.stream.config().max_depth
                    ));
                }
                out
            }
        }
    }

    /// Parses and runs one command, rendering errors as a single line.
    pub fn run_line(&mut self, text: &str) -> Reply {
        let result = parse_command(text)
            .map_err(SessionError::from)
            .and_then(|c| self.run_command(c));
        reply(result)
    }
}

fn reply(result: Result<String, SessionError>) -> Reply {
    match result {
        Ok(text) => Reply { text, fatal: false },
        Err(e) => Reply {
            text: format!("Error: {e}"),
            fatal: e.is_fatal(),
        },
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    /// A parse or validation error.
    pub fatal: bool,
}

/// Transcript of a batch run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRun {
    pub transcript: String,
    pub failed: bool,
}

/// Runs every command of a script in a fresh session. Each command is echoed
/// after a `> ` prompt, followed by its output.
pub fn run_script(text: &str) -> ScriptRun {
    let items = match split_script(text) {
        Ok(items) => items,
        Err(e) => {
            return ScriptRun {
                transcript: format!("Error: parse error at {e}\n"),
                failed: true,
            }
        }
    };
    let mut session = SessionState::new();
    let mut transcript = String::new();
    let mut failed = false;
    for item in items {
        transcript.push_str(&echo(&item.text));
        let parsed = parse_command(&item.text).map_err(|mut e| {
            e.line += item.line - 1;
            SessionError::from(e)
        });
        let reply = reply(parsed.and_then(|c| session.run_command(c)));
        failed |= reply.fatal;
        transcript.push_str(&reply.text);
        transcript.push_str("\n\n");
    }
    ScriptRun { transcript, failed }
}

fn echo(form: &str) -> String {
    let mut out = String::new();
    for (i, line) in form.lines().enumerate() {
        out.push_str(if i == 0 { "> " } else { "  " });
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &mut SessionState, src: &str) {
        let r = s.run_line(src);
        assert!(r.text.ends_with("loaded."), "{}", r.text);
    }

    #[test]
    fn ipl_transcript() {
        let mut s = SessionState::new();
        load(&mut s, include_str!("../corpus/ipl.smod"));
        assert_eq!(s.run_line("(eval-gen f(X,X) .)").text, "Result: 2");
    }

    #[test]
    fn settings_messages() {
        let mut s = SessionState::new();
        assert_eq!(s.run_line("(path on.)").text, "Path activated.");
        assert_eq!(s.run_line("(path off .)").text, "Path deactivated.");
        assert_eq!(
            s.run_line("(breadth-first .)").text,
            "Breadth-first strategy selected."
        );
        assert_eq!(
            s.run_line("(depth-first .)").text,
            "Depth-first strategy selected."
        );
        assert_eq!(s.run_line("(depth 7 .)").text, "Depth limit set to 7.");
        assert_eq!(s.max_depth(), 7);
        assert_eq!(s.strategy(), Strategy::DepthFirst);
    }

    #[test]
    fn user_errors_are_single_lines() {
        let mut s = SessionState::new();
        let r = s.run_line("(eval-gen f(X) .)");
        assert_eq!(r.text, "Error: no module loaded");
        assert!(!r.fatal);
        assert_eq!(
            s.run_line("(next .)").text,
            "Error: no evaluation in progress"
        );
        load(&mut s, include_str!("../corpus/clerks.smod"));
        s.run_line("(eval-gen search(X) .)");
        assert_eq!(
            s.run_line("(show path .)").text,
            "Error: path recording was off when the evaluation started"
        );
        let r = s.run_line("(eval-gen search(X,X) .)");
        assert!(r.fatal && !r.text.contains('\n'), "{}", r.text);
        let r = s.run_line("(frobnicate .)");
        assert!(r.fatal && r.text.starts_with("Error: parse error"));
        let r = s.run_line("(smod BAD is f(X, X) -> X . ends)");
        assert!(r.fatal && r.text.contains("not linear"), "{}", r.text);
        assert_eq!(s.module_name(), Some("CLERKS"));
    }

    #[test]
    fn exhaustion_messages() {
        let mut s = SessionState::new();
        load(&mut s, "(smod M is f(a) -> b . ends)");
        assert_eq!(s.run_line("(eval-gen f(b) .)").text, "No solution.");
        assert_eq!(s.run_line("(eval-gen f(X) .)").text, "Result: b");
        assert_eq!(s.run_line("(next .)").text, "No more solutions.");
        assert_eq!(s.run_line("(next .)").text, "No more solutions.");
        load(&mut s, "(smod N is g(c(X)) -> X . ends)");
        s.run_line("(depth 4 .)");
        assert_eq!(
            s.run_line("(eval-gen g(Y) .)").text,
            "No solution.\nSearch truncated at depth 4."
        );
    }

    #[test]
    fn config_applies_from_next_eval() {
        let mut s = SessionState::new();
        load(&mut s, include_str!("../corpus/party.smod"));
        s.run_line("(path on .)");
        assert_eq!(s.run_line("(eval-gen success(F, S) .)").text, "Result: tt");
        s.run_line("(path off .)");
        let path = s.run_line("(show path .)").text;
        assert!(
            path.starts_with("haveFun(makeCalls(gen,gen))\n--->\n"),
            "{path}"
        );
        assert!(path.ends_with("haveFun(fun)\n--->\ntt"));
        assert_eq!(path.lines().filter(|l| *l != "--->").count(), 5);
    }

    #[test]
    fn script_runs_are_echoed() {
        let run = run_script("(path on .)\n(next .)\n");
        assert_eq!(
            run.transcript,
            "> (path on .)\nPath activated.\n\n> (next .)\nError: no evaluation in progress\n\n"
        );
        assert!(!run.failed);
        assert!(run_script("(depth 0 .)").failed);
        assert!(run_script("(next .").failed);
    }
}
