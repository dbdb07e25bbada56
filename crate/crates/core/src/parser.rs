//! Parser for `(smod NAME is ... ends)` modules and the interactive command
//! language.
//!
//! ```text
//! module  := "(" "smod" NAME "is" rule* "ends" ")"
//! rule    := term "->" term "."
//! term    := alt
//! alt     := app ( "?" alt )?
//! app     := IDENT ( "(" term ( "," term )* ")" )? | "(" term ")"
//! ```
//!
//! `---` starts a comment running to the end of the line.

use std::fmt;
use std::num::NonZeroUsize;

use thiserror::Error;

use crate::program::RawRule;
use crate::terms::{RawTerm, CHOICE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("missing `->` in rule")]
    MissingArrow,
    #[error("missing `.` at end of statement")]
    MissingPeriod,
    #[error("empty module")]
    EmptyModule,
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("depth must be a positive integer, found `{0}`")]
    BadDepth(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Question,
    Arrow,
    Period,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Period => f.write_str("`.`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if chars[i..].starts_with(&['-', '-', '-']) {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            advance(n, &mut i);
            continue;
        }
        let tok = match c {
            '(' => Some((Tok::LParen, 1)),
            ')' => Some((Tok::RParen, 1)),
            ',' => Some((Tok::Comma, 1)),
            '?' => Some((Tok::Question, 1)),
            '.' => Some((Tok::Period, 1)),
            '-' if chars.get(i + 1) == Some(&'>') => Some((Tok::Arrow, 2)),
            _ => None,
        };
        if let Some((tok, n)) = tok {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            advance(n, &mut i);
            continue;
        }
        if is_ident_char(c) {
            let mut n = 0;
            while i + n < chars.len() {
                let d = chars[i + n];
                let dashed = d == '-' && chars.get(i + n + 1).is_some_and(|&e| is_ident_char(e));
                if is_ident_char(d) || dashed {
                    n += 1;
                } else {
                    break;
                }
            }
            let s: String = chars[i..i + n].iter().collect();
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
            advance(n, &mut i);
            continue;
        }
        return Err(ParseError {
            line: l0,
            col: c0,
            kind: ParseErrorKind::UnexpectedChar(c),
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    check_balance(&out)?;
    Ok(out)
}

fn check_balance(toks: &[Spanned]) -> Result<(), ParseError> {
    let mut open = Vec::new();
    for t in toks {
        match t.tok {
            Tok::LParen => open.push(t),
            Tok::RParen if open.pop().is_none() => {
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    kind: ParseErrorKind::UnbalancedParens,
                });
            }
            _ => {}
        }
    }
    match open.last() {
        Some(t) => Err(ParseError {
            line: t.line,
            col: t.col,
            kind: ParseErrorKind::UnbalancedParens,
        }),
        None => Ok(()),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error_here(ParseErrorKind::Expected {
            expected: what.to_string(),
            found: self.peek().tok.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&tok.to_string()))
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            _ => Err(self.expected(&format!("`{word}`"))),
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn expect_period(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Period {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(ParseErrorKind::MissingPeriod))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.expected("end of input"))
        }
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let left = self.app()?;
        if self.peek().tok == Tok::Question {
            self.bump();
            let right = self.term()?;
            return Ok(RawTerm::App(CHOICE.to_string(), vec![left, right]));
        }
        Ok(left)
    }

    fn app(&mut self) -> Result<RawTerm, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if name.contains('-') {
                    return Err(self.error_here(ParseErrorKind::InvalidIdentifier(name)));
                }
                self.bump();
                if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    if self.peek().tok == Tok::LParen {
                        return Err(self.expected("an operator or delimiter after a variable"));
                    }
                    return Ok(RawTerm::Var(name));
                }
                let mut args = Vec::new();
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    args.push(self.term()?);
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(RawTerm::App(name, args))
            }
            _ => Err(self.expected("a term")),
        }
    }

    fn module(&mut self) -> Result<(String, Vec<RawRule>), ParseError> {
        if self.peek().tok == Tok::Eof {
            return Err(self.error_here(ParseErrorKind::EmptyModule));
        }
        self.expect(Tok::LParen)?;
        self.expect_word("smod")?;
        let name = match self.peek().tok.clone() {
            Tok::Ident(n) if !n.contains('-') => {
                self.bump();
                n
            }
            _ => return Err(self.expected("a module name")),
        };
        self.expect_word("is")?;
        let mut rules = Vec::new();
        loop {
            if self.is_word("ends") && *self.peek_at(1) == Tok::RParen {
                self.bump();
                self.bump();
                break;
            }
            if self.peek().tok == Tok::Eof || self.peek().tok == Tok::RParen {
                return Err(self.expected("a rule or `ends`"));
            }
            let lhs = self.term()?;
            if self.peek().tok != Tok::Arrow {
                return Err(self.error_here(ParseErrorKind::MissingArrow));
            }
            self.bump();
            let rhs = self.term()?;
            self.expect_period()?;
            rules.push(RawRule::new(lhs, rhs));
        }
        Ok((name, rules))
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        if self.peek().tok == Tok::Eof {
            return Err(self.expected("a command"));
        }
        self.expect(Tok::LParen)?;
        let word = match self.peek().tok.clone() {
            Tok::Ident(w) => w,
            _ => return Err(self.expected("a command word")),
        };
        if word == "smod" {
            self.pos -= 1;
            let (name, rules) = self.module()?;
            return Ok(Command::LoadModule { name, rules });
        }
        self.bump();
        let cmd = match word.as_str() {
            "eval-gen" => Command::EvalGen(self.term()?),
            "next" => Command::Next,
            "show" => {
                self.expect_word("path")?;
                Command::ShowPath
            }
            "path" => {
                if self.is_word("on") {
                    self.bump();
                    Command::PathOn
                } else if self.is_word("off") {
                    self.bump();
                    Command::PathOff
                } else {
                    return Err(self.expected("`on` or `off`"));
                }
            }
            "breadth-first" => Command::BreadthFirst,
            "depth-first" => Command::DepthFirst,
            "depth" => {
                let t = self.peek().clone();
                let n = match &t.tok {
                    Tok::Ident(s) => s.parse::<usize>().ok().and_then(NonZeroUsize::new),
                    _ => None,
                };
                match n {
                    Some(n) => {
                        self.bump();
                        Command::Depth(n)
                    }
                    None => {
                        let found = match t.tok {
                            Tok::Ident(s) => s,
                            other => other.to_string(),
                        };
                        return Err(self.error_here(ParseErrorKind::BadDepth(found)));
                    }
                }
            }
            _ => {
                let t = &self.toks[self.pos - 1];
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    kind: ParseErrorKind::UnknownCommand(word),
                });
            }
        };
        self.expect_period()?;
        self.expect(Tok::RParen)?;
        self.expect_eof()?;
        Ok(cmd)
    }
}

/// A command of the interactive loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    LoadModule { name: String, rules: Vec<RawRule> },
    EvalGen(RawTerm),
    Next,
    ShowPath,
    PathOn,
    PathOff,
    BreadthFirst,
    DepthFirst,
    Depth(NonZeroUsize),
}

/// Parses a module, returning its name and its rules in source order.
pub fn parse_module(text: &str) -> Result<(String, Vec<RawRule>), ParseError> {
    let mut p = Parser::new(text)?;
    let m = p.module()?;
    p.expect_eof()?;
    Ok(m)
}

/// Parses a single term, e.g. `success(F, S)`.
pub fn parse_term(text: &str) -> Result<RawTerm, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_command(text: &str) -> Result<Command, ParseError> {
    Parser::new(text)?.command()
}

/// A top-level parenthesised form of a script with the line it starts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptItem {
    pub line: usize,
    pub text: String,
}

/// Splits a script into its top-level parenthesised forms. Comments and
/// blank space between forms are dropped; text outside any form is an error.
pub fn split_script(text: &str) -> Result<Vec<ScriptItem>, ParseError> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start: Option<(usize, usize)> = None;
    let mut line = 1;
    let mut col = 1;
    let bytes: Vec<char> = text.chars().collect();
    let mut byte_offsets = Vec::with_capacity(bytes.len() + 1);
    let mut off = 0;
    for c in &bytes {
        byte_offsets.push(off);
        off += c.len_utf8();
    }
    byte_offsets.push(off);

    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if bytes[i..].starts_with(&['-', '-', '-']) {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        match c {
            '(' => {
                if depth == 0 {
                    start = Some((i, line));
                }
                depth += 1;
            }
            ')' => {
                if depth == 0 {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseErrorKind::UnbalancedParens,
                    });
                }
                depth -= 1;
                if depth == 0 {
                    let (s, l) = start.take().expect("open form");
                    items.push(ScriptItem {
                        line: l,
                        text: text[byte_offsets[s]..byte_offsets[i + 1]].to_string(),
                    });
                }
            }
            c if depth == 0 && !c.is_whitespace() => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::UnexpectedChar(c),
                });
            }
            _ => {}
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        i += 1;
    }
    if let Some((_, l)) = start {
        return Err(ParseError {
            line: l,
            col: 1,
            kind: ParseErrorKind::UnbalancedParens,
        });
    }
    Ok(items)
}
