use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use genlift::parser::split_script;
use genlift::repl::{run_script, SessionState};

/// Evaluate expressions with variables by lifting them to generator calls.
#[derive(Parser, Debug)]
#[command(name = "genlift", version)]
struct Cli {
    /// Run the commands in this file non-interactively and print the transcript.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.script {
        Some(path) => batch(&path),
        None => interactive(),
    }
}

fn batch(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("genlift: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let run = run_script(&text);
    print!("{}", run.transcript);
    if run.failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

/// Nesting depth of parentheses outside comments.
fn open_parens(text: &str) -> isize {
    let mut depth = 0;
    for line in text.lines() {
        let code = line.split("---").next().unwrap_or("");
        for c in code.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
        }
    }
    depth
}

fn interactive() -> ExitCode {
    let stdin = io::stdin();
    let prompt = stdin.is_terminal();
    let mut session = SessionState::new();
    let mut buffer = String::new();
    let mut failed = false;
    let mut out = io::stdout();
    loop {
        if prompt {
            let _ = write!(
                out,
                "{}",
                if buffer.is_empty() {
                    "genlift> "
                } else {
                    "       > "
                }
            );
            let _ = out.flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                eprintln!("genlift: {e}");
                return ExitCode::from(2);
            }
        }
        buffer.push_str(&line);
        if open_parens(&buffer) > 0 {
            continue;
        }
        let text = std::mem::take(&mut buffer);
        match split_script(&text) {
            Ok(items) => {
                for item in items {
                    let reply = session.run_line(&item.text);
                    failed |= reply.fatal;
                    let _ = writeln!(out, "{}", reply.text);
                }
            }
            Err(e) => {
                failed = true;
                let _ = writeln!(out, "Error: parse error at {e}");
            }
        }
    }
    if !buffer.trim().is_empty() {
        let _ = writeln!(out, "Error: unterminated command at end of input");
        failed = true;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
