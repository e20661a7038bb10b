use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;

use crate::session::{Engine, Session};

const HELP: &str = "commands: :load FILE | :engine pop|let|susp | :trace on|off | \
:bounds steps=N states=N answers=N | :quit; anything else is a goal";

/// Runs the read-eval-print loop until `:quit` or end of input. Command
/// errors are reported and the session continues.
pub fn run(session: &mut Session, input: impl BufRead, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<()> {
    let interactive = io::stdin().is_terminal();
    let mut lines = input.lines();
    loop {
        if interactive {
            write!(out, "flp> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(command) = line.strip_prefix(':') {
            match command_line(session, command, out) {
                Ok(Flow::Continue) => {}
                Ok(Flow::Quit) => break,
                Err(message) => writeln!(err, "error: {message}")?,
            }
            continue;
        }
        if let Err(e) = session.evaluate(line, out) {
            writeln!(err, "{e}")?;
        }
    }
    Ok(())
}

enum Flow {
    Continue,
    Quit,
}

fn command_line(session: &mut Session, command: &str, out: &mut dyn Write) -> Result<Flow, String> {
    let (name, rest) = command.split_once(char::is_whitespace).unwrap_or((command, ""));
    let rest = rest.trim();
    let io_error = |e: io::Error| e.to_string();
    match name {
        "quit" | "q" => return Ok(Flow::Quit),
        "help" | "h" => writeln!(out, "{HELP}").map_err(io_error)?,
        "load" => {
            if rest.is_empty() {
                return Err("usage: :load FILE".into());
            }
            session.load_file(Path::new(rest)).map_err(|e| e.to_string())?;
            writeln!(out, "loaded {}", session.origin()).map_err(io_error)?;
        }
        "engine" => {
            session.settings.engine = match rest {
                "pop" => Engine::Pop,
                "let" => Engine::Let,
                "susp" => Engine::Susp,
                other => return Err(format!("unknown engine `{other}` (pop, let or susp)")),
            };
        }
        "trace" => {
            session.settings.trace = match rest {
                "on" => true,
                "off" => false,
                other => return Err(format!("expected :trace on|off, got `{other}`")),
            };
        }
        "bounds" => set_bounds(session, rest)?,
        other => return Err(format!("unknown command `:{other}`; {HELP}")),
    }
    Ok(Flow::Continue)
}

fn set_bounds(session: &mut Session, spec: &str) -> Result<(), String> {
    let mut updated = session.settings.clone();
    for item in spec.split_whitespace() {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=N, got `{item}`"))?;
        let n: usize = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
        if n == 0 {
            return Err(format!("{key} must be positive"));
        }
        match key {
            "steps" => updated.max_steps = n,
            "states" => updated.max_states = n,
            "answers" => updated.max_answers = n,
            other => return Err(format!("unknown bound `{other}` (steps, states or answers)")),
        }
    }
    session.settings = updated;
    Ok(())
}
