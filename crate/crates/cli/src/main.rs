//! `flp`: run goals against a program, or start a REPL when no goal is given.
//!
//! Exit status: 0 when at least one answer was printed (or the engines
//! agreed under `--compare`), 1 when there were none (or they disagreed),
//! 2 on diagnostics.

mod repl;
mod session;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use session::{Engine, Failure, Session, Settings};

#[derive(Parser, Debug)]
#[command(name = "flp", version, about = "Evaluate functional logic programs under call-time and run-time choice")]
struct Args {
    /// Program file (the prelude is always loaded)
    file: Option<PathBuf>,
    /// Goal to evaluate; without one, a REPL starts
    goal: Option<String>,
    /// Goal to evaluate, overriding the positional goal
    #[arg(short = 'e', long = "expr", value_name = "EXPR")]
    expr: Option<String>,
    #[arg(long, value_enum, default_value_t = Engine::Susp)]
    engine: Engine,
    /// Add hatted copies of every function even if the goal has no rrt
    #[arg(long)]
    rrt: bool,
    /// Step bound of the calculi; branch depth bound of the susp engine
    #[arg(long, default_value_t = flp_core::DEFAULT_MAX_STEPS)]
    max_steps: usize,
    #[arg(long, default_value_t = flp_core::DEFAULT_MAX_STATES)]
    max_states: usize,
    #[arg(long, default_value_t = 100)]
    max_answers: usize,
    /// Print a derivation (let) or the rule choices of each answer (susp)
    #[arg(long)]
    trace: bool,
    /// Run all engines and compare their value sets
    #[arg(long)]
    compare: bool,
    /// Write the bounded reduction graph of the selected calculus
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let settings = Settings {
        engine: args.engine,
        rrt: args.rrt,
        max_steps: args.max_steps,
        max_states: args.max_states,
        max_answers: args.max_answers,
        trace: args.trace,
    };
    let mut session = Session::new(settings);
    if let Some(file) = &args.file {
        if let Err(e) = session.load_file(file) {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }
    let Some(goal) = args.expr.or(args.goal) else {
        let stdin = io::stdin();
        let result = repl::run(&mut session, stdin.lock(), &mut io::stdout(), &mut io::stderr());
        return match result {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        };
    };
    match run_goal(&session, &goal, args.compare, args.dot.as_deref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn run_goal(session: &Session, goal: &str, compare: bool, dot: Option<&std::path::Path>) -> Result<bool, Failure> {
    let mut out = io::stdout().lock();
    if let Some(path) = dot {
        session.write_dot(goal, path)?;
    }
    if compare {
        let report = session.compare(goal)?;
        write!(out, "{report}")?;
        return Ok(report.unexplained_differences().is_empty());
    }
    Ok(session.evaluate(goal, &mut out)? > 0)
}
