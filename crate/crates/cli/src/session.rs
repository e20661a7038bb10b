//! A loaded program plus evaluation settings, shared by file runs and the REPL.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use flp_core::compare::{compare_engines, display_order, CompareReport};
use flp_core::letcalc::{enumerate_values_let, let_graph, trace_derivation};
use flp_core::pop::{pop_graph, reachable_pvalues};
use flp_core::susp::{solve, SolveLimits};
use flp_core::{corpus, load_goal, load_program, Expr, Program, SearchBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Pop,
    Let,
    Susp,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Pop => "pop",
            Engine::Let => "let",
            Engine::Susp => "susp",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub engine: Engine,
    pub rrt: bool,
    pub max_steps: usize,
    pub max_states: usize,
    pub max_answers: usize,
    pub trace: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            engine: Engine::Susp,
            rrt: false,
            max_steps: flp_core::DEFAULT_MAX_STEPS,
            max_states: flp_core::DEFAULT_MAX_STATES,
            max_answers: 100,
            trace: false,
        }
    }
}

/// Why an evaluation produced no output.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: parse or load errors, bad bounds, unreadable files.
    Diagnostics(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Diagnostics(msg) => f.write_str(msg),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

fn diagnostics(e: impl fmt::Display) -> Failure {
    Failure::Diagnostics(e.to_string())
}

pub struct Session {
    pub settings: Settings,
    program: Program,
    origin: String,
}

impl Session {
    /// A session over the prelude alone.
    pub fn new(settings: Settings) -> Self {
        Session {
            settings,
            program: load_program("", "<prelude>").expect("the prelude loads"),
            origin: "<prelude>".into(),
        }
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// Loads a program file, falling back to the bundled corpus for bare
    /// corpus file names.
    pub fn load_file(&mut self, path: &Path) -> Result<(), Failure> {
        let shown = path.display().to_string();
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => match path.to_str().and_then(corpus::source) {
                Some(text) => text.to_string(),
                None => return Err(Failure::Diagnostics(format!("{shown}: {e}"))),
            },
        };
        self.program = load_program(&text, &shown).map_err(diagnostics)?;
        self.origin = shown;
        Ok(())
    }

    fn bounds(&self) -> Result<SearchBounds, Failure> {
        SearchBounds::new(self.settings.max_steps, self.settings.max_states).map_err(diagnostics)
    }

    fn goal(&self, text: &str) -> Result<(Expr, Program), Failure> {
        load_goal(text, &self.program, self.settings.rrt).map_err(diagnostics)
    }

    /// Evaluates a goal on the selected engine and prints one answer per
    /// line followed by a completion line. Returns the number of answers.
    pub fn evaluate(&self, text: &str, out: &mut dyn Write) -> Result<usize, Failure> {
        if self.settings.max_answers == 0 {
            return Err(Failure::Diagnostics("max answers must be positive".into()));
        }
        let bounds = self.bounds()?;
        let (goal, program) = self.goal(text)?;
        let (answers, complete) = match self.settings.engine {
            Engine::Susp => {
                let limits = SolveLimits {
                    max_answers: self.settings.max_answers,
                    max_depth: self.settings.max_steps,
                };
                let solutions = solve(&goal, &program, limits).map_err(diagnostics)?;
                for answer in &solutions.answers {
                    writeln!(out, "{}", answer.value)?;
                    if self.settings.trace {
                        let choices: Vec<String> = answer
                            .branch_trace
                            .iter()
                            .map(|c| format!("s{}:r{}", c.suspension, c.rule + 1))
                            .collect();
                        writeln!(out, "  choices: {}", choices.join(" "))?;
                    }
                }
                (solutions.answers.len(), solutions.exhausted)
            }
            Engine::Pop => {
                let r = reachable_pvalues(&goal, &program, bounds);
                self.print_set(&r.totals(), !r.incomplete, out)?
            }
            Engine::Let => {
                if self.settings.trace {
                    match trace_derivation(&goal, &program, bounds, None) {
                        Ok(d) => write!(out, "{d}")?,
                        Err(e) => writeln!(out, "trace: {e}")?,
                    }
                }
                let r = enumerate_values_let(&goal, &program, bounds);
                self.print_set(&r.values, !r.incomplete, out)?
            }
        };
        let ending = if complete { "no more answers." } else { "search bound reached." };
        writeln!(out, "{ending}")?;
        Ok(answers)
    }

    fn print_set(&self, values: &BTreeSet<Expr>, complete: bool, out: &mut dyn Write) -> Result<(usize, bool), Failure> {
        let ordered = display_order(values);
        let shown = ordered.len().min(self.settings.max_answers);
        for v in &ordered[..shown] {
            writeln!(out, "{v}")?;
        }
        Ok((shown, complete && shown == ordered.len()))
    }

    pub fn compare(&self, text: &str) -> Result<CompareReport, Failure> {
        let bounds = self.bounds()?;
        let (goal, program) = self.goal(text)?;
        compare_engines(&goal, &program, bounds).map_err(diagnostics)
    }

    /// Writes the bounded reduction graph of the selected calculus.
    pub fn write_dot(&self, text: &str, path: &Path) -> Result<(), Failure> {
        let bounds = self.bounds()?;
        let (goal, program) = self.goal(text)?;
        let dot = match self.settings.engine {
            Engine::Pop => pop_graph(&goal, &program, bounds).to_dot(text),
            Engine::Let => let_graph(&goal, &program, bounds).to_dot(text),
            Engine::Susp => {
                return Err(Failure::Diagnostics(
                    "reduction graphs exist for the calculi only; use --engine pop or --engine let".into(),
                ))
            }
        };
        std::fs::write(path, dot).map_err(|e| Failure::Diagnostics(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(session: &Session, goal: &str) -> (usize, String) {
        let mut out = Vec::new();
        let n = session.evaluate(goal, &mut out).unwrap();
        (n, String::from_utf8(out).unwrap())
    }

    fn coin_session(engine: Engine) -> Session {
        let mut s = Session::new(Settings {
            engine,
            ..Settings::default()
        });
        s.load_file(Path::new("coin.flp")).unwrap();
        s
    }

    #[test]
    fn engines_print_the_same_values() {
        let mut outputs = Vec::new();
        for engine in [Engine::Pop, Engine::Let, Engine::Susp] {
            let (n, text) = run(&coin_session(engine), "rt(f(coin))");
            assert_eq!(n, 8, "{engine}");
            assert!(text.ends_with("no more answers.\n"));
            let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
            lines.sort();
            outputs.push(lines);
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
    }

    #[test]
    fn answer_limit_truncates_sets() {
        let mut s = coin_session(Engine::Pop);
        s.settings.max_answers = 3;
        let (n, text) = run(&s, "rt(f(coin))");
        assert_eq!(n, 3);
        assert!(text.ends_with("search bound reached.\n"));
    }

    #[test]
    fn bad_input_is_a_diagnostic() {
        let s = coin_session(Engine::Susp);
        assert!(matches!(s.evaluate("f(X)", &mut Vec::new()), Err(Failure::Diagnostics(_))));
        let mut s = Session::new(Settings::default());
        assert!(s.load_file(Path::new("/nonexistent/file.flp")).is_err());
        assert_eq!(s.origin(), "<prelude>");
        s.settings.max_steps = 0;
        assert!(s.evaluate("take(1, repeat(0))", &mut Vec::new()).is_err());
    }

    #[test]
    fn let_trace_precedes_values() {
        let mut s = coin_session(Engine::Let);
        s.settings.trace = true;
        let (_, text) = run(&s, "f^rt(coin^rt)");
        assert!(text.starts_with("1. [Fapp@ε] g(coin^rt, coin)\n"), "{text}");
    }
}
