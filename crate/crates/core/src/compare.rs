//! Differential runs of the three engines on one goal.
//!
//! Agreement of the two calculi with each other and with the suspension
//! engine is conjectured, not proven; a difference is a finding to report,
//! so it is returned as data rather than as an error.

use std::collections::BTreeSet;
use std::fmt;

use crate::explore::SearchBounds;
use crate::letcalc::enumerate_values_let;
use crate::pop::{crwl_rrt_values, reachable_pvalues};
use crate::susp::{solve, SolveLimits, SuspError};
use crate::term::{is_hatted, Expr, Program, HAT_SUFFIX};

/// Answers enumerated by the suspension engine before giving up.
pub const COMPARE_MAX_ANSWERS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineRun {
    pub totals: BTreeSet<Expr>,
    pub incomplete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Diff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Difference {
    pub left: &'static str,
    pub right: &'static str,
    pub only_left: BTreeSet<Expr>,
    pub only_right: BTreeSet<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareReport {
    pub goal: Expr,
    pub pop: EngineRun,
    pub let_calculus: EngineRun,
    pub susp: EngineRun,
    /// Ordinary rewriting of the original goal, present for goals over
    /// hatted functions.
    pub rewriting: Option<EngineRun>,
}

impl CompareReport {
    fn runs(&self) -> Vec<(&'static str, &EngineRun)> {
        let mut runs = vec![("pop", &self.pop), ("let", &self.let_calculus), ("susp", &self.susp)];
        if let Some(r) = &self.rewriting {
            runs.push(("rewriting", r));
        }
        runs
    }

    /// Pairwise differences against the pop engine.
    pub fn differences(&self) -> Vec<Difference> {
        let runs = self.runs();
        let (base_name, base) = runs[0];
        runs[1..]
            .iter()
            .filter(|(_, run)| run.totals != base.totals)
            .map(|(name, run)| Difference {
                left: base_name,
                right: name,
                only_left: base.totals.difference(&run.totals).cloned().collect(),
                only_right: run.totals.difference(&base.totals).cloned().collect(),
            })
            .collect()
    }

    pub fn verdict(&self) -> Verdict {
        if self.differences().is_empty() {
            Verdict::Pass
        } else {
            Verdict::Diff
        }
    }

    /// Differences a truncated search does not account for: a value some
    /// engine found is missing from an engine that explored its whole graph.
    pub fn unexplained_differences(&self) -> Vec<Difference> {
        let runs = self.runs();
        let incomplete = |name: &str| runs.iter().any(|(n, r)| *n == name && r.incomplete);
        self.differences()
            .into_iter()
            .map(|mut d| {
                if incomplete(d.right) {
                    d.only_left.clear();
                }
                if incomplete(d.left) {
                    d.only_right.clear();
                }
                d
            })
            .filter(|d| !d.only_left.is_empty() || !d.only_right.is_empty())
            .collect()
    }

    pub fn incomplete(&self) -> bool {
        self.runs().iter().any(|(_, r)| r.incomplete)
    }

    /// The smallest value on which some engines disagree.
    pub fn witness(&self) -> Option<Expr> {
        self.differences()
            .into_iter()
            .flat_map(|d| d.only_left.into_iter().chain(d.only_right))
            .min_by(|a, b| (a.size(), a).cmp(&(b.size(), b)))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Diff => "DIFF",
        })
    }
}

/// Values as printed, smallest first, for stable human-readable listings.
pub fn display_order<'a>(values: impl IntoIterator<Item = &'a Expr>) -> Vec<String> {
    let mut keyed: Vec<(usize, String)> = values.into_iter().map(|v| (v.size(), v.to_string())).collect();
    keyed.sort();
    keyed.into_iter().map(|(_, text)| text).collect()
}

fn show_set(set: &BTreeSet<Expr>) -> String {
    format!("{{{}}}", display_order(set).join(", "))
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "goal: {}", self.goal)?;
        for (name, run) in self.runs() {
            let flag = if run.incomplete { " (incomplete)" } else { "" };
            let n = run.totals.len();
            let noun = if n == 1 { "value" } else { "values" };
            writeln!(f, "{name:>9}: {n} {noun}{flag} {}", show_set(&run.totals))?;
        }
        for d in self.differences() {
            writeln!(
                f,
                "{} \\ {}: {}; {} \\ {}: {}",
                d.left,
                d.right,
                show_set(&d.only_left),
                d.right,
                d.left,
                show_set(&d.only_right)
            )?;
        }
        write!(f, "{}", self.verdict())?;
        if let Some(w) = self.witness() {
            write!(f, " witness: {w}")?;
        }
        if self.incomplete() {
            write!(f, " (bounded)")?;
            if self.verdict() == Verdict::Diff && self.unexplained_differences().is_empty() {
                write!(f, " every difference is explained by truncation")?;
            }
        }
        writeln!(f)
    }
}

/// Replaces hatted calls by the originals.
fn unhat(e: &Expr) -> Expr {
    match e {
        Expr::Fun { name, rt, args } => Expr::Fun {
            name: if is_hatted(name) {
                name.trim_end_matches(HAT_SUFFIX).into()
            } else {
                name.clone()
            },
            rt: *rt,
            args: args.iter().map(unhat).collect(),
        },
        Expr::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(unhat).collect()),
        Expr::Let(x, bound, body) => Expr::Let(x.clone(), Box::new(unhat(bound)), Box::new(unhat(body))),
        other => other.clone(),
    }
}

fn has_hatted_call(e: &Expr) -> bool {
    match e {
        Expr::Fun { name, .. } if is_hatted(name) => true,
        _ => e.children().into_iter().any(has_hatted_call),
    }
}

/// Runs every engine on `goal` concurrently.
pub fn compare_engines(goal: &Expr, program: &Program, bounds: SearchBounds) -> Result<CompareReport, SuspError> {
    let limits = SolveLimits {
        max_answers: COMPARE_MAX_ANSWERS,
        max_depth: bounds.max_steps(),
    };
    std::thread::scope(|scope| {
        let pop = scope.spawn(|| {
            let r = reachable_pvalues(goal, program, bounds);
            EngineRun {
                totals: r.totals(),
                incomplete: r.incomplete,
            }
        });
        let let_calculus = scope.spawn(|| {
            let r = enumerate_values_let(goal, program, bounds);
            EngineRun {
                totals: r.values,
                incomplete: r.incomplete,
            }
        });
        let rewriting = has_hatted_call(goal).then(|| {
            scope.spawn(|| {
                let r = crwl_rrt_values(&unhat(goal), program, bounds);
                EngineRun {
                    totals: r.totals(),
                    incomplete: r.incomplete,
                }
            })
        });
        let susp = solve(goal, program, limits)?;
        let join = |h: std::thread::ScopedJoinHandle<'_, EngineRun>| h.join().map_err(|_| SuspError::Thread);
        Ok(CompareReport {
            goal: goal.clone(),
            pop: join(pop)?,
            let_calculus: join(let_calculus)?,
            susp: EngineRun {
                totals: susp.values().into_iter().collect(),
                incomplete: !susp.exhausted,
            },
            rewriting: rewriting.map(join).transpose()?,
        })
    })
}
