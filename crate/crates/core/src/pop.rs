//! The ⊥-calculus: rules (B) and (OR), explored as a bounded oracle for
//! the values an annotated expression can reach. Also hosts ordinary term
//! rewriting, the reference meaning of `rrt`.

use std::collections::BTreeSet;
use std::fmt;

use crate::explore::{explore, Exploration, ExploreOptions, SearchBounds};
use crate::term::{
    apply_subst, approximations, match_params, match_with, rewrite_in_context, shell, strip_rt,
    Expr, MatchMode, Program,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PopRule {
    /// (B): a subterm is discarded as ⊥.
    Bottom,
    /// (OR): a program rule is applied with an rt-c-substitution.
    Or,
    /// Ordinary rewriting, unrestricted matching.
    Rewrite,
}

impl fmt::Display for PopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PopRule::Bottom => "B",
            PopRule::Or => "OR",
            PopRule::Rewrite => "Rw",
        })
    }
}

/// Where (B) may fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BottomRule {
    /// Only at function-rooted subterms.
    Canonical,
    /// At every subterm that is not already ⊥.
    Unrestricted,
}

/// Reachable partial values, downward closed under the approximation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopResult {
    pub values: BTreeSet<Expr>,
    pub incomplete: bool,
    pub states: usize,
}

impl PopResult {
    /// The total values (no ⊥) among the reachable partial values.
    pub fn totals(&self) -> BTreeSet<Expr> {
        self.values
            .iter()
            .filter(|v| !v.contains_bottom())
            .cloned()
            .collect()
    }
}

/// One (OR) step at every function-rooted position and every applicable rule.
pub fn step_or(e: &Expr, p: &Program) -> Vec<Expr> {
    rewrite_in_context(e, |sub, _| or_at(sub, p))
        .into_iter()
        .map(|(_, _, next)| next)
        .collect()
}

fn or_at(sub: &Expr, p: &Program) -> Vec<((), Expr)> {
    let Expr::Fun { name, args, .. } = sub else {
        return Vec::new();
    };
    p.rules_for(name)
        .filter_map(|rule| {
            let theta = match_params(&rule.params, args, true).expect("arity checked at load")?;
            Some(((), apply_subst(&rule.rhs, &theta)))
        })
        .collect()
}

/// (B) restricted to function-rooted subterms.
pub fn step_b(e: &Expr) -> Vec<Expr> {
    step_b_with(e, BottomRule::Canonical)
}

pub fn step_b_with(e: &Expr, mode: BottomRule) -> Vec<Expr> {
    rewrite_in_context(e, |sub, _| {
        let fires = match mode {
            BottomRule::Canonical => matches!(sub, Expr::Fun { .. }),
            BottomRule::Unrestricted => !matches!(sub, Expr::Bottom),
        };
        if fires {
            vec![((), Expr::Bottom)]
        } else {
            Vec::new()
        }
    })
    .into_iter()
    .map(|(_, _, next)| next)
    .collect()
}

fn pop_successors(e: &Expr, p: &Program, mode: BottomRule) -> Vec<(PopRule, Expr)> {
    let mut out: Vec<(PopRule, Expr)> = step_or(e, p).into_iter().map(|s| (PopRule::Or, s)).collect();
    out.extend(step_b_with(e, mode).into_iter().map(|s| (PopRule::Bottom, s)));
    out
}

pub fn reachable_pvalues(e: &Expr, p: &Program, bounds: SearchBounds) -> PopResult {
    reachable_pvalues_with(e, p, bounds, BottomRule::Canonical)
}

pub fn reachable_pvalues_with(e: &Expr, p: &Program, bounds: SearchBounds, mode: BottomRule) -> PopResult {
    let ex = pop_graph_with(e, p, ExploreOptions::new(bounds), mode);
    collect_partial_values(&ex, |state| state.is_partial_value().then(|| state.clone()))
}

/// The explored ⊥-calculus graph, edges included.
pub fn pop_graph(e: &Expr, p: &Program, bounds: SearchBounds) -> Exploration<PopRule> {
    let mut options = ExploreOptions::new(bounds);
    options.record_edges = true;
    pop_graph_with(e, p, options, BottomRule::Canonical)
}

fn pop_graph_with(e: &Expr, p: &Program, options: ExploreOptions, mode: BottomRule) -> Exploration<PopRule> {
    explore(e.clone(), options, |state| pop_successors(state, p, mode))
}

fn collect_partial_values<L>(ex: &Exploration<L>, value_of: impl Fn(&Expr) -> Option<Expr>) -> PopResult {
    let maximal: BTreeSet<Expr> = ex.states.iter().filter_map(value_of).collect();
    let mut values = BTreeSet::new();
    for v in &maximal {
        if values.contains(v) {
            continue;
        }
        values.extend(approximations(v));
    }
    PopResult {
        values,
        incomplete: ex.incomplete,
        states: ex.states.len(),
    }
}

/// Classical rewriting steps: any rule, any position, unrestricted matching.
pub fn rewrite_ordinary_step(e: &Expr, p: &Program) -> Vec<Expr> {
    rewrite_in_context(e, |sub, _| {
        let Expr::Fun { name, args, .. } = sub else {
            return Vec::new();
        };
        p.rules_for(name)
            .filter_map(|rule| {
                let theta = match_with(&rule.params, args, MatchMode::Unrestricted)
                    .expect("arity checked at load")?;
                Some(((), apply_subst(&rule.rhs, &theta)))
            })
            .collect()
    })
    .into_iter()
    .map(|(_, _, next)| next)
    .collect()
}

/// Values of `rrt(e)`: shells of everything ordinary rewriting reaches
/// from `e`, downward closed. Rt flags carry no meaning under ordinary
/// rewriting and are erased first.
pub fn crwl_rrt_values(e: &Expr, p: &Program, bounds: SearchBounds) -> PopResult {
    let plain = p.strip_rt();
    let ex = explore(strip_rt(e), ExploreOptions::new(bounds), |state| {
        rewrite_ordinary_step(state, &plain)
            .into_iter()
            .map(|s| (PopRule::Rewrite, s))
            .collect()
    });
    collect_partial_values(&ex, |state| shell(state).ok())
}
