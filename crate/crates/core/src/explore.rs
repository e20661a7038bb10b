//! Bounded breadth-first exploration of a one-step reduction relation.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::term::Expr;

pub const DEFAULT_MAX_STEPS: usize = 30;
pub const DEFAULT_MAX_STATES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("search bounds must be positive (got max_steps={max_steps}, max_states={max_states})")]
pub struct BoundsError {
    pub max_steps: usize,
    pub max_states: usize,
}

/// Limits for exploring the (in general infinite) reduction graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    max_steps: usize,
    max_states: usize,
}

impl SearchBounds {
    pub fn new(max_steps: usize, max_states: usize) -> Result<Self, BoundsError> {
        if max_steps == 0 || max_states == 0 {
            return Err(BoundsError { max_steps, max_states });
        }
        Ok(SearchBounds { max_steps, max_states })
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn max_states(&self) -> usize {
        self.max_states
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_steps: DEFAULT_MAX_STEPS,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<L> {
    pub from: usize,
    pub to: usize,
    pub label: L,
}

/// The explored fragment of a reduction graph. State 0 is the start.
#[derive(Clone, Debug)]
pub struct Exploration<L> {
    pub states: Vec<Expr>,
    pub depths: Vec<usize>,
    pub edges: Vec<Edge<L>>,
    /// Set when some state was left unexpanded because of the bounds.
    pub incomplete: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ExploreOptions {
    pub bounds: SearchBounds,
    pub record_edges: bool,
    /// Identify structurally equal states. Without it the search unfolds
    /// the derivation tree.
    pub memoize: bool,
}

impl ExploreOptions {
    pub fn new(bounds: SearchBounds) -> Self {
        ExploreOptions {
            bounds,
            record_edges: false,
            memoize: true,
        }
    }
}

pub fn explore<L>(
    start: Expr,
    options: ExploreOptions,
    mut successors: impl FnMut(&Expr) -> Vec<(L, Expr)>,
) -> Exploration<L> {
    let bounds = options.bounds;
    let mut seen: HashMap<Expr, usize> = HashMap::new();
    let mut out = Exploration {
        states: vec![start.clone()],
        depths: vec![0],
        edges: Vec::new(),
        incomplete: false,
    };
    if options.memoize {
        seen.insert(start, 0);
    }
    let mut queue = VecDeque::from([0usize]);
    'search: while let Some(id) = queue.pop_front() {
        let depth = out.depths[id];
        let next = successors(&out.states[id]);
        if next.is_empty() {
            continue;
        }
        if depth >= bounds.max_steps {
            out.incomplete = true;
            continue;
        }
        for (label, state) in next {
            let known = if options.memoize { seen.get(&state).copied() } else { None };
            let to = match known {
                Some(to) => to,
                None => {
                    if out.states.len() >= bounds.max_states {
                        out.incomplete = true;
                        break 'search;
                    }
                    let to = out.states.len();
                    if options.memoize {
                        seen.insert(state.clone(), to);
                    }
                    out.states.push(state);
                    out.depths.push(depth + 1);
                    queue.push_back(to);
                    to
                }
            };
            if options.record_edges {
                out.edges.push(Edge { from: id, to, label });
            }
        }
    }
    out
}

impl<L: fmt::Display> Exploration<L> {
    /// Graphviz rendering of the explored graph.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
        for (i, state) in self.states.iter().enumerate() {
            let _ = writeln!(out, "  s{i} [label=\"{}\"];", escape(&state.to_string()));
        }
        for edge in &self.edges {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                edge.from,
                edge.to,
                escape(&edge.label.to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_down(e: &Expr) -> Vec<(&'static str, Expr)> {
        match e {
            Expr::Cons(c, args) if &**c == "s" => vec![("dec", args[0].clone())],
            _ => vec![],
        }
    }

    #[test]
    fn rejects_zero_bounds() {
        assert!(SearchBounds::new(0, 10).is_err());
        assert!(SearchBounds::new(10, 0).is_err());
        assert_eq!(SearchBounds::default().max_steps(), 30);
        assert_eq!(SearchBounds::default().max_states(), 100_000);
    }

    #[test]
    fn step_bound_marks_incomplete() {
        let opts = ExploreOptions::new(SearchBounds::new(2, 100).unwrap());
        let ex = explore(Expr::nat(5), opts, count_down);
        assert_eq!(ex.states.len(), 3);
        assert!(ex.incomplete);

        let opts = ExploreOptions::new(SearchBounds::new(5, 100).unwrap());
        let ex = explore(Expr::nat(5), opts, count_down);
        assert_eq!(ex.states.len(), 6);
        assert!(!ex.incomplete);
    }

    #[test]
    fn state_bound_marks_incomplete() {
        let opts = ExploreOptions::new(SearchBounds::new(50, 3).unwrap());
        let ex = explore(Expr::nat(5), opts, count_down);
        assert_eq!(ex.states.len(), 3);
        assert!(ex.incomplete);
    }

    #[test]
    fn dot_output_lists_states_and_edges() {
        let mut opts = ExploreOptions::new(SearchBounds::default());
        opts.record_edges = true;
        let ex = explore(Expr::nat(1), opts, count_down);
        let dot = ex.to_dot("g");
        assert!(dot.starts_with("digraph \"g\" {"));
        assert!(dot.contains("s0 [label=\"1\"]"));
        assert!(dot.contains("s0 -> s1 [label=\"dec\"]"));
    }
}
