//! Functional logic programs with call-time and run-time choice.
//!
//! Three independent semantics are implemented over one term language:
//! the ⊥-calculus ([`pop`]), the let-calculus ([`letcalc`]) and a
//! suspension-based evaluator ([`susp`]). [`compare`] cross-checks them.

pub mod compare;
pub mod corpus;
pub mod desugar;
pub mod explore;
pub mod letcalc;
pub mod load;
pub mod pop;
pub mod susp;
pub mod syntax;
pub mod term;

pub use desugar::{desugar_program, desugar_rrt, desugar_rt, rrt_transform, DesugarError};
pub use explore::{SearchBounds, DEFAULT_MAX_STATES, DEFAULT_MAX_STEPS};
pub use load::{load_goal, load_program, LoadError};
pub use letcalc::{enumerate_values_let, step_let, trace_derivation, LetRule};
pub use pop::{crwl_rrt_values, reachable_pvalues, step_b, step_or};
pub use susp::{solve, SolveLimits, Solutions};
pub use syntax::{load_with_prelude, parse_expr, parse_program, Diagnostic, Diagnostics};
pub use term::{is_rtcterm, leq_approx, match_params, shell, Expr, Program, Rule, Substitution};
