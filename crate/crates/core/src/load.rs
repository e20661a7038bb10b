//! Text to evaluable program and goal.

use thiserror::Error;

use crate::desugar::{desugar_program, desugar_rrt, DesugarError};
use crate::syntax::{load_with_prelude, parse_expr, Diagnostics};
use crate::term::{Expr, Program};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("{0}")]
    Syntax(#[from] Diagnostics),
    #[error("{0}")]
    Desugar(#[from] DesugarError),
}

/// Parses `text` after the prelude and desugars it.
pub fn load_program(text: &str, origin: &str) -> Result<Program, LoadError> {
    Ok(desugar_program(&load_with_prelude(text, origin)?)?)
}

/// Parses and desugars a goal. The returned program has hatted copies when
/// the goal uses `rrt` or `force_rrt` is set.
pub fn load_goal(text: &str, program: &Program, force_rrt: bool) -> Result<(Expr, Program), LoadError> {
    let surface = parse_expr(text, program.symbols())?;
    let (goal, extended) = desugar_rrt(&surface, program)?;
    if force_rrt && !extended.has_hatted_copies() {
        return Ok((goal, crate::desugar::rrt_transform(&extended)?));
    }
    Ok((goal, extended))
}
