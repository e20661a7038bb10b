//! Removal of surface annotations.
//!
//! `rt(e)` flags every function symbol of `e`; `rrt(e)` rewrites `e` to
//! call hatted copies of the program's functions (all flagged), whose
//! bodies are transformed the same way. Annotations are resolved
//! innermost first.

use thiserror::Error;

use crate::syntax::{SourceProgram, Surface};
use crate::term::{hat_name, is_hatted, Expr, Name, Program, Rule, SymbolKind, SymbolTable, TermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesugarError {
    #[error("{origin}:{line}:{col}: annotation inside a pattern of `{function}`")]
    AnnotationInPattern {
        function: Name,
        origin: String,
        line: usize,
        col: usize,
    },
    #[error("cannot add hatted copy `{0}`: the symbol already exists")]
    Collision(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Translates surface annotations into per-symbol rt flags. `rrt` nodes
/// become calls to hatted functions, which only exist in a program that
/// went through [`rrt_transform`].
pub fn desugar_rt(e: &Surface) -> Expr {
    match e {
        Surface::Var(x) => Expr::Var(x.clone()),
        Surface::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(desugar_rt).collect()),
        Surface::Fun { name, rt, args } => Expr::Fun {
            name: name.clone(),
            rt: *rt,
            args: args.iter().map(desugar_rt).collect(),
        },
        Surface::Rt(inner) => mark_rt(desugar_rt(inner)),
        Surface::Rrt(inner) => rrt_expr(&desugar_rt(inner)),
    }
}

fn mark_rt(e: Expr) -> Expr {
    match e {
        Expr::Fun { name, args, .. } => Expr::Fun {
            name,
            rt: true,
            args: args.into_iter().map(mark_rt).collect(),
        },
        Expr::Cons(c, args) => Expr::Cons(c, args.into_iter().map(mark_rt).collect()),
        other => other,
    }
}

/// The `rrt` translation of an expression: every function symbol becomes
/// its rt-flagged hatted copy. Already hatted symbols are kept, so the
/// translation is idempotent.
pub fn rrt_expr(e: &Expr) -> Expr {
    match e {
        Expr::Fun { name, args, .. } => {
            let hatted: Name = if is_hatted(name) {
                name.clone()
            } else {
                hat_name(name).into()
            };
            Expr::Fun {
                name: hatted,
                rt: true,
                args: args.iter().map(rrt_expr).collect(),
            }
        }
        Expr::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(rrt_expr).collect()),
        other => other.clone(),
    }
}

fn pattern(p: &Surface, rule_fn: &Name, origin: &str, line: usize, col: usize) -> Result<Expr, DesugarError> {
    match p {
        Surface::Var(x) => Ok(Expr::Var(x.clone())),
        Surface::Cons(c, args) => Ok(Expr::Cons(
            c.clone(),
            args.iter()
                .map(|a| pattern(a, rule_fn, origin, line, col))
                .collect::<Result<_, _>>()?,
        )),
        Surface::Rt(_) | Surface::Rrt(_) => Err(DesugarError::AnnotationInPattern {
            function: rule_fn.clone(),
            origin: origin.to_string(),
            line,
            col,
        }),
        Surface::Fun { name, .. } => Err(DesugarError::Term(TermError::InvalidProgram(format!(
            "function symbol `{name}` in a pattern"
        )))),
    }
}

/// Desugars every rule. If any right-hand side uses `rrt`, the hatted
/// copies are added as well.
pub fn desugar_program(p: &SourceProgram) -> Result<Program, DesugarError> {
    let mut rules = Vec::with_capacity(p.rules.len());
    let mut uses_rrt = false;
    for rule in &p.rules {
        let params = rule
            .params
            .iter()
            .map(|q| pattern(q, &rule.function, &rule.origin, rule.loc.line, rule.loc.col))
            .collect::<Result<Vec<_>, _>>()?;
        uses_rrt |= rule.rhs.contains_rrt();
        rules.push(Rule {
            function: rule.function.clone(),
            params,
            rhs: desugar_rt(&rule.rhs),
        });
    }
    if uses_rrt {
        with_hatted_copies(rules, p.symbols.clone())
    } else {
        Ok(Program::new(rules, p.symbols.clone())?)
    }
}

/// `P ⊎ P̂`: adds a hatted copy `f̂` of every function with rules
/// `f̂(p̄) -> rrt_expr(r)`. The original rules are left untouched.
pub fn rrt_transform(p: &Program) -> Result<Program, DesugarError> {
    with_hatted_copies(p.rules().to_vec(), p.symbols().clone())
}

fn with_hatted_copies(rules: Vec<Rule>, mut symbols: SymbolTable) -> Result<Program, DesugarError> {
    let originals: Vec<(Name, usize)> = symbols
        .functions()
        .filter(|info| !is_hatted(&info.name))
        .map(|info| (info.name.clone(), info.arity))
        .collect();
    for (f, arity) in &originals {
        let hatted = hat_name(f);
        if symbols.get(&hatted).is_some() {
            return Err(DesugarError::Collision(hatted));
        }
        symbols.declare(&hatted, SymbolKind::Function, *arity)?;
    }
    let copies: Vec<Rule> = rules
        .iter()
        .filter(|r| !is_hatted(&r.function))
        .map(|r| Rule {
            function: hat_name(&r.function).into(),
            params: r.params.clone(),
            rhs: rrt_expr(&r.rhs),
        })
        .collect();
    let mut all = rules;
    all.extend(copies);
    Ok(Program::new(all, symbols)?)
}

/// Desugars a goal. When it contains `rrt`, the program is extended with
/// its hatted copies (unless it already has them).
pub fn desugar_rrt(e: &Surface, p: &Program) -> Result<(Expr, Program), DesugarError> {
    let goal = desugar_rt(e);
    if e.contains_rrt() && !p.has_hatted_copies() {
        Ok((goal, rrt_transform(p)?))
    } else {
        Ok((goal, p.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{load_with_prelude, parse_expr, parse_program};

    const COIN: &str = "coin -> 0\ncoin -> 1\nf(X) -> g(X, coin)\ng(X,Y) -> (X,X,Y,Y)";

    fn coin_program() -> Program {
        desugar_program(&parse_program(COIN).unwrap()).unwrap()
    }

    fn surface(text: &str, p: &Program) -> Surface {
        parse_expr(text, p.symbols()).unwrap()
    }

    fn coin() -> Expr {
        Expr::call("coin", vec![])
    }

    #[test]
    fn rt_desugaring_clauses() {
        let p = coin_program();
        assert_eq!(desugar_rt(&Surface::Rt(Box::new(Surface::Var("X".into())))), Expr::var("X"));
        assert_eq!(
            desugar_rt(&surface("rt(f(coin))", &p)),
            Expr::call_rt("f", vec![Expr::call_rt("coin", vec![])])
        );
        assert_eq!(desugar_rt(&surface("rt(rt(coin))", &p)), Expr::call_rt("coin", vec![]));
        assert_eq!(desugar_rt(&surface("f(coin)", &p)), Expr::call("f", vec![coin()]));
    }

    #[test]
    fn rt_desugaring_under_constructor() {
        let sp = parse_program("f(X) -> X\nh(X, Y) -> rt(c(f(X), Y))").unwrap();
        let p = desugar_program(&sp).unwrap();
        let rhs = &p.rules()[1].rhs;
        assert_eq!(
            rhs,
            &Expr::cons("c", vec![Expr::call_rt("f", vec![Expr::var("X")]), Expr::var("Y")])
        );
    }

    #[test]
    fn program_desugaring() {
        let sp = load_with_prelude("letter -> \"a\" | \"b\"\nword -> star(rt(letter))", "g.flp").unwrap();
        let p = desugar_program(&sp).unwrap();
        let word = p.rules_for("word").next().unwrap();
        assert_eq!(word.rhs, Expr::call("star", vec![Expr::call_rt("letter", vec![])]));

        let plain = coin_program();
        assert_eq!(plain.rules()[2].rhs, Expr::call("g", vec![Expr::var("X"), coin()]));

        let sp = parse_program("f(rt(X)) -> X").unwrap();
        assert!(matches!(
            desugar_program(&sp),
            Err(DesugarError::AnnotationInPattern { .. })
        ));
    }

    #[test]
    fn hatted_copies_of_the_coin_program() {
        let p = coin_program();
        let q = rrt_transform(&p).unwrap();
        assert_eq!(&q.rules()[..4], p.rules());
        let hat = |f: &str| hat_name(f);
        let copies: Vec<(String, Expr)> = q.rules()[4..]
            .iter()
            .map(|r| (r.function.to_string(), r.rhs.clone()))
            .collect();
        assert_eq!(
            copies,
            vec![
                (hat("coin"), Expr::nat(0)),
                (hat("coin"), Expr::nat(1)),
                (
                    hat("f"),
                    Expr::call_rt(&hat("g"), vec![Expr::var("X"), Expr::call_rt(&hat("coin"), vec![])])
                ),
                (
                    hat("g"),
                    Expr::tuple(vec![Expr::var("X"), Expr::var("X"), Expr::var("Y"), Expr::var("Y")])
                ),
            ]
        );
        for rule in &q.rules()[4..] {
            assert!(
                rule.rhs.positions().iter().all(|pos| !matches!(
                    rule.rhs.subterm(&pos.0),
                    Some(Expr::Fun { rt: false, .. })
                )),
                "every call in a hatted body is rt-flagged"
            );
        }
        assert!(matches!(rrt_transform(&q), Err(DesugarError::Collision(_))));
    }

    #[test]
    fn rrt_goals() {
        let p = coin_program();
        let (goal, q) = desugar_rrt(&surface("rrt(f(coin))", &p), &p).unwrap();
        assert_eq!(
            goal,
            Expr::call_rt(&hat_name("f"), vec![Expr::call_rt(&hat_name("coin"), vec![])])
        );
        assert!(q.has_hatted_copies());

        let (goal, q) = desugar_rrt(&surface("rrt(0)", &p), &p).unwrap();
        assert_eq!(goal, Expr::nat(0));
        assert!(q.has_hatted_copies());

        let (goal, _) = desugar_rrt(&surface("rrt(rrt(coin))", &p), &p).unwrap();
        assert_eq!(goal, Expr::call_rt(&hat_name("coin"), vec![]));

        let (goal, q) = desugar_rrt(&surface("f(coin)", &p), &p).unwrap();
        assert_eq!(goal, Expr::call("f", vec![coin()]));
        assert!(!q.has_hatted_copies());

        // Both mixed nestings end up fully hatted and flagged.
        let (a, _) = desugar_rrt(&surface("rt(rrt(f(coin)))", &p), &p).unwrap();
        let (b, _) = desugar_rrt(&surface("rrt(rt(f(coin)))", &p), &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rrt_translation_is_idempotent_and_keeps_shells() {
        let e = Expr::cons("c", vec![Expr::call("f", vec![coin()]), Expr::var("X")]);
        let once = rrt_expr(&e);
        assert_eq!(rrt_expr(&once), once);
        assert_eq!(crate::term::shell(&once).unwrap(), crate::term::shell(&e).unwrap());
    }

    #[test]
    fn rrt_inside_a_rule_adds_copies() {
        let sp = parse_program("coin -> 0\ncoin -> 1\nh -> rrt(coin)").unwrap();
        let p = desugar_program(&sp).unwrap();
        assert!(p.has_hatted_copies());
        assert_eq!(p.rules_for(&hat_name("h")).count(), 1);
    }
}
