//! Concrete syntax: programs, goals, pretty printing and the prelude.
//!
//! Rules are written one per line as `f(p1, ..., pn) -> e`, with `%` line
//! comments and an optional trailing `.`. Uppercase-initial identifiers
//! are variables. Any symbol heading a rule is a function; every other
//! lowercase symbol is a constructor whose arity is fixed by its first use.

mod lexer;
mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{is_tuple_name, Expr, Name, SymbolKind, SymbolTable};
use parser::{Parser, Raw, RawRule};

pub use print::{display_symbol, print_expr, print_surface};

/// Source text of the bundled prelude.
pub const PRELUDE: &str = include_str!("../prelude.flp");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{origin}:{line}:{col}: {message}")]
pub struct Diagnostic {
    pub origin: Arc<str>,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Diagnostics {
    pub fn messages(&self) -> Vec<&str> {
        self.0.iter().map(|d| d.message.as_str()).collect()
    }
}

/// An expression that may still carry `rt(..)` / `rrt(..)` annotations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    Var(Name),
    Cons(Name, Vec<Surface>),
    Fun { name: Name, rt: bool, args: Vec<Surface> },
    Rt(Box<Surface>),
    Rrt(Box<Surface>),
}

impl Surface {
    pub fn contains_rrt(&self) -> bool {
        match self {
            Surface::Rrt(_) => true,
            Surface::Var(_) => false,
            Surface::Rt(e) => e.contains_rrt(),
            Surface::Cons(_, args) | Surface::Fun { args, .. } => args.iter().any(Surface::contains_rrt),
        }
    }

    pub fn contains_annotation(&self) -> bool {
        match self {
            Surface::Rrt(_) | Surface::Rt(_) => true,
            Surface::Var(_) => false,
            Surface::Cons(_, args) | Surface::Fun { args, .. } => {
                args.iter().any(Surface::contains_annotation)
            }
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Surface::Var(x) => {
                out.insert(x.clone());
            }
            Surface::Rt(e) | Surface::Rrt(e) => e.vars(out),
            Surface::Cons(_, args) | Surface::Fun { args, .. } => {
                args.iter().for_each(|a| a.vars(out))
            }
        }
    }
}

impl From<&Expr> for Surface {
    /// Embeds a core expression; `Let` and ⊥ have no surface form and panic.
    fn from(e: &Expr) -> Self {
        match e {
            Expr::Var(x) => Surface::Var(x.clone()),
            Expr::Cons(c, args) => Surface::Cons(c.clone(), args.iter().map(Surface::from).collect()),
            Expr::Fun { name, rt, args } => Surface::Fun {
                name: name.clone(),
                rt: *rt,
                args: args.iter().map(Surface::from).collect(),
            },
            Expr::Let(..) | Expr::Bottom => panic!("no surface syntax for {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceRule {
    pub function: Name,
    pub params: Vec<Surface>,
    pub rhs: Surface,
    pub origin: Arc<str>,
    pub loc: Loc,
}

/// A loaded but not yet desugared program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub rules: Vec<SourceRule>,
    pub symbols: SymbolTable,
}

struct Unit {
    origin: Arc<str>,
    rules: Vec<RawRule>,
}

fn parse_unit(text: &str, origin: &str) -> Result<Unit, Diagnostics> {
    let tokens = lexer::tokenize(text, origin).map_err(|d| Diagnostics(vec![d]))?;
    let (rules, diags) = Parser::new(&tokens, origin).program();
    if diags.is_empty() {
        Ok(Unit {
            origin: origin.into(),
            rules,
        })
    } else {
        Err(Diagnostics(diags))
    }
}

/// Parses a standalone program (no prelude).
pub fn parse_program(text: &str) -> Result<SourceProgram, Diagnostics> {
    parse_program_named(text, "<input>")
}

pub fn parse_program_named(text: &str, origin: &str) -> Result<SourceProgram, Diagnostics> {
    resolve_units(&[parse_unit(text, origin)?])
}

/// The prelude on its own.
pub fn load_prelude() -> SourceProgram {
    parse_program_named(PRELUDE, "<prelude>").expect("the bundled prelude is well formed")
}

/// Parses `text` together with the prelude, which comes first.
pub fn load_with_prelude(text: &str, origin: &str) -> Result<SourceProgram, Diagnostics> {
    let prelude = parse_unit(PRELUDE, "<prelude>").expect("the bundled prelude is well formed");
    let user = parse_unit(text, origin)?;
    resolve_units(&[prelude, user])
}

/// Parses a ground goal expression against a program's symbols.
pub fn parse_expr(text: &str, symbols: &SymbolTable) -> Result<Surface, Diagnostics> {
    let origin = "<goal>";
    let tokens = lexer::tokenize(text, origin).map_err(|d| Diagnostics(vec![d]))?;
    let raw = Parser::new(&tokens, origin)
        .goal()
        .map_err(|d| Diagnostics(vec![d]))?;
    let mut symbols = symbols.clone();
    let mut cx = Resolver {
        symbols: &mut symbols,
        origin: origin.into(),
        diags: Vec::new(),
        mode: Mode::Goal,
    };
    let goal = cx.resolve(&raw, None);
    if cx.diags.is_empty() {
        Ok(goal)
    } else {
        Err(Diagnostics(cx.diags))
    }
}

/// Constructors introduced by literal sugar, with their arities.
pub fn builtin_constructor_arity(name: &str) -> Option<usize> {
    match name {
        "z" | "nil" | "()" => Some(0),
        "s" => Some(1),
        "cons" => Some(2),
        n if is_tuple_name(n) => Some(n.len() - 1),
        n if n.starts_with('\'') => Some(0),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Pattern,
    Rhs,
    Goal,
}

struct Resolver<'s> {
    symbols: &'s mut SymbolTable,
    origin: Arc<str>,
    diags: Vec<Diagnostic>,
    mode: Mode,
}

impl Resolver<'_> {
    fn error(&mut self, loc: Loc, message: String) {
        self.diags.push(Diagnostic {
            origin: self.origin.clone(),
            line: loc.line,
            col: loc.col,
            message,
        });
    }

    /// `scope` lists the variables a right-hand side may mention.
    fn resolve(&mut self, raw: &Raw, scope: Option<&BTreeSet<Name>>) -> Surface {
        match raw {
            Raw::Var(x, loc) => {
                match self.mode {
                    Mode::Goal => self.error(*loc, format!("free variable `{x}` in goal")),
                    Mode::Rhs if !scope.is_some_and(|s| s.contains(x.as_str())) => self.error(
                        *loc,
                        format!("variable `{x}` in the right-hand side does not occur in the rule head"),
                    ),
                    _ => {}
                }
                Surface::Var(x.as_str().into())
            }
            Raw::Rt(inner, _) => Surface::Rt(Box::new(self.resolve(inner, scope))),
            Raw::Rrt(inner, _) => Surface::Rrt(Box::new(self.resolve(inner, scope))),
            Raw::App { name, rt_mark, args, loc } => {
                let args: Vec<Surface> = args.iter().map(|a| self.resolve(a, scope)).collect();
                let name_ref = name.as_str();
                if self.symbols.is_function(name_ref) {
                    let arity = self.symbols.get(name_ref).map(|i| i.arity).unwrap_or(0);
                    if self.mode == Mode::Pattern {
                        self.error(*loc, format!("function symbol `{name}` in a pattern"));
                    } else if arity != args.len() {
                        self.error(
                            *loc,
                            format!("`{name}` expects {arity} arguments, got {}", args.len()),
                        );
                    }
                    return Surface::Fun {
                        name: name_ref.into(),
                        rt: *rt_mark,
                        args,
                    };
                }
                if *rt_mark {
                    self.error(*loc, format!("constructor `{name}` cannot carry `^rt`"));
                }
                let builtin = builtin_constructor_arity(name_ref);
                if let Some(arity) = builtin {
                    if arity != args.len() {
                        self.error(*loc, format!("`{name}` expects {arity} arguments, got {}", args.len()));
                    }
                }
                if self.mode == Mode::Goal {
                    match self.symbols.get(name_ref) {
                        Some(info) if info.arity != args.len() => {
                            let arity = info.arity;
                            self.error(*loc, format!("`{name}` expects {arity} arguments, got {}", args.len()))
                        }
                        Some(_) => {}
                        None if builtin.is_some() => {}
                        None => self.error(*loc, format!("unknown symbol `{name}`")),
                    }
                } else if let Err(e) = self.symbols.declare(name_ref, SymbolKind::Constructor, args.len()) {
                    self.error(*loc, e.to_string());
                }
                Surface::Cons(name_ref.into(), args)
            }
        }
    }
}

fn resolve_units(units: &[Unit]) -> Result<SourceProgram, Diagnostics> {
    let mut symbols = SymbolTable::new();
    let mut diags = Vec::new();

    // Function heads first, so rules may call functions defined further down.
    let mut heads: Vec<Option<(Name, &[Raw])>> = Vec::new();
    for unit in units {
        for rule in &unit.rules {
            let head = match &rule.lhs {
                Raw::App { name, rt_mark: false, args, .. }
                    if builtin_constructor_arity(name).is_none() =>
                {
                    match symbols.declare(name, SymbolKind::Function, args.len()) {
                        Ok(()) => Some((Name::from(name.as_str()), args.as_slice())),
                        Err(_) => {
                            let arity = symbols.get(name).map(|i| i.arity).unwrap_or(0);
                            diags.push(Diagnostic {
                                origin: unit.origin.clone(),
                                line: rule.loc.line,
                                col: rule.loc.col,
                                message: format!(
                                    "function `{name}` defined with {} parameters but its first rule has {arity}",
                                    args.len()
                                ),
                            });
                            None
                        }
                    }
                }
                other => {
                    let loc = other.loc();
                    diags.push(Diagnostic {
                        origin: unit.origin.clone(),
                        line: loc.line,
                        col: loc.col,
                        message: "a rule head must be a function symbol applied to patterns".into(),
                    });
                    None
                }
            };
            heads.push(head);
        }
    }

    let mut rules = Vec::new();
    let mut heads = heads.into_iter();
    for unit in units {
        for rule in &unit.rules {
            let Some((function, raw_params)) = heads.next().flatten() else {
                continue;
            };
            let mut cx = Resolver {
                symbols: &mut symbols,
                origin: unit.origin.clone(),
                diags: Vec::new(),
                mode: Mode::Pattern,
            };
            let params: Vec<Surface> = raw_params.iter().map(|p| cx.resolve(p, None)).collect();
            let mut seen = BTreeSet::new();
            for p in raw_params {
                check_linear(p, &mut seen, &mut cx);
            }
            cx.mode = Mode::Rhs;
            let rhs = cx.resolve(&rule.rhs, Some(&seen));
            diags.append(&mut cx.diags);
            rules.push(SourceRule {
                function,
                params,
                rhs,
                origin: unit.origin.clone(),
                loc: rule.loc,
            });
        }
    }

    if diags.is_empty() {
        Ok(SourceProgram { rules, symbols })
    } else {
        Err(Diagnostics(diags))
    }
}

fn check_linear(p: &Raw, seen: &mut BTreeSet<Name>, cx: &mut Resolver<'_>) {
    match p {
        Raw::Var(x, loc) => {
            if !seen.insert(x.as_str().into()) {
                cx.error(*loc, format!("variable `{x}` occurs more than once in the rule head"));
            }
        }
        Raw::Rt(inner, _) | Raw::Rrt(inner, _) => check_linear(inner, seen, cx),
        Raw::App { args, .. } => args.iter().for_each(|a| check_linear(a, seen, cx)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SymbolKind;
    use proptest::prelude::*;

    const COIN: &str = "coin -> 0\ncoin -> 1\nf(X) -> g(X, coin)\ng(X,Y) -> (X,X,Y,Y)";

    fn cterm(raw: &Surface) -> Expr {
        match raw {
            Surface::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(cterm).collect()),
            Surface::Fun { name, rt, args } => Expr::Fun {
                name: name.clone(),
                rt: *rt,
                args: args.iter().map(cterm).collect(),
            },
            Surface::Var(x) => Expr::Var(x.clone()),
            other => panic!("annotation in {other:?}"),
        }
    }

    #[test]
    fn coin_program_loads() {
        let p = parse_program(COIN).unwrap();
        assert_eq!(p.rules.len(), 4);
        for f in ["coin", "f", "g"] {
            assert!(p.symbols.is_function(f), "{f}");
        }
        assert_eq!(p.symbols.get("g").unwrap().arity, 2);
        assert!(p.symbols.is_constructor("(,,,)"));
        assert_eq!(p.rules[3].rhs, Surface::Cons("(,,,)".into(), vec![
            Surface::Var("X".into()), Surface::Var("X".into()),
            Surface::Var("Y".into()), Surface::Var("Y".into()),
        ]));
    }

    #[test]
    fn infix_alternative_heads() {
        let p = parse_program("X | Y -> X\nX | Y -> Y.").unwrap();
        assert_eq!(p.rules.len(), 2);
        assert!(p.rules.iter().all(|r| &*r.function == "alt"));
        assert_eq!(p.symbols.get("alt").unwrap().kind, SymbolKind::Function);
    }

    #[test]
    fn load_errors() {
        let err = parse_program("g(X) -> X\nf(g(X)) -> X").unwrap_err();
        assert!(err.messages()[0].contains("function symbol `g` in a pattern"), "{err}");

        let err = parse_program("f(X, X) -> X").unwrap_err();
        assert!(err.messages()[0].contains("more than once"), "{err}");

        let err = parse_program("f(X) -> Y").unwrap_err();
        assert!(err.messages()[0].contains("`Y`"), "{err}");

        let err = parse_program("f(X) -> c(X)\ng -> c(0, 1)").unwrap_err();
        assert!(err.messages()[0].contains("arity"), "{err}");

        let err = parse_program("f(X) -> X\nf(X, Y) -> X").unwrap_err();
        assert!(err.messages()[0].contains("first rule"), "{err}");

        let err = parse_program("f(X) -> (X,\n").unwrap_err();
        assert_eq!(err.0[0].line, 1);

        let err = parse_program("f -> 0\n0 -> f").unwrap_err();
        assert_eq!(err.0[0].line, 2);
    }

    #[test]
    fn goals() {
        let p = parse_program(COIN).unwrap();
        let goal = parse_expr("rt(f(coin))", &p.symbols).unwrap();
        assert_eq!(
            goal,
            Surface::Rt(Box::new(Surface::Fun {
                name: "f".into(),
                rt: false,
                args: vec![Surface::Fun { name: "coin".into(), rt: false, args: vec![] }],
            }))
        );
        let marked = parse_expr("f^rt(coin^rt)", &p.symbols).unwrap();
        assert_eq!(cterm(&marked), Expr::call_rt("f", vec![Expr::call_rt("coin", vec![])]));

        let err = parse_expr("f(X)", &p.symbols).unwrap_err();
        assert!(err.messages()[0].contains("free variable"));
        let err = parse_expr("h(0)", &p.symbols).unwrap_err();
        assert!(err.messages()[0].contains("unknown symbol"));
        let err = parse_expr("f(coin, coin)", &p.symbols).unwrap_err();
        assert!(err.messages()[0].contains("expects 1"));
    }

    #[test]
    fn numeral_goal_uses_prelude_symbols() {
        let p = load_with_prelude("number(N) -> take(N, repeat(rt(0 | 1 | 2)))", "number.flp").unwrap();
        let goal = parse_expr("number(3)", &p.symbols).unwrap();
        assert_eq!(cterm(&goal), Expr::call("number", vec![Expr::nat(3)]));
    }

    #[test]
    fn literal_sugar() {
        let symbols = SymbolTable::new();
        let three = parse_expr("3", &symbols).unwrap();
        assert_eq!(cterm(&three), Expr::nat(3));
        let s = parse_expr("\"ab\"", &symbols).unwrap();
        assert_eq!(cterm(&s), Expr::list(vec![Expr::atom("'a'"), Expr::atom("'b'")]));
        let l = parse_expr("[0, 1 | []]", &symbols).unwrap();
        assert_eq!(cterm(&l), Expr::list(vec![Expr::nat(0), Expr::nat(1)]));
    }

    #[test]
    fn printing() {
        let t = Expr::tuple(vec![Expr::nat(0), Expr::nat(1), Expr::nat(0), Expr::nat(0)]);
        assert_eq!(print_expr(&t), "(0, 1, 0, 0)");
        let l = Expr::list(vec![Expr::atom("a"), Expr::atom("b")]);
        assert_eq!(print_expr(&l), "[a, b]");
        let s = Expr::list(vec![Expr::atom("'a'"), Expr::atom("'b'")]);
        assert_eq!(print_expr(&s), "\"ab\"");
        assert_eq!(print_expr(&Expr::nat(2)), "2");
        assert_eq!(print_expr(&Expr::Bottom), "_|_");
        assert_eq!(
            print_expr(&Expr::call_rt("f", vec![Expr::call_rt("coin", vec![])])),
            "f^rt(coin^rt)"
        );
        assert_eq!(
            print_expr(&Expr::call_rt("coin$rrt", vec![])),
            "c\u{302}oin^rt"
        );
        assert_eq!(
            print_expr(&Expr::let_in("X", Expr::call("coin", vec![]), Expr::var("X"))),
            "let X = coin in X"
        );
        assert_eq!(print_expr(&Expr::cons("s", vec![Expr::Bottom])), "s(_|_)");
        assert_eq!(
            print_expr(&Expr::cons("cons", vec![Expr::nat(0), Expr::Bottom])),
            "[0 | _|_]"
        );
    }

    #[test]
    fn prelude_is_well_formed() {
        let p = load_prelude();
        for f in ["concat", "reverse", "alt", "star", "take", "repeat", "add", "double"] {
            assert!(p.symbols.is_function(f), "{f}");
        }
        let star: Vec<_> = p.rules.iter().filter(|r| &*r.function == "star").collect();
        assert_eq!(star.len(), 2);
        assert_eq!(star[0].rhs, Surface::Cons("nil".into(), vec![]));
    }

    fn arb_value() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0usize..4).prop_map(Expr::nat),
            Just(Expr::atom("a")),
            Just(Expr::atom("nil")),
            Just(Expr::atom("'x'")),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..3).prop_map(Expr::list),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Expr::tuple),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::cons("c", vec![a, b])),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(v in arb_value()) {
            let mut symbols = SymbolTable::new();
            symbols.declare("a", SymbolKind::Constructor, 0).unwrap();
            symbols.declare("c", SymbolKind::Constructor, 2).unwrap();
            let text = print_expr(&v);
            let back = parse_expr(&text, &symbols).unwrap();
            prop_assert_eq!(cterm(&back), v);
        }
    }
}
