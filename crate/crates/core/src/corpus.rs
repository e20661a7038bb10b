//! Bundled example programs and the goals used to cross-check engines.

use crate::desugar::desugar_program;
use crate::load::{load_program, LoadError};
use crate::syntax::parse_program;
use crate::term::{Expr, Program, SymbolKind};

pub struct CorpusFile {
    pub name: &'static str,
    pub source: &'static str,
}

pub const FILES: &[CorpusFile] = &[
    CorpusFile {
        name: "coin.flp",
        source: include_str!("../corpus/coin.flp"),
    },
    CorpusFile {
        name: "toy_tests.flp",
        source: include_str!("../corpus/toy_tests.flp"),
    },
    CorpusFile {
        name: "number.flp",
        source: include_str!("../corpus/number.flp"),
    },
    CorpusFile {
        name: "grammar.flp",
        source: include_str!("../corpus/grammar.flp"),
    },
    CorpusFile {
        name: "grammar_full.flp",
        source: include_str!("../corpus/grammar_full.flp"),
    },
];

pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|f| f.name == name).map(|f| f.source)
}

/// Loads a corpus file together with the prelude.
///
/// # Panics
/// If `name` is not a corpus file.
pub fn load(name: &str) -> Result<Program, LoadError> {
    let text = source(name).unwrap_or_else(|| panic!("no corpus file {name}"));
    load_program(text, name)
}

/// A goal with the bounds it is checked under.
#[derive(Clone, Copy, Debug)]
pub struct CorpusGoal {
    pub file: &'static str,
    pub goal: &'static str,
    pub max_steps: usize,
    pub max_states: usize,
}

const fn goal(file: &'static str, goal: &'static str, max_steps: usize) -> CorpusGoal {
    CorpusGoal {
        file,
        goal,
        max_steps,
        max_states: 200_000,
    }
}

const fn infinite(file: &'static str, goal: &'static str, max_states: usize) -> CorpusGoal {
    CorpusGoal {
        file,
        goal,
        max_steps: 30,
        max_states,
    }
}

/// Goals for the engine comparison. Most have finite reduction graphs and
/// are enumerated completely; those built on `repeat` have infinite graphs
/// and are compared within a state budget.
pub const GOALS: &[CorpusGoal] = &[
    goal("coin.flp", "coin", 30),
    goal("coin.flp", "f(coin)", 30),
    goal("coin.flp", "rt(f(coin))", 30),
    goal("coin.flp", "f(rt(coin))", 30),
    goal("coin.flp", "rt(f(coin)) | f(0)", 30),
    goal("coin.flp", "rrt(f(coin))", 30),
    goal("toy_tests.flp", "test1", 30),
    goal("toy_tests.flp", "test2", 30),
    goal("toy_tests.flp", "double(rt(coin))", 30),
    goal("grammar.flp", "letter", 30),
    goal("grammar.flp", "palAux(letter)", 40),
    goal("grammar.flp", "palAux(rt(letter))", 40),
    goal("grammar.flp", "reverse(letter ++ rt(letter))", 40),
    infinite("number.flp", "take(1, repeat(0))", 5_000),
    infinite("number.flp", "take(2, repeat(0))", 5_000),
    infinite("number.flp", "number_shared(1)", 5_000),
    infinite("number.flp", "number_shared(2)", 5_000),
    infinite("number.flp", "number(1)", 5_000),
    infinite("number.flp", "number(2)", 5_000),
];

/// Programs of at most three rules, loaded without the prelude.
pub const SMALL_PROGRAMS: &[(&str, &str)] = &[
    ("dup", "coin -> 0\ncoin -> 1\ndup(X) -> (X, X)"),
    ("nonstrict", "f(X) -> 0\nloop -> loop"),
    ("pattern", "choose -> true\nchoose -> false\nnot(true) -> false"),
    ("pairs", "fst((X, Y)) -> X\nswap((X, Y)) -> (Y, X)\ncoin -> s(0)"),
];

pub fn load_small(source: &str) -> Program {
    desugar_program(&parse_program(source).expect("small corpus parses")).expect("small corpus desugars")
}

/// Every ground expression of depth at most `max_depth` over the symbols of
/// `p`, each function occurrence both plain and rt-flagged.
pub fn ground_terms(p: &Program, max_depth: usize) -> Vec<Expr> {
    let mut symbols: Vec<(String, SymbolKind, usize)> = p
        .symbols()
        .iter()
        .map(|s| (s.name.to_string(), s.kind, s.arity))
        .collect();
    symbols.sort();
    let mut layers: Vec<Vec<Expr>> = vec![Vec::new()];
    for depth in 1..=max_depth {
        let smaller: Vec<Expr> = layers.iter().flatten().cloned().collect();
        let mut layer = Vec::new();
        for (name, kind, arity) in &symbols {
            // Argument tuples with at least one argument of the previous depth.
            let fresh = &layers[depth - 1];
            let tuples = if *arity == 0 {
                if depth == 1 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            } else {
                argument_tuples(&smaller, fresh, *arity)
            };
            for args in tuples {
                match kind {
                    SymbolKind::Constructor => layer.push(Expr::cons(name, args)),
                    SymbolKind::Function => {
                        layer.push(Expr::call(name, args.clone()));
                        layer.push(Expr::call_rt(name, args));
                    }
                }
            }
        }
        layers.push(layer);
    }
    layers.into_iter().flatten().collect()
}

fn argument_tuples(all: &[Expr], fresh: &[Expr], arity: usize) -> Vec<Vec<Expr>> {
    let mut out: Vec<(Vec<Expr>, bool)> = vec![(Vec::new(), false)];
    for _ in 0..arity {
        let mut next = Vec::new();
        for (prefix, has_fresh) in &out {
            for arg in all {
                let mut longer = prefix.clone();
                longer.push(arg.clone());
                next.push((longer, *has_fresh || fresh.contains(arg)));
            }
        }
        out = next;
    }
    out.into_iter().filter(|(_, f)| *f).map(|(args, _)| args).collect()
}
