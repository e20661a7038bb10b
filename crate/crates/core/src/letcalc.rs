//! Let-rewriting: sharing made explicit through `let` bindings.
//!
//! Six rules: (Fapp) applies a program rule under an rt-c-substitution,
//! (LetIn) names an unannotated call or a let found in an argument
//! position, (Bind) substitutes a binding once it is an rt-c-term, (Elim)
//! drops dead bindings, (Flat) floats nested lets out, and (Contx) closes
//! everything under contexts.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::explore::{explore, Exploration, ExploreOptions, SearchBounds};
use crate::term::{
    all_vars, alpha_normalize, apply_subst, free_vars, fresh_var, match_params, rtc_check, Expr,
    Name, Position, Program, Substitution,
};

/// Rule names. The derived order is the priority used for traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetRule {
    Bind,
    Elim,
    Flat,
    LetIn,
    Fapp,
}

impl fmt::Display for LetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LetRule::Bind => "Bind",
            LetRule::Elim => "Elim",
            LetRule::Flat => "Flat",
            LetRule::LetIn => "LetIn",
            LetRule::Fapp => "Fapp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetStep {
    pub rule: LetRule,
    pub position: Position,
    pub result: Expr,
}

/// Every one-step successor of `e`, in position order.
pub fn step_let(e: &Expr, p: &Program) -> Vec<LetStep> {
    let avoid = all_vars(e);
    let mut out = Vec::new();
    for pos in e.positions() {
        let sub = e.subterm(&pos.0).expect("position of e");
        for (rule, replacement) in redexes(sub, p, &avoid) {
            out.push(LetStep {
                rule,
                position: pos.clone(),
                result: e.replace_at(&pos.0, replacement),
            });
        }
    }
    out
}

fn redexes(sub: &Expr, p: &Program, avoid: &BTreeSet<Name>) -> Vec<(LetRule, Expr)> {
    let mut out = Vec::new();
    match sub {
        Expr::Let(x, bound, body) => {
            if rtc_check(bound, false) {
                let theta: Substitution = [(x.clone(), (**bound).clone())].into_iter().collect();
                out.push((LetRule::Bind, apply_subst(body, &theta)));
            }
            if !free_vars(body).contains(x) {
                out.push((LetRule::Elim, (**body).clone()));
            }
            if let Expr::Let(y, inner_bound, inner_body) = &**bound {
                let (y, inner_body) = if free_vars(body).contains(y) {
                    let renamed = fresh_var(y, avoid);
                    let theta: Substitution = [(y.clone(), Expr::Var(renamed.clone()))].into_iter().collect();
                    (renamed, apply_subst(inner_body, &theta))
                } else {
                    (y.clone(), (**inner_body).clone())
                };
                out.push((
                    LetRule::Flat,
                    Expr::Let(
                        y,
                        inner_bound.clone(),
                        Box::new(Expr::Let(x.clone(), Box::new(inner_body), body.clone())),
                    ),
                ));
            }
        }
        Expr::Cons(_, args) | Expr::Fun { args, .. } => {
            for (i, arg) in args.iter().enumerate() {
                if matches!(arg, Expr::Fun { rt: false, .. } | Expr::Let(..)) {
                    let fresh = fresh_var("X", avoid);
                    let mut replaced = sub.clone();
                    if let Expr::Cons(_, args) | Expr::Fun { args, .. } = &mut replaced {
                        args[i] = Expr::Var(fresh.clone());
                    }
                    out.push((LetRule::LetIn, Expr::Let(fresh, Box::new(arg.clone()), Box::new(replaced))));
                }
            }
            if let Expr::Fun { name, args, .. } = sub {
                for rule in p.rules_for(name) {
                    // Right-hand sides have no extra variables and no lets,
                    // so the instance cannot capture anything bound around it.
                    if let Some(theta) = match_params(&rule.params, args, false).expect("arity checked at load") {
                        out.push((LetRule::Fapp, apply_subst(&rule.rhs, &theta)));
                    }
                }
            }
        }
        Expr::Var(_) | Expr::Bottom => {}
    }
    out
}

/// Values found by let-rewriting: reachable states that are c-terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetResult {
    pub values: BTreeSet<Expr>,
    pub incomplete: bool,
    pub states: usize,
}

pub fn enumerate_values_let(e: &Expr, p: &Program, bounds: SearchBounds) -> LetResult {
    enumerate_values_let_with(e, p, bounds, true)
}

/// As [`enumerate_values_let`]; `memoize = false` unfolds the whole
/// derivation tree instead of identifying alpha-equivalent states.
pub fn enumerate_values_let_with(e: &Expr, p: &Program, bounds: SearchBounds, memoize: bool) -> LetResult {
    let mut options = ExploreOptions::new(bounds);
    options.memoize = memoize;
    let ex = let_graph_with(e, p, options);
    LetResult {
        values: ex.states.iter().filter(|s| s.is_cterm()).cloned().collect(),
        incomplete: ex.incomplete,
        states: ex.states.len(),
    }
}

pub fn let_graph(e: &Expr, p: &Program, bounds: SearchBounds) -> Exploration<LetRule> {
    let mut options = ExploreOptions::new(bounds);
    options.record_edges = true;
    let_graph_with(e, p, options)
}

fn let_graph_with(e: &Expr, p: &Program, options: ExploreOptions) -> Exploration<LetRule> {
    explore(alpha_normalize(e), options, |state| {
        step_let(state, p)
            .into_iter()
            .map(|s| (s.rule, alpha_normalize(&s.result)))
            .collect()
    })
}

/// A single let-rewriting derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub start: Expr,
    pub steps: Vec<LetStep>,
}

impl Derivation {
    pub fn end(&self) -> &Expr {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn rules(&self) -> Vec<LetRule> {
        self.steps.iter().map(|s| s.rule).collect()
    }
}

impl fmt::Display for Derivation {
    /// One line per step: `k. [Rule@position] expr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.steps.iter().enumerate() {
            writeln!(f, "{}. [{}@{}] {}", k + 1, step.rule, step.position, step.result)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("no derivation reaches {target} within the search bounds")]
    TargetNotReached { target: Expr },
    #[error("the derivation stopped at a non-value after {} steps", partial.steps.len())]
    Stuck { partial: Derivation },
    #[error("the derivation hit the step bound before reaching a value")]
    OutOfSteps { partial: Derivation },
}

/// Demand order of positions: outermost first, left to right, a let body
/// before its binding.
fn demand_order(e: &Expr) -> HashMap<Position, usize> {
    fn go(e: &Expr, here: &mut Vec<usize>, out: &mut HashMap<Position, usize>) {
        let next = out.len();
        out.insert(Position(here.clone()), next);
        let mut children: Vec<(usize, &Expr)> = e.children().into_iter().enumerate().collect();
        if matches!(e, Expr::Let(..)) {
            children.reverse();
        }
        for (i, child) in children {
            here.push(i);
            go(child, here, out);
            here.pop();
        }
    }
    let mut out = HashMap::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// Whether a function symbol sits strictly above `pos`.
fn under_function(e: &Expr, pos: &Position) -> bool {
    let mut node = e;
    for &i in &pos.0 {
        if matches!(node, Expr::Fun { .. }) {
            return true;
        }
        node = node.children()[i];
    }
    false
}

/// Successors ordered by the demonstration strategy: rule priority
/// (Bind, Elim, Flat, LetIn, Fapp), then demand order, then program
/// order. Arguments of calls are reached through (LetIn) rather than
/// rewritten in place, unless nothing else applies.
fn strategy_steps(e: &Expr, p: &Program, lazy: bool) -> Vec<LetStep> {
    let order = demand_order(e);
    let mut steps = step_let(e, p);
    if lazy {
        let preferred: Vec<LetStep> = steps
            .iter()
            .filter(|s| s.rule != LetRule::Fapp || !under_function(e, &s.position))
            .cloned()
            .collect();
        if !preferred.is_empty() {
            steps = preferred;
        }
    }
    // Stable sort keeps program order among alternatives at one position.
    steps.sort_by_key(|s| (s.rule, order[&s.position]));
    steps
}

/// Without a target, follows the strategy's first choice until a value.
/// With a target, returns a shortest strategy derivation reaching it,
/// ties broken by strategy order; if the strategy cannot reach it, a
/// shortest derivation in the full relation.
pub fn trace_derivation(
    e: &Expr,
    p: &Program,
    bounds: SearchBounds,
    target: Option<&Expr>,
) -> Result<Derivation, TraceError> {
    match target {
        None => greedy_trace(e, p, bounds),
        Some(t) => targeted_trace(e, p, bounds, t, true).or_else(|_| targeted_trace(e, p, bounds, t, false)),
    }
}

fn greedy_trace(e: &Expr, p: &Program, bounds: SearchBounds) -> Result<Derivation, TraceError> {
    let mut derivation = Derivation {
        start: e.clone(),
        steps: Vec::new(),
    };
    loop {
        let current = derivation.end();
        if current.is_cterm() {
            return Ok(derivation);
        }
        if derivation.steps.len() >= bounds.max_steps() {
            return Err(TraceError::OutOfSteps { partial: derivation });
        }
        match strategy_steps(current, p, true).into_iter().next() {
            Some(step) => derivation.steps.push(step),
            None => return Err(TraceError::Stuck { partial: derivation }),
        }
    }
}

fn targeted_trace(
    e: &Expr,
    p: &Program,
    bounds: SearchBounds,
    target: &Expr,
    lazy: bool,
) -> Result<Derivation, TraceError> {
    // Nodes hold the raw state (names as generated) and the step that led there.
    let mut nodes: Vec<(Expr, Option<(usize, LetStep)>)> = vec![(e.clone(), None)];
    let mut seen: HashMap<Expr, usize> = HashMap::from([(alpha_normalize(e), 0)]);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut found = (e == target).then_some(0);
    while let (None, Some((id, depth))) = (found, queue.pop_front()) {
        if depth >= bounds.max_steps() {
            continue;
        }
        for step in strategy_steps(&nodes[id].0, p, lazy) {
            let key = alpha_normalize(&step.result);
            if seen.contains_key(&key) {
                continue;
            }
            if nodes.len() >= bounds.max_states() {
                return Err(TraceError::TargetNotReached { target: target.clone() });
            }
            let child = nodes.len();
            seen.insert(key, child);
            let hit = step.result == *target;
            nodes.push((step.result.clone(), Some((id, step))));
            queue.push_back((child, depth + 1));
            if hit {
                found = Some(child);
                break;
            }
        }
    }
    let Some(mut cursor) = found else {
        return Err(TraceError::TargetNotReached { target: target.clone() });
    };
    let mut steps = Vec::new();
    while let Some((parent, step)) = nodes[cursor].1.clone() {
        steps.push(step);
        cursor = parent;
    }
    steps.reverse();
    Ok(Derivation {
        start: e.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desugar::desugar_program;
    use crate::syntax::{load_with_prelude, parse_program};
    use crate::term::binder_list;

    const COIN: &str = "coin -> 0\ncoin -> 1\nf(X) -> g(X, coin)\ng(X,Y) -> (X,X,Y,Y)";

    fn program(text: &str) -> Program {
        desugar_program(&parse_program(text).unwrap()).unwrap()
    }

    fn coin() -> Expr {
        Expr::call("coin", vec![])
    }

    fn coin_rt() -> Expr {
        Expr::call_rt("coin", vec![])
    }

    fn has(steps: &[LetStep], rule: LetRule, result: &Expr) -> bool {
        steps.iter().any(|s| s.rule == rule && s.result == *result)
    }

    #[test]
    fn example_one_steps() {
        let p = program(COIN);
        let g = Expr::call("g", vec![coin_rt(), coin()]);
        let s1 = Expr::let_in("X", coin(), Expr::call("g", vec![coin_rt(), Expr::var("X")]));
        assert!(has(&step_let(&g, &p), LetRule::LetIn, &s1));

        let s2 = Expr::let_in(
            "X",
            coin(),
            Expr::tuple(vec![coin_rt(), coin_rt(), Expr::var("X"), Expr::var("X")]),
        );
        let steps = step_let(&s1, &p);
        assert!(has(&steps, LetRule::Fapp, &s2));
        assert!(steps.iter().any(|s| s.rule == LetRule::Fapp && s.position == Position(vec![1])));

        let bound = Expr::let_in(
            "X",
            Expr::nat(0),
            Expr::tuple(vec![Expr::nat(0), Expr::nat(1), Expr::var("X"), Expr::var("X")]),
        );
        let value = Expr::tuple(vec![Expr::nat(0), Expr::nat(1), Expr::nat(0), Expr::nat(0)]);
        assert!(has(&step_let(&bound, &p), LetRule::Bind, &value));
    }

    #[test]
    fn elim_and_flat() {
        let p = program(COIN);
        let dead = Expr::let_in("X", coin(), Expr::nat(0));
        assert!(has(&step_let(&dead, &p), LetRule::Elim, &Expr::nat(0)));

        let nested = Expr::let_in(
            "X",
            Expr::let_in("Y", coin(), Expr::cons("c", vec![Expr::var("Y")])),
            Expr::cons("d", vec![Expr::var("X")]),
        );
        let flat = Expr::let_in(
            "Y",
            coin(),
            Expr::let_in("X", Expr::cons("c", vec![Expr::var("Y")]), Expr::cons("d", vec![Expr::var("X")])),
        );
        assert!(has(&step_let(&nested, &p), LetRule::Flat, &flat));
    }

    #[test]
    fn flat_renames_a_clashing_inner_binder() {
        let p = program(COIN);
        // let X = (let Y = coin in Y) in c(X, Y): Y is free in the body.
        let e = Expr::let_in(
            "X",
            Expr::let_in("Y", coin(), Expr::var("Y")),
            Expr::cons("c", vec![Expr::var("X"), Expr::var("Y")]),
        );
        let flat = step_let(&e, &p).into_iter().find(|s| s.rule == LetRule::Flat).unwrap();
        assert_eq!(free_vars(&flat.result), free_vars(&e));
        match &flat.result {
            Expr::Let(y, _, inner) => {
                assert_ne!(&**y, "Y");
                assert_eq!(**inner, Expr::let_in("X", Expr::Var(y.clone()), Expr::cons("c", vec![Expr::var("X"), Expr::var("Y")])));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bind_only_for_rt_c_terms() {
        let p = program(COIN);
        let shared = Expr::let_in("X", coin(), Expr::tuple(vec![Expr::var("X"), Expr::var("X")]));
        assert!(step_let(&shared, &p).iter().all(|s| s.rule != LetRule::Bind));
        let copyable = Expr::let_in("X", coin_rt(), Expr::tuple(vec![Expr::var("X"), Expr::var("X")]));
        assert!(has(
            &step_let(&copyable, &p),
            LetRule::Bind,
            &Expr::tuple(vec![coin_rt(), coin_rt()])
        ));
    }

    #[test]
    fn letin_extracts_from_rt_applications() {
        let p = program("coin -> 0\ncoin -> 1\ng(X) -> (X, X)");
        let e = Expr::call_rt("g", vec![coin()]);
        let steps = step_let(&e, &p);
        assert!(has(
            &steps,
            LetRule::LetIn,
            &Expr::let_in("X", coin(), Expr::call_rt("g", vec![Expr::var("X")]))
        ));
        // rt-flagged calls are copied, never named.
        let e = Expr::call("g", vec![coin_rt()]);
        assert!(step_let(&e, &p).iter().all(|s| s.rule != LetRule::LetIn));
    }

    fn eight_tuples() -> BTreeSet<Expr> {
        let mut out = BTreeSet::new();
        for a in 0..2 {
            for b in 0..2 {
                for v in 0..2 {
                    out.insert(Expr::tuple(vec![Expr::nat(a), Expr::nat(b), Expr::nat(v), Expr::nat(v)]));
                }
            }
        }
        out
    }

    #[test]
    fn example_one_values() {
        let p = program(COIN);
        let r = enumerate_values_let(&Expr::call_rt("f", vec![coin_rt()]), &p, SearchBounds::default());
        assert!(!r.incomplete);
        assert_eq!(r.values, eight_tuples());
    }

    #[test]
    fn double_coin_never_yields_one() {
        let sp = load_with_prelude("coin -> 0\ncoin -> 1", "t.flp").unwrap();
        let p = desugar_program(&sp).unwrap();
        let r = enumerate_values_let(&Expr::call("double", vec![coin()]), &p, SearchBounds::default());
        assert_eq!(r.values, BTreeSet::from([Expr::nat(0), Expr::nat(2)]));
    }

    #[test]
    fn memoization_does_not_change_values() {
        let p = program(COIN);
        let goal = Expr::call_rt("f", vec![coin_rt()]);
        let bounds = SearchBounds::new(30, 2_000_000).unwrap();
        let with = enumerate_values_let_with(&goal, &p, bounds, true);
        let without = enumerate_values_let_with(&goal, &p, bounds, false);
        assert!(!without.incomplete);
        assert_eq!(with.values, without.values);
        assert!(without.states > with.states);
    }

    #[test]
    fn targeted_trace_of_example_one() {
        let p = program(COIN);
        let target = Expr::tuple(vec![Expr::nat(0), Expr::nat(1), Expr::nat(0), Expr::nat(0)]);
        let d = trace_derivation(&Expr::call_rt("f", vec![coin_rt()]), &p, SearchBounds::default(), Some(&target)).unwrap();
        assert_eq!(d.steps.len(), 7, "{d}");
        assert_eq!(d.end(), &target);
        let rules = d.rules();
        assert_eq!(rules[0], LetRule::Fapp);
        assert_eq!(rules[1], LetRule::LetIn);
        assert_eq!(rules.iter().filter(|r| **r == LetRule::Fapp).count(), 5);
        assert_eq!(rules.iter().filter(|r| **r == LetRule::Bind).count(), 1);
        assert_eq!(
            d.steps[1].result,
            Expr::let_in("X", coin(), Expr::call("g", vec![coin_rt(), Expr::var("X")]))
        );
        let lines: Vec<String> = d.steps.iter().map(|s| s.result.to_string()).collect();
        assert_eq!(
            lines,
            [
                "g(coin^rt, coin)",
                "let X = coin in g(coin^rt, X)",
                "let X = coin in (coin^rt, coin^rt, X, X)",
                "let X = coin in (0, coin^rt, X, X)",
                "let X = coin in (0, 1, X, X)",
                "let X = 0 in (0, 1, X, X)",
                "(0, 1, 0, 0)",
            ]
        );
        let text = d.to_string();
        assert!(text.starts_with("1. [Fapp@ε] g(coin^rt, coin)\n2. [LetIn@ε] let X = coin in g(coin^rt, X)\n"), "{text}");
        assert!(text.ends_with("7. [Bind@ε] (0, 1, 0, 0)\n"), "{text}");
    }

    #[test]
    fn trivial_and_failing_traces() {
        let p = program(COIN);
        let d = trace_derivation(&Expr::nat(0), &p, SearchBounds::default(), None).unwrap();
        assert!(d.steps.is_empty());

        let sp = load_with_prelude("coin -> 0\ncoin -> 1", "t.flp").unwrap();
        let p = desugar_program(&sp).unwrap();
        let goal = Expr::call("double", vec![coin()]);
        let err = trace_derivation(&goal, &p, SearchBounds::default(), Some(&Expr::nat(1))).unwrap_err();
        assert!(matches!(err, TraceError::TargetNotReached { .. }));
        let d = trace_derivation(&goal, &p, SearchBounds::default(), None).unwrap();
        assert_eq!(d.end(), &Expr::nat(0));
    }

    #[test]
    fn successors_keep_binders_distinct() {
        let p = program(COIN);
        let mut frontier = vec![Expr::call("f", vec![Expr::call("f", vec![coin()])])];
        for _ in 0..6 {
            let mut next = Vec::new();
            for e in &frontier {
                for s in step_let(e, &p) {
                    let binders = binder_list(&s.result);
                    let distinct: BTreeSet<_> = binders.iter().collect();
                    assert_eq!(distinct.len(), binders.len(), "{}", s.result);
                    assert!(free_vars(&s.result).is_subset(&free_vars(e)));
                    next.push(s.result);
                }
            }
            next.truncate(50);
            frontier = next;
        }
    }
}
