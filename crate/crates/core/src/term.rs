//! Terms, programs, substitutions and the approximation order.
//!
//! This is the vocabulary every engine shares. Expressions are plain
//! trees; sharing is only ever expressed through `Let` (let-rewriting) or
//! through the suspension store (the demand-driven engine).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;

/// Suffix reserved for the function copies introduced by the `rrt`
/// transformation. `$` cannot be written in source programs.
pub const HAT_SUFFIX: &str = "$rrt";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("arity mismatch: {patterns} patterns against {args} arguments")]
    Arity { patterns: usize, args: usize },
    #[error("invalid program: {0}")]
    InvalidProgram(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Constructor,
    Function,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: Name,
    pub kind: SymbolKind,
    pub arity: usize,
}

/// Signature of a program. A name has exactly one kind and one arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: BTreeMap<Name, SymbolInfo>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `name`, or checks it against the existing entry.
    pub fn declare(&mut self, name: &str, kind: SymbolKind, arity: usize) -> Result<(), TermError> {
        match self.entries.get(name) {
            Some(info) if info.kind != kind => Err(TermError::InvalidProgram(format!(
                "`{name}` is used both as a constructor and as a function"
            ))),
            Some(info) if info.arity != arity => Err(TermError::InvalidProgram(format!(
                "`{name}` is used with arity {arity} but was declared with arity {}",
                info.arity
            ))),
            Some(_) => Ok(()),
            None => {
                let name: Name = name.into();
                self.entries
                    .insert(name.clone(), SymbolInfo { name, kind, arity });
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&SymbolInfo> {
        self.entries.get(name)
    }

    pub fn is_function(&self, name: &str) -> bool {
        matches!(self.get(name), Some(info) if info.kind == SymbolKind::Function)
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        matches!(self.get(name), Some(info) if info.kind == SymbolKind::Constructor)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymbolInfo> {
        self.entries.values()
    }

    pub fn functions(&self) -> impl Iterator<Item = &SymbolInfo> {
        self.iter().filter(|info| info.kind == SymbolKind::Function)
    }
}

/// An expression of the core language.
///
/// `Bottom` only appears in states of the ⊥-calculus, `Let` only in
/// let-rewriting states. Neither is accepted in programs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Name),
    Cons(Name, Vec<Expr>),
    Fun { name: Name, rt: bool, args: Vec<Expr> },
    Let(Name, Box<Expr>, Box<Expr>),
    Bottom,
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.into())
    }

    pub fn cons(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Cons(name.into(), args)
    }

    pub fn atom(name: &str) -> Expr {
        Expr::Cons(name.into(), Vec::new())
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Fun { name: name.into(), rt: false, args }
    }

    pub fn call_rt(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Fun { name: name.into(), rt: true, args }
    }

    pub fn let_in(var: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let(var.into(), Box::new(bound), Box::new(body))
    }

    /// Peano numeral `s(...s(z)...)`.
    pub fn nat(n: usize) -> Expr {
        (0..n).fold(Expr::atom("z"), |acc, _| Expr::cons("s", vec![acc]))
    }

    /// `cons`/`nil` list of the given items.
    pub fn list(items: Vec<Expr>) -> Expr {
        items
            .into_iter()
            .rev()
            .fold(Expr::atom("nil"), |tail, head| Expr::cons("cons", vec![head, tail]))
    }

    /// Tuple constructor; the name encodes the arity, e.g. `(,,)`.
    pub fn tuple(items: Vec<Expr>) -> Expr {
        let name = tuple_name(items.len());
        Expr::Cons(name.into(), items)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) | Expr::Bottom => Vec::new(),
            Expr::Cons(_, args) | Expr::Fun { args, .. } => args.iter().collect(),
            Expr::Let(_, bound, body) => vec![bound, body],
        }
    }

    fn child_mut(&mut self, index: usize) -> Option<&mut Expr> {
        match self {
            Expr::Var(_) | Expr::Bottom => None,
            Expr::Cons(_, args) | Expr::Fun { args, .. } => args.get_mut(index),
            Expr::Let(_, bound, body) => match index {
                0 => Some(bound),
                1 => Some(body),
                _ => None,
            },
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::depth)
            .max()
            .unwrap_or(0)
    }

    /// A c-term: variables and constructors only.
    pub fn is_cterm(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Cons(_, args) => args.iter().all(Expr::is_cterm),
            _ => false,
        }
    }

    /// Variables, constructors and ⊥ only.
    pub fn is_partial_value(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Bottom => true,
            Expr::Cons(_, args) => args.iter().all(Expr::is_partial_value),
            _ => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        free_vars(self).is_empty()
    }

    pub fn contains_let(&self) -> bool {
        matches!(self, Expr::Let(..)) || self.children().into_iter().any(Expr::contains_let)
    }

    pub fn contains_bottom(&self) -> bool {
        matches!(self, Expr::Bottom) || self.children().into_iter().any(Expr::contains_bottom)
    }

    pub fn contains_rt(&self) -> bool {
        matches!(self, Expr::Fun { rt: true, .. })
            || self.children().into_iter().any(Expr::contains_rt)
    }

    pub fn subterm(&self, pos: &[usize]) -> Option<&Expr> {
        pos.iter()
            .try_fold(self, |e, &i| e.children().get(i).copied())
    }

    /// Replaces the subterm at `pos`. Panics if `pos` is not a position of `self`.
    pub fn replace_at(&self, pos: &[usize], new: Expr) -> Expr {
        let mut out = self.clone();
        let mut cursor = &mut out;
        for &i in pos {
            cursor = cursor.child_mut(i).expect("position inside the term");
        }
        *cursor = new;
        out
    }

    /// All positions, parent before children, left to right.
    pub fn positions(&self) -> Vec<Position> {
        fn go(e: &Expr, here: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(here.clone()));
            for (i, child) in e.children().into_iter().enumerate() {
                here.push(i);
                go(child, here, out);
                here.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_expr(self))
    }
}

pub fn tuple_name(arity: usize) -> String {
    format!("({})", ",".repeat(arity.saturating_sub(1)))
}

pub fn is_tuple_name(name: &str) -> bool {
    name.len() >= 3 && name.starts_with('(') && name.ends_with(')') && name[1..name.len() - 1].chars().all(|c| c == ',')
}

pub fn hat_name(function: &str) -> String {
    format!("{function}{HAT_SUFFIX}")
}

pub fn is_hatted(name: &str) -> bool {
    name.ends_with(HAT_SUFFIX)
}

/// A path from the root: child indices, `Let` children are bound (0) and body (1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Applies `step` at every position of `e` and plugs each result back into
/// its context. Results come out in position order.
pub fn rewrite_in_context<L>(
    e: &Expr,
    mut step: impl FnMut(&Expr, &Position) -> Vec<(L, Expr)>,
) -> Vec<(L, Position, Expr)> {
    let mut out = Vec::new();
    for pos in e.positions() {
        let sub = e.subterm(&pos.0).expect("position from positions()");
        for (label, replacement) in step(sub, &pos) {
            let whole = e.replace_at(&pos.0, replacement);
            out.push((label, pos.clone(), whole));
        }
    }
    out
}

/// Rt-c-term check that treats `Let` as a plain non-member.
pub(crate) fn rtc_check(e: &Expr, allow_bottom: bool) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Bottom => allow_bottom,
        Expr::Cons(_, args) | Expr::Fun { rt: true, args, .. } => {
            args.iter().all(|a| rtc_check(a, allow_bottom))
        }
        Expr::Fun { rt: false, .. } | Expr::Let(..) => false,
    }
}

/// Whether `e` may be copied by parameter passing: variables, constructors
/// and rt-flagged applications over such terms (and ⊥ when allowed).
pub fn is_rtcterm(e: &Expr, allow_bottom: bool) -> Result<bool, TermError> {
    if e.contains_let() {
        return Err(TermError::Malformed(
            "let binding in an rt-c-term check".into(),
        ));
    }
    Ok(rtc_check(e, allow_bottom))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution(BTreeMap<Name, Expr>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Expr> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: Name, image: Expr) -> Option<Expr> {
        self.0.insert(var, image)
    }

    pub fn remove(&mut self, var: &str) -> Option<Expr> {
        self.0.remove(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Expr)> {
        self.0.iter()
    }

    pub fn is_rtc(&self) -> bool {
        self.0.values().all(|e| rtc_check(e, false))
    }

    pub fn is_rtc_bottom(&self) -> bool {
        self.0.values().all(|e| rtc_check(e, true))
    }
}

impl FromIterator<(Name, Expr)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, Expr)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// What a pattern variable may be bound to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// Rt-c-terms (let-rewriting parameter passing).
    RtcTerm,
    /// Rt-c-terms possibly containing ⊥ (the ⊥-calculus).
    RtcTermBottom,
    /// Any expression (ordinary rewriting).
    Unrestricted,
}

impl MatchMode {
    fn admits(self, e: &Expr) -> bool {
        match self {
            MatchMode::RtcTerm => rtc_check(e, false),
            MatchMode::RtcTermBottom => rtc_check(e, true),
            MatchMode::Unrestricted => true,
        }
    }
}

/// Matches a rule's parameter patterns against call arguments, requiring
/// every binding to be an rt-c-term.
pub fn match_params(
    params: &[Expr],
    args: &[Expr],
    allow_bottom: bool,
) -> Result<Option<Substitution>, TermError> {
    let mode = if allow_bottom {
        MatchMode::RtcTermBottom
    } else {
        MatchMode::RtcTerm
    };
    match_with(params, args, mode)
}

pub fn match_with(
    params: &[Expr],
    args: &[Expr],
    mode: MatchMode,
) -> Result<Option<Substitution>, TermError> {
    if params.len() != args.len() {
        return Err(TermError::Arity {
            patterns: params.len(),
            args: args.len(),
        });
    }
    let mut theta = Substitution::new();
    for (p, a) in params.iter().zip(args) {
        if !match_one(p, a, mode, &mut theta)? {
            return Ok(None);
        }
    }
    Ok(Some(theta))
}

fn match_one(
    pattern: &Expr,
    arg: &Expr,
    mode: MatchMode,
    theta: &mut Substitution,
) -> Result<bool, TermError> {
    match pattern {
        Expr::Var(x) => {
            if !mode.admits(arg) {
                return Ok(false);
            }
            match theta.get(x) {
                Some(bound) => Ok(bound == arg),
                None => {
                    theta.insert(x.clone(), arg.clone());
                    Ok(true)
                }
            }
        }
        Expr::Cons(c, ps) => match arg {
            Expr::Cons(d, args) if c == d && ps.len() == args.len() => {
                for (p, a) in ps.iter().zip(args) {
                    if !match_one(p, a, mode, theta)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
        other => Err(TermError::Malformed(format!(
            "pattern contains a non-constructor node: {other}"
        ))),
    }
}

/// Simultaneous, capture-avoiding substitution.
pub fn apply_subst(e: &Expr, theta: &Substitution) -> Expr {
    if theta.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Var(x) => theta.get(x).cloned().unwrap_or_else(|| e.clone()),
        Expr::Bottom => Expr::Bottom,
        Expr::Cons(c, args) => Expr::Cons(
            c.clone(),
            args.iter().map(|a| apply_subst(a, theta)).collect(),
        ),
        Expr::Fun { name, rt, args } => Expr::Fun {
            name: name.clone(),
            rt: *rt,
            args: args.iter().map(|a| apply_subst(a, theta)).collect(),
        },
        Expr::Let(x, bound, body) => {
            let bound = apply_subst(bound, theta);
            let body_fv = free_vars(body);
            let mut inner: Substitution = theta
                .iter()
                .filter(|(v, _)| *v != x && body_fv.contains(*v))
                .map(|(v, img)| (v.clone(), img.clone()))
                .collect();
            let image_fv: BTreeSet<Name> =
                inner.iter().flat_map(|(_, img)| free_vars(img)).collect();
            if image_fv.contains(x) {
                let mut avoid = image_fv;
                avoid.extend(all_vars(body));
                avoid.extend(inner.iter().map(|(v, _)| v.clone()));
                let renamed = fresh_var(x, &avoid);
                inner.insert(x.clone(), Expr::Var(renamed.clone()));
                Expr::Let(renamed, Box::new(bound), Box::new(apply_subst(body, &inner)))
            } else {
                Expr::Let(x.clone(), Box::new(bound), Box::new(apply_subst(body, &inner)))
            }
        }
    }
}

/// The constructor skeleton of `e`: function applications become ⊥.
pub fn shell(e: &Expr) -> Result<Expr, TermError> {
    match e {
        Expr::Var(_) => Ok(e.clone()),
        Expr::Cons(c, args) => Ok(Expr::Cons(
            c.clone(),
            args.iter().map(shell).collect::<Result<_, _>>()?,
        )),
        Expr::Fun { .. } | Expr::Bottom => Ok(Expr::Bottom),
        Expr::Let(..) => Err(TermError::Malformed("shell of a let binding".into())),
    }
}

/// The approximation order: `a ⊑ b` iff `a` is `b` with some subterms cut to ⊥.
pub fn leq_approx(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Bottom, _) => true,
        (Expr::Cons(c, xs), Expr::Cons(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| leq_approx(x, y))
        }
        _ => a == b,
    }
}

/// Every partial value below `t` (including `t` and ⊥).
pub fn approximations(t: &Expr) -> Vec<Expr> {
    let mut out = vec![Expr::Bottom];
    match t {
        Expr::Bottom => {}
        Expr::Cons(c, args) => {
            let mut combos: Vec<Vec<Expr>> = vec![Vec::new()];
            for arg in args {
                let below = approximations(arg);
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        below.iter().map(move |b| {
                            let mut next = prefix.clone();
                            next.push(b.clone());
                            next
                        })
                    })
                    .collect();
            }
            out.extend(combos.into_iter().map(|args| Expr::Cons(c.clone(), args)));
        }
        other => out.push(other.clone()),
    }
    out
}

pub fn free_vars(e: &Expr) -> BTreeSet<Name> {
    fn go(e: &Expr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match e {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Let(x, b, body) => {
                go(b, bound, out);
                bound.push(x.clone());
                go(body, bound, out);
                bound.pop();
            }
            other => {
                for child in other.children() {
                    go(child, bound, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// Let binders occurring anywhere in `e`.
pub fn bound_vars(e: &Expr) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_binders(e, &mut out);
    out
}

fn collect_binders(e: &Expr, out: &mut BTreeSet<Name>) {
    if let Expr::Let(x, ..) = e {
        out.insert(x.clone());
    }
    for child in e.children() {
        collect_binders(child, out);
    }
}

/// Binders in traversal order, duplicates kept.
pub fn binder_list(e: &Expr) -> Vec<Name> {
    let mut out = Vec::new();
    fn go(e: &Expr, out: &mut Vec<Name>) {
        if let Expr::Let(x, ..) = e {
            out.push(x.clone());
        }
        for child in e.children() {
            go(child, out);
        }
    }
    go(e, &mut out);
    out
}

/// Every variable name occurring in `e`, free or bound.
pub fn all_vars(e: &Expr) -> BTreeSet<Name> {
    let mut out = bound_vars(e);
    fn go(e: &Expr, out: &mut BTreeSet<Name>) {
        if let Expr::Var(x) = e {
            out.insert(x.clone());
        }
        for child in e.children() {
            go(child, out);
        }
    }
    go(e, &mut out);
    out
}

/// First name outside `avoid`: the hint itself, then the hint with
/// numeric suffixes 1, 2, ...
pub fn fresh_var(hint: &str, avoid: &BTreeSet<Name>) -> Name {
    if !avoid.contains(hint) {
        return hint.into();
    }
    let base = hint.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "X" } else { base };
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|candidate| !avoid.contains(candidate.as_str()))
        .expect("unbounded supply of names")
        .into()
}

/// Renames let binders to `X, X1, X2, ...` in pre-order, skipping free
/// variable names. Alpha-equivalent inputs give identical outputs.
pub fn alpha_normalize(e: &Expr) -> Expr {
    if !e.contains_let() {
        return e.clone();
    }
    let free = free_vars(e);
    let mut taken = free.clone();
    let mut env: HashMap<Name, Vec<Name>> = HashMap::new();
    normalize_go(e, &mut env, &mut taken)
}

fn normalize_go(
    e: &Expr,
    env: &mut HashMap<Name, Vec<Name>>,
    taken: &mut BTreeSet<Name>,
) -> Expr {
    match e {
        Expr::Var(x) => match env.get(x).and_then(|s| s.last()) {
            Some(renamed) => Expr::Var(renamed.clone()),
            None => e.clone(),
        },
        Expr::Bottom => Expr::Bottom,
        Expr::Cons(c, args) => Expr::Cons(
            c.clone(),
            args.iter().map(|a| normalize_go(a, env, taken)).collect(),
        ),
        Expr::Fun { name, rt, args } => Expr::Fun {
            name: name.clone(),
            rt: *rt,
            args: args.iter().map(|a| normalize_go(a, env, taken)).collect(),
        },
        Expr::Let(x, bound, body) => {
            let fresh = fresh_var("X", taken);
            taken.insert(fresh.clone());
            let bound = normalize_go(bound, env, taken);
            env.entry(x.clone()).or_default().push(fresh.clone());
            let body = normalize_go(body, env, taken);
            env.get_mut(x).map(Vec::pop);
            Expr::Let(fresh, Box::new(bound), Box::new(body))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub function: Name,
    pub params: Vec<Expr>,
    pub rhs: Expr,
}

/// A validated program: rules in source order plus the signature.
#[derive(Clone, Debug, Default)]
pub struct Program {
    rules: Vec<Rule>,
    index: HashMap<Name, Vec<usize>>,
    symbols: SymbolTable,
}

impl Program {
    pub fn new(rules: Vec<Rule>, symbols: SymbolTable) -> Result<Self, TermError> {
        for rule in &rules {
            validate_rule(rule, &symbols)?;
        }
        let mut index: HashMap<Name, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            index.entry(rule.function.clone()).or_default().push(i);
        }
        Ok(Program { rules, index, symbols })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Rules defining `function`, in source order.
    pub fn rules_for<'a>(&'a self, function: &str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.index
            .get(function)
            .into_iter()
            .flatten()
            .map(move |&i| &self.rules[i])
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn has_hatted_copies(&self) -> bool {
        self.symbols.functions().any(|info| is_hatted(&info.name))
    }

    /// The same program with every rt flag erased.
    pub fn strip_rt(&self) -> Program {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                function: r.function.clone(),
                params: r.params.clone(),
                rhs: strip_rt(&r.rhs),
            })
            .collect();
        Program {
            rules,
            index: self.index.clone(),
            symbols: self.symbols.clone(),
        }
    }
}

pub fn strip_rt(e: &Expr) -> Expr {
    match e {
        Expr::Fun { name, args, .. } => Expr::Fun {
            name: name.clone(),
            rt: false,
            args: args.iter().map(strip_rt).collect(),
        },
        Expr::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(strip_rt).collect()),
        Expr::Let(x, b, body) => Expr::Let(x.clone(), Box::new(strip_rt(b)), Box::new(strip_rt(body))),
        other => other.clone(),
    }
}

fn validate_rule(rule: &Rule, symbols: &SymbolTable) -> Result<(), TermError> {
    let f = &rule.function;
    match symbols.get(f) {
        Some(info) if info.kind == SymbolKind::Function && info.arity == rule.params.len() => {}
        _ => {
            return Err(TermError::InvalidProgram(format!(
                "rule head `{f}/{}` is not a declared function of that arity",
                rule.params.len()
            )))
        }
    }
    let mut seen = BTreeSet::new();
    for p in &rule.params {
        check_pattern(p, symbols, &mut seen)?;
    }
    check_rhs(&rule.rhs, symbols)?;
    if let Some(extra) = free_vars(&rule.rhs).into_iter().find(|v| !seen.contains(v)) {
        return Err(TermError::InvalidProgram(format!(
            "variable `{extra}` in the right-hand side of `{f}` does not occur in its parameters"
        )));
    }
    Ok(())
}

fn check_pattern(p: &Expr, symbols: &SymbolTable, seen: &mut BTreeSet<Name>) -> Result<(), TermError> {
    match p {
        Expr::Var(x) => {
            if !seen.insert(x.clone()) {
                return Err(TermError::InvalidProgram(format!(
                    "variable `{x}` occurs more than once in a rule head"
                )));
            }
            Ok(())
        }
        Expr::Cons(c, args) => {
            check_symbol(c, SymbolKind::Constructor, args.len(), symbols)?;
            args.iter().try_for_each(|a| check_pattern(a, symbols, seen))
        }
        other => Err(TermError::InvalidProgram(format!(
            "pattern `{other}` is not a constructor term"
        ))),
    }
}

fn check_rhs(e: &Expr, symbols: &SymbolTable) -> Result<(), TermError> {
    match e {
        Expr::Var(_) => Ok(()),
        Expr::Cons(c, args) => {
            check_symbol(c, SymbolKind::Constructor, args.len(), symbols)?;
            args.iter().try_for_each(|a| check_rhs(a, symbols))
        }
        Expr::Fun { name, args, .. } => {
            check_symbol(name, SymbolKind::Function, args.len(), symbols)?;
            args.iter().try_for_each(|a| check_rhs(a, symbols))
        }
        Expr::Let(..) => Err(TermError::InvalidProgram("let binding in a rule".into())),
        Expr::Bottom => Err(TermError::InvalidProgram("⊥ in a rule".into())),
    }
}

fn check_symbol(name: &str, kind: SymbolKind, arity: usize, symbols: &SymbolTable) -> Result<(), TermError> {
    match symbols.get(name) {
        Some(info) if info.kind == kind && info.arity == arity => Ok(()),
        Some(info) => Err(TermError::InvalidProgram(format!(
            "`{name}` used as {kind:?}/{arity} but declared as {:?}/{}",
            info.kind, info.arity
        ))),
        None => Err(TermError::InvalidProgram(format!("undeclared symbol `{name}`"))),
    }
}
