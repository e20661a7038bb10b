//! Demand-driven evaluation with suspensions.
//!
//! Every function call becomes a suspension record in a persistent store.
//! Forcing an ordinary suspension caches its head normal form, so all
//! references to it see the same value; an rt suspension never caches and
//! every demand chooses again. Search is depth-first and left to right,
//! with rule alternatives in source order. Because the store is
//! persistent, each branch owns its own version of it.

use std::cell::Cell;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::term::{Expr, Name, Program};

pub type NodeId = usize;

type Flow = ControlFlow<()>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuspError {
    #[error("cannot compile {0}: goals must be ground expressions without let or ⊥")]
    NotAGoal(String),
    #[error("answer limit must be positive")]
    ZeroAnswers,
    #[error("evaluation thread failed")]
    Thread,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Unevaluated,
    /// Cached head normal form (always a constructor node).
    Evaluated(NodeId),
    /// Never cached.
    Rt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Cons { name: Name, args: Vec<NodeId> },
    Susp { function: Name, args: Vec<NodeId>, status: Status },
}

/// Persistent node store; cloning is cheap and versions never interfere.
#[derive(Clone, Debug, Default)]
pub struct Store {
    nodes: im::Vector<Node>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn status(&self, id: NodeId) -> Option<Status> {
        match self.nodes.get(id)? {
            Node::Susp { status, .. } => Some(*status),
            Node::Cons { .. } => None,
        }
    }

    /// Identifier the next allocation will receive.
    pub fn next_id(&self) -> NodeId {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn alloc(&mut self, node: Node) -> NodeId {
        self.nodes.push_back(node);
        self.nodes.len() - 1
    }

    fn record(&mut self, id: NodeId, result: NodeId) {
        if let Some(Node::Susp { status, .. }) = self.nodes.get_mut(id) {
            debug_assert_eq!(*status, Status::Unevaluated, "write-once per branch");
            *status = Status::Evaluated(result);
        }
    }

    /// Builds the graph of a rule body; variables refer to existing nodes.
    fn instantiate(&mut self, e: &Expr, env: &[(Name, NodeId)]) -> NodeId {
        match e {
            Expr::Var(x) => {
                env.iter()
                    .rev()
                    .find(|(v, _)| v == x)
                    .expect("rule variables are bound by the head")
                    .1
            }
            Expr::Cons(c, args) => {
                let args = args.iter().map(|a| self.instantiate(a, env)).collect();
                self.alloc(Node::Cons { name: c.clone(), args })
            }
            Expr::Fun { name, rt, args } => {
                let args = args.iter().map(|a| self.instantiate(a, env)).collect();
                let status = if *rt { Status::Rt } else { Status::Unevaluated };
                self.alloc(Node::Susp {
                    function: name.clone(),
                    args,
                    status,
                })
            }
            Expr::Let(..) | Expr::Bottom => unreachable!("validated program"),
        }
    }
}

/// Compiles a ground goal into the store.
pub fn compile_goal(e: &Expr, mut store: Store) -> Result<(NodeId, Store), SuspError> {
    if !e.is_ground() || e.contains_let() || e.contains_bottom() {
        return Err(SuspError::NotAGoal(e.to_string()));
    }
    let root = store.instantiate(e, &[]);
    Ok((root, store))
}

/// A rule selected for a suspension: `rule` indexes the function's rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Choice {
    pub suspension: NodeId,
    pub rule: usize,
}

/// The state of one search branch.
#[derive(Clone, Debug, Default)]
pub struct Branch {
    pub store: Store,
    pub trace: im::Vector<Choice>,
    pub depth: usize,
}

impl Branch {
    pub fn new(store: Store) -> Self {
        Branch {
            store,
            trace: im::Vector::new(),
            depth: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub value: Expr,
    pub branch_trace: Vec<Choice>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveLimits {
    pub max_answers: usize,
    /// Rule applications allowed along one branch.
    pub max_depth: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_answers: 100,
            max_depth: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solutions {
    pub answers: Vec<Answer>,
    /// True when the whole search space was enumerated.
    pub exhausted: bool,
}

impl Solutions {
    pub fn values(&self) -> Vec<Expr> {
        self.answers.iter().map(|a| a.value.clone()).collect()
    }
}

/// The evaluator over one program. Streams are push-based: callbacks
/// receive each result with its branch and may stop the search.
pub struct Engine<'p> {
    program: &'p Program,
    max_depth: usize,
    pruned: Cell<bool>,
}

impl<'p> Engine<'p> {
    pub fn new(program: &'p Program, max_depth: usize) -> Self {
        Engine {
            program,
            max_depth,
            pruned: Cell::new(false),
        }
    }

    /// Whether some branch was cut by the depth limit.
    pub fn pruned(&self) -> bool {
        self.pruned.get()
    }

    /// Head normal forms of `id`, one callback per alternative.
    pub fn hnf(&self, id: NodeId, branch: Branch, k: &mut dyn FnMut(NodeId, Branch) -> Flow) -> Flow {
        let (function, args, rt) = match branch.store.get(id) {
            Node::Cons { .. } => return k(id, branch),
            Node::Susp {
                status: Status::Evaluated(result),
                ..
            } => {
                let result = *result;
                return k(result, branch);
            }
            Node::Susp { function, args, status } => (function.clone(), args.clone(), *status == Status::Rt),
        };
        for (index, rule) in self.program.rules_for(&function).enumerate() {
            self.match_all(&rule.params, &args, Vec::new(), branch.clone(), &mut |env, matched| {
                if matched.depth >= self.max_depth {
                    self.pruned.set(true);
                    return ControlFlow::Continue(());
                }
                let mut next = matched;
                next.depth += 1;
                next.trace.push_back(Choice { suspension: id, rule: index });
                let body = next.store.instantiate(&rule.rhs, &env);
                self.hnf(body, next, &mut |head, mut done| {
                    if !rt {
                        done.store.record(id, head);
                    }
                    k(head, done)
                })
            })?;
        }
        ControlFlow::Continue(())
    }

    fn match_all(
        &self,
        params: &[Expr],
        args: &[NodeId],
        env: Vec<(Name, NodeId)>,
        branch: Branch,
        k: &mut dyn FnMut(Vec<(Name, NodeId)>, Branch) -> Flow,
    ) -> Flow {
        let Some((pattern, rest)) = params.split_first() else {
            return k(env, branch);
        };
        let (arg, rest_args) = args.split_first().expect("arity checked at load");
        self.match_pattern(pattern, *arg, env, branch, &mut |env, b| {
            self.match_all(rest, rest_args, env, b, k)
        })
    }

    fn match_pattern(
        &self,
        pattern: &Expr,
        node: NodeId,
        mut env: Vec<(Name, NodeId)>,
        branch: Branch,
        k: &mut dyn FnMut(Vec<(Name, NodeId)>, Branch) -> Flow,
    ) -> Flow {
        match pattern {
            Expr::Var(x) => {
                env.push((x.clone(), node));
                k(env, branch)
            }
            Expr::Cons(c, params) => self.hnf(node, branch, &mut |head, b| match b.store.get(head) {
                Node::Cons { name, args } if name == c && args.len() == params.len() => {
                    let args = args.clone();
                    self.match_all(params, &args, env.clone(), b, k)
                }
                _ => ControlFlow::Continue(()),
            }),
            _ => unreachable!("patterns are constructor terms"),
        }
    }

    /// Full normal forms of `id`, arguments evaluated left to right.
    pub fn normalize(&self, id: NodeId, branch: Branch, k: &mut dyn FnMut(Expr, Branch) -> Flow) -> Flow {
        self.hnf(id, branch, &mut |head, b| {
            let Node::Cons { name, args } = b.store.get(head).clone() else {
                unreachable!("head normal forms are constructor nodes")
            };
            self.normalize_args(&args, Vec::new(), b, &mut |values, done| {
                k(Expr::Cons(name.clone(), values), done)
            })
        })
    }

    fn normalize_args(
        &self,
        ids: &[NodeId],
        acc: Vec<Expr>,
        branch: Branch,
        k: &mut dyn FnMut(Vec<Expr>, Branch) -> Flow,
    ) -> Flow {
        let Some((first, rest)) = ids.split_first() else {
            return k(acc, branch);
        };
        self.normalize(*first, branch, &mut |value, b| {
            let mut acc = acc.clone();
            acc.push(value);
            self.normalize_args(rest, acc, b, k)
        })
    }

    /// Collects every head normal form (for inspection and tests).
    pub fn hnf_all(&self, id: NodeId, branch: Branch) -> Vec<(NodeId, Branch)> {
        let mut out = Vec::new();
        let _ = self.hnf(id, branch, &mut |h, b| {
            out.push((h, b));
            ControlFlow::Continue(())
        });
        out
    }

    pub fn normalize_all(&self, id: NodeId, branch: Branch) -> Vec<(Expr, Branch)> {
        let mut out = Vec::new();
        let _ = self.normalize(id, branch, &mut |v, b| {
            out.push((v, b));
            ControlFlow::Continue(())
        });
        out
    }
}

/// Stack reserved for the evaluation thread: continuation-passing search
/// nests one frame group per step along a branch.
const STACK_BYTES: usize = 512 * 1024 * 1024;

/// Enumerates answers of a ground goal depth-first, keeping duplicates.
pub fn solve(e: &Expr, p: &Program, limits: SolveLimits) -> Result<Solutions, SuspError> {
    if limits.max_answers == 0 {
        return Err(SuspError::ZeroAnswers);
    }
    let (root, store) = compile_goal(e, Store::new())?;
    std::thread::scope(|scope| {
        let worker = std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(scope, || {
                let engine = Engine::new(p, limits.max_depth);
                let mut answers = Vec::new();
                // Looking for one answer past the limit tells whether more exist.
                let flow = engine.normalize(root, Branch::new(store), &mut |value, b| {
                    answers.push(Answer {
                        value,
                        branch_trace: b.trace.iter().copied().collect(),
                    });
                    if answers.len() > limits.max_answers {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                let overflow = flow.is_break();
                answers.truncate(limits.max_answers);
                Solutions {
                    answers,
                    exhausted: !overflow && !engine.pruned(),
                }
            })
            .map_err(|_| SuspError::Thread)?;
        worker.join().map_err(|_| SuspError::Thread)
    })
}
