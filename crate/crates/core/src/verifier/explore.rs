//! Exhaustive exploration of every resolver branch from one initial state.

use crate::error::Result;
use crate::swarm::{
    decide, is_nice_star, is_quiescent, Algorithm, Configuration, Placement, Schedule,
};
use crate::topology::Topology;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;

pub const GATHERING: &str = "Gathering";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResolverPolicy {
    /// Always take the smallest destination.
    Canonical,
    /// Branch on every destination of every offer.
    #[default]
    Adversarial,
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreLimits {
    pub horizon_epochs: u64,
    pub resolver: ResolverPolicy,
    /// Distinct states before giving up.
    pub max_states: usize,
}

impl ExploreLimits {
    pub fn new(horizon_epochs: u64, resolver: ResolverPolicy) -> Self {
        ExploreLimits {
            horizon_epochs,
            resolver,
            max_states: 2_000_000,
        }
    }
}

/// A task change caused by one move.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TransitionPair {
    pub from: &'static str,
    pub to: &'static str,
    /// The bounding region lost a dimension (or shrank) on this move.
    pub bound_decreased: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Livelock,
    Horizon,
    NotQuiescent,
    Error,
    StateLimit,
    LowerBound,
    NiceStar,
}

/// A failure together with the resolver choices that reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: ViolationKind,
    pub detail: String,
    /// Offer index taken at each round, from round 1.
    pub choices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub states: usize,
    /// Fewest and most rounds until gathering over all branches.
    pub min_rounds: u64,
    pub max_rounds: u64,
    pub k: u64,
    /// Every branch passes a nice-star configuration with two or more occupied vertices.
    pub nice_star_on_every_path: bool,
    pub pairs: BTreeSet<TransitionPair>,
    /// Multi-task cycles realized by some execution without the bound shrinking.
    pub cycles: BTreeSet<Vec<&'static str>>,
    pub failure: Option<Failure>,
}

impl Exploration {
    pub fn min_epochs(&self) -> u64 {
        self.min_rounds.div_ceil(self.k)
    }

    pub fn max_epochs(&self) -> u64 {
        self.max_rounds.div_ceil(self.k)
    }

    pub fn gathered(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Node(usize),
    Gathered,
}

struct Edge {
    to: Target,
    changed: bool,
    to_task: &'static str,
    bound_decreased: bool,
}

struct Node {
    task: &'static str,
    done: bool,
    nice: bool,
    min: u64,
    max: u64,
    must_nice: bool,
    edges: Vec<Edge>,
}

struct Frame<V> {
    id: usize,
    placement: Placement<V>,
    config: Configuration<V>,
    measure: u32,
    depth: u64,
    robot: usize,
    dests: Vec<V>,
    next: usize,
    min: u64,
    max: u64,
    all_nice: bool,
}

/// Explores all executions from `initial` under `schedule`.
///
/// `measure` sizes the bounding region; a drop marks a bound-decreasing move.
pub fn explore<T, A>(
    topo: &T,
    alg: &A,
    initial: &Placement<T::Vertex>,
    schedule: &Schedule,
    measure: &dyn Fn(&Configuration<T::Vertex>) -> u32,
    limits: ExploreLimits,
) -> Exploration
where
    T: Topology,
    T::Vertex: Hash,
    A: Algorithm<T> + ?Sized,
{
    let k = schedule.k() as u64;
    let mut out = Exploration {
        states: 0,
        min_rounds: 0,
        max_rounds: 0,
        k,
        nice_star_on_every_path: false,
        pairs: BTreeSet::new(),
        cycles: BTreeSet::new(),
        failure: None,
    };
    if initial.configuration().is_gathered() {
        match is_quiescent(topo, alg, initial) {
            Ok(true) => {}
            Ok(false) => {
                out.failure = Some(fail(
                    ViolationKind::NotQuiescent,
                    "gathered start moves",
                    vec![],
                ))
            }
            Err(e) => out.failure = Some(fail(ViolationKind::Error, &e.to_string(), vec![])),
        }
        return out;
    }
    let horizon_rounds = limits.horizon_epochs * k;
    let mut index: HashMap<(Vec<T::Vertex>, u64), usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut stack: Vec<Frame<T::Vertex>> = Vec::new();

    let open = |placement: Placement<T::Vertex>,
                depth: u64,
                nodes: &mut Vec<Node>|
     -> Result<Frame<T::Vertex>> {
        let robot = schedule.active((depth % k) as usize);
        let decision = decide(topo, alg, &placement, robot)?;
        let mut dests = decision.offer.dests().to_vec();
        if limits.resolver == ResolverPolicy::Canonical {
            dests.truncate(1);
        }
        let config = placement.configuration();
        let task = alg.task_of(topo, &config).unwrap_or("?");
        let nice = config.occ() >= 2 && !is_nice_star(topo, &config).is_empty();
        nodes.push(Node {
            task,
            done: false,
            nice,
            min: 0,
            max: 0,
            must_nice: nice,
            edges: Vec::new(),
        });
        Ok(Frame {
            id: nodes.len() - 1,
            measure: measure(&config),
            config,
            placement,
            depth,
            robot,
            dests,
            next: 0,
            min: u64::MAX,
            max: 0,
            all_nice: true,
        })
    };
    let choices_of =
        |stack: &[Frame<T::Vertex>]| stack.iter().map(|f| f.next - 1).collect::<Vec<_>>();

    index.insert((initial.positions().to_vec(), 0), 0);
    match open(initial.clone(), 0, &mut nodes) {
        Ok(f) => stack.push(f),
        Err(e) => {
            out.failure = Some(fail(ViolationKind::Error, &e.to_string(), vec![]));
            return out;
        }
    }

    while let Some(top) = stack.last_mut() {
        if top.next == top.dests.len() {
            let f = stack.pop().expect("non-empty stack");
            let n = &mut nodes[f.id];
            n.done = true;
            n.min = f.min;
            n.max = f.max;
            n.must_nice = n.nice || f.all_nice;
            let (min, max, must) = (n.min, n.max, n.must_nice);
            if let Some(parent) = stack.last_mut() {
                parent.min = parent.min.min(min + 1);
                parent.max = parent.max.max(max + 1);
                parent.all_nice &= must;
            }
            continue;
        }
        let dest = top.dests[top.next];
        top.next += 1;
        let mut child = top.placement.clone();
        child.move_robot(top.robot, dest);
        let child_config = child.configuration();
        let changed = child_config != top.config;
        let child_measure = measure(&child_config);
        let bound_decreased = child_measure < top.measure;
        let (parent_id, depth) = (top.id, top.depth);
        if child_config.is_gathered() {
            match is_quiescent(topo, alg, &child) {
                Ok(true) => {}
                Ok(false) => {
                    out.failure = Some(fail(
                        ViolationKind::NotQuiescent,
                        "robots move after gathering",
                        choices_of(&stack),
                    ));
                    break;
                }
                Err(e) => {
                    out.failure = Some(fail(
                        ViolationKind::Error,
                        &e.to_string(),
                        choices_of(&stack),
                    ));
                    break;
                }
            }
            nodes[parent_id].edges.push(Edge {
                to: Target::Gathered,
                changed,
                to_task: GATHERING,
                bound_decreased,
            });
            let top = stack.last_mut().expect("non-empty stack");
            top.min = top.min.min(1);
            top.max = top.max.max(1);
            top.all_nice = false;
            continue;
        }
        let key = (child.positions().to_vec(), (depth + 1) % k);
        if let Some(&id) = index.get(&key) {
            if !nodes[id].done {
                let detail = format!("state after round {} repeats", depth + 1);
                out.failure = Some(fail(ViolationKind::Livelock, &detail, choices_of(&stack)));
                break;
            }
            let (min, max, must, task) = (
                nodes[id].min,
                nodes[id].max,
                nodes[id].must_nice,
                nodes[id].task,
            );
            nodes[parent_id].edges.push(Edge {
                to: Target::Node(id),
                changed,
                to_task: task,
                bound_decreased,
            });
            let top = stack.last_mut().expect("non-empty stack");
            top.min = top.min.min(min + 1);
            top.max = top.max.max(max + 1);
            top.all_nice &= must;
            continue;
        }
        if depth + 1 >= horizon_rounds {
            out.failure = Some(fail(
                ViolationKind::Horizon,
                "horizon reached before gathering",
                choices_of(&stack),
            ));
            break;
        }
        if nodes.len() >= limits.max_states {
            out.failure = Some(fail(
                ViolationKind::StateLimit,
                "state limit reached",
                choices_of(&stack),
            ));
            break;
        }
        match open(child, depth + 1, &mut nodes) {
            Ok(f) => {
                index.insert(key, f.id);
                let task = nodes[f.id].task;
                nodes[parent_id].edges.push(Edge {
                    to: Target::Node(f.id),
                    changed,
                    to_task: task,
                    bound_decreased,
                });
                stack.push(f);
            }
            Err(e) => {
                out.failure = Some(fail(
                    ViolationKind::Error,
                    &e.to_string(),
                    choices_of(&stack),
                ));
                break;
            }
        }
    }
    out.states = nodes.len();
    if out.failure.is_some() {
        return out;
    }
    let root = &nodes[0];
    out.min_rounds = root.min;
    out.max_rounds = root.max;
    out.nice_star_on_every_path = root.must_nice;
    if out.max_epochs() > limits.horizon_epochs {
        let detail = format!("a branch needs {} epochs", out.max_epochs());
        out.failure = Some(fail(
            ViolationKind::Horizon,
            &detail,
            longest_branch(&nodes),
        ));
    }
    for n in &nodes {
        for e in n.edges.iter().filter(|e| e.changed) {
            out.pairs.insert(TransitionPair {
                from: n.task,
                to: e.to_task,
                bound_decreased: e.bound_decreased,
            });
        }
    }
    out.cycles = task_cycles(&nodes);
    out
}

fn fail(kind: ViolationKind, detail: &str, choices: Vec<usize>) -> Failure {
    Failure {
        kind,
        detail: detail.to_string(),
        choices,
    }
}

fn longest_branch(nodes: &[Node]) -> Vec<usize> {
    let mut choices = Vec::new();
    let mut at = 0;
    loop {
        let n = &nodes[at];
        let best = n.edges.iter().enumerate().max_by_key(|(i, e)| {
            let len = match e.to {
                Target::Gathered => 1,
                Target::Node(c) => nodes[c].max + 1,
            };
            (len, std::cmp::Reverse(*i))
        });
        let Some((i, e)) = best else { return choices };
        choices.push(i);
        match e.to {
            Target::Gathered => return choices,
            Target::Node(c) => at = c,
        }
    }
}

/// Task sequences `X -> Y.. -> X` with distinct tasks realized along some path
/// of bound-preserving moves, rotated to start at their least task.
fn task_cycles(nodes: &[Node]) -> BTreeSet<Vec<&'static str>> {
    let mut found = BTreeSet::new();
    let mut seen: HashSet<(usize, Vec<&'static str>)> = HashSet::new();
    for start in 0..nodes.len() {
        let mut work = vec![(start, vec![nodes[start].task])];
        while let Some((at, seq)) = work.pop() {
            if !seen.insert((at, seq.clone())) {
                continue;
            }
            for e in &nodes[at].edges {
                let Target::Node(next) = e.to else { continue };
                if e.bound_decreased {
                    continue;
                }
                let t = nodes[next].task;
                if t == *seq.last().expect("non-empty") {
                    work.push((next, seq.clone()));
                } else if t == seq[0] {
                    found.insert(rotate_to_least(&seq));
                } else if !seq.contains(&t) {
                    let mut s = seq.clone();
                    s.push(t);
                    work.push((next, s));
                }
            }
        }
    }
    found
}

fn rotate_to_least(seq: &[&'static str]) -> Vec<&'static str> {
    let at = (0..seq.len()).min_by_key(|&i| seq[i]).unwrap_or(0);
    seq[at..].iter().chain(&seq[..at]).copied().collect()
}
