//! Ungatherability witnesses: hidden placements and activation orders that
//! defeat an algorithm, strawman algorithms to run them against, and a
//! recurrence prover producing replayable certificates.

use crate::error::{Error, Result};
use crate::swarm::{
    decide, is_nice_star, run, step, Algorithm, Configuration, Decision, MoveOffer, Placement,
    Resolver, RunOptions, Schedule, Snapshot, Trace, Verdict,
};
use crate::topology::{Bits, Cube, Symmetric, Topology};
use crate::verifier::{explore, ExploreLimits, ResolverPolicy, ViolationKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::hash::Hash;

/// A finite graph given by adjacency lists; used for cliques and complete
/// bipartite graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGraph {
    name: String,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
    /// Side of each vertex for bipartite graphs.
    sides: Option<Vec<u8>>,
}

impl ExplicitGraph {
    fn from_adjacency(name: String, adj: Vec<Vec<usize>>, sides: Option<Vec<u8>>) -> Self {
        let n = adj.len();
        let mut dist = vec![vec![u32::MAX; n]; n];
        for (s, row) in dist.iter_mut().enumerate() {
            row[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if row[y] == u32::MAX {
                        row[y] = row[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        ExplicitGraph {
            name,
            adj,
            dist,
            sides,
        }
    }

    pub fn clique(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input("a clique needs at least two vertices".into()));
        }
        let adj = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Ok(Self::from_adjacency(format!("clique:{n}"), adj, None))
    }

    /// Vertices `0..n` form one side and `n..2n` the other.
    pub fn complete_bipartite(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Input("each side needs a vertex".into()));
        }
        let adj = (0..2 * n)
            .map(|v| {
                if v < n {
                    (n..2 * n).collect()
                } else {
                    (0..n).collect()
                }
            })
            .collect();
        let sides = (0..2 * n).map(|v| u8::from(v >= n)).collect();
        Ok(Self::from_adjacency(
            format!("bipartite:{n}"),
            adj,
            Some(sides),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn side(&self, v: usize) -> Option<u8> {
        self.sides.as_ref().map(|s| s[v])
    }
}

impl Topology for ExplicitGraph {
    type Vertex = usize;

    fn check(&self, v: usize) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(Error::Input(format!("vertex {v} is not in {}", self.name)))
        }
    }

    fn adjacent(&self, v: usize) -> Vec<usize> {
        self.adj[v].clone()
    }

    fn dist(&self, u: usize, v: usize) -> u32 {
        self.dist[u][v]
    }

    fn render(&self, v: usize) -> String {
        format!("v{v}")
    }

    fn parse(&self, s: &str) -> Result<usize> {
        let v = s
            .trim()
            .trim_start_matches('v')
            .parse::<usize>()
            .map_err(|_| Error::Input(format!("bad vertex {s:?}")))?;
        self.check(v)?;
        Ok(v)
    }
}

/// Moves to the neighbors that most reduce the summed distance to the other
/// occupied vertices.
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

/// Moves to any occupied neighbor.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToOccupied;

/// Moves to any unoccupied neighbor.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToUnoccupied;

/// Complete bipartite strategy: with every occupied vertex on one side, jump
/// across; otherwise join a lone occupied vertex on the other side.
#[derive(Debug, Clone, Copy, Default)]
pub struct MoveAcross;

/// Always heads for its smallest-labelled neighbor; not automorphism-equivariant.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmallestLabel;

fn others<V: Copy + Ord>(snap: &Snapshot<V>) -> impl Iterator<Item = V> + '_ {
    snap.config
        .occupied()
        .iter()
        .copied()
        .filter(move |&v| v != snap.me)
}

impl<T: Topology> Algorithm<T> for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn decide(&self, topo: &T, snap: &Snapshot<T::Vertex>) -> Result<Decision<T::Vertex>> {
        let cost = |x: T::Vertex| -> u64 { others(snap).map(|o| u64::from(topo.dist(x, o))).sum() };
        let here = cost(snap.me);
        let nbrs = topo.adjacent(snap.me);
        let best = nbrs.iter().map(|&x| cost(x)).min().unwrap_or(here);
        if snap.config.is_gathered() || best >= here {
            return Ok(Decision::nil(snap.me, None));
        }
        let dests = nbrs.into_iter().filter(|&x| cost(x) == best).collect();
        Ok(Decision {
            offer: MoveOffer::of(snap.me, dests),
            task: None,
        })
    }
}

impl<T: Topology> Algorithm<T> for ToOccupied {
    fn name(&self) -> &'static str {
        "to-occupied"
    }

    fn decide(&self, topo: &T, snap: &Snapshot<T::Vertex>) -> Result<Decision<T::Vertex>> {
        let dests = topo
            .adjacent(snap.me)
            .into_iter()
            .filter(|&x| snap.config.contains(x))
            .collect();
        Ok(Decision {
            offer: MoveOffer::of(snap.me, dests),
            task: None,
        })
    }
}

impl<T: Topology> Algorithm<T> for ToUnoccupied {
    fn name(&self) -> &'static str {
        "to-unoccupied"
    }

    fn decide(&self, topo: &T, snap: &Snapshot<T::Vertex>) -> Result<Decision<T::Vertex>> {
        if snap.config.is_gathered() {
            return Ok(Decision::nil(snap.me, None));
        }
        let dests = topo
            .adjacent(snap.me)
            .into_iter()
            .filter(|&x| !snap.config.contains(x))
            .collect();
        Ok(Decision {
            offer: MoveOffer::of(snap.me, dests),
            task: None,
        })
    }
}

impl Algorithm<ExplicitGraph> for MoveAcross {
    fn name(&self) -> &'static str {
        "move-across"
    }

    fn decide(&self, g: &ExplicitGraph, snap: &Snapshot<usize>) -> Result<Decision<usize>> {
        let Some(mine) = g.side(snap.me) else {
            return Err(Error::Misuse("move-across needs a bipartite graph".into()));
        };
        if snap.config.is_gathered() {
            return Ok(Decision::nil(snap.me, None));
        }
        let across: Vec<usize> = snap
            .config
            .occupied()
            .iter()
            .copied()
            .filter(|&v| g.side(v) != Some(mine))
            .collect();
        let dests = match across.len() {
            0 => g.adjacent(snap.me),
            1 => across,
            _ => Vec::new(),
        };
        Ok(Decision {
            offer: MoveOffer::of(snap.me, dests),
            task: None,
        })
    }
}

impl<T: Topology> Algorithm<T> for SmallestLabel {
    fn name(&self) -> &'static str {
        "smallest-label"
    }

    fn decide(&self, topo: &T, snap: &Snapshot<T::Vertex>) -> Result<Decision<T::Vertex>> {
        if snap.config.is_gathered() {
            return Ok(Decision::nil(snap.me, None));
        }
        let dests = topo
            .adjacent(snap.me)
            .into_iter()
            .min()
            .into_iter()
            .collect();
        Ok(Decision {
            offer: MoveOffer::of(snap.me, dests),
            task: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedVerdict {
    Recurrence,
    /// The algorithm refuses the initial configuration.
    Rejected,
    Gathered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryScenario<V> {
    pub name: String,
    pub placement: Placement<V>,
    pub schedule: Schedule,
    pub expected: ExpectedVerdict,
    pub rationale: String,
}

/// Three robots on an edge `(u, v)`, two hidden on `u`; the activation order
/// alternates between the two ends.
pub fn p2_scenario<T: Topology>(
    topo: &T,
    u: T::Vertex,
    v: T::Vertex,
) -> Result<AdversaryScenario<T::Vertex>> {
    topo.check(u)?;
    topo.check(v)?;
    if !topo.is_edge(u, v) {
        return Err(Error::Input(format!(
            "{} and {} are not adjacent",
            topo.render(u),
            topo.render(v)
        )));
    }
    // Robots 0 and 1 start on u, robot 2 on v.
    Ok(AdversaryScenario {
        name: "p2".into(),
        placement: Placement::from_counts(&[(u, 2), (v, 1)])?,
        schedule: Schedule::new(vec![0, 2, 1])?,
        expected: ExpectedVerdict::Recurrence,
        rationale:
            "two adjacent occupied vertices: every pair-closing move recreates the same picture"
                .into(),
    })
}

/// Every vertex of the cube occupied, with one doubled vertex (the origin).
pub fn full_graph_placement(cube: &Cube) -> Result<Placement<Bits>> {
    if cube.dim() > 10 {
        return Err(Error::Capability(
            "full placements are limited to d <= 10".into(),
        ));
    }
    let counts: Vec<(Bits, u32)> = cube
        .vertices()
        .map(|v| (v, if v.0 == 0 { 2 } else { 1 }))
        .collect();
    Placement::from_counts(&counts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChaseOutcome {
    /// The scenario plus the resolver choices of the first epoch.
    Scenario(AdversaryScenario<Bits>, Vec<usize>),
    Inapplicable(String),
}

/// Searches a fixed activation order in which each round's mover sits on the
/// previous round's destination, starting from the doubled vertex.
pub fn full_graph_scenario<A: Algorithm<Cube> + ?Sized>(
    cube: &Cube,
    alg: &A,
) -> Result<ChaseOutcome> {
    let placement = full_graph_placement(cube)?;
    let k = placement.robots();
    let mut order = Vec::with_capacity(k);
    let mut choices = Vec::with_capacity(k);
    let mut used = vec![false; k];
    let mut dests_used = BTreeSet::new();
    let mut budget = 200_000u32;
    let found = chase(
        cube,
        alg,
        &placement,
        Bits(0),
        &mut order,
        &mut choices,
        &mut used,
        &mut dests_used,
        &mut budget,
    )?;
    if !found {
        return Ok(ChaseOutcome::Inapplicable(format!(
            "no fixed activation order realizes the chase against {}",
            alg.name()
        )));
    }
    let scenario = AdversaryScenario {
        name: "full".into(),
        placement,
        schedule: Schedule::new(order)?,
        expected: ExpectedVerdict::Recurrence,
        rationale: "all vertices occupied: the mover always lands on an occupied vertex whose robot moves next".into(),
    };
    Ok(ChaseOutcome::Scenario(scenario, choices))
}

#[allow(clippy::too_many_arguments)]
fn chase<A: Algorithm<Cube> + ?Sized>(
    cube: &Cube,
    alg: &A,
    placement: &Placement<Bits>,
    at: Bits,
    order: &mut Vec<usize>,
    choices: &mut Vec<usize>,
    used: &mut [bool],
    dests_used: &mut BTreeSet<Bits>,
    budget: &mut u32,
) -> Result<bool> {
    if order.len() == used.len() {
        return Ok(true);
    }
    if *budget == 0 {
        return Ok(false);
    }
    *budget -= 1;
    let movers: Vec<usize> = (0..used.len())
        .filter(|&r| !used[r] && placement.position(r) == Some(at))
        .collect();
    for r in movers {
        let d = decide(cube, alg, placement, r)?;
        let mut options: Vec<(usize, Bits)> = d
            .offer
            .dests()
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, x)| x != at)
            .collect();
        // Fresh destinations first; the last rounds may have to revisit.
        options.sort_by_key(|&(_, x)| dests_used.contains(&x));
        for (i, dest) in options {
            let mut next = placement.clone();
            next.move_robot(r, dest);
            used[r] = true;
            order.push(r);
            choices.push(i);
            let fresh = dests_used.insert(dest);
            if chase(
                cube, alg, &next, dest, order, choices, used, dests_used, budget,
            )? {
                return Ok(true);
            }
            if fresh {
                dests_used.remove(&dest);
            }
            choices.pop();
            order.pop();
            used[r] = false;
        }
    }
    Ok(false)
}

/// Dense, crowded placements on a clique and on a complete bipartite graph.
pub fn clique_bipartite_scenarios(
    n: usize,
) -> Result<Vec<(ExplicitGraph, AdversaryScenario<usize>)>> {
    if n < 3 {
        return Err(Error::Input(
            "clique and bipartite scenarios need n >= 3".into(),
        ));
    }
    let per = (n as u32).div_ceil(2) + 1;
    // Robots 0..per sit on the first vertex, the rest on the second; the order alternates.
    let alternate: Vec<usize> = (0..per as usize)
        .flat_map(|i| [i, i + per as usize])
        .collect();
    let clique = ExplicitGraph::clique(n)?;
    let bip = ExplicitGraph::complete_bipartite(n)?;
    Ok(vec![
        (
            clique.clone(),
            AdversaryScenario {
                name: "clique-two-occupied".into(),
                placement: Placement::from_counts(&[(0, per), (1, per)])?,
                schedule: Schedule::new(alternate.clone())?,
                expected: ExpectedVerdict::Recurrence,
                rationale: "moving to occupied vertices never empties one; moving to empty ones fills the clique".into(),
            },
        ),
        (
            bip.clone(),
            AdversaryScenario {
                name: "bipartite-one-per-side".into(),
                placement: Placement::from_counts(&[(0, per), (n, per)])?,
                schedule: Schedule::new(alternate)?,
                expected: ExpectedVerdict::Recurrence,
                rationale: "an occupied vertex on each side survives every move".into(),
            },
        ),
        (
            bip,
            AdversaryScenario {
                name: "bipartite-one-side".into(),
                placement: Placement::from_counts(&[(0, 2), (1, 1)])?,
                schedule: Schedule::canonical(3),
                expected: ExpectedVerdict::Gathered,
                rationale: "all robots on one side form a nice star around any vertex across".into(),
            },
        ),
    ])
}

/// A path `a - center - b`.
pub type Path3<V> = (V, V, V);

/// Orbits of the 3-vertex paths centered at `center` under the sampled
/// automorphisms fixing it. Each path is `(a, center, b)` with `a < b`.
pub fn p3_classes<T: Symmetric>(topo: &T, center: T::Vertex) -> Result<Vec<Vec<Path3<T::Vertex>>>> {
    topo.check(center)?;
    let stab: Vec<_> = topo
        .group_sample()?
        .into_iter()
        .filter(|g| topo.apply(g, center) == center)
        .collect();
    let nbrs = topo.adjacent(center);
    let mut left: BTreeSet<(T::Vertex, T::Vertex)> = BTreeSet::new();
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            left.insert((a, b));
        }
    }
    let mut classes = Vec::new();
    while let Some(&(a, b)) = left.iter().next() {
        let mut orbit = BTreeSet::new();
        for g in &stab {
            let (x, y) = (topo.apply(g, a), topo.apply(g, b));
            orbit.insert((x.min(y), x.max(y)));
        }
        for p in &orbit {
            left.remove(p);
        }
        classes.push(orbit.into_iter().map(|(x, y)| (x, center, y)).collect());
    }
    Ok(classes)
}

/// The path `a - center - b` with two robots hidden on the center.
pub fn p3_scenario<T: Topology>(
    topo: &T,
    path: Path3<T::Vertex>,
    expected: ExpectedVerdict,
) -> Result<AdversaryScenario<T::Vertex>> {
    let (a, c, b) = path;
    if !topo.is_edge(a, c) || !topo.is_edge(c, b) || a == b {
        return Err(Error::Input("not a 3-vertex path".into()));
    }
    Ok(AdversaryScenario {
        name: "p3".into(),
        placement: Placement::from_counts(&[(a, 1), (c, 2), (b, 1)])?,
        schedule: Schedule::canonical(4),
        expected,
        rationale:
            "a 3-vertex path that a gathering algorithm may have to recreate before gathering"
                .into(),
    })
}

/// One move of a recurrence loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopMove<V> {
    pub round: u64,
    pub robot: usize,
    pub from: V,
    pub to: V,
}

/// A state reached after `first_round` rounds that the moves bring back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceCertificate<V> {
    pub state: Placement<V>,
    pub schedule: Schedule,
    pub first_round: u64,
    /// Loop length in rounds.
    pub span: u64,
    pub moves: Vec<LoopMove<V>>,
}

impl<V: Copy + Ord> RecurrenceCertificate<V> {
    /// Schedule position at the start of the loop.
    pub fn schedule_position(&self) -> u64 {
        self.first_round % self.schedule.k() as u64
    }

    /// Rounds simulated before the repeat was seen.
    pub fn detected_after_rounds(&self) -> u64 {
        self.first_round + self.span
    }

    /// Applying the moves to the state gives the state back, each move by the
    /// robot the schedule activates at that round.
    pub fn replays(&self) -> bool {
        let k = self.schedule.k() as u64;
        if self.span == 0 || !self.span.is_multiple_of(k) || self.moves.len() as u64 != self.span {
            return false;
        }
        let mut p = self.state.clone();
        for (i, m) in self.moves.iter().enumerate() {
            let round = self.first_round + i as u64 + 1;
            if m.round != round
                || m.robot != self.schedule.active((round - 1) as usize)
                || p.position(m.robot) != Some(m.from)
            {
                return false;
            }
            p.move_robot(m.robot, m.to);
        }
        p == self.state
    }

    /// [`Self::replays`], and every move is one the algorithm offers.
    pub fn replays_under<T: Topology<Vertex = V>, A: Algorithm<T> + ?Sized>(
        &self,
        topo: &T,
        alg: &A,
    ) -> bool {
        if !self.replays() {
            return false;
        }
        let mut p = self.state.clone();
        for m in &self.moves {
            match decide(topo, alg, &p, m.robot) {
                Ok(d) if d.offer.dests().contains(&m.to) => p.move_robot(m.robot, m.to),
                _ => return false,
            }
        }
        true
    }

    pub fn render<T: Topology<Vertex = V>>(&self, topo: &T) -> String {
        let state: Vec<String> = self
            .state
            .positions()
            .iter()
            .map(|&v| topo.render(v))
            .collect();
        let moves: Vec<String> = self
            .moves
            .iter()
            .map(|m| {
                format!(
                    "r{}:{}->{}",
                    m.robot + 1,
                    topo.render(m.from),
                    topo.render(m.to)
                )
            })
            .collect();
        format!(
            "state [{}] at schedule position {}, loop of {} rounds: {}",
            state.join(" "),
            self.schedule_position(),
            self.span,
            moves.join(" ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome<V> {
    Certificate(RecurrenceCertificate<V>),
    Gathered {
        epochs: u64,
    },
    /// The algorithm refused the initial configuration.
    Rejected(String),
    Inconclusive,
}

/// Runs `scenario` looking for a repeated state.
///
/// With the canonical resolver the run is deterministic; with the adversarial
/// one every branch is searched and the first reachable loop is returned.
/// `check_initial` lets the algorithm refuse the input first.
pub fn prove_nontermination<T, A>(
    topo: &T,
    alg: &A,
    scenario: &AdversaryScenario<T::Vertex>,
    policy: ResolverPolicy,
    horizon_epochs: u64,
    check_initial: bool,
) -> Result<ProofOutcome<T::Vertex>>
where
    T: Topology,
    T::Vertex: Hash,
    A: Algorithm<T> + ?Sized,
{
    if check_initial {
        if let Err(e) = alg.validate_initial(topo, &scenario.placement.configuration()) {
            return match e {
                Error::Ungatherable(w) => Ok(ProofOutcome::Rejected(w)),
                other => Err(other),
            };
        }
    }
    let choices = match policy {
        ResolverPolicy::Canonical => {
            let trace = run(
                topo,
                alg,
                &scenario.placement,
                &scenario.schedule,
                &mut Resolver::Canonical,
                RunOptions::unchecked(horizon_epochs),
            )?;
            return Ok(match trace.verdict {
                Verdict::Gathered { epochs } => ProofOutcome::Gathered { epochs },
                Verdict::HorizonExhausted => ProofOutcome::Inconclusive,
                Verdict::Recurrence {
                    first_round,
                    period,
                } => ProofOutcome::Certificate(certificate_from(&trace, first_round, period)),
            });
        }
        ResolverPolicy::Adversarial => {
            let limits = ExploreLimits::new(horizon_epochs, ResolverPolicy::Adversarial);
            let e = explore(
                topo,
                alg,
                &scenario.placement,
                &scenario.schedule,
                &|_| 0,
                limits,
            );
            match e.failure {
                None => {
                    return Ok(ProofOutcome::Gathered {
                        epochs: e.max_epochs(),
                    })
                }
                Some(f) if f.kind == ViolationKind::Livelock => f.choices,
                Some(f) if f.kind == ViolationKind::Error => return Err(Error::Contract(f.detail)),
                Some(_) => return Ok(ProofOutcome::Inconclusive),
            }
        }
    };
    // Replay the looping branch and find where it closes.
    let k = scenario.schedule.k() as u64;
    let mut resolver = Resolver::Scripted(choices.iter().copied().collect());
    let mut states = vec![scenario.placement.clone()];
    let mut trace = Trace {
        initial: scenario.placement.clone(),
        schedule: scenario.schedule.clone(),
        steps: Vec::new(),
        verdict: Verdict::HorizonExhausted,
    };
    for round in 1..=choices.len() as u64 {
        let (next, rec) = step(
            topo,
            alg,
            states.last().expect("non-empty"),
            &scenario.schedule,
            round,
            &mut resolver,
        )?;
        trace.steps.push(rec);
        states.push(next);
    }
    let last = choices.len() as u64;
    let end = states.last().expect("non-empty");
    let first = (0..last)
        .find(|&j| j % k == last % k && states[j as usize] == *end)
        .ok_or_else(|| Error::Contract("looping branch does not close".into()))?;
    Ok(ProofOutcome::Certificate(certificate_from(
        &trace,
        first,
        last - first,
    )))
}

fn certificate_from<V: Copy + Ord>(
    trace: &Trace<V>,
    first_round: u64,
    span: u64,
) -> RecurrenceCertificate<V> {
    let mut state = trace.initial.clone();
    for s in &trace.steps[..first_round as usize] {
        state.move_robot(s.robot, s.dest);
    }
    let moves = trace.steps[first_round as usize..(first_round + span) as usize]
        .iter()
        .map(|s| LoopMove {
            round: s.round,
            robot: s.robot,
            from: s.active,
            to: s.dest,
        })
        .collect();
    RecurrenceCertificate {
        state,
        schedule: trace.schedule.clone(),
        first_round,
        span,
        moves,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceStarCheck {
    /// Fewer than three occupied vertices at the start, or not gathered.
    Skipped,
    /// Index of the first configuration (0 = initial) that is a nice star.
    Pass(usize),
    Fail,
}

/// A gathered trace from three or more occupied vertices must pass a nice
/// star with at least two occupied vertices.
pub fn check_nice_star_necessity<T: Topology>(topo: &T, trace: &Trace<T::Vertex>) -> NiceStarCheck {
    let initial = trace.initial.configuration();
    if initial.occ() < 3 || !matches!(trace.verdict, Verdict::Gathered { .. }) {
        return NiceStarCheck::Skipped;
    }
    let nice = |c: &Configuration<T::Vertex>| c.occ() >= 2 && !is_nice_star(topo, c).is_empty();
    let mut placement = trace.initial.clone();
    let mut configs = vec![initial];
    for s in &trace.steps {
        placement.move_robot(s.robot, s.dest);
        configs.push(placement.configuration());
    }
    configs
        .iter()
        .position(nice)
        .map_or(NiceStarCheck::Fail, NiceStarCheck::Pass)
}

/// Every two-vertex snapshot among `pairs` must get an offer that strictly
/// closes the distance. Returns the first offending `(me, other)`.
pub fn check_pair_distance_reduction<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    pairs: &[(T::Vertex, T::Vertex)],
) -> std::result::Result<(), (T::Vertex, T::Vertex)> {
    for &(me, other) in pairs {
        let snap = Snapshot {
            config: Configuration::new(vec![me, other]),
            me,
        };
        let ok = alg
            .decide(topo, &snap)
            .map(|d| {
                !d.offer.is_nil(me)
                    && d.offer
                        .dests()
                        .iter()
                        .all(|&x| topo.dist(x, other) < topo.dist(me, other))
            })
            .unwrap_or(false);
        if !ok {
            return Err((me, other));
        }
    }
    Ok(())
}

/// Scenario as a structured text file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioFile {
    /// `hypercube:<d>`, `grid`, `clique:<n>` or `bipartite:<n>`.
    pub topology: String,
    pub name: String,
    /// Vertex and robot count; robots are numbered in this order.
    pub counts: Vec<(String, u32)>,
    pub order: Vec<usize>,
    pub expected: ExpectedVerdict,
    #[serde(default)]
    pub rationale: String,
}

impl ScenarioFile {
    pub fn from_scenario<T: Topology>(
        topology: &str,
        topo: &T,
        s: &AdversaryScenario<T::Vertex>,
    ) -> Self {
        let mut counts: Vec<(String, u32)> = Vec::new();
        for &v in s.placement.positions() {
            let r = topo.render(v);
            match counts.iter_mut().find(|(x, _)| *x == r) {
                Some(e) => e.1 += 1,
                None => counts.push((r, 1)),
            }
        }
        ScenarioFile {
            topology: topology.to_string(),
            name: s.name.clone(),
            counts,
            order: s.schedule.order().to_vec(),
            expected: s.expected,
            rationale: s.rationale.clone(),
        }
    }

    pub fn to_scenario<T: Topology>(&self, topo: &T) -> Result<AdversaryScenario<T::Vertex>> {
        let counts = self
            .counts
            .iter()
            .map(|(v, c)| Ok((topo.parse(v)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        let placement = Placement::from_counts(&counts)?;
        if placement.robots() != self.order.len() {
            return Err(Error::Input(
                "order length differs from the number of robots".into(),
            ));
        }
        Ok(AdversaryScenario {
            name: self.name.clone(),
            placement,
            schedule: Schedule::new(self.order.clone())?,
            expected: self.expected,
            rationale: self.rationale.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("scenario file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GatherGrid;
    use crate::hypercube::GatherHypercube;
    use crate::topology::{Cell, Grid};

    #[test]
    fn explicit_graph_distances() {
        let k = ExplicitGraph::complete_bipartite(3).unwrap();
        assert_eq!(k.dist(0, 1), 2);
        assert_eq!(k.dist(0, 4), 1);
        assert_eq!(k.adjacent(4), vec![0, 1, 2]);
        let c = ExplicitGraph::clique(5).unwrap();
        assert_eq!(c.adjacent(2), vec![0, 1, 3, 4]);
        assert_eq!(c.parse("v3").unwrap(), 3);
    }

    #[test]
    fn p2_loops_within_two_epochs() {
        let q3 = Cube::new(3).unwrap();
        let s = p2_scenario(&q3, Bits(0), Bits(1)).unwrap();
        let h = GatherHypercube::new().unwrap();
        for outcome in [
            prove_nontermination(&q3, &Greedy, &s, ResolverPolicy::Canonical, 10, false).unwrap(),
            prove_nontermination(&q3, &h, &s, ResolverPolicy::Canonical, 10, false).unwrap(),
        ] {
            let ProofOutcome::Certificate(c) = outcome else {
                panic!("{outcome:?}")
            };
            assert!(c.replays());
            assert!(c.detected_after_rounds() <= 6);
        }
        assert_eq!(
            prove_nontermination(&q3, &h, &s, ResolverPolicy::Canonical, 10, true).unwrap(),
            ProofOutcome::Rejected("P2".into())
        );
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let s = p2_scenario(&Grid, Cell::new(0, 0), Cell::new(0, 1)).unwrap();
        let ProofOutcome::Certificate(mut c) =
            prove_nontermination(&Grid, &Greedy, &s, ResolverPolicy::Canonical, 10, false).unwrap()
        else {
            panic!()
        };
        assert!(c.replays_under(&Grid, &Greedy));
        c.moves[0].to = Cell::new(1, 0);
        assert!(!c.replays());
    }

    #[test]
    fn p3_class_counts() {
        let q3 = Cube::new(3).unwrap();
        let cube = p3_classes(&q3, Bits(0)).unwrap();
        assert_eq!(cube.len(), 1);
        assert_eq!(cube[0].len(), 3);
        let grid = p3_classes(&Grid, Cell::new(0, 0)).unwrap();
        let mut sizes: Vec<usize> = grid.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
    }

    #[test]
    fn straight_path_gathers_on_the_grid() {
        let s = p3_scenario(
            &Grid,
            (Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2)),
            ExpectedVerdict::Gathered,
        )
        .unwrap();
        let g = GatherGrid::new().unwrap();
        let out =
            prove_nontermination(&Grid, &g, &s, ResolverPolicy::Adversarial, 30, true).unwrap();
        assert!(matches!(out, ProofOutcome::Gathered { .. }), "{out:?}");
    }

    #[test]
    fn move_across_needs_one_epoch() {
        let all = clique_bipartite_scenarios(3).unwrap();
        let (g, s) = &all[2];
        let out =
            prove_nontermination(g, &MoveAcross, s, ResolverPolicy::Adversarial, 5, false).unwrap();
        assert_eq!(out, ProofOutcome::Gathered { epochs: 1 });
    }

    #[test]
    fn scenario_file_round_trip() {
        let q3 = Cube::new(3).unwrap();
        let s = p2_scenario(&q3, Bits(0), Bits(4)).unwrap();
        let f = ScenarioFile::from_scenario("hypercube:3", &q3, &s);
        let back = ScenarioFile::from_json(&f.to_json())
            .unwrap()
            .to_scenario(&q3)
            .unwrap();
        assert_eq!(back, s);
    }
}
