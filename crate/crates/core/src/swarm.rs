//! Round-Robin execution engine for oblivious, multiplicity-blind robots.
//!
//! The engine owns robot identities and hidden multiplicities. Algorithms only
//! ever see a [`Snapshot`]: the occupied set plus the active robot's vertex.

use crate::error::{input, Error, Result};
use crate::topology::Topology;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

/// Ground truth: the vertex of every robot. Indices are engine-internal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement<V> {
    positions: Vec<V>,
}

impl<V: Copy + Ord> Placement<V> {
    pub fn from_positions(positions: Vec<V>) -> Result<Self> {
        if positions.is_empty() {
            return input("a placement needs at least one robot");
        }
        Ok(Placement { positions })
    }

    /// Robots are numbered in the order the counts are listed.
    pub fn from_counts(counts: &[(V, u32)]) -> Result<Self> {
        let mut positions = Vec::new();
        for &(v, n) in counts {
            if n == 0 {
                return input("robot counts must be at least one");
            }
            positions.extend(std::iter::repeat_n(v, n as usize));
        }
        Self::from_positions(positions)
    }

    pub fn robots(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[V] {
        &self.positions
    }

    pub fn position(&self, robot: usize) -> Option<V> {
        self.positions.get(robot).copied()
    }

    pub fn counts(&self) -> BTreeMap<V, u32> {
        let mut m = BTreeMap::new();
        for &v in &self.positions {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }

    pub fn configuration(&self) -> Configuration<V> {
        Configuration::new(self.positions.clone())
    }

    pub(crate) fn move_robot(&mut self, robot: usize, to: V) {
        self.positions[robot] = to;
    }
}

/// The occupied set, with no multiplicity information.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration<V> {
    occupied: Vec<V>,
}

impl<V: Copy + Ord> Configuration<V> {
    pub fn new(mut vertices: Vec<V>) -> Self {
        vertices.sort();
        vertices.dedup();
        Configuration { occupied: vertices }
    }

    pub fn occupied(&self) -> &[V] {
        &self.occupied
    }

    pub fn occ(&self) -> usize {
        self.occupied.len()
    }

    pub fn contains(&self, v: V) -> bool {
        self.occupied.binary_search(&v).is_ok()
    }

    pub fn is_gathered(&self) -> bool {
        self.occupied.len() == 1
    }

    /// Maximum pairwise distance among occupied vertices.
    pub fn delta<T: Topology<Vertex = V>>(&self, topo: &T) -> u32 {
        let mut best = 0;
        for (i, &u) in self.occupied.iter().enumerate() {
            for &v in &self.occupied[i + 1..] {
                best = best.max(topo.dist(u, v));
            }
        }
        best
    }
}

/// What the active robot observes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot<V> {
    pub config: Configuration<V>,
    pub me: V,
}

pub fn snapshot_of<V: Copy + Ord>(placement: &Placement<V>, robot: usize) -> Result<Snapshot<V>> {
    let Some(me) = placement.position(robot) else {
        return input(format!(
            "robot index {robot} out of range (k = {})",
            placement.robots()
        ));
    };
    Ok(Snapshot {
        config: placement.configuration(),
        me,
    })
}

/// Admissible destinations for the active robot; its own vertex means nil.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveOffer<V> {
    dests: Vec<V>,
}

impl<V: Copy + Ord> MoveOffer<V> {
    pub fn nil(me: V) -> Self {
        MoveOffer { dests: vec![me] }
    }

    /// Offer of the given destinations, or nil when there are none.
    pub fn of(me: V, mut dests: Vec<V>) -> Self {
        if dests.is_empty() {
            return Self::nil(me);
        }
        dests.sort();
        dests.dedup();
        MoveOffer { dests }
    }

    pub fn dests(&self) -> &[V] {
        &self.dests
    }

    pub fn is_nil(&self, me: V) -> bool {
        self.dests.len() == 1 && self.dests[0] == me
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision<V> {
    pub offer: MoveOffer<V>,
    /// Task whose precondition fired, if the algorithm names its tasks.
    pub task: Option<&'static str>,
}

impl<V: Copy + Ord> Decision<V> {
    pub fn nil(me: V, task: Option<&'static str>) -> Self {
        Decision {
            offer: MoveOffer::nil(me),
            task,
        }
    }
}

/// A deterministic, oblivious robot algorithm.
pub trait Algorithm<T: Topology>: Send + Sync {
    fn name(&self) -> &'static str;

    fn decide(&self, topo: &T, snap: &Snapshot<T::Vertex>) -> Result<Decision<T::Vertex>>;

    /// Task label of a configuration, as used for transition reports.
    fn task_of(&self, _topo: &T, _config: &Configuration<T::Vertex>) -> Option<&'static str> {
        None
    }

    /// Rejects initial configurations the algorithm cannot gather.
    fn validate_initial(&self, _topo: &T, _config: &Configuration<T::Vertex>) -> Result<()> {
        Ok(())
    }
}

/// Fixed activation order; round `r` (1-based) activates `order[(r-1) % k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    order: Vec<usize>,
}

impl Schedule {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || seen[i] {
                return input(format!(
                    "{order:?} is not a permutation of 0..{}",
                    order.len()
                ));
            }
            seen[i] = true;
        }
        if order.is_empty() {
            return input("empty schedule");
        }
        Ok(Schedule { order })
    }

    pub fn canonical(k: usize) -> Self {
        Schedule {
            order: (0..k).collect(),
        }
    }

    pub fn seeded(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        Schedule { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn k(&self) -> usize {
        self.order.len()
    }

    /// Robot active at 0-based schedule position `pos`.
    pub fn active(&self, pos: usize) -> usize {
        self.order[pos % self.order.len()]
    }

    pub fn epoch_of_round(&self, round: u64) -> u64 {
        round.div_ceil(self.k() as u64)
    }
}

/// Picks one destination out of an offer.
#[derive(Debug, Clone)]
pub enum Resolver {
    /// Smallest destination.
    Canonical,
    Seeded(Box<ChaCha8Rng>),
    /// Offer indices in order; falls back to the smallest destination.
    Scripted(std::collections::VecDeque<usize>),
}

impl Resolver {
    pub fn seeded(seed: u64) -> Self {
        Resolver::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn pick<V: Copy>(&mut self, offer: &MoveOffer<V>) -> V {
        match self {
            Resolver::Canonical => offer.dests[0],
            Resolver::Seeded(rng) => offer.dests[rng.gen_range(0..offer.dests.len())],
            Resolver::Scripted(choices) => {
                let i = choices.pop_front().unwrap_or(0);
                offer.dests[i.min(offer.dests.len() - 1)]
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Resolver::Canonical)
    }
}

/// One Look-Compute-Move step as recorded in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep<V> {
    pub round: u64,
    pub epoch: u64,
    pub robot: usize,
    /// Configuration observed before the move.
    pub config: Configuration<V>,
    pub active: V,
    pub dest: V,
    pub task: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Gathered at the end of the given epoch, followed by one quiescent epoch.
    Gathered {
        epochs: u64,
    },
    HorizonExhausted,
    /// The state after round `first_round` reappeared after round `first_round + period`.
    Recurrence {
        first_round: u64,
        period: u64,
    },
}

#[derive(Debug, Clone)]
pub struct Trace<V> {
    pub initial: Placement<V>,
    pub schedule: Schedule,
    pub steps: Vec<TraceStep<V>>,
    pub verdict: Verdict,
}

impl<V: Copy + Ord> Trace<V> {
    pub fn final_placement(&self) -> Placement<V> {
        let mut p = self.initial.clone();
        for s in &self.steps {
            p.move_robot(s.robot, s.dest);
        }
        p
    }

    pub fn max_epoch(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.epoch)
    }
}

/// Computes the active robot's decision and checks the offer contract.
pub fn decide<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    placement: &Placement<T::Vertex>,
    robot: usize,
) -> Result<Decision<T::Vertex>> {
    let snap = snapshot_of(placement, robot)?;
    let decision = alg.decide(topo, &snap)?;
    check_offer(topo, &snap, &decision.offer)?;
    Ok(decision)
}

pub(crate) fn check_offer<T: Topology>(
    topo: &T,
    snap: &Snapshot<T::Vertex>,
    offer: &MoveOffer<T::Vertex>,
) -> Result<()> {
    if offer.dests.is_empty() {
        return Err(Error::Contract("empty move offer".into()));
    }
    for &d in &offer.dests {
        if topo.check(d).is_err() || (d != snap.me && !topo.is_edge(snap.me, d)) {
            return Err(Error::Contract(format!(
                "offer from {} contains non-neighbor {}",
                topo.render(snap.me),
                topo.render(d)
            )));
        }
    }
    Ok(())
}

/// Placement after a round, and the round's record.
pub type Stepped<V> = (Placement<V>, TraceStep<V>);

/// Executes round `round` (1-based): activates the scheduled robot and moves it.
pub fn step<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    placement: &Placement<T::Vertex>,
    schedule: &Schedule,
    round: u64,
    resolver: &mut Resolver,
) -> Result<Stepped<T::Vertex>> {
    if round == 0 {
        return input("rounds are numbered from 1");
    }
    if schedule.k() != placement.robots() {
        return input("schedule length differs from the number of robots");
    }
    let robot = schedule.active((round - 1) as usize);
    let decision = decide(topo, alg, placement, robot)?;
    let active = placement.positions[robot];
    let dest = resolver.pick(&decision.offer);
    let mut next = placement.clone();
    next.move_robot(robot, dest);
    let record = TraceStep {
        round,
        epoch: schedule.epoch_of_round(round),
        robot,
        config: placement.configuration(),
        active,
        dest,
        task: decision.task,
    };
    Ok((next, record))
}

/// True when every robot would stay put for a whole epoch.
pub fn is_quiescent<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    placement: &Placement<T::Vertex>,
) -> Result<bool> {
    for robot in 0..placement.robots() {
        let d = decide(topo, alg, placement, robot)?;
        if !d.offer.is_nil(placement.positions[robot]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub max_epochs: u64,
    /// Ask the algorithm to vet the initial configuration.
    pub check_initial: bool,
}

impl RunOptions {
    pub fn new(max_epochs: u64) -> Self {
        RunOptions {
            max_epochs,
            check_initial: true,
        }
    }

    pub fn unchecked(max_epochs: u64) -> Self {
        RunOptions {
            max_epochs,
            check_initial: false,
        }
    }
}

/// Runs until gathering (plus a quiescent epoch), the horizon, or a repeated
/// state. Recurrence is only tracked with a deterministic resolver.
pub fn run<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    initial: &Placement<T::Vertex>,
    schedule: &Schedule,
    resolver: &mut Resolver,
    opts: RunOptions,
) -> Result<Trace<T::Vertex>> {
    if opts.max_epochs == 0 {
        return input("horizon must be at least one epoch");
    }
    if schedule.k() != initial.robots() {
        return input("schedule length differs from the number of robots");
    }
    for &v in initial.positions() {
        topo.check(v)?;
    }
    let config = initial.configuration();
    if opts.check_initial && !config.is_gathered() {
        alg.validate_initial(topo, &config)?;
    }
    let mut trace = Trace {
        initial: initial.clone(),
        schedule: schedule.clone(),
        steps: Vec::new(),
        verdict: Verdict::HorizonExhausted,
    };
    if config.is_gathered() && is_quiescent(topo, alg, initial)? {
        trace.verdict = Verdict::Gathered { epochs: 0 };
        return Ok(trace);
    }
    let k = schedule.k() as u64;
    let track = resolver.is_deterministic();
    let mut seen: HashMap<(Vec<T::Vertex>, u64), u64> = HashMap::new();
    if track {
        seen.insert((initial.positions.clone(), 0), 0);
    }
    let mut placement = initial.clone();
    for round in 1..=opts.max_epochs * k {
        let (next, record) = step(topo, alg, &placement, schedule, round, resolver)?;
        let moved = record.dest != record.active;
        trace.steps.push(record);
        placement = next;
        if moved && placement.configuration().is_gathered() && is_quiescent(topo, alg, &placement)?
        {
            trace.verdict = Verdict::Gathered {
                epochs: schedule.epoch_of_round(round),
            };
            return Ok(trace);
        }
        if track {
            let key = (placement.positions.clone(), round % k);
            if let Some(&first) = seen.get(&key) {
                trace.verdict = Verdict::Recurrence {
                    first_round: first,
                    period: round - first,
                };
                return Ok(trace);
            }
            seen.insert(key, round);
        }
    }
    Ok(trace)
}

/// Unoccupied vertices adjacent to every occupied vertex.
pub fn is_nice_star<T: Topology>(topo: &T, config: &Configuration<T::Vertex>) -> Vec<T::Vertex> {
    let Some(&first) = config.occupied().first() else {
        return Vec::new();
    };
    topo.adjacent(first)
        .into_iter()
        .filter(|&c| !config.contains(c) && config.occupied().iter().all(|&v| topo.is_edge(v, c)))
        .collect()
}

/// Per-instance lower bound on gathering epochs: `ceil(Δ/2)`.
pub fn epochs_lower_bound<T: Topology>(topo: &T, config: &Configuration<T::Vertex>) -> u64 {
    u64::from(config.delta(topo)).div_ceil(2)
}

/// Line-delimited trace records:
/// `round epoch robot active_vertex destination occ delta task`, tab separated,
/// robots numbered from 1.
pub fn export_trace<T: Topology>(topo: &T, trace: &Trace<T::Vertex>) -> String {
    let mut out =
        String::from("# round\tepoch\trobot\tactive_vertex\tdestination\tocc\tdelta\ttask\n");
    for s in &trace.steps {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            s.round,
            s.epoch,
            s.robot + 1,
            topo.render(s.active),
            topo.render(s.dest),
            s.config.occ(),
            s.config.delta(topo),
            s.task.unwrap_or("-")
        ));
    }
    out
}
