//! Sweeps over many placements and schedules, aggregated into one report.

use super::certify::permutations;
use super::explore::{
    explore, Exploration, ExploreLimits, ResolverPolicy, TransitionPair, ViolationKind, GATHERING,
};
use crate::error::{Error, Result};
use crate::grid::GatherGrid;
use crate::hypercube::GatherHypercube;
use crate::swarm::{
    epochs_lower_bound, run, Algorithm, Configuration, Placement, Resolver, RunOptions, Schedule,
    Trace,
};
use crate::topology::{mbh, mbr, Bits, Cell, Cube, Grid, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::hash::Hash;

/// Largest number of (placement, schedule) instances a sweep accepts.
pub const MAX_INSTANCES: u64 = 20_000_000;
/// Stored violations per report; the total is always counted.
const KEPT_VIOLATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTopology {
    Hypercube {
        dim: u32,
    },
    /// Placements live in a `rows × cols` box anchored at the origin.
    Grid {
        rows: u32,
        cols: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementPolicy {
    Exhaustive {
        max_robots: u32,
        max_per_vertex: u32,
    },
    /// `count` placements outside the ungatherable set, drawn with `seed`.
    Random {
        count: u32,
        max_robots: u32,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulePolicy {
    All,
    Canonical,
    Sampled { count: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub topology: SweepTopology,
    pub placements: PlacementPolicy,
    pub schedules: SchedulePolicy,
    pub resolver: ResolverPolicy,
    pub horizon_epochs: u64,
    /// Worker threads; 0 picks the number of cores.
    #[serde(default)]
    pub workers: usize,
}

/// A failed instance, replayable with [`replay_hypercube`] or [`replay_grid`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
    /// Rendered vertex and robot count, in robot order.
    pub counts: Vec<(String, u32)>,
    pub order: Vec<usize>,
    pub choices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    /// Placements drawn, including rejected ones.
    pub placements: u64,
    /// Placements refused as ungatherable inputs.
    pub rejected: u64,
    /// (placement, schedule) pairs explored.
    pub instances: u64,
    pub gathered: u64,
    pub states: u64,
    pub max_epochs: u64,
    /// Largest epochs-to-scale ratio; the scale is `d` on hypercubes and the
    /// rectangle's `rows + cols` on the grid.
    pub max_epoch_ratio: f64,
    pub lower_bound_checked: u64,
    pub nice_star_checked: u64,
    pub nice_star_failures: Vec<Violation>,
    pub transition_pairs: BTreeSet<TransitionPair>,
    pub nonconforming_pairs: Vec<TransitionPair>,
    pub cycles: BTreeSet<Vec<&'static str>>,
    pub unexpected_cycles: Vec<Vec<&'static str>>,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Expected task transitions of each algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionTable {
    Hypercube,
    Grid,
}

/// Multi-task cycles the hypercube algorithm is expected to realize.
pub const LISTED_CYCLES: [&[&str]; 4] = [
    &["T2", "T5i", "T5ii"],
    &["T2", "T5ii"],
    &["T2", "T5ii", "T5iii"],
    &["T2", "T5iii"],
];

impl TransitionTable {
    /// Successor tasks of each task; `*` stands for any task after the bound shrinks.
    pub fn rows(self) -> Vec<(&'static str, Vec<&'static str>)> {
        match self {
            TransitionTable::Hypercube => vec![
                ("T1", vec![GATHERING]),
                ("T2", vec!["T2", "T5i", "T5ii", "T5iii", "*"]),
                ("T3", vec!["T2", "T3", "T4", "T5i", "T5ii", "T5iii", "*"]),
                ("T4", vec!["T2", "T4", "T5i", "T5ii", "T5iii", "*"]),
                ("T5i", vec!["T5i", "T5ii"]),
                ("T5ii", vec!["T2", "T5iii"]),
                ("T5iii", vec!["T2", "T5iii"]),
                ("T6", vec!["T2", "T3", "T4", "T5i", "T5ii", "T5iii"]),
                ("T7", vec!["T2", "T3", "T4", "T5i", "T5ii", "T5iii", "T6"]),
                ("T8", vec!["T5i", "T5ii"]),
            ],
            TransitionTable::Grid => vec![
                ("T1", vec!["T2"]),
                ("T2", vec!["T2", "T3"]),
                ("T3", vec!["T3", "T4"]),
                ("T4", vec![GATHERING]),
            ],
        }
    }

    /// Moves inside one endgame task that the table leaves implicit.
    pub fn internal(self) -> &'static str {
        match self {
            TransitionTable::Hypercube => "T1",
            TransitionTable::Grid => "T4",
        }
    }

    pub fn allows(self, p: &TransitionPair) -> bool {
        if p.from == p.to && p.from == self.internal() {
            return true;
        }
        self.rows().iter().any(|(from, tos)| {
            *from == p.from
                && tos
                    .iter()
                    .any(|&t| t == p.to || (t == "*" && p.bound_decreased))
        })
    }
}

/// The first pair not allowed by `table`.
pub fn check_transitions<'a>(
    pairs: impl IntoIterator<Item = &'a TransitionPair>,
    table: TransitionTable,
) -> std::result::Result<(), TransitionPair> {
    match pairs.into_iter().find(|p| !table.allows(p)) {
        Some(p) => Err(p.clone()),
        None => Ok(()),
    }
}

/// Task pairs of consecutive configuration changes in one trace.
pub fn trace_pairs<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    trace: &Trace<T::Vertex>,
    measure: &dyn Fn(&Configuration<T::Vertex>) -> u32,
) -> Vec<TransitionPair> {
    let mut out = Vec::new();
    let mut placement = trace.initial.clone();
    for s in &trace.steps {
        let before = placement.configuration();
        placement.move_robot(s.robot, s.dest);
        let after = placement.configuration();
        if before == after {
            continue;
        }
        let to = if after.is_gathered() {
            GATHERING
        } else {
            alg.task_of(topo, &after).unwrap_or("?")
        };
        out.push(TransitionPair {
            from: alg.task_of(topo, &before).unwrap_or("?"),
            to,
            bound_decreased: measure(&after) < measure(&before),
        });
    }
    out
}

/// Gathered traces need at least `ceil(delta / 2)` epochs.
pub fn check_lower_bound<T: Topology>(topo: &T, trace: &Trace<T::Vertex>) -> Option<bool> {
    match trace.verdict {
        crate::swarm::Verdict::Gathered { epochs } => {
            Some(epochs >= epochs_lower_bound(topo, &trace.initial.configuration()))
        }
        _ => None,
    }
}

pub fn cube_measure(config: &Configuration<Bits>, cube: &Cube) -> u32 {
    mbh(cube, config.occupied()).map_or(0, |b| b.free_dim())
}

pub fn grid_measure(config: &Configuration<Cell>) -> u32 {
    mbr(config.occupied()).map_or(0, |r| r.rows() + r.cols())
}

/// Runs `spec` with the hypercube or grid gathering algorithm.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    match spec.topology {
        SweepTopology::Hypercube { .. } => sweep_hypercube(spec, &GatherHypercube::new()?),
        SweepTopology::Grid { .. } => sweep_grid(spec, &GatherGrid::new()?),
    }
}

pub fn sweep_hypercube<A: Algorithm<Cube> + ?Sized>(
    spec: &SweepSpec,
    alg: &A,
) -> Result<SweepReport> {
    let SweepTopology::Hypercube { dim } = spec.topology else {
        return Err(Error::Input("sweep topology is not a hypercube".into()));
    };
    let cube = Cube::new(dim)?;
    let cells: Vec<Bits> = cube.vertices().collect();
    let measure = move |c: &Configuration<Bits>| cube_measure(c, &cube);
    let scale = move |_: &Configuration<Bits>| f64::from(dim);
    run_sweep(
        &cube,
        alg,
        spec,
        &cells,
        &measure,
        &scale,
        &|_| true,
        TransitionTable::Hypercube,
        true,
    )
}

pub fn sweep_grid<A: Algorithm<Grid> + ?Sized>(spec: &SweepSpec, alg: &A) -> Result<SweepReport> {
    let SweepTopology::Grid { rows, cols } = spec.topology else {
        return Err(Error::Input("sweep topology is not a grid".into()));
    };
    if rows == 0 || cols == 0 || rows * cols > 64 {
        return Err(Error::Input(format!(
            "grid box {rows}x{cols} must have 1..=64 cells"
        )));
    }
    let cells: Vec<Cell> = (0..rows as i32)
        .flat_map(|r| (0..cols as i32).map(move |c| Cell::new(r, c)))
        .collect();
    let scale = |c: &Configuration<Cell>| f64::from(grid_measure(c));
    // One representative per translation class: the rectangle starts at the origin.
    let anchored =
        |c: &Configuration<Cell>| mbr(c.occupied()).is_ok_and(|r| r.min == Cell::new(0, 0));
    run_sweep(
        &Grid,
        alg,
        spec,
        &cells,
        &grid_measure,
        &scale,
        &anchored,
        TransitionTable::Grid,
        false,
    )
}

struct Outcome {
    rejected: bool,
    runs: Vec<(Vec<usize>, Exploration)>,
    counts: Vec<(String, u32)>,
    lower_bound: u64,
    occ: usize,
    scale: f64,
}

#[allow(clippy::too_many_arguments)]
fn run_sweep<T, A>(
    topo: &T,
    alg: &A,
    spec: &SweepSpec,
    cells: &[T::Vertex],
    measure: &(dyn Fn(&Configuration<T::Vertex>) -> u32 + Sync),
    scale: &(dyn Fn(&Configuration<T::Vertex>) -> f64 + Sync),
    keep: &dyn Fn(&Configuration<T::Vertex>) -> bool,
    table: TransitionTable,
    want_cycles: bool,
) -> Result<SweepReport>
where
    T: Topology,
    T::Vertex: Hash,
    A: Algorithm<T> + ?Sized,
{
    if spec.horizon_epochs == 0 {
        return Err(Error::Input("horizon must be at least one epoch".into()));
    }
    let per_placement = |k: usize| -> u64 {
        match spec.schedules {
            SchedulePolicy::All => (1..=k as u64).fold(1u64, |a, x| a.saturating_mul(x)),
            SchedulePolicy::Canonical => 1,
            SchedulePolicy::Sampled { count, .. } => u64::from(count),
        }
    };
    // Refuse before enumerating anything: the bound ignores symmetry filtering.
    let upper = match spec.placements {
        PlacementPolicy::Exhaustive {
            max_robots,
            max_per_vertex,
        } => bounded_compositions(cells.len(), max_robots, max_per_vertex)
            .iter()
            .enumerate()
            .skip(2)
            .fold(0u64, |a, (k, &n)| {
                a.saturating_add(n.saturating_mul(per_placement(k)))
            }),
        PlacementPolicy::Random {
            count, max_robots, ..
        } => u64::from(count).saturating_mul(per_placement(max_robots as usize)),
    };
    if upper > MAX_INSTANCES {
        return Err(Error::Capability(format!(
            "sweep needs up to {upper} instances, limit is {MAX_INSTANCES}"
        )));
    }
    let placements = draw_placements(topo, alg, spec, cells, keep)?;
    let limits = ExploreLimits::new(spec.horizon_epochs, spec.resolver);
    let work = |(i, p): (usize, &Placement<T::Vertex>)| -> Outcome {
        let config = p.configuration();
        let counts: Vec<(String, u32)> = counts_in_order(p)
            .into_iter()
            .map(|(v, c)| (topo.render(v), c))
            .collect();
        let mut out = Outcome {
            rejected: false,
            runs: Vec::new(),
            counts,
            lower_bound: epochs_lower_bound(topo, &config),
            occ: config.occ(),
            scale: scale(&config),
        };
        if alg.validate_initial(topo, &config).is_err() {
            out.rejected = true;
            return out;
        }
        for schedule in schedules_for(p.robots(), spec.schedules, i as u64) {
            let e = explore(topo, alg, p, &schedule, measure, limits);
            out.runs.push((schedule.order().to_vec(), e));
        }
        out
    };
    let outcomes: Vec<Outcome> = if spec.workers == 0 {
        placements.par_iter().enumerate().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::Capability(e.to_string()))?;
        pool.install(|| placements.par_iter().enumerate().map(work).collect())
    };

    let mut report = SweepReport {
        spec: *spec,
        placements: placements.len() as u64,
        rejected: 0,
        instances: 0,
        gathered: 0,
        states: 0,
        max_epochs: 0,
        max_epoch_ratio: 0.0,
        lower_bound_checked: 0,
        nice_star_checked: 0,
        nice_star_failures: Vec::new(),
        transition_pairs: BTreeSet::new(),
        nonconforming_pairs: Vec::new(),
        cycles: BTreeSet::new(),
        unexpected_cycles: Vec::new(),
        violation_count: 0,
        violations: Vec::new(),
    };
    for o in outcomes {
        if o.rejected {
            report.rejected += 1;
            continue;
        }
        for (order, e) in o.runs {
            report.instances += 1;
            report.states += e.states as u64;
            report.transition_pairs.extend(e.pairs.iter().cloned());
            if want_cycles {
                report.cycles.extend(e.cycles.iter().cloned());
            }
            let violation = |kind: ViolationKind, detail: String, choices: Vec<usize>| Violation {
                kind: serde_json::to_value(kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                detail,
                counts: o.counts.clone(),
                order: order.clone(),
                choices,
            };
            if let Some(f) = &e.failure {
                report.violation_count += 1;
                if report.violations.len() < KEPT_VIOLATIONS {
                    report
                        .violations
                        .push(violation(f.kind, f.detail.clone(), f.choices.clone()));
                }
                continue;
            }
            report.gathered += 1;
            report.max_epochs = report.max_epochs.max(e.max_epochs());
            if o.scale > 0.0 {
                report.max_epoch_ratio =
                    report.max_epoch_ratio.max(e.max_epochs() as f64 / o.scale);
            }
            report.lower_bound_checked += 1;
            if e.min_epochs() < o.lower_bound {
                report.violation_count += 1;
                if report.violations.len() < KEPT_VIOLATIONS {
                    let detail = format!(
                        "gathered in {} epochs, bound is {}",
                        e.min_epochs(),
                        o.lower_bound
                    );
                    report
                        .violations
                        .push(violation(ViolationKind::LowerBound, detail, vec![]));
                }
            }
            if o.occ >= 3 {
                report.nice_star_checked += 1;
                if !e.nice_star_on_every_path && report.nice_star_failures.len() < KEPT_VIOLATIONS {
                    report.nice_star_failures.push(violation(
                        ViolationKind::NiceStar,
                        "a branch gathers without a nice star".into(),
                        vec![],
                    ));
                }
            }
        }
    }
    report.nonconforming_pairs = report
        .transition_pairs
        .iter()
        .filter(|p| !table.allows(p))
        .cloned()
        .collect();
    report.unexpected_cycles = report
        .cycles
        .iter()
        .filter(|c| !LISTED_CYCLES.iter().any(|l| l.iter().eq(c.iter())))
        .cloned()
        .collect();
    Ok(report)
}

/// Robot counts per vertex in first-robot order.
fn counts_in_order<V: Copy + Ord>(p: &Placement<V>) -> Vec<(V, u32)> {
    let mut out: Vec<(V, u32)> = Vec::new();
    for &v in p.positions() {
        match out.iter_mut().find(|(u, _)| *u == v) {
            Some(e) => e.1 += 1,
            None => out.push((v, 1)),
        }
    }
    out
}

fn schedules_for(k: usize, policy: SchedulePolicy, salt: u64) -> Vec<Schedule> {
    match policy {
        SchedulePolicy::All => permutations(k)
            .into_iter()
            .map(|o| Schedule::new(o).expect("permutation"))
            .collect(),
        SchedulePolicy::Canonical => vec![Schedule::canonical(k)],
        SchedulePolicy::Sampled { count, seed } => (0..u64::from(count))
            .map(|j| Schedule::seeded(k, seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ j))
            .collect(),
    }
}

fn draw_placements<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    spec: &SweepSpec,
    cells: &[T::Vertex],
    keep: &dyn Fn(&Configuration<T::Vertex>) -> bool,
) -> Result<Vec<Placement<T::Vertex>>> {
    match spec.placements {
        PlacementPolicy::Exhaustive {
            max_robots,
            max_per_vertex,
        } => {
            if max_robots < 2 || max_per_vertex == 0 {
                return Err(Error::Input(
                    "exhaustive sweeps need at least two robots".into(),
                ));
            }
            let mut out = Vec::new();
            let mut counts = vec![0u32; cells.len()];
            multisets(&mut counts, 0, max_robots, max_per_vertex, &mut |c| {
                let occ = c.iter().filter(|&&x| x > 0).count();
                let total: u32 = c.iter().sum();
                if occ < 2 || total < 2 {
                    return;
                }
                let placed: Vec<(T::Vertex, u32)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(i, &x)| (cells[i], x))
                    .collect();
                let p = Placement::from_counts(&placed).expect("non-empty counts");
                if keep(&p.configuration()) {
                    out.push(p);
                }
            });
            Ok(out)
        }
        PlacementPolicy::Random {
            count,
            max_robots,
            seed,
        } => {
            if max_robots < 2 {
                return Err(Error::Input(
                    "random sweeps need at least two robots".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            let mut accepted = 0;
            let mut attempts = 0u64;
            while accepted < count {
                attempts += 1;
                if attempts > u64::from(count) * 1000 + 1000 {
                    return Err(Error::Input(
                        "could not draw enough gatherable placements".into(),
                    ));
                }
                let k = rng.gen_range(2..=max_robots);
                let positions: Vec<T::Vertex> = (0..k)
                    .map(|_| cells[rng.gen_range(0..cells.len())])
                    .collect();
                let p = Placement::from_positions(positions)?;
                let config = p.configuration();
                if config.occ() < 2 {
                    continue;
                }
                if alg.validate_initial(topo, &config).is_ok() {
                    accepted += 1;
                }
                out.push(p);
            }
            Ok(out)
        }
    }
}

/// Entry `t`: count vectors of length `n` with entries in `0..=cap` summing to `t`.
fn bounded_compositions(n: usize, max: u32, cap: u32) -> Vec<u64> {
    let mut ways = vec![0u64; max as usize + 1];
    ways[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; ways.len()];
        for (t, &w) in ways.iter().enumerate() {
            for c in 0..=cap as usize {
                if t + c < next.len() {
                    next[t + c] = next[t + c].saturating_add(w);
                }
            }
        }
        ways = next;
    }
    ways
}

fn multisets(counts: &mut [u32], at: usize, left: u32, cap: u32, f: &mut dyn FnMut(&[u32])) {
    if at == counts.len() {
        f(counts);
        return;
    }
    for c in 0..=left.min(cap) {
        counts[at] = c;
        multisets(counts, at + 1, left - c, cap, f);
    }
    counts[at] = 0;
}

/// Re-runs a hypercube violation with its recorded choices.
pub fn replay_hypercube<A: Algorithm<Cube> + ?Sized>(
    cube: &Cube,
    alg: &A,
    v: &Violation,
    horizon_epochs: u64,
) -> Result<Trace<Bits>> {
    replay(cube, alg, v, horizon_epochs)
}

/// Re-runs a grid violation with its recorded choices.
pub fn replay_grid<A: Algorithm<Grid> + ?Sized>(
    alg: &A,
    v: &Violation,
    horizon_epochs: u64,
) -> Result<Trace<Cell>> {
    replay(&Grid, alg, v, horizon_epochs)
}

fn replay<T: Topology, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    v: &Violation,
    horizon_epochs: u64,
) -> Result<Trace<T::Vertex>> {
    let counts = v
        .counts
        .iter()
        .map(|(s, c)| Ok((topo.parse(s)?, *c)))
        .collect::<Result<Vec<_>>>()?;
    let placement = Placement::from_counts(&counts)?;
    let schedule = Schedule::new(v.order.clone())?;
    let mut resolver = Resolver::Scripted(v.choices.iter().copied().collect::<VecDeque<_>>());
    run(
        topo,
        alg,
        &placement,
        &schedule,
        &mut resolver,
        RunOptions::unchecked(horizon_epochs),
    )
}
