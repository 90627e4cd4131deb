//! Property suites shared by the property tests and the acceptance run.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rrgather::grid::GatherGrid;
use rrgather::hypercube::GatherHypercube;
use rrgather::swarm::{
    decide, run, Algorithm, Configuration, Placement, Resolver, RunOptions, Schedule, Snapshot,
};
use rrgather::topology::{
    canonical_form, Bits, Cell, Cube, Grid, GridAutomorphism, Symmetric, Topology,
};
use rrgather::verifier::equivariance_check;
use std::sync::OnceLock;

pub fn hypercube() -> &'static GatherHypercube {
    static ALG: OnceLock<GatherHypercube> = OnceLock::new();
    ALG.get_or_init(|| GatherHypercube::new().expect("hypercube table certifies"))
}

pub fn grid() -> &'static GatherGrid {
    static ALG: OnceLock<GatherGrid> = OnceLock::new();
    ALG.get_or_init(|| GatherGrid::new().expect("grid table certifies"))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

/// Occupied cube vertices (at least two) and a per-vertex pair of counts.
fn cube_counts() -> impl Strategy<Value = (u32, Vec<(u32, u32, u32)>)> {
    (3u32..=5).prop_flat_map(|d| {
        let n = 1u32 << d;
        (
            Just(d),
            proptest::collection::vec((0..n, 1u32..=3, 1u32..=3), 2..=7),
        )
    })
}

fn grid_counts() -> impl Strategy<Value = Vec<((i32, i32), u32, u32)>> {
    proptest::collection::vec(((-4i32..=4, -4i32..=4), 1u32..=3, 1u32..=3), 2..=7)
}

/// Two placements with equal occupancy but different hidden counts give the
/// same decision to robots on the same vertex.
fn blind_on<T: Topology, A: Algorithm<T>>(
    topo: &T,
    alg: &A,
    cells: Vec<(T::Vertex, u32, u32)>,
) -> Result<(), TestCaseError> {
    let mut seen = std::collections::BTreeSet::new();
    let cells: Vec<_> = cells.into_iter().filter(|c| seen.insert(c.0)).collect();
    let a: Vec<(T::Vertex, u32)> = cells.iter().map(|c| (c.0, c.1)).collect();
    let b: Vec<(T::Vertex, u32)> = cells.iter().rev().map(|c| (c.0, c.2)).collect();
    let pa = Placement::from_counts(&a).unwrap();
    let pb = Placement::from_counts(&b).unwrap();
    prop_assert_eq!(pa.configuration(), pb.configuration());
    for ra in 0..pa.robots() {
        let v = pa.position(ra).unwrap();
        let rb = (0..pb.robots())
            .find(|&r| pb.position(r) == Some(v))
            .unwrap();
        let da = decide(topo, alg, &pa, ra).map_err(|e| e.to_string());
        let db = decide(topo, alg, &pb, rb).map_err(|e| e.to_string());
        prop_assert_eq!(da, db);
    }
    Ok(())
}

pub fn multiplicity_blindness(cases: u32) -> Result<u32, String> {
    let mut r = runner(cases / 2);
    r.run(&cube_counts(), |(d, cells)| {
        let cube = Cube::new(d).unwrap();
        blind_on(
            &cube,
            hypercube(),
            cells.into_iter().map(|(v, a, b)| (Bits(v), a, b)).collect(),
        )
    })
    .map_err(|e| e.to_string())?;
    let mut r = runner(cases - cases / 2);
    r.run(&grid_counts(), |cells| {
        blind_on(
            &Grid,
            grid(),
            cells
                .into_iter()
                .map(|((x, y), a, b)| (Cell::new(x, y), a, b))
                .collect(),
        )
    })
    .map_err(|e| e.to_string())?;
    Ok(cases)
}

fn snapshot_of_set<V: Copy + Ord>(set: Vec<V>, pick: usize) -> Snapshot<V> {
    let config = Configuration::new(set);
    let me = config.occupied()[pick % config.occ()];
    Snapshot { config, me }
}

/// Offers commute with every automorphism of `Q_3` and `Q_4`, and with the
/// dihedral group plus shifts on grid patterns.
pub fn offer_equivariance(cases: u32) -> Result<u32, String> {
    let mut checked = 0u32;
    for d in [3u32, 4] {
        let cube = Cube::new(d).unwrap();
        let n = 1u32 << d;
        let mut r = runner(cases);
        r.run(
            &(proptest::collection::vec(0..n, 2..=9), any::<usize>()),
            |(set, pick)| {
                let snap = snapshot_of_set(set.into_iter().map(Bits).collect(), pick);
                if let Err(w) = equivariance_check(&cube, hypercube(), &[snap]) {
                    return Err(TestCaseError::fail(format!("{w:?}")));
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
        checked += cases;
    }
    let mut r = runner(cases);
    r.run(
        &(
            proptest::collection::vec((0i32..5, 0i32..5), 2..=8),
            any::<usize>(),
            -6i32..6,
            -6i32..6,
        ),
        |(set, pick, dr, dc)| {
            let snap = snapshot_of_set(
                set.into_iter()
                    .map(|(x, y)| Cell::new(x + dr, y + dc))
                    .collect(),
                pick,
            );
            if let Err(w) = equivariance_check(&Grid, grid(), &[snap]) {
                return Err(TestCaseError::fail(format!("{w:?}")));
            }
            Ok(())
        },
    )
    .map_err(|e| e.to_string())?;
    Ok(checked + cases)
}

/// Each epoch activates every robot once, in schedule order, and each round
/// moves only the active robot by at most one edge.
pub fn fairness_and_atomicity(cases: u32) -> Result<u32, String> {
    let mut r = runner(cases);
    let strat = (
        proptest::collection::vec(0u32..16, 2..=6),
        any::<u64>(),
        1u64..=4,
    );
    r.run(&strat, |(pos, seed, epochs)| {
        let cube = Cube::new(4).unwrap();
        let placement = Placement::from_positions(pos.into_iter().map(Bits).collect()).unwrap();
        let k = placement.robots();
        let schedule = Schedule::seeded(k, seed);
        let mut resolver = Resolver::seeded(seed);
        let trace = run(
            &cube,
            hypercube(),
            &placement,
            &schedule,
            &mut resolver,
            RunOptions::unchecked(epochs),
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut p = placement.clone();
        for (i, s) in trace.steps.iter().enumerate() {
            prop_assert_eq!(s.round, i as u64 + 1);
            prop_assert_eq!(s.robot, schedule.order()[i % k]);
            prop_assert_eq!(s.epoch, i as u64 / k as u64 + 1);
            prop_assert_eq!(Some(s.active), p.position(s.robot));
            prop_assert!(s.dest == s.active || cube.is_edge(s.active, s.dest));
            let before = p.positions().to_vec();
            let mut next: Vec<Bits> = before.clone();
            next[s.robot] = s.dest;
            p = Placement::from_positions(next).unwrap();
            for (j, (x, y)) in before.iter().zip(p.positions()).enumerate() {
                if j != s.robot {
                    prop_assert_eq!(x, y);
                }
            }
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(cases)
}

/// Canonical forms do not change under automorphisms.
pub fn canonical_invariance(cases: u32) -> Result<u32, String> {
    let mut r = runner(cases);
    r.run(
        &(
            3u32..=5,
            proptest::collection::vec(any::<u32>(), 1..=10),
            any::<usize>(),
        ),
        |(d, raw, g)| {
            let cube = Cube::new(d).unwrap();
            let set: Vec<Bits> = raw
                .into_iter()
                .map(|x| Bits(x & cube.full_mask()))
                .collect();
            let group = cube.group_sample().unwrap();
            let a = &group[g % group.len()];
            let image: Vec<Bits> = set.iter().map(|&v| cube.apply(a, v)).collect();
            prop_assert_eq!(
                canonical_form(&cube, &set).unwrap(),
                canonical_form(&cube, &image).unwrap()
            );
            Ok(())
        },
    )
    .map_err(|e| e.to_string())?;
    let mut r = runner(cases);
    let strat = (
        proptest::collection::vec((-20i32..20, -20i32..20), 1..=10),
        0usize..8,
        -50i32..50,
        -50i32..50,
    );
    r.run(&strat, |(raw, g, dr, dc)| {
        let set: Vec<Cell> = raw.into_iter().map(|(x, y)| Cell::new(x, y)).collect();
        let a = Grid.compose(
            &GridAutomorphism::translation(dr, dc),
            &GridAutomorphism::point_group()[g],
        );
        let image: Vec<Cell> = set.iter().map(|&v| Grid.apply(&a, v)).collect();
        prop_assert_eq!(
            canonical_form(&Grid, &set).unwrap(),
            canonical_form(&Grid, &image).unwrap()
        );
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(2 * cases)
}
