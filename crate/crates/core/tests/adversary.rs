mod common;

use rrgather::adversary::*;
use rrgather::swarm::*;
use rrgather::topology::*;
use rrgather::verifier::ResolverPolicy;

#[test]
fn p2_premises() {
    let q4 = Cube::new(4).unwrap();
    let s = p2_scenario(&q4, Bits(0), Bits(4)).unwrap();
    assert_eq!(s.placement.robots(), 3);
    assert_eq!(
        s.placement.counts().into_iter().collect::<Vec<_>>(),
        [(Bits(0), 2), (Bits(4), 1)]
    );
    assert_eq!(s.expected, ExpectedVerdict::Recurrence);
    assert!(p2_scenario(&q4, Bits(0), Bits(3)).is_err());
    assert!(p2_scenario(&Grid, Cell::new(0, 0), Cell::new(1, 1)).is_err());
}

#[test]
fn algorithms_refuse_short_paths() {
    let q3 = Cube::new(3).unwrap();
    let h = common::hypercube();
    let classes = p3_classes(&q3, Bits(0)).unwrap();
    assert_eq!(classes.len(), 1);
    let s = p3_scenario(&q3, classes[0][0], ExpectedVerdict::Rejected).unwrap();
    let out = prove_nontermination(&q3, h, &s, ResolverPolicy::Adversarial, 10, true).unwrap();
    assert_eq!(out, ProofOutcome::Rejected("P3".into()));
    let p2 = p2_scenario(&q3, Bits(0), Bits(1)).unwrap();
    assert_eq!(
        prove_nontermination(&q3, h, &p2, ResolverPolicy::Canonical, 10, true).unwrap(),
        ProofOutcome::Rejected("P2".into())
    );

    let g = common::grid();
    let grid_classes = p3_classes(&Grid, Cell::new(0, 0)).unwrap();
    let bent = grid_classes.iter().find(|c| c.len() == 4).unwrap()[0];
    let straight = grid_classes.iter().find(|c| c.len() == 2).unwrap()[0];
    let s = p3_scenario(&Grid, bent, ExpectedVerdict::Rejected).unwrap();
    assert_eq!(
        prove_nontermination(&Grid, g, &s, ResolverPolicy::Adversarial, 10, true).unwrap(),
        ProofOutcome::Rejected("twoByTwoThree".into())
    );
    let s = p3_scenario(&Grid, straight, ExpectedVerdict::Gathered).unwrap();
    let out = prove_nontermination(&Grid, g, &s, ResolverPolicy::Adversarial, 20, true).unwrap();
    assert!(matches!(out, ProofOutcome::Gathered { .. }), "{out:?}");
}

#[test]
fn p2_certificates_replay_under_each_algorithm() {
    let q4 = Cube::new(4).unwrap();
    let s = p2_scenario(&q4, Bits(5), Bits(7)).unwrap();
    for policy in [ResolverPolicy::Canonical, ResolverPolicy::Adversarial] {
        let ProofOutcome::Certificate(c) =
            prove_nontermination(&q4, common::hypercube(), &s, policy, 4, false).unwrap()
        else {
            panic!("no loop under {policy:?}");
        };
        assert!(c.replays_under(&q4, common::hypercube()));
        assert_eq!(c.span % 3, 0);
        assert!(c.render(&q4).contains("loop of"));
    }
}

#[test]
fn full_cube_chase() {
    let q3 = Cube::new(3).unwrap();
    let p = full_graph_placement(&q3).unwrap();
    assert_eq!(p.robots(), 9);
    assert_eq!(p.configuration().occ(), 8);
    match full_graph_scenario(&q3, &ToOccupied).unwrap() {
        ChaseOutcome::Scenario(s, _) => {
            let out =
                prove_nontermination(&q3, &ToOccupied, &s, ResolverPolicy::Canonical, 100, false)
                    .unwrap();
            let ProofOutcome::Certificate(c) = out else {
                panic!("{out:?}")
            };
            assert!(c.replays_under(&q3, &ToOccupied));
        }
        other => panic!("{other:?}"),
    }
    // The hypercube algorithm refuses the full cube outright.
    assert!(matches!(
        full_graph_scenario(&q3, common::hypercube()).unwrap(),
        ChaseOutcome::Inapplicable(_)
    ));
}

#[test]
fn clique_and_bipartite_scenarios() {
    let k5 = clique_bipartite_scenarios(5).unwrap();
    assert_eq!(k5.len(), 3);
    for (g, s) in &k5 {
        for &v in s.placement.positions() {
            assert!(v < g.vertex_count());
        }
    }
    let (g, s) = &k5[1];
    let sides: std::collections::BTreeSet<u8> = s
        .placement
        .configuration()
        .occupied()
        .iter()
        .map(|&v| g.side(v).unwrap())
        .collect();
    assert_eq!(sides.len(), 2);
    let ProofOutcome::Certificate(c) =
        prove_nontermination(g, &ToOccupied, s, ResolverPolicy::Canonical, 64, false).unwrap()
    else {
        panic!("bipartite split should loop");
    };
    assert!(c.replays_under(g, &ToOccupied));
    assert!(clique_bipartite_scenarios(1).is_err());
}

#[test]
fn nice_star_on_gathered_traces() {
    let q4 = Cube::new(4).unwrap();
    let p = Placement::from_positions(vec![Bits(0), Bits(3), Bits(5), Bits(6)]).unwrap();
    let t = run(
        &q4,
        common::hypercube(),
        &p,
        &Schedule::canonical(4),
        &mut Resolver::Canonical,
        RunOptions::new(40),
    )
    .unwrap();
    assert!(matches!(
        check_nice_star_necessity(&q4, &t),
        NiceStarCheck::Pass(_)
    ));
    let pair = Placement::from_positions(vec![Bits(0), Bits(3)]).unwrap();
    let t = run(
        &q4,
        common::hypercube(),
        &pair,
        &Schedule::canonical(2),
        &mut Resolver::Canonical,
        RunOptions::new(40),
    )
    .unwrap();
    assert_eq!(check_nice_star_necessity(&q4, &t), NiceStarCheck::Skipped);
}

#[test]
fn separated_pairs_close_in() {
    let q4 = Cube::new(4).unwrap();
    let pairs: Vec<(Bits, Bits)> = q4
        .vertices()
        .flat_map(|v| q4.vertices().map(move |w| (v, w)))
        .filter(|(v, w)| q4.dist(*v, *w) >= 2)
        .collect();
    assert_eq!(
        check_pair_distance_reduction(&q4, common::hypercube(), &pairs),
        Ok(())
    );
    let diag = [
        (Cell::new(0, 0), Cell::new(1, 1)),
        (Cell::new(1, 1), Cell::new(0, 0)),
    ];
    assert_eq!(
        check_pair_distance_reduction(&Grid, common::grid(), &diag),
        Ok(())
    );
    assert!(check_pair_distance_reduction(&q4, &SmallestLabel, &[(Bits(0), Bits(12))]).is_err());
}

#[test]
fn scenario_files() {
    let q3 = Cube::new(3).unwrap();
    let s = p2_scenario(&q3, Bits(0), Bits(1)).unwrap();
    let f = ScenarioFile::from_scenario("hypercube:3", &q3, &s);
    let back = ScenarioFile::from_json(&f.to_json()).unwrap();
    assert_eq!(back.to_scenario(&q3).unwrap(), s);
    assert!(ScenarioFile::from_json("{\"name\": 3}").is_err());
    let mut bad = f.clone();
    bad.order.pop();
    assert!(bad.to_scenario(&q3).is_err());
    let mut off = f;
    off.counts[0].0 = "0000".into();
    assert!(off.to_scenario(&q3).is_err());
}
