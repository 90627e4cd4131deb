//! Offers must commute with automorphisms.

use crate::swarm::{Algorithm, Configuration, Snapshot};
use crate::topology::Symmetric;

/// A snapshot and group element where `offer(g(s)) != g(offer(s))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceWitness<V> {
    pub snapshot: Snapshot<V>,
    pub expected: Vec<V>,
    pub got: Vec<V>,
}

/// Checks every snapshot against every element of the topology's group sample.
/// Snapshots the algorithm refuses are skipped when the image is refused too.
pub fn equivariance_check<T: Symmetric, A: Algorithm<T> + ?Sized>(
    topo: &T,
    alg: &A,
    snapshots: &[Snapshot<T::Vertex>],
) -> std::result::Result<usize, EquivarianceWitness<T::Vertex>> {
    let group = match topo.group_sample() {
        Ok(g) => g,
        Err(_) => return Ok(0),
    };
    let mut checked = 0;
    for snap in snapshots {
        let base = alg
            .decide(topo, snap)
            .ok()
            .map(|d| d.offer.dests().to_vec());
        for g in &group {
            let image = Snapshot {
                config: Configuration::new(
                    snap.config
                        .occupied()
                        .iter()
                        .map(|&v| topo.apply(g, v))
                        .collect(),
                ),
                me: topo.apply(g, snap.me),
            };
            let got = alg
                .decide(topo, &image)
                .ok()
                .map(|d| d.offer.dests().to_vec());
            let expected = base.as_ref().map(|b| {
                let mut e: Vec<_> = b.iter().map(|&v| topo.apply(g, v)).collect();
                e.sort();
                e
            });
            if got != expected {
                return Err(EquivarianceWitness {
                    snapshot: image,
                    expected: expected.unwrap_or_default(),
                    got: got.unwrap_or_default(),
                });
            }
            checked += 1;
        }
    }
    Ok(checked)
}
