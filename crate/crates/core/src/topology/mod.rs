//! Graph geometry: hypercubes `Q_d` and the infinite square grid.
//!
//! Both topologies implement [`Topology`] (adjacency, distance, rendering) and
//! [`Symmetric`] (automorphisms and canonical occupancy keys).

mod cube;
mod grid;

pub use cube::{axis_splits, mbh, Bits, Cube, CubeAutomorphism, SubCube};
pub use grid::{mbr, Cell, Grid, GridAutomorphism, Rect};

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::hash::Hash;

pub trait Topology: Send + Sync {
    type Vertex: Copy + Eq + Ord + Hash + Debug + Send + Sync;

    /// Rejects vertices that do not belong to this topology.
    fn check(&self, v: Self::Vertex) -> Result<()>;
    /// Adjacent vertices of a well-formed vertex, in ascending order.
    fn adjacent(&self, v: Self::Vertex) -> Vec<Self::Vertex>;
    /// Graph distance between two well-formed vertices.
    fn dist(&self, u: Self::Vertex, v: Self::Vertex) -> u32;
    fn render(&self, v: Self::Vertex) -> String;
    fn parse(&self, s: &str) -> Result<Self::Vertex>;

    fn is_edge(&self, u: Self::Vertex, v: Self::Vertex) -> bool {
        self.dist(u, v) == 1
    }
}

/// Adjacent vertices of `v`, validating it first.
pub fn neighbors<T: Topology>(topo: &T, v: T::Vertex) -> Result<Vec<T::Vertex>> {
    topo.check(v)?;
    Ok(topo.adjacent(v))
}

/// Graph distance, validating both endpoints.
pub fn distance<T: Topology>(topo: &T, u: T::Vertex, v: T::Vertex) -> Result<u32> {
    topo.check(u)?;
    topo.check(v)?;
    Ok(topo.dist(u, v))
}

/// Occupancy key that is equal for two sets iff an automorphism maps one onto the other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CanonicalKey {
    /// Minimal occupancy bitset over the hyperoctahedral group.
    Cube(u64),
    /// Minimal sorted cell list over the dihedral group, translated to the origin.
    Grid(Vec<(i32, i32)>),
}

pub trait Symmetric: Topology {
    type Automorphism: Clone + Debug + PartialEq + Send + Sync;

    fn apply(&self, a: &Self::Automorphism, v: Self::Vertex) -> Self::Vertex;
    fn compose(&self, a: &Self::Automorphism, b: &Self::Automorphism) -> Self::Automorphism;
    fn inverse(&self, a: &Self::Automorphism) -> Self::Automorphism;
    fn identity(&self) -> Self::Automorphism;
    /// Group elements used by equivariance checks: the whole group when it is
    /// finite and small, the point group combined with a few shifts otherwise.
    fn group_sample(&self) -> Result<Vec<Self::Automorphism>>;
    fn canonical_key(&self, occupied: &[Self::Vertex]) -> Result<CanonicalKey>;
}

/// Image of a vertex set under an automorphism, sorted and deduplicated.
pub fn apply_automorphism<T: Symmetric>(
    topo: &T,
    a: &T::Automorphism,
    occupied: &[T::Vertex],
) -> Vec<T::Vertex> {
    let mut out: Vec<_> = occupied.iter().map(|&v| topo.apply(a, v)).collect();
    out.sort();
    out.dedup();
    out
}

/// Canonical occupancy key, rejecting empty sets.
pub fn canonical_form<T: Symmetric>(topo: &T, occupied: &[T::Vertex]) -> Result<CanonicalKey> {
    if occupied.is_empty() {
        return crate::error::input("canonical form of an empty occupied set");
    }
    for &v in occupied {
        topo.check(v)?;
    }
    topo.canonical_key(occupied)
}
