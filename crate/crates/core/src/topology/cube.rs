use super::{CanonicalKey, Symmetric, Topology};
use crate::error::{input, Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Largest dimension for which the hyperoctahedral group is enumerated.
pub const MAX_GROUP_DIM: u32 = 5;
const MAX_DIM: u32 = 30;

/// A hypercube vertex. Coordinate 0 is the most significant of the `d` low
/// bits, so numeric order matches the rendered bit-string order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bits(pub u32);

/// The hypercube `Q_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    dim: u32,
}

impl Cube {
    pub fn new(dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return input(format!(
                "hypercube dimension must be in 1..={MAX_DIM}, got {dim}"
            ));
        }
        Ok(Cube { dim })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn vertex_count(&self) -> u32 {
        1 << self.dim
    }

    pub fn edge_count(&self) -> u64 {
        u64::from(self.dim) << (self.dim - 1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Bits> {
        (0..self.vertex_count()).map(Bits)
    }

    pub fn full_mask(&self) -> u32 {
        if self.dim == 32 {
            u32::MAX
        } else {
            (1u32 << self.dim) - 1
        }
    }

    /// Bit that stores coordinate `axis`.
    pub fn axis_bit(&self, axis: u32) -> u32 {
        1 << (self.dim - 1 - axis)
    }

    pub fn coord(&self, v: Bits, axis: u32) -> u32 {
        u32::from(v.0 & self.axis_bit(axis) != 0)
    }

    /// The neighbor of `v` across `axis`.
    pub fn flip(&self, v: Bits, axis: u32) -> Bits {
        Bits(v.0 ^ self.axis_bit(axis))
    }

    /// The whole cube as a sub-cube with nothing frozen.
    pub fn whole(&self) -> SubCube {
        SubCube {
            dim: self.dim,
            frozen: 0,
            values: 0,
        }
    }

    fn group_tables(&self) -> Result<&'static GroupTables> {
        if self.dim > MAX_GROUP_DIM {
            return Err(Error::Capability(format!(
                "hyperoctahedral group enumeration is limited to d <= {MAX_GROUP_DIM} (got d = {})",
                self.dim
            )));
        }
        static CACHE: [OnceLock<GroupTables>; MAX_GROUP_DIM as usize + 1] =
            [const { OnceLock::new() }; MAX_GROUP_DIM as usize + 1];
        Ok(CACHE[self.dim as usize].get_or_init(|| GroupTables::build(*self)))
    }

    /// Every element of the hyperoctahedral group, `d!·2^d` of them.
    pub fn automorphisms(&self) -> Result<Vec<CubeAutomorphism>> {
        Ok(self.group_tables()?.elements.clone())
    }

    /// Vertex images of every group element: `table[g][v]`.
    pub fn vertex_tables(&self) -> Result<&'static [Vec<u32>]> {
        Ok(&self.group_tables()?.images)
    }
}

struct GroupTables {
    elements: Vec<CubeAutomorphism>,
    images: Vec<Vec<u32>>,
}

impl GroupTables {
    fn build(cube: Cube) -> Self {
        let d = cube.dim as usize;
        let mut perms = Vec::new();
        permutations(&mut (0..d as u8).collect::<Vec<_>>(), 0, &mut perms);
        perms.sort();
        let mut elements = Vec::new();
        for perm in perms {
            for flip in 0..cube.vertex_count() {
                elements.push(CubeAutomorphism {
                    perm: perm.clone(),
                    flip,
                });
            }
        }
        let images = elements
            .iter()
            .map(|a| cube.vertices().map(|v| cube.apply(a, v).0).collect())
            .collect();
        GroupTables { elements, images }
    }
}

fn permutations(items: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

impl Topology for Cube {
    type Vertex = Bits;

    fn check(&self, v: Bits) -> Result<()> {
        if v.0 & !self.full_mask() != 0 {
            return input(format!(
                "vertex {:#b} has bits beyond dimension {}",
                v.0, self.dim
            ));
        }
        Ok(())
    }

    fn adjacent(&self, v: Bits) -> Vec<Bits> {
        let mut out: Vec<Bits> = (0..self.dim).map(|i| self.flip(v, i)).collect();
        out.sort();
        out
    }

    fn dist(&self, u: Bits, v: Bits) -> u32 {
        (u.0 ^ v.0).count_ones()
    }

    fn render(&self, v: Bits) -> String {
        format!("{:0width$b}", v.0, width = self.dim as usize)
    }

    fn parse(&self, s: &str) -> Result<Bits> {
        let s = s.trim();
        if s.len() != self.dim as usize || !s.chars().all(|c| c == '0' || c == '1') {
            return input(format!("'{s}' is not a {}-bit hypercube vertex", self.dim));
        }
        Ok(Bits(
            u32::from_str_radix(s, 2).expect("validated bit string"),
        ))
    }
}

/// Element of the hyperoctahedral group: `v ↦ permute(v) xor flip`, where
/// coordinate `i` of `v` is carried to coordinate `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubeAutomorphism {
    pub perm: Vec<u8>,
    pub flip: u32,
}

impl Cube {
    fn permute(&self, perm: &[u8], x: u32) -> u32 {
        let mut w = 0;
        for (i, &p) in perm.iter().enumerate() {
            if x & self.axis_bit(i as u32) != 0 {
                w |= self.axis_bit(u32::from(p));
            }
        }
        w
    }
}

impl Symmetric for Cube {
    type Automorphism = CubeAutomorphism;

    fn apply(&self, a: &CubeAutomorphism, v: Bits) -> Bits {
        Bits(self.permute(&a.perm, v.0) ^ a.flip)
    }

    fn compose(&self, a: &CubeAutomorphism, b: &CubeAutomorphism) -> CubeAutomorphism {
        let perm = b.perm.iter().map(|&p| a.perm[p as usize]).collect();
        CubeAutomorphism {
            perm,
            flip: self.permute(&a.perm, b.flip) ^ a.flip,
        }
    }

    fn inverse(&self, a: &CubeAutomorphism) -> CubeAutomorphism {
        let mut perm = vec![0u8; a.perm.len()];
        for (i, &p) in a.perm.iter().enumerate() {
            perm[p as usize] = i as u8;
        }
        let flip = self.permute(&perm, a.flip);
        CubeAutomorphism { perm, flip }
    }

    fn identity(&self) -> CubeAutomorphism {
        CubeAutomorphism {
            perm: (0..self.dim as u8).collect(),
            flip: 0,
        }
    }

    fn group_sample(&self) -> Result<Vec<CubeAutomorphism>> {
        self.automorphisms()
    }

    fn canonical_key(&self, occupied: &[Bits]) -> Result<CanonicalKey> {
        let tables = self.vertex_tables()?;
        let best = tables
            .iter()
            .map(|img| {
                occupied
                    .iter()
                    .fold(0u64, |acc, v| acc | 1u64 << img[v.0 as usize])
            })
            .min()
            .unwrap_or(0);
        Ok(CanonicalKey::Cube(best))
    }
}

/// A sub-hypercube given by the coordinates it freezes and their values.
/// Equality is structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubCube {
    pub dim: u32,
    /// Bits of frozen coordinates.
    pub frozen: u32,
    /// Values of the frozen coordinates (zero outside `frozen`).
    pub values: u32,
}

impl SubCube {
    /// Number of free coordinates.
    pub fn free_dim(&self) -> u32 {
        self.dim - self.frozen.count_ones()
    }

    pub fn contains(&self, v: Bits) -> bool {
        v.0 & self.frozen == self.values
    }

    pub fn size(&self) -> u32 {
        1 << self.free_dim()
    }

    fn cube(&self) -> Cube {
        Cube { dim: self.dim }
    }

    /// Free coordinates in ascending order.
    pub fn free_axes(&self) -> Vec<u32> {
        let c = self.cube();
        (0..self.dim)
            .filter(|&i| self.frozen & c.axis_bit(i) == 0)
            .collect()
    }

    /// Frozen coordinates in ascending order.
    pub fn frozen_axes(&self) -> Vec<u32> {
        let c = self.cube();
        (0..self.dim)
            .filter(|&i| self.frozen & c.axis_bit(i) != 0)
            .collect()
    }

    /// Freezes a free coordinate at `side`.
    pub fn with_axis(&self, axis: u32, side: u32) -> SubCube {
        let bit = self.cube().axis_bit(axis);
        SubCube {
            dim: self.dim,
            frozen: self.frozen | bit,
            values: (self.values & !bit) | if side == 1 { bit } else { 0 },
        }
    }

    pub fn vertices(&self) -> Vec<Bits> {
        let free = !self.frozen & self.cube().full_mask();
        // Enumerate subsets of the free mask in ascending order.
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut sub = 0u32;
        loop {
            out.push(Bits(self.values | sub));
            if sub == free {
                break;
            }
            sub = (sub.wrapping_sub(free)) & free;
        }
        out.sort();
        out
    }

    pub fn count_in(&self, occupied: &[Bits]) -> usize {
        occupied.iter().filter(|&&v| self.contains(v)).count()
    }
}

/// Minimum bounding sub-hypercube of a nonempty occupied set.
pub fn mbh(cube: &Cube, occupied: &[Bits]) -> Result<SubCube> {
    let Some(&first) = occupied.first() else {
        return input("mbh of an empty occupied set");
    };
    let mut all_and = first.0;
    let mut all_or = first.0;
    for &v in occupied {
        cube.check(v)?;
        all_and &= v.0;
        all_or |= v.0;
    }
    let frozen = !(all_and ^ all_or) & cube.full_mask();
    Ok(SubCube {
        dim: cube.dim,
        frozen,
        values: all_and & frozen,
    })
}

/// Ordered one-axis splits `(S, D)` of `bound`: free axes ascending, side 0
/// as `S` before side 1 as `S`.
pub fn axis_splits(cube: &Cube, bound: &SubCube) -> Result<Vec<(SubCube, SubCube)>> {
    if bound.dim != cube.dim {
        return input("sub-cube does not belong to this hypercube");
    }
    if bound.free_dim() == 0 {
        return input("cannot split a zero-dimensional sub-cube");
    }
    let mut out = Vec::with_capacity(2 * bound.free_dim() as usize);
    for axis in bound.free_axes() {
        for side in 0..2 {
            out.push((bound.with_axis(axis, side), bound.with_axis(axis, 1 - side)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{apply_automorphism, canonical_form, neighbors};
    use std::collections::BTreeSet;

    fn q(d: u32) -> Cube {
        Cube::new(d).unwrap()
    }

    fn set(c: &Cube, xs: &[&str]) -> Vec<Bits> {
        let mut v: Vec<Bits> = xs.iter().map(|s| c.parse(s).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn neighbors_of_origin() {
        let c = q(3);
        let n: Vec<String> = neighbors(&c, Bits(0))
            .unwrap()
            .iter()
            .map(|&v| c.render(v))
            .collect();
        assert_eq!(n, vec!["001", "010", "100"]);
        let c4 = q(4);
        let n = neighbors(&c4, c4.parse("1111").unwrap()).unwrap();
        assert_eq!(n.len(), 4);
        assert!(n.iter().all(|v| v.0.count_ones() == 3));
        assert!(neighbors(&c, Bits(8)).is_err());
    }

    #[test]
    fn counts_and_distance() {
        let c = q(4);
        assert_eq!(c.vertex_count(), 16);
        assert_eq!(c.edge_count(), 32);
        let edges = c
            .vertices()
            .flat_map(|u| c.vertices().map(move |v| (u, v)))
            .filter(|&(u, v)| u < v && c.dist(u, v) == 1)
            .count();
        assert_eq!(edges, 32);
        assert_eq!(
            c.dist(c.parse("0000").unwrap(), c.parse("0111").unwrap()),
            3
        );
    }

    /// Brute force: the smallest sub-cube (over all masks) containing the set.
    fn mbh_oracle(c: &Cube, occ: &[Bits]) -> (u32, u32) {
        let mut best: Option<(u32, u32, u32)> = None;
        for frozen in 0..c.vertex_count() {
            for values in 0..c.vertex_count() {
                if values & !frozen != 0 {
                    continue;
                }
                if occ.iter().all(|v| v.0 & frozen == values) {
                    let size = c.dim - frozen.count_ones();
                    if best.is_none_or(|b| size < b.0) {
                        best = Some((size, frozen, values));
                    }
                }
            }
        }
        let b = best.unwrap();
        (b.1, b.2)
    }

    #[test]
    fn mbh_matches_oracle() {
        let c = q(4);
        let s = mbh(&c, &set(&c, &["0000", "0011"])).unwrap();
        assert_eq!(s.free_dim(), 2);
        assert_eq!(s.frozen_axes(), vec![0, 1]);
        assert_eq!(s.values, 0);
        assert_eq!(mbh(&c, &set(&c, &["0110"])).unwrap().free_dim(), 0);
        assert_eq!(
            mbh(&q(3), &set(&q(3), &["000", "111"])).unwrap().free_dim(),
            3
        );
        assert!(mbh(&c, &[]).is_err());
        for mask in 1u32..(1 << 16) {
            if mask % 7 != 0 && mask.count_ones() > 3 {
                continue;
            }
            let occ: Vec<Bits> = (0..16).filter(|i| mask >> i & 1 == 1).map(Bits).collect();
            let s = mbh(&c, &occ).unwrap();
            assert_eq!((s.frozen, s.values), mbh_oracle(&c, &occ));
            let inner: Vec<Bits> = s
                .vertices()
                .into_iter()
                .filter(|v| occ.contains(v))
                .collect();
            assert_eq!(mbh(&c, &inner).unwrap(), s);
        }
    }

    #[test]
    fn splits_partition_the_bound() {
        let c = q(4);
        assert_eq!(axis_splits(&c, &c.whole()).unwrap().len(), 8);
        let b1 = mbh(&c, &set(&c, &["0000", "0001"])).unwrap();
        assert_eq!(axis_splits(&c, &b1).unwrap().len(), 2);
        assert!(axis_splits(&c, &mbh(&c, &[Bits(3)]).unwrap()).is_err());
        let q2 = q(2);
        let splits = axis_splits(&q2, &q2.whole()).unwrap();
        let rendered: Vec<(Vec<String>, Vec<String>)> = splits
            .iter()
            .map(|(s, d)| {
                (
                    s.vertices().iter().map(|&v| q2.render(v)).collect(),
                    d.vertices().iter().map(|&v| q2.render(v)).collect(),
                )
            })
            .collect();
        assert_eq!(
            rendered[0],
            (
                vec!["00".into(), "01".into()],
                vec!["10".into(), "11".into()]
            )
        );
        assert_eq!(
            rendered[2],
            (
                vec!["00".into(), "10".into()],
                vec!["01".into(), "11".into()]
            )
        );
        for (s, d) in axis_splits(&c, &c.whole()).unwrap() {
            let sv: BTreeSet<_> = s.vertices().into_iter().collect();
            let dv: BTreeSet<_> = d.vertices().into_iter().collect();
            assert_eq!(sv.len(), 8);
            assert_eq!(dv.len(), 8);
            assert!(sv.is_disjoint(&dv));
        }
    }

    #[test]
    fn group_size_and_closure() {
        let c = q(3);
        let g = c.automorphisms().unwrap();
        assert_eq!(g.len(), 48);
        assert_eq!(q(5).automorphisms().unwrap().len(), 3840);
        assert!(matches!(q(6).automorphisms(), Err(Error::Capability(_))));
        let elems: BTreeSet<Vec<u32>> = g
            .iter()
            .map(|a| c.vertices().map(|v| c.apply(a, v).0).collect())
            .collect();
        assert_eq!(elems.len(), 48);
        for a in g.iter().step_by(5) {
            for b in g.iter().step_by(7) {
                let ab = c.compose(a, b);
                for v in c.vertices() {
                    assert_eq!(c.apply(&ab, v), c.apply(a, c.apply(b, v)));
                }
                let img: Vec<u32> = c.vertices().map(|v| c.apply(&ab, v).0).collect();
                assert!(elems.contains(&img));
            }
            let inv = c.inverse(a);
            for v in c.vertices() {
                assert_eq!(c.apply(&inv, c.apply(a, v)), v);
            }
        }
    }

    #[test]
    fn flip_all_maps_origin_to_complement() {
        let c = q(3);
        let a = CubeAutomorphism {
            perm: vec![0, 1, 2],
            flip: 0b111,
        };
        assert_eq!(apply_automorphism(&c, &a, &[Bits(0)]), vec![Bits(7)]);
        assert_eq!(
            apply_automorphism(&c, &c.identity(), &[Bits(1), Bits(6)]),
            vec![Bits(1), Bits(6)]
        );
    }

    /// Orbit counting by explicit group action, independent of the key.
    fn orbit_count(c: &Cube) -> usize {
        let g = c.automorphisms().unwrap();
        let n = c.vertex_count();
        let mut seen = vec![false; 1 << n];
        let mut orbits = 0;
        for x in 1u32..(1 << n) {
            if seen[x as usize] {
                continue;
            }
            orbits += 1;
            for a in &g {
                let mut y = 0u32;
                for v in 0..n {
                    if x >> v & 1 == 1 {
                        y |= 1 << c.apply(a, Bits(v)).0;
                    }
                }
                seen[y as usize] = true;
            }
        }
        orbits
    }

    #[test]
    fn canonical_classes_of_q3() {
        let c = q(3);
        let k = |xs: &[&str]| canonical_form(&c, &set(&c, xs)).unwrap();
        assert_eq!(k(&["000", "011"]), k(&["000", "101"]));
        assert_ne!(k(&["000", "001"]), k(&["000", "011"]));
        let keys: BTreeSet<CanonicalKey> = (1u32..256)
            .map(|m| {
                let occ: Vec<Bits> = (0..8).filter(|i| m >> i & 1 == 1).map(Bits).collect();
                canonical_form(&c, &occ).unwrap()
            })
            .collect();
        assert_eq!(keys.len(), orbit_count(&c));
        assert_eq!(keys.len(), 21);
        assert!(canonical_form(&q(6), &[Bits(0)]).is_err());
        assert!(canonical_form(&c, &[]).is_err());
    }
}
