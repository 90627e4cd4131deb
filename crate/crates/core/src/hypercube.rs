//! Gathering on hypercubes `Q_d`, `d >= 3`.
//!
//! Configurations whose bounding sub-cube has dimension `b <= 3` are finished
//! by a synthesized move table over `Q_3` classes (task T1). Larger bounding
//! cubes are shrunk one dimension at a time using ordered axis splits `(S, D)`
//! and the direct-move predicate [`dma`].

use crate::error::{input, Error, Result};
use crate::swarm::{Algorithm, Configuration, Decision, MoveOffer, Snapshot};
use crate::table::{synthesize, MoveTable, Pattern, Role, TableKind, TableRules, Universe};
use crate::topology::{axis_splits, mbh, Bits, Cube, SubCube, Symmetric, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HTaskId {
    T1,
    T2,
    T3,
    T4,
    T5i,
    T5ii,
    T5iii,
    T6,
    T7,
    T8,
}

impl HTaskId {
    pub const ALL: [HTaskId; 10] = [
        HTaskId::T1,
        HTaskId::T2,
        HTaskId::T3,
        HTaskId::T4,
        HTaskId::T5i,
        HTaskId::T5ii,
        HTaskId::T5iii,
        HTaskId::T6,
        HTaskId::T7,
        HTaskId::T8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HTaskId::T1 => "T1",
            HTaskId::T2 => "T2",
            HTaskId::T3 => "T3",
            HTaskId::T4 => "T4",
            HTaskId::T5i => "T5i",
            HTaskId::T5ii => "T5ii",
            HTaskId::T5iii => "T5iii",
            HTaskId::T6 => "T6",
            HTaskId::T7 => "T7",
            HTaskId::T8 => "T8",
        }
    }
}

/// Outcome of the direct-move predicate on an ordered split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmaVerdict {
    Allowed,
    /// `S` holds only `v` and `D` is full.
    FailA {
        v: Bits,
    },
    /// `S` holds only `v` and the single hole `w` of `D` is `v`'s twin.
    FailB {
        v: Bits,
        w: Bits,
    },
    /// `S` holds exactly the adjacent pair `v`, `v2` and the single hole `w`
    /// of `D` is `v`'s twin.
    FailC {
        v: Bits,
        v2: Bits,
        w: Bits,
    },
}

/// Membership in the ungatherable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UHWitness {
    P2,
    P3,
    FullCube,
    NotInUH,
}

impl UHWitness {
    pub fn as_str(self) -> &'static str {
        match self {
            UHWitness::P2 => "P2",
            UHWitness::P3 => "P3",
            UHWitness::FullCube => "full-Q_d",
            UHWitness::NotInUH => "not-in-U_H",
        }
    }
}

pub fn uh_witness(cube: &Cube, config: &Configuration<Bits>) -> UHWitness {
    let occ = config.occupied();
    if occ.len() == cube.vertex_count() as usize {
        return UHWitness::FullCube;
    }
    match occ {
        [a, b] if cube.dist(*a, *b) == 1 => UHWitness::P2,
        [a, b, c] => {
            let e = |x: Bits, y: Bits| cube.dist(x, y) == 1;
            let path = (e(*a, *b) && e(*a, *c) && !e(*b, *c))
                || (e(*b, *a) && e(*b, *c) && !e(*a, *c))
                || (e(*c, *a) && e(*c, *b) && !e(*a, *b));
            if path {
                UHWitness::P3
            } else {
                UHWitness::NotInUH
            }
        }
        _ => UHWitness::NotInUH,
    }
}

/// Statistics of one ordered split of the bounding cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStat {
    pub s: SubCube,
    pub d: SubCube,
    pub axis: u32,
    pub occ_s: usize,
    pub occ_d: usize,
    pub dma: DmaVerdict,
    /// Some occupied vertex of `S` has an unoccupied twin in `D`.
    pub reaches_hole: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSets {
    pub l0: Vec<SplitStat>,
    pub l1: Vec<SplitStat>,
    pub l2: Vec<SplitStat>,
    pub l3: Vec<SplitStat>,
}

fn split_axis(cube: &Cube, s: &SubCube, d: &SubCube) -> Option<u32> {
    let diff = s.values ^ d.values;
    if s.dim != cube.dim() || d.dim != cube.dim() || s.frozen != d.frozen || diff.count_ones() != 1
    {
        return None;
    }
    (0..cube.dim()).find(|&a| cube.axis_bit(a) == diff)
}

/// Direct-move predicate on the ordered split `(s, d)` of the configuration's
/// bounding cube.
pub fn dma(
    cube: &Cube,
    s: &SubCube,
    d: &SubCube,
    config: &Configuration<Bits>,
) -> Result<DmaVerdict> {
    let bound = mbh(cube, config.occupied())?;
    let Some(axis) = split_axis(cube, s, d) else {
        return input("not an ordered one-axis split");
    };
    let bit = cube.axis_bit(axis);
    if bound.frozen != s.frozen & !bit || bound.values != s.values & !bit {
        return input("split does not belong to the configuration's bounding cube");
    }
    Ok(dma_unchecked(cube, s, d, axis, config))
}

fn dma_unchecked(
    cube: &Cube,
    s: &SubCube,
    d: &SubCube,
    axis: u32,
    config: &Configuration<Bits>,
) -> DmaVerdict {
    let in_s: Vec<Bits> = config
        .occupied()
        .iter()
        .copied()
        .filter(|&v| s.contains(v))
        .collect();
    let holes: Vec<Bits> = d
        .vertices()
        .into_iter()
        .filter(|&v| !config.contains(v))
        .collect();
    match (in_s.as_slice(), holes.as_slice()) {
        ([v], []) => DmaVerdict::FailA { v: *v },
        ([v], [w]) if cube.flip(*v, axis) == *w => DmaVerdict::FailB { v: *v, w: *w },
        ([a, b], [w]) if cube.dist(*a, *b) == 1 => {
            if cube.flip(*a, axis) == *w {
                DmaVerdict::FailC {
                    v: *a,
                    v2: *b,
                    w: *w,
                }
            } else if cube.flip(*b, axis) == *w {
                DmaVerdict::FailC {
                    v: *b,
                    v2: *a,
                    w: *w,
                }
            } else {
                DmaVerdict::Allowed
            }
        }
        _ => DmaVerdict::Allowed,
    }
}

/// The nested split lists used when the bounding cube has dimension `b > 3`.
pub fn l_sets(cube: &Cube, config: &Configuration<Bits>) -> Result<LSets> {
    let bound = mbh(cube, config.occupied())?;
    if bound.free_dim() <= 3 {
        return Err(Error::Misuse(format!(
            "bounding cube has dimension {} <= 3",
            bound.free_dim()
        )));
    }
    Ok(l_sets_of(cube, &bound, config))
}

fn l_sets_of(cube: &Cube, bound: &SubCube, config: &Configuration<Bits>) -> LSets {
    let occ = config.occupied();
    let stats: Vec<SplitStat> = axis_splits(cube, bound)
        .expect("bound has free axes")
        .into_iter()
        .map(|(s, d)| {
            let axis = split_axis(cube, &s, &d).expect("axis split");
            SplitStat {
                occ_s: s.count_in(occ),
                occ_d: d.count_in(occ),
                dma: dma_unchecked(cube, &s, &d, axis, config),
                reaches_hole: occ
                    .iter()
                    .any(|&v| s.contains(v) && !config.contains(cube.flip(v, axis))),
                s,
                d,
                axis,
            }
        })
        .collect();
    let max_d = stats.iter().map(|x| x.occ_d).max().unwrap_or(0);
    let l0: Vec<SplitStat> = stats.into_iter().filter(|x| x.occ_d == max_d).collect();
    let l1: Vec<SplitStat> = l0.iter().filter(|x| x.occ_s < x.occ_d).cloned().collect();
    let l2: Vec<SplitStat> = l1
        .iter()
        .filter(|x| x.dma == DmaVerdict::Allowed)
        .cloned()
        .collect();
    let l3: Vec<SplitStat> = l2.iter().filter(|x| x.reaches_hole).cloned().collect();
    LSets { l0, l1, l2, l3 }
}

/// Task of a configuration with at least two occupied vertices, rejecting
/// members of the ungatherable set.
pub fn classify_h(cube: &Cube, config: &Configuration<Bits>) -> Result<HTaskId> {
    if config.occ() == 0 {
        return input("empty configuration");
    }
    let w = uh_witness(cube, config);
    if w != UHWitness::NotInUH {
        return Err(Error::Ungatherable(w.as_str().into()));
    }
    task_for(cube, config)
}

/// Task of any configuration with at least two occupied vertices, including
/// the intermediates the algorithm itself produces.
pub fn task_for(cube: &Cube, config: &Configuration<Bits>) -> Result<HTaskId> {
    if config.occ() < 2 {
        return Err(Error::Misuse("gathered configurations have no task".into()));
    }
    let bound = mbh(cube, config.occupied())?;
    if bound.free_dim() <= 3 {
        return Ok(HTaskId::T1);
    }
    let l = l_sets_of(cube, &bound, config);
    Ok(route(&bound, config, &l))
}

fn route(bound: &SubCube, config: &Configuration<Bits>, l: &LSets) -> HTaskId {
    if !l.l1.is_empty() {
        return match l.l2.len() {
            1 => HTaskId::T2,
            0 => {
                let kinds: Vec<DmaVerdict> = l.l1.iter().map(|x| x.dma).collect();
                if kinds.iter().any(|k| matches!(k, DmaVerdict::FailC { .. })) {
                    HTaskId::T5iii
                } else if kinds.iter().any(|k| matches!(k, DmaVerdict::FailB { .. })) {
                    HTaskId::T5ii
                } else {
                    HTaskId::T5i
                }
            }
            _ if !l.l3.is_empty() => HTaskId::T3,
            _ => HTaskId::T4,
        };
    }
    if config.occ() as u32 == bound.size() {
        HTaskId::T8
    } else if l.l0.iter().any(|x| x.reaches_hole) {
        HTaskId::T6
    } else {
        HTaskId::T7
    }
}

/// `Q_3` as a table universe, cells numbered by vertex value.
pub fn q3_universe() -> Universe {
    let q3 = Cube::new(3).expect("dimension 3");
    let adj = q3
        .vertices()
        .map(|v| {
            q3.adjacent(v)
                .iter()
                .fold(0 as Pattern, |acc, w| acc | 1 << w.0)
        })
        .collect();
    let group = q3
        .vertex_tables()
        .expect("Q3 group")
        .iter()
        .map(|img| img.iter().map(|&x| x as u8).collect())
        .collect();
    let names = q3.vertices().map(|v| q3.render(v)).collect();
    Universe {
        cells: 8,
        adj,
        group,
        names,
    }
}

/// Constraints on the `Q_3` endgame table.
pub struct Q3Rules {
    u: Universe,
}

impl Q3Rules {
    pub fn new() -> Self {
        Q3Rules { u: q3_universe() }
    }

    fn cells(p: Pattern) -> Vec<u8> {
        (0..8).filter(|&c| p >> c & 1 == 1).collect()
    }

    fn dist(a: u8, b: u8) -> u32 {
        (a ^ b).count_ones()
    }

    /// Center of a 3-vertex path, if `p` is one.
    fn path_center(p: Pattern) -> Option<(u8, u8, u8)> {
        let c = Self::cells(p);
        if c.len() != 3 {
            return None;
        }
        (0..3).find_map(|i| {
            let (m, a, b) = (c[i], c[(i + 1) % 3], c[(i + 2) % 3]);
            (Self::dist(m, a) == 1 && Self::dist(m, b) == 1).then_some((a, b, m))
        })
    }

    fn is_distance_two_pair(p: Pattern) -> bool {
        let c = Self::cells(p);
        c.len() == 2 && Self::dist(c[0], c[1]) == 2
    }
}

impl Default for Q3Rules {
    fn default() -> Self {
        Self::new()
    }
}

impl TableRules for Q3Rules {
    fn universe(&self) -> &Universe {
        &self.u
    }

    fn role(&self, p: Pattern) -> Role {
        let c = Self::cells(p);
        match c.len() {
            0 => Role::Outside,
            1 => Role::Terminal,
            8 => Role::Exit,
            2 if Self::dist(c[0], c[1]) == 1 => Role::Special(vec![(c[0], c[1]), (c[1], c[0])]),
            3 => match Self::path_center(p) {
                Some((a, b, m)) => {
                    let mut mv = vec![(a, m), (b, m)];
                    mv.sort();
                    Role::Special(mv)
                }
                None => Role::Free,
            },
            _ => Role::Free,
        }
    }

    fn may_produce(&self, from: Pattern, to: Pattern) -> bool {
        match self.role(to) {
            Role::Special(_) => Self::is_distance_two_pair(from),
            Role::Exit | Role::Outside => false,
            _ => true,
        }
    }

    fn move_allowed(&self, from: Pattern, s: u8, t: u8) -> bool {
        let c = Self::cells(from);
        if c.len() != 2 {
            return true;
        }
        let other = if c[0] == s { c[1] } else { c[0] };
        Self::dist(t, other) < Self::dist(s, other)
    }

    fn label_priority(&self, p: Pattern) -> u8 {
        u8::from(Self::path_center(p).is_some())
    }
}

/// Synthesizes the `Q_3` endgame table (uncertified).
pub fn synthesize_t1_table() -> Result<MoveTable> {
    synthesize(TableKind::Q3, &Q3Rules::new())
}

/// The hypercube gathering algorithm.
#[derive(Debug, Clone)]
pub struct GatherHypercube {
    table: MoveTable,
}

impl GatherHypercube {
    /// Synthesizes and certifies the endgame table.
    pub fn new() -> Result<Self> {
        let table = synthesize_t1_table()?;
        let report = crate::verifier::certify_table(&table);
        if !report.passed() {
            return Err(Error::Certification(report.summary()));
        }
        Ok(GatherHypercube { table })
    }

    /// Uses a table as given, without certification.
    pub fn with_table(table: MoveTable) -> Self {
        GatherHypercube { table }
    }

    pub fn table(&self) -> &MoveTable {
        &self.table
    }

    /// Decision for a snapshot; the public form of the algorithm's compute step.
    pub fn move_h(&self, cube: &Cube, snap: &Snapshot<Bits>) -> Result<Decision<Bits>> {
        if cube.dim() < 3 {
            return input("the hypercube algorithm needs d >= 3");
        }
        let config = &snap.config;
        if config.occ() == 0 || !config.contains(snap.me) {
            return input("active robot is not on an occupied vertex");
        }
        if config.is_gathered() {
            return Ok(Decision::nil(snap.me, None));
        }
        let bound = mbh(cube, config.occupied())?;
        if bound.free_dim() <= 3 {
            let dests = self.endgame_dests(cube, &bound, snap);
            return Ok(Decision {
                offer: MoveOffer::of(snap.me, dests),
                task: Some(HTaskId::T1.as_str()),
            });
        }
        let l = l_sets_of(cube, &bound, config);
        let task = route(&bound, config, &l);
        let me = snap.me;
        let occupied = |v: Bits| config.contains(v);
        let mut dests = Vec::new();
        match task {
            HTaskId::T2 => {
                let x = &l.l2[0];
                if x.s.contains(me) {
                    dests.push(cube.flip(me, x.axis));
                }
            }
            HTaskId::T3 => {
                for x in &l.l3 {
                    let w = cube.flip(me, x.axis);
                    if x.s.contains(me) && !occupied(w) {
                        dests.push(w);
                    }
                }
            }
            HTaskId::T4 => {
                for x in &l.l2 {
                    let inner_hole = x.s.free_axes().iter().any(|&a| !occupied(cube.flip(me, a)));
                    if x.s.contains(me) && inner_hole {
                        dests.push(cube.flip(me, x.axis));
                    }
                }
            }
            HTaskId::T5i => {
                for x in &l.l1 {
                    if let DmaVerdict::FailA { v } = x.dma {
                        if me == cube.flip(v, x.axis) {
                            dests.push(v);
                        }
                    }
                }
            }
            HTaskId::T5ii => {
                for x in &l.l1 {
                    if let DmaVerdict::FailB { v, .. } = x.dma {
                        if me == v {
                            dests.extend(x.s.free_axes().iter().map(|&a| cube.flip(v, a)));
                        }
                    }
                }
            }
            HTaskId::T5iii => {
                for x in &l.l1 {
                    if let DmaVerdict::FailC { v, v2, .. } = x.dma {
                        if me == v {
                            dests.push(v2);
                        }
                    }
                }
            }
            HTaskId::T6 => {
                for a in bound.free_axes() {
                    let w = cube.flip(me, a);
                    if !occupied(w) {
                        dests.push(w);
                    }
                }
            }
            HTaskId::T7 => {
                for x in &l.l0 {
                    if x.s.contains(me) {
                        dests.extend(
                            x.s.free_axes()
                                .iter()
                                .map(|&a| cube.flip(me, a))
                                .filter(|&w| !occupied(w)),
                        );
                    }
                }
            }
            HTaskId::T8 => {
                dests.extend(bound.frozen_axes().iter().map(|&a| cube.flip(me, a)));
            }
            HTaskId::T1 => unreachable!("b > 3"),
        }
        Ok(Decision {
            offer: MoveOffer::of(me, dests),
            task: Some(task.as_str()),
        })
    }

    /// Table lookup for bounding cubes of dimension at most three.
    fn endgame_dests(&self, cube: &Cube, bound: &SubCube, snap: &Snapshot<Bits>) -> Vec<Bits> {
        let frozen = bound.frozen_axes();
        let mut axes = bound.free_axes();
        axes.extend(frozen.iter().copied().take(3 - axes.len()));
        axes.sort();
        let project = |v: Bits| -> u8 {
            axes.iter().enumerate().fold(0u8, |acc, (j, &a)| {
                acc | (cube.coord(v, a) as u8) << (2 - j)
            })
        };
        let lift = |c: u8| -> Bits {
            let mut v = snap.me.0;
            for (j, &a) in axes.iter().enumerate() {
                let bit = cube.axis_bit(a);
                v = if c >> (2 - j) & 1 == 1 {
                    v | bit
                } else {
                    v & !bit
                };
            }
            Bits(v)
        };
        let pattern = snap
            .config
            .occupied()
            .iter()
            .fold(0 as Pattern, |acc, &v| acc | 1 << project(v));
        let me = project(snap.me);
        if self
            .table
            .class_of(pattern)
            .is_some_and(|c| c.role == Role::Exit)
        {
            return frozen.iter().map(|&a| cube.flip(snap.me, a)).collect();
        }
        let mut dests = Vec::new();
        for &(s, t) in self.table.moves_for(pattern).unwrap_or(&[]) {
            if s != me {
                continue;
            }
            let j = (s ^ t).trailing_zeros();
            let axis = axes[2 - j as usize];
            if frozen.contains(&axis) {
                dests.extend(frozen.iter().map(|&a| cube.flip(snap.me, a)));
            } else {
                dests.push(lift(t));
            }
        }
        dests
    }
}

impl Algorithm<Cube> for GatherHypercube {
    fn name(&self) -> &'static str {
        "hypercube"
    }

    fn decide(&self, topo: &Cube, snap: &Snapshot<Bits>) -> Result<Decision<Bits>> {
        self.move_h(topo, snap)
    }

    fn task_of(&self, topo: &Cube, config: &Configuration<Bits>) -> Option<&'static str> {
        task_for(topo, config).ok().map(HTaskId::as_str)
    }

    fn validate_initial(&self, topo: &Cube, config: &Configuration<Bits>) -> Result<()> {
        if topo.dim() < 3 {
            return input("the hypercube algorithm needs d >= 3");
        }
        match uh_witness(topo, config) {
            UHWitness::NotInUH => Ok(()),
            w => Err(Error::Ungatherable(w.as_str().into())),
        }
    }
}

/// Checks that an automorphism-mapped snapshot yields the mapped offer.
pub fn offer_commutes(
    alg: &GatherHypercube,
    cube: &Cube,
    snap: &Snapshot<Bits>,
    a: &<Cube as Symmetric>::Automorphism,
) -> Result<bool> {
    let mapped = Snapshot {
        config: Configuration::new(
            snap.config
                .occupied()
                .iter()
                .map(|&v| cube.apply(a, v))
                .collect(),
        ),
        me: cube.apply(a, snap.me),
    };
    let lhs = alg.move_h(cube, &mapped)?;
    let rhs = alg.move_h(cube, snap)?;
    let mut image: Vec<Bits> = rhs
        .offer
        .dests()
        .iter()
        .map(|&v| cube.apply(a, v))
        .collect();
    image.sort();
    Ok(lhs.offer.dests() == image.as_slice() && lhs.task == rhs.task)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cube: &Cube, xs: &[&str]) -> Configuration<Bits> {
        Configuration::new(xs.iter().map(|s| cube.parse(s).unwrap()).collect())
    }

    #[test]
    fn witnesses() {
        let q3 = Cube::new(3).unwrap();
        assert_eq!(uh_witness(&q3, &cfg(&q3, &["000", "001"])), UHWitness::P2);
        assert_eq!(
            uh_witness(&q3, &cfg(&q3, &["000", "001", "011"])),
            UHWitness::P3
        );
        assert_eq!(
            uh_witness(&q3, &Configuration::new(q3.vertices().collect())),
            UHWitness::FullCube
        );
        assert_eq!(
            uh_witness(&q3, &cfg(&q3, &["000", "011"])),
            UHWitness::NotInUH
        );
        assert!(matches!(
            classify_h(&q3, &cfg(&q3, &["000", "001"])),
            Err(Error::Ungatherable(_))
        ));
    }

    #[test]
    fn dma_clauses() {
        let q4 = Cube::new(4).unwrap();
        let whole = q4.whole();
        let s = whole.with_axis(0, 0);
        let d = whole.with_axis(0, 1);
        let mut full_d: Vec<&str> = vec![
            "1000", "1001", "1010", "1011", "1100", "1101", "1110", "1111",
        ];
        full_d.push("0000");
        assert_eq!(
            dma(&q4, &s, &d, &cfg(&q4, &full_d)).unwrap(),
            DmaVerdict::FailA { v: Bits(0) }
        );
        let holed: Vec<&str> = full_d.iter().copied().filter(|&x| x != "1000").collect();
        assert_eq!(
            dma(&q4, &s, &d, &cfg(&q4, &holed)).unwrap(),
            DmaVerdict::FailB {
                v: Bits(0),
                w: Bits(8)
            }
        );
        let mut pair = holed.clone();
        pair.push("0001");
        assert_eq!(
            dma(&q4, &s, &d, &cfg(&q4, &pair)).unwrap(),
            DmaVerdict::FailC {
                v: Bits(0),
                v2: Bits(1),
                w: Bits(8)
            }
        );
        let loose = cfg(&q4, &["0000", "0011", "1000", "1111"]);
        assert_eq!(dma(&q4, &s, &d, &loose).unwrap(), DmaVerdict::Allowed);
        let s_bad = whole.with_axis(0, 0).with_axis(1, 0);
        assert!(dma(&q4, &s_bad, &d, &loose).is_err());
    }

    #[test]
    fn l_sets_are_nested() {
        let q4 = Cube::new(4).unwrap();
        let c = cfg(&q4, &["0000", "1111", "0110", "1001"]);
        let l = l_sets(&q4, &c).unwrap();
        assert_eq!(l.l0.len(), 8);
        assert!(l.l1.is_empty());
        assert!(l_sets(&q4, &cfg(&q4, &["0000", "0111"])).is_err());
        let full = Configuration::new(q4.vertices().collect());
        assert!(l_sets(&q4, &full).unwrap().l1.is_empty());
        assert_eq!(task_for(&q4, &full).unwrap(), HTaskId::T8);
    }

    /// A Q4 instance with exactly one unbalanced split whose direct move is allowed.
    #[test]
    fn single_direct_move_pair() {
        let q4 = Cube::new(4).unwrap();
        let c = cfg(&q4, &["1000", "1111", "0110", "1001", "1010"]);
        let l = l_sets(&q4, &c).unwrap();
        // Enumerate the eight ordered splits by hand.
        let mut unbalanced = 0;
        for axis in 0..4 {
            for side in 0..2 {
                let s = q4.whole().with_axis(axis, side);
                let d = q4.whole().with_axis(axis, 1 - side);
                let (os, od) = (s.count_in(c.occupied()), d.count_in(c.occupied()));
                let max = (0..4)
                    .map(|a| {
                        q4.whole()
                            .with_axis(a, 1)
                            .count_in(c.occupied())
                            .max(q4.whole().with_axis(a, 0).count_in(c.occupied()))
                    })
                    .max()
                    .unwrap();
                if od == max && os < od && dma(&q4, &s, &d, &c).unwrap() == DmaVerdict::Allowed {
                    unbalanced += 1;
                }
            }
        }
        assert_eq!(unbalanced, 1);
        assert_eq!(l.l2.len(), 1);
        assert_eq!(task_for(&q4, &c).unwrap(), HTaskId::T2);
    }

    #[test]
    fn low_dimensional_bounds_are_endgame() {
        let q4 = Cube::new(4).unwrap();
        assert_eq!(
            task_for(&q4, &cfg(&q4, &["0000", "0111"])).unwrap(),
            HTaskId::T1
        );
        assert_eq!(
            task_for(&q4, &cfg(&q4, &["0000", "1111"])).unwrap(),
            HTaskId::T6
        );
    }

    #[test]
    fn q3_table_labels() {
        let t = synthesize_t1_table().unwrap();
        let label = |xs: &[u8]| {
            let p = xs.iter().fold(0 as Pattern, |a, &c| a | 1 << c);
            t.class_of(p).unwrap().label.clone()
        };
        assert_eq!(label(&[0]), "1.1");
        assert_eq!(label(&[0, 1]), "2.1");
        assert_eq!(label(&[0, 3]), "2.2");
        assert_eq!(label(&[0, 7]), "2.3");
        assert_eq!(label(&[0, 1, 3]), "3.3");
        assert_eq!(t.classes.len(), 21);
    }

    #[test]
    fn distance_two_pair_heads_to_centers() {
        let alg = GatherHypercube::new().unwrap();
        let q3 = Cube::new(3).unwrap();
        let snap = Snapshot {
            config: cfg(&q3, &["000", "011"]),
            me: Bits(0),
        };
        let d = alg.move_h(&q3, &snap).unwrap();
        assert_eq!(d.offer.dests(), &[Bits(1), Bits(2)]);
        assert_eq!(d.task, Some("T1"));
        let adj = Snapshot {
            config: cfg(&q3, &["000", "001"]),
            me: Bits(1),
        };
        assert_eq!(alg.move_h(&q3, &adj).unwrap().offer.dests(), &[Bits(0)]);
        let path = Snapshot {
            config: cfg(&q3, &["000", "001", "011"]),
            me: Bits(1),
        };
        assert!(alg.move_h(&q3, &path).unwrap().offer.is_nil(Bits(1)));
    }

    #[test]
    fn t5i_pulls_toward_the_lone_vertex() {
        let alg = GatherHypercube::new().unwrap();
        let q4 = Cube::new(4).unwrap();
        let mut xs: Vec<Bits> = (8..16).map(Bits).collect();
        xs.push(Bits(0));
        let config = Configuration::new(xs);
        assert_eq!(task_for(&q4, &config).unwrap(), HTaskId::T5i);
        let d = alg
            .move_h(
                &q4,
                &Snapshot {
                    config: config.clone(),
                    me: Bits(8),
                },
            )
            .unwrap();
        assert_eq!(d.offer.dests(), &[Bits(0)]);
        assert!(alg
            .move_h(
                &q4,
                &Snapshot {
                    config,
                    me: Bits(9)
                }
            )
            .unwrap()
            .offer
            .is_nil(Bits(9)));
    }

    #[test]
    fn t8_steps_outside() {
        let alg = GatherHypercube::new().unwrap();
        let q5 = Cube::new(5).unwrap();
        let config = Configuration::new((0..16).map(Bits).collect());
        assert_eq!(task_for(&q5, &config).unwrap(), HTaskId::T8);
        let d = alg
            .move_h(
                &q5,
                &Snapshot {
                    config,
                    me: Bits(3),
                },
            )
            .unwrap();
        assert_eq!(d.offer.dests(), &[Bits(19)]);
    }

    #[test]
    fn equivariant_on_q3_and_q4() {
        let alg = GatherHypercube::new().unwrap();
        for d in [3, 4] {
            let cube = Cube::new(d).unwrap();
            let group = cube.automorphisms().unwrap();
            for mask in (3u32..(1 << cube.vertex_count())).step_by(if d == 3 { 1 } else { 977 }) {
                let occ: Vec<Bits> = cube.vertices().filter(|v| mask >> v.0 & 1 == 1).collect();
                if occ.len() < 2 {
                    continue;
                }
                let config = Configuration::new(occ.clone());
                for &me in occ.iter().take(2) {
                    let snap = Snapshot {
                        config: config.clone(),
                        me,
                    };
                    for a in group.iter().step_by(if d == 3 { 1 } else { 37 }) {
                        assert!(
                            offer_commutes(&alg, &cube, &snap, a).unwrap(),
                            "{mask:#b} {me:?} {a:?}"
                        );
                    }
                }
            }
        }
    }
}
