//! Gathering on the infinite square grid.
//!
//! Tasks are chosen from the shape of the minimum bounding rectangle and its
//! corner occupancy. Shapes are compared orientation-free. The 3×2 endgame
//! is driven by a synthesized move table.

use crate::error::{input, Error, Result};
use crate::swarm::{Algorithm, Configuration, Decision, MoveOffer, Snapshot};
use crate::table::{synthesize, MoveTable, Pattern, Role, TableKind, TableRules, Universe};
use crate::topology::{mbr, Cell, Grid, Rect, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GTaskId {
    T1,
    T2,
    T3,
    T4,
}

impl GTaskId {
    pub const ALL: [GTaskId; 4] = [GTaskId::T1, GTaskId::T2, GTaskId::T3, GTaskId::T4];

    pub fn as_str(self) -> &'static str {
        match self {
            GTaskId::T1 => "T1",
            GTaskId::T2 => "T2",
            GTaskId::T3 => "T3",
            GTaskId::T4 => "T4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum USTWitness {
    OneByTwo,
    TwoByTwoThree,
    NotInUST,
}

impl USTWitness {
    pub fn as_str(self) -> &'static str {
        match self {
            USTWitness::OneByTwo => "oneByTwo",
            USTWitness::TwoByTwoThree => "twoByTwoThree",
            USTWitness::NotInUST => "not-in-U_ST",
        }
    }
}

/// Bounding-rectangle summary of a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbrShape {
    pub rect: Rect,
    pub rows: u32,
    pub cols: u32,
    pub corners: Vec<Cell>,
    pub occupied_corners: usize,
}

impl MbrShape {
    pub fn of(config: &Configuration<Cell>) -> Result<Self> {
        let rect = mbr(config.occupied())?;
        let corners = rect.corners();
        let occupied_corners = corners.iter().filter(|&&c| config.contains(c)).count();
        Ok(MbrShape {
            rect,
            rows: rect.rows(),
            cols: rect.cols(),
            corners,
            occupied_corners,
        })
    }

    /// `(short, long)`.
    pub fn normalized(&self) -> (u32, u32) {
        self.rect.shape()
    }

    pub fn all_corners_occupied(&self) -> bool {
        self.occupied_corners == self.corners.len()
    }
}

pub fn ust_witness(config: &Configuration<Cell>) -> USTWitness {
    let Ok(shape) = MbrShape::of(config) else {
        return USTWitness::NotInUST;
    };
    match (shape.normalized(), config.occ()) {
        ((1, 2), 2) => USTWitness::OneByTwo,
        ((2, 2), 3) => USTWitness::TwoByTwoThree,
        _ => USTWitness::NotInUST,
    }
}

/// Task of a configuration, rejecting members of the ungatherable set.
pub fn classify_st(config: &Configuration<Cell>) -> Result<GTaskId> {
    let w = ust_witness(config);
    if w != USTWitness::NotInUST {
        return Err(Error::Ungatherable(w.as_str().into()));
    }
    task_st(config)
}

/// Task of any configuration with at least two occupied vertices.
pub fn task_st(config: &Configuration<Cell>) -> Result<GTaskId> {
    if config.occ() < 2 {
        return Err(Error::Misuse("gathered configurations have no task".into()));
    }
    Ok(task_of_shape(&MbrShape::of(config)?, config))
}

fn task_of_shape(shape: &MbrShape, config: &Configuration<Cell>) -> GTaskId {
    let (lo, hi) = shape.normalized();
    if (lo, hi) == (1, 2) || ((lo, hi) == (2, 2) && config.occ() <= 3) {
        GTaskId::T4
    } else if (lo, hi) == (2, 3) && !shape.all_corners_occupied() {
        GTaskId::T3
    } else if lo >= 2 && !shape.all_corners_occupied() {
        GTaskId::T2
    } else {
        GTaskId::T1
    }
}

/// Cell universe of the 3-row, 2-column box; cell id `row * 2 + col`.
pub fn box32_universe() -> Universe {
    let id = |r: i32, c: i32| (r * 2 + c) as usize;
    let mut adj = vec![0 as Pattern; 6];
    for r in 0..3 {
        for c in 0..2 {
            for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = (r + dr, c + dc);
                if (0..3).contains(&nr) && (0..2).contains(&nc) {
                    adj[id(r, c)] |= 1 << id(nr, nc);
                }
            }
        }
    }
    let mut group = Vec::new();
    for flip_r in [false, true] {
        for flip_c in [false, true] {
            let g: Vec<u8> = (0..6)
                .map(|x| {
                    let (r, c) = (x / 2, x % 2);
                    let r = if flip_r { 2 - r } else { r };
                    let c = if flip_c { 1 - c } else { c };
                    (r * 2 + c) as u8
                })
                .collect();
            group.push(g);
        }
    }
    let names = (0..6).map(|x| format!("({},{})", x / 2, x % 2)).collect();
    Universe {
        cells: 6,
        adj,
        group,
        names,
    }
}

/// Constraints on the 3×2 endgame table.
pub struct Grid32Rules {
    u: Universe,
}

impl Grid32Rules {
    pub fn new() -> Self {
        Grid32Rules {
            u: box32_universe(),
        }
    }

    fn cells(p: Pattern) -> Vec<(i32, i32)> {
        (0..6)
            .filter(|&x| p >> x & 1 == 1)
            .map(|x| (x / 2, x % 2))
            .collect()
    }

    /// Key of the terminal class: two diagonal cells of a 2×2 square.
    pub fn diagonal_key(table: &MoveTable) -> Pattern {
        table.key_of(0b1001)
    }
}

impl Default for Grid32Rules {
    fn default() -> Self {
        Self::new()
    }
}

impl TableRules for Grid32Rules {
    fn universe(&self) -> &Universe {
        &self.u
    }

    fn role(&self, p: Pattern) -> Role {
        let c = Self::cells(p);
        if c.is_empty() {
            return Role::Outside;
        }
        let rows = c.iter().map(|x| x.0).max().unwrap() - c.iter().map(|x| x.0).min().unwrap() + 1;
        let cols = c.iter().map(|x| x.1).max().unwrap() - c.iter().map(|x| x.1).min().unwrap() + 1;
        if rows == 3 && cols == 2 {
            let corners_full = [0, 1, 4, 5].iter().all(|&x| p >> x & 1 == 1);
            return if corners_full {
                Role::Outside
            } else {
                Role::Free
            };
        }
        if c.len() == 2 && rows == 2 && cols == 2 {
            return Role::Terminal;
        }
        Role::Outside
    }

    fn may_produce(&self, _from: Pattern, _to: Pattern) -> bool {
        true
    }
}

/// Synthesizes the 3×2 endgame table (uncertified).
pub fn synthesize_32_table() -> Result<MoveTable> {
    synthesize(TableKind::Grid32, &Grid32Rules::new())
}

/// The square-grid gathering algorithm.
#[derive(Debug, Clone)]
pub struct GatherGrid {
    table: MoveTable,
}

impl GatherGrid {
    pub fn new() -> Result<Self> {
        let table = synthesize_32_table()?;
        let report = crate::verifier::certify_table(&table);
        if !report.passed() {
            return Err(Error::Certification(report.summary()));
        }
        Ok(GatherGrid { table })
    }

    pub fn table(&self) -> &MoveTable {
        &self.table
    }

    pub fn move_st(&self, snap: &Snapshot<Cell>) -> Result<Decision<Cell>> {
        let config = &snap.config;
        let me = snap.me;
        if !config.contains(me) {
            return input("active robot is not on an occupied vertex");
        }
        if config.is_gathered() {
            return Ok(Decision::nil(me, None));
        }
        let shape = MbrShape::of(config)?;
        let task = task_of_shape(&shape, config);
        let r = shape.rect;
        let (lo, _) = shape.normalized();
        let mut dests = Vec::new();
        match task {
            GTaskId::T4 => {
                let others: Vec<Cell> = config
                    .occupied()
                    .iter()
                    .copied()
                    .filter(|&v| v != me)
                    .collect();
                match config.occ() {
                    2 if Grid.is_edge(me, others[0]) => dests.push(others[0]),
                    2 => dests.extend(
                        shape
                            .corners
                            .iter()
                            .copied()
                            .filter(|&c| !config.contains(c)),
                    ),
                    _ => {
                        let center = config
                            .occupied()
                            .iter()
                            .copied()
                            .find(|&c| {
                                config
                                    .occupied()
                                    .iter()
                                    .filter(|&&x| Grid.is_edge(c, x))
                                    .count()
                                    == 2
                            })
                            .expect("bent path has a center");
                        if me != center {
                            dests.push(center);
                        }
                    }
                }
            }
            GTaskId::T1 if lo == 1 => {
                if r.rows() == 1 {
                    dests.extend([Cell::new(me.row - 1, me.col), Cell::new(me.row + 1, me.col)]);
                } else {
                    dests.extend([Cell::new(me.row, me.col - 1), Cell::new(me.row, me.col + 1)]);
                }
            }
            GTaskId::T1 => {
                for side in sides(&r) {
                    if side.len == shape.normalized().1 && side.contains(me) {
                        dests.push(side.outward(me));
                    }
                }
            }
            GTaskId::T2 => {
                let short = sides(&r)
                    .into_iter()
                    .filter(|s| s.len == lo)
                    .collect::<Vec<_>>();
                for &v in shape.corners.iter().filter(|&&c| !config.contains(c)) {
                    for side in short.iter().filter(|s| !s.contains(v)) {
                        if side.contains(me) {
                            dests.push(side.inward(me));
                        }
                    }
                }
            }
            GTaskId::T3 => dests = self.endgame_dests(&r, snap),
        }
        Ok(Decision {
            offer: MoveOffer::of(me, dests),
            task: Some(task.as_str()),
        })
    }

    fn endgame_dests(&self, r: &Rect, snap: &Snapshot<Cell>) -> Vec<Cell> {
        let transpose = r.rows() == 2;
        let to_box = |v: Cell| -> u8 {
            let (dr, dc) = (v.row - r.min.row, v.col - r.min.col);
            let (br, bc) = if transpose { (dc, dr) } else { (dr, dc) };
            (br * 2 + bc) as u8
        };
        let from_box = |x: u8| -> Cell {
            let (br, bc) = (i32::from(x / 2), i32::from(x % 2));
            let (dr, dc) = if transpose { (bc, br) } else { (br, bc) };
            Cell::new(r.min.row + dr, r.min.col + dc)
        };
        let pattern = snap
            .config
            .occupied()
            .iter()
            .fold(0 as Pattern, |acc, &v| acc | 1 << to_box(v));
        let me = to_box(snap.me);
        self.table
            .moves_for(pattern)
            .unwrap_or(&[])
            .iter()
            .filter(|m| m.0 == me)
            .map(|m| from_box(m.1))
            .collect()
    }
}

/// One side of a rectangle with its outward direction.
struct Side {
    len: u32,
    /// Fixed coordinate: `(is_row, value)`.
    line: (bool, i32),
    out: (i32, i32),
}

impl Side {
    fn contains(&self, v: Cell) -> bool {
        if self.line.0 {
            v.row == self.line.1
        } else {
            v.col == self.line.1
        }
    }

    fn outward(&self, v: Cell) -> Cell {
        Cell::new(v.row + self.out.0, v.col + self.out.1)
    }

    fn inward(&self, v: Cell) -> Cell {
        Cell::new(v.row - self.out.0, v.col - self.out.1)
    }
}

fn sides(r: &Rect) -> Vec<Side> {
    vec![
        Side {
            len: r.cols(),
            line: (true, r.min.row),
            out: (-1, 0),
        },
        Side {
            len: r.cols(),
            line: (true, r.max.row),
            out: (1, 0),
        },
        Side {
            len: r.rows(),
            line: (false, r.min.col),
            out: (0, -1),
        },
        Side {
            len: r.rows(),
            line: (false, r.max.col),
            out: (0, 1),
        },
    ]
}

impl Algorithm<Grid> for GatherGrid {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn decide(&self, _topo: &Grid, snap: &Snapshot<Cell>) -> Result<Decision<Cell>> {
        self.move_st(snap)
    }

    fn task_of(&self, _topo: &Grid, config: &Configuration<Cell>) -> Option<&'static str> {
        task_st(config).ok().map(GTaskId::as_str)
    }

    fn validate_initial(&self, _topo: &Grid, config: &Configuration<Cell>) -> Result<()> {
        match ust_witness(config) {
            USTWitness::NotInUST => Ok(()),
            w => Err(Error::Ungatherable(w.as_str().into())),
        }
    }
}
