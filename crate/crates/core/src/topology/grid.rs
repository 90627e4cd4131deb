use super::{CanonicalKey, Symmetric, Topology};
use crate::error::{input, Result};
use serde::{Deserialize, Serialize};

/// Coordinates are kept inside this window so sums never overflow.
pub const COORD_LIMIT: i32 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub const fn new(row: i32, col: i32) -> Self {
        Cell { row, col }
    }
}

/// The infinite square tessellation graph. Never materialized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Grid;

impl Topology for Grid {
    type Vertex = Cell;

    fn check(&self, v: Cell) -> Result<()> {
        if v.row.abs() > COORD_LIMIT || v.col.abs() > COORD_LIMIT {
            return input(format!(
                "cell ({},{}) is outside the supported window",
                v.row, v.col
            ));
        }
        Ok(())
    }

    fn adjacent(&self, v: Cell) -> Vec<Cell> {
        vec![
            Cell::new(v.row - 1, v.col),
            Cell::new(v.row, v.col - 1),
            Cell::new(v.row, v.col + 1),
            Cell::new(v.row + 1, v.col),
        ]
    }

    fn dist(&self, u: Cell, v: Cell) -> u32 {
        (u.row - v.row).unsigned_abs() + (u.col - v.col).unsigned_abs()
    }

    fn render(&self, v: Cell) -> String {
        format!("({},{})", v.row, v.col)
    }

    fn parse(&self, s: &str) -> Result<Cell> {
        let t = s.trim();
        let t = t.strip_prefix('(').unwrap_or(t);
        let t = t.strip_suffix(')').unwrap_or(t);
        let mut parts = t.split(',').map(|p| p.trim().parse::<i32>());
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(row)), Some(Ok(col)), None) => {
                let c = Cell::new(row, col);
                self.check(c)?;
                Ok(c)
            }
            _ => input(format!("'{s}' is not a grid cell like (row,col)")),
        }
    }
}

/// Dihedral element (as an orthogonal integer matrix) followed by a shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridAutomorphism {
    pub m: [[i32; 2]; 2],
    pub shift: (i32, i32),
}

impl GridAutomorphism {
    /// The eight symmetries of the square fixing the origin.
    pub fn point_group() -> Vec<GridAutomorphism> {
        let mut out = Vec::with_capacity(8);
        for reflect in [false, true] {
            let mut m = if reflect {
                [[1, 0], [0, -1]]
            } else {
                [[1, 0], [0, 1]]
            };
            for _ in 0..4 {
                out.push(GridAutomorphism { m, shift: (0, 0) });
                // Rotate by 90 degrees: (r, c) -> (c, -r).
                m = [[m[1][0], m[1][1]], [-m[0][0], -m[0][1]]];
            }
        }
        out
    }

    pub fn translation(dr: i32, dc: i32) -> GridAutomorphism {
        GridAutomorphism {
            m: [[1, 0], [0, 1]],
            shift: (dr, dc),
        }
    }

    fn linear(&self, v: Cell) -> Cell {
        Cell::new(
            self.m[0][0] * v.row + self.m[0][1] * v.col,
            self.m[1][0] * v.row + self.m[1][1] * v.col,
        )
    }

    /// True when rows and columns are exchanged.
    pub fn swaps_axes(&self) -> bool {
        self.m[0][0] == 0
    }
}

impl Symmetric for Grid {
    type Automorphism = GridAutomorphism;

    fn apply(&self, a: &GridAutomorphism, v: Cell) -> Cell {
        let l = a.linear(v);
        Cell::new(l.row + a.shift.0, l.col + a.shift.1)
    }

    fn compose(&self, a: &GridAutomorphism, b: &GridAutomorphism) -> GridAutomorphism {
        let mut m = [[0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
            }
        }
        let t = a.linear(Cell::new(b.shift.0, b.shift.1));
        GridAutomorphism {
            m,
            shift: (t.row + a.shift.0, t.col + a.shift.1),
        }
    }

    fn inverse(&self, a: &GridAutomorphism) -> GridAutomorphism {
        let m = [[a.m[0][0], a.m[1][0]], [a.m[0][1], a.m[1][1]]];
        let lin = GridAutomorphism { m, shift: (0, 0) };
        let t = lin.linear(Cell::new(a.shift.0, a.shift.1));
        GridAutomorphism {
            m,
            shift: (-t.row, -t.col),
        }
    }

    fn identity(&self) -> GridAutomorphism {
        GridAutomorphism::translation(0, 0)
    }

    fn group_sample(&self) -> Result<Vec<GridAutomorphism>> {
        let shifts = [(0, 0), (1, -2), (-3, 1), (5, 4)];
        let mut out = Vec::new();
        for p in GridAutomorphism::point_group() {
            for &(dr, dc) in &shifts {
                out.push(self.compose(&GridAutomorphism::translation(dr, dc), &p));
            }
        }
        Ok(out)
    }

    fn canonical_key(&self, occupied: &[Cell]) -> Result<CanonicalKey> {
        let best = GridAutomorphism::point_group()
            .iter()
            .map(|g| normalized(occupied.iter().map(|&v| g.linear(v))))
            .min()
            .unwrap_or_default();
        Ok(CanonicalKey::Grid(best))
    }
}

/// Sorted cells translated so the bounding box starts at the origin.
fn normalized(cells: impl Iterator<Item = Cell>) -> Vec<(i32, i32)> {
    let cells: Vec<Cell> = cells.collect();
    let r0 = cells.iter().map(|c| c.row).min().unwrap_or(0);
    let c0 = cells.iter().map(|c| c.col).min().unwrap_or(0);
    let mut out: Vec<(i32, i32)> = cells.iter().map(|c| (c.row - r0, c.col - c0)).collect();
    out.sort();
    out.dedup();
    out
}

/// Axis-aligned rectangle of grid cells, inclusive corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub min: Cell,
    pub max: Cell,
}

impl Rect {
    pub fn rows(&self) -> u32 {
        (self.max.row - self.min.row) as u32 + 1
    }

    pub fn cols(&self) -> u32 {
        (self.max.col - self.min.col) as u32 + 1
    }

    /// `(short, long)` side lengths, orientation-free.
    pub fn shape(&self) -> (u32, u32) {
        let (m, n) = (self.rows(), self.cols());
        (m.min(n), m.max(n))
    }

    pub fn contains(&self, v: Cell) -> bool {
        (self.min.row..=self.max.row).contains(&v.row)
            && (self.min.col..=self.max.col).contains(&v.col)
    }

    /// Distinct corner cells (fewer than four for degenerate rectangles).
    pub fn corners(&self) -> Vec<Cell> {
        let mut out = vec![
            self.min,
            Cell::new(self.min.row, self.max.col),
            Cell::new(self.max.row, self.min.col),
            self.max,
        ];
        out.sort();
        out.dedup();
        out
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity((self.rows() * self.cols()) as usize);
        for row in self.min.row..=self.max.row {
            for col in self.min.col..=self.max.col {
                out.push(Cell::new(row, col));
            }
        }
        out
    }
}

/// Minimum bounding rectangle of a nonempty occupied set.
pub fn mbr(occupied: &[Cell]) -> Result<Rect> {
    let Some(&first) = occupied.first() else {
        return input("mbr of an empty occupied set");
    };
    let mut r = Rect {
        min: first,
        max: first,
    };
    for &v in occupied {
        Grid.check(v)?;
        r.min.row = r.min.row.min(v.row);
        r.min.col = r.min.col.min(v.col);
        r.max.row = r.max.row.max(v.row);
        r.max.col = r.max.col.max(v.col);
    }
    Ok(r)
}
