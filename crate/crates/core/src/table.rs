//! Endgame move tables over a small symmetric cell universe.
//!
//! A table assigns to every occupancy class one orbit of `(source, target)`
//! moves under the class stabilizer. Synthesis ranks classes by the longest
//! path to a terminal class and, among admissible orbits, keeps the one with
//! the smallest resulting rank (ties broken lexicographically).

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Occupancy bitset over the universe cells.
pub type Pattern = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub cells: usize,
    /// Adjacency bitmask per cell.
    pub adj: Vec<Pattern>,
    /// Symmetry group as cell permutations.
    pub group: Vec<Vec<u8>>,
    pub names: Vec<String>,
}

impl Universe {
    pub fn image(&self, g: &[u8], p: Pattern) -> Pattern {
        (0..self.cells)
            .filter(|&c| p >> c & 1 == 1)
            .fold(0, |acc, c| acc | 1 << g[c])
    }

    /// Canonical representative and one group element mapping `p` onto it.
    pub fn canonical(&self, p: Pattern) -> (Pattern, usize) {
        let mut best = (Pattern::MAX, 0);
        for (i, g) in self.group.iter().enumerate() {
            let img = self.image(g, p);
            if img < best.0 {
                best = (img, i);
            }
        }
        best
    }

    pub fn stabilizer(&self, p: Pattern) -> Vec<usize> {
        (0..self.group.len())
            .filter(|&i| self.image(&self.group[i], p) == p)
            .collect()
    }

    pub fn inverse(&self, g: &[u8]) -> Vec<u8> {
        let mut inv = vec![0u8; g.len()];
        for (i, &x) in g.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        inv
    }

    pub fn adjacent(&self, a: u8, b: u8) -> bool {
        self.adj[a as usize] >> b & 1 == 1
    }

    pub fn render(&self, p: Pattern) -> Vec<String> {
        (0..self.cells)
            .filter(|&c| p >> c & 1 == 1)
            .map(|c| self.names[c].clone())
            .collect()
    }
}

/// How a class participates in the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Role {
    /// Final class of the table; no moves.
    Terminal,
    /// Move chosen by synthesis.
    Free,
    /// Member of the ungatherable set; its fixed move is given.
    Special(Vec<(u8, u8)>),
    /// Handled outside the universe (e.g. leaves the bounding region).
    Exit,
    /// Not part of the table's domain.
    Outside,
}

/// Table-specific constraints used by synthesis and certification.
pub trait TableRules {
    fn universe(&self) -> &Universe;
    fn role(&self, p: Pattern) -> Role;
    /// May a move from a class with representative `from` produce pattern `to`?
    fn may_produce(&self, from: Pattern, to: Pattern) -> bool;
    /// Additional per-move restriction.
    fn move_allowed(&self, _from: Pattern, _s: u8, _t: u8) -> bool {
        true
    }
    /// Sort priority among classes of the same size (for labels).
    fn label_priority(&self, _p: Pattern) -> u8 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableKind {
    Q3,
    Grid32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub key: Pattern,
    pub label: String,
    pub role: Role,
    /// One stabilizer orbit of moves, in representative coordinates.
    pub moves: Vec<(u8, u8)>,
    /// Longest number of class transitions to a terminal class.
    pub rank: Option<u32>,
}

/// Effect of a single move on the occupied pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Successors {
    /// The mover was alone at its source.
    pub solid: Pattern,
    /// The mover left a multiplicity behind; `None` when that is a self-loop.
    pub dashed: Option<Pattern>,
}

pub fn successors(p: Pattern, s: u8, t: u8) -> Successors {
    let sb = 1 << s;
    let tb = 1 << t;
    if p & tb != 0 {
        Successors {
            solid: p & !sb,
            dashed: None,
        }
    } else {
        Successors {
            solid: (p & !sb) | tb,
            dashed: Some(p | tb),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MoveTable {
    pub kind: TableKind,
    pub universe: Universe,
    pub classes: Vec<ClassEntry>,
    by_key: BTreeMap<Pattern, usize>,
    /// Per pattern: class index and moves in the pattern's own coordinates.
    expanded: Vec<Option<ExpandedClass>>,
}

type ExpandedClass = (usize, Vec<(u8, u8)>);

impl MoveTable {
    pub fn new(kind: TableKind, universe: Universe, classes: Vec<ClassEntry>) -> Self {
        let by_key = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.key, i))
            .collect::<BTreeMap<_, _>>();
        let mut expanded = vec![None; 1 << universe.cells];
        for (p, slot) in expanded.iter_mut().enumerate() {
            let p = p as Pattern;
            if p == 0 {
                continue;
            }
            let (rep, gi) = universe.canonical(p);
            if let Some(&ci) = by_key.get(&rep) {
                let inv = universe.inverse(&universe.group[gi]);
                let mut moves: Vec<(u8, u8)> = classes[ci]
                    .moves
                    .iter()
                    .map(|&(s, t)| (inv[s as usize], inv[t as usize]))
                    .collect();
                moves.sort();
                *slot = Some((ci, moves));
            }
        }
        MoveTable {
            kind,
            universe,
            classes,
            by_key,
            expanded,
        }
    }

    pub fn class_of(&self, p: Pattern) -> Option<&ClassEntry> {
        self.expanded
            .get(p as usize)?
            .as_ref()
            .map(|(ci, _)| &self.classes[*ci])
    }

    /// Moves for an occupied pattern, in that pattern's coordinates.
    pub fn moves_for(&self, p: Pattern) -> Option<&[(u8, u8)]> {
        self.expanded
            .get(p as usize)?
            .as_ref()
            .map(|(_, m)| m.as_slice())
    }

    pub fn entry(&self, key: Pattern) -> Option<&ClassEntry> {
        self.by_key.get(&key).map(|&i| &self.classes[i])
    }

    pub fn key_of(&self, p: Pattern) -> Pattern {
        self.universe.canonical(p).0
    }

    /// Longest class path, if every non-exit class is ranked.
    pub fn depth(&self) -> Option<u32> {
        self.classes
            .iter()
            .filter(|c| c.role != Role::Exit)
            .map(|c| c.rank)
            .try_fold(0, |m, r| r.map(|r| m.max(r)))
    }

    /// Replaces the move orbit of one class (used to build broken tables in tests).
    pub fn with_moves(&self, key: Pattern, moves: Vec<(u8, u8)>) -> MoveTable {
        let mut classes = self.classes.clone();
        if let Some(&i) = self.by_key.get(&key) {
            classes[i].moves = moves;
        }
        MoveTable::new(self.kind, self.universe.clone(), classes)
    }

    /// JSON document: one record per class.
    pub fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            label: &'a str,
            key: Pattern,
            occupied: Vec<String>,
            role: &'a str,
            rank: Option<u32>,
            moves: Vec<(String, String)>,
        }
        let rows: Vec<Row> = self
            .classes
            .iter()
            .map(|c| Row {
                label: &c.label,
                key: c.key,
                occupied: self.universe.render(c.key),
                role: match c.role {
                    Role::Terminal => "terminal",
                    Role::Free => "synthesized",
                    Role::Special(_) => "ungatherable-intermediate",
                    Role::Exit => "exit",
                    Role::Outside => "outside",
                },
                rank: c.rank,
                moves: c
                    .moves
                    .iter()
                    .map(|&(s, t)| {
                        (
                            self.universe.names[s as usize].clone(),
                            self.universe.names[t as usize].clone(),
                        )
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("table rows serialize")
    }
}

/// Move orbits available to class representative `p`, sorted.
pub fn candidate_orbits(u: &Universe, p: Pattern) -> Vec<Vec<(u8, u8)>> {
    let stab = u.stabilizer(p);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for s in 0..u.cells as u8 {
        if p >> s & 1 == 0 {
            continue;
        }
        for t in 0..u.cells as u8 {
            if !u.adjacent(s, t) || seen.contains(&(s, t)) {
                continue;
            }
            let mut orbit: Vec<(u8, u8)> = stab
                .iter()
                .map(|&g| (u.group[g][s as usize], u.group[g][t as usize]))
                .collect();
            orbit.sort();
            orbit.dedup();
            seen.extend(orbit.iter().copied());
            out.push(orbit);
        }
    }
    out.sort();
    out
}

/// Why a candidate orbit cannot be used, or the successor patterns it yields.
fn evaluate(
    rules: &dyn TableRules,
    p: Pattern,
    orbit: &[(u8, u8)],
    special: bool,
) -> Option<Vec<Pattern>> {
    let u = rules.universe();
    let key = u.canonical(p).0;
    let sources: Pattern = orbit.iter().fold(0, |acc, &(s, _)| acc | 1 << s);
    let mut out = Vec::new();
    for &(s, t) in orbit {
        if !special {
            if !rules.move_allowed(p, s, t) {
                return None;
            }
            if p >> t & 1 == 1 && sources >> t & 1 == 1 {
                return None;
            }
        }
        let succ = successors(p, s, t);
        for q in std::iter::once(succ.solid).chain(succ.dashed) {
            if q == 0 {
                return None;
            }
            let qk = u.canonical(q).0;
            if qk == key {
                return None;
            }
            match rules.role(qk) {
                Role::Terminal | Role::Free | Role::Special(_) => {}
                Role::Exit | Role::Outside => return None,
            }
            if !special && !rules.may_produce(p, q) {
                return None;
            }
            out.push(qk);
        }
    }
    Some(out)
}

/// Deterministic layered synthesis. Fails if some class cannot be ranked.
pub fn synthesize(kind: TableKind, rules: &dyn TableRules) -> Result<MoveTable> {
    let u = rules.universe().clone();
    let mut reps: Vec<Pattern> = (1..(1u32 << u.cells) as Pattern)
        .filter(|&p| u.canonical(p).0 == p)
        .collect();
    reps.retain(|&p| rules.role(p) != Role::Outside);
    reps.sort_by_key(|&p| (p.count_ones(), rules.label_priority(p), p));

    let mut rank: BTreeMap<Pattern, u32> = BTreeMap::new();
    let mut chosen: BTreeMap<Pattern, Vec<(u8, u8)>> = BTreeMap::new();
    for &p in &reps {
        if rules.role(p) == Role::Terminal {
            rank.insert(p, 0);
            chosen.insert(p, Vec::new());
        }
    }
    let mut layer = 0;
    loop {
        layer += 1;
        let frozen = rank.clone();
        let mut progress = false;
        for &p in &reps {
            if frozen.contains_key(&p) {
                continue;
            }
            let (candidates, special) = match rules.role(p) {
                Role::Free => (candidate_orbits(&u, p), false),
                Role::Special(m) => (vec![m], true),
                _ => continue,
            };
            let mut best: Option<(u32, Vec<(u8, u8)>)> = None;
            for orbit in candidates {
                let Some(succ) = evaluate(rules, p, &orbit, special) else {
                    continue;
                };
                let Some(value) = succ
                    .iter()
                    .map(|q| frozen.get(q).copied())
                    .try_fold(0u32, |m, r| r.map(|r| m.max(r + 1)))
                else {
                    continue;
                };
                if best.as_ref().is_none_or(|b| value < b.0) {
                    best = Some((value, orbit));
                }
            }
            if let Some((value, orbit)) = best {
                debug_assert!(value <= layer);
                rank.insert(p, value);
                chosen.insert(p, orbit);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let mut classes = Vec::new();
    let mut per_occ: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in &reps {
        let role = rules.role(p);
        if !rank.contains_key(&p) && role != Role::Exit {
            return Err(Error::Synthesis(format!(
                "no admissible move for class {{{}}}",
                u.render(p).join(",")
            )));
        }
        let idx = per_occ.entry(p.count_ones()).or_insert(0);
        *idx += 1;
        classes.push(ClassEntry {
            key: p,
            label: format!("{}.{}", p.count_ones(), idx),
            moves: chosen.remove(&p).unwrap_or_default(),
            rank: rank.get(&p).copied(),
            role,
        });
    }
    Ok(MoveTable::new(kind, u, classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path on three cells with its reflection; terminal = single cell.
    struct Path3(Universe);

    impl Path3 {
        fn new() -> Self {
            Path3(Universe {
                cells: 3,
                adj: vec![0b010, 0b101, 0b010],
                group: vec![vec![0, 1, 2], vec![2, 1, 0]],
                names: vec!["a".into(), "b".into(), "c".into()],
            })
        }
    }

    impl TableRules for Path3 {
        fn universe(&self) -> &Universe {
            &self.0
        }
        fn role(&self, p: Pattern) -> Role {
            if p.count_ones() == 1 {
                Role::Terminal
            } else {
                Role::Free
            }
        }
        fn may_produce(&self, _: Pattern, _: Pattern) -> bool {
            true
        }
    }

    #[test]
    fn successors_follow_occupancy() {
        assert_eq!(
            successors(0b011, 0, 1),
            Successors {
                solid: 0b010,
                dashed: None
            }
        );
        assert_eq!(
            successors(0b001, 0, 1),
            Successors {
                solid: 0b010,
                dashed: Some(0b011)
            }
        );
    }

    #[test]
    fn path_table_moves_inward() {
        let t = synthesize(TableKind::Q3, &Path3::new()).unwrap();
        let ends = t.entry(0b101).unwrap();
        assert_eq!(ends.moves, vec![(0, 1), (2, 1)]);
        assert_eq!(t.moves_for(0b110), Some(&[(2, 1)][..]));
        assert_eq!(t.depth(), Some(3));
    }
}
