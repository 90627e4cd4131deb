//! Certificate checks for synthesized endgame tables.

use crate::grid::Grid32Rules;
use crate::hypercube::Q3Rules;
use crate::table::{successors, MoveTable, Pattern, Role, TableKind, TableRules};
use serde::Serialize;
use std::collections::BTreeMap;

/// Longest allowed class path for the `Q_3` table.
pub const Q3_DEPTH_BOUND: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseVerdict {
    pub clause: &'static str,
    pub passed: bool,
    /// Label of the first offending class and what went wrong.
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableCertificateReport {
    pub kind: TableKind,
    pub classes: usize,
    pub depth: Option<u32>,
    pub clauses: Vec<ClauseVerdict>,
}

impl TableCertificateReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        self.clauses
            .iter()
            .map(|c| match &c.counterexample {
                None => format!("{}: pass", c.clause),
                Some(w) => format!("{}: FAIL ({w})", c.clause),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn rules_for(kind: TableKind) -> Box<dyn TableRules> {
    match kind {
        TableKind::Q3 => Box::new(Q3Rules::new()),
        TableKind::Grid32 => Box::new(Grid32Rules::new()),
    }
}

struct Edge {
    to: Pattern,
    dashed: bool,
}

/// Checks every certificate clause over all classes of `table`.
pub fn certify_table(table: &MoveTable) -> TableCertificateReport {
    let rules = rules_for(table.kind);
    let u = &table.universe;
    let label = |p: Pattern| {
        table.class_of(p).map_or_else(
            || format!("{{{}}}", u.render(p).join(",")),
            |c| c.label.clone(),
        )
    };
    let mut clauses = Vec::new();
    let mut fail = |clause: &'static str, witness: Option<String>| {
        clauses.push(ClauseVerdict {
            clause,
            passed: witness.is_none(),
            counterexample: witness,
        });
    };

    // Well-formedness and stabilizer closure.
    let mut witness = None;
    for c in &table.classes {
        let expected_role = rules.role(c.key);
        let needs_moves = matches!(c.role, Role::Free | Role::Special(_));
        let bad = if expected_role != c.role {
            Some("role differs from the rules")
        } else if needs_moves == c.moves.is_empty() {
            Some("move set presence does not match role")
        } else if c
            .moves
            .iter()
            .any(|&(s, t)| c.key >> s & 1 == 0 || !u.adjacent(s, t))
        {
            Some("move does not start on an occupied cell or is not an edge")
        } else if u.stabilizer(c.key).iter().any(|&g| {
            c.moves.iter().any(|&(s, t)| {
                !c.moves
                    .contains(&(u.group[g][s as usize], u.group[g][t as usize]))
            })
        }) {
            Some("move set is not closed under the class stabilizer")
        } else if let Role::Special(m) = &c.role {
            (m != &c.moves).then_some("fixed move of an ungatherable intermediate was changed")
        } else {
            None
        };
        if let Some(b) = bad {
            witness = Some(format!("{}: {b}", c.label));
            break;
        }
    }
    fail("well-formed", witness);

    // Occupied targets never double as sources.
    let mut witness = None;
    for c in table.classes.iter().filter(|c| c.role == Role::Free) {
        let sources: Pattern = c.moves.iter().fold(0, |a, &(s, _)| a | 1 << s);
        if c.moves
            .iter()
            .any(|&(_, t)| c.key >> t & 1 == 1 && sources >> t & 1 == 1)
        {
            witness = Some(format!("{}: an occupied target is also a source", c.label));
            break;
        }
    }
    fail("sources-disjoint-from-occupied-targets", witness);

    // Class graph.
    let mut graph: BTreeMap<Pattern, Vec<Edge>> = BTreeMap::new();
    let mut self_loop = None;
    for c in &table.classes {
        let edges = graph.entry(c.key).or_default();
        for &(s, t) in &c.moves {
            let succ = successors(c.key, s, t);
            for (q, dashed) in
                std::iter::once((succ.solid, false)).chain(succ.dashed.map(|d| (d, true)))
            {
                let qk = table.key_of(q);
                if qk == c.key && self_loop.is_none() {
                    self_loop = Some(format!(
                        "{}: move onto an unoccupied cell keeps the class",
                        c.label
                    ));
                }
                edges.push(Edge { to: qk, dashed });
            }
        }
    }

    let cycle = find_cycle(&graph);
    fail(
        "acyclicity",
        self_loop.or_else(|| {
            cycle.map(|cyc| {
                format!(
                    "cycle {}",
                    cyc.iter()
                        .map(|&p| label(p))
                        .collect::<Vec<_>>()
                        .join(" -> ")
                )
            })
        }),
    );

    let mut witness = None;
    'mono: for (&p, edges) in &graph {
        for e in edges {
            let (a, b) = (p.count_ones(), e.to.count_ones());
            if (!e.dashed && b > a) || (e.dashed && b > a + 1) {
                witness = Some(format!("{} -> {}", label(p), label(e.to)));
                break 'mono;
            }
        }
    }
    fail("occ-monotonicity", witness);

    let mut witness = None;
    'disc: for (&p, edges) in &graph {
        let from_special = matches!(rules.role(p), Role::Special(_));
        for e in edges {
            let ok = match rules.role(e.to) {
                Role::Terminal | Role::Free => true,
                Role::Special(_) => from_special || rules.may_produce(p, e.to),
                Role::Exit | Role::Outside => false,
            };
            if !ok {
                witness = Some(format!("{} produces {}", label(p), label(e.to)));
                break 'disc;
            }
        }
    }
    if witness.is_none() && table.kind == TableKind::Q3 {
        witness = q3_pair_endgame_within_one_epoch(table);
    }
    fail("u-set-discipline", witness);

    let depth = longest_path(&graph);
    let bound = match table.kind {
        TableKind::Q3 => Q3_DEPTH_BOUND,
        TableKind::Grid32 => table.classes.len() as u32,
    };
    fail(
        "depth-bound",
        match depth {
            Some(d) if d <= bound => None,
            Some(d) => Some(format!("longest class path {d} > {bound}")),
            None => Some("class graph has a cycle".into()),
        },
    );

    let mut witness = None;
    for (&p, edges) in &graph {
        if let Some(e) = edges.iter().find(|e| table.entry(e.to).is_none()) {
            witness = Some(format!(
                "{} -> unknown class {{{}}}",
                label(p),
                u.render(e.to).join(",")
            ));
            break;
        }
        let role = &table.entry(p).expect("class").role;
        if edges.is_empty() && *role != Role::Terminal && *role != Role::Exit {
            witness = Some(format!("{} is a non-terminal sink", label(p)));
            break;
        }
    }
    if witness.is_none() && table.kind == TableKind::Grid32 {
        let terminals: Vec<&str> = table
            .classes
            .iter()
            .filter(|c| c.role == Role::Terminal)
            .map(|c| c.label.as_str())
            .collect();
        let diag = Grid32Rules::diagonal_key(table);
        if table
            .classes
            .iter()
            .filter(|c| c.role == Role::Terminal)
            .map(|c| c.key)
            .collect::<Vec<_>>()
            != vec![diag]
        {
            witness = Some(format!(
                "terminal classes {terminals:?} are not exactly the 2x2 diagonal"
            ));
        }
    }
    fail("gathering-reachability", witness);

    TableCertificateReport {
        kind: table.kind,
        classes: table.classes.len(),
        depth,
        clauses,
    }
}

fn find_cycle(graph: &BTreeMap<Pattern, Vec<Edge>>) -> Option<Vec<Pattern>> {
    // 0 = new, 1 = on stack, 2 = done
    let mut state: BTreeMap<Pattern, u8> = BTreeMap::new();
    let mut stack: Vec<(Pattern, usize)> = Vec::new();
    for &root in graph.keys() {
        if state.get(&root).copied().unwrap_or(0) != 0 {
            continue;
        }
        stack.push((root, 0));
        state.insert(root, 1);
        while let Some(&mut (p, ref mut i)) = stack.last_mut() {
            let edges = graph.get(&p).map_or(&[][..], |v| v.as_slice());
            if *i < edges.len() {
                let q = edges[*i].to;
                *i += 1;
                if q == p {
                    continue;
                }
                match state.get(&q).copied().unwrap_or(0) {
                    0 => {
                        state.insert(q, 1);
                        stack.push((q, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(x, _)| x == q).expect("on stack");
                        let mut cyc: Vec<Pattern> =
                            stack[start..].iter().map(|&(x, _)| x).collect();
                        cyc.push(q);
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                state.insert(p, 2);
                stack.pop();
            }
        }
    }
    None
}

fn longest_path(graph: &BTreeMap<Pattern, Vec<Edge>>) -> Option<u32> {
    fn go(
        p: Pattern,
        g: &BTreeMap<Pattern, Vec<Edge>>,
        memo: &mut BTreeMap<Pattern, Option<u32>>,
        depth: usize,
    ) -> Option<u32> {
        if let Some(&m) = memo.get(&p) {
            return m;
        }
        if depth > g.len() {
            return None;
        }
        let mut best = 0;
        for e in g.get(&p).map_or(&[][..], |v| v.as_slice()) {
            if e.to == p {
                continue;
            }
            best = best.max(go(e.to, g, memo, depth + 1)? + 1);
        }
        memo.insert(p, Some(best));
        Some(best)
    }
    if find_cycle(graph).is_some() {
        return None;
    }
    let mut memo = BTreeMap::new();
    graph
        .keys()
        .map(|&p| go(p, graph, &mut memo, 0))
        .try_fold(0, |m, d| d.map(|d| m.max(d)))
}

/// From a distance-two pair, every schedule and hidden multiplicity (up to
/// three per vertex) gathers within one epoch of the first move.
fn q3_pair_endgame_within_one_epoch(table: &MoveTable) -> Option<String> {
    let (a, b) = (0u8, 3u8);
    for ca in 1..=3usize {
        for cb in 1..=3usize {
            let mut start = vec![a; ca];
            start.extend(std::iter::repeat_n(b, cb));
            let k = start.len();
            for order in permutations(k) {
                if let Some(w) = explore_pair(table, &start, &order) {
                    return Some(format!("2.2 with counts ({ca},{cb}), order {order:?}: {w}"));
                }
            }
        }
    }
    None
}

fn explore_pair(table: &MoveTable, start: &[u8], order: &[usize]) -> Option<String> {
    let k = order.len();
    // (positions, round index, first move round)
    let mut stack = vec![(start.to_vec(), 0usize, None::<usize>)];
    while let Some((pos, r, first)) = stack.pop() {
        let pattern: Pattern = pos.iter().fold(0, |acc, &c| acc | 1 << c);
        if pattern.count_ones() == 1 {
            let f = first.expect("moved before gathering");
            if r - f > k {
                return Some(format!("gathered {} rounds after the first move", r - f));
            }
            continue;
        }
        if r > 3 * k {
            return Some("no gathering within three epochs".into());
        }
        let robot = order[r % k];
        let me = pos[robot];
        let dests: Vec<u8> = table
            .moves_for(pattern)
            .unwrap_or(&[])
            .iter()
            .filter(|m| m.0 == me)
            .map(|m| m.1)
            .collect();
        if dests.is_empty() {
            stack.push((pos, r + 1, first));
        } else {
            for t in dests {
                let mut next = pos.clone();
                next[robot] = t;
                stack.push((next, r + 1, first.or(Some(r))));
            }
        }
    }
    None
}

pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}
