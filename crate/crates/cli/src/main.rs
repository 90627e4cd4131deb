//! `rrgather`: simulate runs, sweep placements, replay adversaries and
//! inspect the endgame move tables.
//!
//! Exit status is 0 on success, 1 when a check finds a violation, and 2 on
//! malformed input or an engine contract error.

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrgather::adversary::{
    clique_bipartite_scenarios, full_graph_scenario, p2_scenario, p3_classes, p3_scenario,
    prove_nontermination, AdversaryScenario, ChaseOutcome, ExpectedVerdict, ExplicitGraph, Greedy,
    MoveAcross, ProofOutcome, ScenarioFile, SmallestLabel, ToOccupied, ToUnoccupied,
};
use rrgather::grid::{synthesize_32_table, GatherGrid};
use rrgather::hypercube::{synthesize_t1_table, GatherHypercube};
use rrgather::swarm::{
    export_trace, run, Algorithm, Placement, Resolver, RunOptions, Schedule, Verdict,
};
use rrgather::table::{successors, MoveTable, Role};
use rrgather::topology::{Bits, Cell, Cube, Grid, Topology};
use rrgather::verifier::{
    certify_table, sweep_grid, sweep_hypercube, PlacementPolicy, ResolverPolicy, SchedulePolicy,
    SweepReport, SweepSpec, SweepTopology, TransitionTable, GATHERING,
};
use rrgather::Error;
use std::collections::BTreeSet;
use std::hash::Hash;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

type Res<T> = Result<T, Error>;

#[derive(Parser)]
#[command(
    name = "rrgather",
    version,
    about = "Round-robin gathering simulator and model checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// hypercube[:d], grid, clique:<n> or bipartite:<n>
    #[arg(long, default_value = "hypercube")]
    topology: String,
    /// Hypercube dimension (or clique/bipartite size).
    #[arg(long)]
    dim: Option<u32>,
    /// Grid box as <rows>x<cols>, for random grid placements and sweeps.
    #[arg(long)]
    mbr: Option<String>,
    /// hypercube, grid or strawman:<greedy|to-occupied|to-unoccupied|move-across|smallest-label>
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file, written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one execution and export its trace.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Vertices separated by ';', each optionally `*count`, or random:<robots>.
        #[arg(long)]
        placement: String,
        /// canonical, seeded, or a comma-separated robot order.
        #[arg(long, default_value = "canonical")]
        schedule: String,
        /// canonical or seeded
        #[arg(long, default_value = "canonical")]
        resolver: String,
        #[arg(long, default_value_t = 64)]
        horizon_epochs: u64,
    },
    /// Model-check many placements and schedules.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// exhaustive:<max robots>:<max per vertex> or random:<count>:<max robots>
        #[arg(long, default_value = "exhaustive:4:3")]
        placement: String,
        /// all, canonical or sampled:<count>
        #[arg(long, default_value = "all")]
        schedule: String,
        /// adversarial or canonical
        #[arg(long, default_value = "adversarial")]
        resolver: String,
        #[arg(long, default_value_t = 40)]
        horizon_epochs: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Run an impossibility scenario and print its certificate.
    Adversary {
        #[command(flatten)]
        common: Common,
        /// p2, p3, p3-straight, full, clique-two-occupied, bipartite-one-per-side,
        /// bipartite-one-side, or a scenario JSON file.
        #[arg(long)]
        scenario: String,
        /// canonical or adversarial
        #[arg(long, default_value = "canonical")]
        resolver: String,
        #[arg(long, default_value_t = 64)]
        horizon_epochs: u64,
    },
    /// Synthesize and certify the endgame move table of the chosen topology.
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Write a transition graph as DOT text.
    ExportGraph {
        #[command(flatten)]
        common: Common,
        /// classes (endgame table) or tasks (expected task transitions)
        #[arg(long, default_value = "classes")]
        graph: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            common,
            placement,
            schedule,
            resolver,
            horizon_epochs,
        } => simulate(&common, &placement, &schedule, &resolver, horizon_epochs),
        Command::Sweep {
            common,
            placement,
            schedule,
            resolver,
            horizon_epochs,
            workers,
        } => sweep(
            &common,
            &placement,
            &schedule,
            &resolver,
            horizon_epochs,
            workers,
        ),
        Command::Adversary {
            common,
            scenario,
            resolver,
            horizon_epochs,
        } => adversary(&common, &scenario, &resolver, horizon_epochs),
        Command::Certify { common } => certify(&common),
        Command::ExportGraph { common, graph } => export_graph(&common, &graph),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Error::Ungatherable(w)) => {
            eprintln!("error: initial configuration is ungatherable: {w}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn bad<T>(msg: impl Into<String>) -> Res<T> {
    Err(Error::Input(msg.into()))
}

fn write_atomic(path: &Path, text: &str) -> Res<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

enum Topo {
    Cube(Cube),
    Grid,
    Graph(ExplicitGraph),
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Res<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Input(format!("{what}: '{s}' is not a number")))
}

fn topology(sel: &str, dim: Option<u32>) -> Res<Topo> {
    let (kind, arg) = match sel.split_once(':') {
        Some((k, a)) => (k, Some(parse_num::<u32>(a, "topology size")?)),
        None => (sel, dim),
    };
    let size =
        || arg.ok_or_else(|| Error::Input(format!("{kind} needs a size (--dim or {kind}:<n>)")));
    match kind {
        "hypercube" => Ok(Topo::Cube(Cube::new(size()?)?)),
        "grid" => Ok(Topo::Grid),
        "clique" => Ok(Topo::Graph(ExplicitGraph::clique(size()? as usize)?)),
        "bipartite" => Ok(Topo::Graph(ExplicitGraph::complete_bipartite(
            size()? as usize
        )?)),
        _ => bad(format!("unknown topology '{sel}'")),
    }
}

fn mbr_box(s: Option<&str>) -> Res<(u32, u32)> {
    let Some(s) = s else { return Ok((3, 3)) };
    match s.split_once(['x', 'X']) {
        Some((r, c)) => Ok((parse_num(r, "mbr rows")?, parse_num(c, "mbr cols")?)),
        None => bad(format!("mbr '{s}' is not <rows>x<cols>")),
    }
}

fn strawman<T: Topology>(name: &str) -> Res<Box<dyn Algorithm<T>>> {
    Ok(match name {
        "greedy" => Box::new(Greedy),
        "to-occupied" => Box::new(ToOccupied),
        "to-unoccupied" => Box::new(ToUnoccupied),
        "smallest-label" => Box::new(SmallestLabel),
        _ => return bad(format!("unknown strawman '{name}'")),
    })
}

fn cube_alg(sel: Option<&str>) -> Res<Box<dyn Algorithm<Cube>>> {
    match sel.unwrap_or("hypercube") {
        "hypercube" => Ok(Box::new(GatherHypercube::new()?)),
        s => match s.strip_prefix("strawman:") {
            Some(n) => strawman(n),
            None => bad(format!("algorithm '{s}' does not run on hypercubes")),
        },
    }
}

fn grid_alg(sel: Option<&str>) -> Res<Box<dyn Algorithm<Grid>>> {
    match sel.unwrap_or("grid") {
        "grid" => Ok(Box::new(GatherGrid::new()?)),
        s => match s.strip_prefix("strawman:") {
            Some(n) => strawman(n),
            None => bad(format!("algorithm '{s}' does not run on the grid")),
        },
    }
}

fn graph_alg(sel: Option<&str>) -> Res<Box<dyn Algorithm<ExplicitGraph>>> {
    let Some(s) = sel else {
        return bad("clique and bipartite graphs need --algorithm strawman:<name>");
    };
    match s.strip_prefix("strawman:") {
        Some("move-across") => Ok(Box::new(MoveAcross)),
        Some(n) => strawman(n),
        None => bad(format!("algorithm '{s}' does not run on {s} graphs")),
    }
}

fn parse_placement<T: Topology>(topo: &T, text: &str) -> Res<Placement<T::Vertex>> {
    let mut positions = Vec::new();
    for item in text
        .split([';', ' '])
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let (v, n) = match item.rsplit_once('*') {
            Some((v, n)) => (v, parse_num::<u32>(n, "robot count")?),
            None => (item, 1),
        };
        let v = topo.parse(v)?;
        positions.extend(std::iter::repeat_n(v, n as usize));
    }
    Placement::from_positions(positions)
}

fn random_placement<V: Copy + Ord>(cells: &[V], robots: usize, seed: u64) -> Res<Placement<V>> {
    if robots < 2 {
        return bad("random placements need at least two robots");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Placement::from_positions(
        (0..robots)
            .map(|_| cells[rng.gen_range(0..cells.len())])
            .collect(),
    )
}

fn simulate(c: &Common, placement: &str, schedule: &str, resolver: &str, horizon: u64) -> Res<u8> {
    let random = placement
        .strip_prefix("random:")
        .map(|n| parse_num::<usize>(n, "robots"))
        .transpose()?;
    match topology(&c.topology, c.dim)? {
        Topo::Cube(cube) => {
            let p = match random {
                Some(k) => random_placement(&cube.vertices().collect::<Vec<_>>(), k, c.seed)?,
                None => parse_placement(&cube, placement)?,
            };
            simulate_on(
                &cube,
                cube_alg(c.algorithm.as_deref())?.as_ref(),
                p,
                c,
                schedule,
                resolver,
                horizon,
            )
        }
        Topo::Grid => {
            let p = match random {
                Some(k) => {
                    let (rows, cols) = mbr_box(c.mbr.as_deref())?;
                    let cells: Vec<Cell> = (0..rows as i32)
                        .flat_map(|r| (0..cols as i32).map(move |col| Cell::new(r, col)))
                        .collect();
                    random_placement(&cells, k, c.seed)?
                }
                None => parse_placement(&Grid, placement)?,
            };
            simulate_on(
                &Grid,
                grid_alg(c.algorithm.as_deref())?.as_ref(),
                p,
                c,
                schedule,
                resolver,
                horizon,
            )
        }
        Topo::Graph(g) => {
            let p = match random {
                Some(k) => random_placement(&(0..g.vertex_count()).collect::<Vec<_>>(), k, c.seed)?,
                None => parse_placement(&g, placement)?,
            };
            simulate_on(
                &g,
                graph_alg(c.algorithm.as_deref())?.as_ref(),
                p,
                c,
                schedule,
                resolver,
                horizon,
            )
        }
    }
}

fn parse_schedule(text: &str, k: usize, seed: u64) -> Res<Schedule> {
    match text {
        "canonical" => Ok(Schedule::canonical(k)),
        "seeded" => Ok(Schedule::seeded(k, seed)),
        order => Schedule::new(
            order
                .split(',')
                .map(|x| parse_num::<usize>(x, "schedule entry"))
                .collect::<Res<Vec<_>>>()?,
        ),
    }
}

fn simulate_on<T: Topology>(
    topo: &T,
    alg: &dyn Algorithm<T>,
    placement: Placement<T::Vertex>,
    c: &Common,
    schedule: &str,
    resolver: &str,
    horizon: u64,
) -> Res<u8> {
    let schedule = parse_schedule(schedule, placement.robots(), c.seed)?;
    let mut resolver = match resolver {
        "canonical" => Resolver::Canonical,
        "seeded" => Resolver::seeded(c.seed),
        r => return bad(format!("unknown resolver '{r}'")),
    };
    let trace = run(
        topo,
        alg,
        &placement,
        &schedule,
        &mut resolver,
        RunOptions::new(horizon),
    )?;
    let text = export_trace(topo, &trace);
    match &c.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(match trace.verdict {
        Verdict::Gathered { epochs } => {
            println!("gathered in {epochs} epochs ({} rounds)", trace.steps.len());
            0
        }
        Verdict::HorizonExhausted => {
            println!("not gathered within {horizon} epochs");
            1
        }
        Verdict::Recurrence {
            first_round,
            period,
        } => {
            println!("state after round {first_round} recurs after {period} more rounds");
            1
        }
    })
}

fn sweep(
    c: &Common,
    placement: &str,
    schedule: &str,
    resolver: &str,
    horizon: u64,
    workers: usize,
) -> Res<u8> {
    let fields: Vec<&str> = placement.split(':').collect();
    let placements = match fields.as_slice() {
        ["exhaustive", r, v] => PlacementPolicy::Exhaustive {
            max_robots: parse_num(r, "max robots")?,
            max_per_vertex: parse_num(v, "max per vertex")?,
        },
        ["random", n, r] => PlacementPolicy::Random {
            count: parse_num(n, "placement count")?,
            max_robots: parse_num(r, "max robots")?,
            seed: c.seed,
        },
        _ => {
            return bad(format!(
                "placement policy '{placement}' is not exhaustive:<r>:<v> or random:<n>:<r>"
            ))
        }
    };
    let schedules = match schedule.split_once(':') {
        None if schedule == "all" => SchedulePolicy::All,
        None if schedule == "canonical" => SchedulePolicy::Canonical,
        Some(("sampled", n)) => SchedulePolicy::Sampled {
            count: parse_num(n, "schedule count")?,
            seed: c.seed,
        },
        _ => {
            return bad(format!(
                "schedule policy '{schedule}' is not all, canonical or sampled:<n>"
            ))
        }
    };
    let resolver = match resolver {
        "adversarial" => ResolverPolicy::Adversarial,
        "canonical" => ResolverPolicy::Canonical,
        r => return bad(format!("unknown resolver policy '{r}'")),
    };
    let spec = |topology| SweepSpec {
        topology,
        placements,
        schedules,
        resolver,
        horizon_epochs: horizon,
        workers,
    };
    let report = match topology(&c.topology, c.dim)? {
        Topo::Cube(cube) => {
            let alg = cube_alg(c.algorithm.as_deref())?;
            sweep_hypercube(
                &spec(SweepTopology::Hypercube { dim: cube.dim() }),
                alg.as_ref(),
            )?
        }
        Topo::Grid => {
            let (rows, cols) = mbr_box(c.mbr.as_deref())?;
            let alg = grid_alg(c.algorithm.as_deref())?;
            sweep_grid(&spec(SweepTopology::Grid { rows, cols }), alg.as_ref())?
        }
        Topo::Graph(_) => return bad("sweeps run on hypercubes and the grid only"),
    };
    if let Some(path) = &c.out {
        write_atomic(path, &report.to_json())?;
    }
    Ok(summarize(&report))
}

fn summarize(r: &SweepReport) -> u8 {
    println!(
        "placements {} (rejected {}), instances {}, gathered {}, states {}",
        r.placements, r.rejected, r.instances, r.gathered, r.states
    );
    println!(
        "max epochs {}, max epochs per unit of scale {:.3}",
        r.max_epochs, r.max_epoch_ratio
    );
    println!(
        "nice-star checked {} failed {}, lower bound checked {}",
        r.nice_star_checked,
        r.nice_star_failures.len(),
        r.lower_bound_checked
    );
    for p in &r.nonconforming_pairs {
        let star = if p.bound_decreased {
            " (bound decreased)"
        } else {
            ""
        };
        println!("transition outside the table: {} -> {}{star}", p.from, p.to);
    }
    for cyc in &r.unexpected_cycles {
        println!("unlisted task cycle: {}", cyc.join(" -> "));
    }
    for v in &r.violations {
        let at: Vec<String> = v.counts.iter().map(|(s, n)| format!("{s}*{n}")).collect();
        println!(
            "violation {}: {} [{}] order {:?} choices {:?}",
            v.kind,
            v.detail,
            at.join(";"),
            v.order,
            v.choices
        );
    }
    println!("violations {}", r.violation_count);
    u8::from(r.violation_count > 0 || !r.nice_star_failures.is_empty())
}

fn adversary(c: &Common, scenario: &str, resolver: &str, horizon: u64) -> Res<u8> {
    let policy = match resolver {
        "canonical" => ResolverPolicy::Canonical,
        "adversarial" => ResolverPolicy::Adversarial,
        r => return bad(format!("unknown resolver policy '{r}'")),
    };
    let file = if Path::new(scenario).is_file() {
        let text = std::fs::read_to_string(scenario)
            .map_err(|e| Error::Input(format!("{scenario}: {e}")))?;
        Some(ScenarioFile::from_json(&text)?)
    } else {
        None
    };
    let topo_sel = file
        .as_ref()
        .map_or(c.topology.as_str(), |f| f.topology.as_str());
    match topology(topo_sel, c.dim)? {
        Topo::Cube(cube) => {
            let alg = cube_alg(c.algorithm.as_deref())?;
            let s = match &file {
                Some(f) => f.to_scenario(&cube)?,
                None => match scenario {
                    "p2" => p2_scenario(&cube, Bits(0), Bits(1))?,
                    "p3" => p3_scenario(
                        &cube,
                        p3_classes(&cube, Bits(0))?[0][0],
                        ExpectedVerdict::Rejected,
                    )?,
                    "full" => match full_graph_scenario(&cube, alg.as_ref())? {
                        ChaseOutcome::Scenario(s, _) => s,
                        ChaseOutcome::Inapplicable(why) => {
                            println!("scenario full: inapplicable: {why}");
                            return Ok(0);
                        }
                    },
                    s => return bad(format!("unknown hypercube scenario '{s}'")),
                },
            };
            demonstrate(&cube, alg.as_ref(), &s, policy, horizon, c)
        }
        Topo::Grid => {
            let alg = grid_alg(c.algorithm.as_deref())?;
            let s = match &file {
                Some(f) => f.to_scenario(&Grid)?,
                None => {
                    let classes = p3_classes(&Grid, Cell::new(0, 0))?;
                    let path = |len: usize| {
                        classes
                            .iter()
                            .find(|k| k.len() == len)
                            .expect("two path classes")[0]
                    };
                    match scenario {
                        "p2" => p2_scenario(&Grid, Cell::new(0, 0), Cell::new(0, 1))?,
                        "p3" => p3_scenario(&Grid, path(4), ExpectedVerdict::Rejected)?,
                        "p3-straight" => p3_scenario(&Grid, path(2), ExpectedVerdict::Gathered)?,
                        s => return bad(format!("unknown grid scenario '{s}'")),
                    }
                }
            };
            demonstrate(&Grid, alg.as_ref(), &s, policy, horizon, c)
        }
        Topo::Graph(g) => {
            let alg = graph_alg(c.algorithm.as_deref())?;
            let s = match &file {
                Some(f) => f.to_scenario(&g)?,
                None if scenario == "p2" => p2_scenario(&g, 0, g.adjacent(0)[0])?,
                None => {
                    let n = g.vertex_count() / if g.side(0).is_some() { 2 } else { 1 };
                    match clique_bipartite_scenarios(n)?
                        .into_iter()
                        .find(|(h, s)| h.name() == g.name() && s.name == scenario)
                    {
                        Some((_, s)) => s,
                        None => return bad(format!("no scenario '{scenario}' on {}", g.name())),
                    }
                }
            };
            demonstrate(&g, alg.as_ref(), &s, policy, horizon, c)
        }
    }
}

fn demonstrate<T: Topology>(
    topo: &T,
    alg: &dyn Algorithm<T>,
    s: &AdversaryScenario<T::Vertex>,
    policy: ResolverPolicy,
    horizon: u64,
    c: &Common,
) -> Res<u8>
where
    T::Vertex: Hash,
{
    let check_initial = s.expected == ExpectedVerdict::Rejected;
    let outcome = prove_nontermination(topo, alg, s, policy, horizon, check_initial)?;
    let (text, met) = match &outcome {
        ProofOutcome::Certificate(cert) => {
            let ok = cert.replays_under(topo, alg);
            (
                format!(
                    "recurrence certificate (replays: {ok}): {}",
                    cert.render(topo)
                ),
                ok && s.expected == ExpectedVerdict::Recurrence,
            )
        }
        ProofOutcome::Gathered { epochs } => (
            format!("gathered in {epochs} epochs"),
            s.expected == ExpectedVerdict::Gathered,
        ),
        ProofOutcome::Rejected(w) => (
            format!("rejected as ungatherable: {w}"),
            s.expected == ExpectedVerdict::Rejected,
        ),
        ProofOutcome::Inconclusive => (format!("inconclusive within {horizon} epochs"), false),
    };
    let report = format!("scenario {} against {}\n{}\n", s.name, alg.name(), text);
    print!("{report}");
    if let Some(path) = &c.out {
        write_atomic(path, &report)?;
    }
    if !met {
        println!("expected {:?}", s.expected);
    }
    Ok(u8::from(!met))
}

fn endgame_table(c: &Common) -> Res<MoveTable> {
    match topology(&c.topology, c.dim.or(Some(3)))? {
        Topo::Cube(_) => synthesize_t1_table(),
        Topo::Grid => synthesize_32_table(),
        Topo::Graph(_) => bad("move tables exist for hypercubes and the grid only"),
    }
}

fn certify(c: &Common) -> Res<u8> {
    let table = endgame_table(c)?;
    let report = certify_table(&table);
    println!(
        "{:?} table: {} classes, depth {:?}",
        report.kind, report.classes, report.depth
    );
    for clause in &report.clauses {
        match &clause.counterexample {
            None => println!("{}: pass", clause.clause),
            Some(w) => println!("{}: FAIL ({w})", clause.clause),
        }
    }
    if let Some(path) = &c.out {
        write_atomic(path, &table.export_json())?;
    }
    Ok(u8::from(!report.passed()))
}

fn export_graph(c: &Common, graph: &str) -> Res<u8> {
    let dot = match graph {
        "classes" => class_graph(&endgame_table(c)?),
        "tasks" => match topology(&c.topology, c.dim.or(Some(3)))? {
            Topo::Cube(_) => task_graph("hypercube", TransitionTable::Hypercube),
            Topo::Grid => task_graph("grid", TransitionTable::Grid),
            Topo::Graph(_) => return bad("task graphs exist for hypercubes and the grid only"),
        },
        g => return bad(format!("unknown graph '{g}', expected classes or tasks")),
    };
    match &c.out {
        Some(path) => write_atomic(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}

/// Class graph of a move table. Solid edges come from a robot that was alone
/// on its vertex, dashed ones from a robot leaving a multiplicity.
fn class_graph(table: &MoveTable) -> String {
    let name = |p| match table.entry(p) {
        Some(e) => e.label.clone(),
        None => format!("{{{}}}", table.universe.render(p).join(",")),
    };
    let mut out = format!("digraph {:?} {{\n", format!("{:?}", table.kind));
    for e in &table.classes {
        let shape = match e.role {
            Role::Terminal => "doublecircle",
            Role::Special(_) => "box",
            Role::Exit | Role::Outside => "plaintext",
            Role::Free => "ellipse",
        };
        out.push_str(&format!("  {:?} [shape={shape}];\n", e.label));
    }
    let mut edges = BTreeSet::new();
    for e in &table.classes {
        for &(s, t) in &e.moves {
            let succ = successors(e.key, s, t);
            edges.insert((name(e.key), name(table.key_of(succ.solid)), "solid"));
            if let Some(d) = succ.dashed {
                edges.insert((name(e.key), name(table.key_of(d)), "dashed"));
            }
        }
    }
    for (a, b, style) in edges {
        out.push_str(&format!("  {a:?} -> {b:?} [style={style}];\n"));
    }
    out.push_str("}\n");
    out
}

fn task_graph(name: &str, table: TransitionTable) -> String {
    let mut out = format!("digraph {name:?} {{\n");
    out.push_str(&format!("  {GATHERING:?} [shape=doublecircle];\n"));
    for (from, tos) in table.rows() {
        for to in tos {
            match to {
                "*" => out.push_str(&format!(
                    "  {from:?} -> \"any\" [style=bold, label=\"bound shrinks\"];\n"
                )),
                to => out.push_str(&format!("  {from:?} -> {to:?};\n")),
            }
        }
    }
    let internal = table.internal();
    out.push_str(&format!("  {internal:?} -> {internal:?} [style=dotted];\n"));
    out.push_str("}\n");
    out
}
