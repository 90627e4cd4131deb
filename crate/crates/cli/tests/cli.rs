use std::path::Path;
use std::process::{Command, Output};

fn rrgather(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrgather"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn simulate_writes_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "simulate",
            "--topology",
            "hypercube",
            "--dim",
            "4",
            "--placement",
            "random:6",
            "--seed",
            "7",
            "--schedule",
            "seeded",
            "--resolver",
            "seeded",
            "--out",
            out,
        ]
    };
    let a = rrgather(&args("a.tsv"), dir.path());
    let b = rrgather(&args("b.tsv"), dir.path());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let ta = std::fs::read(dir.path().join("a.tsv")).unwrap();
    assert_eq!(ta, std::fs::read(dir.path().join("b.tsv")).unwrap());
    assert_eq!(stdout(&a), stdout(&b));

    // The printed epoch count is the largest epoch in the trace.
    let summary = stdout(&a);
    let epochs: u64 = summary
        .strip_prefix("gathered in ")
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let text = String::from_utf8(ta).unwrap();
    let max = text
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse::<u64>().unwrap())
        .max()
        .unwrap();
    assert_eq!(epochs, max);
    assert!(text.lines().skip(1).all(|l| l.split('\t').count() == 8));
}

#[test]
fn ungatherable_inputs_exit_two_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = rrgather(
        &[
            "simulate",
            "--topology",
            "hypercube:3",
            "--placement",
            "000*2;001",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("P2"));
    let o = rrgather(
        &[
            "simulate",
            "--topology",
            "grid",
            "--placement",
            "(0,0);(0,1);(1,1)",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("twoByTwoThree"));
}

#[test]
fn malformed_arguments_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec![
            "simulate",
            "--topology",
            "hypercube:3",
            "--placement",
            "0a0;111",
        ],
        vec!["simulate", "--topology", "torus", "--placement", "x"],
        vec![
            "simulate",
            "--topology",
            "grid",
            "--placement",
            "(0,0);(2,2)",
            "--algorithm",
            "hypercube",
        ],
        vec![
            "simulate",
            "--topology",
            "hypercube:3",
            "--placement",
            "000;111",
            "--schedule",
            "0,0",
        ],
        vec!["sweep", "--topology", "clique:4"],
        vec![
            "sweep",
            "--topology",
            "hypercube:3",
            "--placement",
            "everything",
        ],
        vec!["nonsense"],
    ] {
        assert_eq!(code(&rrgather(&args, dir.path())), 2, "{args:?}");
    }
    let o = rrgather(
        &[
            "simulate",
            "--topology",
            "hypercube:3",
            "--placement",
            "000;111",
            "--out",
            "missing/t.tsv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn q3_sweep_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let o = rrgather(
        &["sweep", "--topology", "hypercube:3", "--out", "report.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("violations 0"));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"violation_count\": 0"));
}

#[test]
fn strawman_sweep_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = rrgather(
        &[
            "sweep",
            "--topology",
            "hypercube:3",
            "--algorithm",
            "strawman:greedy",
            "--placement",
            "exhaustive:3:2",
            "--schedule",
            "canonical",
            "--horizon-epochs",
            "10",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("violation "));
}

#[test]
fn adversary_prints_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = rrgather(
        &[
            "adversary",
            "--topology",
            "grid",
            "--scenario",
            "p2",
            "--algorithm",
            "strawman:greedy",
            "--out",
            "cert.txt",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("recurrence certificate (replays: true)"));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("cert.txt")).unwrap(),
        stdout(&o)
    );
    let o = rrgather(
        &["adversary", "--topology", "hypercube:3", "--scenario", "p3"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rejected as ungatherable: P3"));
    let o = rrgather(
        &[
            "adversary",
            "--topology",
            "bipartite:3",
            "--scenario",
            "bipartite-one-side",
            "--algorithm",
            "strawman:move-across",
            "--resolver",
            "adversarial",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("gathered in 1 epochs"));
}

#[test]
fn scenario_files_drive_the_adversary() {
    let dir = tempfile::tempdir().unwrap();
    let file = r#"{"topology": "clique:5", "name": "two-vertices", "counts": [["v0", 4], ["v1", 4]],
                   "order": [0, 4, 1, 5, 2, 6, 3, 7], "expected": "recurrence"}"#;
    std::fs::write(dir.path().join("s.json"), file).unwrap();
    let o = rrgather(
        &[
            "adversary",
            "--scenario",
            "s.json",
            "--algorithm",
            "strawman:to-occupied",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("recurrence certificate"));
    // Expecting a gathering that never happens is a failed check.
    std::fs::write(
        dir.path().join("g.json"),
        file.replace("recurrence", "gathered"),
    )
    .unwrap();
    let o = rrgather(
        &[
            "adversary",
            "--scenario",
            "g.json",
            "--algorithm",
            "strawman:to-occupied",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn certify_and_export() {
    let dir = tempfile::tempdir().unwrap();
    for topo in ["hypercube", "grid"] {
        let o = rrgather(
            &["certify", "--topology", topo, "--out", "table.json"],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
        assert!(std::fs::read_to_string(dir.path().join("table.json"))
            .unwrap()
            .starts_with('['));
    }
    let o = rrgather(
        &["export-graph", "--topology", "hypercube", "--out", "q3.dot"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(dir.path().join("q3.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("style=solid") && dot.contains("style=dashed"));
    let o = rrgather(
        &[
            "export-graph",
            "--topology",
            "hypercube",
            "--graph",
            "tasks",
        ],
        dir.path(),
    );
    assert!(stdout(&o).contains("\"T8\" -> \"T5i\""));
}
