use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbjacobi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_writes_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let o = run(&[
        "solve",
        "--problem",
        "example1",
        "--theta",
        "0.5",
        "--rho",
        "0.5",
        "--mu",
        "-0.25",
        "--upsilon",
        "-0.25",
        "--n",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_csv(&read(&out));
    assert_eq!(rows[0], ["t", "u_num", "u_exact", "abs_error"]);
    assert_eq!(rows.len(), 2002);
    let mut prev = -1.0;
    for r in &rows[1..] {
        let t: f64 = r[0].parse().unwrap();
        // Samples within 1e-16 of the terminal point round to t = 1.
        assert!(t >= prev && t <= 1.0);
        prev = t;
        let err: f64 = r[3].parse().unwrap();
        let diff = (r[1].parse::<f64>().unwrap() - r[2].parse::<f64>().unwrap()).abs();
        assert_eq!(err, diff);
        assert!(err < 1e-6);
    }
}

#[test]
fn solve_to_stdout_with_custom_grid() {
    let o = run(&[
        "solve",
        "--problem",
        "custom",
        "--gamma1",
        "2.5",
        "--n",
        "8",
        "--eval-points",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn theta_outside_unit_interval_is_a_usage_error() {
    let o = run(&["solve", "--theta", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(0, 1)"), "{}", stderr(&o));
    assert!(stderr(&o).contains("--theta"));
}

#[test]
fn other_usage_errors_exit_2() {
    for args in [
        &["solve", "--rho", "0"][..],
        &["solve", "--rho", "1.5"],
        &["solve", "--mu", "-1"],
        &["solve", "--problem", "nope"],
        &["converge", "--n-min", "10", "--n-max", "4"],
        &["converge", "--n-step", "0"],
        &["converge", "--l2-weight", "0"],
        &["solve", "--eval-points", "1"],
        &["frobnicate"],
        &[],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let o = run(&["solve", "--n", "4", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--out"));
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("converge"));
}

#[test]
fn solver_failure_exits_3() {
    // ρ = 1/200 underflows the nodes nearest the terminal point.
    let o = run(&["solve", "--rho", "0.005", "--n", "40"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("N = 40"));
}

#[test]
fn converge_reproduces_the_example_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep.csv");
    let svg = dir.path().join("rep.svg");
    let o = run(&[
        "converge",
        "--problem",
        "example1",
        "--theta",
        "0.5",
        "--rho",
        "0.5",
        "--mu",
        "-0.25",
        "--upsilon",
        "-0.25",
        "--n-min",
        "4",
        "--n-max",
        "32",
        "--n-step",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_csv(&read(&out));
    assert_eq!(
        rows[0],
        [
            "N",
            "linf_error",
            "l2w_error",
            "cond",
            "assembly_ms",
            "solve_ms"
        ]
    );
    assert_eq!(rows.len(), 9);
    let errs: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    // non-increasing after N = 8 up to a factor 2
    for w in errs[1..].windows(2) {
        assert!(w[1] <= 2.0 * w[0], "{errs:?}");
    }
    for r in &rows[1..] {
        assert!(r[4].is_empty() && r[5].is_empty());
        assert!(r[2].parse::<f64>().unwrap() >= 0.0);
    }

    let text = read(&svg);
    let doc = roxmltree::Document::parse(&text).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count(),
        2
    );
    assert!(!text.contains("href") && !text.contains("url("));
}

#[test]
fn timings_are_opt_in() {
    let o = run(&["converge", "--n-min", "4", "--n-max", "8", "--timings"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert!(rows[1..]
        .iter()
        .all(|r| !r[4].is_empty() && !r[5].is_empty()));
}

#[test]
fn l2_weight_override_changes_only_the_l2_column() {
    let base = [
        "converge",
        "--problem",
        "case1",
        "--rho",
        "0.5",
        "--n-min",
        "8",
        "--n-max",
        "16",
        "--n-step",
        "8",
    ];
    let a = parse_csv(&String::from_utf8(run(&base).stdout).unwrap());
    let mut args = base.to_vec();
    args.extend(["--l2-weight", "0,0"]);
    let b = parse_csv(&String::from_utf8(run(&args).stdout).unwrap());
    for (ra, rb) in a[1..].iter().zip(&b[1..]) {
        assert_eq!(ra[1], rb[1]);
        assert_ne!(ra[2], rb[2]);
    }
}

#[test]
fn case2_small_rho_configuration_runs() {
    let o = run(&[
        "converge",
        "--problem",
        "case2",
        "--theta",
        "0.6666666666666666",
        "--rho",
        "0.16666666666666666",
        "--n-min",
        "4",
        "--n-max",
        "12",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| !r[1].is_empty()));
}

#[test]
fn failed_degrees_leave_empty_fields() {
    let o = run(&[
        "converge", "--rho", "0.005", "--n-min", "4", "--n-max", "40", "--n-step", "36",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: N = 40"));
    let rows = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert!(!rows[1][1].is_empty());
    assert!(rows[2][1..].iter().all(String::is_empty));
}

#[test]
fn selftest_quick_and_seeded() {
    let a = run(&["selftest", "--quick", "--seed", "11"]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stdout)
    );
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("N in [4, 8, 16, 32],"));
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 8);
    let b = run(&["selftest", "--quick", "--seed", "11"]);
    let strip = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("inverse"))
            .map(str::to_owned)
    };
    assert_eq!(strip(&text), strip(&String::from_utf8(b.stdout).unwrap()));
}
