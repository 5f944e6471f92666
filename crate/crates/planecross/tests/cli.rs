use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use planecross::cli::{parse_args, Action, EXIT_CONFIG};
use planecross::config::ExperimentConfig;
use proptest::prelude::*;

fn planecross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planecross"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn theory_prints_constants() {
    let o = planecross(&["theory"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for needle in [
        "0.620350",
        "0.152380952381",
        "2.334324",
        "0.930525",
        "0.271519",
        "0.762221",
    ] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }

    let o = planecross(&[
        "theory",
        "--format",
        "json",
        "--t",
        "2000",
        "--c-const",
        "1",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["c_d"].as_f64().unwrap() - 8192.0 * std::f64::consts::PI / 11025.0).abs() < 1e-12);
    assert!((v["regime"]["radius"].as_f64().unwrap() - 2000f64.powf(-0.5)).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_with_config_code() {
    for args in [
        &[
            "distribution",
            "--t",
            "2000",
            "--c-const",
            "1",
            "--c-log",
            "0.1",
        ][..],
        &["distribution", "--t", "2000"],
        &[
            "distribution",
            "--t",
            "2000",
            "--c-const",
            "1",
            "--frobnicate",
        ],
        &[
            "distribution",
            "--t",
            "2000",
            "--c-const",
            "1",
            "--radius",
            "0.01",
        ],
        &["distribution", "--t", "20", "--c-const", "100"],
        &["two-plane", "--t", "2000", "--c-const", "1"],
        &["bogus"],
    ] {
        let o = planecross(args);
        assert_eq!(
            o.status.code(),
            Some(EXIT_CONFIG),
            "{args:?}: {}",
            stderr(&o)
        );
        assert!(!stderr(&o).is_empty());
    }
    let o = planecross(&["distribution", "--t", "20", "--c-const", "100"]);
    assert!(stderr(&o).contains("sparse"), "{}", stderr(&o));
}

#[test]
fn unwritable_output_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("sub");
    let o = planecross(&[
        "distribution",
        "--t",
        "500",
        "--c-const",
        "1",
        "--reps",
        "3",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert_ne!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains(target.to_str().unwrap()),
        "{}",
        stderr(&o)
    );
}

fn run_to(dir: &Path, suite: &str, format: &str, extra: &[&str]) {
    let mut args = vec![
        suite,
        "--reps",
        "40",
        "--seed",
        "5",
        "--format",
        format,
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = planecross(&args);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

fn json_cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[test]
fn csv_and_json_records_agree() {
    let cases: [(&str, &[&str], &[&str]); 4] = [
        (
            "distribution",
            &["--t", "500", "--c-const", "2"],
            &[
                "rep",
                "seed",
                "n_vertices",
                "n_edges",
                "n_crossings",
                "degenerate_hits",
            ],
        ),
        (
            "two-plane",
            &["--t", "500", "--c-const", "2", "--sep", "0.3"],
            &[
                "rep",
                "seed",
                "n_vertices",
                "n_edges",
                "n_crossings_x",
                "n_crossings_y",
                "degenerate_hits",
            ],
        ),
        (
            "find-plane",
            &["--t", "500", "--c-const", "2", "--max-planes", "2"],
            &[
                "rep",
                "seed",
                "n_vertices",
                "n_edges",
                "first_success",
                "censored",
            ],
        ),
        (
            "existence-scan",
            &["--t", "300", "--c-log", "0.18", "--grid", "6"],
            &[
                "rep",
                "seed",
                "n_vertices",
                "n_edges",
                "zero_planes",
                "grid_planes",
                "exists",
                "certified",
            ],
        ),
    ];
    for (suite, flags, header) in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_to(a.path(), suite, "csv", flags);
        run_to(b.path(), suite, "json", flags);
        let (h, rows) = csv_rows(&a.path().join(format!("{suite}.csv")));
        assert_eq!(h, header);
        let json: serde_json::Value =
            serde_json::from_slice(&fs::read(b.path().join(format!("{suite}.json"))).unwrap())
                .unwrap();
        let objects = json.as_array().unwrap();
        assert_eq!(objects.len(), rows.len());
        assert_eq!(rows.len(), 40);
        for (row, obj) in rows.iter().zip(objects) {
            let obj = obj.as_object().unwrap();
            assert_eq!(obj.keys().count(), header.len());
            for (k, cell) in h.iter().zip(row) {
                assert_eq!(&json_cell(&obj[k]), cell, "{suite} field {k}");
            }
        }
        for dir in [a.path(), b.path()] {
            let summary: serde_json::Value = serde_json::from_slice(
                &fs::read(dir.join(format!("{suite}_summary.json"))).unwrap(),
            )
            .unwrap();
            for key in [
                "suite",
                "config_echo",
                "M_theory",
                "estimates",
                "ci_halfwidths",
                "distances",
            ] {
                assert!(summary.get(key).is_some(), "{suite} summary lacks {key}");
            }
            assert_eq!(summary["suite"], suite);
        }
    }
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_to(
        a.path(),
        "two-plane",
        "csv",
        &[
            "--t",
            "800",
            "--c-const",
            "1",
            "--sep",
            "0.5",
            "--jobs",
            "1",
        ],
    );
    run_to(
        b.path(),
        "two-plane",
        "csv",
        &[
            "--t",
            "800",
            "--c-const",
            "1",
            "--sep",
            "0.5",
            "--jobs",
            "4",
        ],
    );
    for name in ["two-plane.csv", "two-plane_summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        "t = 600\nregime = const:1.5\nreplications = 25\nmaster_seed = 3\nregion = disk:0.3\n",
    )
    .unwrap();
    let inv = parse_args([
        "planecross",
        "distribution",
        "--config",
        cfg_path.to_str().unwrap(),
        "--reps",
        "10",
    ])
    .unwrap();
    let Action::Suite { config, .. } = inv.action else {
        panic!()
    };
    assert_eq!(config.t, 600.0);
    assert_eq!(config.replications, 10);
    assert_eq!(config.master_seed, 3);
    assert!(config.region.is_some());

    fs::write(&cfg_path, "t = 600\nregime = const:1.5\nreps = 25\n").unwrap();
    let o = planecross(&["distribution", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("reps"));

    let o = planecross(&[
        "distribution",
        "--config",
        dir.path().join("missing.cfg").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("missing.cfg"));
}

#[test]
fn graph_and_crossing_dumps() {
    let dir = tempfile::tempdir().unwrap();
    run_to(
        dir.path(),
        "distribution",
        "csv",
        &["--t", "1000", "--c-const", "2", "--dump", "3"],
    );
    let (vh, vertices) = csv_rows(&dir.path().join("vertices.csv"));
    let (eh, edges) = csv_rows(&dir.path().join("edges.csv"));
    let (ch, crossings) = csv_rows(&dir.path().join("crossings.csv"));
    let (_, records) = csv_rows(&dir.path().join("distribution.csv"));
    assert_eq!(vh, ["vx", "vy", "vz"]);
    assert_eq!(eh, ["i", "j"]);
    assert_eq!(ch, ["edge_a", "edge_b", "u", "v"]);
    assert_eq!(records[3][2], (vertices.len()).to_string());
    assert_eq!(records[3][3], (edges.len()).to_string());
    assert_eq!(records[3][4], (crossings.len()).to_string());
}

#[test]
fn selftest_passes() {
    let o = planecross(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn text_output_without_out_dir() {
    let o = planecross(&[
        "find-plane",
        "--t",
        "500",
        "--c-const",
        "1",
        "--reps",
        "20",
        "--unsafe",
        "--radius",
        "0.0001",
    ]);
    assert!(o.status.success());
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("empirical_cdf"))
        .unwrap()
        .to_string();
    assert!(
        line.split_whitespace().skip(1).all(|v| v == "1.0000"),
        "{line}"
    );
    let o = planecross(&[
        "distribution",
        "--t",
        "500",
        "--c-const",
        "1",
        "--reps",
        "5",
        "--format",
        "csv",
    ]);
    assert!(stdout(&o).starts_with("rep,seed,n_vertices,n_edges,n_crossings,degenerate_hits\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        t in 1.5f64..1e5,
        c in 1e-3f64..10.0,
        log in any::<bool>(),
        reps in 1u64..1_000_000,
        seed in any::<u64>(),
        sep in proptest::option::of(0.0f64..1.5),
        grid in proptest::option::of(1usize..200),
        disk in proptest::option::of(0.01f64..1.0),
    ) {
        use planecross_core::theory::RegimeSpec;
        use planecross_core::geometry::Region2;
        let regime = if log { RegimeSpec::Log(c) } else { RegimeSpec::Constant(c) };
        let mut cfg = ExperimentConfig::new(t, regime);
        cfg.replications = reps;
        cfg.master_seed = seed;
        cfg.separation = sep;
        cfg.grid_resolution = grid;
        cfg.region = disk.map(Region2::centered_disk);
        prop_assert_eq!(ExperimentConfig::parse(&cfg.to_key_values()).unwrap(), cfg);
    }
}
