use std::f64::consts::FRAC_PI_6;
use std::process::{Command, Output};

use nh_entangle::sweep::{read_csv, RatioRecord, SweepRecord, RATIO_HEADER, SWEEP_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nh-entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<SweepRecord> {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    read_csv(&out.stdout[..]).unwrap()
}

#[test]
fn evolve_reaches_unit_concurrence_near_predicted_time() {
    let out = run(&[
        "evolve", "--system", "2q", "--ratio", "0.5", "--tmax", "5", "--steps", "500",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER);
    let rows = rows(&out);
    assert_eq!(rows.len(), 500);
    let omega = 0.75f64.sqrt();
    let best = rows
        .iter()
        .filter(|r| r.lambda_t < 1.5)
        .max_by(|a, b| a.concurrence.total_cmp(&b.concurrence))
        .unwrap();
    assert!(best.concurrence > 0.999);
    assert!((best.lambda_t * omega - FRAC_PI_6).abs() < 0.01);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.concurrence)));
}

#[test]
fn hermitian_evolution_is_sin_2t() {
    for r in rows(&run(&["evolve", "--ratio", "0", "--tmax", "5"])) {
        assert!((r.concurrence - (2.0 * r.lambda_t).sin().abs()).abs() < 1e-12);
    }
}

#[test]
fn three_qubit_w_condition_time() {
    let rows = rows(&run(&[
        "evolve", "--system", "3q", "--ratio", "1", "--tmax", "5", "--steps", "5001",
    ]));
    let first = rows
        .iter()
        .find(|r| r.a.abs() <= r.b.abs() / std::f64::consts::SQRT_2)
        .unwrap();
    assert!((first.lambda_t - 0.5f64.atan()).abs() <= 1e-3);
}

#[test]
fn numeric_engine_matches_analytic() {
    let args = ["evolve", "--ratio", "1.5", "--tmax", "4", "--steps", "41"];
    let analytic = rows(&run(&args));
    let mut numeric_args = args.to_vec();
    numeric_args.extend(["--engine", "numeric"]);
    let numeric = rows(&run(&numeric_args));
    for (a, n) in analytic.iter().zip(&numeric) {
        assert!((a.p_nojump - n.p_nojump).abs() < 1e-9);
        assert!((a.concurrence - n.concurrence).abs() < 1e-8);
    }
}

#[test]
fn sweep_ratio_values_and_order() {
    let out = run(&["sweep-ratio", "--system", "2q", "--ratio-range", "0:3:0.05"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).lines().next().unwrap(),
        RATIO_HEADER
    );
    let rows: Vec<RatioRecord> = read_csv(&out.stdout[..]).unwrap();
    assert_eq!(rows.len(), 61);
    assert!(rows
        .windows(2)
        .all(|w| w[1].ratio > w[0].ratio && w[1].t_rs < w[0].t_rs));
    let at = |r: f64| {
        rows.iter()
            .find(|x| (x.ratio - r).abs() < 1e-12)
            .unwrap()
            .t_rs
    };
    assert_eq!(at(0.0), 1.0);
    assert!((at(0.5) - 0.76980).abs() < 5e-6);
    assert!((at(2.0) - 0.48405).abs() < 5e-6);
    assert!(rows.iter().all(|r| r.abs_diff < 1e-8));

    let herm: Vec<RatioRecord> = read_csv(
        &run(&[
            "sweep-ratio",
            "--initial",
            "herm",
            "--ratio-range",
            "0:0.95:0.05",
        ])
        .stdout[..],
    )
    .unwrap();
    assert_eq!(herm[0].t_rs, 1.0);
    assert!(herm.windows(2).all(|w| w[1].t_rs > w[0].t_rs));

    let w: Vec<RatioRecord> =
        read_csv(&run(&["sweep-ratio", "--system", "3q", "--ratio-range", "0:3:0.25"]).stdout[..])
            .unwrap();
    assert_eq!(w[0].t_rs, 1.0);
    assert!((w[4].t_rs - 0.68637).abs() < 5e-6);
}

#[test]
fn montecarlo_without_decay_never_jumps() {
    let out = run(&["montecarlo", "--ratio", "0", "--trajectories", "500"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["no_jump_fraction"], 1.0);
    assert_eq!(v["summary"]["seed"], 0);
    assert_eq!(v["metadata"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn json_output_has_metadata_and_rows() {
    let out = run(&[
        "evolve", "--ratio", "0.5", "--tmax", "1", "--steps", "3", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metadata"]["command"], "evolve");
    assert_eq!(v["metadata"]["config"]["ratio"], 0.5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][2]["lambda_t"], 1.0);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "system = \"3q\"\nratio = 0.8\ntmax = 3.0\nsteps = 31\nformat = \"json\"\n",
    )
    .unwrap();
    let from_file = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    let from_flags = run(&[
        "evolve", "--system", "3q", "--ratio", "0.8", "--tmax", "3", "--steps", "31", "--format",
        "json",
    ]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);

    // flags override the file
    let overridden = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--kappa",
        "3.2",
        "--format",
        "csv",
    ]);
    let rows = rows(&overridden);
    assert!(rows.iter().all(|r| r.ratio == 0.8));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep-ratio",
        "--ratio-range",
        "0:1:0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let rows: Vec<RatioRecord> = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["evolve", "--ratio", "0.5", "--kappa", "1", "--tmax", "1"]),
        Some(2)
    );
    assert_eq!(code(&["evolve", "--ratio", "0.5"]), Some(2));
    assert_eq!(
        code(&["evolve", "--ratio", "0.5", "--tmax", "1", "--steps", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&["evolve", "--lambda", "0", "--ratio", "0.5", "--tmax", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&["evolve", "--system", "4q", "--ratio", "0.5", "--tmax", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "evolve",
            "--config",
            "/nonexistent.toml",
            "--ratio",
            "1",
            "--tmax",
            "1"
        ]),
        Some(2)
    );
    assert_eq!(code(&["sweep-ratio", "--ratio-range", "0:2"]), Some(2));
    assert_eq!(
        code(&[
            "sweep-ratio",
            "--initial",
            "herm",
            "--ratio-range",
            "0:1.5:0.5"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["montecarlo", "--ratio", "0.5", "--trajectories", "0"]),
        Some(2)
    );
    assert_eq!(
        code(&["montecarlo", "--initial", "herm", "--ratio", "1.5"]),
        Some(2)
    );
    assert_eq!(code(&["validate", "--quick"]), Some(0));
    assert_eq!(code(&["validate", "--quick", "--use-printed-3q"]), Some(1));
    assert_eq!(code(&["bogus"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn validate_reports_discrepancies() {
    let out = run(&["validate", "--quick", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert_eq!(v["discrepancies"].as_array().unwrap().len(), 4);
}
