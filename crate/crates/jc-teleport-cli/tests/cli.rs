use std::path::Path;
use std::process::{Command, Output};

use jc_teleport_cli::csv::parse_csv;

fn jctp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jctp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn selftest_passes_and_lists_named_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(&["selftest"], dir.path());
    let text = stdout_of(&out);
    assert!(out.status.success(), "selftest failed:\n{text}");
    let ok_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("ok  ")).collect();
    assert!(ok_lines.len() >= 10, "only {} checks listed", ok_lines.len());
    assert!(text.contains("self-test: 12/12 checks passed"), "{text}");
    assert!(text.contains("alpha_normalization"));
    assert!(text.contains("two_copy_fidelity_report"));
    // the ten fixed two-copy points are each reported with both values
    let points: Vec<&str> = text
        .lines()
        .filter(|l| l.contains("printed=") && l.contains("overlap="))
        .collect();
    assert_eq!(points.len(), 10, "{text}");
}

#[test]
fn teleport_sweep_prints_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(
        &[
            "teleport",
            "--nbar",
            "2,4",
            "--tau-stop",
            "2",
            "--tau-count",
            "5",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed = parse_csv(&stdout_of(&out)).unwrap();
    assert_eq!(
        parsed.columns,
        ["tau", "nbar2_raw", "nbar2_norm", "nbar4_raw", "nbar4_norm"]
    );
    assert_eq!(parsed.rows.len(), 5);
    assert!(parsed.comments.iter().any(|c| c.contains("protocol: ftp")));
}

#[test]
fn qfi_sweep_emits_one_column_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(
        &[
            "qfi",
            "--protocol",
            "stp",
            "--theta",
            "0.7",
            "--nbar",
            "4",
            "--delta",
            "0.1,0.3",
            "--tau-start",
            "0.5",
            "--tau-stop",
            "1.5",
            "--tau-count",
            "3",
            "--engine",
            "sld",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed = parse_csv(&stdout_of(&out)).unwrap();
    assert_eq!(parsed.columns, ["tau", "delta0.1_qfi", "delta0.3_qfi"]);
    assert!(parsed
        .rows
        .iter()
        .flat_map(|r| r.iter())
        .all(|v| v.is_finite()));
}

#[test]
fn channel_dump_tabulates_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(
        &[
            "channel", "--n", "2", "--nbar", "4", "--delta", "0.3", "--tau-stop", "2",
            "--tau-count", "4",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed = parse_csv(&stdout_of(&out)).unwrap();
    assert_eq!(
        parsed.columns,
        ["tau", "a1", "a2", "a3_re", "a3_im", "a4", "a5", "norm", "log_norm"]
    );
    for row in &parsed.rows {
        // diagonal coefficients sum to one
        let sum = row[1] + row[2] + row[5] + row[6];
        assert!((sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn figure_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(&["figure", "fig1a", "--tau-count", "50"], dir.path());
    assert!(out.status.success());
    let csv_path = dir.path().join("fig1a.csv");
    let gp_path = dir.path().join("fig1a.gp");
    assert!(csv_path.exists() && gp_path.exists());

    let parsed = parse_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(parsed.columns.len(), 7);
    assert_eq!(parsed.rows.len(), 50);
    assert!(parsed.comments.iter().any(|c| c == "preset: fig1a"));

    let script = std::fs::read_to_string(&gp_path).unwrap();
    assert_eq!(script.matches("with lines").count(), 3);
    assert!(script.contains("'fig1a.csv'"), "csv referenced relatively");
    assert!(!script.contains(dir.path().to_str().unwrap()));
    assert!(script.contains("dashtype 1") && script.contains("dashtype 3"));
}

#[test]
fn figure_runs_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = jctp(&["figure", "fig2b", "--tau-count", "120"], d.path());
        assert!(out.status.success());
    }
    let a = std::fs::read(d1.path().join("fig2b.csv")).unwrap();
    let b = std::fs::read(d2.path().join("fig2b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn validation_problems_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["teleport", "--tau-count", "1"],
        vec!["teleport", "--theta", "9.0"],
        vec!["teleport", "--tau-start", "5", "--tau-stop", "2"],
        vec!["figure", "fig99z"],
        vec!["teleport", "--protocol", "stp", "--construction", "oracle"],
        vec!["qfi", "--engine", "warp"],
        vec!["bogus-subcommand"],
    ] {
        let out = jctp(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
    }
}

#[test]
fn numeric_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // nbar = 0 with n = 2 leaves no Poisson weight in range: the channel
    // normalization underflows at every grid point
    let out = jctp(
        &["teleport", "--nbar", "0", "--n", "2", "--tau-count", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nbar=0"), "offending point named: {err}");
}

#[test]
fn io_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = jctp(
        &[
            "teleport",
            "--tau-count",
            "2",
            "--output",
            "/nonexistent-dir-shpx/out.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jctp(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(jctp(&["--version"], dir.path()).status.code(), Some(0));
}

#[test]
fn config_file_matches_flags_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(
        &cfg,
        "# sweep settings\n\
         protocol = ftp\n\
         params.nbar = 2, 4\n\
         input.theta = 0.7\n\
         tau.stop = 2\n\
         tau.count = 5\n",
    )
    .unwrap();

    let from_cfg = jctp(&["teleport", "--config", "sweep.cfg"], dir.path());
    assert!(from_cfg.status.success());
    let from_flags = jctp(
        &[
            "teleport", "--nbar", "2,4", "--theta", "0.7", "--tau-stop", "2", "--tau-count", "5",
        ],
        dir.path(),
    );
    assert!(from_flags.status.success());
    assert_eq!(from_cfg.stdout, from_flags.stdout);

    // a flag on top of the file wins
    let overridden = jctp(
        &["teleport", "--config", "sweep.cfg", "--theta", "0.2"],
        dir.path(),
    );
    assert!(overridden.status.success());
    assert_ne!(overridden.stdout, from_cfg.stdout);
    assert!(stdout_of(&overridden).contains("theta: 0.2"));

    // unknown keys are validation failures
    std::fs::write(&cfg, "params.gamma = 1\n").unwrap();
    let bad = jctp(&["teleport", "--config", "sweep.cfg"], dir.path());
    assert_eq!(bad.status.code(), Some(1));

    // a missing config file is an I/O failure
    let missing = jctp(&["teleport", "--config", "nope.cfg"], dir.path());
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn config_output_key_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("out.cfg"),
        "tau.stop = 1\ntau.count = 3\noutput = sweep_out.csv\n",
    )
    .unwrap();
    let out = jctp(&["teleport", "--config", "out.cfg"], dir.path());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = dir.path().join("sweep_out.csv");
    let parsed = parse_csv(&std::fs::read_to_string(written).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 3);
}

#[test]
fn spectral_engine_works_away_from_degeneracies_and_refuses_at_them() {
    let dir = tempfile::tempdir().unwrap();
    // the frozen reference point has four well-separated eigenvalues
    let out = jctp(
        &[
            "qfi", "--theta", "0.7", "--phi", "0.4", "--nbar", "4", "--delta", "0.3",
            "--tau-start", "1.6", "--tau-stop", "1.8", "--tau-count", "3", "--engine",
            "spectral",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    // the two-copy output carries an exactly degenerate diagonal pair, so
    // the spectral engine must refuse it (numeric exit) and say what to use
    let refuse = jctp(
        &[
            "qfi", "--protocol", "stp", "--theta", "0.7", "--nbar", "4", "--tau-start", "1.6",
            "--tau-stop", "1.8", "--tau-count", "3", "--engine", "spectral",
        ],
        dir.path(),
    );
    assert_eq!(refuse.status.code(), Some(2));
    let err = String::from_utf8(refuse.stderr).unwrap();
    assert!(err.contains("matrix form"), "redirects to matrix form: {err}");
}
