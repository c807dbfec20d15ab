//! End-to-end tests of the `orlicz` binary: output formats, exit codes,
//! configuration precedence, and reproducibility.

use std::process::{Command, Output};

fn orlicz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn orlicz_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn exit(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn norm_prints_twelve_significant_digits() {
    let out = orlicz(&["norm", "--fn", "power:q=2", "--x", "3,4"]);
    assert_eq!(exit(&out), 0);
    assert_eq!(stdout(&out), "5.00000000000e0\n");
}

#[test]
fn norm_of_a_basis_vector_inverts_the_function_at_one() {
    let out = orlicz(&["norm", "--fn", "power:q=1.5|normalize", "--x", "1,0,0"]);
    assert_eq!(exit(&out), 0);
    assert_eq!(stdout(&out), "1.00000000000e0\n");
}

#[test]
fn musielak_norm_with_equal_coordinates_matches_the_plain_norm() {
    let single = orlicz(&["norm", "--fn", "power:q=2", "--x", "3,4"]);
    let family = orlicz(&["norm", "--musielak", "power:q=2;power:q=2", "--x", "3,4"]);
    assert_eq!(exit(&family), 0);
    assert_eq!(stdout(&family), stdout(&single));
}

#[test]
fn malformed_spec_exits_two_and_reports_the_byte_offset() {
    let out = orlicz(&["norm", "--fn", "banana:q=1", "--x", "1"]);
    assert_eq!(exit(&out), 2);
    assert!(stderr(&out).contains("byte 0"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_required_value_exits_two_and_names_the_flag() {
    let out = orlicz(&["norm", "--fn", "power:q=2"]);
    assert_eq!(exit(&out), 2);
    assert!(stderr(&out).contains("--x"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_subcommand_exits_two() {
    let out = orlicz(&["frobnicate"]);
    assert_eq!(exit(&out), 2);
}

#[test]
fn impossible_density_exits_three() {
    let out = orlicz(&["generate", "lp", "--p", "2", "--fn", "power:q=3|normalize"]);
    assert_eq!(exit(&out), 3);
    assert!(stderr(&out).contains("negative"), "stderr: {}", stderr(&out));
}

#[test]
fn generate_writes_the_density_table_and_the_atom_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("law.csv");
    let out = orlicz(&[
        "generate",
        "lp",
        "--p",
        "2",
        "--fn",
        "power:q=1.5|normalize",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));

    let table = std::fs::read_to_string(&path).unwrap();
    assert!(table.starts_with("t,tail,pdf\n"));
    assert!(table.lines().count() > 100);

    let atoms = std::fs::read_to_string(dir.path().join("law.atoms.csv")).unwrap();
    let mut lines = atoms.lines();
    assert_eq!(lines.next(), Some("location,mass"));
    let row = lines.next().expect("one atom");
    let mass: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((mass - 0.75).abs() < 1e-9, "atom mass {mass}");
}

#[test]
fn smoothed_law_has_an_empty_atom_table() {
    let out = orlicz(&[
        "generate",
        "p2",
        "--fn",
        "power:q=1.5|normalize|smooth:c=1.1",
    ]);
    assert_eq!(exit(&out), 0);
    let text = stdout(&out);
    let atoms = text.split("\n\n").nth(1).expect("atom section");
    assert_eq!(atoms.trim_end(), "location,mass");
}

#[test]
fn smooth_reports_delta_and_flattens_the_second_derivative_at_the_kink() {
    let out = orlicz(&["smooth", "--fn", "power:q=1.5|normalize", "--c", "1.1"]);
    assert_eq!(exit(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# delta="));
    assert_eq!(lines.next(), Some("t,M,N,M'',N''"));
    let last = text.lines().last().unwrap();
    let n2 = last.split(',').nth(4).unwrap();
    assert_eq!(n2, "0.00000000000e0");
}

#[test]
fn smooth_rows_keep_the_bounded_envelope() {
    let out = orlicz(&["smooth", "--fn", "power:q=1.2|normalize", "--c", "1.1"]);
    assert_eq!(exit(&out), 0);
    for row in stdout(&out).lines().skip(2) {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (m, n) = (cells[1], cells[2]);
        assert!(n <= m * (1.0 + 1e-12), "N > M in row {row}");
        assert!(m <= 1.1 * n * (1.0 + 1e-12), "M > 1.1N in row {row}");
    }
}

#[test]
fn roundtrip_verification_passes_and_emits_a_json_report() {
    let out = orlicz(&["verify", "roundtrip-max", "--fn", "power:q=1.5|normalize"]);
    assert_eq!(exit(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["check"], "roundtrip-max");
    assert_eq!(report["pass"], true);
    assert!(report["sup_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn wrong_multiplier_breaches_the_threshold_and_exits_one() {
    let out = orlicz(&[
        "verify",
        "convolution",
        "--fnM",
        "power:q=1.5|normalize|smooth:c=1.1",
        "--fnN",
        "power:q=2|normalize",
        "--mu",
        "point:2",
    ]);
    assert_eq!(exit(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["sup_residual"].as_f64().unwrap() > 0.1);
}

#[test]
fn derived_multiplier_satisfies_the_convolution_identity() {
    let out = orlicz(&[
        "verify",
        "convolution",
        "--fnM",
        "power:q=1.5|normalize|smooth:c=1.1",
        "--fnN",
        "power:q=2|normalize",
        "--p",
        "2",
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["sup_residual"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn khintchine_ratio_for_a_pair_is_the_lower_extreme() {
    let out = orlicz(&["verify", "khintchine", "--x", "1,1"]);
    assert_eq!(exit(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ratio = report["ratio"].as_f64().unwrap();
    assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn equivalence_reports_are_byte_reproducible_for_a_fixed_seed() {
    let args = [
        "verify", "lp", "--fn", "power:q=2|normalize", "--p", "2", "--n", "8", "--n-mc", "500",
        "--seed", "9",
    ];
    let first = orlicz(&args);
    let second = orlicz(&args);
    assert_eq!(exit(&first), 0, "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);

    let other = orlicz(&[
        "verify", "lp", "--fn", "power:q=2|normalize", "--p", "2", "--n", "8", "--n-mc", "500",
        "--seed", "10",
    ]);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn csv_flag_switches_the_report_format() {
    let out = orlicz(&[
        "verify", "max", "--fn", "power:q=2|normalize", "--n", "8", "--n-mc", "500", "--seed",
        "3", "--csv",
    ]);
    assert_eq!(exit(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("label,norm,mc_mean,mc_stderr,ratio\n"));
    assert_eq!(text.lines().count(), 9, "8 suite rows plus header");
}

#[test]
fn inline_suite_vectors_replace_the_standard_suite() {
    let out = orlicz(&[
        "verify", "max", "--fn", "power:q=2|normalize", "--suite", "1,0;0,2", "--n-mc", "500",
        "--seed", "3", "--csv",
    ]);
    assert_eq!(exit(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("v1,"));
    assert!(text.lines().nth(2).unwrap().starts_with("v2,"));
}

#[test]
fn config_file_supplies_values_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "fn = power:q=2\nx = 3,4\n# comment line\n").unwrap();

    let from_file = orlicz(&["norm", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit(&from_file), 0, "stderr: {}", stderr(&from_file));
    assert_eq!(stdout(&from_file), "5.00000000000e0\n");

    let overridden = orlicz(&["norm", "--config", cfg.to_str().unwrap(), "--x", "1,0"]);
    assert_eq!(stdout(&overridden), "1.00000000000e0\n");
}

#[test]
fn malformed_config_line_exits_two_with_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "fn = power:q=2\nnonsense\n").unwrap();
    let out = orlicz(&["norm", "--config", cfg.to_str().unwrap(), "--x", "1"]);
    assert_eq!(exit(&out), 2);
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn seed_env_var_applies_between_config_and_default() {
    let args = [
        "verify", "max", "--fn", "power:q=2|normalize", "--n", "8", "--n-mc", "500",
    ];
    let a = orlicz_env(&args, "ORLICZ_SEED", "3");
    let b = orlicz_env(&args, "ORLICZ_SEED", "3");
    let c = orlicz_env(&args, "ORLICZ_SEED", "4");
    assert_eq!(exit(&a), 0, "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let bad = orlicz_env(&args, "ORLICZ_SEED", "not-a-number");
    assert_eq!(exit(&bad), 2);
}

#[test]
fn flag_seed_beats_the_environment() {
    let flagged = orlicz_env(
        &[
            "verify", "max", "--fn", "power:q=2|normalize", "--n", "8", "--n-mc", "500",
            "--seed", "3",
        ],
        "ORLICZ_SEED",
        "4",
    );
    let plain = orlicz(&[
        "verify", "max", "--fn", "power:q=2|normalize", "--n", "8", "--n-mc", "500", "--seed",
        "3",
    ]);
    assert_eq!(flagged.stdout, plain.stdout);
}

#[test]
fn spline_specs_load_tables_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("m2.csv");
    let reference = orlicz(&["generate", "max", "--fn", "power:q=2|normalize"]);
    assert_eq!(exit(&reference), 0);

    // Tabulate the second derivative of the normalized quadratic (constant 2
    // up to its kink at 1) and rebuild the same law through the spline path.
    let mut csv = String::from("t,m2\n");
    let mut t = 1e-3f64;
    while t < 1.0 {
        csv.push_str(&format!("{t},2.0\n"));
        t *= 1.05;
    }
    csv.push_str("1.0,2.0\n");
    std::fs::write(&table, csv).unwrap();

    let spec = format!("spline:{}|normalize", table.display());
    let rebuilt = orlicz(&["generate", "max", "--fn", &spec]);
    assert_eq!(exit(&rebuilt), 0, "stderr: {}", stderr(&rebuilt));

    let norm = orlicz(&["norm", "--fn", &spec, "--x", "3,4"]);
    let value: f64 = stdout(&norm).trim().trim_end_matches("e0").parse().unwrap();
    assert!((value - 5.0).abs() < 1e-6, "spline norm {value}");
}

#[test]
fn reports_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = orlicz(&[
        "verify",
        "roundtrip-max",
        "--fn",
        "power:q=2|normalize",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0);
    assert!(stdout(&out).is_empty(), "report should go to the file");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
}
