use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cpneq(dir: &Path, args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpneq"))
        .args(args)
        .current_dir(dir)
        .env("CPNEQ_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from {line}"))
}

const SWEEP: &str = r#"
[molecule]
preset = "parallel_surface"

[scene]
epsilon = 2.0
z = 6e-6
ts = 300.0
te = 300.0

[sweep]
axis = "ts_at_fixed_te"
lo = 250.0
hi = 450.0
points = 9
"#;

#[test]
fn sweep_csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", SWEEP);
    let mut outputs = Vec::new();
    for (i, threads) in ["0", "1", "3", "0"].into_iter().enumerate() {
        let out = format!("sweep{i}.csv");
        let o = cpneq(dir.path(), &["sweep", "--config", &cfg, "--out", &out], threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(dir.path().join(&out)).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis_value_K,eps,state,pol_preset,f_total_SI_N,f_vac_SI_N,f_eq_SI_N,f_neq_SI_N,f_paper_units,err_est_N"
    );
    assert_eq!(lines.count(), 9);
    let meta = std::fs::read_to_string(dir.path().join("sweep0.meta.json")).unwrap();
    assert!(meta.contains("CODATA-2018"));
}

#[test]
fn stdout_tables_match_written_files() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", SWEEP);
    let piped = cpneq(dir.path(), &["sweep", "--config", &cfg, "--points", "3"], "0");
    let filed = cpneq(
        dir.path(),
        &["sweep", "--config", &cfg, "--points", "3", "--out", "s.csv"],
        "0",
    );
    assert!(piped.status.success() && filed.status.success());
    assert_eq!(piped.stdout, std::fs::read(dir.path().join("s.csv")).unwrap());
}

#[test]
fn non_polarizable_molecule_gives_zero_force() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "a0.toml",
        "[molecule]\nalpha = [0.0, 0.0, 0.0]\n[scene]\nts = 370.0\n",
    );
    let o = cpneq(dir.path(), &["force", "--config", &cfg], "0");
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    for key in ["f_total_SI_N", "f_vac_SI_N", "f_eq_SI_N", "f_neq_SI_N"] {
        assert_eq!(field(&line, key), "0");
    }
}

#[test]
fn equal_temperatures_give_an_exactly_zero_neq_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "eq.toml", "[scene]\nepsilon = 10.0\nts = 350.0\nte = 350.0\n");
    let o = cpneq(dir.path(), &["force", "--config", &cfg, "--out", "f.csv"], "0");
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[7], "0");
    assert!(row[4].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("eps.toml", "[scene]\nepsilon = 1.0\n"),
        ("z.toml", "[scene]\nz = -1e-6\n"),
        ("t.toml", "[scene]\nts = -5.0\n"),
        ("key.toml", "[scene]\ntemperature = 300.0\n"),
        (
            "both.toml",
            "[molecule]\npreset = \"isotropic\"\nalpha = [1.0, 0.0, 0.0]\n",
        ),
        ("tol.toml", "[quadrature]\nrel_tol = -1.0\n"),
    ] {
        let cfg = write(&dir, name, text);
        let o = cpneq(dir.path(), &["force", "--config", &cfg], "0");
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(cpneq(dir.path(), &["sweep"], "0").status.code(), Some(2));
    assert_eq!(
        cpneq(dir.path(), &["force", "--config", "missing.toml"], "0")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cpneq(dir.path(), &["force", "--plot"], "0").status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_with_code_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.toml", "[quadrature]\nmax_subdivisions = 1\nrel_tol = 1e-14\n");
    let o = cpneq(dir.path(), &["force", "--config", &cfg], "0");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn figure_has_four_curves_and_a_plot() {
    let dir = TempDir::new().unwrap();
    let o = cpneq(
        dir.path(),
        &["figure", "fig1b", "--points", "4", "--out", "fig1b.csv", "--plot"],
        "0",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig1b.csv")).unwrap();
    let eps: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(
        eps,
        ["2", "2", "2", "2", "5", "5", "5", "5", "10", "10", "10", "10", "15", "15", "15", "15"]
    );
    let svg = std::fs::read_to_string(dir.path().join("fig1b.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn threshold_report_lists_all_three_thresholds() {
    let dir = TempDir::new().unwrap();
    let iso = cpneq(dir.path(), &["threshold", "--points", "5"], "0");
    assert!(iso.status.success(), "{}", String::from_utf8_lossy(&iso.stderr));
    let text = stdout(&iso);
    for key in ["T0_K", "Ts0_K", "Te0_K"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{key} missing:\n{text}");
    }
    assert!(text.contains("advisory"));

    let cfg = write(&dir, "z.toml", "[molecule]\npreset = \"transverse_z\"\n");
    let zz = stdout(&cpneq(
        dir.path(),
        &["threshold", "--config", &cfg, "--points", "5"],
        "0",
    ));
    let te0 = |t: &str| field(t.lines().find(|l| l.starts_with("Te0_K")).unwrap(), "Te0_K").to_string();
    assert_eq!(te0(&text), te0(&zz));
}

#[test]
fn nearly_transparent_substrate_reports_vanishing_thresholds() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "e.toml", "[scene]\nepsilon = 1.0001\n");
    let o = cpneq(dir.path(), &["threshold", "--config", &cfg, "--points", "3"], "0");
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["Ts0_K", "Te0_K"] {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        assert!(field(line, key).parse::<f64>().unwrap() < 0.1, "{line}");
    }
    assert!(text.contains("advisory: Te0"));
}

#[test]
fn regime_reports_characteristic_temperatures() {
    let dir = TempDir::new().unwrap();
    let o = cpneq(dir.path(), &["regime"], "0");
    let line = stdout(&o);
    assert_eq!(field(&line, "regime"), "unclassified");
    let tw0: f64 = field(&line, "tw0_K").parse().unwrap();
    assert!((tw0 - 321.57).abs() < 0.01);
}
