use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mortar_fem::analysis::fitted_slope;
use mortar_fem_cli::report::{read_records, write_records};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mortar-fem"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"smooth\"\ndegree = 1\nresolutions = [2, 4, 6]\n");
    let cfg = cfg.to_str().unwrap();
    let a = run(&["convergence", "--config", cfg, "--threads", "1"], &dir.path().join("a"));
    let b = run(&["convergence", "--config", cfg, "--threads", "3"], &dir.path().join("b"));
    assert!(a.status.success() && b.status.success(), "{}", stderr(&a));
    for f in ["convergence.csv", "convergence.svg", "metadata.json"] {
        let x = fs::read(dir.path().join("a").join(f)).unwrap();
        let y = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn written_table_reads_back_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"superconvergence\"\nresolutions = [2, 3]\n");
    let o = run(&["negative-norm", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = fs::read(dir.path().join("negative_norm.csv")).unwrap();
    let rows = read_records(bytes.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.error_neg.is_some()));
    assert!(rows[0].h > rows[1].h);
    let mut again = Vec::new();
    write_records(&mut again, &rows).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn single_resolution_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"table1\"\nresolutions = [6]\n");
    let o = run(&["convergence", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need at least 2 resolutions"), "{}", stderr(&o));
}

#[test]
fn alpha_length_mismatch_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"table1\"\nalpha = [1.0, 10.0]\n");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`alpha`"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let o = run(&["solve", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.toml"), "{}", stderr(&o));
}

#[test]
fn parse_error_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"table1\"\ndegree = 1\nfinal_time = = 2\n");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("c.toml:3:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_config_code() {
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("solve").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no preset"));
}

#[test]
fn degree_one_negative_norm_study_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["negative-norm", "--preset", "table1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("degree >= 2"), "{}", stderr(&o));
}

#[test]
fn table1_solve_at_coarsest_mesh_is_near_reported_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--preset", "table1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(dir.path().join("summary.json"));
    let e = s["error_l2"].as_f64().unwrap();
    assert!((0.026451 / 3.0..=3.0 * 0.026451).contains(&e), "{e}");
    assert_eq!(s["h"].as_f64().unwrap(), 1.0 / 6.0);
    assert_eq!(s["steps"].as_u64().unwrap(), 36);
    let m = json(dir.path().join("metadata.json"));
    assert_eq!(m["final_time"].as_f64().unwrap(), 1.0);
    assert_eq!(m["preset"], "table1");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,y,value\n"));
    // 41 x 41 grid minus the open upper-right quadrant
    assert_eq!(csv.lines().count() - 1, 41 * 41 - 20 * 20);
}

#[test]
fn zero_data_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "c.toml",
        "preset = \"table1\"\nsolution_x = \"zero\"\nresolution = 4\ntime_step = 0.1\n",
    );
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(dir.path().join("summary.json"));
    assert!(s["max_abs_solution"].as_f64().unwrap() <= 1e-14);
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(v.abs() <= 1e-14);
    }
}

#[test]
fn conforming_twin_matches_on_matching_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("twin-conforming.toml");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let d = json(dir.path().join("summary.json"))["conforming_max_diff"].as_f64().unwrap();
    assert!(d <= 1e-10, "{d}");
}

#[test]
fn conforming_twin_refuses_nonmatching_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "preset = \"smooth\"\nstationary = true\ncompare_conforming = true\n");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("conforming twin"), "{}", stderr(&o));
}

#[test]
fn explicit_meshes_config_solves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("explicit-meshes.toml");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(dir.path().join("summary.json"));
    assert_eq!(s["meshes"][1]["degree"], 3);
    assert!(s["error_l2"].as_f64().unwrap() < 1e-2);
}

#[test]
fn table1_convergence_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["convergence", "--preset", "table1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_records(fs::File::open(dir.path().join("convergence.csv")).unwrap()).unwrap();
    let p: Vec<f64> = rows.iter().skip(1).map(|r| r.p.unwrap()).collect();
    assert!(p.windows(2).all(|w| w[1] > w[0]), "{p:?}");
    assert!((1.7..=2.05).contains(p.last().unwrap()));
    for r in rows.iter().skip(1) {
        assert!((r.q.unwrap() - r.p.unwrap() / 2.0).abs() < 1e-12);
    }
    let svg = fs::read_to_string(dir.path().join("convergence.svg")).unwrap();
    assert!(svg.contains("L2: slope"));
}

#[test]
fn time_convergence_slope_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["time-convergence", "--preset", "time-order"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_records(fs::File::open(dir.path().join("time_convergence.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.h == 1.0 / 16.0));
    let r: Vec<f64> = rows.iter().map(|r| r.r.unwrap()).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.error_l2).collect();
    let slope = fitted_slope(&r, &e).unwrap();
    assert!((slope - 1.0).abs() <= 0.15, "{slope}");
}

#[test]
fn projection_demo_is_seeded_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["project", "--preset", "table1", "--seed", "7"], &dir.path().join("a"));
    let b = run(&["project", "--preset", "table1", "--seed", "7"], &dir.path().join("b"));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let s = json(dir.path().join("a/summary.json"));
    assert!(s["moment_residual"].as_f64().unwrap() <= 1e-11);
    assert!(s["idempotence_error"].as_f64().unwrap() <= 1e-11);
    assert!(s["max_jump_moment"].as_f64().unwrap() <= 1e-11);
    assert_eq!(s["multiplier_dim"].as_u64().unwrap() + 2, s["nonmortar_subintervals"].as_u64().unwrap() * s["degree"].as_u64().unwrap() + 1);
    assert_eq!(json(dir.path().join("a/metadata.json"))["seed"], 7);
}

#[test]
fn shipped_configs_all_load() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        mortar_fem_cli::config::load(Some(&path), None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
