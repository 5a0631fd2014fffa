use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn atomwall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomwall")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const RB: [&str; 8] = ["--omega0", "2.37e15", "--isotropic", "1", "--temp", "300", "--z", "1e-9"];

#[test]
fn rubidium_record() {
    let mut args = vec!["shift"];
    args.extend(RB);
    args.extend(["--state", "ground"]);
    let o = atomwall(&args);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("zeta,theta,state,tf,rr,total,err,regime\n"));
    let r = &rows(&o)[0];
    assert_eq!(r[2], "ground");
    assert!((num(&r[0]) - 7.905_469_056_196_204e-3).abs() < 1e-15);
    assert!(num(&r[5]) < 0.0);
    assert_eq!(num(&r[5]), num(&r[3]) + num(&r[4]));
    assert_eq!(r[7], "low/short");
}

#[test]
fn missing_polarizability_is_invalid_input() {
    let o = atomwall(&["shift", "--omega0", "2.37e15", "--temp", "300", "--z", "1e-9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("polarizability"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_values_are_invalid_input() {
    for args in [
        vec!["shift", "--zeta", "-1", "--theta", "1", "--isotropic", "1"],
        vec!["shift", "--zeta", "1", "--theta", "1", "--alpha", "1,-1,1"],
        vec!["shift", "--zeta", "1", "--theta", "1", "--isotropic", "1", "--temp", "300"],
        vec!["sweep", "--zeta-min", "2", "--zeta-max", "1", "--theta", "1", "--isotropic", "1"],
        vec!["shift", "--zeta", "1", "--theta", "1", "--alpha", "1,1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(atomwall(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn zero_temperature_is_accepted() {
    let mut args = vec!["shift", "--omega0", "2.37e15", "--isotropic", "1", "--z", "1e-9", "--temp", "0"];
    args.extend(["--state", "ground"]);
    let o = atomwall(&args);
    assert!(o.status.success());
    let r = &rows(&o)[0];
    assert_eq!(r[1], "inf");
    assert!(num(&r[5]) < 0.0);
}

#[test]
fn sweep_rows_and_order() {
    let o = atomwall(&[
        "sweep", "--zeta-min", "0.1", "--zeta-max", "10", "--count", "3", "--spacing", "log", "--theta", "5",
        "--isotropic", "1",
    ]);
    assert!(o.status.success());
    let rs = rows(&o);
    assert_eq!(rs.len(), 9);
    let zetas: Vec<f64> = rs.iter().step_by(3).map(|r| num(&r[0])).collect();
    assert_eq!(zetas[0], 0.1);
    assert!((zetas[1] - 1.0).abs() < 1e-15);
    assert_eq!(zetas[2], 10.0);
    for chunk in rs.chunks(3) {
        let states: Vec<&str> = chunk.iter().map(|r| r[2].as_str()).collect();
        assert_eq!(states, ["ground", "excited", "average"]);
    }
}

#[test]
fn json_mirrors_csv() {
    let base = ["shift", "--zeta", "0.4", "--theta", "2", "--alpha", "0.2,0.5,0.3"];
    let csv = atomwall(&base);
    let mut args = base.to_vec();
    args.extend(["--format", "json"]);
    let json = atomwall(&args);
    assert!(csv.status.success() && json.status.success());
    let header: Vec<String> = stdout(&csv).lines().next().unwrap().split(',').map(str::to_owned).collect();
    let records: Vec<serde_json::Map<String, Value>> = serde_json::from_slice(&json.stdout).unwrap();
    let rs = rows(&csv);
    assert_eq!(records.len(), rs.len());
    for (rec, row) in records.iter().zip(&rs) {
        assert_eq!(rec.keys().cloned().collect::<Vec<_>>(), header);
        for (key, cell) in header.iter().zip(row) {
            match &rec[key] {
                Value::Number(n) => assert_eq!(n.as_f64().unwrap(), num(cell), "{key}"),
                Value::String(s) => assert_eq!(s, cell),
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}

#[test]
fn config_file_with_overrides() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults").unwrap();
    writeln!(file, "isotropic = 1").unwrap();
    writeln!(file, "theta = 3").unwrap();
    writeln!(file, "zeta = 0.5").unwrap();
    writeln!(file, "state = excited").unwrap();
    let path = file.path().to_str().unwrap();

    let from_file = atomwall(&["shift", "--config", path]);
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let direct = atomwall(&["shift", "--zeta", "0.5", "--theta", "3", "--isotropic", "1", "--state", "excited"]);
    assert_eq!(from_file.stdout, direct.stdout);

    let overridden = atomwall(&["shift", "--config", path, "--zeta", "0.7"]);
    assert_eq!(num(&rows(&overridden)[0][0]), 0.7);
    // a flag from the same group replaces the config value instead of conflicting with it
    let grouped = atomwall(&["shift", "--config", path, "--omega0", "2.37e15", "--temp", "300"]);
    assert!(grouped.status.success(), "{}", String::from_utf8_lossy(&grouped.stderr));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = atomwall(&["classify", "--zeta", "1e-3", "--theta", "1e4", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(",low,short,low/short,"));
}

#[test]
fn kernels_at_quarter_pi() {
    let o = atomwall(&["kernels", "--zeta", "0.7853981633974483", "--theta", "inf"]);
    assert!(o.status.success());
    let rs = rows(&o);
    assert_eq!(rs.len(), 2);
    let pi2 = std::f64::consts::PI.powi(2);
    assert_eq!(rs[0][2], "parallel");
    assert_eq!(rs[1][2], "perpendicular");
    assert!((num(&rs[0][3]) / (-32.0 / pi2) - 1.0).abs() < 1e-14);
    assert!((num(&rs[1][3]) / (-64.0 / pi2) - 1.0).abs() < 1e-14);
    assert_eq!(rs[0][9], "image");
}

#[test]
fn classify_examples() {
    for (zeta, theta, tag) in [
        ("1e-3", "1e4", "low/short"),
        ("1e4", "1e2", "low/long"),
        ("50", "1e6", "low/intermediate"),
        ("1e-6", "1e-3", "high/short"),
        ("1", "1", "crossover/crossover"),
    ] {
        let o = atomwall(&["classify", "--zeta", zeta, "--theta", theta]);
        assert!(o.status.success());
        assert_eq!(rows(&o)[0][4], tag, "{zeta} {theta}");
    }
}

#[test]
fn force_point_and_zeros() {
    let o = atomwall(&["force", "--zeta", "1e-3", "--theta", "inf", "--isotropic", "1", "--state", "ground"]);
    assert!(o.status.success());
    let r = &rows(&o)[0];
    assert_eq!(r[5], "attractive");
    assert!((num(&r[3]) / -4e12 - 1.0).abs() < 5e-3);

    let o = atomwall(&[
        "force", "zeros", "--zeta-min", "10", "--zeta-max", "30", "--theta", "1e6", "--isotropic", "1", "--state",
        "all",
    ]);
    assert!(o.status.success());
    let rs = rows(&o);
    assert!(rs.iter().filter(|r| r[2] == "excited").count() >= 5);
    assert!(rs.iter().all(|r| r[2] != "ground"));
    for r in rs.iter().filter(|r| r[2] == "excited") {
        assert!(r[3] == "stable" || r[3] == "unstable");
    }
}

#[test]
fn unreachable_tolerance_reports_non_convergence() {
    let o = atomwall(&["shift", "--zeta", "3", "--theta", "0.5", "--isotropic", "1", "--tol", "1e-16", "--route", "image"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("convergence"));
}

#[test]
fn si_output_scales_reduced() {
    let red = atomwall(&["shift", "--omega0", "2.37e15", "--isotropic", "1", "--zeta", "0.5", "--theta", "3"]);
    let si = atomwall(&[
        "shift", "--omega0", "2.37e15", "--isotropic", "1", "--zeta", "0.5", "--theta", "3", "--units", "si",
    ]);
    assert!(si.status.success());
    assert!(String::from_utf8_lossy(&si.stderr).contains("note:"));
    let unit = atomwall::model::energy_unit(&atomwall::model::AtomSpec::isotropic(2.37e15, 1.0).unwrap());
    for (a, b) in rows(&red).iter().zip(rows(&si)) {
        assert!((num(&b[5]) / (num(&a[5]) * unit) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn help_exits_zero() {
    let o = atomwall(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sweep"));
}
