use std::path::Path;
use std::process::{Command, Output};

use searchload::report::CURVE_HEADER;

fn searchload(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_searchload")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn preset_text() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/q1_swerling2.toml")).unwrap()
}

fn with_line(key: &str, line: &str) -> String {
    preset_text()
        .lines()
        .map(|l| if l.starts_with(&format!("{key} ")) { line } else { l })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run_config(dir: &Path, toml: &str) -> Output {
    let cfg = dir.join("scenario.toml");
    std::fs::write(&cfg, toml).unwrap();
    let out = dir.join("out");
    searchload(&["optimize", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn scalar(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap();
    line.split('=').nth(1).unwrap().trim().split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn presets_report_eta() {
    let dir = tempfile::tempdir().unwrap();
    for (name, eta) in [("q1_swerling2", "eta = 0.038535"), ("q2_swerling2", "eta = 0.017335")] {
        let out = dir.path().join(name);
        let o = searchload(&["optimize", "--preset", name, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(out.join("result.txt")).unwrap();
        assert!(text.contains(eta), "{text}");
        assert!(out.join("result.json").exists());
    }
}

#[test]
fn curves_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = searchload(&["optimize", "--preset", "q1_swerling2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("result.txt")).unwrap();
    let r_s_star = scalar(&text, "r_S*");
    let mut rdr = csv::Reader::from_path(dir.path().join("curves.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CURVE_HEADER);
    let mut rows = 0;
    let mut best = f64::INFINITY;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let vals: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals.len(), CURVE_HEADER.len());
        if vals[8] == 1.0 {
            best = best.min(vals[7]);
        }
        assert!(vals[0] > 0.0);
        rows += 1;
    }
    assert!(rows > 10);
    // the refined optimum sits between samples and can only improve on them
    let l_s_star = scalar(&text, "L_s*");
    assert!(l_s_star <= best && best < l_s_star * 1.01);
    assert!(r_s_star > 0.0);
}

#[test]
fn empty_extent_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), &with_line("az_deg", "az_deg = 0.0"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("az_deg"), "{}", stderr(&o));
}

#[test]
fn malformed_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "a = [");
    assert_eq!(o.status.code(), Some(2));
    let o = searchload(&["optimize", "--preset", "no_such_preset"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), &with_line("r_s_des", "r_s_des = 1000.0"));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("one-off"), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_catches_a_perturbation() {
    let fast = ["--mc-trials", "200000", "--grid-points", "200"];
    let o = searchload(&[&["verify", "--preset", "q1_swerling2"][..], &fast].concat());
    assert!(o.status.success(), "{}{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
    let o = searchload(&[&["verify", "--preset", "q1_swerling2", "--perturb-eps", "1.05"][..], &fast].concat());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("verification failed"));
}

#[test]
fn verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let report = |name: &str| {
        let path = dir.path().join(name);
        let o = searchload(&[
            "verify", "--preset", "q2_swerling4", "--seed", "7", "--mc-trials", "100000", "--grid-points", "100",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(o.status.code().is_some());
        std::fs::read(path).unwrap()
    };
    assert_eq!(report("a.txt"), report("b.txt"));
}

#[test]
fn single_point_sweep_matches_optimize() {
    let dir = tempfile::tempdir().unwrap();
    let opt = dir.path().join("opt");
    assert!(searchload(&["optimize", "--preset", "q1_swerling3", "--out", opt.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(opt.join("result.txt")).unwrap();
    let sw = dir.path().join("sw");
    let o = searchload(&[
        "sweep", "--preset", "q1_swerling3", "--axis", "p_c_des", "--values", "0.85", "--keep-constraints",
        "--out", sw.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(sw.join("sweep.csv")).unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    assert_eq!(&row[6], "ok");
    assert_eq!(row[2].parse::<f64>().unwrap(), scalar(&text, "r_S*"));
    assert_eq!(row[4].parse::<f64>().unwrap(), scalar(&text, "L_s*"));
}

#[test]
fn sweep_marks_unreachable_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = searchload(&[
        "sweep", "--preset", "q1_swerling2", "--values", "1e-7,0.5", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<csv::StringRecord> =
        csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap().records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][6].starts_with("infeasible"), "{:?}", rows[0]);
    assert!(rows[0][2].parse::<f64>().unwrap().is_nan());
    assert_eq!(&rows[1][6], "ok");
}
