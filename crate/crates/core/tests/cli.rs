//! End-to-end runs of the `leachate` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn leachate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leachate"))
        .args(args)
        .output()
        .expect("spawn leachate")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profiles.csv");
    let o = leachate(&["run", "--preset", "landfill-cl", "--dt", "0.01day", "--out", path(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t_day,x_cm,z_cm,conc_mg_per_L\n"));
    assert_eq!(text.lines().count(), 298);
    assert!(stdout(&o).contains("ran 10000 steps"));
}

#[test]
fn run_from_config_file_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.ini");
    let csv = dir.path().join("k.csv");
    let svg = dir.path().join("k.svg");
    fs::write(
        &cfg,
        format!(
            "preset = landfill-k\n[time]\nt_end = 20 day\nsnapshots = 5, 20 day\n[output]\ncsv = {}\nsvg = {}\ncolumn = 2\n",
            csv.display(),
            svg.display()
        ),
    )
    .unwrap();
    let o = leachate(&["run", "--config", path(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 2 * 99);
    let chart = fs::read_to_string(&svg).unwrap();
    assert_eq!(chart.matches("<polyline").count(), 2);
}

#[test]
fn check_reports_instability_without_failing() {
    let o = leachate(&["check", "--preset", "landfill-cl", "--dt", "1day"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("stable    = false"), "{}", stdout(&o));
    let o = leachate(&["check", "--preset", "landfill-cl"]);
    assert!(stdout(&o).contains("stable    = true"));
}

#[test]
fn compare_prints_error_reports() {
    let o = leachate(&["compare", "--preset", "landfill-cl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("grid 3x201"));
    assert_eq!(out.matches("rel_linf=").count(), 3);
}

#[test]
fn study_dt_prints_table_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("dt.svg");
    let o = leachate(&[
        "study-dt",
        "--preset",
        "landfill-cl",
        "--dts",
        "100,1,0.1,0.01",
        "--svg",
        path(&svg),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("scheme paper_forward"));
    assert!(out.contains("independent at 0.1 day"), "{out}");
    // four levels plus the analytical curve
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 5);
}

#[test]
fn study_mesh_and_sensitivity() {
    let o = leachate(&["study-mesh", "--hs", "2,1,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("0.5 cm"));
    let o = leachate(&["study-d", "--ds", "0.018,0.02"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("trend preserved: true"));
}

#[test]
fn scenario_lists_and_dumps() {
    let o = leachate(&["scenario"]);
    assert_eq!(stdout(&o), "landfill-k\nlandfill-cl\n");
    let o = leachate(&["scenario", "landfill-k"]);
    let out = stdout(&o);
    assert!(out.contains("R = 4") && out.contains("assumed"));
    let dump: String = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let back = leachate::io::parse_config(&dump).unwrap();
    assert_eq!(back, leachate::scenario::load_scenario("landfill-k").unwrap());
}

#[test]
fn exit_codes() {
    let o = leachate(&["run", "--preset", "nowhere"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    let o = leachate(&["run", "--dt", "0.01 fortnight"]);
    assert_eq!(o.status.code(), Some(2));
    let o = leachate(&["run", "--dt", "1", "--stability", "error"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = leachate(&[
        "run",
        "--dt",
        "5",
        "--t-end",
        "5000",
        "--snapshots",
        "5000",
        "--stability",
        "silent",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let o = leachate(&["run", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(5));
    let o = leachate(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let o = leachate(&["--help"]);
    let out = stdout(&o);
    for code in ["2  configuration", "3  stability", "4  numerical", "5  I/O"] {
        assert!(out.contains(code), "{out}");
    }
}
