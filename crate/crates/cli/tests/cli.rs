use std::process::{Command, Output};

fn qrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn critical_table() {
    let o = qrs(&["critical", "--j1", "0.05", "--j2", "0.02"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# qrs "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    let pi = rows.iter().find(|r| r[0] == "pi").unwrap();
    assert!((pi[3].parse::<f64>().unwrap() - 0.479583).abs() < 5e-7);
    assert_eq!(pi[4], "true");
    assert!(rows.iter().filter(|r| r[0] != "pi").all(|r| r[4] == "false"));
}

#[test]
fn uncoupled_branches_all_at_one_half() {
    let rows = data_rows(&stdout(&qrs(&["critical", "--j1", "0", "--j2", "0"])));
    assert!(rows.iter().all(|r| r[3] == "0.5" && r[5] == "true"));
}

#[test]
fn tie_is_flagged() {
    let rows = data_rows(&stdout(&qrs(&["critical", "--j1", "0.05", "--j2", "0.05"])));
    assert!(rows.iter().all(|r| r[5] == "true"));
    assert!(rows.iter().find(|r| r[0] == "0").map(|r| r[4] == "false").unwrap());
}

#[test]
fn missing_critical_point_is_a_domain_error() {
    let o = qrs(&["critical", "--j1", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("branch pi"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(qrs(&["nonsense"]).status.code(), Some(1));
    assert_eq!(qrs(&["sweep", "--steps", "1"]).status.code(), Some(1));
    assert_eq!(qrs(&["sweep", "--g-min", "0.7", "--g-max", "0.3"]).status.code(), Some(1));
    assert_eq!(qrs(&["critical", "--g", "0.3", "--lambda", "2"]).status.code(), Some(1));
    assert_eq!(qrs(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_is_byte_identical_and_mirrors_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let j = dir.path().join("a.json");
    for (path, fmt) in [(&a, "csv"), (&b, "csv"), (&j, "json")] {
        let o = qrs(&["sweep", "--j2", "0.07", "--steps", "11", "--format", fmt, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, std::fs::read(&b).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&j).unwrap()).unwrap();
    let rows = data_rows(&String::from_utf8(csv).unwrap());
    assert_eq!(json["rows"].as_array().unwrap().len(), rows.len());
    assert_eq!(json["command"], "sweep");
    assert_eq!(json["config"]["j2"], 0.07);
    for (r, jr) in rows.iter().zip(json["rows"].as_array().unwrap()) {
        assert_eq!(r[0].parse::<f64>().unwrap(), jr["g"].as_f64().unwrap());
        assert_eq!(r[1], jr["phase"].as_str().unwrap());
    }
    // onset at the frustrated critical coupling 0.48218
    let first_srp = rows.iter().find(|r| r[1] != "NP").unwrap();
    assert_eq!(first_srp[1], "Frustrated");
    assert!(first_srp[0].parse::<f64>().unwrap() > 0.48218);
}

#[test]
fn scaling_report_passes() {
    let text = stdout(&qrs(&["scaling", "--j1", "0.05", "--j2", "0.02"]));
    let checks: Vec<&str> = text.lines().filter(|l| l.starts_with("#check")).collect();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c.contains(",PASS,")));
}

#[test]
fn gauge_subcommands() {
    let o = qrs(&["gauge", "triple", "--j10", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let row = &data_rows(&stdout(&o))[0];
    assert!((row[1].parse::<f64>().unwrap() - 1.4716142829).abs() < 1e-9);
    assert!((row[2].parse::<f64>().unwrap() - 0.009902).abs() < 5e-7);
    assert_eq!(qrs(&["gauge", "verify"]).status.code(), Some(0));
    let afrp = data_rows(&stdout(&qrs(&["gauge", "map-afrp", "--theta", "0.7853981633974483"])));
    assert!((afrp[0][4].parse::<f64>().unwrap() - 0.0292893).abs() < 5e-8);
    let fr = qrs(&["gauge", "map-frustrated", "--theta", "1.5707963267948966", "--g-min", "0.1", "--g-max", "0.45"]);
    assert_eq!(fr.status.code(), Some(0));
}

#[test]
fn phase_diagram_regions() {
    let rows = data_rows(&stdout(&qrs(&["phase-diagram", "--steps", "5", "--j2-steps", "11"])));
    assert_eq!(rows.len(), 55);
    for r in &rows {
        let (j2, g): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let expect = match () {
            _ if g < 0.47 => "NP",
            _ if j2 < 0.05 => "AFRP",
            _ if j2 > 0.05 => "Frustrated",
            _ => "Boundary",
        };
        assert_eq!(r[2], expect, "{r:?}");
    }
    let frp = data_rows(&stdout(&qrs(&["phase-diagram", "--j1", "-0.05", "--steps", "3", "--j2-steps", "3"])));
    assert!(frp.iter().any(|r| r[2] == "FRP") && !frp.iter().any(|r| r[2] == "AFRP"));
}

#[test]
fn spin_checks_pass() {
    let o = qrs(&["spin", "--steps", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn ed_compare_small_cutoff() {
    let o = qrs(&["ed-compare", "--nc", "2", "--steps", "3", "--g-min", "0.2", "--g-max", "0.7"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("#check,variational_bound,PASS")));
    assert_eq!(data_rows(&text).len(), 3);
}

#[test]
fn failed_check_exits_with_three_after_writing() {
    let o = qrs(&["scaling", "--window-min", "0.01", "--window-max", "0.1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("#check,exponent_SRP,FAIL"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("check failed: exponent_SRP"));
}

#[test]
fn window_leaving_the_phase_is_a_domain_error() {
    assert_eq!(qrs(&["scaling", "--window-min", "0.01", "--window-max", "0.9"]).status.code(), Some(2));
}
