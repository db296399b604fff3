use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).output().expect("binary runs")
}

fn json_result(args: &[&str]) -> Value {
    let out = qcorr(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["result"].clone()
}

#[test]
fn figure_one_table_is_rectangular_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = qcorr(&["figure", "1", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        runs.push(fs::read(&path).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let text = String::from_utf8(runs.remove(0)).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "kappa,<I>_2iso0,<I>_3iso");
    assert_eq!(body.len(), 22);
    for line in &body[1..] {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 3);
        assert!(cells[2] <= cells[1]);
    }
    assert!(text.contains("# command = figure 1\n"));
}

#[test]
fn figure_six_vanishes_where_kappa_over_sqrt3_exceeds_b() {
    let out = qcorr(&["figure", "6", "--kappa-points", "5", "--b-points", "5", "--quad-theta", "16", "--quad-phi", "32", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        let (k, b, d) = (r[0].as_f64().unwrap(), r[1].as_f64().unwrap(), r[2].as_f64().unwrap());
        if k / 3f64.sqrt() > b {
            assert_eq!(d, 0.0);
        }
    }
}

#[test]
fn classify_reports() {
    let r = json_result(&["classify", "--kappa", "1", "--c-hat=-1,-1,-1", "--format", "json"]);
    assert_eq!(r["class"], "Iso3");
    assert_eq!(r["orbit"], 8);
    assert_eq!(r["omega_max_dim"], 2);
    let r = json_result(&["classify", "--kappa", "0.5", "--c-hat", "0,0,1", "--format", "json"]);
    assert_eq!(r["class"], "Iso2_0");
    assert_eq!(r["orbit"], 6);
    assert_eq!(r["omega_max_dim"], 0);
    let r = json_result(&["classify", "--kappa", "0.3", "--c-hat", "0.5,0.5,0.7071067811865476", "--format", "json"]);
    assert_eq!(r["class"], "Iso2");
    assert_eq!(r["epsilon"], 0.5);
    assert_eq!(r["orbit"], 24);
}

#[test]
fn classify_rejects_points_outside_the_tetrahedron() {
    let out = qcorr(&["classify", "--kappa", "1", "--c-hat", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the tetrahedron"));
}

#[test]
fn rsp_eval_examples() {
    let r = json_result(&["rsp-eval", "--lambda", "0.7071067811865476", "--target", "1,0,0", "--beta", "0,0,1", "--format", "json"]);
    assert_eq!(r["F_U"], 0.0);
    assert_eq!(r["gain"], 1.0);
    assert_eq!(r["useful"], true);
    let r = json_result(&["rsp-eval", "--kappa", "0", "--target", "1,0,0", "--format", "json"]);
    assert_eq!(r["F_opt"], 1.0);
    assert_eq!(r["gain"], 0.0);
    let r = json_result(&["rsp-eval", "--lambda", "0.8", "--target", "1,0,0", "--beta", "0,0,1", "--trials", "20000", "--format", "json"]);
    let s = qcorr::rsp::pure_state(0.8).unwrap();
    let task = qcorr::rsp::RspTask::new(qcorr::Observable::x(), qcorr::Observable::z()).unwrap();
    let ev = qcorr::rsp::evaluate(&s, &task).unwrap();
    assert_eq!(r["F_U"].as_f64().unwrap(), ev.f_u);
    assert_eq!(r["gain"].as_f64().unwrap(), ev.gain);
    assert_eq!(r["trials"], 20000);
}

#[test]
fn rsp_eval_rejects_non_orthogonal_beta() {
    let out = qcorr(&["rsp-eval", "--kappa", "0.5", "--target", "1,0,0", "--beta", "1,1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "kappa = 0.9\nc-hat = 0,0,1\nquad-theta = 16\nquad-phi = 32\n").unwrap();
    let out = qcorr(&["mi", "--config", cfg.to_str().unwrap(), "--kappa", "0.4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# kappa = 0.4\n"));
    assert!(text.contains("# quad-theta = 16\n"));
    assert!(text.contains("# seed = 1\n"));
    let avg: f64 = text.lines().find(|l| l.starts_with("avg_mi_closed_form,")).unwrap()[19..].parse().unwrap();
    assert!((avg - qcorr::mutual_info::avg_mi_classical(0.4).unwrap()).abs() < 1e-15);

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(qcorr(&["mi", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_parameters_are_rejected_before_computation() {
    assert_eq!(qcorr(&["mi", "--kappa=-0.1"]).status.code(), Some(2));
    assert_eq!(qcorr(&["mi", "--kappa", "0.5", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qcorr(&["figure", "1", "--points", "1"]).status.code(), Some(2));
    assert_eq!(qcorr(&["rsp-average", "--lambda", "0.5", "--kappa", "0.3"]).status.code(), Some(2));
    assert_eq!(qcorr(&["mi", "--kappa", "0.5", "--quad-theta", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let args = ["simulate", "--lambda", "0.8", "--target", "0,1,0", "--trials", "50000", "--seed", "4"];
    let a = qcorr(&args);
    let b = qcorr(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_exit_code_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("v.json");
    let out = qcorr(&["verify", "closed-forms", "--quad-theta", "8", "--quad-phi", "16", "--format", "json", "--out", out_path.to_str().unwrap()]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let rows = doc["result"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let all_pass = rows.iter().all(|r| r["pass"] == true);
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
    assert!(qcorr(&["verify", "everything"]).status.code() == Some(2));
}
