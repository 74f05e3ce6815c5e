mod common;

use common::*;
use std::f64::consts::PI;

const DARBOUX: &str = "horizon = 20.0\n[system]\nkind = \"darboux\"\nlambda = 0.5\n";
const PERTURBED: &str = "horizon = 30.0\n[system]\nkind = \"central\"\npotential = \"perturbed-coulomb\"\nk = 1.0\nbig_k = 0.18\n";
const UNCOUPLED: &str = "horizon = 20.0\n[system]\nkind = \"uncoupled\"\nomega1 = 1.0\nomega2 = 1.5\n";

fn integral<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["integrals"].as_array().unwrap().iter().find(|i| i["name"] == name).unwrap()
}

#[test]
fn simulate_writes_the_three_files() {
    let dir = scratch("simulate");
    let cfg = write_config(&dir, "horizon = 5.0\n[system]\nkind = \"darboux\"\nlambda = 1.0\nomega = 1.0\n");
    let o = lab("simulate", &cfg, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.join("out");
    let samples = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().next().unwrap(), "t,r,theta,rdot,thetadot");
    let events = std::fs::read_to_string(out.join("events.csv")).unwrap();
    assert_eq!(events.lines().next().unwrap(), "t,kind,direction,r,theta,rdot,thetadot");
    assert!(events.lines().count() > 1);
    let stats = read_json(&out.join("stats.json"));
    validate("stats", &stats).unwrap();
    assert_eq!(stats["samples"].as_u64().unwrap() as usize, samples.lines().count() - 1);
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let dir = scratch("csv_digits");
    let cfg = write_config(&dir, "horizon = 1.0\n[system]\nkind = \"uncoupled\"\nomega1 = 1.0\nomega2 = 2.0\n");
    assert!(lab("simulate", &cfg, &[]).status.success());
    let text = std::fs::read_to_string(dir.join("out/samples.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,q1,q2,v1,v2");
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let mantissa = field.split('e').next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).count();
        assert_eq!(digits, 17, "{field}");
        assert!(!field.contains(' '));
        field.parse::<f64>().unwrap();
    }
}

#[test]
fn json_format_tables() {
    let dir = scratch("json_tables");
    let cfg = write_config(&dir, "horizon = 2.0\n[system]\nkind = \"darboux\"\nlambda = 0.5\n");
    assert!(lab("simulate", &cfg, &["--format", "json"]).status.success());
    for name in ["samples", "events", "integrals"] {
        let t = read_json(&dir.join(format!("out/{name}.json")));
        validate("table", &t).unwrap();
    }
    let t = read_json(&dir.join("out/samples.json"));
    assert_eq!(t["columns"], serde_json::json!(["t", "r", "theta", "rdot", "thetadot"]));
}

#[test]
fn invalid_parameter_is_a_config_error() {
    let dir = scratch("bad_lambda");
    let cfg = write_config(&dir, "[system]\nkind = \"darboux\"\nlambda = -1.0\n");
    let o = lab("simulate", &cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("system.lambda"), "{}", stderr(&o));
}

#[test]
fn config_errors_name_the_field() {
    let cases = [
        ("[system]\nkind = \"darboux\"\nlambda = 1.0\nfoo = 1\n", "foo"),
        ("[system]\nkind = \"pendulum\"\n", "system.kind"),
        ("[system]\nkind = \"uncoupled\"\nomega1 = 1.0\n", "system.omega2"),
        ("[system]\nkind = \"uncoupled\"\nomega1 = 1.0\nomega2 = -2.0\n", "system.omega2"),
        ("[system]\nkind = \"darboux\"\nlambda = 1.0\n[initial]\nr = -1.0\ntheta = 0.0\nrdot = 0.0\nthetadot = 1.0\n", "initial.r"),
        ("[system]\nkind = \"darboux\"\nlambda = 1.0\n[initial]\nr = 1.0\ntheta = 0.0\nrdot = 0.0\n", "initial.thetadot"),
        ("tasks = [\"fly\"]\n[system]\nkind = \"darboux\"\nlambda = 1.0\n", "fly"),
        ("horizon = -3.0\n[system]\nkind = \"darboux\"\nlambda = 1.0\n", "horizon"),
        ("[system]\nkind = \"central\"\npotential = \"power-law\"\nk = 1.0\np = -3.0\n", "system.p"),
    ];
    for (k, (text, field)) in cases.iter().enumerate() {
        let dir = scratch(&format!("config_error_{k}"));
        let o = lab("simulate", &write_config(&dir, text), &[]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
}

#[test]
fn usage_errors_exit_two() {
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_noetherlab")).arg("simulate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_noetherlab")).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn near_collision_is_a_runtime_error() {
    let dir = scratch("collision");
    let cfg = write_config(&dir, "[system]\nkind = \"darboux\"\nlambda = 1.0\n[initial]\nr = 1e-13\ntheta = 0.0\nrdot = 0.0\nthetadot = 0.1\n");
    let o = lab("simulate", &cfg, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn diagnose_verdicts() {
    let dir = scratch("diagnose_darboux");
    assert!(lab("diagnose", &write_config(&dir, DARBOUX), &[]).status.success());
    let r = read_json(&dir.join("out/report.json"));
    validate("report", &r).unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(integral(&r, "Theta")["classification"], "SingleValued");
    assert!((integral(&r, "Theta")["apsidal_angle"].as_f64().unwrap() - PI / 2.0).abs() < 1e-6);

    let dir = scratch("diagnose_perturbed");
    assert!(lab("diagnose", &write_config(&dir, PERTURBED), &[]).status.success());
    let r = read_json(&dir.join("out/report.json"));
    validate("report", &r).unwrap();
    let theta = integral(&r, "Theta");
    assert_eq!(theta["classification"], "MultiValued");
    let want = 2.0 * (PI / 0.8 - PI);
    assert!((theta["max_jump"].as_f64().unwrap() - want).abs() < 1e-4);

    let dir = scratch("diagnose_uncoupled");
    assert!(lab("diagnose", &write_config(&dir, UNCOUPLED), &[]).status.success());
    let r = read_json(&dir.join("out/report.json"));
    validate("report", &r).unwrap();
    assert_eq!(r["commensurate"], serde_json::json!([2, 3]));
    assert!(integral(&r, "Phi")["apsidal_angle"].is_null());
}

#[test]
fn diagnose_needs_a_diagnostic_task() {
    let dir = scratch("diagnose_no_task");
    let cfg = write_config(&dir, &format!("tasks = [\"simulate\"]\n{DARBOUX}"));
    assert_eq!(lab("diagnose", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn catalog_checks() {
    let dir = scratch("check");
    let cfg = write_config(&dir, &format!("{DARBOUX}[check]\nentries = [\"Xhat_Theta\", \"Q_Theta\", \"X_scal_r\"]\npoints = 30\n"));
    let o = lab("check", &cfg, &["--seed", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = read_json(&dir.join("out/checks.json"));
    validate("checks", &c).unwrap();
    let entries = c["entries"].as_array().unwrap();
    assert_eq!(c["seed"], 4);
    assert_eq!(entries[0]["test"], "determining_residual_2nd");
    assert_eq!(entries[0]["verdict"], "pass");
    assert_eq!(entries[1]["test"], "euler_residual");
    assert_eq!(entries[1]["verdict"], "pass");
    assert_eq!(entries[2]["verdict"], "fail");
    assert_eq!(entries[2]["expected_pass"], false);

    let dir = scratch("check_bogus");
    let cfg = write_config(&dir, &format!("{DARBOUX}[check]\nentries = [\"bogus\"]\n"));
    let o = lab("check", &cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));

    let dir = scratch("check_wrong_task");
    let cfg = write_config(&dir, &format!("tasks = [\"check-symmetry\"]\n{DARBOUX}[check]\nentries = [\"Q_Theta\"]\n"));
    assert_eq!(lab("check", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn reconstruction_offsets_are_constant() {
    let dir = scratch("reconstruct");
    let text = "[system]\nkind = \"darboux\"\nlambda = 0.5\n[initial]\nr = 0.8\ntheta = 0.3\nrdot = 0.4\nthetadot = 0.5\n[reconstruct]\nendpoints = 8\n";
    let o = lab("reconstruct", &write_config(&dir, text), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.join("out/reconstruct.json"));
    validate("reconstruct", &r).unwrap();
    for g in r["generators"].as_array().unwrap() {
        assert_eq!(g["endpoints"].as_array().unwrap().len(), 8);
        assert!(g["offset_spread"].as_f64().unwrap() < 1e-7, "{}", g["name"]);
    }
}

#[test]
fn sweep_keeps_input_order() {
    let dir = scratch("sweep");
    let text = format!("{DARBOUX}[sweep]\nparameter = \"lambda\"\nvalues = [2.0, 0.0, 1.0, 0.1]\n");
    let cfg = write_config(&dir, &text);
    let o = lab("sweep", &cfg, &["--horizon", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_json(&dir.join("out/sweep.json"));
    validate("sweep", &s).unwrap();
    let points = s["points"].as_array().unwrap();
    let values: Vec<f64> = points.iter().map(|p| p["value"].as_f64().unwrap()).collect();
    assert_eq!(values, [2.0, 0.0, 1.0, 0.1]);
    for p in points {
        assert_eq!(p["report"]["system"]["parameters"]["lambda"], p["value"]);
        assert_eq!(integral(&p["report"], "Theta")["classification"], "SingleValued");
    }
    let mut tampered = s.clone();
    tampered["points"][0]["report"]["schema"] = serde_json::json!(2);
    assert!(validate("sweep", &tampered).is_err());
    let first = std::fs::read(dir.join("out/sweep.json")).unwrap();
    assert!(lab("sweep", &cfg, &["--horizon", "10"]).status.success());
    assert_eq!(std::fs::read(dir.join("out/sweep.json")).unwrap(), first);

    let bad = write_config(&dir, &format!("{DARBOUX}[sweep]\nparameter = \"lambda\"\nvalues = [0.5, -1.0]\n"));
    assert_eq!(lab("sweep", &bad, &[]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch("determinism");
    let cfg = write_config(&dir, PERTURBED);
    let mut seen = Vec::new();
    for _ in 0..2 {
        assert!(lab("diagnose", &cfg, &["--horizon", "15"]).status.success());
        assert!(lab("simulate", &cfg, &["--horizon", "15"]).status.success());
        let files = ["report.json", "samples.csv", "events.csv", "integrals.csv", "stats.json"];
        seen.push(files.map(|f| std::fs::read(dir.join("out").join(f)).unwrap()));
    }
    assert!(seen[0] == seen[1]);
}
