use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ellipton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellipton"))
        .args(args)
        .env_remove("ELLIPTON_TOL_PROFILE")
        .output()
        .expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const CHAPPLE: &str = r#"{"A":[[0,0,0],[0,0,0],[0,0,3]],"B":[[1,0,0],[0,1,0],[0,0,-4]],"X0":1,"n":3}"#;

#[test]
fn special_eval_csv() {
    let out = ellipton(&[
        "special", "eval", "--k", "0.5", "--from", "-1", "--to", "1", "--steps", "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,x,K,Kp,sn,cn,dn,F");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (k, sn, cn, dn) = (v[0], v[4], v[5], v[6]);
        assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14);
        assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-14);
    }
}

#[test]
fn weier_report_both_inputs_agree() {
    let a = json(&ellipton(&["weier", "report", "--rho", "2", "--k", "0.6"]).stdout);
    let (g2, g3) = (a["g2"].as_f64().unwrap(), a["g3"].as_f64().unwrap());
    let b = ellipton(&["weier", "report", "--g2", &g2.to_string(), "--g3", &g3.to_string()]);
    let b = json(&b.stdout);
    assert_eq!(a["schema"], 1);
    for key in ["omega", "k", "rho"] {
        let (x, y) = (a[key].as_f64().unwrap(), b[key].as_f64().unwrap());
        assert!((x - y).abs() < 1e-12, "{key}: {x} vs {y}");
    }
    assert_eq!(a["half_periods"].as_array().unwrap().len(), 3);
}

#[test]
fn weier_report_needs_a_complete_input() {
    assert_eq!(ellipton(&["weier", "report", "--rho", "2"]).status.code(), Some(64));
    let bad = ellipton(&["weier", "report", "--g2", "-1", "--g3", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(json(&bad.stderr)["error"].is_string());
}

#[test]
fn curve_report_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "m.json",
        r#"{"rho": 3.0, "alpha": [0.4, -0.2], "beta": [-0.7, 1.1]}"#,
    );
    let first = ellipton(&["curve", "report", "--in", &input]);
    assert!(first.status.success());
    let r1 = json(&first.stdout);
    assert_eq!(r1["schema"], 1);
    assert_eq!(r1["roots"].as_array().unwrap().len(), 4);
    let again = write(&dir, "r1.json", std::str::from_utf8(&first.stdout).unwrap());
    let second = ellipton(&["curve", "report", "--in", &again]);
    let third_in = write(&dir, "r2.json", std::str::from_utf8(&second.stdout).unwrap());
    let third = ellipton(&["curve", "report", "--in", &third_in]);
    // from coefficients onwards the report is a fixed point
    assert_eq!(second.stdout, third.stdout);
    let r2 = json(&second.stdout);
    for key in ["g2", "g3", "k", "x_plus", "x_minus"] {
        let (x, y) = (r1[key].as_f64().unwrap(), r2[key].as_f64().unwrap());
        assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()), "{key}");
    }
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", "{\"rho\": ");
    let out = ellipton(&["curve", "report", "--in", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"], "parse");
    let missing = ellipton(&["curve", "report", "--in", "/nonexistent/m.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(json(&missing.stderr)["error"], "io");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = ellipton(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(ellipton(&["--help"]).status.code(), Some(0));
}

#[test]
fn chapple_closes_with_figure() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", CHAPPLE);
    let svg = dir.path().join("p.svg");
    let out = ellipton(&[
        "poncelet",
        "run",
        "--in",
        &p,
        "--svg",
        svg.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["algebraic"]["closes"], true);
    assert_eq!(v["geometric"]["closes"], true);
    assert_eq!(v["agree"], true);
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(figure.matches("<path").count(), 3);
    assert_eq!(figure.matches("<ellipse").count(), 2);
}

#[test]
fn non_closing_chain_draws_the_gap() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &CHAPPLE.replace("\"n\":3", "\"n\":4"));
    let svg = dir.path().join("p.svg");
    let out = ellipton(&["poncelet", "run", "--in", &p, "--svg", svg.to_str().unwrap()]);
    let v = json(&out.stdout);
    assert_eq!(v["geometric"]["closes"], false);
    assert_eq!(v["agree"], true);
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert!(figure.contains("<polyline") && figure.contains("gap"));
}

#[test]
fn start_off_the_conic_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "p.json",
        &CHAPPLE.replace("\"n\":3", "\"n\":3,\"start\":[1.0,1.0]"),
    );
    let out = ellipton(&["poncelet", "run", "--in", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"], "contract");
}

#[test]
fn sphere_legendre_check() {
    let out = ellipton(&["sphere", "legendre-check", "0,0", "0.3,0", "0.1,0.2"]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    let flat = ellipton(&["sphere", "legendre-check", "0,0", "0.5,0", "1,0"]);
    assert_eq!(flat.status.code(), Some(2));
}

#[test]
fn integrals_table_is_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "m.json", r#"{"z": [0.3, -0.4], "v": [0.1, 0.2], "x": 0.5}"#);
    let one = ellipton(&["integrals", "table", "--in", &p, "--jobs", "1"]);
    let four = ellipton(&["integrals", "table", "--in", &p, "--jobs", "4"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(String::from_utf8(one.stdout).unwrap().lines().count(), 16);
}

#[test]
fn manifest_digests_the_output() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", CHAPPLE);
    let out = dir.path().join("out.json");
    let man = dir.path().join("manifest.json");
    let status = ellipton(&[
        "poncelet",
        "run",
        "--in",
        &p,
        "--out",
        out.to_str().unwrap(),
        "--manifest",
        man.to_str().unwrap(),
        "--closure-tol",
        "1e-9",
    ]);
    assert!(status.status.success() && status.stdout.is_empty());
    let m = json(&std::fs::read(&man).unwrap());
    assert_eq!(m["subcommand"], "poncelet run");
    assert_eq!(m["tolerances"]["closure"], 1e-9);
    let body = std::fs::read(&out).unwrap();
    assert_eq!(m["output_sha256"].as_str().unwrap().len(), 64);
    assert!(Path::new(&out).exists() && !body.is_empty());
}

#[test]
fn tolerance_profile_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", CHAPPLE);
    let man = dir.path().join("manifest.json");
    let run = |profile: &str| {
        Command::new(env!("CARGO_BIN_EXE_ellipton"))
            .args(["poncelet", "run", "--in", &p, "--manifest", man.to_str().unwrap()])
            .env("ELLIPTON_TOL_PROFILE", profile)
            .output()
            .unwrap()
    };
    assert!(run("strict").status.success());
    let m = json(&std::fs::read(&man).unwrap());
    assert_eq!(m["tolerances"]["profile"], "strict");
    assert_eq!(run("bogus").status.code(), Some(2));
}

#[test]
fn dn_check_and_solve() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"multiplet":{"rho":4,"alpha":[1,0],"beta":[0,1]},
                  "monopoles":[{"sigma":0.5,"gamma":[0.2,0.1]},{"t":0.1,"w":[0.05,0]}]}"#;
    let p = write(&dir, "c.json", cfg);
    let out = ellipton(&["dn", "check", "--in", &p, "--starts", "3"]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["closes"], false);
    assert_eq!(v["agree"], true);
    assert_eq!(v["geometric"]["residuals"].as_array().unwrap().len(), 3);

    // no monopoles: u must be reachable; an impossible one fails cleanly
    let solve = r#"{"seed":{"rho":4,"alpha":[1,0],"beta":[0,1]},"monopoles":[{"t":0.3,"w":[0.1,0]}],
                    "u":[40,0],"max_iterations":5}"#;
    let p = write(&dir, "s.json", solve);
    let out = ellipton(&["dn", "solve", "--in", &p]);
    assert_eq!(out.status.code(), Some(2));
    let e = json(&out.stderr);
    assert_eq!(e["error"], "non_convergence");
    assert!(e["detail"]["trace"].is_array());
}
