use std::path::PathBuf;
use std::process::Command;

use dqkit::cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn dq(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("dqkit").chain(args.iter().copied()).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dqkit-cli-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(dq(&["eval", "star(q, p)"]), (EXIT_PASS, "q*p - (i/2)*hbar\n".into(), String::new()));
    assert_eq!(dq(&["eval", "normalize(d*a)"]).1, "a*d - (q - q^-1)*b*c\n");
    assert_eq!(dq(&["eval", "star(1, 1)"]).1, "1\n");
    assert_eq!(dq(&["eval", "mbracket(q^2, p^2)"]).1, "4*q*p\n");
    assert_eq!(dq(&["eval", "normalize(b*a)"]).1, "q^-1*a*b\n");
}

#[test]
fn eval_errors_carry_positions() {
    let (code, _, err) = dq(&["eval", "star(q, x)"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("position 8") && err.contains("undefined symbol 'x'"), "{}", err);
    let (code, _, err) = dq(&["eval", "frobnicate(q)"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("undefined function"));
    assert_eq!(dq(&["eval", "star(q)"]).0, EXIT_USAGE);
    assert_eq!(dq(&["eval", "star(q, p"]).0, EXIT_USAGE);
    assert!(dq(&["eval", "normalize(a*e)"]).2.contains("position 12"));
    assert_eq!(dq(&["eval", "wigner(500)"]).0, EXIT_FAIL);
}

#[test]
fn eval_writes_grids() {
    let dir = scratch("grids");
    let d = dir.to_str().unwrap();
    let (code, out, _) = dq(&["--out", d, "--grid-points", "11", "eval", "wigner(0)"]);
    assert_eq!(code, EXIT_PASS, "{}", out);
    let csv = std::fs::read_to_string(dir.join("wigner-0.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 11 * 11);
    assert!(dir.join("wigner-0.json").exists());
    assert_eq!(dq(&["--out", d, "--grid-points", "5", "eval", "symbol(proj(1))"]).0, EXIT_PASS);
    assert_eq!(dq(&["--out", d, "--grid-points", "5", "eval", "symbol(q*p + 1/2)"]).0, EXIT_PASS);
    assert!(dir.join("symbol.csv").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_sl2q_exact() {
    let (code, out, _) = dq(&["--format", "json", "verify", "sl2q", "--mode", "exact"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert_eq!(v["schema"], "dqkit.report.v1");
    let recs = v["records"].as_array().unwrap();
    assert!(recs.iter().all(|r| r["note"].as_str().unwrap().starts_with("mode exact")));
    for name in ["qybe", "rtt", "qdet-central", "build-rq-equals-explicit"] {
        let r = recs.iter().find(|r| r["name"] == name).unwrap();
        assert_eq!((r["status"].as_str(), r["residual"].as_f64()), (Some("pass"), Some(0.0)), "{}", name);
    }
    let u = recs.iter().find(|r| r["name"] == "unitarity-violated").unwrap();
    assert_eq!(u["status"], "xfail");
}

#[test]
fn verify_star_suite() {
    let (code, out, _) = dq(&["verify", "star", "--degree", "6", "--cases", "200"]);
    assert_eq!(code, EXIT_PASS, "{}", out);
    assert!(out.contains("PASS  star/associativity"));
}

#[test]
fn negative_control_is_reported_as_expected_failure() {
    let (code, out, _) = dq(&["--format", "json", "verify", "sw-nh", "--kernel", "parity"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    let t = v["records"].as_array().unwrap().iter().find(|r| r["name"] == "nh-parity/traciality").unwrap().clone();
    assert_eq!(t["status"], "xfail");
    assert_eq!(t["expect_pass"], false);
    assert!(t["residual"].as_f64().unwrap() > t["tolerance"].as_f64().unwrap());
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let (code, out, _) = dq(&["--tolerance-scale", "1e-9", "verify", "sw-galilei", "--kernel", "phi0"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("FAIL  sw-galilei/galilei-phi0/unit-trace"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"series_order": 5, "mode": "series", "hbar": 2.0}"#).unwrap();
    let (code, out, _) = dq(&["--config", good.to_str().unwrap(), "--hbar", "0.5", "--format", "json", "verify", "sl2q"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert_eq!(v["config"]["hbar"], 0.5);
    assert_eq!(v["config"]["series_order"], 5);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["note"].as_str().unwrap().starts_with("mode series")));

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"hbar": 1.0, "grid": 3}"#).unwrap();
    let (code, _, err) = dq(&["--config", bad.to_str().unwrap(), "verify", "sl2q"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown field"), "{}", err);
    assert_eq!(dq(&["--config", dir.join("missing.json").to_str().unwrap(), "verify", "sl2q"]).0, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors() {
    assert_eq!(dq(&["verify", "nope"]).0, EXIT_USAGE);
    assert_eq!(dq(&["verify", "sw-galilei", "--kernel", "parity"]).0, EXIT_USAGE);
    assert_eq!(dq(&["verify", "sw-nh", "--kernel", "sine"]).0, EXIT_USAGE);
    assert_eq!(dq(&["--hbar", "-1", "verify", "sl2q"]).0, EXIT_USAGE);
    assert_eq!(dq(&["--series-order", "2", "verify", "sl2q"]).0, EXIT_USAGE);
    assert_eq!(dq(&["--format", "yaml", "verify", "sl2q"]).0, EXIT_USAGE);
    assert_eq!(dq(&["frob"]).0, EXIT_USAGE);
    assert_eq!(dq(&["--help"]).0, EXIT_PASS);
}

#[test]
fn reports_are_deterministic_and_written_to_out() {
    let dir = scratch("det");
    let d = dir.to_str().unwrap();
    let strip = |s: &str| {
        let mut v = json(s);
        v.as_object_mut().unwrap().remove("wall_clock_s");
        v.to_string()
    };
    let a = dq(&["--format", "json", "--out", d, "verify", "star", "--cases", "20"]).1;
    let b = dq(&["--format", "json", "--out", d, "verify", "star", "--cases", "20"]).1;
    assert_eq!(strip(&a), strip(&b));
    let file = std::fs::read_to_string(dir.join("report-star.json")).unwrap();
    assert_eq!(strip(&file), strip(&b));
    // a different seed draws different polynomials but the same verdict
    let c = dq(&["--format", "json", "verify", "star", "--cases", "20", "--seed", "99"]).1;
    assert_eq!(json(&c)["config"]["seed"], 99);
    assert_eq!(json(&c)["passed"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dqkit");
    let o = Command::new(bin).args(["eval", "star(q, p)"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "q*p - (i/2)*hbar\n");
    let o = Command::new(bin).args(["verify", "bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(bin).args(["--tolerance-scale", "1e-9", "verify", "sw-galilei", "--kernel", "sine"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
