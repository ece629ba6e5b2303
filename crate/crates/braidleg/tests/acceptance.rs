//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`) and enforcing its time
//! budget. Everything is exact rational/symbolic equality; there are no
//! numeric tolerances anywhere.
//!
//! Run with `cargo test --test acceptance -- --test-threads=1 --nocapture`
//! for the cleanest report.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use braidleg::context::Context;
use braidleg::element::Element;
use braidleg::gen::GenId;
use braidleg::hj::{harmonic_table_1d, hj_evolve};
use braidleg::parse::parse_element;
use braidleg::qcoeff::{rat_int, Assignment, Rat};
use braidleg::verify::*;

const SEED: u64 = 7;

fn finish(criterion: &str, ok: bool, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let within = elapsed <= budget;
    println!(
        "acceptance {criterion}: {} in {:.2?} (budget {:.0?})",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    assert!(ok, "{criterion} failed");
    assert!(
        within,
        "{criterion} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

#[test]
fn c01_swap_factor_transposition_oracle() {
    let t = Instant::now();
    let report = suite_swap_oracle(3, 100, SEED).unwrap();
    finish(
        "criterion 1 (swap-factor oracle)",
        report.ok(),
        t,
        Duration::from_secs(5),
    );
}

#[test]
fn c02_relation_reproduction() {
    let t = Instant::now();
    let report = suite_relations(2).unwrap();
    finish(
        "criterion 2 (relation reproduction)",
        report.ok(),
        t,
        Duration::from_secs(5),
    );
}

#[test]
fn c03_jacobi_identity() {
    let t = Instant::now();
    let report = suite_jacobi(2, 20, SEED).unwrap();
    let ok = report.ok() && report.cases == 20;
    finish(
        "criterion 3 (Jacobi identity)",
        ok,
        t,
        Duration::from_secs(60),
    );
}

#[test]
fn c04_hj_braiding_preservation() {
    let t = Instant::now();
    let report = suite_hj_braiding(2, 3, 4).unwrap();
    finish(
        "criterion 4 (action-series braiding preservation)",
        report.ok() && report.cases > 0,
        t,
        Duration::from_secs(60),
    );
}

#[test]
fn c05_hj_classical_limit() {
    let t = Instant::now();
    let ctx = Context::ones(1).unwrap();
    let series = hj_evolve(&BTreeMap::new(), &harmonic_table_1d(), 5, 2, &ctx).unwrap();
    let eval = |e: &Element| -> Rat {
        e.eval_scalar(&Assignment::AllOnes, &|g| match g {
            GenId::H(..) => Some(rat_int(1)),
            _ => None,
        })
        .unwrap()
    };
    let mut ok = eval(&series.coeff(1, &[2])) == rat_int(-1);
    ok &= eval(&series.coeff(3, &[2])) == rat_int(-2);
    ok &= eval(&series.coeff(5, &[2])) == rat_int(-16);
    // symbolic Planck variant: b_2^(3) = -2 h^2
    let want = parse_element("-2*h[1,1]^2", &ctx).unwrap();
    ok &= series.coeff(3, &[2]) == want;
    finish(
        "criterion 5 (classical action limit)",
        ok,
        t,
        Duration::from_secs(10),
    );
}

#[test]
fn c06_flow_braiding_preservation() {
    let t = Instant::now();
    let report = suite_flow_braiding(2, 2, 2).unwrap();
    finish(
        "criterion 6 (flow braiding preservation)",
        report.ok() && report.cases > 0,
        t,
        Duration::from_secs(60),
    );
}

#[test]
fn c07_harmonic_flow_classical_limit() {
    let t = Instant::now();
    let ctx = Context::ones(1).unwrap();
    let mut seed_x = BTreeMap::new();
    seed_x.insert((1u32, vec![1u32]), Element::one());
    let mut seed_p = BTreeMap::new();
    seed_p.insert((1u32, vec![1u32]), Element::one());
    let flow =
        braidleg::hamsys::ham_evolve(&seed_p, &seed_x, &harmonic_table_1d(), 5, 1, &ctx).unwrap();
    let eval = |e: &Element| -> Rat {
        e.eval_scalar(&Assignment::AllOnes, &|g| match g {
            GenId::H(..) => Some(rat_int(1)),
            _ => None,
        })
        .unwrap()
    };
    // Taylor coefficients of cos t + sin t and cos t - sin t through t^5
    let xpat = [1i64, 1, -1, -1, 1, 1];
    let ppat = [1i64, -1, -1, 1, 1, -1];
    let mut ok = true;
    for n in 0..=5u32 {
        ok &= eval(&flow.xcoeff(1, n, &[1])) == rat_int(xpat[n as usize]);
        ok &= eval(&flow.pcoeff(1, n, &[1])) == rat_int(ppat[n as usize]);
    }
    finish(
        "criterion 7 (classical flow limit)",
        ok,
        t,
        Duration::from_secs(10),
    );
}

#[test]
fn c08_legendre_oracle_cross_check() {
    let t = Instant::now();
    let report = suite_legendre_oracles(25, 8, SEED).unwrap();
    finish(
        "criterion 8 (series oracle cross-check)",
        report.ok() && report.cases == 25,
        t,
        Duration::from_secs(10),
    );
}

#[test]
fn c09_pipeline_vs_oracle_classical() {
    let t = Instant::now();
    let r1 = suite_legendre_classical_1d(25, 4, SEED).unwrap();
    let r2 = suite_legendre_classical_2d(5, 2, SEED).unwrap();
    finish(
        "criterion 9 (pipeline vs oracle, classical point)",
        r1.ok() && r2.ok(),
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn c10_unit_cancellation_and_covariance() {
    let t = Instant::now();
    let report = suite_cap_covariance(2, 2).unwrap();
    finish(
        "criterion 10 (unit cancellation, braiding covariance)",
        report.ok() && report.cases > 0,
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn c11_roundtrip() {
    let t = Instant::now();
    let report = suite_roundtrip(2).unwrap();
    // the generic-braiding round trip is executed and lands in the notes,
    // reported but not asserted
    let reported_generic = report.notes.iter().any(|n| n.contains("generic-braiding"));
    finish(
        "criterion 11 (round trip at the classical point)",
        report.ok() && reported_generic,
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn c12_epoche_normal_form() {
    let t = Instant::now();
    let report = suite_epoche(2, 100, SEED).unwrap();
    finish(
        "criterion 12 (bracketing algebra normal form)",
        report.ok() && report.cases == 100,
        t,
        Duration::from_secs(30),
    );
}

// --- criterion 13: byte-identical CLI output on golden problems ---

fn run_binary(args: &[&str]) -> (i32, Vec<u8>) {
    let exe = env!("CARGO_BIN_EXE_braidleg");
    let out = Command::new(exe)
        .args(args)
        .env("BRAIDLEG_MAX_TERMS", "1000000")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn problem(name: &str) -> String {
    format!("{}/tests/problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn c13_cli_determinism() {
    let t = Instant::now();
    let runs: Vec<Vec<String>> = vec![
        vec![
            "hj-evolve".into(),
            "--problem".into(),
            problem("hj_harmonic.json"),
        ],
        vec![
            "hj-evolve".into(),
            "--problem".into(),
            problem("hj_symbolic_s2.json"),
        ],
        vec![
            "ham-evolve".into(),
            "--problem".into(),
            problem("ham_harmonic.json"),
        ],
        vec![
            "ham-evolve".into(),
            "--problem".into(),
            problem("ham_symbolic_s2.json"),
        ],
        vec![
            "legendre".into(),
            "--problem".into(),
            problem("legendre_classical_1d.json"),
            "--classical-check".into(),
        ],
        vec![
            "legendre".into(),
            "--problem".into(),
            problem("legendre_symbolic_s1.json"),
        ],
        vec![
            "legendre".into(),
            "--problem".into(),
            problem("legendre_symbolic_s1.json"),
            "--inverse".into(),
        ],
        vec![
            "bracket".into(),
            "--s".into(),
            "2".into(),
            "p1".into(),
            "x1*x2*x1".into(),
        ],
        vec![
            "normal-form".into(),
            "--s".into(),
            "2".into(),
            "p2*x1*h[2,1]*p1".into(),
        ],
        vec![
            "epoche-nf".into(),
            "--s".into(),
            "2".into(),
            "hbar[xb2]*hbar[(xb1,pb1)]*hbar[pb2]".into(),
        ],
        vec![
            "verify".into(),
            "--suite".into(),
            "jacobi".into(),
            "--s".into(),
            "2".into(),
            "--seed".into(),
            "7".into(),
            "--cases".into(),
            "5".into(),
        ],
    ];
    let mut ok = true;
    for args in &runs {
        let argrefs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let (code1, out1) = run_binary(&argrefs);
        let (code2, out2) = run_binary(&argrefs);
        if code1 != 0 || code1 != code2 || out1 != out2 || out1.is_empty() {
            eprintln!("determinism failure for {args:?} (codes {code1}/{code2})");
            ok = false;
        }
    }
    finish(
        "criterion 13 (CLI determinism)",
        ok,
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn term_cap_fails_fast_on_runaway_problems() {
    // a tight BRAIDLEG_MAX_TERMS aborts the evolution with a validation
    // error instead of grinding
    let exe = env!("CARGO_BIN_EXE_braidleg");
    let out = Command::new(exe)
        .args(["hj-evolve", "--problem", &problem("hj_symbolic_s2.json")])
        .env("BRAIDLEG_MAX_TERMS", "3")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("BRAIDLEG_MAX_TERMS"), "{text}");
}

#[test]
fn cli_exit_codes_distinguish_validation_errors() {
    // schema violation: classical mode without an invertible quadratic form
    let (code, _) = run_binary(&[
        "legendre",
        "--problem",
        &problem("bad_missing_b2.json"),
        "--classical-check",
    ]);
    assert_eq!(code, 1);
    // unknown subcommand flag
    let (code, _) = run_binary(&["bracket", "--bogus", "p1", "x1"]);
    assert_eq!(code, 1);
}

#[test]
fn cli_report_expressions_reparse() {
    // every element string in a report parses back to an equal element
    let (code, out) = run_binary(&["hj-evolve", "--problem", &problem("hj_symbolic_s2.json")]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let ctx = Context::side_conditions(2).unwrap();
    for c in v["coefficients"].as_array().unwrap() {
        let text = c["element"].as_str().unwrap();
        if text != "0" {
            let parsed = parse_element(text, &ctx).unwrap();
            assert_eq!(parsed.to_string(), text);
        }
    }
}
