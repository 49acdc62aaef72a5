//! End-to-end runs of the binary on small documents.

mod common;

use std::fs;

use chancmp::channels::is_channel;
use chancmp::io;
use chancmp::linalg::herm_eig;
use chancmp::{CMatrix, SystemDims};
use common::{gen, put, run, workdir};
use serde_json::Value;

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("no `{key}` in {v}"))
}

fn bell() -> String {
    let mut v = CMatrix::zeros(4, 1);
    v[(0, 0)] = 1.0f64.into();
    v[(3, 0)] = 1.0f64.into();
    let rho = CMatrix::projector(&v).scale(0.5);
    io::state_to_json(&rho, &SystemDims::new([("A0", 2), ("A1", 2)]).unwrap()).unwrap()
}

#[test]
fn bell_state_min_entropy() {
    let dir = workdir("bell");
    let s = put(&dir, "bell.json", &bell());
    let v = json_ok(&["norm-hmin", "--state", &s, "--condition-on", "A0"]);
    assert!((num(&v, "value") - 2.0).abs() < 1e-6, "{v}");
    assert!((num(&v, "hmin") + 1.0).abs() < 1e-6, "{v}");
    for key in ["tol", "seed", "residuals", "solver_iters"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn self_conversion_is_free() {
    let dir = workdir("self");
    let f = gen(&dir, "f.json", &["--kind", "channel", "--seed", "4"]);
    for cmd in ["delta-post", "delta-pre"] {
        let v = json_ok(&[cmd, "--phi1", &f, "--phi2", &f]);
        assert!(num(&v, "delta").abs() <= 1e-6, "{cmd}: {v}");
    }
}

#[test]
fn lecam_dirac_against_uniform() {
    let dir = workdir("lecam");
    let dirac = put(&dir, "dirac.json", "[[1, 0], [0, 1]]");
    let uniform = put(&dir, "uniform.json", "[[0.5, 0.5], [0.5, 0.5]]");
    let v = json_ok(&["delta-lecam", "--p", &dirac, "--q", &uniform, "--tol", "1e-10"]);
    assert!(num(&v, "delta").abs() < 1e-8, "{v}");
    let v = json_ok(&["delta-lecam", "--p", &uniform, "--q", &dirac, "--tol", "1e-10"]);
    assert!((num(&v, "delta") - 1.0).abs() < 1e-8, "{v}");
}

#[test]
fn exit_codes() {
    let dir = workdir("codes");
    let code = |args: &[&str]| run(args).status.code().unwrap();
    let f = gen(&dir, "f.json", &["--kind", "channel"]);
    assert_eq!(code(&["norm-diamond", "--phi1", &f]), 0);
    assert_eq!(code(&["norm-diamond", "--phi1", "/nonexistent/f.json"]), 2);
    assert_eq!(code(&["norm-diamond", "--phi1", &f, "--tol", "1"]), 2);
    assert_eq!(code(&["norm-diamond", "--phi1", &f, "--tol", "1e-12"]), 2);
    assert_eq!(code(&["norm-diamond"]), 2);
    let junk = put(&dir, "junk.json", "{\"schema\": \"choimap-v1\"");
    assert_eq!(code(&["norm-diamond", "--phi1", &junk]), 2);
    let povm = gen(&dir, "m.json", &["--kind", "povm"]);
    assert_eq!(code(&["norm-diamond", "--phi1", &povm]), 2);
    // post-processing cannot change the input space
    let g = gen(&dir, "g.json", &["--kind", "channel", "--dim", "3"]);
    assert_eq!(code(&["delta-post", "--phi1", &f, "--phi2", &g]), 2);
    assert_eq!(code(&["no-such-command"]), 64);
    assert_eq!(code(&[]), 64);
    let out = run(&["norm-diamond", "--phi1", "/nonexistent/f.json"]);
    assert!(out.stdout.is_empty() && !out.stderr.is_empty());
}

#[test]
fn generated_documents_parse_back() {
    let dir = workdir("gen");
    let f = gen(&dir, "f.json", &["--kind", "channel", "--dim", "2", "--dout", "3", "--rank", "2"]);
    let phi = io::choimap_from_json(&fs::read_to_string(f).unwrap()).unwrap();
    assert!(is_channel(&phi, 1e-10));
    assert_eq!((phi.d_in(), phi.d_out()), (2, 3));

    let s = gen(&dir, "s.json", &["--kind", "state", "--dim", "3", "--rank", "2"]);
    let (rho, dims) = io::state_from_json(&fs::read_to_string(s).unwrap()).unwrap();
    assert_eq!(dims.total(), 9);
    assert!((rho.trace().re - 1.0).abs() < 1e-12);
    let (ev, _) = herm_eig(&rho).unwrap();
    assert!(ev[0] > -1e-12 && ev.iter().filter(|x| **x > 1e-10).count() == 2);

    let m = gen(&dir, "m.json", &["--kind", "povm", "--dim", "3", "--count", "4"]);
    assert_eq!(io::povm_from_json(&fs::read_to_string(m).unwrap()).unwrap().len(), 4);
    let m = gen(&dir, "ms.json", &["--kind", "measset", "--size", "3"]);
    assert_eq!(io::measset_from_json(&fs::read_to_string(m).unwrap()).unwrap().povms().len(), 3);
    let e = gen(&dir, "e.json", &["--kind", "ensemble", "--count", "5"]);
    let e = io::ensemble_from_json(&fs::read_to_string(e).unwrap()).unwrap();
    assert!((e.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let x = gen(&dir, "x.json", &["--kind", "experiment", "--size", "3", "--count", "4"]);
    let x = io::experiment_from_json(&fs::read_to_string(x).unwrap()).unwrap();
    assert_eq!(x.len(), 4);

    // without --out the document itself goes to stdout
    let out = run(&["gen-random", "--kind", "channel", "--seed", "9"]);
    let back = io::choimap_from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(is_channel(&back, 1e-10));
}

#[test]
fn table_output() {
    let dir = workdir("table");
    let s = put(&dir, "bell.json", &bell());
    let out = run(&["norm-hmin", "--state", &s, "--condition-on", "A0", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("hmin ")), "{text}");
}

/// Every subcommand twice with the same seed, byte for byte.
#[test]
fn repeated_runs_are_identical() {
    let n = common::check_determinism(&workdir("determinism")).unwrap();
    assert!(n >= 17);
}
