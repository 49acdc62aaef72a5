//! Helpers shared by the binary tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chancmp::{io, random, SystemDims};

pub fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chancmp")).args(args).output().expect("binary runs")
}

pub fn workdir(name: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&p).unwrap();
    p
}

pub fn put(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Runs `gen-random --out dir/name` and returns the path.
pub fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut a = vec!["gen-random", "--out", &path];
    a.extend_from_slice(args);
    let out = run(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

/// One small invocation of every subcommand, on documents written to `dir`.
pub fn every_subcommand(dir: &Path) -> Vec<Vec<String>> {
    let f = gen(dir, "f.json", &["--kind", "channel", "--seed", "1"]);
    let g = gen(dir, "g.json", &["--kind", "channel", "--seed", "2"]);
    let st = gen(dir, "st.json", &["--kind", "state"]);
    let mut rng = random::rng(3);
    let dims = SystemDims::new([("A0", 2), ("A1", 2), ("A0'", 2), ("A1'", 2)]).unwrap();
    let big = put(dir, "big.json", &io::state_to_json(&random::density_matrix(&mut rng, 16, 4), &dims).unwrap());
    let m = gen(dir, "m.json", &["--kind", "measset", "--seed", "4"]);
    let n = gen(dir, "n.json", &["--kind", "measset", "--seed", "5"]);
    let e = gen(dir, "e.json", &["--kind", "ensemble", "--count", "3"]);
    let q = gen(dir, "q.json", &["--kind", "povm", "--count", "3"]);
    let p = gen(dir, "p.json", &["--kind", "experiment", "--seed", "6"]);
    let r = gen(dir, "r.json", &["--kind", "experiment", "--seed", "7"]);
    let w = "--a0 A0 --a1 A1 --a0p A0' --a1p A1'";

    let cases = [
        format!("norm-diamond --phi1 {f} --phi2 {g}"),
        format!("norm-hmin --state {st} --condition-on A0"),
        format!("norm-hmin2 --state {big} {w}"),
        format!("norm-f --state {big} --variant post {w}"),
        format!("norm-f --state {big} --variant no-signaling {w}"),
        format!("delta-post --phi1 {f} --phi2 {g}"),
        format!("delta-pre --phi1 {f} --phi2 {g}"),
        format!("delta-partial --phi1 {f} --phi2 {g}"),
        format!("delta-meas --m {m} --n {n}"),
        format!("delta-lecam --p {p} --q {r}"),
        format!("psucc --ensemble {e}"),
        format!("psucc --ensemble {e} --povm {q}"),
        format!("psucc-q --ensemble {e} --povm {q}"),
        format!("verify-psuc --phi1 {f} --phi2 {g}"),
        format!("verify-randchans --phi1 {f} --phi2 {g} --variant post --samples 12"),
        format!("verify-scsimul --m {m} --n {n} --ensembles 20"),
        "gen-random --kind ensemble --seed 11".to_string(),
    ];
    // paths come from CARGO_TARGET_TMPDIR and carry no spaces in practice
    cases.iter().map(|c| c.split_whitespace().map(String::from).collect()).collect()
}

/// Runs each invocation twice, and the sweeps also under one and three
/// worker threads. Returns the number of comparisons made, or the first
/// invocation whose output changed or failed.
pub fn check_determinism(dir: &Path) -> Result<usize, String> {
    let cases = every_subcommand(dir);
    let mut compared = 0;
    for args in &cases {
        let a = run(args);
        if !a.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&a.stderr)));
        }
        if run(args).stdout != a.stdout {
            return Err(format!("{args:?} differs between runs"));
        }
        compared += 1;
        if args[0].starts_with("verify-") {
            let with = |n: &str| {
                let mut v = args.clone();
                v.extend(["--jobs".to_string(), n.to_string()]);
                run(&v).stdout
            };
            if with("1") != with("3") {
                return Err(format!("{args:?} depends on the thread count"));
            }
            compared += 1;
        }
    }
    Ok(compared)
}
