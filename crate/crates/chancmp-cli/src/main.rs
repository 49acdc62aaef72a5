//! `chancmp`: command-line front end.
//!
//! Inputs are JSON documents in the formats of `chancmp::io`. Results go to
//! stdout as one JSON object (or a two-column table with `--format table`)
//! carrying the tolerance, solver residual, iteration count and seed that
//! produced them.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure, 64 usage error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use chancmp::channels::{random_channel_with, ChoiMap};
use chancmp::classical::{lecam_deficiency, Experiment};
use chancmp::convert::{self, Optimizer, Variant};
use chancmp::games::{self, Ensemble, MeasurementSet, Povm};
use chancmp::io;
use chancmp::norms::{self, CombWires, FSpec, FVariant, NormValue};
use chancmp::{random, CMatrix, Error, SystemDims};

const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "chancmp", version, about = "One-shot comparison of quantum channels")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Solver tolerance, between 1e-10 and 1e-4.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the verification sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum FKind {
    Post,
    Pre,
    Partial,
    Comb,
    NoSignaling,
    Ppt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvKind {
    Post,
    Pre,
    Partial,
    Comb,
    NoSignaling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Channel,
    State,
    Povm,
    Ensemble,
    Measset,
    Experiment,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    phi1: PathBuf,
    #[arg(long)]
    phi2: PathBuf,
}

#[derive(Args)]
struct Wires {
    /// Comma-separated labels of each wire group.
    #[arg(long, default_value = "")]
    a0: String,
    #[arg(long, default_value = "")]
    a1: String,
    #[arg(long, default_value = "")]
    a0p: String,
    #[arg(long, default_value = "")]
    a1p: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// ‖Φ₁ − Φ₂‖◇, or ‖Φ₁‖◇ without --phi2.
    NormDiamond {
        #[arg(long)]
        phi1: PathBuf,
        #[arg(long)]
        phi2: Option<PathBuf>,
    },
    /// Dual diamond norm and conditional min-entropy of a state.
    NormHmin {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated conditioning factors.
        #[arg(long)]
        condition_on: String,
    },
    /// 2-diamond norm and conditional 2-min-entropy.
    NormHmin2 {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        wires: Wires,
    },
    /// Norm restricted to a class of superchannels.
    NormF {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        wires: Wires,
        #[arg(long, value_enum)]
        variant: FKind,
        /// Pass-through wires as `A:A'` pairs, comma-separated (partial).
        #[arg(long, default_value = "")]
        fixed: String,
        /// Factors transposed in the PPT relaxation.
        #[arg(long, default_value = "")]
        party: String,
    },
    /// Conversion distance under post-processing.
    DeltaPost {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        optimizer_out: Option<PathBuf>,
    },
    /// Conversion distance under pre-processing.
    DeltaPre {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        optimizer_out: Option<PathBuf>,
    },
    /// Conversion distance under superchannels acting on part of the wires.
    /// With no fixed wires this is the general superchannel distance.
    DeltaPartial {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "")]
        fixed_in: String,
        #[arg(long, default_value = "")]
        fixed_out: String,
        /// Restrict to no-signaling superchannels (no fixed wires).
        #[arg(long)]
        no_signaling: bool,
    },
    /// Simulability of one measurement set by another.
    DeltaMeas {
        #[arg(long)]
        m: PathBuf,
        #[arg(long)]
        n: PathBuf,
    },
    /// Le Cam deficiency of p with respect to q.
    DeltaLecam {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Success probability of a measurement, or the optimum without --povm.
    Psucc {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        povm: Option<PathBuf>,
    },
    /// Best guess from the outcome of one fixed measurement.
    PsuccQ {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        povm: PathBuf,
    },
    /// Sampled check of the channel conversion criterion.
    VerifyRandchans {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum)]
        variant: ConvKind,
        #[arg(long, default_value = "")]
        fixed_in: String,
        #[arg(long, default_value = "")]
        fixed_out: String,
        /// Defaults to the computed distance plus 1e-4.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Bell-measurement guessing game against the diamond distance.
    VerifyPsuc {
        #[command(flatten)]
        pair: Pair,
    },
    /// Sampled check of the measurement simulability criterion.
    VerifyScsimul {
        #[arg(long)]
        m: PathBuf,
        #[arg(long)]
        n: PathBuf,
        /// Defaults to the computed distance plus 1e-4.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 500)]
        ensembles: usize,
    },
    /// Random document of the given kind.
    GenRandom {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Dimension of the (input) system.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Output dimension of channels.
        #[arg(long)]
        dout: Option<usize>,
        /// Rank of states, Kraus count of channels.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Outcomes, ensemble size, or distribution count.
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Measurements in a set, points of an experiment.
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Write the document here and print a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let c = &cli.common;
    if !(1e-10..=1e-4).contains(&c.tol) {
        eprintln!("error: --tol must lie in [1e-10, 1e-4], got {}", c.tol);
        return ExitCode::from(EXIT_INPUT);
    }
    if let Some(n) = c.jobs {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker threads");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli.cmd, c) {
        Ok(Output::Result(mut v)) => {
            v.insert("tol".into(), json!(c.tol));
            v.insert("seed".into(), json!(c.seed));
            emit(&Value::Object(v), c.format)
        }
        Ok(Output::Document(text)) => {
            say(&text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Line to stdout. A closed pipe is not an error worth a panic.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver { .. } => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn emit(v: &Value, format: Format) -> ExitCode {
    match format {
        Format::Json => match io::to_json(v) {
            Ok(s) => say(&s),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
        },
        Format::Table => {
            let Value::Object(m) = v else { unreachable!() };
            let w = m.keys().map(String::len).max().unwrap_or(0);
            for (k, x) in m {
                let cell = match x {
                    Value::Number(n) => match n.as_f64() {
                        Some(f) if !n.is_u64() && !n.is_i64() => format!("{f:.10}"),
                        _ => n.to_string(),
                    },
                    Value::String(s) => s.clone(),
                    other => io::to_json(other).unwrap_or_default(),
                };
                say(&format!("{k:<w$}  {cell}"));
            }
        }
    }
    ExitCode::SUCCESS
}

enum Output {
    Result(Map<String, Value>),
    Document(String),
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<ChoiMap, Error> {
    io::choimap_from_json(&read(path)?)
}

fn labels(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn wires(w: &Wires) -> CombWires {
    CombWires::new(&labels(&w.a0), &labels(&w.a1), &labels(&w.a0p), &labels(&w.a1p))
}

fn norm_fields(v: &NormValue) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), json!(v.value));
    m.insert("lower".into(), json!(v.lower));
    m.insert("upper".into(), json!(v.upper));
    m.insert("residuals".into(), json!(v.residual));
    m.insert("solver_iters".into(), json!(v.iterations));
    m
}

fn no_solver(mut m: Map<String, Value>) -> Map<String, Value> {
    m.insert("residuals".into(), json!(0.0));
    m.insert("solver_iters".into(), json!(0));
    m
}

fn conversion_fields(r: &convert::ConversionResult) -> Map<String, Value> {
    let mut m = norm_fields(&r.delta);
    m.insert("delta".into(), json!(r.delta.value));
    m.insert("achieved".into(), json!(r.achieved));
    m
}

fn write_optimizer(r: &convert::ConversionResult, path: &Option<PathBuf>) -> Result<(), Error> {
    let Some(p) = path else { return Ok(()) };
    let text = match &r.optimizer {
        Optimizer::Channel(l) => io::choimap_to_json(l)?,
        Optimizer::Comb(t) => io::state_to_json(t.choi(), &t.dims())?,
        Optimizer::CondProb { .. } => return Err(Error::Unsupported("no document format for this optimizer".into())),
    };
    std::fs::write(p, text + "\n").map_err(|e| Error::Format(format!("{}: {e}", p.display())))
}

fn sweep_fields(s: &games::SweepReport) -> Result<Map<String, Value>, Error> {
    let v = serde_json::to_value(s).map_err(|e| Error::Format(e.to_string()))?;
    let Value::Object(mut m) = v else { unreachable!() };
    m.remove("seed");
    Ok(m)
}

fn variant(kind: ConvKind, fixed_in: &str, fixed_out: &str) -> Result<Variant, Error> {
    let fixed = !labels(fixed_in).is_empty() || !labels(fixed_out).is_empty();
    Ok(match kind {
        ConvKind::Post => Variant::Post,
        ConvKind::Pre => Variant::Pre,
        ConvKind::Partial => Variant::partial(&labels(fixed_in), &labels(fixed_out)),
        ConvKind::Comb | ConvKind::NoSignaling if fixed => {
            return Err(Error::Domain("fixed wires only apply to the partial variant".into()))
        }
        ConvKind::Comb => Variant::Comb,
        ConvKind::NoSignaling => Variant::NoSignaling,
    })
}

fn run(cmd: &Cmd, c: &Common) -> Result<Output, Error> {
    let tol = c.tol;
    let out = match cmd {
        Cmd::NormDiamond { phi1, phi2 } => {
            let mut d = load_map(phi1)?;
            if let Some(p) = phi2 {
                d = d.sub(&load_map(p)?)?;
            }
            norm_fields(&norms::diamond_norm(&d, tol)?)
        }
        Cmd::NormHmin { state, condition_on } => {
            let (rho, dims) = io::state_from_json(&read(state)?)?;
            let v = norms::dual_diamond_norm(&rho, &dims, &labels(condition_on), tol)?;
            let mut m = norm_fields(&v);
            m.insert("hmin".into(), json!(-v.value.log2()));
            m
        }
        Cmd::NormHmin2 { state, wires: w } => {
            let (rho, dims) = io::state_from_json(&read(state)?)?;
            let v = norms::two_diamond(&rho, &dims, &wires(w), tol)?;
            let mut m = norm_fields(&v);
            m.insert("hmin2".into(), json!(-v.value.log2()));
            m
        }
        Cmd::NormF { state, wires: w, variant, fixed, party } => {
            let (rho, dims) = io::state_from_json(&read(state)?)?;
            let fv = match variant {
                FKind::Post => FVariant::Post,
                FKind::Pre => FVariant::Pre,
                FKind::Partial => {
                    let pairs = labels(fixed)
                        .into_iter()
                        .map(|p| {
                            p.split_once(':')
                                .map(|(a, b)| (a.to_string(), b.to_string()))
                                .ok_or_else(|| Error::Domain(format!("expected A:A' pair, got `{p}`")))
                        })
                        .collect::<Result<Vec<_>, Error>>()?;
                    FVariant::Partial { fixed: pairs }
                }
                FKind::Comb => FVariant::FullComb,
                FKind::NoSignaling => FVariant::NoSignaling,
                FKind::Ppt => FVariant::PptComb { party: labels(party).into_iter().map(String::from).collect() },
            };
            let v = norms::f_norm(&rho, &dims, &FSpec { variant: fv, wires: wires(w) }, tol)?;
            let mut m = norm_fields(&v);
            m.insert("hmin_f".into(), json!(-v.value.log2()));
            m
        }
        Cmd::DeltaPost { pair, optimizer_out } => {
            let r = convert::delta_post(&load_map(&pair.phi1)?, &load_map(&pair.phi2)?, tol)?;
            write_optimizer(&r, optimizer_out)?;
            conversion_fields(&r)
        }
        Cmd::DeltaPre { pair, optimizer_out } => {
            let r = convert::delta_pre(&load_map(&pair.phi1)?, &load_map(&pair.phi2)?, tol)?;
            write_optimizer(&r, optimizer_out)?;
            conversion_fields(&r)
        }
        Cmd::DeltaPartial { pair, fixed_in, fixed_out, no_signaling } => {
            let kind = match (no_signaling, labels(fixed_in).is_empty() && labels(fixed_out).is_empty()) {
                (true, _) => ConvKind::NoSignaling,
                (false, true) => ConvKind::Comb,
                (false, false) => ConvKind::Partial,
            };
            let v = variant(kind, fixed_in, fixed_out)?;
            conversion_fields(&convert::delta(&load_map(&pair.phi1)?, &load_map(&pair.phi2)?, &v, tol)?)
        }
        Cmd::DeltaMeas { m, n } => {
            let ms = io::measset_from_json(&read(m)?)?;
            let ns = io::measset_from_json(&read(n)?)?;
            let r = convert::delta_meas_sim(&ms, &ns, tol)?;
            let mut out = conversion_fields(&r);
            if let Optimizer::CondProb { q, .. } = &r.optimizer {
                out.insert("q".into(), json!(q));
            }
            out
        }
        Cmd::DeltaLecam { p, q } => {
            let p = io::experiment_from_json(&read(p)?)?;
            let q = io::experiment_from_json(&read(q)?)?;
            let r = lecam_deficiency(&p, &q, tol)?;
            let mut m = norm_fields(&r.delta);
            m.insert("delta".into(), json!(r.delta.value));
            m.insert("achieved".into(), json!(r.achieved));
            m.insert("t".into(), json!(r.t));
            m
        }
        Cmd::Psucc { ensemble, povm } => {
            let e = io::ensemble_from_json(&read(ensemble)?)?;
            match povm {
                Some(p) => {
                    let m = io::povm_from_json(&read(p)?)?;
                    let v = games::psucc(&e, &m)?;
                    no_solver(Map::from_iter([("value".to_string(), json!(v))]))
                }
                None => norm_fields(&games::psucc_opt(&e, tol)?),
            }
        }
        Cmd::PsuccQ { ensemble, povm } => {
            let e = io::ensemble_from_json(&read(ensemble)?)?;
            let m = io::povm_from_json(&read(povm)?)?;
            let (v, guesses) = games::psucc_q_rule(&e, &m)?;
            no_solver(Map::from_iter([("value".to_string(), json!(v)), ("guesses".to_string(), json!(guesses))]))
        }
        Cmd::VerifyRandchans { pair, variant: kind, fixed_in, fixed_out, epsilon, samples } => {
            let (a, b) = (load_map(&pair.phi1)?, load_map(&pair.phi2)?);
            let v = variant(*kind, fixed_in, fixed_out)?;
            let eps = match epsilon {
                Some(e) => *e,
                None => convert::delta(&a, &b, &v, tol)?.delta.value + 1e-4,
            };
            let r = convert::verify_rand_chans(&a, &b, &v, eps, *samples, c.seed, tol)?;
            let mut m = sweep_fields(&r.sweep)?;
            m.insert("delta".into(), json!(r.delta.value));
            m.insert("residuals".into(), json!(r.delta.residual));
            m.insert("solver_iters".into(), json!(r.delta.iterations));
            m
        }
        Cmd::VerifyPsuc { pair } => {
            let r = games::verify_coro_psuc(&load_map(&pair.phi1)?, &load_map(&pair.phi2)?, tol)?;
            let mut m = norm_fields(&r.diamond);
            m.remove("value");
            m.insert("half_diamond".into(), json!(r.half_diamond));
            m.insert("psucc_1".into(), json!(r.psucc_1));
            m.insert("psucc_2".into(), json!(r.psucc_2));
            m.insert("psucc_opt".into(), json!(r.psucc_opt));
            m.insert("ratio".into(), json!(r.ratio));
            m.insert("abs_error".into(), json!(r.abs_error));
            m
        }
        Cmd::VerifyScsimul { m, n, epsilon, ensembles } => {
            let ms = io::measset_from_json(&read(m)?)?;
            let ns = io::measset_from_json(&read(n)?)?;
            let d = convert::delta_meas_sim(&ms, &ns, tol)?;
            let eps = epsilon.unwrap_or(d.delta.value + 1e-4);
            let r = games::verify_sc_simul(&ms, &ns, eps, *ensembles, c.seed, tol)?;
            let mut out = sweep_fields(&r)?;
            out.insert("delta".into(), json!(d.delta.value));
            out.insert("residuals".into(), json!(d.delta.residual));
            out.insert("solver_iters".into(), json!(d.delta.iterations));
            out
        }
        Cmd::GenRandom { kind, dim, dout, rank, count, size, out } => {
            let text = generate(*kind, *dim, dout.unwrap_or(*dim), *rank, *count, *size, c.seed)?;
            let Some(path) = out else { return Ok(Output::Document(text)) };
            std::fs::write(path, text + "\n").map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            no_solver(Map::from_iter([("written".to_string(), json!(path.display().to_string()))]))
        }
    };
    Ok(Output::Result(out))
}

fn generate(kind: Kind, d: usize, dout: usize, rank: usize, count: usize, size: usize, seed: u64) -> Result<String, Error> {
    if d == 0 || dout == 0 || rank == 0 || count == 0 || size == 0 {
        return Err(Error::Domain("sizes must be positive".into()));
    }
    let mut rng = random::rng(seed);
    let povm = |rng: &mut rand_chacha::ChaCha8Rng| Povm::on_single(random::povm_effects(rng, d, count));
    match kind {
        Kind::Channel => io::choimap_to_json(&random_channel_with(&mut rng, d, dout, rank)),
        Kind::State => {
            let rho = random::density_matrix(&mut rng, d * dout, rank);
            io::state_to_json(&rho, &SystemDims::new([("A0", d), ("A1", dout)])?)
        }
        Kind::Povm => io::povm_to_json(&povm(&mut rng)?),
        Kind::Measset => {
            let set = (0..size).map(|_| povm(&mut rng)).collect::<Result<Vec<_>, Error>>()?;
            io::measset_to_json(&MeasurementSet::new(set)?)
        }
        Kind::Ensemble => {
            let probs = random::dirichlet(&mut rng, count);
            let items: Vec<(f64, CMatrix)> =
                probs.into_iter().map(|p| (p, random::density_matrix(&mut rng, d, rank))).collect();
            io::ensemble_to_json(&Ensemble::new(items, SystemDims::single("A", d))?)
        }
        Kind::Experiment => {
            let e = Experiment::new((0..count).map(|_| normalized(random::dirichlet(&mut rng, size))).collect())?;
            io::experiment_to_json(&e)
        }
    }
}

/// Rounds a simplex point so that it sums to 1 within the experiment check.
fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v[..v.len() - 1].iter().sum();
    let last = v.len() - 1;
    v[last] = (1.0 - s).max(0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use chancmp::conic::Status;

    #[test]
    fn solver_failures_have_their_own_code() {
        let e = Error::Solver { status: Status::NumericalFailure, iterations: 200 };
        assert_eq!(exit_code(&e), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::Domain("x".into())), EXIT_INPUT);
    }
}
