//! `qvp`: command-line front end. Exit codes: 0 pass, 1 failed, 2 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qvp::constructions::{self, Reduction};
use qvp::emap::{synthesize, TargetPointSet};
use qvp::error::{Error, Result};
use qvp::fixtures;
use qvp::iterative::{make_nondestructive, run_iterative, Engine, IterativePlan};
use qvp::linalg::{DensityMatrix, PureState, StateJson};
use qvp::procedure::{MatrixJson, Procedure, ProcedureJson};
use qvp::report::{all_pass, sort_reports, write_json_lines};
use qvp::spectral::spectrum_with_tol;
use qvp::tolerances::{Limits, GROUPING, SYNTHESIS};
use qvp::verify::{load_instance, run_check, CheckId, Instance, RobustPairInstance};

#[derive(Parser)]
#[command(name = "qvp", version, about = "Simulate and certify quantum verification procedures")]
struct Cli {
    /// Write JSON output here instead of stdout (a directory for `fixture`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue groups of a procedure's accept element.
    Spectrum {
        procedure: PathBuf,
        #[arg(long, default_value_t = GROUPING)]
        tol: f64,
    },
    /// Outcome probabilities on a witness state.
    Accept {
        procedure: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Run an iterative plan exactly or by sampling.
    Iterate {
        procedure: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Witness state; defaults to |0...0>.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Synthesize an eigenspace-preserving map for a target point set.
    Synthesize {
        targets: PathBuf,
        #[arg(long, default_value_t = SYNTHESIS)]
        tol: f64,
    },
    /// Build a derived procedure.
    #[command(subcommand)]
    Construct(Construct),
    /// Run a named check and print one JSON report per line.
    Verify(VerifyArgs),
    /// Write a deterministic fixture bundle.
    #[command(subcommand)]
    Fixture(Fixture),
}

#[derive(Subcommand)]
enum Construct {
    /// Total procedure `p ↦ p² + (1-p)²`.
    Qt { q2: PathBuf },
    /// `p ↦ (1+p)/2`.
    Q2FromTotal { q: PathBuf },
    /// Three outcomes from a pair, routed on qubit 0.
    Q3FromPair { q: PathBuf, q_bar: PathBuf },
    /// Two procedures accepting on `L` and on `Lbar`.
    PairFromQ3 { q3: PathBuf },
    /// `Pr[1] = 1/2 + (Pr[L] - Pr[Lbar])/2`.
    Q2FromQ3 { q3: PathBuf },
    /// `p ↦ (p², 2p(1-p), (1-p)²)`.
    Q3FromQ2 { q2: PathBuf },
    /// Nondestructive wrapper for a target point set.
    Qnd {
        q: PathBuf,
        #[arg(long)]
        targets: PathBuf,
    },
    /// `2/3 ↦ 1/7`, `3/4 ↦ 6/7`.
    Qp { q2: PathBuf },
    /// Pull a procedure back through a reduction's channel.
    Qr {
        q: PathBuf,
        #[arg(long)]
        reduction: PathBuf,
    },
    /// Complement verifier on a robust-pair fixture directory.
    Qco {
        bundle: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Out)]
        side: Side,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    In,
    Out,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: no-interference, block-structure, iterative-iid, pg-identity, pg-beta,
    /// pg-monotone, emap-synthesis, nondestructive, conversions, subspace-equality,
    /// tfqma-eq, overlap-bound, qco, robustness, classical-agreement.
    theorem_id: String,
    /// Instance files or fixture directories; checks that need none may omit it.
    #[arg(long)]
    instance: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall-clock runtimes (reports are otherwise byte-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Fixture {
    /// Spectrum {1/3, 2/3 - δ², 2/3 + δ, 0} with δ = 2^(-n-2).
    Example1 {
        #[arg(long)]
        n: u32,
    },
    /// Total procedure, source pair and robust reduction for the complement verifier.
    RobustPair {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Random rotation-layer circuit on m witness and k ancilla qubits.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Robust pair whose reduction is deliberately broken.
    PlantedFault {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_procedure(path: &Path, limits: &Limits) -> Result<Procedure> {
    parse::<ProcedureJson>(path)?.build(limits)
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    parse::<StateJson>(path)?.into_density()
}

fn emit(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn procedure_json(q: &Procedure) -> serde_json::Value {
    serde_json::to_value(ProcedureJson::from_procedure(q)).expect("serializable")
}

fn construct(c: Construct, limits: &Limits) -> Result<serde_json::Value> {
    Ok(match c {
        Construct::Qt { q2 } => procedure_json(&constructions::qt_from_q2(&load_procedure(&q2, limits)?, limits)?),
        Construct::Q2FromTotal { q } => procedure_json(&constructions::q2_from_total(&load_procedure(&q, limits)?)?),
        Construct::Q3FromPair { q, q_bar } => {
            procedure_json(&constructions::q3_from_pair(&load_procedure(&q, limits)?, &load_procedure(&q_bar, limits)?, limits)?)
        }
        Construct::PairFromQ3 { q3 } => {
            let (a, b) = constructions::pair_from_q3(&load_procedure(&q3, limits)?)?;
            json!({ "q": procedure_json(&a), "q_bar": procedure_json(&b) })
        }
        Construct::Q2FromQ3 { q3 } => procedure_json(&constructions::q2_from_q3(&load_procedure(&q3, limits)?)?),
        Construct::Q3FromQ2 { q2 } => procedure_json(&constructions::q3_from_q2(&load_procedure(&q2, limits)?, limits)?),
        Construct::Qnd { q, targets } => {
            let t: TargetPointSet = parse(&targets)?;
            let nd = make_nondestructive(&load_procedure(&q, limits)?, &t, SYNTHESIS, limits)?;
            json!({
                "procedure": procedure_json(&nd.induced_procedure()?),
                "kraus": MatrixJson::from_matrix(&nd.kraus),
                "N": nd.emap.n,
            })
        }
        Construct::Qp { q2 } => {
            let (qp, em) = constructions::qp_from_q2(&load_procedure(&q2, limits)?, limits)?;
            json!({ "procedure": procedure_json(&qp), "emap": em })
        }
        Construct::Qr { q, reduction } => {
            let red = Reduction::from_json(&read(&reduction)?)?;
            procedure_json(&constructions::compose_reduction(&load_procedure(&q, limits)?, &red.phi)?)
        }
        Construct::Qco { bundle, side } => {
            let (_, inst) = load_instance(&bundle, limits)?;
            let Instance::RobustPair(rp) = inst else {
                return Err(Error::InvalidInput(format!("{} is not a robust-pair fixture", bundle.display())));
            };
            let RobustPairInstance { qt, q_in, q_out, reduction, thresholds, .. } = *rp;
            let q = match side {
                Side::In => q_in,
                Side::Out => q_out,
            };
            let c = constructions::qco(&q, &qt, &reduction, thresholds, limits)?;
            json!({ "procedure": procedure_json(&c.procedure), "eta": c.eta })
        }
    })
}

fn fixture(f: Fixture, out: &Option<PathBuf>, limits: &Limits) -> Result<()> {
    let files = match f {
        Fixture::Example1 { n } => fixtures::example1_bundle(n)?,
        Fixture::RobustPair { seed, m, k } => fixtures::robust_pair_bundle(&fixtures::robust_pair(seed, m, k)?)?,
        Fixture::Random { seed, m, k } => fixtures::random_bundle(seed, m, k, limits)?,
        Fixture::PlantedFault { seed } => fixtures::robust_pair_bundle(&fixtures::planted_fault(seed)?)?,
    };
    let Some(dir) = out else {
        let all: serde_json::Map<_, _> = files.into_iter().map(|f| (f.name, f.json)).collect();
        return emit(&None, &all);
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    for f in files {
        let text = serde_json::to_string_pretty(&f.json).expect("serializable") + "\n";
        std::fs::write(dir.join(&f.name), text).map_err(|e| Error::InvalidInput(format!("{}: {e}", f.name)))?;
    }
    Ok(())
}

fn verify(args: VerifyArgs, out: &Option<PathBuf>, limits: &Limits) -> Result<bool> {
    let id: CheckId = args.theorem_id.parse()?;
    let instances = if args.instance.is_empty() {
        vec![(String::from("builtin"), Instance::None)]
    } else {
        args.instance.iter().map(|p| load_instance(p, limits)).collect::<Result<_>>()?
    };
    let mut reports = Vec::new();
    for (name, inst) in &instances {
        reports.extend(run_check(id, name, inst, args.seed, args.timings, limits)?);
    }
    sort_reports(&mut reports);
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    match out {
        Some(p) => write_json_lines(&reports, std::fs::File::create(p).map_err(io)?).map_err(io)?,
        None => write_json_lines(&reports, std::io::stdout().lock()).map_err(io)?,
    }
    Ok(all_pass(&reports))
}

fn run(cli: Cli) -> Result<bool> {
    let limits = Limits::from_env();
    match cli.cmd {
        Command::Spectrum { procedure, tol } => {
            let q = load_procedure(&procedure, &limits)?;
            emit(&cli.out, &spectrum_with_tol(&q, tol)?.report())?;
        }
        Command::Accept { procedure, state } => {
            let q = load_procedure(&procedure, &limits)?;
            let p = q.acceptance_probabilities(&load_state(&state)?)?;
            emit(&cli.out, &json!({ "alphabet": q.alphabet(), "probabilities": p }))?;
        }
        Command::Iterate { procedure, plan, state, shots, seed } => {
            let q = load_procedure(&procedure, &limits)?;
            let plan: IterativePlan = parse(&plan)?;
            let rho = match state {
                Some(s) => load_state(&s)?,
                None => PureState::basis(q.dim(), 0)?.to_density(),
            };
            let engine = match shots {
                Some(shots) => Engine::Sample { shots, seed },
                None => Engine::Exact,
            };
            let r = run_iterative(&q, &plan, &rho, engine, &limits)?;
            emit(&cli.out, &json!({ "alphabet": r.alphabet, "distribution": r.distribution, "shots": r.shots, "seed": r.seed, "counts": r.counts }))?;
        }
        Command::Synthesize { targets, tol } => {
            let t: TargetPointSet = parse(&targets)?;
            emit(&cli.out, &synthesize(&t, tol, limits.n_cap)?)?;
        }
        Command::Construct(c) => emit(&cli.out, &construct(c, &limits)?)?,
        Command::Verify(args) => return verify(args, &cli.out, &limits),
        Command::Fixture(f) => fixture(f, &cli.out, &limits)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
