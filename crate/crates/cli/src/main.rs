//! `qsub`: exact subgroup testing for qudit Clifford circuits.
//!
//! Exit codes: 0 success, 1 claim mismatch (a checked equality failed),
//! 2 usage or parse error, 3 resource cap exceeded.

mod selftest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsub::clifford::{
    build_commutator_circuit, build_ctp_to_ptp_circuit, random_clifford_circuit, wb_identity_test, CliffordCircuit,
};
use qsub::dense::{epr_acceptance, matrix_from_json, DenseUnitary, EprMode};
use qsub::error::Error;
use qsub::pauli::sample_basis_pauli;
use qsub::phasepoly::exact_trace;
use qsub::testing::{
    bb_promise_identity_test, compose_testers, decide_exact, empirical_rate, EprPromiseTester, ExactSolver,
    OracleHandle, Problem, Promise, RunMode, Tester, TesterReport, Verdict,
};
use qsub::DEFAULT_DIM_CAP;

#[derive(Parser)]
#[command(name = "qsub", about = "Exact subgroup testing for prime-arity qudit Clifford circuits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceMode {
    Exact,
    Dense,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum EprModeArg {
    Analytic,
    Statevector,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Itp,
    Ptp,
    Ctp,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Itp => Problem::Itp,
            ProblemArg::Ptp => Problem::Ptp,
            ProblemArg::Ctp => Problem::Ctp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PromiseArg {
    Pauli,
    Clifford,
}

#[derive(Args)]
struct CapArg {
    /// Dense-dimension cap (also via QSUB_DIM_CAP; default 4096).
    #[arg(long)]
    cap: Option<u64>,
}

impl CapArg {
    fn resolve(&self) -> u64 {
        self.cap.or_else(|| std::env::var("QSUB_DIM_CAP").ok().and_then(|v| v.parse().ok())).unwrap_or(DEFAULT_DIM_CAP)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact and/or dense normalized trace of a circuit.
    Trace {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: TraceMode,
        #[command(flatten)]
        cap: CapArg,
    },
    /// EPR identity-test acceptance probability of a circuit or matrix.
    Epr {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "analytic")]
        mode: EprModeArg,
        #[arg(long, default_value_t = 10000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Decide subgroup membership (exactly, or under a promise via the EPR tester).
    Decide {
        file: PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, value_enum)]
        promise: Option<PromiseArg>,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        /// Additionally estimate the acceptance rate over this many trials.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate acceptance probabilities exactly instead of sampling.
        #[arg(long)]
        deterministic: bool,
        #[command(flatten)]
        cap: CapArg,
    },
    /// White-box identity test from the conjugation tableau.
    Wb { file: PathBuf },
    /// Rewrite an instance of one testing problem into another.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        from: ProblemArg,
        #[arg(long, value_enum)]
        to: ProblemArg,
        /// Output path for emitted circuits (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Generate a seeded random Clifford circuit.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in verification subset and exit nonzero on failure.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A circuit file or a `{"n":…,"q":…,"re":…,"im":…}` matrix file,
/// distinguished by the first non-whitespace byte.
enum Input {
    Circuit(CliffordCircuit),
    Matrix(DenseUnitary),
}

fn load_input(path: &PathBuf, cap: u64) -> Result<Input, Error> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        Ok(Input::Matrix(matrix_from_json(&text, cap)?))
    } else {
        Ok(Input::Circuit(CliffordCircuit::parse_str(&text)?))
    }
}

fn load_circuit(path: &PathBuf) -> Result<CliffordCircuit, Error> {
    CliffordCircuit::parse_str(&fs::read_to_string(path)?)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn emit_circuit(c: &CliffordCircuit, output: &Option<PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, c.to_text())?,
        None => print!("{}", c.to_text()),
    }
    Ok(())
}

fn format_complex(v: qsub::Complex64) -> String {
    format!("{:+.12}{:+.12}i", v.re, v.im)
}

fn wilson_interval(rate: f64, n: u64) -> (f64, f64) {
    let z = 1.959964;
    let n = n as f64;
    let z2 = z * z;
    let center = (rate + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Trace { file, mode, cap } => cmd_trace(&file, mode, cap.resolve()),
        Command::Epr { file, mode, shots, seed, cap } => cmd_epr(&file, mode, shots, seed, cap.resolve()),
        Command::Decide { file, problem, promise, reps, trials, seed, deterministic, cap } => {
            cmd_decide(&file, problem, promise, reps, trials, seed, deterministic, cap.resolve())
        }
        Command::Wb { file } => cmd_wb(&file),
        Command::Reduce { file, from, to, output, seed, reps, cap } => {
            cmd_reduce(&file, from, to, &output, seed, reps, cap.resolve())
        }
        Command::Random { n, q, depth, seed, output } => {
            if !qsub::modring::is_prime(q) {
                eprintln!("error: arity {q} must be prime");
                return Ok(2);
            }
            if n == 0 {
                eprintln!("error: need at least one wire");
                return Ok(2);
            }
            emit_circuit(&random_clifford_circuit(n, q, depth, seed), &output)?;
            Ok(0)
        }
        Command::Selftest { seed } => Ok(if selftest::run(seed) { 0 } else { 1 }),
    }
}

fn cmd_trace(file: &PathBuf, mode: TraceMode, cap: u64) -> Result<u8, Error> {
    let c = load_circuit(file)?;
    let exact = match mode {
        TraceMode::Exact | TraceMode::Both => {
            let t = exact_trace(&c);
            if t.is_zero() {
                println!("exact: zero");
            } else {
                println!(
                    "exact: half_power={} phase_exp={} order={} value={}",
                    t.half_power(),
                    t.phase_exp(),
                    t.order(),
                    format_complex(t.to_complex())
                );
            }
            Some(t)
        }
        TraceMode::Dense => None,
    };
    let dense = match mode {
        TraceMode::Dense | TraceMode::Both => {
            let u = DenseUnitary::from_circuit(&c, cap)?;
            let t = u.normalized_trace();
            println!("dense: {}", format_complex(t));
            Some(t)
        }
        TraceMode::Exact => None,
    };
    if let (Some(e), Some(d)) = (exact, dense) {
        let delta = (e.to_complex() - d).norm();
        if delta > 1e-9 {
            println!("agreement: MISMATCH (|delta| = {delta:.3e})");
            return Ok(1);
        }
        println!("agreement: OK (|delta| = {delta:.3e})");
    }
    Ok(0)
}

fn cmd_epr(file: &PathBuf, mode: EprModeArg, shots: u64, seed: u64, cap: u64) -> Result<u8, Error> {
    let u = match load_input(file, cap)? {
        Input::Matrix(u) => u,
        Input::Circuit(c) => DenseUnitary::from_circuit(&c, cap)?,
    };
    match mode {
        EprModeArg::Analytic => {
            println!("acceptance_probability = {:.12}", epr_acceptance(&u, EprMode::Analytic, cap)?);
        }
        EprModeArg::Statevector => {
            println!("acceptance_probability = {:.12}", epr_acceptance(&u, EprMode::Statevector, cap)?);
        }
        EprModeArg::Sample => {
            let rate = epr_acceptance(&u, EprMode::Sample { shots, seed }, cap)?;
            let (lo, hi) = wilson_interval(rate, shots);
            println!("accept_rate = {rate:.6} (shots = {shots}, wilson95 = [{lo:.6}, {hi:.6}])");
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_decide(
    file: &PathBuf,
    problem: ProblemArg,
    promise: Option<PromiseArg>,
    reps: u32,
    trials: u64,
    seed: u64,
    deterministic: bool,
    cap: u64,
) -> Result<u8, Error> {
    let h = match load_input(file, cap)? {
        Input::Circuit(c) => OracleHandle::from_circuit(c),
        Input::Matrix(u) => OracleHandle::from_dense(u),
    };
    let mode = if deterministic { RunMode::Deterministic } else { RunMode::Sampled };
    let mut report = match (problem, promise) {
        (_, None) => {
            let verdict = decide_exact(&h, problem.into(), cap)?;
            TesterReport {
                verdict,
                declared_completeness: 1.0,
                declared_soundness: 0.0,
                repetitions: 1,
                seed,
                queries: h.query_count(),
                empirical: None,
            }
        }
        (ProblemArg::Itp, Some(p)) => {
            let promise = match p {
                PromiseArg::Pauli => Promise::Pauli,
                PromiseArg::Clifford => Promise::Clifford,
            };
            bb_promise_identity_test(&h, promise, reps, seed, mode, cap)?
        }
        _ => {
            eprintln!("error: a promise is only meaningful for --problem itp");
            return Ok(2);
        }
    };
    if trials > 0 {
        if let (_, Some(p)) = (problem, promise) {
            let promise = match p {
                PromiseArg::Pauli => Promise::Pauli,
                PromiseArg::Clifford => Promise::Clifford,
            };
            report.empirical = Some(empirical_rate(
                |s| bb_promise_identity_test(&h, promise, reps, s, RunMode::Sampled, cap).map(|r| r.verdict),
                trials,
                seed.wrapping_add(1),
            )?);
            report.queries = h.query_count();
        }
    }
    println!("{}", report.to_json());
    Ok(0)
}

fn cmd_wb(file: &PathBuf) -> Result<u8, Error> {
    let c = load_circuit(file)?;
    let report = TesterReport {
        verdict: if wb_identity_test(&c) { Verdict::Accept } else { Verdict::Reject },
        declared_completeness: 1.0,
        declared_soundness: 0.0,
        repetitions: 1,
        seed: 0,
        queries: 0,
        empirical: None,
    };
    println!("{}", report.to_json());
    Ok(0)
}

fn cmd_reduce(
    file: &PathBuf,
    from: ProblemArg,
    to: ProblemArg,
    output: &Option<PathBuf>,
    seed: u64,
    reps: u32,
    cap: u64,
) -> Result<u8, Error> {
    match (from, to) {
        (ProblemArg::Ctp, ProblemArg::Ptp) => {
            let c = load_circuit(file)?;
            emit_circuit(&build_ctp_to_ptp_circuit(&c), output)?;
            Ok(0)
        }
        (ProblemArg::Ptp, ProblemArg::Itp) => {
            let c = load_circuit(file)?;
            let p = sample_basis_pauli(c.n(), c.q(), seed);
            emit_circuit(&build_commutator_circuit(&c, &p), output)?;
            Ok(0)
        }
        (ProblemArg::Itp, ProblemArg::Ptp) | (ProblemArg::Itp, ProblemArg::Ctp) => {
            let h = match load_input(file, cap)? {
                Input::Circuit(c) => OracleHandle::from_circuit(c),
                Input::Matrix(u) => OracleHandle::from_dense(u),
            };
            let (solver_problem, promise) = if matches!(to, ProblemArg::Ptp) {
                (Problem::Ptp, Promise::Pauli)
            } else {
                (Problem::Ctp, Promise::Clifford)
            };
            let solver = ExactSolver { problem: solver_problem, cap };
            let epr = EprPromiseTester { promise, reps, mode: RunMode::Sampled, cap, q: h.q() };
            let composed = compose_testers(&solver, &epr);
            let verdict = composed.run(&h, seed)?;
            let (dc, ds) = composed.declared();
            let report = TesterReport {
                verdict,
                declared_completeness: dc,
                declared_soundness: ds,
                repetitions: reps,
                seed,
                queries: h.query_count(),
                empirical: None,
            };
            println!("{}", report.to_json());
            Ok(0)
        }
        _ => {
            eprintln!("error: unsupported reduction (supported: ctp->ptp, ptp->itp, itp->ptp, itp->ctp)");
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
