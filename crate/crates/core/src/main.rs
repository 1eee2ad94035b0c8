use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use geomeans::gtchain::{chain_verdicts, default_grid, eigenvalue_log_majorization, scan_chain, CHAIN_SPREAD};
use geomeans::kostant::{hyperbolic_spectrum, kostant_check};
use geomeans::linalg::io::{read_matrix, write_matrix, MatrixFile};
use geomeans::linalg::matrix::CMat;
use geomeans::majorization::compound;
use geomeans::means::{geometric_mean, spectral_mean};
use geomeans::orbit::{solve, OrbitProblem, OrbitSolution, SolverConfig, TargetKind};
use geomeans::random::rng_from_seed;
use geomeans::realization::Realization;
use geomeans::suites::{orbit_instance, run_suites, Suite, VerifyConfig};
use geomeans::{Error, HermitianMatrix, SpdMatrix};

#[derive(Parser)]
#[command(name = "geomeans", version, about = "Geometric means of positive definite matrices and the inequalities around them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute A ♯_t B or A ♮_t B.
    Mean(MeanArgs),
    /// Evaluate the φ/ψ chains of a Hermitian pair on a grid of r.
    Scan(ScanArgs),
    /// Run seeded verification suites and write a CSV report.
    Verify(VerifyArgs),
    /// Find unitaries with UXU* + VYV* = Z.
    OrbitSolve(OrbitArgs),
    /// Compare two invertible matrices in the Kostant pre-order.
    Kostant(KostantArgs),
    /// k-th compound matrix.
    Compound(CompoundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeanKind {
    Geometric,
    Spectral,
}

#[derive(Args)]
struct MeanArgs {
    #[arg(long, value_enum)]
    kind: MeanKind,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Write the result as a matrix JSON file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RealizationArg {
    Glc,
    Slr,
}

impl From<RealizationArg> for Realization {
    fn from(r: RealizationArg) -> Self {
        match r {
            RealizationArg::Glc => Realization::Glc,
            RealizationArg::Slr => Realization::Slr,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    /// Matrix file for X (random pair when omitted).
    #[arg(long, requires = "y")]
    x: Option<PathBuf>,
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "glc")]
    realization: RealizationArg,
    /// Comma-separated increasing grid of r (default 2^-6, ..., 2^3).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Number of log partial sums per spectrum (default n).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run; repeat for several.
    #[arg(long, value_parser = parse_suite, required_unless_present = "all")]
    suite: Vec<Suite>,
    /// Run every suite.
    #[arg(long, conflicts_with = "suite")]
    all: bool,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed dimension for every trial.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "glc")]
    realization: RealizationArg,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite '{s}' (expected one of {})", names.join(", "))
    })
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Exp,
    Geo,
    Spec,
}

impl From<KindArg> for TargetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Exp => TargetKind::ExpProduct,
            KindArg::Geo => TargetKind::Geometric,
            KindArg::Spec => TargetKind::Spectral,
        }
    }
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = geomeans::tol::ORBIT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    max_iter: usize,
    /// Matrix files for X and Y (random instance when omitted).
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    input: Option<Vec<PathBuf>>,
    #[arg(long, value_enum, default_value = "glc")]
    realization: RealizationArg,
    /// Solution JSON destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV destination for the objective trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct KostantArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
}

#[derive(Args)]
struct CompoundArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Pass,
    PropertyFailure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mean(a) => run_mean(a),
        Command::Scan(a) => run_scan(a),
        Command::Verify(a) => run_verify(a),
        Command::OrbitSolve(a) => run_orbit(a),
        Command::Kostant(a) => run_kostant(a),
        Command::Compound(a) => run_compound(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::PropertyFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> geomeans::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn format_matrix(m: &CMat) -> String {
    let real = m.iter().all(|z| z.im == 0.0);
    let mut s = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if real {
                let _ = write!(s, "{:>12.4}", z.re);
            } else {
                let _ = write!(s, "{:>12.4}{:+.4}i", z.re, z.im);
            }
        }
        s.push('\n');
    }
    s
}

fn read_spd(p: &Path) -> geomeans::Result<SpdMatrix> {
    SpdMatrix::from_matrix(read_matrix(p)?.into_inner())
}

fn read_hermitian(p: &Path) -> geomeans::Result<HermitianMatrix> {
    HermitianMatrix::new(read_matrix(p)?.into_inner())
}

fn run_mean(a: MeanArgs) -> geomeans::Result<Outcome> {
    let (pa, pb) = (read_spd(&a.a)?, read_spd(&a.b)?);
    let m = match a.kind {
        MeanKind::Geometric => geometric_mean(&pa, &pb, a.t)?,
        MeanKind::Spectral => spectral_mean(&pa, &pb, a.t)?,
    };
    print!("{}", format_matrix(m.matrix()));
    if let Some(out) = a.out {
        write_matrix(&out, m.matrix())?;
    }
    Ok(Outcome::Pass)
}

fn run_scan(a: ScanArgs) -> geomeans::Result<Outcome> {
    let (x, y) = match (&a.x, &a.y) {
        (Some(px), Some(py)) => (read_hermitian(px)?, read_hermitian(py)?),
        _ => {
            let mut rng = rng_from_seed(a.seed);
            let r = Realization::from(a.realization);
            (
                r.random_generator(a.n, CHAIN_SPREAD, &mut rng)?,
                r.random_generator(a.n, CHAIN_SPREAD, &mut rng)?,
            )
        }
    };
    let grid = a.grid.unwrap_or_else(default_grid);
    let scan = scan_chain(&x, &y, &grid)?;
    let verdicts = chain_verdicts(&scan, &eigenvalue_log_majorization)?;
    let n = x.dim();
    let k = a.k.unwrap_or(n).clamp(1, n);
    let columns = ["phi.below.exp", "exp.below.psi", "phi.decreasing", "psi.increasing"];
    let mut csv = String::from("r");
    for i in 1..=k {
        let _ = write!(csv, ",phi_logsum_{i}");
    }
    for i in 1..=k {
        let _ = write!(csv, ",psi_logsum_{i}");
    }
    csv.push_str(",trace_phi,trace_psi,trace_exp_sum");
    for c in columns {
        let _ = write!(csv, ",{}", c.replace('.', "_"));
    }
    csv.push('\n');
    let partial = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .take(k)
            .scan(0.0, |acc, x| {
                *acc += x.ln();
                Some(*acc)
            })
            .collect()
    };
    let tr_e = scan.exp_sum.trace();
    for p in &scan.points {
        let _ = write!(csv, "{}", p.r);
        for v in partial(&p.phi_spectrum.real_parts()).iter().chain(&partial(&p.psi_spectrum.real_parts())) {
            let _ = write!(csv, ",{v:.12e}");
        }
        let _ = write!(csv, ",{:.12e},{:.12e},{:.12e}", p.trace_phi, p.trace_psi, tr_e);
        for c in columns {
            let cell = verdicts
                .predicates
                .iter()
                .find(|q| q.name == c && q.r == p.r)
                .map(|q| if q.verdict.is_pass() { "pass" } else { "fail" })
                .unwrap_or("");
            let _ = write!(csv, ",{cell}");
        }
        csv.push('\n');
    }
    emit(&csv, a.out.as_deref())?;
    for f in verdicts.failures() {
        eprintln!("failed: {} at r = {} (margin {:.3e})", f.name, f.r, f.margin);
    }
    Ok(if verdicts.all_pass() { Outcome::Pass } else { Outcome::PropertyFailure })
}

fn run_verify(a: VerifyArgs) -> geomeans::Result<Outcome> {
    let suites: Vec<Suite> = if a.all { Suite::ALL.to_vec() } else { a.suite };
    let cfg = VerifyConfig {
        seed: a.seed,
        trials: a.trials,
        n: a.n,
        realization: a.realization.into(),
    };
    let report = run_suites(&suites, &cfg)?;
    emit(&report.to_csv(), a.out.as_deref())?;
    let failed = report.failures().count();
    eprintln!("{} rows, {} failed", report.rows.len(), failed);
    Ok(if failed == 0 { Outcome::Pass } else { Outcome::PropertyFailure })
}

#[derive(Serialize)]
struct SolutionJson {
    kind: &'static str,
    realization: &'static str,
    n: usize,
    converged: bool,
    residual: f64,
    iterations: usize,
    restarts: usize,
    #[serde(rename = "U")]
    u: MatrixFile,
    #[serde(rename = "V")]
    v: MatrixFile,
}

fn run_orbit(a: OrbitArgs) -> geomeans::Result<Outcome> {
    let kind = TargetKind::from(a.kind);
    let realization = Realization::from(a.realization);
    let prob = match &a.input {
        Some(files) => OrbitProblem::new(read_hermitian(&files[0])?, read_hermitian(&files[1])?, kind)?,
        None => orbit_instance(kind, a.n, realization, &mut rng_from_seed(a.seed))?,
    };
    if !(a.tol > 0.0) {
        return Err(Error::ParamOutOfRange { name: "tol", value: a.tol });
    }
    let cfg = SolverConfig {
        max_iter: a.max_iter,
        tol: a.tol,
        seed: a.seed,
        realization,
        ..SolverConfig::default()
    };
    let (sol, converged): (OrbitSolution, bool) = match solve(&prob, &cfg) {
        Ok(s) => (s, true),
        Err(Error::MaxIterReached(best)) => (*best, false),
        Err(e) => return Err(e),
    };
    let json = SolutionJson {
        kind: kind.tag(),
        realization: realization.tag(),
        n: prob.dim(),
        converged,
        residual: sol.residual,
        iterations: sol.iterations,
        restarts: sol.restarts,
        u: MatrixFile::from_matrix(sol.u.matrix()),
        v: MatrixFile::from_matrix(sol.v.matrix()),
    };
    let mut text = serde_json::to_string_pretty(&json)?;
    text.push('\n');
    emit(&text, a.out.as_deref())?;
    if let Some(path) = a.trace {
        let mut csv = String::from("iteration,objective\n");
        for (i, f) in sol.objective_trace.iter().enumerate() {
            let _ = writeln!(csv, "{i},{f:.17e}");
        }
        std::fs::write(path, csv)?;
    }
    if !converged {
        eprintln!("no convergence: best residual {:.3e} after {} iterations", sol.residual, sol.iterations);
    }
    Ok(if converged { Outcome::Pass } else { Outcome::PropertyFailure })
}

fn run_kostant(a: KostantArgs) -> geomeans::Result<Outcome> {
    let f = read_matrix(&a.f)?;
    let g = read_matrix(&a.g)?;
    let check = kostant_check(&f, &g)?;
    let lf = hyperbolic_spectrum(&f)?.log_moduli();
    let lg = hyperbolic_spectrum(&g)?.log_moduli();
    println!("f <= g: {}", check.holds);
    println!("k,partial_f,partial_g,margin");
    let (mut sf, mut sg) = (0.0, 0.0);
    for (i, (a, b)) in lf.iter().zip(&lg).enumerate() {
        sf += a;
        sg += b;
        let margin = if i + 1 < lf.len() { sg - sf } else { -(sf - sg).abs() };
        println!("{},{sf:.12e},{sg:.12e},{margin:.6e}", i + 1);
    }
    println!("worst margin {:.6e} (tolerance {:.3e})", check.margin, check.tol);
    Ok(Outcome::Pass)
}

fn run_compound(a: CompoundArgs) -> geomeans::Result<Outcome> {
    let m = compound(&read_matrix(&a.a)?, a.k)?;
    print!("{}", format_matrix(m.matrix()));
    if let Some(out) = a.out {
        write_matrix(&out, m.matrix())?;
    }
    Ok(Outcome::Pass)
}
