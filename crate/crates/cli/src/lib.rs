//! Command-line front end for the `psdc` bound calculators and verification harness.
//!
//! Every subcommand parses flags, calls into `psdc`, and writes CSV to stdout or
//! `--out`. Summaries go to stderr. Exit codes: 0 on success, 1 when a
//! verification or design check fails, 2 on usage or input errors.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use psdc::apps::{self, DesignSystem, SparseCovProblem};
use psdc::compare::{model_bounds, BoundReport, ElminSource};
use psdc::gaussmodel::read_descriptor;
use psdc::matcore::read_rect_csv;
use psdc::mcsim::{
    self, BuiltinScenario, FigureKind, FigureParams, PoissonOptions, Scenario, VerificationReport, WeightLaw,
};
use psdc::report::{fmt_g, write_csv_to, CsvRecord};
use psdc::rng::StreamRng;
use psdc::{Field, RectMatrix, SymMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "PSDC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "psdc", version, about = "Gaussian comparison bounds for λ_min of random psd sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a BoundReport CSV row for an application or a model descriptor.
    Bound(BoundArgs),
    /// Run one Monte Carlo check on a built-in scenario, or emit figure data.
    Simulate(SimulateArgs),
    /// Run a built-in verification suite.
    Verify(VerifyArgs),
    /// Draw a sparse sketch and write its nonzeros as row,col,value triplets.
    Sketch(SketchArgs),
    /// Check whether a system of unit vectors is a projective design.
    Design(DesignArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundScenario {
    Wishart,
    WishartNonexample,
    Design2,
    Scov,
    SparseCov,
    Injection,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_enum, required_unless_present = "model", conflicts_with = "model")]
    scenario: Option<BoundScenario>,
    /// Model descriptor file.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Oversampling for design2, fourth moment ratio for scov.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Fourth moment of ψ for sparse-cov.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Orthonormal basis matrix for injection.
    #[arg(long)]
    q_file: Option<PathBuf>,
    /// Monte Carlo trials when a descriptor gives no `elmin`.
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimScenario {
    BernoulliWeighted,
    Wishart,
    SparseCovariance,
    SketchGram,
    ScalarSum,
    DesignSubsample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    TraceMgf,
    PolyMoment,
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShiftChoice {
    /// `Δ = E Y`.
    Mean,
    /// `Δ = 0`.
    Zero,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum, required_unless_present = "figure", conflicts_with = "figure")]
    scenario: Option<SimScenario>,
    #[arg(long, value_enum, requires = "scenario")]
    check: Option<Check>,
    /// Figure data instead of a check: sum1d or sum2x2.
    #[arg(long)]
    figure: Option<String>,
    /// Comma-separated grid (θ, p or t).
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to the theorem's factor (1 weighted, 2 iid).
    #[arg(long)]
    factor: Option<f64>,
    #[arg(long, value_enum, default_value_t = ShiftChoice::Mean)]
    shift: ShiftChoice,
    /// Override of σ*² for the tail check.
    #[arg(long)]
    sigma_star2: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Seed of the random psd matrices in bernoulli-weighted.
    #[arg(long, default_value_t = 0)]
    matrix_seed: u64,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q_file: Option<PathBuf>,
    /// Rows of a random orthonormal Q when no --q-file is given.
    #[arg(long)]
    rows: Option<usize>,
    /// Weight law: constant:c, bernoulli:p, uniform, exponential:rate, two-point:a:b:p, chi2.
    #[arg(long)]
    law: Option<String>,
    /// Design vectors (columns); defaults to three MUBs of C².
    #[arg(long)]
    vectors_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    replicate: usize,
    /// Expected sample count of design-subsample.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Poissonization,
    CovarianceLemma,
    TraceMgf,
    PolyMoment,
    Tail,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SketchArgs {
    /// Ambient dimension n (columns of the sketch).
    #[arg(long)]
    rows: Option<usize>,
    /// Subspace dimension d, used with --q-file.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Orthonormal n×d matrix; enables parameter selection and the injection check.
    #[arg(long)]
    q_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// d×n matrix whose columns are the unit vectors.
    #[arg(long)]
    vectors_file: PathBuf,
    #[arg(long, default_value_t = 2)]
    order: u8,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Also report the sampling plan for this failure probability.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(psdc::Error),
}

impl From<psdc::Error> for CliError {
    fn from(e: psdc::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn need<T>(v: Option<T>, flag: &str, context: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {context}")))
}

/// Runs the command line `argv` (program name first) with the process streams.
pub fn run(argv: &[String]) -> i32 {
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs `argv`, writing CSV to `out` unless `--out` is given and summaries to `err`.
pub fn run_with(argv: &[String], out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    let result = match &pool {
        Some(p) => p.install(|| dispatch(cli.command, out, err)),
        None => dispatch(cli.command, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_USAGE
        }
    }
}

fn thread_pool() -> CliResult<Option<rayon::ThreadPool>> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map(Some).map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Bound(a) => bound(a, out, err),
        Command::Simulate(a) => simulate(a, out, err),
        Command::Verify(a) => verify(a, out, err),
        Command::Sketch(a) => sketch(a, out, err),
        Command::Design(a) => design(a, out, err),
    }
}

/// Writes rows to `path` when given, otherwise to `out`.
fn emit<R: CsvRecord>(rows: &[R], path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_csv_to(File::create(p)?, rows)?,
        None => write_csv_to(out, rows)?,
    }
    Ok(())
}

fn bound(a: BoundArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let (label, report): (String, BoundReport<f64>) = if let Some(path) = &a.model {
        let desc = read_descriptor::<f64>(path)?;
        let source = desc.elmin.unwrap_or(ElminSource::MonteCarlo { trials: a.trials, seed: a.seed });
        let r = model_bounds(&desc.model, desc.theorem, source)?;
        (format!("model={}", path.display()), r)
    } else {
        let sc = a.scenario.expect("clap requires --scenario without --model");
        let ctx = match sc {
            BoundScenario::Wishart => "wishart",
            BoundScenario::WishartNonexample => "wishart-nonexample",
            BoundScenario::Design2 => "design2",
            BoundScenario::Scov => "scov",
            BoundScenario::SparseCov => "sparse-cov",
            BoundScenario::Injection => "injection",
        };
        match sc {
            BoundScenario::Wishart | BoundScenario::WishartNonexample => {
                let (d, n) = (need(a.d, "d", ctx)?, need(a.n, "n", ctx)?);
                let r = if sc == BoundScenario::Wishart {
                    apps::wishart_report::<f64>(d, n)?
                } else {
                    apps::wishart_nonexample_report::<f64>(d, n)?
                };
                (format!("scenario={ctx} d={d} n={n}"), r.bound)
            }
            BoundScenario::Design2 => {
                let (d, delta) = (need(a.d, "d", ctx)?, need(a.delta, "delta", ctx)?);
                let plan = apps::design_sampling_plan(d, delta, 2)?;
                let beta = a.beta.unwrap_or_else(|| plan.beta());
                (
                    format!("scenario={ctx} d={d} delta={delta} s={} beta={}", fmt_g(plan.s), fmt_g(beta)),
                    plan.report(beta),
                )
            }
            BoundScenario::Scov => {
                let (beta, d) = (need(a.beta, "beta", ctx)?, need(a.d, "d", ctx)?);
                let n = match (a.n, a.epsilon, a.delta) {
                    (Some(n), _, _) => n,
                    (None, Some(eps), Some(delta)) => apps::scov_sample_size(beta, d, eps, delta)?.n,
                    _ => return Err(CliError::Usage("scov needs --n or both --epsilon and --delta".into())),
                };
                (format!("scenario={ctx} beta={beta} d={d} n={n}"), apps::scov_report(beta, d, n)?)
            }
            BoundScenario::SparseCov => {
                let problem =
                    SparseCovProblem::new(need(a.d, "d", ctx)?, need(a.zeta, "zeta", ctx)?, need(a.c, "c", ctx)?)?;
                let n = need(a.n, "n", ctx)?;
                let (eps, delta) = (a.epsilon.unwrap_or(0.5), a.delta.unwrap_or(0.1));
                let r = apps::sparse_cov_report::<f64>(&problem, n, eps, delta)?;
                (
                    format!(
                        "scenario={ctx} d={} zeta={} c={} n={n} n_required(epsilon={eps}, delta={delta})={}",
                        problem.d, problem.zeta, problem.c, r.n_required
                    ),
                    r.bound,
                )
            }
            BoundScenario::Injection => {
                let q = read_rect_csv::<f64>(need(a.q_file.as_ref(), "q-file", ctx)?)?;
                let (k, zeta) = (need(a.k, "k", ctx)?, need(a.zeta, "zeta", ctx)?);
                let r = apps::injection_model::<f64>(&q, k, zeta)?;
                (
                    format!(
                        "scenario={ctx} n={} d={} k={k} zeta={zeta} coherence={}",
                        q.rows(),
                        q.cols(),
                        fmt_g(r.coherence)
                    ),
                    r.bound,
                )
            }
        }
    };
    emit(std::slice::from_ref(&report), a.out.as_deref(), out)?;
    writeln!(err, "bound: {label} seed={} expectation_lb={}", a.seed, fmt_g(report.expectation_lb))?;
    Ok(EXIT_OK)
}

fn read_q(path: Option<&PathBuf>, rows: Option<usize>, d: usize, seed: u64, ctx: &str) -> CliResult<RectMatrix<f64>> {
    match path {
        Some(p) => Ok(read_rect_csv::<f64>(p)?),
        None => Ok(RectMatrix::random_orthonormal(need(rows, "rows", ctx)?, d, Field::Real, seed)?),
    }
}

fn build_scenario(a: &SimulateArgs, kind: SimScenario) -> CliResult<Scenario> {
    let b = match kind {
        SimScenario::BernoulliWeighted => {
            let ctx = "bernoulli-weighted";
            BuiltinScenario::BernoulliWeighted {
                d: need(a.d, "d", ctx)?,
                n: need(a.n, "n", ctx)?,
                p: need(a.p, "p", ctx)?,
                matrices: None,
                seed: a.matrix_seed,
            }
        }
        SimScenario::Wishart => {
            BuiltinScenario::Wishart { d: need(a.d, "d", "wishart")?, n: need(a.n, "n", "wishart")? }
        }
        SimScenario::SparseCovariance => {
            let ctx = "sparse-covariance";
            BuiltinScenario::SparseCovariance {
                problem: SparseCovProblem::new(need(a.d, "d", ctx)?, need(a.zeta, "zeta", ctx)?, need(a.c, "c", ctx)?)?,
                n: need(a.n, "n", ctx)?,
            }
        }
        SimScenario::SketchGram => {
            let ctx = "sketch-gram";
            let q = match &a.q_file {
                Some(p) => read_rect_csv::<f64>(p)?,
                None => read_q(None, a.rows, need(a.d, "d", ctx)?, a.matrix_seed, ctx)?,
            };
            BuiltinScenario::SketchGram { q, k: need(a.k, "k", ctx)?, zeta: need(a.zeta, "zeta", ctx)? }
        }
        SimScenario::ScalarSum => {
            let law: WeightLaw = need(a.law.as_deref(), "law", "scalar-sum")?.parse()?;
            BuiltinScenario::ScalarSum { law, n: need(a.n, "n", "scalar-sum")? }
        }
        SimScenario::DesignSubsample => {
            let system = match &a.vectors_file {
                Some(p) => DesignSystem::new(read_rect_csv::<f64>(p)?)?,
                None => apps::mub_c2::<f64>(),
            };
            BuiltinScenario::DesignSubsample {
                system: system.replicate(a.replicate)?,
                s: need(a.s, "s", "design-subsample")?,
            }
        }
    };
    let mut sc = b.build()?;
    if a.shift == ShiftChoice::Zero {
        let (d, field) = (sc.dim(), sc.expected().field());
        sc = sc.with_shift(SymMatrix::zeros(d, field))?;
    }
    if let Some(s2) = a.sigma_star2 {
        sc = sc.with_sigma_star2(s2);
    }
    Ok(sc)
}

fn finish_reports(
    reports: &[VerificationReport],
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    emit(&rows, path, out)?;
    for r in reports {
        writeln!(err, "{}: {}", if r.passed() { "PASS" } else { "FAIL" }, r.summary())?;
    }
    Ok(if reports.iter().all(VerificationReport::passed) { EXIT_OK } else { EXIT_FAILED })
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if let Some(fig) = &a.figure {
        let kind: FigureKind = fig.parse()?;
        let law: WeightLaw = need(a.law.as_deref(), "law", "--figure")?.parse()?;
        let params = FigureParams::new(law, need(a.n, "n", "--figure")?).with_grid(a.grid.clone());
        match &a.out {
            Some(p) => mcsim::emit_figure_data(kind, &params, a.trials, a.seed, &mut File::create(p)?)?,
            None => mcsim::emit_figure_data(kind, &params, a.trials, a.seed, out)?,
        }
        writeln!(err, "figure {fig}: law={:?} n={} trials={} seed={}", params.law, params.n, a.trials, a.seed)?;
        return Ok(EXIT_OK);
    }
    let kind = a.scenario.expect("clap requires --scenario without --figure");
    let check = need(a.check, "check", "simulate --scenario")?;
    let sc = build_scenario(&a, kind)?;
    let factor = a.factor.unwrap_or_else(|| sc.factor());
    let report = match check {
        Check::TraceMgf => {
            let grid = if a.grid.is_empty() { vec![0.25, 0.5, 1.0, 2.0] } else { a.grid.clone() };
            mcsim::verify_trace_mgf(&sc, &grid, a.trials, a.seed, factor)?
        }
        Check::PolyMoment => {
            let grid = if a.grid.is_empty() { vec![4.0, 6.0] } else { a.grid.clone() };
            mcsim::verify_poly_moment(&sc, &grid, a.trials, a.seed, factor)?
        }
        Check::Tail => {
            if a.grid.is_empty() {
                return Err(CliError::Usage("--grid is required for the tail check".into()));
            }
            mcsim::verify_tail(&sc, &a.grid, a.trials, a.seed)?
        }
    };
    finish_reports(&[report], a.out.as_deref(), out, err)
}

/// `B Bᵀ/d` with a `d×d` standard Gaussian `B` from stream `i` of `seed`.
fn suite_psd(d: usize, seed: u64, i: u64) -> CliResult<SymMatrix<f64>> {
    let mut r = StreamRng::new(seed, i);
    let b: Vec<f64> = (0..d * d).map(|_| r.normal()).collect();
    Ok(RectMatrix::from_real(d, d, b)?.adjoint().gram().scaled(1.0 / d as f64))
}

fn suite_reports(suite: Suite, trials: usize, seed: u64) -> CliResult<Vec<VerificationReport>> {
    let bernoulli = || BuiltinScenario::BernoulliWeighted { d: 5, n: 20, p: 0.4, matrices: None, seed: 11 }.build();
    let wishart = || BuiltinScenario::Wishart { d: 3, n: 10 }.build();
    let mut reports = Vec::new();
    if matches!(suite, Suite::Poissonization | Suite::All) {
        for n in [2u64, 3] {
            let a = (0..n).map(|i| suite_psd(3, seed, i)).collect::<CliResult<Vec<_>>>()?;
            reports.push(mcsim::poissonization_check(&a, 2, &[0.5, 1.0, 2.0], PoissonOptions::default())?);
        }
    }
    if matches!(suite, Suite::CovarianceLemma | Suite::All) {
        let thetas = [0.25, 0.5, 1.0, 2.0, 4.0];
        let bs = [-1.0, 0.0, 1.0];
        for law in
            [WeightLaw::Bernoulli(0.3), WeightLaw::TwoPoint { a: 0.2, b: 3.0, p: 0.7 }, WeightLaw::Exponential(1.0)]
        {
            reports.push(mcsim::covcm_check(&law, &thetas, &bs, trials, seed)?);
        }
    }
    if matches!(suite, Suite::TraceMgf | Suite::All) {
        reports.push(mcsim::verify_trace_mgf(&bernoulli()?, &[0.25, 0.5, 1.0, 2.0], trials, seed, 1.0)?);
        reports.push(mcsim::verify_trace_mgf(&wishart()?, &[0.1, 0.25, 0.5, 1.0], trials, seed, 2.0)?);
    }
    if matches!(suite, Suite::PolyMoment | Suite::All) {
        for (sc, factor) in [(bernoulli()?, 1.0), (wishart()?, 2.0)] {
            let (d, field) = (sc.dim(), sc.expected().field());
            let sc = sc.with_shift(SymMatrix::zeros(d, field))?;
            reports.push(mcsim::verify_poly_moment(&sc, &[4.0, 6.0], trials, seed, factor)?);
        }
    }
    if matches!(suite, Suite::Tail | Suite::All) {
        let w = BuiltinScenario::Wishart { d: 5, n: 500 }.build()?;
        reports.push(mcsim::verify_tail(&w, &[60.0, 80.0, 100.0, 120.0, 140.0], trials, seed)?);
        let system = apps::mub_c2::<f64>().replicate(8)?;
        let design = BuiltinScenario::DesignSubsample { system, s: 32.0 }.build()?.with_sigma_star2(16.0);
        reports.push(mcsim::verify_tail(&design, &[4.0, 6.0, 8.0, 10.0, 12.0], trials, seed)?);
    }
    Ok(reports)
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let reports = suite_reports(a.suite, a.trials, a.seed)?;
    finish_reports(&reports, a.out.as_deref(), out, err)
}

struct Triplet(usize, usize, f64);

impl CsvRecord for Triplet {
    fn header() -> Vec<&'static str> {
        vec!["row", "col", "value"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.0.to_string(), self.1.to_string(), fmt_g(self.2)]
    }
}

fn sketch(a: SketchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let q = match &a.q_file {
        Some(p) => Some(read_rect_csv::<f64>(p)?),
        None => None,
    };
    if let Some(q) = &q {
        for (flag, given, actual) in [("rows", a.rows, q.rows()), ("dim", a.dim, q.cols())] {
            if given.is_some_and(|g| g != actual) {
                return Err(CliError::Usage(format!("--{flag} disagrees with the Q file ({actual})")));
            }
        }
    }
    let n = match &q {
        Some(q) => q.rows(),
        None => need(a.rows, "rows", "sketch without --q-file")?,
    };
    let (k, zeta, note) = match (a.k, a.zeta, &q) {
        (Some(k), Some(zeta), _) => (k, zeta, "given".to_string()),
        (None, None, Some(q)) => {
            let mu = apps::coherence(q)?;
            let p = apps::sketch_params(q.cols(), mu, a.epsilon, a.delta)?;
            (p.k, p.zeta, format!("selected from coherence {}", fmt_g(mu)))
        }
        _ => return Err(CliError::Usage("give both --k and --zeta, or neither together with --q-file".into())),
    };
    let s = apps::make_sketch::<f64>(k, n, zeta, a.seed)?;
    let rows: Vec<Triplet> = s.triplets().map(|(r, c, v)| Triplet(r, c, v)).collect();
    emit(&rows, a.out.as_deref(), out)?;
    write!(err, "sketch: k={k} n={n} zeta={} ({note}) nnz={} seed={}", fmt_g(zeta), s.nnz(), a.seed)?;
    if let Some(q) = &q {
        write!(err, " injection_lmin={}", fmt_g(apps::injection_lmin(q, &s)?))?;
    }
    writeln!(err)?;
    Ok(EXIT_OK)
}

struct DesignRow {
    d: usize,
    n: usize,
    order: u8,
    mode: apps::CheckMode,
    residual: f64,
    holds: bool,
}

impl CsvRecord for DesignRow {
    fn header() -> Vec<&'static str> {
        vec!["d", "n", "order", "mode", "residual", "holds"]
    }

    fn record(&self) -> Vec<String> {
        let mode = match self.mode {
            apps::CheckMode::Basis => "basis",
            apps::CheckMode::Probes => "probes",
        };
        vec![
            self.d.to_string(),
            self.n.to_string(),
            self.order.to_string(),
            mode.into(),
            fmt_g(self.residual),
            self.holds.to_string(),
        ]
    }
}

fn design(a: DesignArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let sys = DesignSystem::new(read_rect_csv::<f64>(&a.vectors_file)?)?;
    let c = apps::check_design(&sys, a.order, a.tol)?;
    let row =
        DesignRow { d: sys.dim(), n: sys.len(), order: a.order, mode: c.mode, residual: c.residual, holds: c.holds };
    emit(std::slice::from_ref(&row), a.out.as_deref(), out)?;
    write!(
        err,
        "design: order {} {} (residual {})",
        a.order,
        if c.holds { "holds" } else { "fails" },
        fmt_g(c.residual)
    )?;
    if let Some(delta) = a.delta {
        let plan = apps::design_sampling_plan(sys.dim(), delta, a.order)?;
        write!(err, "; sampling plan s={} ({} vectors) for delta={delta}", fmt_g(plan.s), plan.required_samples())?;
    }
    writeln!(err)?;
    Ok(if c.holds { EXIT_OK } else { EXIT_FAILED })
}
