//! Command-line front end for `fracroot-core`.
//!
//! `fracroot solve --problem FILE [options]` loads a problem file, sweeps the
//! fractional order (or runs once for the classic methods) and prints the
//! distinct roots found.
//!
//! Exit codes: 0 on success, 1 on a usage or configuration error, 2 when the
//! problem file cannot be used, 3 when no root was found.

pub mod problem;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracroot_core::fracderiv::{DerivKind, NegativePowerRule};
use fracroot_core::solvers::{run, SolverConfig, SolverKind};
use fracroot_core::sweep::{
    make_grid, sweep, AlphaGrid, RootRegistry, SweepResult, DEFAULT_ALPHA_EXCL, DEFAULT_ALPHA_STEP,
    DEFAULT_EPS_DEDUP,
};
use fracroot_core::Error;

use problem::Problem;
use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PROBLEM: i32 = 2;
pub const EXIT_NO_ROOTS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fracroot", version, about = "Fractional Newton-Raphson root finder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for the roots of a problem file.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Newton,
    FracNewton,
    FracNewtonRaphson,
    Quasi,
    Pseudo,
    Chord,
}

impl Method {
    pub fn kind(self) -> SolverKind {
        match self {
            Method::Newton => SolverKind::ClassicNewton,
            Method::FracNewton => SolverKind::FracNewton,
            Method::FracNewtonRaphson => SolverKind::FracNewtonRaphson,
            Method::Quasi => SolverKind::FracQuasiNewton,
            Method::Pseudo => SolverKind::FracPseudoNewton,
            Method::Chord => SolverKind::ParallelChord,
        }
    }

    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Deriv {
    Rl,
    Caputo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NegPowerRule {
    /// `(−1)^α Γ(α−μ)/Γ(−μ)`
    AlphaMinusMu,
    /// `(−1)^α Γ(−(μ+α))/Γ(−μ)`
    NegMuMinusAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub deriv: Option<Deriv>,
    /// Exponent rule for terms x^μ with μ ≤ −1.
    #[arg(long, value_enum)]
    pub neg_power_rule: Option<NegPowerRule>,
    /// Run at this single order instead of sweeping a grid.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Half-width of the gaps left around −1, 0 and 1.
    #[arg(long)]
    pub alpha_excl: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Residual below which the fractional Newton method switches to order 1.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Residual or iterate norm treated as divergence.
    #[arg(long)]
    pub div_bound: Option<f64>,
    /// Shift added to the pseudo-Newton scaling.
    #[arg(long)]
    pub eps_shift: Option<f64>,
    /// Relative distance under which two roots are the same.
    #[arg(long)]
    pub eps_dedup: Option<f64>,
    /// Fixed slope for the chord method.
    #[arg(long, allow_hyphen_values = true)]
    pub chord_slope: Option<f64>,
    /// Number of nonconstant Taylor terms kept for transcendental functions.
    #[arg(long)]
    pub n_trunc: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    pub out: OutFormat,
    /// Write every iterate of every run to this CSV file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Worker threads (0 uses all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// Everything needed to run once flags and problem defaults are merged.
#[derive(Debug)]
pub struct Plan {
    pub method: Method,
    pub config: SolverConfig,
    pub grid: Option<AlphaGrid>,
    pub eps_dedup: f64,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn parse_enum<T: ValueEnum>(field: &str, value: &str) -> Result<T, Failure> {
    T::from_str(value, false)
        .map_err(|_| Failure::new(EXIT_PROBLEM, format!("defaults.{field}: unknown value '{value}'")))
}

/// Merge flags over the problem's defaults over the built-in defaults.
fn plan(args: &SolveArgs, problem: &Problem) -> Result<Plan, Failure> {
    let d = &problem.defaults;
    let method = match (args.method, &d.method) {
        (Some(m), _) => m,
        (None, Some(s)) => parse_enum("method", s)?,
        (None, None) => Method::FracNewton,
    };
    let deriv = match (args.deriv, &d.deriv) {
        (Some(k), _) => k,
        (None, Some(s)) => parse_enum("deriv", s)?,
        (None, None) => Deriv::Rl,
    };
    let rule = match (args.neg_power_rule, &d.neg_power_rule) {
        (Some(r), _) => r,
        (None, Some(s)) => parse_enum("neg_power_rule", s)?,
        (None, None) => NegPowerRule::AlphaMinusMu,
    };

    let base = SolverConfig::default();
    let config = SolverConfig {
        tol: args.tol.or(d.tol).unwrap_or(base.tol),
        max_iter: args.max_iter.or(d.max_iter).unwrap_or(base.max_iter),
        delta: args.delta.or(d.delta).unwrap_or(base.delta),
        div_bound: args.div_bound.or(d.div_bound).unwrap_or(base.div_bound),
        eps_shift: args.eps_shift.or(d.eps_shift).unwrap_or(base.eps_shift),
        chord_slope: args.chord_slope.or(d.chord_slope),
        deriv_kind: match deriv {
            Deriv::Rl => DerivKind::RiemannLiouville,
            Deriv::Caputo => DerivKind::Caputo,
        },
        negative_power_rule: match rule {
            NegPowerRule::AlphaMinusMu => NegativePowerRule::GammaAlphaMinusMu,
            NegPowerRule::NegMuMinusAlpha => NegativePowerRule::GammaNegMuMinusAlpha,
        },
        n_trunc: args.n_trunc.or(d.n_trunc).unwrap_or(base.n_trunc),
        record_trace: args.trace.is_some(),
    };
    config
        .validate()
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;

    let eps_dedup = args.eps_dedup.or(d.eps_dedup).unwrap_or(DEFAULT_EPS_DEDUP);
    if !(eps_dedup > 0.0 && eps_dedup.is_finite()) {
        return Err(Failure::new(EXIT_USAGE, format!("eps-dedup must be positive, got {eps_dedup}")));
    }

    let grid = if method.kind().is_fractional() {
        let grid = match args.alpha.or(d.alpha) {
            Some(a) => AlphaGrid::from_values(vec![a]),
            None => make_grid(
                args.alpha_step.or(d.alpha_step).unwrap_or(DEFAULT_ALPHA_STEP),
                args.alpha_excl.or(d.alpha_excl).unwrap_or(DEFAULT_ALPHA_EXCL),
            ),
        };
        Some(grid.map_err(|e| Failure::new(EXIT_USAGE, format!("alpha grid: {e}")))?)
    } else {
        None
    };

    Ok(Plan { method, config, grid, eps_dedup })
}

fn execute(problem: &Problem, plan: &Plan, jobs: usize) -> Result<SweepResult, Failure> {
    let kind = plan.method.kind();
    let result = match &plan.grid {
        Some(grid) => sweep(&problem.system, kind, grid, &problem.x0, &plan.config, plan.eps_dedup, jobs),
        None => run(&problem.system, kind, 1.0, &problem.x0, &plan.config).map(|rec| {
            let mut registry = RootRegistry::new(plan.eps_dedup);
            registry.offer(&rec);
            SweepResult { registry, records: vec![rec] }
        }),
    };
    // The configuration was validated already, so what is left is a bad x0.
    result.map_err(|e| match e {
        Error::Precondition(_) | Error::Dimension { .. } => Failure::new(EXIT_PROBLEM, e.to_string()),
        other => Failure::new(EXIT_USAGE, other.to_string()),
    })
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<bool, Failure> {
    let problem = problem::load(&args.problem).map_err(|e| Failure::new(EXIT_PROBLEM, e.to_string()))?;
    let plan = plan(args, &problem)?;
    log::info!(
        "{}: {} with {} orders",
        problem.name,
        plan.method.name(),
        plan.grid.as_ref().map_or(1, AlphaGrid::len)
    );
    let result = execute(&problem, &plan, args.jobs)?;

    if let Some(path) = &args.trace {
        let write = || -> std::io::Result<()> {
            let mut w = BufWriter::new(File::create(path)?);
            report::write_trace(&mut w, problem.system.dim(), &result.records)?;
            w.flush()
        };
        write().map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write trace {}: {e}", path.display())))?;
    }

    let report = Report::new(&problem.name, &plan.method.name(), &problem.system, &result.registry, &result.records);
    let written = match args.out {
        OutFormat::Table => report::write_table(stdout, &report),
        OutFormat::Csv => report::write_csv(stdout, &report),
        OutFormat::Json => report::write_json(stdout, &report),
    };
    written.map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write output: {e}")))?;
    Ok(!report.roots.is_empty())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => match solve(&args, stdout) {
            Ok(true) => EXIT_OK,
            Ok(false) => {
                let _ = writeln!(stderr, "fracroot: no roots found");
                EXIT_NO_ROOTS
            }
            Err(f) => {
                let _ = writeln!(stderr, "fracroot: {}", f.message);
                f.code
            }
        },
    }
}
