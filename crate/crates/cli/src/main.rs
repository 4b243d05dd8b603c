mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use cauchy_spectral::halfline::{f_exit, psi, ExitLaw, KernelTable, PSI_SUP_BOUND};
use cauchy_spectral::interval::{
    assemble_intermediate, assemble_rayleigh_ritz, bracket_from, lower_bounds_from, upper_bounds_from, EigBound,
};
use cauchy_spectral::numerics::{PrecisionContext, PrecisionMode, DIGITS_ENV_VAR};
use cauchy_spectral::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use output::{Cell, Format, Table};
use validate::Level;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Spectral quantities of the Cauchy process killed outside a half-line or an interval.
#[derive(Parser, Debug)]
#[command(name = "cauchy-spectral", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Working precision (decimal digits) for extended-precision assembly
    #[arg(long, env = DIGITS_ENV_VAR, default_value_t = 50, global = true)]
    digits: u32,
    /// Never raise the working precision above --digits; fail instead
    #[arg(long, global = true)]
    strict_digits: bool,
    /// Record the generation time in the metadata (output is then not byte-reproducible)
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified bounds for the first eigenvalues on (−1, 1)
    Eigs {
        /// Number of eigenvalues
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Basis size N
        #[arg(long, default_value_t = 150)]
        basis: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// ψ_λ and its remainder on a uniform grid
    Psi {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        xmin: f64,
        #[arg(long, default_value_t = 10.0)]
        xmax: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Transition density of the process killed on leaving (0, ∞)
    Heat {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Starting points, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        x: Vec<f64>,
        /// End points, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        y: Vec<f64>,
    },
    /// Density and survival function of the exit time from (0, ∞)
    Exit {
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, default_value_t = 0.1)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Run the numerical self-checks
    Validate {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Seed of the Monte Carlo checks
        #[arg(long, default_value_t = 20240917)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Upper,
    Lower,
    Both,
}

/// Failure of a run, mapped onto the exit code.
enum Failure {
    Usage(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BracketInversion { .. } => EXIT_INCONSISTENT,
                Error::PrecisionExhausted { .. } => EXIT_PRECISION,
                Error::InvalidArgument(_) | Error::Domain(_) => EXIT_USAGE,
                _ => EXIT_CHECK_FAILED,
            })
        }
    }
}

fn precision(common: &Common) -> Result<PrecisionContext, Failure> {
    let ctx = PrecisionContext::new(common.digits, PrecisionMode::Extended).map_err(|e| usage(e.to_string()))?;
    Ok(ctx.with_auto_raise(!common.strict_digits))
}

fn uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let common = &cli.common;
    let (table, code) = match &cli.command {
        Command::Eigs { n_max, basis, method } => eigs(common, *n_max, *basis, *method)?,
        Command::Psi { lambda, xmin, xmax, points } => (psi_table(*lambda, *xmin, *xmax, *points)?, 0),
        Command::Heat { t, x, y } => (heat_table(*t, x, y)?, 0),
        Command::Exit { x, tmin, tmax, points } => (exit_table(*x, *tmin, *tmax, *points)?, 0),
        Command::Validate { level, seed } => validate_table(common, *level, *seed)?,
    };
    let stamp = common.timestamp.then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    });
    table.write(common.format, stamp, common.output.as_deref()).map_err(Failure::Io)?;
    Ok(code)
}

fn eigs(common: &Common, n_max: usize, basis: usize, method: Method) -> Result<(Table, u8), Failure> {
    if n_max == 0 || basis == 0 {
        return Err(usage("--n-max and --basis must be at least 1"));
    }
    if n_max > basis {
        return Err(usage(format!("--n-max ({n_max}) cannot exceed --basis ({basis})")));
    }
    let ctx = precision(common)?;
    let bounds: Vec<EigBound> = match method {
        Method::Both => bracket_from(&assemble_rayleigh_ritz(basis, &ctx)?, basis, n_max)?,
        Method::Upper => upper_bounds_from(&assemble_rayleigh_ritz(basis, &ctx)?, basis, n_max)?,
        Method::Lower => lower_bounds_from(&assemble_intermediate(basis)?, n_max)?,
    };
    let mut t = Table::new("eigs", &["n", "basis", "lower", "upper", "midpoint", "width", "reference_contained"]);
    t.config.insert("n_max".into(), json!(n_max));
    t.config.insert("basis".into(), json!(basis));
    t.config.insert("method".into(), json!(format!("{method:?}").to_lowercase()));
    t.config.insert("digits".into(), json!(common.digits));
    t.config.insert("strict_digits".into(), json!(common.strict_digits));
    if let Some(first) = bounds.first() {
        let m = &first.meta;
        if method != Method::Lower {
            t.notes.insert("digits_used".into(), json!(m.digits_used));
            t.notes.insert("surviving_digits".into(), num(m.surviving_digits));
        }
        t.notes.insert("eigensolver_residual".into(), num(m.eig_residual));
        if let Some(p) = &m.pencil {
            t.notes.insert("pencil_max_eigenvalue".into(), num(p.max_eigenvalue));
            t.notes.insert("pencil_all_below_n_plus_2".into(), json!(p.all_below_n_plus_2));
            t.notes.insert("pencil_degenerate_directions".into(), json!(p.degenerate));
        }
    }
    let mut code = 0;
    for b in &bounds {
        let contained = b.reference_contained();
        if contained == Some(false) {
            code = EXIT_CHECK_FAILED;
        }
        t.push(vec![
            b.n.into(),
            b.basis.into(),
            b.lower.into(),
            b.upper.into(),
            b.midpoint().into(),
            b.width().into(),
            contained.into(),
        ]);
    }
    Ok((t, code))
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn psi_table(lambda: f64, xmin: f64, xmax: f64, points: usize) -> Result<Table, Failure> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(usage("--lambda must be positive"));
    }
    if !(xmin >= 0.0 && xmax > xmin && xmax.is_finite()) {
        return Err(usage("need 0 ≤ --xmin < --xmax"));
    }
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let mut t = Table::new("psi", &["x", "psi", "remainder"]);
    t.config.insert("lambda".into(), num(lambda));
    t.config.insert("xmin".into(), num(xmin));
    t.config.insert("xmax".into(), num(xmax));
    t.config.insert("points".into(), json!(points));
    t.notes.insert("psi_sup_bound".into(), num(PSI_SUP_BOUND));
    for x in uniform(xmin, xmax, points) {
        let e = psi(lambda, x);
        // the remainder at x = 0 is r(0) = sin(π/8)
        let rem = if x == 0.0 { cauchy_spectral::halfline::r(0.0) } else { e.remainder };
        t.push(vec![x.into(), e.psi.into(), rem.into()]);
    }
    Ok(t)
}

fn heat_table(time: f64, xs: &[f64], ys: &[f64]) -> Result<Table, Failure> {
    if !(time > 0.0 && time.is_finite()) {
        return Err(usage("--t must be positive"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(usage("--x and --y values must be positive"));
    }
    let k = KernelTable::evaluate(time, xs, ys)?;
    let mut t = Table::new("heat", &["t", "x", "y", "density"]);
    t.config.insert("t".into(), num(time));
    t.config.insert("x".into(), Value::Array(xs.iter().map(|&v| num(v)).collect()));
    t.config.insert("y".into(), Value::Array(ys.iter().map(|&v| num(v)).collect()));
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            t.push(vec![time.into(), x.into(), y.into(), k.values[(i, j)].into()]);
        }
    }
    Ok(t)
}

fn exit_table(x: f64, tmin: f64, tmax: f64, points: usize) -> Result<Table, Failure> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(usage("--x must be positive"));
    }
    if !(tmin > 0.0 && tmax > tmin && tmax.is_finite()) {
        return Err(usage("need 0 < --tmin < --tmax"));
    }
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let law = ExitLaw::evaluate(x, &uniform(tmin, tmax, points))?;
    let mut t = Table::new("exit", &["t", "density", "survival"]);
    t.config.insert("x".into(), num(x));
    t.config.insert("tmin".into(), num(tmin));
    t.config.insert("tmax".into(), num(tmax));
    t.config.insert("points".into(), json!(points));
    t.notes.insert("density_at_t_equal_x".into(), num(f_exit(1.0) / x));
    for i in 0..law.ts.len() {
        t.push(vec![law.ts[i].into(), law.density[i].into(), law.survival[i].into()]);
    }
    Ok(t)
}

fn validate_table(common: &Common, level: Level, seed: u64) -> Result<(Table, u8), Failure> {
    let ctx = precision(common)?;
    let checks = validate::run(level, &ctx, seed);
    let mut t = Table::new("validate", &["check", "pass", "measured", "threshold", "detail"]);
    t.config.insert("level".into(), json!(format!("{level:?}").to_lowercase()));
    t.config.insert("seed".into(), json!(seed));
    t.config.insert("digits".into(), json!(common.digits));
    t.config.insert("strict_digits".into(), json!(common.strict_digits));
    let mut code = 0;
    for c in checks {
        if !c.pass {
            code = EXIT_CHECK_FAILED;
        }
        t.push(vec![c.id.into(), c.pass.into(), c.measured.into(), c.threshold.into(), Cell::Text(c.detail)]);
    }
    Ok((t, code))
}
