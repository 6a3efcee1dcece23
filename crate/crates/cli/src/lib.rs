//! Argument handling and report plumbing behind the `nld` binary.

pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nld_core::testfun::Family;
use nld_core::FunctionSpec;

use commands::{EmpiricalParams, Side};
pub use report::{Quantity, Row, RunReport, Status};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl CliError {
    pub fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nld", version, about = "n-level density computations and checks")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "NLD_THREADS")]
    pub threads: Option<usize>,
    /// Seed for randomized test points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override; the value used is echoed in the report.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Arithmetic side, RMT side, or both, for one configuration.
    Density {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value = "theorem")]
        side: SideArg,
    },
    /// ∫ ∏f_i W over R^n.
    RmtIntegral {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Normalized family sum against its predicted limit.
    Empirical {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// X, e.g. 1e5.
        #[arg(long, value_parser = parse_count)]
        x: Option<u64>,
        /// Comma-separated X values; one CSV row each.
        #[arg(long, value_delimiter = ',', value_parser = parse_count)]
        sweep: Vec<u64>,
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum, default_value = "triangle")]
        family: FamilyArg,
        #[arg(long, default_value = "auto")]
        z: Auto,
        #[arg(long, default_value = "auto")]
        u: Auto,
        #[arg(long, default_value = "auto")]
        eps: Auto,
        /// Raise the cost guard (number of character evaluations).
        #[arg(long)]
        max_work: Option<f64>,
    },
    /// Gauss sums: brute force against the prime-power table.
    VerifyGauss {
        #[arg(long, default_value_t = 3000)]
        kmax: u64,
        #[arg(long, default_value_t = 20)]
        mmax: i64,
    },
    /// Bell numbers and Möbius inversion on the partition lattice.
    VerifyMobius {
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Poisson summation identity over the standard (k, X, Z) grid.
    VerifyPoisson {
        #[arg(long, default_value_t = 10.0)]
        u: f64,
    },
    /// Arithmetic side against the RMT side on fixed configurations.
    VerifyCorollary {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Number of factors; a single-object config is repeated n times.
    #[arg(long)]
    pub n: Option<usize>,
    /// JSON file (or inline JSON) with `{family, sigma}` or a list of them.
    #[arg(long)]
    pub config: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Theorem,
    Rmt,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Triangle,
    Bump,
}

/// `auto` or a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auto {
    Auto,
    Value(f64),
}

impl std::str::FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Auto::Auto);
        }
        s.parse::<f64>()
            .map(Auto::Value)
            .map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

impl Auto {
    fn value(self) -> Option<f64> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v),
        }
    }
}

/// Integer that may be written as `1e5`.
fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: `{s}`"))?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e15 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}

pub fn parse_config(text: &str, n: Option<usize>) -> Result<Vec<FunctionSpec>, CliError> {
    let trimmed = text.trim_start();
    let json = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| CliError::Usage(format!("cannot read config `{text}`: {e}")))?
    };
    let value: serde_json::Value =
        serde_json::from_str(&json).map_err(|e| CliError::Usage(format!("malformed config: {e}")))?;
    let specs: Vec<FunctionSpec> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        other => serde_json::from_value(other).map(|s: FunctionSpec| vec![s; n.unwrap_or(1)]),
    }
    .map_err(|e| CliError::Usage(format!("malformed config: {e}")))?;
    if let Some(n) = n {
        if specs.len() != n {
            return Err(CliError::Usage(format!("--n = {n} but the config lists {} factors", specs.len())));
        }
    }
    if specs.is_empty() {
        return Err(CliError::Usage("config lists no factors".into()));
    }
    Ok(specs)
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<RunReport>,
}

/// Runs `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    b.build().expect("thread pool").install(f)
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new(), report: None }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text, report: None }
            };
        }
    };
    let start = Instant::now();
    let csv = cli.csv;
    match with_threads(cli.threads, || execute(&cli)) {
        Ok(mut report) => {
            report.wall_time = start.elapsed().as_secs_f64();
            let stdout = if csv { report.to_csv() } else { report.to_json() + "\n" };
            Outcome {
                code: report.status.exit_code(),
                stdout,
                stderr: String::new(),
                report: Some(report),
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            report: None,
        },
    }
}

fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let mut report = match &cli.command {
        Command::Density { config, side } => {
            let specs = parse_config(&config.config, config.n)?;
            let side = match side {
                SideArg::Theorem => Side::Theorem,
                SideArg::Rmt => Side::Rmt,
                SideArg::Both => Side::Both,
            };
            let default = if specs.len() <= 2 { 1e-6 } else { 1e-4 };
            commands::density(&specs, side, cli.tol.unwrap_or(default))?
        }
        Command::RmtIntegral { config } => {
            let specs = parse_config(&config.config, config.n)?;
            let default = if specs.len() <= 2 { 1e-6 } else { 1e-4 };
            commands::rmt(&specs, cli.tol.unwrap_or(default))?
        }
        Command::Empirical { n, x, sweep, sigma, family, z, u, eps, max_work } => {
            let mut xs = sweep.clone();
            if let Some(x) = x {
                xs.insert(0, *x);
            }
            let family = match family {
                FamilyArg::Triangle => Family::Triangle,
                FamilyArg::Bump => Family::Bump,
            };
            let spec = FunctionSpec { family, sigma: *sigma, power: None };
            let z = match z {
                Auto::Auto => None,
                Auto::Value(v) => Some(parse_count(&v.to_string()).map_err(CliError::Usage)?),
            };
            let params = EmpiricalParams { epsilon: eps.value(), u: u.value(), z, max_work: *max_work };
            commands::empirical(*n, spec, &xs, params)?
        }
        Command::VerifyGauss { kmax, mmax } => commands::verify_gauss(*kmax, *mmax, cli.tol.unwrap_or(1e-6))?,
        Command::VerifyMobius { nmax } => commands::verify_mobius(*nmax, cli.seed)?,
        Command::VerifyPoisson { u } => commands::verify_poisson(*u, cli.tol.unwrap_or(1e-8))?,
        Command::VerifyCorollary { n } => {
            commands::verify_corollary(*n, cli.tol.unwrap_or_else(|| commands::default_corollary_tol(*n)))?
        }
    };
    report.input("seed", cli.seed);
    Ok(report)
}
