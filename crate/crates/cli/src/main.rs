//! `thompson`: Schreier balls, limit checks, proximality certificates and
//! the verification report.

mod report;

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use thompson_core::actions::{
    limit_check, schreier_ball, ActionError, GammaSpace, LambdaPoint, LambdaSpace,
    DEFAULT_RADIUS_CAP,
};
use thompson_core::configs::{AnyConfig, GammaConfig};
use thompson_core::proximal::{z_proximality_check, ProximalError};
use thompson_core::DyadicRational;

const CAP_ENV: &str = "THOMPSON_PROXIMAL_CAP";

const EXIT_FAILURE: u8 = 1;
const EXIT_BAD_ROOT: u8 = 2;
const EXIT_RADIUS_CAP: u8 = 3;
const EXIT_INSUFFICIENT: u8 = 4;
const EXIT_LIMIT_EXHAUSTED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "thompson",
    version,
    about = "Thompson's group F acting on the dyadics and their configurations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Schreier ball around a root as DOT or JSON.
    Schreier {
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// A dyadic such as `3/2^2` for gamma, a pair `(n,γ)` for lambda.
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest n for which Γ-balls around 1/2^m match the Λ-ball around
    /// (0,0) for every m in n..=n+window.
    LimitCheck {
        #[arg(long, num_args = 1.., required = true)]
        radius: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[arg(long, default_value_t = 4)]
        window: u32,
    },
    /// Certify proximality for two Γ-windows and lift the certificate to Z.
    Proximal {
        x1: PathBuf,
        x2: PathBuf,
        /// Comma-separated dyadics.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        target: Vec<String>,
        /// `LO..HI`, inclusive.
        #[arg(long, allow_hyphen_values = true, default_value = "-2..2")]
        n_range: String,
        /// Certificate output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites and write a JSON report.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "verification-report.json")]
        out: PathBuf,
        /// Replacement fixture file.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Include per-check wall-clock times in the report.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Gamma,
    Lambda,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Group,
    Actions,
    Configs,
    Proximal,
    Measure,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<thompson_core::suite::Suite> {
        use thompson_core::suite::Suite;
        match self {
            SuiteArg::Group => vec![Suite::Group],
            SuiteArg::Actions => vec![Suite::Actions],
            SuiteArg::Configs => vec![Suite::Configs],
            SuiteArg::Proximal => vec![Suite::Proximal],
            SuiteArg::Measure => vec![Suite::Measure],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SuiteArg::All => "all",
            s => s.suites()[0].name(),
        }
    }
}

/// An error carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_FAILURE,
            error: e.into(),
        }
    }
}

fn fail(code: u8, error: anyhow::Error) -> Failure {
    Failure { code, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schreier {
            space,
            root,
            radius,
            format,
            out,
        } => cmd_schreier(space, &root, radius, format, out.as_deref()),
        Command::LimitCheck {
            radius,
            n_max,
            window,
        } => cmd_limit_check(&radius, n_max, window),
        Command::Proximal {
            x1,
            x2,
            target,
            n_range,
            out,
        } => cmd_proximal(&x1, &x2, &target, &n_range, out.as_deref()),
        Command::Verify {
            suite,
            seed,
            out,
            fixtures,
            timings,
        } => report::cmd_verify(
            suite.name(),
            &suite.suites(),
            seed,
            &out,
            fixtures.as_deref(),
            timings,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}

fn radius_cap() -> Result<u32, Failure> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("{CAP_ENV}={v:?} is not a nonnegative integer").into()),
        Err(_) => Ok(DEFAULT_RADIUS_CAP),
    }
}

fn action_failure(e: ActionError) -> Failure {
    let code = match e {
        ActionError::RadiusOverCap { .. } => EXIT_RADIUS_CAP,
        ActionError::BadPoint(_) | ActionError::Dyadic(_) => EXIT_BAD_ROOT,
        ActionError::LimitExhausted { .. } => EXIT_LIMIT_EXHAUSTED,
        ActionError::InvalidGraph(_) => EXIT_FAILURE,
    };
    fail(code, e.into())
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn cmd_schreier(
    space: SpaceArg,
    root: &str,
    radius: u32,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let cap = radius_cap()?;
    let ball = match space {
        SpaceArg::Gamma => {
            let p: DyadicRational = root
                .parse()
                .map_err(|e| fail(EXIT_BAD_ROOT, anyhow!("bad root {root:?}: {e}")))?;
            schreier_ball::<GammaSpace>(p, radius, cap)
        }
        SpaceArg::Lambda => {
            let p: LambdaPoint = root
                .parse()
                .map_err(|e| fail(EXIT_BAD_ROOT, anyhow!("bad root {root:?}: {e}")))?;
            schreier_ball::<LambdaSpace>(p, radius, cap)
        }
    }
    .map_err(action_failure)?;
    let text = match format {
        Format::Dot => ball.to_dot(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&ball.to_export_json())?;
            s.push('\n');
            s
        }
    };
    write_output(out, &text)?;
    Ok(0)
}

fn cmd_limit_check(radii: &[u32], n_max: u32, window: u32) -> Result<u8, Failure> {
    let cap = radius_cap()?;
    let mut code = 0;
    for &r in radii {
        match limit_check(r, n_max, window, cap) {
            Ok(n) => println!("radius {r}: N = {n} (n_max {n_max}, window {window})"),
            Err(e @ ActionError::LimitExhausted { .. }) => {
                println!("radius {r}: exhausted (n_max {n_max}, window {window})");
                eprintln!("error: {e}");
                code = code.max(EXIT_LIMIT_EXHAUSTED);
            }
            Err(e) => return Err(action_failure(e)),
        }
    }
    Ok(code)
}

fn parse_n_range(s: &str) -> anyhow::Result<RangeInclusive<i64>> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("n-range {s:?} is not of the form LO..HI"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .with_context(|| format!("n-range start {lo:?}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .with_context(|| format!("n-range end {hi:?}"))?;
    if lo > hi {
        bail!("n-range {s:?} is empty");
    }
    Ok(lo..=hi)
}

fn read_gamma_config(path: &Path) -> anyhow::Result<GammaConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match serde_json::from_str::<AnyConfig>(&text)
        .with_context(|| format!("parsing {}", path.display()))?
    {
        AnyConfig::Gamma(x) => Ok(x),
        AnyConfig::Lambda(_) => bail!(
            "{} is a lambda configuration; proximal needs gamma",
            path.display()
        ),
    }
}

fn cmd_proximal(
    x1: &Path,
    x2: &Path,
    target: &[String],
    n_range: &str,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let x1 = read_gamma_config(x1)?;
    let x2 = read_gamma_config(x2)?;
    let target: Vec<DyadicRational> = target
        .iter()
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| anyhow!("bad target coordinate {t:?}: {e}"))
        })
        .collect::<anyhow::Result<_>>()?;
    let range = parse_n_range(n_range)?;
    let report = match z_proximality_check(&x1, &x2, &target, range) {
        Ok(r) => r,
        Err(e @ ProximalError::Insufficient { achievable, .. }) => {
            eprintln!("largest achievable target window: {achievable}");
            return Err(fail(EXIT_INSUFFICIENT, e.into()));
        }
        Err(e) => return Err(e.into()),
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_output(out, &json)?;

    let cert = &report.certificate;
    let mut summary = String::new();
    summary.push_str(&format!("alpha: {}\n", cert.alpha));
    summary.push_str(&format!("witness: {:?}\n", cert.witness));
    let pairs: Vec<String> = cert
        .source_set
        .iter()
        .zip(&cert.target_window)
        .map(|(v, w)| format!("{v} -> {w}"))
        .collect();
    summary.push_str(&format!("source -> target: {}\n", pairs.join(", ")));
    let (lo, hi) = report.n_range;
    summary.push_str(&format!(
        "verified window: n in {lo}..={hi} x {{{}}}: {}\n",
        cert.target_window
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(", "),
        if report.passed() { "ok" } else { "FAILED" }
    ));
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(if report.passed() { 0 } else { EXIT_FAILURE })
}
