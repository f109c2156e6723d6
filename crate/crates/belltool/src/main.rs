//! Command-line verification and reporting tool for Bell-number bounds.
//!
//! Exit codes: 0 all checks PASS; 1 any FAIL; 2 usage or configuration
//! error; 3 any INDETERMINATE without a FAIL.

use bellkit::harness::{
    self, emit_records, epsilon_scan_to_table, trend_to_table, CheckId, EstimateMode,
    OutputFormat, RunConfig, Verdict,
};
use bellkit::{Error, HPReal};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "belltool",
    version,
    about = "Exact Bell numbers, certified enclosures, and machine verification of their bounds"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Machine-verify the stated inequalities over an index range.
    Verify {
        /// Check id, `all`, or a group alias (`elementary`, `q-props`).
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 2000)]
        to: u64,
        /// Working precision in bits (default 192, env BELLTOOL_PRECISION).
        #[arg(long)]
        precision: Option<u32>,
        /// Output format: table, csv or json.
        #[arg(long, default_value = "table")]
        format: String,
        /// Worker threads; 0 means one per logical CPU.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print B_n exactly, as a certified enclosure, or as a digit count.
    Estimate {
        #[arg(long)]
        n: u64,
        /// exact, enclosure or digits.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Exact consecutive ratio B_n/B_{n-1} with its certified interval.
    Ratio {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Evaluate the Lambert W function with a certified residual.
    Lambertw {
        /// Nonnegative argument, decimal.
        #[arg(long)]
        x: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Error-trend table for the saddle-form approximation.
    Trend {
        /// Comma-separated indices, e.g. 500,1000,2000.
        #[arg(long)]
        ns: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Optimal epsilon and error coefficients over a range of r.
    EpsScan {
        #[arg(long = "r-from", default_value_t = 5.0)]
        r_from: f64,
        #[arg(long = "r-to", default_value_t = 5.0)]
        r_to: f64,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
}

fn env_u64(name: &str) -> Result<Option<u64>, String> {
    match std::env::var(name) {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{name} must be a nonnegative integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn resolve_precision(flag: Option<u32>) -> Result<u32, String> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match env_u64("BELLTOOL_PRECISION")? {
        Some(p) if (32..=(1 << 24)).contains(&p) => Ok(p as u32),
        Some(p) => Err(format!("BELLTOOL_PRECISION = {p} out of range [32, 2^24]")),
        None => Ok(bellkit::DEFAULT_PRECISION),
    }
}

fn resolve_cap() -> Result<u64, String> {
    Ok(env_u64("BELLTOOL_MAX_N")?.unwrap_or(bellkit::bell::DEFAULT_MAX_INDEX))
}

fn run(cli: Cli) -> Result<i32, Error> {
    let usage = |e: String| Error::Config(e);
    match cli.cmd {
        Cmd::Verify {
            theorem,
            from,
            to,
            precision,
            format,
            jobs,
        } => {
            let cfg = RunConfig {
                checks: CheckId::parse_selector(&theorem)?,
                from,
                to,
                precision: resolve_precision(precision).map_err(usage)?,
                format: format.parse::<OutputFormat>()?,
                jobs,
                max_exact_index: resolve_cap().map_err(usage)?,
            };
            let report = harness::verify_range(&cfg)?;
            for clamp in &report.clamps {
                eprintln!("note: {clamp}");
            }
            print!("{}", emit_records(&report.records, cfg.format));
            Ok(report.exit_code())
        }
        Cmd::Estimate { n, mode, precision } => {
            let prec = resolve_precision(precision).map_err(usage)?;
            let cap = resolve_cap().map_err(usage)?;
            let mode = mode.parse::<EstimateMode>()?;
            print!("{}", harness::estimate(n, mode, prec, cap)?);
            Ok(0)
        }
        Cmd::Ratio { n, precision } => {
            let prec = resolve_precision(precision).map_err(usage)?;
            let cap = resolve_cap().map_err(usage)?;
            if n < 1 {
                return Err(Error::Config("ratio needs n >= 1".into()));
            }
            if n > cap {
                return Err(Error::Config(format!(
                    "n = {n} exceeds the exact-computation cap {cap}"
                )));
            }
            let value = bellkit::bell_ratio_exact(n, prec)?;
            let enc = bellkit::ratio_enclosure(n, prec)?;
            let verdict = match enc.contains(&value) {
                Some(true) => Verdict::Pass,
                Some(false) => Verdict::Fail,
                None => Verdict::Indeterminate,
            };
            println!("n         = {n}");
            println!("B_n/B_n-1 = {}", value.to_sig_string(12));
            println!(
                "interval  = [{}, {}]  ({})",
                enc.lo.to_sig_string(12),
                enc.hi.to_sig_string(12),
                enc.provenance_label()
            );
            println!("verdict   = {verdict}");
            Ok(match verdict {
                Verdict::Pass => 0,
                Verdict::Fail => 1,
                Verdict::Indeterminate => 3,
            })
        }
        Cmd::Lambertw { x, precision } => {
            let prec = resolve_precision(precision).map_err(usage)?;
            let arg = HPReal::try_from_decimal(&x, prec)
                .ok_or_else(|| Error::Config(format!("cannot parse `{x}` as a decimal number")))?;
            let wv = bellkit::lambert_w(&arg, prec)?;
            println!("W({}) = {}", arg.to_sig_string(12), wv.w.to_sig_string(12));
            println!("residual <= {:e}", wv.residual);
            Ok(0)
        }
        Cmd::Trend { ns, precision } => {
            let prec = resolve_precision(precision).map_err(usage)?;
            let cap = resolve_cap().map_err(usage)?;
            let indices: Result<Vec<u64>, _> =
                ns.split(',').map(|s| s.trim().parse::<u64>()).collect();
            let indices =
                indices.map_err(|_| Error::Config(format!("cannot parse index list `{ns}`")))?;
            let rows = harness::trend_report(&indices, prec, cap)?;
            print!("{}", trend_to_table(&rows));
            Ok(0)
        }
        Cmd::EpsScan {
            r_from,
            r_to,
            steps,
            precision,
        } => {
            let prec = resolve_precision(precision).map_err(usage)?;
            let rows = harness::epsilon_scan(r_from, r_to, steps, prec)?;
            print!("{}", epsilon_scan_to_table(&rows));
            Ok(0)
        }
    }
}

fn main() {
    // Die quietly when a downstream pipe closes, like other line-oriented
    // tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
