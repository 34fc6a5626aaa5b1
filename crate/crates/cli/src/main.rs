use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use singular_core::cert::Certificate;
use singular_core::forms::{class_number, enumerate_reduced_forms};
use singular_core::jnum::{class_polynomial, height_numeric, j_f64, singular_moduli, JEvaluator};
use singular_core::scan::ScanConfig;
use singular_core::sd::{certify_sd_constants, certify_sigma_extremes, LOG_WEIGHTED_MIN};
use singular_core::{cert, Rational};
use singular_units::certjson::{rational_string, CertificateJson};
use singular_units::drivers;
use singular_units::pipeline::{self, Failure, PipelineConfig, Ranges, Stage};

#[derive(Parser)]
#[command(
    name = "singular-units",
    version,
    about = "Verifies that no singular modulus is an algebraic unit"
)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "SINGULAR_THREADS")]
    threads: Option<usize>,
    /// Directory for certificates, checkpoints and CSV dumps.
    #[arg(long, global = true, default_value = "certs")]
    out: PathBuf,
    /// Print certificates as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Eps {
    #[value(name = "1e-3")]
    E3,
    #[value(name = "4e-3")]
    E4x3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Certify {
    High,
    Mid,
    Low,
    Sd,
    Sigma,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the whole pipeline (or the selected stages) and writes a summary.
    ProveAll {
        /// Comma separated stage names; all stages by default.
        #[arg(long, value_delimiter = ',')]
        stages: Vec<Stage>,
        #[arg(long, default_value_t = 1 << 26)]
        block_size: u64,
        /// Shrinks the S(x) constants to n <= 10^6 and the first scan to [10^7, 10^8].
        #[arg(long)]
        desk_scale: bool,
        /// Also write CSV dumps next to the certificates.
        #[arg(long)]
        csv: bool,
        /// Keep scan checkpoints in the output directory and resume from them.
        #[arg(long)]
        checkpoint: bool,
    },
    /// Bounds C_eps(Δ) over a range of |Δ|.
    Scan {
        #[arg(long, value_enum)]
        eps: Eps,
        #[arg(long)]
        x_min: Option<u64>,
        #[arg(long)]
        x_max: Option<u64>,
        #[arg(long, default_value_t = 1 << 26)]
        block_size: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Writes `X,counter` for the first 10^4 values of the range.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Excludes every 4 <= |Δ| <= x_max except -4, -7, -8.
    Exclude {
        #[arg(long, default_value_t = 300_000)]
        x_max: u64,
        /// Writes one row per discriminant.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Certifies the numerical constants.
    VerifyConstants,
    /// Emits one range or sieve certificate.
    Certify {
        #[arg(value_enum)]
        which: Certify,
        /// Sieve limit for `sd` and `sigma`.
        #[arg(long)]
        limit: Option<u64>,
        /// Counter caps for `low` (range i, range ii).
        #[arg(long, num_args = 2, default_values_t = [16, 6])]
        caps: Vec<u64>,
    },
    /// Lists reduced primitive forms of a discriminant.
    Forms {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
    },
    /// Class number of a discriminant.
    ClassNumber {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
    },
    /// Singular moduli of a discriminant, or j at a point x + iy.
    J {
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<i64>,
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        tau: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// Also print the class polynomial.
        #[arg(long)]
        poly: bool,
    },
}

fn emit(cli: &Cli, cert: &Certificate, ms: u64) -> Result<bool> {
    let c = CertificateJson::from_certificate(cert, ms);
    let path = c.write_to(&cli.out)?;
    if cli.json {
        print!("{}", c.to_pretty());
    } else {
        println!(
            "{}: {} (total hi {}, threshold {})",
            c.stage,
            verdict(c.verified),
            c.total.hi,
            c.threshold
        );
        for n in &c.notes {
            println!("  {n}");
        }
        println!("  written to {}", path.display());
    }
    Ok(c.verified)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "verified"
    } else {
        "NOT verified"
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_millis() as u64))
}

fn run(cli: &Cli) -> std::result::Result<bool, Failure> {
    let threads = cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let cfg_err = Failure::Config;
    match &cli.command {
        Command::ProveAll {
            stages,
            block_size,
            desk_scale,
            csv,
            checkpoint,
        } => {
            let mut cfg = PipelineConfig::new(cli.out.clone());
            if !stages.is_empty() {
                cfg.stages = stages.clone();
            }
            cfg.threads = threads;
            cfg.block_size = *block_size;
            cfg.emit_csv = *csv;
            cfg.checkpoints = *checkpoint;
            cfg.ranges = if *desk_scale {
                Ranges::desk()
            } else {
                Ranges::full()
            };
            let outcome = pipeline::run(&cfg)?;
            for s in &outcome.stages {
                for c in &s.certs {
                    if cli.json {
                        print!("{}", c.to_pretty());
                    } else {
                        println!(
                            "{:<16} {:<13} {:>8} ms",
                            c.stage,
                            verdict(c.verified),
                            c.runtime_ms
                        );
                    }
                }
            }
            for n in &outcome.summary.notes {
                if !cli.json {
                    println!("{n}");
                }
            }
            outcome.status()?;
            Ok(true)
        }
        Command::Scan {
            eps,
            x_min,
            x_max,
            block_size,
            checkpoint,
            csv,
        } => {
            let preset = match eps {
                Eps::E3 => ScanConfig::preset_eps_1e3(),
                Eps::E4x3 => ScanConfig::preset_eps_4e3(),
            };
            let lo = x_min.unwrap_or(preset.x_min);
            let hi = x_max.unwrap_or(preset.x_max);
            let config = ScanConfig {
                block_size: *block_size,
                threads,
                ..preset
            }
            .with_range(lo, hi);
            config.validate().map_err(|e| cfg_err(anyhow!(e)))?;
            let start = Instant::now();
            let report = drivers::with_threads(threads, || {
                drivers::run_scan(&config, checkpoint.as_deref())
            })
            .and_then(|r| r)
            .map_err(cfg_err)?;
            let ms = start.elapsed().as_millis() as u64;
            if let Some(path) = csv {
                drivers::dump_counters(&config, lo, (lo + 9999).min(hi), path).map_err(cfg_err)?;
            }
            let saturated = report.per_block_max.iter().any(|b| b.saturated);
            if cli.json {
                let v = serde_json::json!({
                    "x_min": lo, "x_max": hi, "eps": rational_string(&config.eps),
                    "global_bound": report.global_bound, "blocks": report.blocks_processed,
                    "saturated": saturated, "complete": report.is_complete(), "runtime_ms": ms,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).map_err(|e| cfg_err(e.into()))?
                );
            } else {
                println!(
                    "global_bound {} on [{lo}, {hi}] ({} blocks, {ms} ms)",
                    report.global_bound, report.blocks_processed
                );
            }
            if saturated {
                return Err(Failure::Resource("counter saturation".into()));
            }
            Ok(report.is_complete())
        }
        Command::Exclude { x_max, csv } => {
            let start = Instant::now();
            let report = drivers::with_threads(threads, || drivers::run_exclude(*x_max))
                .and_then(|r| r)
                .map_err(cfg_err)?;
            let ms = start.elapsed().as_millis() as u64;
            if let Some(path) = csv {
                drivers::dump_exclusion(*x_max, path).map_err(cfg_err)?;
            }
            let flagged = report.flagged_deltas();
            if cli.json {
                let v = serde_json::json!({
                    "x_max": x_max, "flagged": flagged, "scanned": report.scanned_count,
                    "early_exits": report.early_exits, "runtime_ms": ms,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).map_err(|e| cfg_err(e.into()))?
                );
            } else {
                println!(
                    "flagged {flagged:?} among {} discriminants ({ms} ms)",
                    report.scanned_count
                );
            }
            Ok(flagged == [-8, -7, -4] || flagged == [-4, -7, -8])
        }
        Command::VerifyConstants => {
            let (c, ms) = timed(|| Ok(cert::certify_constants()?)).map_err(cfg_err)?;
            emit(cli, &c, ms).map_err(cfg_err)
        }
        Command::Certify { which, limit, caps } => {
            let certs: Vec<(Certificate, u64)> = match which {
                Certify::High => vec![timed(|| Ok(cert::certify_high_range()?)).map_err(cfg_err)?],
                Certify::Mid => {
                    let ((a, b), ms) = timed(|| Ok(cert::certify_mid_range()?)).map_err(cfg_err)?;
                    vec![(a, ms), (b, 0)]
                }
                Certify::Low => {
                    let ((a, b), ms) = timed(|| Ok(cert::certify_low_range(caps[0], caps[1])?))
                        .map_err(cfg_err)?;
                    vec![(a, ms), (b, 0)]
                }
                Certify::Sd => {
                    let n = limit.unwrap_or(Ranges::full().sd_n_max);
                    vec![timed(|| {
                        let k = drivers::with_threads(threads, || {
                            drivers::run_sd_constants(n, LOG_WEIGHTED_MIN)
                        })??;
                        Ok(certify_sd_constants(&k))
                    })
                    .map_err(cfg_err)?]
                }
                Certify::Sigma => {
                    let n = limit.unwrap_or(Ranges::full().sigma_limit);
                    vec![timed(|| {
                        let x = drivers::with_threads(threads, || drivers::run_sigma_extremes(n))??;
                        Ok(certify_sigma_extremes(&x))
                    })
                    .map_err(cfg_err)?]
                }
            };
            let mut ok = true;
            for (c, ms) in &certs {
                ok &= emit(cli, c, *ms).map_err(cfg_err)?;
            }
            Ok(ok)
        }
        Command::Forms { delta } => {
            let forms = enumerate_reduced_forms(*delta).map_err(|e| cfg_err(e.into()))?;
            for f in &forms {
                println!("({}, {}, {})", f.a, f.b, f.c);
            }
            Ok(true)
        }
        Command::ClassNumber { delta } => {
            println!("{}", class_number(*delta).map_err(|e| cfg_err(e.into()))?);
            Ok(true)
        }
        Command::J {
            delta,
            tau,
            digits,
            poly,
        } => j_command(*delta, tau, *digits, *poly)
            .map_err(cfg_err)
            .map(|_| true),
    }
}

fn j_command(delta: Option<i64>, tau: &[f64], digits: u32, poly: bool) -> Result<()> {
    let ev = JEvaluator::new(((digits as usize) * 2).max(64));
    match (delta, tau) {
        (Some(d), []) => {
            for v in singular_moduli(&ev, d, digits)? {
                let im = v.im_rational();
                let sign = if im < Rational::from_integer(0.into()) {
                    '-'
                } else {
                    '+'
                };
                let im = decimal(&num_traits::Signed::abs(&im), digits);
                println!(
                    "{} {sign} {im} i  (error < {:e})",
                    decimal(&v.re_rational(), digits),
                    v.err
                );
            }
            println!("height {:.12}", height_numeric(&ev, d, digits.min(40))?);
            if poly {
                let (coeffs, err) = class_polynomial(&ev, d, digits)?;
                let text: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                println!(
                    "class polynomial (low to high): [{}], max rounding distance {err:e}",
                    text.join(", ")
                );
            }
            Ok(())
        }
        (None, [x, y]) => {
            let (re, im) = j_f64(&ev, *x, *y)?;
            println!("{re:e} + {im:e} i");
            Ok(())
        }
        _ => bail!("give either --delta D or --tau X Y"),
    }
}

/// `r` rounded to `digits` decimal places.
fn decimal(r: &Rational, digits: u32) -> String {
    let scale = num_bigint::BigInt::from(10).pow(digits);
    let n = (r * Rational::from_integer(scale.clone()))
        .round()
        .to_integer();
    let sign = if n < 0.into() { "-" } else { "" };
    let n = n.magnitude();
    let (int, frac) = (n / scale.magnitude(), n % scale.magnitude());
    format!("{sign}{int}.{frac:0>width$}", width = digits as usize)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
