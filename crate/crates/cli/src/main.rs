use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isoperim_core::conformal;
use isoperim_core::greens;
use isoperim_core::hardy_sobolev::{self, TestFunction};
use isoperim_core::measures;
use isoperim_core::report;
use isoperim_core::search::{self, ScanOptions, ScanResult};
use isoperim_core::{Domain, Execution, Point};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "isoperim", version, about = "Weighted isoperimetric inequality toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Composite Gauss-Legendre order for boundary integrals.
    #[arg(long, global = true, default_value_t = measures::DEFAULT_ORDER)]
    quad_order: usize,
    /// Series truncation order N (power of two, at least 64).
    #[arg(long, global = true, default_value_t = conformal::DEFAULT_SERIES_ORDER)]
    series_n: usize,
    /// Slack for asserted inequalities; a negative value demands a strict margin.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = search::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Disable data-parallel evaluation.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Both sides of the inequality for one domain.
    Verify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Deficits of one domain over a list of exponents.
    Scan {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
    /// Conformal replay: λ, the A_r and S_r ladders and the limit chain.
    Replay {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Hardy-Sobolev ratio with its layer-cake and coarea checks, or the
    /// annular-ramp ladder with --extremal.
    Hs {
        /// Test function file: {"base": <domain>, "profile": {"breakpoints": [[s, η], ...]}}.
        #[arg(long, required_unless_present = "extremal")]
        domain: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 256)]
        levels: usize,
        #[arg(long)]
        extremal: bool,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.1,0.02,0.005")]
        eps: Vec<f64>,
    },
    /// Weighted Flucher bound from the Green's function.
    Green {
        /// Disk centered at the origin, or a star domain about the origin.
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Singularity `x,y` (disks only; stars use the origin).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_values_t = [0.0, 0.0])]
        x: Vec<f64>,
    },
    /// Shape scans and the two-ball threshold.
    Search {
        #[command(subcommand)]
        kind: SearchKind,
    },
    /// Two-ball thresholds for a list of exponents.
    Thresholds {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(
            long,
            allow_hyphen_values = true,
            value_delimiter = ',',
            default_value = "-0.75,-0.5,-0.25"
        )]
        p: Vec<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum SearchKind {
    /// Separation where B_r(0) ∪ B_r((s,0)) starts to violate the inequality.
    TwoBall {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Deficits of B_r((c,0)) over offsets c.
    Translate {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        offsets: Vec<f64>,
    },
    /// Random fixed-area Fourier perturbations of the unit disk.
    Perturb {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        harmonics: usize,
        #[arg(long, default_value_t = 0.1)]
        amp: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<isoperim_core::Error> for Failure {
    fn from(e: isoperim_core::Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        kind: "io",
        message: format!("{}: {e}", path.display()),
    }
}

/// Rendered report plus whether an asserted inequality failed.
struct Outcome {
    body: String,
    violation: bool,
}

fn json<T: Serialize + ?Sized>(value: &T, violation: bool) -> Result<Outcome, Failure> {
    Ok(Outcome {
        body: report::to_json(value)?,
        violation,
    })
}

fn load_domain(path: &Path) -> Result<Domain, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(Domain::from_json(&text)?)
}

fn scan_outcome(result: &ScanResult, format: Format) -> Result<Outcome, Failure> {
    match format {
        Format::Json => json(&result.summary, result.summary.violation),
        Format::Csv => Ok(Outcome {
            body: result.to_csv(),
            violation: result.summary.violation,
        }),
    }
}

fn json_only(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(usage(format!("{command} has no CSV output")));
    }
    Ok(())
}

#[derive(Serialize)]
struct HsReport {
    ratio: hardy_sobolev::HsRatio,
    layer_cake: hardy_sobolev::LayerCake,
    coarea: hardy_sobolev::Coarea,
}

#[derive(Serialize)]
struct ThresholdEntry {
    p: f64,
    separation: Option<f64>,
    bracket: Option<[f64; 2]>,
    error: Option<String>,
}

/// Relative agreement required of the two coarea evaluations.
const COAREA_TOL: f64 = 1e-6;

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let c = &cli.common;
    if !c.tol.is_finite() {
        return Err(usage(format!("--tol {} must be finite", c.tol)));
    }
    if c.quad_order < 16 {
        return Err(usage(format!("--quad-order {} must be at least 16", c.quad_order)));
    }
    if c.series_n < 64 || !c.series_n.is_power_of_two() {
        return Err(usage(format!("--series-n {} must be a power of two ≥ 64", c.series_n)));
    }
    let opts = ScanOptions {
        tol: c.tol,
        order: c.quad_order,
        exec: if c.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &cli.command {
        Command::Verify { domain, p } => {
            json_only(c.format, "verify")?;
            let d = load_domain(domain)?;
            let r = measures::deficit(&d, *p, c.tol, c.quad_order)?;
            json(&r, r.verdict == measures::Verdict::Fails)
        }
        Command::Scan { domain, p } => {
            let d = load_domain(domain)?;
            scan_outcome(&search::exponent_scan(&d, p, opts)?, c.format)
        }
        Command::Replay { domain, p } => {
            json_only(c.format, "replay")?;
            let d = load_domain(domain)?;
            let r = conformal::replay_proof(&d, *p, c.series_n)?;
            json(&r, !r.chain_is_monotone(c.tol))
        }
        Command::Hs {
            domain,
            p,
            levels,
            extremal,
            radius,
            eps,
        } => {
            if *extremal {
                let ladder = hardy_sobolev::extremal_sequence(*radius, *p, eps)?;
                let violation = ladder.iter().any(|pt| pt.ratio > 1.0 + c.tol);
                return match c.format {
                    Format::Json => json(&ladder, violation),
                    Format::Csv => {
                        let mut body = String::from("p,eps,lhs,rhs,ratio\n");
                        for pt in &ladder {
                            let cells = [pt.p, pt.eps, pt.lhs, pt.rhs, pt.ratio].map(report::float);
                            body.push_str(&cells.join(","));
                            body.push('\n');
                        }
                        Ok(Outcome { body, violation })
                    }
                };
            }
            json_only(c.format, "hs")?;
            let path = domain
                .as_ref()
                .ok_or_else(|| usage("hs needs --domain or --extremal"))?;
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            let u = TestFunction::from_json(&text)?;
            let report = HsReport {
                ratio: hardy_sobolev::hs_ratio(&u, *p)?,
                layer_cake: hardy_sobolev::layer_cake_check(&u, *p, *levels)?,
                coarea: hardy_sobolev::coarea_check(&u, *p, *levels)?,
            };
            let violation = report.ratio.ratio > 1.0 + c.tol
                || !report.layer_cake.is_ordered(c.tol)
                || report.coarea.relative_gap() > COAREA_TOL;
            json(&report, violation)
        }
        Command::Green { domain, beta, x } => {
            json_only(c.format, "green")?;
            let d = load_domain(domain)?;
            let [x0, x1] = x[..] else {
                return Err(usage("--x takes exactly two coordinates"));
            };
            let x = Point::new(x0, x1);
            let g = match &d {
                Domain::Disk(disk) if disk.center().norm() == 0.0 => greens::disk_green(disk.radius(), x)?,
                _ if x.norm() != 0.0 => {
                    return Err(usage(
                        "a singularity away from the origin is only supported for disks centered at the origin",
                    ))
                }
                _ => greens::star_green(&d, c.series_n)?,
            };
            let r = greens::flucher_bound(&g, *beta)?;
            json(&r, !r.holds(c.tol))
        }
        Command::Search { kind } => match kind {
            SearchKind::TwoBall { r, p } => {
                json_only(c.format, "search two-ball")?;
                json(&search::two_ball_threshold(*r, *p, c.quad_order)?, false)
            }
            SearchKind::Translate { r, p, offsets } => {
                scan_outcome(&search::translate_scan(*r, *p, offsets, opts)?, c.format)
            }
            SearchKind::Perturb { p, harmonics, amp, n } => scan_outcome(
                &search::perturbation_scan(*p, *harmonics, *amp, *n, c.seed, opts)?,
                c.format,
            ),
        },
        Command::Thresholds { r, p } => {
            json_only(c.format, "thresholds")?;
            let entries: Vec<ThresholdEntry> =
                opts.exec
                    .map_slice(p, |&p| match search::two_ball_threshold(*r, p, c.quad_order) {
                        Ok(t) => ThresholdEntry {
                            p,
                            separation: Some(t.separation),
                            bracket: Some(t.bracket),
                            error: None,
                        },
                        Err(e) => ThresholdEntry {
                            p,
                            separation: None,
                            bracket: None,
                            error: Some(e.kind().to_string()),
                        },
                    });
            json(&entries, false)
        }
    }
}

/// Temp file in the target directory, then rename over the target.
fn write_atomic(path: &Path, body: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn fail(f: &Failure) -> ExitCode {
    let line = serde_json::json!({ "error": f.kind, "message": f.message });
    eprintln!("{line}");
    ExitCode::from(EXIT_ERROR)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                // a closed pipe (e.g. `| head`) is not an error for help text
                let _ = io::stdout().write_all(e.render().to_string().as_bytes());
                return ExitCode::from(EXIT_OK);
            }
            let rendered = e.to_string();
            let message: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            return fail(&usage(message.join(" ").trim_start_matches("error: ")));
        }
    };
    let out = cli.common.out.clone();
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(f) => return fail(&f),
    };
    let written = match &out {
        Some(path) => write_atomic(path, &outcome.body).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(outcome.body.as_bytes())
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    };
    if let Err(f) = written {
        return fail(&f);
    }
    ExitCode::from(if outcome.violation { EXIT_VIOLATION } else { EXIT_OK })
}
