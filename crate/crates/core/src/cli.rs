//! Command-line front end.
//!
//! Every subcommand writes one document (JSON by default, CSV for tables) to
//! stdout or `--out`. Exit codes: 0 success, 1 hard-inequality violations
//! found by `verify`, 2 bad input.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cone::{cone_condition, ClassSpec};
use crate::error::Error;
use crate::families::{perturbed_disk, random_convex_body, random_hull, rectangle, regular_ngon};
use crate::functionals::{shape_functional, shape_report, FunctionalReport};
use crate::geometry::ConvexPolygon;
use crate::json::{self, fmt_f64};
use crate::optimizer::{minimize_functional, rect_scan, OptConfig, SearchSpace};
use crate::verification::{evaluate_corpus, mixed_corpus, CorpusOptions, DEFAULT_DELTA};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "ISOPERILAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "isoperilab", version, about = "Quantitative isoperimetric functionals of convex polygons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Functional report of a polygon.
    Eval {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Skip the Fraenkel asymmetry.
        #[arg(long)]
        no_fraenkel: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Interior cone condition of a polygon.
    ConeCheck {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        radius: f64,
        /// Use `R` as given instead of `R·√(|P|/π)`.
        #[arg(long)]
        absolute: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Closed form `a(l)` against the pipeline on a grid of `l`.
    RectScan {
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Hard inequalities and the empirical constant on a mixed corpus.
    Verify {
        /// Number of bodies; generator seeds are `seed..seed+count`.
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        /// Class radius for the diameter bound.
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        /// Random pairs for the triangle check (defaults to `count`).
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        fraenkel: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Simulated-annealing search for low `F` inside the class.
    Optimize {
        /// JSON configuration; flags override its fields.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        n_vertices: Option<usize>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, value_enum)]
        space: Option<Space>,
        /// Drop the per-iteration trace from the output.
        #[arg(long)]
        no_trace: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Emit a shape from one of the families.
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// Half short side (rectangle).
        #[arg(long, default_value_t = 0.5)]
        l: f64,
        /// Vertex count (ngon, perturbed) or sample count (hull, body).
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Perturbation amplitude (perturbed).
        #[arg(long, default_value_t = 0.05)]
        amplitude: f64,
        /// Class radius (body).
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Free,
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rectangle,
    Ngon,
    Hull,
    Body,
    Perturbed,
}

/// Failure of one invocation, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Violations(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_polygon(path: &PathBuf) -> Outcome<ConvexPolygon> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> Outcome<String> {
    json::to_string(value).map_err(|e| Failure::Input(format!("serialization: {e}")))
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Input(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn report_row(r: &FunctionalReport) -> Vec<String> {
    vec![
        fmt_f64(r.area),
        fmt_f64(r.perimeter),
        fmt_f64(r.diameter),
        fmt_f64(r.equivalent_radius),
        fmt_f64(r.deficit),
        fmt_f64(r.lambda_h),
        fmt_f64(r.lambda_h_center.x),
        fmt_f64(r.lambda_h_center.y),
        opt_cell(r.fraenkel),
        opt_cell(r.shape_functional),
        r.ball.to_string(),
    ]
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> Outcome<()> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Outcome<()> {
    match cmd {
        Command::Eval {
            input,
            no_fraenkel,
            output,
        } => {
            let p = read_polygon(&input)?;
            let r = if no_fraenkel { shape_functional(&p)? } else { shape_report(&p)? };
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&r)?,
                Format::Csv => csv_table(
                    &[
                        "area",
                        "perimeter",
                        "diameter",
                        "equivalent_radius",
                        "D",
                        "lambda_h",
                        "center_x",
                        "center_y",
                        "fraenkel",
                        "F",
                        "ball",
                    ],
                    [report_row(&r)],
                )?,
            };
            emit(&output, &text, stdout)
        }
        Command::ConeCheck {
            input,
            radius,
            absolute,
            output,
        } => {
            let p = read_polygon(&input)?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Failure::Input(format!("radius must be positive, got {radius}")));
            }
            let spec = ClassSpec {
                normalized: !absolute,
                ..ClassSpec::new(radius)
            };
            let r = cone_condition(&p, &spec);
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&r)?,
                Format::Csv => csv_table(
                    &["x", "y", "margin", "axis_x", "axis_y"],
                    r.checked_points.iter().map(|c| {
                        vec![
                            fmt_f64(c.point.x),
                            fmt_f64(c.point.y),
                            fmt_f64(c.margin),
                            opt_cell(c.direction.map(|d| d.x)),
                            opt_cell(c.direction.map(|d| d.y)),
                        ]
                    }),
                )?,
            };
            emit(&output, &text, stdout)
        }
        Command::RectScan { grid, output } => {
            let scan = rect_scan(&grid)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Json => to_json(&scan)?,
                Format::Csv => csv_table(
                    &["l", "a", "pipeline_F", "abs_diff"],
                    scan.rows
                        .iter()
                        .map(|r| vec![fmt_f64(r.l), fmt_f64(r.a), fmt_f64(r.pipeline_f), fmt_f64(r.abs_diff)]),
                )?,
            };
            emit(&output, &text, stdout)
        }
        Command::Verify {
            count,
            seed,
            delta,
            radius,
            pairs,
            fraenkel,
            output,
        } => {
            if count == 0 {
                return Err(Failure::Input("count must be at least 1".into()));
            }
            if !(delta > 0.0) || !(radius > 0.0) {
                return Err(Failure::Input("delta and radius must be positive".into()));
            }
            let corpus = mixed_corpus(seed..=seed + count - 1)?;
            let opts = CorpusOptions {
                delta,
                class_radius: radius,
                with_fraenkel: fraenkel,
                triangle_pairs: pairs.unwrap_or(count as usize),
                pair_seed: seed,
            };
            let (report, records) = evaluate_corpus(&corpus, &opts)?;
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => csv_table(
                    &["id", "D", "lambda_h", "fraenkel", "F", "in_class", "ratio", "diameter", "hard_violations"],
                    records.iter().map(|r| {
                        vec![
                            r.id.to_string(),
                            fmt_f64(r.deficit),
                            fmt_f64(r.lambda_h),
                            opt_cell(r.fraenkel),
                            opt_cell(r.shape_functional),
                            r.in_class.to_string(),
                            fmt_f64(r.ratio),
                            fmt_f64(r.diameter),
                            r.hard_violations.to_string(),
                        ]
                    }),
                )?,
            };
            emit(&output, &text, stdout)?;
            if report.violations > 0 {
                return Err(Failure::Violations(format!(
                    "{} hard-inequality violations in {} bodies",
                    report.violations, report.corpus_size
                )));
            }
            Ok(())
        }
        Command::Optimize {
            input,
            radius,
            seed,
            iterations,
            restarts,
            n_vertices,
            t0,
            gamma,
            sigma,
            space,
            no_trace,
            output,
        } => {
            let mut cfg = match &input {
                Some(path) => {
                    let text =
                        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
                }
                None => OptConfig::default(),
            };
            cfg.radius = radius.unwrap_or(cfg.radius);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.iterations = iterations.unwrap_or(cfg.iterations);
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.n_vertices = n_vertices.unwrap_or(cfg.n_vertices);
            cfg.t0 = t0.unwrap_or(cfg.t0);
            cfg.gamma = gamma.unwrap_or(cfg.gamma);
            cfg.sigma = sigma.unwrap_or(cfg.sigma);
            if let Some(s) = space {
                cfg.space = match s {
                    Space::Free => SearchSpace::Free,
                    Space::Rectangle => SearchSpace::Rectangle,
                };
            }
            let mut res = minimize_functional(&cfg)?;
            if no_trace {
                res.trace.clear();
            }
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&res)?,
                Format::Csv => csv_table(
                    &["iteration", "F"],
                    res.trace.iter().map(|t| vec![t.iteration.to_string(), fmt_f64(t.f)]),
                )?,
            };
            emit(&output, &text, stdout)
        }
        Command::Gen {
            family,
            l,
            n,
            seed,
            amplitude,
            radius,
            output,
        } => {
            let p = match family {
                Family::Rectangle => rectangle(l)?,
                Family::Ngon => regular_ngon(n)?,
                Family::Hull => random_hull(seed, n)?,
                Family::Body => random_convex_body(seed, n, radius)?,
                Family::Perturbed => perturbed_disk(n, amplitude, seed)?,
            };
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&p)?,
                Format::Csv => csv_table(
                    &["x", "y"],
                    p.vertices().iter().map(|v| vec![fmt_f64(v.x), fmt_f64(v.y)]),
                )?,
            };
            emit(&output, &text, stdout)
        }
    }
}

/// Parses `argv` (program name first) and runs it, writing the document to
/// `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let line = msg.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{line}");
                    2
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {}", msg.replace('\n', " "));
            2
        }
        Err(Failure::Violations(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run_with(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}

/// Entry point of the binary: sizes the thread pool from the environment and
/// runs the process arguments.
pub fn main_exit() -> i32 {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    run(std::env::args_os())
}
