//! The `asym` command line.
//!
//! Exit codes: 0 success, 1 failed verification suite, 2 invalid document or
//! flags, 3 computation or output error. Nothing is written to stdout on a
//! nonzero exit, except the error envelope of `constants --json`.

pub mod doc;
pub mod plot;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymmetry::{constant_with, AsymmetryReport, ConstantOptions, Method, Which};
use crate::exec::Exec;
use crate::experiments::{
    run_bound_and_sharpness, run_continuity, run_duality, run_invariance, run_sandwich,
    ExperimentResult,
};
use crate::gauge::{polygon_dual, GaugeContext};
pub use doc::{to_json, BodyDocument, BodyKind, ExactFloats};

#[derive(Debug, Parser)]
#[command(
    name = "asym",
    version,
    about = "Gauges, symplectic duals and asymmetry constants of planar convex bodies"
)]
struct Cli {
    /// Run every batch loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymmetry constants of a body document.
    Constants {
        body: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        which: WhichArg,
        /// Samples per piece on rounded bodies.
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// The symplectic dual of a polygon document, as a polygon document.
    Dual { body: PathBuf },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of trials (duality, invariance, sandwich).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long, env = "ASYM_SEED", default_value_t = 0)]
        seed: u64,
        /// Where to write the result JSON; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hexagon parameters for the bound suite.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 10.0, 50.0])]
        alphas: Vec<f64>,
        /// Rounding radius for the bound suite.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Plot data from a result file or a body document.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Profile function for body documents.
        #[arg(long, value_enum, default_value = "out")]
        which: ProfileArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WhichArg {
    Out,
    In,
    Hat,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Out,
    In,
    Hat,
}

impl ProfileArg {
    fn which(self) -> Which {
        match self {
            ProfileArg::Out => Which::Out,
            ProfileArg::In => Which::In,
            ProfileArg::Hat => Which::HatOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Duality,
    Invariance,
    Bound,
    Sandwich,
    Continuity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

/// A command that did not succeed.
#[derive(Debug)]
enum Failure {
    /// Unreadable or invalid input.
    Input(String),
    Compute(String),
    /// The suite ran but did not pass; carries the report.
    Suite(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Suite(_) => 1,
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Compute(m) | Failure::Suite(m) => m,
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(text.as_bytes());
                0
            } else {
                let _ = stderr.write_all(text.as_bytes());
                2
            };
        }
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let json_envelope = matches!(cli.command, Command::Constants { json: true, .. });
    let outcome = match cli.command {
        Command::Constants {
            body,
            which,
            samples,
            json,
            csv,
        } => cmd_constants(&body, which, samples as usize, json, csv, exec),
        Command::Dual { body } => cmd_dual(&body),
        Command::Verify {
            suite,
            trials,
            seed,
            out,
            alphas,
            eps,
        } => cmd_verify(
            suite,
            trials.map(|t| t as usize),
            seed,
            out.as_deref(),
            &alphas,
            eps,
            exec,
        ),
        Command::Plot {
            input,
            format,
            out,
            which,
        } => cmd_plot(&input, format, out.as_deref(), which.which(), exec),
    };
    match outcome {
        Ok(text) => match stdout.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                3
            }
        },
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message());
            if json_envelope && f.code() != 1 {
                #[derive(Serialize)]
                struct Envelope<'a> {
                    error: Inner<'a>,
                }
                #[derive(Serialize)]
                struct Inner<'a> {
                    code: i32,
                    message: &'a str,
                }
                let env = Envelope {
                    error: Inner {
                        code: f.code(),
                        message: f.message(),
                    },
                };
                let _ = writeln!(stdout, "{}", to_json(&env));
            }
            f.code()
        }
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("error: cannot read {}: {e}", path.display())))
}

fn load_document(path: &Path) -> std::result::Result<(BodyDocument, GaugeContext), Failure> {
    let text = read_text(path)?;
    let doc = BodyDocument::parse(&text).map_err(|e| {
        Failure::Input(format!(
            "error: invalid body document {}: {e}",
            path.display()
        ))
    })?;
    let ctx = doc
        .context()
        .map_err(|e| Failure::Input(format!("error: invalid body in {}: {e}", path.display())))?;
    Ok((doc, ctx))
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    let fail = |e: std::io::Error| {
        Failure::Compute(format!("error: cannot write {}: {e}", path.display()))
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn cmd_constants(
    path: &Path,
    which: WhichArg,
    samples: usize,
    json: bool,
    csv: bool,
    exec: Exec,
) -> Outcome {
    let (doc, ctx) = load_document(path)?;
    let list: &[Which] = match which {
        WhichArg::Out => &[Which::Out],
        WhichArg::In => &[Which::In],
        WhichArg::Hat => &[Which::HatOut],
        WhichArg::All => &Which::ALL,
    };
    let opts = ConstantOptions {
        samples_per_piece: samples,
        exec,
        ..ConstantOptions::default()
    };
    let reports = list
        .iter()
        .map(|&w| constant_with(&ctx, w, &opts))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| Failure::Compute(format!("error: {e}")))?;

    if json {
        #[derive(Serialize)]
        struct Out<'a> {
            body: &'a BodyDocument,
            reports: &'a [AsymmetryReport],
        }
        return Ok(format!(
            "{}\n",
            to_json(&Out {
                body: &doc,
                reports: &reports
            })
        ));
    }
    let mut out = String::new();
    if csv {
        out.push_str(
            "which,value,witness_angle,witness_x,witness_y,witness_value,method,pieces,tolerance\n",
        );
        for r in &reports {
            let (method, pieces) = method_parts(&r.method);
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
                r.which.name(),
                r.value,
                r.witness.angle,
                r.witness.point.x,
                r.witness.point.y,
                r.witness.value,
                method,
                pieces,
                r.tolerance
            );
        }
    } else {
        for r in &reports {
            let (method, pieces) = method_parts(&r.method);
            let _ = writeln!(
                out,
                "{:<10} {:.16e}  witness angle {:.16e} point ({:.16e}, {:.16e}) f {:.16e}  method {} ({} pieces)  tolerance {:.3e}",
                r.which.name(),
                r.value,
                r.witness.angle,
                r.witness.point.x,
                r.witness.point.y,
                r.witness.value,
                method,
                pieces,
                r.tolerance
            );
        }
    }
    Ok(out)
}

fn method_parts(m: &Method) -> (&'static str, usize) {
    match *m {
        Method::ExactPiecewise { pieces } => ("exact_piecewise", pieces),
        Method::Sampled { pieces, .. } => ("sampled", pieces),
    }
}

fn cmd_dual(path: &Path) -> Outcome {
    let (doc, ctx) = load_document(path)?;
    let poly = ctx.body().as_polygon().ok_or_else(|| {
        Failure::Input(format!(
            "error: {}: dual requires a polygon document",
            path.display()
        ))
    })?;
    let dual =
        polygon_dual(poly, ctx.form()).map_err(|e| Failure::Compute(format!("error: {e}")))?;
    Ok(format!(
        "{}\n",
        to_json(&BodyDocument::polygon(&dual, doc.omega_scale))
    ))
}

/// Runs a suite by name with the given trial count (suite default when `None`).
pub fn run_suite(
    suite: Suite,
    trials: Option<usize>,
    seed: u64,
    alphas: &[f64],
    eps: f64,
    exec: Exec,
) -> ExperimentResult {
    match suite {
        Suite::Duality => run_duality(trials.unwrap_or(100), seed, exec),
        Suite::Invariance => run_invariance(trials.unwrap_or(20), seed, exec),
        Suite::Bound => run_bound_and_sharpness(alphas, eps, exec),
        Suite::Sandwich => run_sandwich(trials.unwrap_or(50), seed, exec),
        Suite::Continuity => run_continuity(seed, exec),
    }
}

fn summary(r: &ExperimentResult) -> String {
    let mut s = format!(
        "{}: {} (max residual {:.3e}, tolerance {:.3e}, {} records, {:.2}s)\n",
        r.name,
        if r.pass { "pass" } else { "FAIL" },
        r.max_residual,
        r.tolerance,
        r.trials,
        r.runtime_seconds
    );
    for f in &r.failures {
        let _ = writeln!(s, "  {f}");
    }
    s
}

fn cmd_verify(
    suite: Suite,
    trials: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    alphas: &[f64],
    eps: f64,
    exec: Exec,
) -> Outcome {
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err(Failure::Input(
            "error: --alphas must be positive and finite".into(),
        ));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Failure::Input(
            "error: --eps must be positive and finite".into(),
        ));
    }
    let result = run_suite(suite, trials, seed, alphas, eps, exec);
    let json = format!("{}\n", to_json(&result));
    if let Some(path) = out {
        write_atomic(path, &json)?;
    }
    if !result.pass {
        let mut report = summary(&result);
        for r in result
            .records
            .iter()
            .filter(|r| !(r.residual <= result.tolerance))
        {
            let _ = writeln!(
                report,
                "  trial {} seed {}: residual {:.3e}",
                r.trial, r.seed, r.residual
            );
        }
        return Err(Failure::Suite(report.trim_end().to_string()));
    }
    Ok(if out.is_some() {
        summary(&result)
    } else {
        json
    })
}

fn cmd_plot(path: &Path, format: Format, out: Option<&Path>, which: Which, exec: Exec) -> Outcome {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("error: malformed input {}: {e}", path.display())))?;
    let fig = if value.get("series").is_some() {
        let r: ExperimentResult = serde_json::from_value(value).map_err(|e| {
            Failure::Input(format!(
                "error: malformed result file {}: {e}",
                path.display()
            ))
        })?;
        plot::experiment_figure(&r)
    } else {
        let (_, ctx) = load_document(path)?;
        plot::profile(&ctx, which, exec).map_err(|e| Failure::Compute(format!("error: {e}")))?
    };
    let rendered = match format {
        Format::Csv => plot::to_csv(&fig),
        Format::Svg => plot::to_svg(&fig),
    };
    match out {
        Some(p) => {
            write_atomic(p, &rendered)?;
            Ok(String::new())
        }
        None => Ok(rendered),
    }
}
