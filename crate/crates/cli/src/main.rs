//! `infodist`: measures, regions, boundaries, optimal measurements and verification
//! suites from the command line.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on invalid input
//! or any error raised by the library. Thread count follows `RAYON_NUM_THREADS`.

mod output;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use infodist::region::{self, default_step, for_each_grid_point};
use infodist::verify;
use infodist::{
    classify_optimality, construct_measurement, measures, optimal_if, optimal_ir, Measurement,
    ParticleSet, PlaneKind, SingularSpectrum,
};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use output::{fmt12, report_json, sink, CsvOut};

#[derive(Parser)]
#[command(
    name = "infodist",
    version,
    about = "Information-disturbance trade-offs of quantum measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimalKind {
    #[value(name = "IF", alias = "if")]
    If,
    #[value(name = "IR", alias = "ir")]
    Ir,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Kkt,
    Oracle,
    Invariants,
}

#[derive(Subcommand)]
enum Command {
    /// Measures and auxiliary scalars of one spectrum.
    Measures {
        /// Comma-separated singular values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Expected dimension; must match the number of values when given.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every descending grid spectrum mapped onto one plane, as CSV.
    Region {
        #[arg(long)]
        d: usize,
        /// G-F, G-R, I-F or I-R.
        #[arg(long)]
        plane: PlaneKind,
        /// Grid step; defaults to 0.01 for d <= 6 and 0.02 above.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Declared upper and lower boundary curves, or one family with --k and --l.
    Boundary {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        plane: PlaneKind,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, requires = "l")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        l: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex hull of the swept region (the averaged region), counter-clockwise.
    Hull {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        plane: PlaneKind,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tangent point of the chord from P_d to the (1, d-1) curve.
    Tangent {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement on the upper boundary of the averaged I-F or I-R region.
    Optimal {
        #[arg(long, value_enum)]
        kind: OptimalKind,
        #[arg(long)]
        d: usize,
        /// Target average F (IF) or R (IR).
        #[arg(long)]
        target: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement reproducing a weighted set of spectra on average.
    Construct {
        /// JSON file: {"particles": [{"spectrum": [...], "mass": q}, ...]}.
        #[arg(long)]
        particles: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimality conditions met by a measurement.
    Classify {
        /// Measurement JSON as written by `optimal` or `construct`.
        #[arg(long)]
        measurement: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Monte-Carlo samples per spectrum (oracle suite).
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] infodist::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "invalid_input",
            CliError::Library(e) => match e {
                infodist::Error::InvalidSpectrum(_) => "invalid_spectrum",
                infodist::Error::Domain(_) => "domain",
                infodist::Error::UndefinedEfficiency => "undefined_efficiency",
                infodist::Error::IncompleteMeasurement { .. } => "incomplete_measurement",
                infodist::Error::NoTangentPoint(_) => "no_tangent_point",
                infodist::Error::AmbiguousTangent(_) => "ambiguous_tangent",
                infodist::Error::Unreliable(_) => "unreliable",
            },
            CliError::File { .. } | CliError::Io(_) => "io",
            CliError::Parse { .. } | CliError::Json(_) => "json",
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_values(raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .enumerate()
        .map(|(i, entry)| {
            let entry = entry.trim();
            entry.parse::<f64>().map_err(|_| {
                CliError::Input(format!(
                    "entry {} of --values ({entry:?}) is not a number",
                    i + 1
                ))
            })
        })
        .collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn step_for(d: usize, step: Option<f64>) -> f64 {
    step.unwrap_or_else(|| default_step(d))
}

fn cmd_measures(
    values: &str,
    d: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    let values = parse_values(values)?;
    if let Some(d) = d {
        if d != values.len() {
            return Err(CliError::Input(format!(
                "--d {d} does not match the {} values given",
                values.len()
            )));
        }
    }
    let s = SingularSpectrum::new(values)?;
    let m = measures(&s);
    let aux = s.aux();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                d: usize,
                values: &'a [f64],
                measures: infodist::MeasureVector,
                aux: infodist::AuxiliaryScalars,
            }
            let doc = Doc {
                d: s.d(),
                values: s.values(),
                measures: m,
                aux,
            };
            write_text(out, &report_json(&doc)?)
        }
        Format::Csv => {
            let mut csv = CsvOut::new(sink(out)?, &["quantity", "value"])?;
            let rows = [
                ("I", m.info_gain),
                ("G", m.estimation_fidelity),
                ("F", m.operation_fidelity),
                ("R", m.reversibility),
                ("p", m.outcome_probability),
                ("sigma_sq", aux.sigma_sq),
                ("tau", aux.tau),
                ("lambda_max", aux.lambda_max),
                ("lambda_min", aux.lambda_min),
                ("eta_d", aux.eta_d),
            ];
            for (name, value) in rows {
                csv.row([name.to_string(), fmt12(value)])?;
            }
            Ok(csv.finish()?)
        }
    }
}

fn cmd_region(d: usize, plane: PlaneKind, step: Option<f64>, out: Option<&Path>) -> CliResult<()> {
    let step = step_for(d, step);
    // Validate before the metadata line is written.
    region::grid_size(d, step)?;
    let mut csv = CsvOut::new(sink(out)?, &[plane.x_name(), plane.y_name(), "spectrum"])?;
    let mut failure = None;
    for_each_grid_point(d, step, |p| {
        if failure.is_some() {
            return;
        }
        let (x, y) = plane.project(&p.measures);
        let spectrum = output::join_spectrum(&p.values());
        if let Err(e) = csv.row([fmt12(x), fmt12(y), spectrum]) {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(csv.finish()?)
}

fn cmd_boundary(
    d: usize,
    plane: PlaneKind,
    samples: usize,
    family: Option<(usize, usize)>,
    out: Option<&Path>,
) -> CliResult<()> {
    let lines = match family {
        Some((k, l)) => vec![region::boundary_polyline(d, plane, k, l, samples)?],
        None => region::declared_boundaries(d, plane, samples)?,
    };
    let mut csv = CsvOut::new(
        sink(out)?,
        &["label", plane.x_name(), plane.y_name(), "spectrum"],
    )?;
    for line in &lines {
        for p in &line.points {
            csv.point(Some(&line.label), p)?;
        }
    }
    Ok(csv.finish()?)
}

fn cmd_hull(d: usize, plane: PlaneKind, step: Option<f64>, out: Option<&Path>) -> CliResult<()> {
    let hull = region::averaged_region(d, plane, step_for(d, step))?;
    let mut csv = CsvOut::new(sink(out)?, &[plane.x_name(), plane.y_name(), "spectrum"])?;
    for p in &hull.points {
        csv.point(None, p)?;
    }
    Ok(csv.finish()?)
}

fn cmd_optimal(kind: OptimalKind, d: usize, target: f64, out: Option<&Path>) -> CliResult<()> {
    let m = match kind {
        OptimalKind::If => optimal_if(d, target)?,
        OptimalKind::Ir => optimal_ir(d, target)?,
    };
    write_measurement(&m, out)
}

/// Measurement documents keep full precision so they read back bit for bit.
fn write_measurement(m: &Measurement, out: Option<&Path>) -> CliResult<()> {
    write_text(out, &serde_json::to_string_pretty(m)?)
}

fn cmd_classify(path: &Path, out: Option<&Path>) -> CliResult<()> {
    let m: Measurement = read_json(path)?;
    let conditions = classify_optimality(&m)?;
    let names: Vec<String> = conditions.iter().map(|c| c.to_string()).collect();
    let body = json!({ "d": m.d(), "outcomes": m.operators().len(), "conditions": names });
    write_text(out, &report_json(&body)?)
}

fn cmd_verify(suite: Suite, n: u64, seed: u64, out: Option<&Path>) -> CliResult<bool> {
    let report = match suite {
        Suite::Kkt => verify::kkt_suite()?,
        Suite::Oracle => verify::oracle_suite(n, seed)?,
        Suite::Invariants => verify::invariants_suite(seed),
    };
    write_text(out, &report_json(&report)?)?;
    Ok(report.passed)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Measures {
            values,
            d,
            format,
            out,
        } => cmd_measures(&values, d, format, out.as_deref())?,
        Command::Region {
            d,
            plane,
            step,
            out,
        } => cmd_region(d, plane, step, out.as_deref())?,
        Command::Boundary {
            d,
            plane,
            samples,
            k,
            l,
            out,
        } => cmd_boundary(d, plane, samples, k.zip(l), out.as_deref())?,
        Command::Hull {
            d,
            plane,
            step,
            out,
        } => cmd_hull(d, plane, step, out.as_deref())?,
        Command::Tangent { d, out } => {
            write_text(out.as_deref(), &report_json(&region::tangent_point(d)?)?)?
        }
        Command::Optimal {
            kind,
            d,
            target,
            out,
        } => cmd_optimal(kind, d, target, out.as_deref())?,
        Command::Construct { particles, out } => {
            let set: ParticleSet = read_json(&particles)?;
            write_measurement(&construct_measurement(&set), out.as_deref())?
        }
        Command::Classify { measurement, out } => cmd_classify(&measurement, out.as_deref())?,
        Command::Verify {
            suite,
            n,
            seed,
            out,
        } => return cmd_verify(suite, n, seed, out.as_deref()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let diag = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{diag}");
            ExitCode::from(2)
        }
    }
}
