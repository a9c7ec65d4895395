//! Command line runner for the curve verification engine: residual scans
//! of curve profiles over arc length grids, built-in verification targets,
//! constant-curvature root searches, and expression round-trip checks.
//!
//! Exit codes: 0 when the requested check passes, 1 when it runs but fails,
//! 2 on configuration errors, 3 when evaluation leaves the domain of the
//! profile everywhere it was sampled.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use trikurv_core::casebook::verify::{verify_case, VerificationReport};
use trikurv_core::casebook::{CaseId, CasebookError};
use trikurv_core::dsl::{parse, tree_string, FunctionExpr};
use trikurv_core::kenmotsu::EtaModel;
use trikurv_core::residual::Residual;
use trikurv_core::solver::{
    find_helix_roots, grid_scan, CurveConfig, GridSpec, HelixProblem, ScanTable, SearchBox,
    SolverError,
};

const DEFAULT_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "trikurv")]
#[command(about = "Verifies curve profiles against the reduced tension systems")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Evaluate the residual system of a profile over its grid
    Residual {
        /// Path to a JSON profile
        #[arg(long)]
        config: PathBuf,

        /// Also write the rows to a CSV file
        #[arg(long)]
        csv: Option<PathBuf>,

        /// Pass tolerance, overriding TRIKURV_TOL and the profile
        #[arg(long)]
        tol: Option<f64>,
    },

    /// Run a built-in verification target by case name
    Verify {
        /// Case name, e.g. subcase-iv1 or legendre
        target: String,

        /// Pass tolerance, overriding TRIKURV_TOL
        #[arg(long)]
        tol: Option<f64>,
    },

    /// Search a box of constant curvature pairs for roots of the helix system
    SolveHelix {
        /// Path to a JSON profile; warping and scalar curvature must be
        /// constant over its grid
        #[arg(long)]
        config: PathBuf,

        /// Search box as k1_lo,k1_hi,k2_lo,k2_hi
        #[arg(long)]
        bounds: String,

        /// Number of quasi-random starts
        #[arg(long, default_value_t = 64)]
        starts: usize,

        /// Pass tolerance for the residuals at converged roots
        #[arg(long)]
        tol: Option<f64>,
    },

    /// Parse an expression and print its tree and round-tripped form
    ParseCheck {
        /// Expression in the grammar, e.g. "sqrt(5)/s"
        expr: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

/// Sorts solver failures into the configuration and domain exit classes.
fn classify(err: SolverError) -> CliError {
    match &err {
        SolverError::AllPointsSkipped { .. } | SolverError::Domain(_) => {
            CliError::Domain(err.to_string())
        }
        SolverError::Casebook(CasebookError::Domain(_)) => CliError::Domain(err.to_string()),
        _ => CliError::Config(err.to_string()),
    }
}

/// Either a grammar string or a plain number standing for a constant.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ExprField {
    Text(String),
    Number(f64),
}

impl ExprField {
    fn lower(&self, field: &str) -> Result<FunctionExpr, CliError> {
        match self {
            ExprField::Text(source) => parse(source)
                .map_err(|e| config_error(format!("field `{field}`: {e}"))),
            ExprField::Number(v) => {
                if v.is_finite() {
                    Ok(FunctionExpr::Const(*v))
                } else {
                    Err(config_error(format!("field `{field}`: non-finite constant")))
                }
            }
        }
    }
}

/// Contact field model: `"legendre"`, `{"explicit": [t, n, b]}`, or
/// `{"slant": theta}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum EtaField {
    Named(String),
    Explicit { explicit: [f64; 3] },
    Slant { slant: f64 },
}

impl EtaField {
    fn lower(&self) -> Result<EtaModel, CliError> {
        match self {
            EtaField::Named(name) if name == "legendre" => Ok(EtaModel::Legendre),
            EtaField::Named(name) => Err(config_error(format!(
                "field `eta`: unknown model `{name}`, expected \"legendre\", \
                 an explicit triple, or a slant angle"
            ))),
            EtaField::Explicit { explicit } => Ok(EtaModel::Explicit(*explicit)),
            EtaField::Slant { slant } => Ok(EtaModel::Slant(*slant)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridField {
    lo: f64,
    hi: f64,
    n: usize,
}

/// On-disk profile: curvature, torsion, warping, and scalar curvature as
/// expressions of arc length, the contact field model, an optional case
/// reduction, the grid, and an optional pass tolerance.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    k1: ExprField,
    k2: ExprField,
    f: ExprField,
    r: ExprField,
    eta: EtaField,
    #[serde(default)]
    case: Option<String>,
    grid: GridField,
    #[serde(default)]
    tol: Option<f64>,
}

impl RunConfig {
    fn lower(&self) -> Result<CurveConfig, CliError> {
        let case = match &self.case {
            Some(name) => Some(
                CaseId::from_str(name).map_err(|e| config_error(e.to_string()))?,
            ),
            None => None,
        };
        Ok(CurveConfig {
            k1: self.k1.lower("k1")?,
            k2: self.k2.lower("k2")?,
            f: self.f.lower("f")?,
            r: self.r.lower("r")?,
            eta: self.eta.lower()?,
            case,
            grid: GridSpec {
                lo: self.grid.lo,
                hi: self.grid.hi,
                n: self.grid.n,
            },
        })
    }
}

fn read_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{}: {e}", path.display())))
}

/// Pass tolerance with flag > environment > profile > default precedence.
fn resolve_tol(
    flag: Option<f64>,
    env: Option<String>,
    profile: Option<f64>,
) -> Result<f64, CliError> {
    let from_env = match env {
        Some(raw) => Some(raw.parse::<f64>().map_err(|_| {
            config_error(format!("TRIKURV_TOL: `{raw}` is not a number"))
        })?),
        None => None,
    };
    let tol = flag.or(from_env).or(profile).unwrap_or(DEFAULT_TOL);
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(config_error(format!("tolerance must be positive, got {tol}")))
    }
}

fn env_tol() -> Option<String> {
    std::env::var("TRIKURV_TOL").ok()
}

fn parse_bounds(raw: &str) -> Result<SearchBox, CliError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 4 {
        return Err(config_error(format!(
            "bounds must be four comma-separated numbers, got `{raw}`"
        )));
    }
    let mut vals = [0.0; 4];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            config_error(format!("bounds: `{part}` is not a number"))
        })?;
    }
    Ok(SearchBox {
        k1_lo: vals[0],
        k1_hi: vals[1],
        k2_lo: vals[2],
        k2_hi: vals[3],
    })
}

#[derive(Serialize)]
struct RowOut {
    s: f64,
    residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

#[derive(Serialize)]
struct ResidualReport {
    case: Option<CaseId>,
    tolerance: f64,
    rows: Vec<RowOut>,
    evaluated: usize,
    skipped: usize,
    passed: bool,
}

fn residual_report(table: ScanTable, case: Option<CaseId>, tol: f64) -> ResidualReport {
    let mut passed = true;
    let rows = table
        .rows
        .into_iter()
        .map(|row| {
            if row.skipped.is_none() {
                passed &= row.residuals.iter().all(|r| r.passes(tol));
            }
            RowOut {
                s: row.s,
                residuals: row.residuals,
                skipped: row.skipped,
            }
        })
        .collect();
    ResidualReport {
        case,
        tolerance: tol,
        rows,
        evaluated: table.evaluated,
        skipped: table.skipped,
        passed,
    }
}

/// Rows as CSV: arc length, one value and scale column per residual, and a
/// status column holding `ok` or the skip reason.
fn rows_to_csv(report: &ResidualReport) -> String {
    let names: Vec<&str> = report
        .rows
        .iter()
        .find(|row| row.skipped.is_none())
        .map(|row| row.residuals.iter().map(|r| r.name.as_str()).collect())
        .unwrap_or_default();
    let mut out = String::from("s");
    for name in &names {
        let _ = write!(out, ",{name},{name}.scale");
    }
    out.push_str(",status\n");
    for row in &report.rows {
        let _ = write!(out, "{:.16e}", row.s);
        match &row.skipped {
            None => {
                for residual in &row.residuals {
                    let _ = write!(out, ",{:.16e},{:.16e}", residual.value, residual.scale);
                }
                out.push_str(",ok\n");
            }
            Some(reason) => {
                for _ in &names {
                    out.push_str(",,");
                }
                let _ = writeln!(out, ",{}", reason.replace(',', ";"));
            }
        }
    }
    out
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| config_error(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

fn run_residual(
    config_path: &PathBuf,
    csv: Option<&PathBuf>,
    tol_flag: Option<f64>,
) -> Result<bool, CliError> {
    let raw = read_config(config_path)?;
    let tol = resolve_tol(tol_flag, env_tol(), raw.tol)?;
    let config = raw.lower()?;
    let table = grid_scan(&config).map_err(classify)?;
    let report = residual_report(table, config.case, tol);
    if let Some(path) = csv {
        fs::write(path, rows_to_csv(&report))
            .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(&report)?;
    Ok(report.passed)
}

fn run_verify(target: &str, tol_flag: Option<f64>) -> Result<bool, CliError> {
    let case = CaseId::from_str(target).map_err(|e| config_error(e.to_string()))?;
    let tol = resolve_tol(tol_flag, env_tol(), None)?;
    let report: VerificationReport = verify_case(case, tol).map_err(classify)?;
    emit(&report)?;
    Ok(report.passed)
}

#[derive(Serialize)]
struct RootOut {
    k1: f64,
    k2: f64,
    residuals: Vec<Residual>,
    iterations: usize,
}

#[derive(Serialize)]
struct SolveReport {
    tolerance: f64,
    curvature_coefficient: f64,
    contact_coefficient: f64,
    roots: Vec<RootOut>,
    passed: bool,
}

fn run_solve_helix(
    config_path: &PathBuf,
    bounds: &str,
    starts: usize,
    tol_flag: Option<f64>,
) -> Result<bool, CliError> {
    let raw = read_config(config_path)?;
    let tol = resolve_tol(tol_flag, env_tol(), raw.tol)?;
    let config = raw.lower()?;
    let search = parse_bounds(bounds)?;
    let problem = HelixProblem::from_config(&config).map_err(classify)?;
    let roots = match find_helix_roots(&problem, &search, starts) {
        Ok(roots) => roots,
        Err(SolverError::NoConvergence) => Vec::new(),
        Err(err) => return Err(classify(err)),
    };
    let mut passed = !roots.is_empty();
    let roots = roots
        .into_iter()
        .map(|root| {
            passed &= root.residuals.iter().all(|r| r.passes(tol));
            RootOut {
                k1: root.k1,
                k2: root.k2,
                residuals: root.residuals.to_vec(),
                iterations: root.iterations,
            }
        })
        .collect();
    let report = SolveReport {
        tolerance: tol,
        curvature_coefficient: problem.a_parts.iter().sum(),
        contact_coefficient: problem.b_parts.iter().sum(),
        roots,
        passed,
    };
    emit(&report)?;
    Ok(report.passed)
}

#[derive(Serialize)]
struct ParseReport {
    input: String,
    printed: String,
    tree: String,
    round_trip: bool,
}

fn run_parse_check(source: &str) -> Result<bool, CliError> {
    let expr = parse(source).map_err(|e| config_error(e.to_string()))?;
    let printed = expr.to_string();
    let round_trip = parse(&printed).map(|back| back == expr).unwrap_or(false);
    let report = ParseReport {
        input: source.to_string(),
        printed,
        tree: tree_string(&expr),
        round_trip,
    };
    emit(&report)?;
    Ok(report.round_trip)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.command {
        Commands::Residual { config, csv, tol } => run_residual(config, csv.as_ref(), *tol),
        Commands::Verify { target, tol } => run_verify(target, *tol),
        Commands::SolveHelix {
            config,
            bounds,
            starts,
            tol,
        } => run_solve_helix(config, bounds, *starts, *tol),
        Commands::ParseCheck { expr } => run_parse_check(expr),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Domain(_) => ExitCode::from(3),
            }
        }
    }
}
