//! Grid evaluation of configured curve profiles and a root finder for
//! constant-curvature solutions.
//!
//! [`grid_scan`] walks an arc length grid, builds jets from the configured
//! expressions, and evaluates the general system plus any requested case
//! reduction at every admissible point. Points where the profile has a pole,
//! leaves its domain, or loses positivity of the curvature are skipped with
//! a recorded reason; a violated case hypothesis is an error.
//!
//! [`find_helix_roots`] searches a box of constant curvature pairs for roots
//! of the two-equation helix system with a damped Newton iteration from
//! Halton starts. When the second equation vanishes identically over the box
//! the search drops to the first equation alone, either along a fixed
//! torsion line or augmented with the diagonal constraint.

use thiserror::Error;

use crate::casebook::{case_residuals, helix_system, CaseId, CasebookError, NEAR_POLE_COS};
use crate::dsl::{eval, tan_arguments, DomainError, FunctionExpr};
use crate::jets::DerivTower;
use crate::kenmotsu::{coeff_a_parts, coeff_b_parts, eta_from_model, EtaModel, ManifoldParams};
use crate::residual::Residual;
use crate::tension::{residual_system, CurvePoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("all {n} grid points were skipped, last reason: {last_reason}")]
    AllPointsSkipped { n: usize, last_reason: String },
    #[error("invalid search box: {reason}")]
    InvalidBox { reason: String },
    #[error("the number of starts must be positive")]
    NoStarts,
    #[error("{name} must be constant over the grid for the helix search, spread = {spread:.3e}")]
    NonConstantCoefficient { name: &'static str, spread: f64 },
    #[error("no root converged from any start")]
    NoConvergence,
    #[error(transparent)]
    Casebook(#[from] CasebookError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Uniform arc length grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// A curve profile: curvature, torsion, warping, and scalar curvature as
/// functions of arc length, a contact field model, an optional case
/// reduction to evaluate alongside the general system, and the grid.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub k1: FunctionExpr,
    pub k2: FunctionExpr,
    pub f: FunctionExpr,
    pub r: FunctionExpr,
    pub eta: EtaModel,
    pub case: Option<CaseId>,
    pub grid: GridSpec,
}

/// The grid samples. The interior points are computed multiply-then-divide
/// so representable fractions of the span land exactly.
pub fn grid_points(spec: &GridSpec) -> Result<Vec<f64>, SolverError> {
    if !spec.lo.is_finite() || !spec.hi.is_finite() {
        return Err(SolverError::InvalidGrid {
            reason: format!("bounds must be finite, got [{}, {}]", spec.lo, spec.hi),
        });
    }
    if spec.lo > spec.hi {
        return Err(SolverError::InvalidGrid {
            reason: format!("lower bound {} exceeds upper bound {}", spec.lo, spec.hi),
        });
    }
    if spec.n == 0 {
        return Err(SolverError::InvalidGrid {
            reason: "at least one point is required".to_string(),
        });
    }
    if spec.n == 1 {
        return Ok(vec![spec.lo]);
    }
    let span = spec.hi - spec.lo;
    let last = (spec.n - 1) as f64;
    Ok((0..spec.n)
        .map(|i| spec.lo + (i as f64 * span) / last)
        .collect())
}

/// One grid sample: either a full set of residuals or a skip reason.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub s: f64,
    pub residuals: Vec<Residual>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub evaluated: usize,
    pub skipped: usize,
}

enum PointOutcome {
    Residuals(Vec<Residual>),
    Skip(String),
}

struct Towers {
    k1: DerivTower,
    k2: DerivTower,
    f: DerivTower,
}

fn scan_point(config: &CurveConfig, towers: &Towers, s: f64) -> Result<PointOutcome, SolverError> {
    for expr in [&config.k1, &config.k2, &config.f, &config.r] {
        for arg in tan_arguments(expr) {
            match eval(arg, s) {
                Ok(v) => {
                    if v.cos().abs() <= NEAR_POLE_COS {
                        return Ok(PointOutcome::Skip(format!(
                            "tangent pole in the profile, |cos| = {:.3e}",
                            v.cos().abs()
                        )));
                    }
                }
                Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
            }
        }
    }
    let k1 = match towers.k1.jet(s) {
        Ok(j) => j,
        Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
    };
    let k2 = match towers.k2.jet(s) {
        Ok(j) => j,
        Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
    };
    let fj = match towers.f.jet(s) {
        Ok(j) => j,
        Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
    };
    let rv = match eval(&config.r, s) {
        Ok(v) => v,
        Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
    };
    if !(k1.d0() > 0.0) {
        return Ok(PointOutcome::Skip(format!(
            "non-positive curvature k1 = {}",
            k1.d0()
        )));
    }
    let eta = match eta_from_model(&config.eta, fj.d0(), k1.d0()) {
        Ok(e) => e,
        Err(e) => return Ok(PointOutcome::Skip(e.to_string())),
    };
    let params = ManifoldParams::new(fj, rv, eta).map_err(CasebookError::from)?;
    let pt = CurvePoint::new(s, k1, k2, params).map_err(CasebookError::from)?;
    let mut residuals: Vec<Residual> = residual_system(&pt).into();
    if let Some(case) = config.case {
        residuals.extend(case_residuals(case, &pt)?);
    }
    Ok(PointOutcome::Residuals(residuals))
}

/// Evaluates the configured profile over its grid.
pub fn grid_scan(config: &CurveConfig) -> Result<ScanTable, SolverError> {
    let points = grid_points(&config.grid)?;
    let towers = Towers {
        k1: DerivTower::new(&config.k1),
        k2: DerivTower::truncated(&config.k2, 3),
        f: DerivTower::truncated(&config.f, 1),
    };
    let mut rows = Vec::with_capacity(points.len());
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut last_reason = String::new();
    for &s in &points {
        match scan_point(config, &towers, s)? {
            PointOutcome::Residuals(residuals) => {
                evaluated += 1;
                rows.push(ScanRow {
                    s,
                    residuals,
                    skipped: None,
                });
            }
            PointOutcome::Skip(reason) => {
                skipped += 1;
                last_reason = reason.clone();
                rows.push(ScanRow {
                    s,
                    residuals: Vec::new(),
                    skipped: Some(reason),
                });
            }
        }
    }
    if evaluated == 0 {
        return Err(SolverError::AllPointsSkipped {
            n: points.len(),
            last_reason,
        });
    }
    Ok(ScanTable {
        rows,
        evaluated,
        skipped,
    })
}

/// Rectangle of constant curvature pairs to search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub k1_lo: f64,
    pub k1_hi: f64,
    pub k2_lo: f64,
    pub k2_hi: f64,
}

impl SearchBox {
    fn validate(&self) -> Result<(), SolverError> {
        let vals = [self.k1_lo, self.k1_hi, self.k2_lo, self.k2_hi];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidBox {
                reason: "bounds must be finite".to_string(),
            });
        }
        if !(self.k1_lo > 0.0) {
            return Err(SolverError::InvalidBox {
                reason: format!("curvature lower bound must be positive, got {}", self.k1_lo),
            });
        }
        if self.k1_lo > self.k1_hi || self.k2_lo > self.k2_hi {
            return Err(SolverError::InvalidBox {
                reason: "lower bounds must not exceed upper bounds".to_string(),
            });
        }
        Ok(())
    }

    fn contains(&self, k1: f64, k2: f64) -> bool {
        let m = 1e-9;
        k1 >= self.k1_lo - m && k1 <= self.k1_hi + m && k2 >= self.k2_lo - m && k2 <= self.k2_hi + m
    }
}

/// Contact field for the helix search: fixed components, or the slant model
/// re-evaluated at every curvature iterate.
#[derive(Debug, Clone)]
pub enum HelixEtaSpec {
    Fixed([f64; 3]),
    Slant { theta: f64, f: f64 },
}

/// Constant-coefficient data driving the helix system.
#[derive(Debug, Clone)]
pub struct HelixProblem {
    pub a_parts: [f64; 3],
    pub b_parts: [f64; 3],
    pub eta: HelixEtaSpec,
}

fn check_constant(name: &'static str, vals: &[f64]) -> Result<(), SolverError> {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread <= 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
        Ok(())
    } else {
        Err(SolverError::NonConstantCoefficient { name, spread })
    }
}

impl HelixProblem {
    /// Extracts constant ambient data from a profile, verifying that the
    /// curvature coefficients (and the warping value, in slant mode) do not
    /// vary over the grid.
    pub fn from_config(config: &CurveConfig) -> Result<HelixProblem, SolverError> {
        let points = grid_points(&config.grid)?;
        let f_tower = DerivTower::truncated(&config.f, 1);
        let mut a_vals = Vec::with_capacity(points.len());
        let mut b_vals = Vec::with_capacity(points.len());
        let mut f_vals = Vec::with_capacity(points.len());
        let mut first_parts: Option<([f64; 3], [f64; 3])> = None;
        for &s in &points {
            let fj = f_tower.jet(s)?;
            let rv = eval(&config.r, s)?;
            let params = ManifoldParams::new(fj, rv, [1.0, 0.0, 0.0]).map_err(CasebookError::from)?;
            let ap = coeff_a_parts(&params);
            let bp = coeff_b_parts(&params);
            a_vals.push(ap.iter().sum());
            b_vals.push(bp.iter().sum());
            f_vals.push(fj.d0());
            if first_parts.is_none() {
                first_parts = Some((ap, bp));
            }
        }
        check_constant("A", &a_vals)?;
        check_constant("B", &b_vals)?;
        let eta = match config.eta {
            EtaModel::Slant(theta) => {
                check_constant("f", &f_vals)?;
                HelixEtaSpec::Slant {
                    theta,
                    f: f_vals[0],
                }
            }
            ref model => {
                let eta = eta_from_model(model, f_vals[0], 1.0).map_err(CasebookError::from)?;
                HelixEtaSpec::Fixed(eta)
            }
        };
        let (a_parts, b_parts) = first_parts.expect("grid has at least one point");
        Ok(HelixProblem {
            a_parts,
            b_parts,
            eta,
        })
    }

    /// Helix system residuals at one curvature pair.
    pub fn residuals(&self, k1: f64, k2: f64) -> Result<[Residual; 2], CasebookError> {
        let eta = match &self.eta {
            HelixEtaSpec::Fixed(e) => *e,
            HelixEtaSpec::Slant { theta, f } => eta_from_model(&EtaModel::Slant(*theta), *f, k1)?,
        };
        Ok(helix_system(k1, k2, self.a_parts, self.b_parts, eta))
    }
}

/// A converged root of the helix system.
#[derive(Debug, Clone)]
pub struct RootResult {
    pub k1: f64,
    pub k2: f64,
    pub residuals: [Residual; 2],
    pub iterations: usize,
}

fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 30;
const NEWTON_TOL: f64 = 1e-11;
const FD_STEP: f64 = 1e-7;

fn probe_degenerate(problem: &HelixProblem, search: &SearchBox) -> bool {
    let mut any = false;
    for i in 0..3 {
        for j in 0..3 {
            let k1 = search.k1_lo + (i as f64 / 2.0) * (search.k1_hi - search.k1_lo);
            let k2 = search.k2_lo + (j as f64 / 2.0) * (search.k2_hi - search.k2_lo);
            if let Ok([_, eq2]) = problem.residuals(k1, k2) {
                any = true;
                if eq2.value.abs() > 1e-12 * (1.0 + eq2.scale) {
                    return false;
                }
            }
        }
    }
    any
}

fn newton_2d<F>(f: &F, x0: [f64; 2]) -> Option<(f64, f64, usize)>
where
    F: Fn([f64; 2]) -> Option<([f64; 2], f64)>,
{
    let mut x = x0;
    for it in 0..NEWTON_MAX_ITER {
        let (fx, scale) = f(x)?;
        let norm = fx[0].abs().max(fx[1].abs());
        if norm <= NEWTON_TOL * (1.0 + scale) {
            return Some((x[0], x[1], it));
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = FD_STEP * (1.0 + x[j].abs());
            let mut xp = x;
            xp[j] += h;
            let mut xm = x;
            xm[j] -= h;
            let (fp, _) = f(xp)?;
            let (fm, _) = f(xm)?;
            for i in 0..2 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let jnorm = jac
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        if det.abs() <= 1e-14 * jnorm * jnorm + f64::MIN_POSITIVE {
            return None;
        }
        let step = [
            (jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
            (jac[0][0] * fx[1] - jac[1][0] * fx[0]) / det,
        ];
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let cand = [x[0] - t * step[0], x[1] - t * step[1]];
            if let Some((fc, cs)) = f(cand) {
                let cn = fc[0].abs().max(fc[1].abs());
                if cn < norm || cn <= NEWTON_TOL * (1.0 + cs) {
                    x = cand;
                    accepted = true;
                    break;
                }
            }
            t /= 2.0;
        }
        if !accepted {
            return None;
        }
    }
    None
}

fn newton_1d(problem: &HelixProblem, k1_start: f64, k2: f64) -> Option<(f64, f64, usize)> {
    let g = |k1: f64| -> Option<(f64, f64)> {
        let [eq1, _] = problem.residuals(k1, k2).ok()?;
        Some((eq1.value, eq1.scale))
    };
    let mut x = k1_start;
    for it in 0..NEWTON_MAX_ITER {
        let (gx, scale) = g(x)?;
        if gx.abs() <= NEWTON_TOL * (1.0 + scale) {
            return Some((x, k2, it));
        }
        let h = FD_STEP * (1.0 + x.abs());
        let (gp, _) = g(x + h)?;
        let (gm, _) = g(x - h)?;
        let deriv = (gp - gm) / (2.0 * h);
        if deriv.abs() <= f64::MIN_POSITIVE * 1e10 {
            return None;
        }
        let step = gx / deriv;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let cand = x - t * step;
            if let Some((gc, cs)) = g(cand) {
                if gc.abs() < gx.abs() || gc.abs() <= NEWTON_TOL * (1.0 + cs) {
                    x = cand;
                    accepted = true;
                    break;
                }
            }
            t /= 2.0;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Searches the box for roots of the helix system from `starts` Halton
/// start points. Converged roots are filtered to the box and deduplicated;
/// the result is sorted by curvature then torsion.
pub fn find_helix_roots(
    problem: &HelixProblem,
    search: &SearchBox,
    starts: usize,
) -> Result<Vec<RootResult>, SolverError> {
    search.validate()?;
    if starts == 0 {
        return Err(SolverError::NoStarts);
    }
    let degenerate = probe_degenerate(problem, search);
    let fixed_torsion = search.k2_lo == search.k2_hi;

    let full = |x: [f64; 2]| -> Option<([f64; 2], f64)> {
        let [eq1, eq2] = problem.residuals(x[0], x[1]).ok()?;
        Some(([eq1.value, eq2.value], eq1.scale.max(eq2.scale)))
    };
    let diagonal = |x: [f64; 2]| -> Option<([f64; 2], f64)> {
        let [eq1, _] = problem.residuals(x[0], x[1]).ok()?;
        let scale = eq1.scale.max(x[0].abs()).max(x[1].abs());
        Some(([eq1.value, x[0] - x[1]], scale))
    };

    let mut roots: Vec<RootResult> = Vec::new();
    for i in 0..starts {
        let u = halton(i + 1, 2);
        let v = halton(i + 1, 3);
        let x0 = [
            search.k1_lo + u * (search.k1_hi - search.k1_lo),
            search.k2_lo + v * (search.k2_hi - search.k2_lo),
        ];
        let converged = if degenerate {
            if fixed_torsion {
                newton_1d(problem, x0[0], search.k2_lo)
            } else {
                newton_2d(&diagonal, x0)
            }
        } else {
            newton_2d(&full, x0)
        };
        let Some((k1, k2, iterations)) = converged else {
            continue;
        };
        if !search.contains(k1, k2) {
            continue;
        }
        if roots
            .iter()
            .any(|r| (r.k1 - k1).abs() <= 1e-6 && (r.k2 - k2).abs() <= 1e-6)
        {
            continue;
        }
        let residuals = problem.residuals(k1, k2)?;
        roots.push(RootResult {
            k1,
            k2,
            residuals,
            iterations,
        });
    }
    if roots.is_empty() {
        return Err(SolverError::NoConvergence);
    }
    roots.sort_by(|a, b| {
        (a.k1, a.k2)
            .partial_cmp(&(b.k1, b.k2))
            .expect("finite root coordinates")
    });
    Ok(roots)
}
