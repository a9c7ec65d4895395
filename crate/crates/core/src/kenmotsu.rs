//! Ambient manifold data and the curvature operator.
//!
//! The ambient space is a 3-dimensional manifold whose curvature tensor is
//! determined by the scalar curvature r, a warping function f with its first
//! derivative, and the contact direction along the curve. Writing
//! `A = r/2 + 2(f^2 + f')` and `B = r/2 + 3(f^2 + f')`, the curvature
//! operator acts on frame triples as
//!
//! ```text
//! R(X, Y)Z = A (g(Y,Z) X - g(X,Z) Y)
//!          - B (g(Y,Z) eta(X) xi - g(X,Z) eta(Y) xi
//!               - eta(X) eta(Z) Y + eta(Y) eta(Z) X)
//! ```
//!
//! with xi the contact vector field and eta its metric dual. All vectors are
//! frame coefficient triples, so eta(X) is a plain dot product.

use thiserror::Error;

use crate::jets::Jet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KenmotsuError {
    #[error("contact direction has norm {norm}, expected a unit vector")]
    NonUnitEta { norm: f64 },
    #[error("warping jet has usable order {usable}, the curvature coefficients need order 1")]
    WarpingOrderTooLow { usable: usize },
    #[error("slant contact model needs positive curvature, got k1 = {k1}")]
    NonPositiveSlantCurvature { k1: f64 },
    #[error(
        "slant contact model inadmissible at k1 = {k1}, f = {f}, theta = {theta}: \
         radicand {radicand} is negative"
    )]
    SlantInadmissible {
        k1: f64,
        f: f64,
        theta: f64,
        radicand: f64,
    },
}

/// Pointwise ambient data along the curve: warping jet, scalar curvature,
/// and the contact direction expressed in the frame (T, N, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldParams {
    f: Jet,
    r: f64,
    eta: [f64; 3],
}

/// Largest deviation from unit norm tolerated for a contact direction.
pub const ETA_UNIT_TOL: f64 = 1e-9;

impl ManifoldParams {
    /// Validates that the warping jet carries a first derivative and that
    /// the contact direction is unit within [`ETA_UNIT_TOL`].
    pub fn new(f: Jet, r: f64, eta: [f64; 3]) -> Result<Self, KenmotsuError> {
        if f.usable_order() < 1 {
            return Err(KenmotsuError::WarpingOrderTooLow {
                usable: f.usable_order(),
            });
        }
        let norm = dot(eta, eta).sqrt();
        if (norm - 1.0).abs() > ETA_UNIT_TOL {
            return Err(KenmotsuError::NonUnitEta { norm });
        }
        Ok(ManifoldParams { f, r, eta })
    }

    pub fn f(&self) -> Jet {
        self.f
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eta(&self) -> [f64; 3] {
        self.eta
    }

    /// The combination f^2 + f' that both curvature coefficients share.
    pub fn fpf(&self) -> f64 {
        let f0 = self.f.d0();
        f0 * f0 + self.f.d(1).expect("validated usable order 1")
    }
}

/// Coefficient of the constant-curvature part of the curvature operator.
pub fn coeff_a(p: &ManifoldParams) -> f64 {
    p.r() / 2.0 + 2.0 * p.fpf()
}

/// Coefficient of the contact correction part of the curvature operator.
pub fn coeff_b(p: &ManifoldParams) -> f64 {
    p.r() / 2.0 + 3.0 * p.fpf()
}

/// The summands of [`coeff_a`], kept apart so residual scales stay honest
/// when the coefficient itself cancels.
pub fn coeff_a_parts(p: &ManifoldParams) -> [f64; 3] {
    let f0 = p.f().d0();
    let f1 = p.f().d(1).expect("validated usable order 1");
    [p.r() / 2.0, 2.0 * f0 * f0, 2.0 * f1]
}

/// The summands of [`coeff_b`]; see [`coeff_a_parts`].
pub fn coeff_b_parts(p: &ManifoldParams) -> [f64; 3] {
    let f0 = p.f().d0();
    let f1 = p.f().d(1).expect("validated usable order 1");
    [p.r() / 2.0, 3.0 * f0 * f0, 3.0 * f1]
}

/// How the contact direction along the curve is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaModel {
    /// Fixed frame coefficients, normalized on use.
    Explicit([f64; 3]),
    /// Slant angle theta: the tangent keeps a constant angle with xi and the
    /// remaining components follow from the structure equations.
    Slant(f64),
    /// Tangent orthogonal to xi with the contact direction opposite the
    /// principal normal.
    Legendre,
}

/// Deviation from unit norm tolerated for explicit contact input before it
/// is rejected rather than normalized.
pub const ETA_INPUT_TOL: f64 = 1e-6;

/// Resolves a contact model to frame coefficients at one point of the curve.
///
/// The slant model needs the local warping value and curvature; the other
/// models ignore them.
pub fn eta_from_model(model: &EtaModel, f: f64, k1: f64) -> Result<[f64; 3], KenmotsuError> {
    match model {
        EtaModel::Explicit(e) => {
            let norm = dot(*e, *e).sqrt();
            if (norm - 1.0).abs() > ETA_INPUT_TOL {
                return Err(KenmotsuError::NonUnitEta { norm });
            }
            Ok([e[0] / norm, e[1] / norm, e[2] / norm])
        }
        EtaModel::Slant(theta) => {
            if !(k1 > 0.0) {
                return Err(KenmotsuError::NonPositiveSlantCurvature { k1 });
            }
            let sin = theta.sin();
            let radicand = k1 * k1 - f * f * sin * sin;
            if radicand < 0.0 {
                return Err(KenmotsuError::SlantInadmissible {
                    k1,
                    f,
                    theta: *theta,
                    radicand,
                });
            }
            Ok([
                theta.cos(),
                -(f / k1) * sin * sin,
                (sin.abs() / k1) * radicand.sqrt(),
            ])
        }
        EtaModel::Legendre => Ok([0.0, -1.0, 0.0]),
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The curvature operator R(X, Y)Z on frame coefficient triples.
pub fn curvature_op(x: [f64; 3], y: [f64; 3], z: [f64; 3], p: &ManifoldParams) -> [f64; 3] {
    let a = coeff_a(p);
    let b = coeff_b(p);
    let eta = p.eta();
    let gyz = dot(y, z);
    let gxz = dot(x, z);
    let ex = dot(eta, x);
    let ey = dot(eta, y);
    let ez = dot(eta, z);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = a * (gyz * x[i] - gxz * y[i])
            - b * (gyz * ex * eta[i] - gxz * ey * eta[i] - ex * ez * y[i] + ey * ez * x[i]);
    }
    out
}

/// Residual of the structure equations that transport the contact
/// coefficients along the curve:
///
/// ```text
/// etaT' = k1 etaN + f (1 - etaT^2)
/// etaN' = -k1 etaT + k2 etaB - f etaT etaN
/// etaB' = -k2 etaN - f etaT etaB
/// ```
///
/// Derivatives of the supplied path are taken by central differences with
/// step 1e-6, so a path that satisfies the equations exactly still shows
/// residuals of roughly 1e-10 times its second derivative scale.
pub fn eta_transport_residual<P: Fn(f64) -> [f64; 3]>(
    k1: f64,
    k2: f64,
    f: f64,
    eta_path: P,
    s: f64,
) -> [f64; 3] {
    let h = 1e-6;
    let plus = eta_path(s + h);
    let minus = eta_path(s - h);
    let eta = eta_path(s);
    let deriv = [
        (plus[0] - minus[0]) / (2.0 * h),
        (plus[1] - minus[1]) / (2.0 * h),
        (plus[2] - minus[2]) / (2.0 * h),
    ];
    [
        k1 * eta[1] + f * (1.0 - eta[0] * eta[0]) - deriv[0],
        -k1 * eta[0] + k2 * eta[2] - f * eta[0] * eta[1] - deriv[1],
        -k2 * eta[1] - f * eta[0] * eta[2] - deriv[2],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(f0: f64, f1: f64, r: f64, eta: [f64; 3]) -> ManifoldParams {
        let f = Jet::with_usable([f0, f1, 0.0, 0.0, 0.0], 1);
        ManifoldParams::new(f, r, eta).unwrap()
    }

    #[test]
    fn curvature_coefficients_from_constant_warping() {
        // f = 1 constant gives f^2 + f' = 1, so with r = -3 the pair is
        // A = -3/2 + 2 = 1/2 and B = -3/2 + 3 = 3/2.
        let p = params(1.0, 0.0, -3.0, [0.0, -1.0, 0.0]);
        assert_eq!(coeff_a(&p), 0.5);
        assert_eq!(coeff_b(&p), 1.5);
    }

    #[test]
    fn coefficients_differ_by_the_shared_combination() {
        let p = params(0.7, -0.3, 2.4, [1.0, 0.0, 0.0]);
        let fpf = 0.7 * 0.7 - 0.3;
        assert!((coeff_b(&p) - coeff_a(&p) - fpf).abs() <= 1e-15);
    }

    #[test]
    fn rejects_non_unit_contact_direction() {
        let f = Jet::constant(1.0);
        assert!(matches!(
            ManifoldParams::new(f, 0.0, [0.5, 0.5, 0.5]),
            Err(KenmotsuError::NonUnitEta { .. })
        ));
    }

    #[test]
    fn rejects_warping_jet_without_first_derivative() {
        let f = Jet::with_usable([1.0, 0.0, 0.0, 0.0, 0.0], 0);
        assert!(matches!(
            ManifoldParams::new(f, 0.0, [1.0, 0.0, 0.0]),
            Err(KenmotsuError::WarpingOrderTooLow { .. })
        ));
    }

    #[test]
    fn explicit_model_normalizes_near_unit_input() {
        let eta = eta_from_model(&EtaModel::Explicit([0.6, 0.8, 0.0]), 0.0, 1.0).unwrap();
        assert!((eta[0] - 0.6).abs() <= 1e-15);
        assert!((eta[1] - 0.8).abs() <= 1e-15);
        assert_eq!(eta[2], 0.0);
        let norm = (eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]).sqrt();
        assert!((norm - 1.0).abs() <= 1e-15);
        let err = eta_from_model(&EtaModel::Explicit([0.6, 0.8, 0.5]), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, KenmotsuError::NonUnitEta { .. }));
    }

    #[test]
    fn slant_model_components() {
        // theta = pi/2, f = 1, k1 = 2: (0, -1/2, sqrt(3)/2).
        let eta =
            eta_from_model(&EtaModel::Slant(std::f64::consts::FRAC_PI_2), 1.0, 2.0).unwrap();
        assert!(eta[0].abs() <= 1e-16);
        assert!((eta[1] + 0.5).abs() <= 1e-15);
        assert!((eta[2] - 3.0_f64.sqrt() / 2.0).abs() <= 1e-15);
    }

    #[test]
    fn slant_model_is_unit_norm() {
        for &(theta, f, k1) in &[
            (0.3, 0.9, 1.7),
            (1.2, -0.4, 0.8),
            (2.5, 1.1, 2.3),
            (0.0, 5.0, 1.0),
        ] {
            let eta = eta_from_model(&EtaModel::Slant(theta), f, k1).unwrap();
            let norm = dot(eta, eta).sqrt();
            assert!((norm - 1.0).abs() <= 1e-12, "theta {theta}");
        }
    }

    #[test]
    fn slant_model_with_zero_angle_is_tangent_aligned() {
        let eta = eta_from_model(&EtaModel::Slant(0.0), 3.0, 1.5).unwrap();
        assert_eq!(eta, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn slant_model_rejects_large_warping() {
        let err =
            eta_from_model(&EtaModel::Slant(std::f64::consts::FRAC_PI_2), 3.0, 1.0).unwrap_err();
        assert!(matches!(err, KenmotsuError::SlantInadmissible { .. }));
    }

    #[test]
    fn slant_model_rejects_non_positive_curvature() {
        let err = eta_from_model(&EtaModel::Slant(0.5), 1.0, 0.0).unwrap_err();
        assert!(matches!(
            err,
            KenmotsuError::NonPositiveSlantCurvature { .. }
        ));
    }

    #[test]
    fn legendre_model_is_opposite_the_normal() {
        let eta = eta_from_model(&EtaModel::Legendre, 7.0, 0.1).unwrap();
        assert_eq!(eta, [0.0, -1.0, 0.0]);
    }

    #[test]
    fn curvature_op_is_antisymmetric_in_the_first_pair() {
        let p = params(0.8, 0.2, 1.3, [0.48, -0.6, 0.64]);
        let x = [0.3, -1.2, 0.7];
        let y = [1.1, 0.4, -0.5];
        let z = [-0.2, 0.9, 1.3];
        let rxy = curvature_op(x, y, z, &p);
        let ryx = curvature_op(y, x, z, &p);
        for i in 0..3 {
            assert!((rxy[i] + ryx[i]).abs() <= 1e-14);
        }
    }

    #[test]
    fn curvature_op_normal_tangent_tangent_with_normal_contact() {
        // With eta = (0, -1, 0): R(N, T)T = (A - B) N.
        let p = params(1.0, 0.0, -3.0, [0.0, -1.0, 0.0]);
        let out = curvature_op([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], &p);
        assert_eq!(out, [0.0, -1.0, 0.0]);
    }

    #[test]
    fn curvature_op_vanishes_on_parallel_arguments() {
        let p = params(0.5, -0.1, 2.0, [1.0, 0.0, 0.0]);
        let x = [0.4, -0.3, 0.8];
        let out = curvature_op(x, x, [1.0, 2.0, 3.0], &p);
        for v in out {
            assert!(v.abs() <= 1e-15);
        }
    }

    #[test]
    fn transport_residual_vanishes_for_orthogonal_slant() {
        // theta = pi/2 with constant k1, f and zero torsion transports a
        // constant contact direction exactly.
        let k1 = 2.0;
        let f = 1.0;
        let eta = eta_from_model(&EtaModel::Slant(std::f64::consts::FRAC_PI_2), f, k1).unwrap();
        let res = eta_transport_residual(k1, 0.0, f, |_| eta, 1.0);
        for v in res {
            assert!(v.abs() <= 1e-12);
        }
    }

    #[test]
    fn transport_residual_balances_curvature_against_warping() {
        // A constant contact direction opposite the normal with zero torsion
        // leaves the single residual f - k1 in the tangent slot.
        let res = eta_transport_residual(2.0, 0.0, 3.0, |_| [0.0, -1.0, 0.0], 1.0);
        assert!((res[0] - 1.0).abs() <= 1e-12);
        assert!(res[1].abs() <= 1e-12);
        assert!(res[2].abs() <= 1e-12);
    }
}
