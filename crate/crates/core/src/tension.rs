//! Tension fields of a Frenet curve and the full residual system.
//!
//! The k-th tension field is built from covariant derivatives of the tangent
//! and curvature corrections:
//!
//! ```text
//! tau_1 = nabla T
//! tau_2 = nabla^3 T + R(nabla T, T) T
//! tau_3 = nabla^5 T + R(nabla^3 T, T) T - R(nabla^2 T, nabla T) T
//! ```
//!
//! [`tau_k`] assembles these generically from [`nabla_power`] and
//! [`curvature_op`]. [`tau3_expanded`] carries the fully expanded frame
//! components of tau_3 instead, split into coefficients along T, N, B and
//! the contact field xi, with every distributed monomial tracked for scale.
//! The two routes share no algebra, so their agreement certifies both.
//!
//! [`residual_system`] evaluates the three scalar equations equivalent to
//! the vanishing of tau_3 once the xi contribution is folded back into the
//! frame. Up to overall factors the tangent component is proportional to
//! the first equation and the normal and binormal components reproduce the
//! other two; the exact factors are pinned down by tests.

use thiserror::Error;

use crate::frenet::{nabla_power, FrenetError};
use crate::jets::Jet;
use crate::kenmotsu::{coeff_a, coeff_a_parts, coeff_b, coeff_b_parts, curvature_op, ManifoldParams};
use crate::residual::{push_product, sum_terms, Residual};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensionError {
    #[error("curvature must be positive, got k1 = {k1} at s = {s}")]
    NonPositiveCurvature { k1: f64, s: f64 },
    #[error("{input} jet has usable order {usable}, the residual system needs {needed}")]
    InsufficientOrder {
        input: &'static str,
        needed: usize,
        usable: usize,
    },
    #[error("tension order {k} is outside the supported range 1..=3")]
    OrderOutOfRange { k: usize },
    #[error(transparent)]
    Frenet(#[from] FrenetError),
}

/// One point of a Frenet curve: arc length, curvature and torsion jets, and
/// the ambient data there. Construction checks that the jets carry enough
/// derivatives for the fifth covariant derivative of the tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    s: f64,
    k1: Jet,
    k2: Jet,
    params: ManifoldParams,
}

impl CurvePoint {
    pub fn new(s: f64, k1: Jet, k2: Jet, params: ManifoldParams) -> Result<Self, TensionError> {
        if !(k1.d0() > 0.0) {
            return Err(TensionError::NonPositiveCurvature { k1: k1.d0(), s });
        }
        if k1.usable_order() < 4 {
            return Err(TensionError::InsufficientOrder {
                input: "curvature",
                needed: 4,
                usable: k1.usable_order(),
            });
        }
        if k2.usable_order() < 3 {
            return Err(TensionError::InsufficientOrder {
                input: "torsion",
                needed: 3,
                usable: k2.usable_order(),
            });
        }
        Ok(CurvePoint { s, k1, k2, params })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn k1(&self) -> Jet {
        self.k1
    }

    pub fn k2(&self) -> Jet {
        self.k2
    }

    pub fn params(&self) -> &ManifoldParams {
        &self.params
    }

    /// Curvature derivatives 0..=4 as a plain array.
    pub fn k1_derivs(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.k1.d(k).expect("validated usable order 4");
        }
        out
    }

    /// Torsion derivatives 0..=3 as a plain array.
    pub fn k2_derivs(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.k2.d(k).expect("validated usable order 3");
        }
        out
    }
}

/// Frame components of the k-th tension field for k in 1..=3, assembled
/// generically from covariant powers of the tangent and the curvature
/// operator.
pub fn tau_k(k: usize, pt: &CurvePoint) -> Result<[f64; 3], TensionError> {
    if !(1..=3).contains(&k) {
        return Err(TensionError::OrderOutOfRange { k });
    }
    let k1 = pt.k1;
    let k2 = pt.k2;
    let tangent = [1.0, 0.0, 0.0];
    let mut acc = nabla_power(2 * k - 1, k1, k2)?.values();
    if k >= 2 {
        for l in 0..=(k - 2) {
            let x = nabla_power(2 * k - 3 - l, k1, k2)?.values();
            let y = if l == 0 {
                tangent
            } else {
                nabla_power(l, k1, k2)?.values()
            };
            let term = curvature_op(x, y, tangent, &pt.params);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..3 {
                acc[i] += sign * term[i];
            }
        }
    }
    Ok(acc)
}

/// Expanded coefficients of tau_3 along T, N, B, and xi, with the largest
/// distributed monomial kept as the common scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau3Components {
    pub c_t: f64,
    pub c_n: f64,
    pub c_b: f64,
    pub c_xi: f64,
    pub scale: f64,
}

impl Tau3Components {
    /// Frame components of tau_3 after expressing xi in the frame:
    /// component_i = c_i - c_xi * eta_i.
    pub fn fold(&self, eta: [f64; 3]) -> [f64; 3] {
        [
            self.c_t - self.c_xi * eta[0],
            self.c_n - self.c_xi * eta[1],
            self.c_b - self.c_xi * eta[2],
        ]
    }
}

/// Closed-form expansion of tau_3. Every product is written out as a
/// distributed monomial so the scale reflects the true cancellation depth.
pub fn tau3_expanded(pt: &CurvePoint) -> Tau3Components {
    let [k1, k1p, k1pp, k1ppp, k1pppp] = pt.k1_derivs();
    let [k2, k2p, k2pp, k2ppp] = pt.k2_derivs();
    let a = coeff_a(&pt.params);
    let b = coeff_b(&pt.params);
    let [et, en, eb] = pt.params.eta();

    let t_terms = [
        10.0 * k1.powi(3) * k1p,
        5.0 * k1 * k1p * k2 * k2,
        -5.0 * k1 * k1ppp,
        -10.0 * k1p * k1pp,
        5.0 * k2 * k2p * k1 * k1,
        k1pp * b * en * et,
        -2.0 * k1.powi(3) * b * en * et,
        -k1 * k2 * k2 * b * en * et,
        2.0 * k1p * k2 * b * eb * et,
        k1 * k2p * b * eb * et,
    ];
    let n_terms = [
        k1.powi(5),
        2.0 * k1.powi(3) * k2 * k2,
        -10.0 * k1 * k1 * k1pp,
        -15.0 * k1 * k1p * k1p,
        -12.0 * k2 * k2p * k1p,
        -6.0 * k2 * k2 * k1pp,
        -3.0 * k1 * k2p * k2p,
        -4.0 * k1 * k2 * k2pp,
        k1 * k2.powi(4),
        k1pppp,
        k1pp * a,
        -2.0 * k1.powi(3) * a,
        -k1 * k2 * k2 * a,
        -k1pp * b * et * et,
        2.0 * k1.powi(3) * b * et * et,
        k1 * k2 * k2 * b * et * et,
        -k1 * k1 * k2 * b * eb * et,
    ];
    let b_terms = [
        -9.0 * k1 * k1 * k2 * k1p,
        -4.0 * k2.powi(3) * k1p,
        -6.0 * k1 * k2 * k2 * k2p,
        4.0 * k1ppp * k2,
        6.0 * k1pp * k2p,
        4.0 * k1p * k2pp,
        k1 * k2ppp,
        -k2p * k1.powi(3),
        2.0 * k1p * k2 * a,
        k1 * k2p * a,
        -2.0 * k1p * k2 * b * et * et,
        -k1 * k2p * b * et * et,
        k1 * k1 * k2 * b * en * et,
    ];
    let xi_terms = [
        k1pp * b * en,
        -2.0 * k1.powi(3) * b * en,
        -k1 * k2 * k2 * b * en,
        2.0 * k1p * k2 * b * eb,
        k1 * k2p * b * eb,
    ];

    let (c_t, s_t) = sum_terms(&t_terms);
    let (c_n, s_n) = sum_terms(&n_terms);
    let (c_b, s_b) = sum_terms(&b_terms);
    let (c_xi, s_xi) = sum_terms(&xi_terms);
    Tau3Components {
        c_t,
        c_n,
        c_b,
        c_xi,
        scale: s_t.max(s_n).max(s_b).max(s_xi),
    }
}

/// The three scalar equations whose simultaneous vanishing characterizes a
/// triharmonic curve, each with the scale of its largest monomial. The
/// curvature coefficients are distributed into their own summands so an
/// equation that vanishes through their cancellation still reports the
/// magnitude of what cancelled.
pub fn residual_system(pt: &CurvePoint) -> [Residual; 3] {
    let [k1, k1p, k1pp, k1ppp, k1pppp] = pt.k1_derivs();
    let [k2, k2p, k2pp, k2ppp] = pt.k2_derivs();
    let a_parts = coeff_a_parts(&pt.params);
    let b_parts = coeff_b_parts(&pt.params);
    let [et, en, eb] = pt.params.eta();
    let e_tn = et * et + en * en;
    let e_tb = et * et + eb * eb;

    let e1 = Residual::from_terms(
        "E1",
        &[
            k1 * k1ppp,
            2.0 * k1p * k1pp,
            -2.0 * k1.powi(3) * k1p,
            -k2 * k2 * k1 * k1p,
            -k1 * k1 * k2 * k2p,
        ],
    );

    let mut t2 = vec![
        k1pppp,
        -10.0 * k1 * k1 * k1pp,
        -6.0 * k2 * k2 * k1pp,
        -4.0 * k1 * k2 * k2pp,
        -15.0 * k1 * k1p * k1p,
        -12.0 * k2 * k2p * k1p,
        -3.0 * k1 * k2p * k2p,
        k1.powi(5),
        k1 * k2.powi(4),
        2.0 * k1.powi(3) * k2 * k2,
    ];
    push_product(&mut t2, k1pp, &a_parts);
    push_product(&mut t2, -2.0 * k1.powi(3), &a_parts);
    push_product(&mut t2, -k1 * k2 * k2, &a_parts);
    push_product(&mut t2, -k1pp * e_tn, &b_parts);
    push_product(&mut t2, 2.0 * k1.powi(3) * e_tn, &b_parts);
    push_product(&mut t2, k1 * k2 * k2 * e_tn, &b_parts);
    push_product(&mut t2, -k1 * k1 * k2 * et * eb, &b_parts);
    push_product(&mut t2, -2.0 * k2 * k1p * en * eb, &b_parts);
    push_product(&mut t2, -k1 * k2p * en * eb, &b_parts);
    let e2 = Residual::from_terms("E2", &t2);

    let mut t3 = vec![
        4.0 * k2 * k1ppp,
        6.0 * k1pp * k2p,
        4.0 * k1p * k2pp,
        -9.0 * k1 * k1 * k2 * k1p,
        -4.0 * k2.powi(3) * k1p,
        -6.0 * k1 * k2 * k2 * k2p,
        -k2p * k1.powi(3),
        k1 * k2ppp,
    ];
    push_product(&mut t3, 2.0 * k1p * k2, &a_parts);
    push_product(&mut t3, k1 * k2p, &a_parts);
    push_product(&mut t3, -2.0 * k1p * k2 * e_tb, &b_parts);
    push_product(&mut t3, -k1 * k2p * e_tb, &b_parts);
    push_product(&mut t3, k1 * k1 * k2 * et * en, &b_parts);
    push_product(&mut t3, -k1pp * eb * en, &b_parts);
    push_product(&mut t3, 2.0 * k1.powi(3) * eb * en, &b_parts);
    push_product(&mut t3, k1 * k2 * k2 * eb * en, &b_parts);
    let e3 = Residual::from_terms("E3", &t3);

    [e1, e2, e3]
}
