//! Covariant derivatives of frame fields along a unit-speed Frenet curve.
//!
//! A field along the curve is stored by its coefficients in the frame
//! (T, N, B), each coefficient a jet in arc length. One covariant derivative
//! combines the plain derivative of each coefficient with the frame rotation
//! by the curvature k1 and torsion k2:
//!
//! ```text
//! (aT, aN, aB) -> (aT' - k1 aN, aN' + k1 aT - k2 aB, aB' + k2 aN)
//! ```
//!
//! [`nabla_power`] iterates this from the first derivative of the tangent,
//! which is (0, k1, 0). [`nabla_power_hardcoded`] carries the closed-form
//! component expansions of the same powers; the two routes share no code, so
//! agreement between them certifies both.

use thiserror::Error;

use crate::jets::{jet_add, jet_mul, jet_shift, jet_sub, Jet, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrenetError {
    #[error("covariant power {k} is outside the supported range {lo}..={hi}")]
    OrderOutOfRange { k: usize, lo: usize, hi: usize },
    #[error("{input} jet has usable order {usable} but covariant power {k} needs {needed}")]
    InsufficientOrder {
        input: &'static str,
        k: usize,
        needed: usize,
        usable: usize,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Coefficients of a field along the curve in the frame (T, N, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector {
    pub t: Jet,
    pub n: Jet,
    pub b: Jet,
}

impl FrameVector {
    /// The three coefficient values at the base point.
    pub fn values(&self) -> [f64; 3] {
        [self.t.d0(), self.n.d0(), self.b.d0()]
    }

    /// Smallest usable order across the three coefficients.
    pub fn min_usable(&self) -> usize {
        self.t
            .usable_order()
            .min(self.n.usable_order())
            .min(self.b.usable_order())
    }
}

/// One covariant derivative of a frame field. Consumes one usable order.
pub fn covariant_derivative(
    v: &FrameVector,
    k1: Jet,
    k2: Jet,
) -> Result<FrameVector, JetError> {
    let t = jet_sub(jet_shift(v.t)?, jet_mul(k1, v.n));
    let n = jet_add(jet_shift(v.n)?, jet_sub(jet_mul(k1, v.t), jet_mul(k2, v.b)));
    let b = jet_add(jet_shift(v.b)?, jet_mul(k2, v.n));
    Ok(FrameVector { t, n, b })
}

fn require_orders(k: usize, k1: Jet, k2: Jet) -> Result<(), FrenetError> {
    let k1_needed = k.saturating_sub(1);
    if k1.usable_order() < k1_needed {
        return Err(FrenetError::InsufficientOrder {
            input: "curvature",
            k,
            needed: k1_needed,
            usable: k1.usable_order(),
        });
    }
    let k2_needed = k.saturating_sub(2);
    if k2.usable_order() < k2_needed {
        return Err(FrenetError::InsufficientOrder {
            input: "torsion",
            k,
            needed: k2_needed,
            usable: k2.usable_order(),
        });
    }
    Ok(())
}

/// The k-th covariant derivative of the tangent, k in 1..=5, computed by
/// iterating [`covariant_derivative`] from (0, k1, 0).
pub fn nabla_power(k: usize, k1: Jet, k2: Jet) -> Result<FrameVector, FrenetError> {
    if !(1..=5).contains(&k) {
        return Err(FrenetError::OrderOutOfRange { k, lo: 1, hi: 5 });
    }
    require_orders(k, k1, k2)?;
    let zero = Jet::constant(0.0);
    let mut v = FrameVector {
        t: zero,
        n: k1,
        b: zero,
    };
    for _ in 1..k {
        v = covariant_derivative(&v, k1, k2)?;
    }
    Ok(v)
}

/// Closed-form frame components of the k-th covariant derivative of the
/// tangent, k in 2..=5. Written out term by term, independently of the
/// recursion in [`nabla_power`].
pub fn nabla_power_hardcoded(k: usize, k1: Jet, k2: Jet) -> Result<[f64; 3], FrenetError> {
    if !(2..=5).contains(&k) {
        return Err(FrenetError::OrderOutOfRange { k, lo: 2, hi: 5 });
    }
    require_orders(k, k1, k2)?;
    let c = [
        k1.d(0)?,
        if k >= 2 { k1.d(1)? } else { 0.0 },
        if k >= 3 { k1.d(2)? } else { 0.0 },
        if k >= 4 { k1.d(3)? } else { 0.0 },
        if k >= 5 { k1.d(4)? } else { 0.0 },
    ];
    let t = [
        k2.d(0)?,
        if k >= 3 { k2.d(1)? } else { 0.0 },
        if k >= 4 { k2.d(2)? } else { 0.0 },
        if k >= 5 { k2.d(3)? } else { 0.0 },
    ];
    let out = match k {
        2 => [c[0] * c[0] * (-1.0), c[1], c[0] * t[0]],
        3 => [
            -3.0 * c[0] * c[1],
            -c[0].powi(3) - c[0] * t[0] * t[0] + c[2],
            2.0 * c[1] * t[0] + c[0] * t[1],
        ],
        4 => [
            c[0].powi(4) + c[0] * c[0] * t[0] * t[0] - 4.0 * c[2] * c[0] - 3.0 * c[1] * c[1],
            -(6.0 * c[0] * c[0] * c[1] + 3.0 * t[0] * t[0] * c[1] + 3.0 * c[0] * t[0] * t[1]
                - c[3]),
            3.0 * c[2] * t[0] + c[0] * t[2] + 3.0 * c[1] * t[1]
                - t[0] * c[0].powi(3)
                - c[0] * t[0].powi(3),
        ],
        _ => [
            10.0 * c[0].powi(3) * c[1] + 5.0 * c[0] * c[1] * t[0] * t[0] - 5.0 * c[0] * c[3]
                - 10.0 * c[1] * c[2]
                + 5.0 * t[0] * t[1] * c[0] * c[0],
            c[0].powi(5) + 2.0 * c[0].powi(3) * t[0] * t[0]
                - 10.0 * c[0] * c[0] * c[2]
                - 15.0 * c[0] * c[1] * c[1]
                - 12.0 * t[0] * t[1] * c[1]
                - 6.0 * t[0] * t[0] * c[2]
                - 3.0 * c[0] * t[1] * t[1]
                - 4.0 * c[0] * t[0] * t[2]
                + c[0] * t[0].powi(4)
                + c[4],
            -9.0 * c[0] * c[0] * t[0] * c[1] - 4.0 * t[0].powi(3) * c[1]
                - 6.0 * c[0] * t[0] * t[0] * t[1]
                + 4.0 * c[3] * t[0]
                + 6.0 * c[2] * t[1]
                + 4.0 * c[1] * t[2]
                + c[0] * t[3]
                - t[1] * c[0].powi(3),
        ],
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) {
        for i in 0..3 {
            assert!(
                (a[i] - b[i]).abs() <= tol * (1.0 + b[i].abs()),
                "component {i}: got {}, want {}",
                a[i],
                b[i]
            );
        }
    }

    #[test]
    fn covariant_derivative_of_tangent_derivative() {
        // With k1 = sqrt(5)/s and k2 = 0 at s = 1, one application to
        // (0, k1, 0) gives (-k1^2, k1', 0) = (-5, -sqrt(5), 0).
        let expr = crate::dsl::parse("sqrt(5)/s").unwrap();
        let k1 = crate::jets::jet_from_expr(&expr, 1.0).unwrap();
        let k2 = Jet::constant(0.0);
        let zero = Jet::constant(0.0);
        let v = FrameVector {
            t: zero,
            n: k1,
            b: zero,
        };
        let dv = covariant_derivative(&v, k1, k2).unwrap();
        close(dv.values(), [-5.0, -(5.0_f64.sqrt()), 0.0], 1e-14);
        assert_eq!(dv.min_usable(), 3);
    }

    #[test]
    fn first_power_is_the_principal_normal_times_curvature() {
        let k1 = Jet::new([1.5, -0.3, 0.2, 0.1, 0.0]);
        let k2 = Jet::new([0.7, 0.4, 0.0, 0.0, 0.0]);
        let v = nabla_power(1, k1, k2).unwrap();
        close(v.values(), [0.0, 1.5, 0.0], 1e-15);
    }

    #[test]
    fn constant_profile_powers_match_closed_forms() {
        // Constant k1 = 2, k2 = 1 wipes every derivative term.
        let k1 = Jet::constant(2.0);
        let k2 = Jet::constant(1.0);
        let want: [[f64; 3]; 4] = [
            [-4.0, 0.0, 2.0],
            [0.0, -10.0, 0.0],
            [20.0, 0.0, -10.0],
            [0.0, 50.0, 0.0],
        ];
        for k in 2..=5 {
            let rec = nabla_power(k, k1, k2).unwrap();
            close(rec.values(), want[k - 2], 1e-14);
            let hard = nabla_power_hardcoded(k, k1, k2).unwrap();
            close(hard, want[k - 2], 1e-14);
        }
    }

    #[test]
    fn recursion_matches_hardcoded_for_varying_profiles() {
        let k1 = Jet::new([1.3, 0.7, -0.4, 0.9, -1.1]);
        let k2 = Jet::new([0.6, -0.8, 0.5, 0.3, 0.0]);
        for k in 2..=5 {
            let rec = nabla_power(k, k1, k2).unwrap();
            let hard = nabla_power_hardcoded(k, k1, k2).unwrap();
            close(rec.values(), hard, 1e-13);
        }
    }

    #[test]
    fn usable_order_drops_once_per_power() {
        let k1 = Jet::new([1.0, 0.5, 0.25, 0.125, 0.0625]);
        let k2 = Jet::new([0.3, 0.2, 0.1, 0.05, 0.0]);
        for k in 1..=5 {
            let v = nabla_power(k, k1, k2).unwrap();
            assert_eq!(v.min_usable(), 5 - k, "power {k}");
        }
    }

    #[test]
    fn rejects_out_of_range_powers() {
        let k1 = Jet::constant(1.0);
        let k2 = Jet::constant(0.0);
        assert!(matches!(
            nabla_power(0, k1, k2),
            Err(FrenetError::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            nabla_power(6, k1, k2),
            Err(FrenetError::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            nabla_power_hardcoded(1, k1, k2),
            Err(FrenetError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn reports_short_curvature_jet() {
        let k1 = Jet::with_usable([1.0, 0.5, 0.25, 0.0, 0.0], 2);
        let k2 = Jet::constant(0.0);
        let err = nabla_power(5, k1, k2).unwrap_err();
        match err {
            FrenetError::InsufficientOrder {
                input,
                needed,
                usable,
                ..
            } => {
                assert_eq!(input, "curvature");
                assert_eq!(needed, 4);
                assert_eq!(usable, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn reports_short_torsion_jet() {
        let k1 = Jet::new([1.0, 0.5, 0.25, 0.125, 0.0625]);
        let k2 = Jet::with_usable([0.3, 0.2, 0.0, 0.0, 0.0], 1);
        let err = nabla_power_hardcoded(5, k1, k2).unwrap_err();
        assert!(matches!(
            err,
            FrenetError::InsufficientOrder {
                input: "torsion",
                needed: 3,
                ..
            }
        ));
    }
}
