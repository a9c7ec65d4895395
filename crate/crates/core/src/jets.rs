//! Fixed-order derivative jets.
//!
//! A [`Jet`] stores the value and first four derivatives of a scalar function
//! at one parameter value, together with a usable order. Operations that
//! consume a derivative slot ([`jet_shift`]) lower the usable order by one;
//! arithmetic keeps the minimum of the operands. Reading past the usable
//! order is an error rather than a silent zero, which is what makes the
//! fifth-order covariant derivative chain safe to write as a recursion.

use thiserror::Error;

use crate::dsl::{differentiate, eval, DomainError, FunctionExpr};

/// Number of derivative slots, value included.
pub const JET_LEN: usize = 5;

/// Highest derivative order a fresh jet carries.
pub const MAX_ORDER: usize = JET_LEN - 1;

/// Binomial coefficients C(k, i) for k up to 4, used by the Leibniz rule.
const BINOMIAL: [[f64; JET_LEN]; JET_LEN] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("requested derivative of order {requested} from a jet with usable order {usable}")]
    UsableOrderExhausted { requested: usize, usable: usize },
    #[error("finite-difference step must be positive and finite, got {h}")]
    InvalidStep { h: f64 },
    #[error("non-finite sample at s = {s} in finite-difference stencil")]
    NonFiniteSample { s: f64 },
}

/// Value and derivatives of a scalar function at one point.
///
/// Entries past the usable order are kept at zero and are not readable
/// through [`Jet::d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    d: [f64; JET_LEN],
    usable: usize,
}

impl Jet {
    /// Jet with all five slots usable.
    pub fn new(d: [f64; JET_LEN]) -> Jet {
        Jet {
            d,
            usable: MAX_ORDER,
        }
    }

    /// Jet usable up to the given derivative order. Slots past the usable
    /// order are zeroed.
    pub fn with_usable(d: [f64; JET_LEN], usable: usize) -> Jet {
        assert!(usable <= MAX_ORDER, "usable order {usable} out of range");
        let mut d = d;
        for slot in d.iter_mut().skip(usable + 1) {
            *slot = 0.0;
        }
        Jet { d, usable }
    }

    /// Jet of a constant function: every derivative is zero and the full
    /// order is usable.
    pub fn constant(c: f64) -> Jet {
        let mut d = [0.0; JET_LEN];
        d[0] = c;
        Jet::new(d)
    }

    pub fn usable_order(&self) -> usize {
        self.usable
    }

    /// The function value.
    pub fn d0(&self) -> f64 {
        self.d[0]
    }

    /// The k-th derivative, guarded by the usable order.
    pub fn d(&self, k: usize) -> Result<f64, JetError> {
        if k > self.usable {
            Err(JetError::UsableOrderExhausted {
                requested: k,
                usable: self.usable,
            })
        } else {
            Ok(self.d[k])
        }
    }

    /// True when every usable derivative is negligible next to the value.
    pub fn is_constant(&self, rel_tol: f64) -> bool {
        let bound = rel_tol * (1.0 + self.d[0].abs());
        self.d[1..=self.usable].iter().all(|v| v.abs() <= bound)
    }
}

/// Entrywise sum; the usable order drops to the smaller operand.
pub fn jet_add(a: Jet, b: Jet) -> Jet {
    let usable = a.usable.min(b.usable);
    let mut d = [0.0; JET_LEN];
    for k in 0..=usable {
        d[k] = a.d[k] + b.d[k];
    }
    Jet { d, usable }
}

/// Entrywise difference; the usable order drops to the smaller operand.
pub fn jet_sub(a: Jet, b: Jet) -> Jet {
    let usable = a.usable.min(b.usable);
    let mut d = [0.0; JET_LEN];
    for k in 0..=usable {
        d[k] = a.d[k] - b.d[k];
    }
    Jet { d, usable }
}

/// Scalar multiple; the usable order is unchanged.
pub fn jet_scale(a: Jet, c: f64) -> Jet {
    let mut d = [0.0; JET_LEN];
    for k in 0..=a.usable {
        d[k] = c * a.d[k];
    }
    Jet {
        d,
        usable: a.usable,
    }
}

/// Leibniz product; the usable order drops to the smaller operand.
pub fn jet_mul(a: Jet, b: Jet) -> Jet {
    let usable = a.usable.min(b.usable);
    let mut d = [0.0; JET_LEN];
    for (k, slot) in d.iter_mut().enumerate().take(usable + 1) {
        let mut acc = 0.0;
        for i in 0..=k {
            acc += BINOMIAL[k][i] * a.d[i] * b.d[k - i];
        }
        *slot = acc;
    }
    Jet { d, usable }
}

/// The jet of the derivative: slot k becomes slot k+1 of the input. Costs
/// one usable order.
pub fn jet_shift(a: Jet) -> Result<Jet, JetError> {
    if a.usable == 0 {
        return Err(JetError::UsableOrderExhausted {
            requested: 1,
            usable: 0,
        });
    }
    let usable = a.usable - 1;
    let mut d = [0.0; JET_LEN];
    for k in 0..=usable {
        d[k] = a.d[k + 1];
    }
    Ok(Jet { d, usable })
}

/// Precomputed derivative trees of one expression, up to a chosen depth.
///
/// Differentiation is structural and can grow the tree, so the trees are
/// built once and evaluated many times.
#[derive(Debug, Clone)]
pub struct DerivTower {
    exprs: Vec<FunctionExpr>,
}

impl DerivTower {
    /// Tower carrying the expression and its first four derivatives.
    pub fn new(expr: &FunctionExpr) -> DerivTower {
        DerivTower::truncated(expr, MAX_ORDER)
    }

    /// Tower carrying derivatives only up to `depth`. Jets it produces have
    /// usable order `depth`.
    pub fn truncated(expr: &FunctionExpr, depth: usize) -> DerivTower {
        assert!(depth <= MAX_ORDER, "tower depth {depth} out of range");
        let mut exprs = Vec::with_capacity(depth + 1);
        exprs.push(expr.clone());
        for k in 0..depth {
            let next = differentiate(&exprs[k]);
            exprs.push(next);
        }
        DerivTower { exprs }
    }

    pub fn depth(&self) -> usize {
        self.exprs.len() - 1
    }

    pub fn expr(&self, k: usize) -> &FunctionExpr {
        &self.exprs[k]
    }

    /// Evaluates every tree at `s` into a jet with usable order equal to the
    /// tower depth.
    pub fn jet(&self, s: f64) -> Result<Jet, DomainError> {
        let mut d = [0.0; JET_LEN];
        for (k, expr) in self.exprs.iter().enumerate() {
            d[k] = eval(expr, s)?;
        }
        Ok(Jet {
            d,
            usable: self.depth(),
        })
    }
}

/// Convenience wrapper: builds a full tower for `expr` and evaluates it once.
pub fn jet_from_expr(expr: &FunctionExpr, s: f64) -> Result<Jet, DomainError> {
    DerivTower::new(expr).jet(s)
}

/// Finite-difference jet from a black-box function, using second-order
/// central stencils on the five-point set s, s +- h, s +- 2h.
///
/// The truncation error is O(h^2) for every slot; with the default step of
/// [`FD_DEFAULT_STEP`] the fourth derivative is the noisiest, with roughly
/// two to three significant digits for well-scaled inputs.
pub fn fd_jet<F: Fn(f64) -> f64>(f: F, s: f64, h: f64) -> Result<Jet, JetError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(JetError::InvalidStep { h });
    }
    let mut samples = [0.0; 5];
    for (i, offset) in [-2.0, -1.0, 0.0, 1.0, 2.0].iter().enumerate() {
        let x = s + offset * h;
        let v = f(x);
        if !v.is_finite() {
            return Err(JetError::NonFiniteSample { s: x });
        }
        samples[i] = v;
    }
    let [m2, m1, c, p1, p2] = samples;
    let d = [
        c,
        (p1 - m1) / (2.0 * h),
        (p1 - 2.0 * c + m1) / (h * h),
        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        (p2 - 4.0 * p1 + 6.0 * c - 4.0 * m1 + m2) / (h * h * h * h),
    ];
    Ok(Jet::new(d))
}

/// Default step for [`fd_jet`]. Balances truncation against cancellation for
/// inputs with derivatives of order one.
pub const FD_DEFAULT_STEP: f64 = 1e-3;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn constant_jet_has_full_order_and_zero_derivatives() {
        let jet = Jet::constant(7.0);
        assert_eq!(jet.usable_order(), MAX_ORDER);
        assert_eq!(jet.d0(), 7.0);
        for k in 1..=MAX_ORDER {
            assert_eq!(jet.d(k).unwrap(), 0.0);
        }
        assert!(jet.is_constant(1e-9));
    }

    #[test]
    fn inverse_square_root_profile_jet() {
        let expr = parse("sqrt(5)/s").unwrap();
        let jet = jet_from_expr(&expr, 1.0).unwrap();
        let want = [
            2.23606797749979,
            -2.23606797749979,
            4.47213595499958,
            -13.416407864998739,
            53.665631459994955,
        ];
        for k in 0..JET_LEN {
            let got = jet.d(k).unwrap();
            assert!(
                (got - want[k]).abs() <= 1e-12 * want[k].abs(),
                "slot {k}: got {got}, want {}",
                want[k]
            );
        }
    }

    #[test]
    fn linear_warping_profile_jet() {
        let expr = parse("9/(2*s)").unwrap();
        let jet = jet_from_expr(&expr, 1.0).unwrap();
        let want = [4.5, -4.5, 9.0, -27.0, 108.0];
        for k in 0..JET_LEN {
            assert!((jet.d(k).unwrap() - want[k]).abs() <= 1e-12 * want[k].abs());
        }
    }

    #[test]
    fn tower_jet_propagates_domain_errors() {
        let expr = parse("1/s").unwrap();
        assert!(jet_from_expr(&expr, 0.0).is_err());
    }

    #[test]
    fn truncated_tower_limits_usable_order() {
        let expr = parse("sin(s)").unwrap();
        let tower = DerivTower::truncated(&expr, 1);
        let jet = tower.jet(0.5).unwrap();
        assert_eq!(jet.usable_order(), 1);
        assert!(jet.d(2).is_err());
    }

    #[test]
    fn leibniz_product_matches_square() {
        // s * s at s = 3: value 9, first derivative 6, second 2, rest 0.
        let s_jet = Jet::new([3.0, 1.0, 0.0, 0.0, 0.0]);
        let sq = jet_mul(s_jet, s_jet);
        assert_eq!(sq.d(0).unwrap(), 9.0);
        assert_eq!(sq.d(1).unwrap(), 6.0);
        assert_eq!(sq.d(2).unwrap(), 2.0);
        assert_eq!(sq.d(3).unwrap(), 0.0);
        assert_eq!(sq.d(4).unwrap(), 0.0);
    }

    #[test]
    fn leibniz_product_of_reciprocals_is_one() {
        let expr = parse("1/s").unwrap();
        let inv = jet_from_expr(&expr, 3.0).unwrap();
        let s_jet = Jet::new([3.0, 1.0, 0.0, 0.0, 0.0]);
        let prod = jet_mul(s_jet, inv);
        assert!((prod.d(0).unwrap() - 1.0).abs() <= 1e-15);
        for k in 1..=MAX_ORDER {
            assert!(prod.d(k).unwrap().abs() <= 1e-14, "slot {k}");
        }
    }

    #[test]
    fn shift_moves_slots_and_costs_one_order() {
        let jet = Jet::new([1.0, 2.0, 3.0, 4.0, 5.0]);
        let shifted = jet_shift(jet).unwrap();
        assert_eq!(shifted.usable_order(), 3);
        assert_eq!(shifted.d(0).unwrap(), 2.0);
        assert_eq!(shifted.d(3).unwrap(), 5.0);
        assert!(shifted.d(4).is_err());

        let twice = jet_shift(shifted).unwrap();
        assert_eq!(twice.usable_order(), 2);
        assert_eq!(twice.d(0).unwrap(), 3.0);
    }

    #[test]
    fn shift_exhausts_after_four_applications() {
        let mut jet = Jet::new([1.0, 2.0, 3.0, 4.0, 5.0]);
        for _ in 0..4 {
            jet = jet_shift(jet).unwrap();
        }
        assert_eq!(jet.usable_order(), 0);
        assert!(matches!(
            jet_shift(jet),
            Err(JetError::UsableOrderExhausted { .. })
        ));
    }

    #[test]
    fn arithmetic_respects_reduced_usable_order() {
        let full = Jet::new([1.0, 1.0, 1.0, 1.0, 1.0]);
        let reduced = jet_shift(full).unwrap();
        let prod = jet_mul(reduced, full);
        assert_eq!(prod.usable_order(), 3);
        assert!(prod.d(3).is_ok());
        assert!(prod.d(4).is_err());
        let total = jet_add(reduced, full);
        assert_eq!(total.usable_order(), 3);
    }

    #[test]
    fn fd_jet_of_constant_is_flat() {
        let jet = fd_jet(|_| 7.0, 1.0, FD_DEFAULT_STEP).unwrap();
        assert_eq!(jet.d0(), 7.0);
        for k in 1..=MAX_ORDER {
            assert!(jet.d(k).unwrap().abs() <= 1e-6, "slot {k}");
        }
    }

    #[test]
    fn fd_jet_second_derivative_of_cubic() {
        let jet = fd_jet(|x| x * x * x, 2.0, 1e-3).unwrap();
        assert!((jet.d(1).unwrap() - 12.0).abs() <= 1e-5);
        assert!((jet.d(2).unwrap() - 12.0).abs() <= 1e-5);
        assert!((jet.d(3).unwrap() - 6.0).abs() <= 1e-4);
    }

    #[test]
    fn fd_jet_first_derivative_error_shrinks_like_h_squared() {
        // For f = s^3 the central difference error on f' is exactly h^2, so
        // halving the step divides the error by four.
        let exact = 12.0;
        let err_h = (fd_jet(|x| x * x * x, 2.0, 1e-3).unwrap().d(1).unwrap() - exact).abs();
        let err_h2 = (fd_jet(|x| x * x * x, 2.0, 5e-4).unwrap().d(1).unwrap() - exact).abs();
        let ratio = err_h / err_h2;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn fd_jet_rejects_bad_steps() {
        assert!(matches!(
            fd_jet(|x| x, 1.0, 0.0),
            Err(JetError::InvalidStep { .. })
        ));
        assert!(matches!(
            fd_jet(|x| x, 1.0, -1e-3),
            Err(JetError::InvalidStep { .. })
        ));
    }

    #[test]
    fn fd_jet_rejects_non_finite_samples() {
        let err = fd_jet(|x| 1.0 / (x - 1.0), 1.0, 1e-3).unwrap_err();
        assert!(matches!(err, JetError::NonFiniteSample { .. }));
    }

    #[test]
    fn with_usable_zeroes_unusable_slots() {
        let jet = Jet::with_usable([1.0, 2.0, 3.0, 4.0, 5.0], 2);
        assert_eq!(jet.usable_order(), 2);
        assert!(jet.d(3).is_err());
        let full = jet_add(jet, Jet::constant(0.0));
        assert_eq!(full.usable_order(), 2);
    }
}
