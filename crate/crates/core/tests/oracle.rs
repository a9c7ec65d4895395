//! Finite difference oracle for the exact derivative towers. Every
//! expression in the corpus is differentiated symbolically to depth four
//! and checked against central difference stencils at several sample
//! points, with looser tolerances at the orders where the stencils lose
//! precision.

use trikurv_core::dsl::{eval, parse};
use trikurv_core::jets::{fd_jet, DerivTower, FD_DEFAULT_STEP};

/// Expressions paired with pole-safe sample points.
const CORPUS: &[(&str, &[f64])] = &[
    ("0", &[0.0, 1.0, -2.0]),
    ("1", &[0.0, 2.5]),
    ("s", &[-1.0, 0.0, 3.0]),
    ("-s", &[-1.0, 2.0]),
    ("2*s", &[0.5, 1.5]),
    ("s + 1", &[0.0, 4.0]),
    ("s - 3", &[1.0, -1.0]),
    ("s*s", &[0.5, 2.0]),
    ("s^2", &[0.5, 2.0]),
    ("s^3", &[0.4, 1.2]),
    ("s^4", &[0.3, 1.1]),
    ("s^(-1)", &[0.5, 1.0, 2.0]),
    ("s^(-2)", &[0.7, 1.5]),
    ("1/s", &[0.5, 1.0, 3.0]),
    ("1/(1 + s^2)", &[0.3, 1.0, -1.5]),
    ("(s + 1)/(s + 2)", &[0.0, 1.0]),
    // Sample points stay away from 0 for anything containing a power of s:
    // repeated symbolic differentiation lowers the exponent below zero, and
    // the lowered factor is evaluated even where its coefficient vanishes.
    ("s^2 - 3*s + 2", &[0.4, 1.0, 2.5]),
    ("2 + 3*s + s^2 + s^3", &[0.3, 1.0]),
    ("(1 - s)*(1 + s)", &[0.2, 0.8]),
    ("-189/(2*s^2)", &[1.0, 1.5, 3.0]),
    ("sqrt(5)/s", &[0.5, 1.0, 2.0]),
    ("sqrt(s)", &[0.5, 1.0, 4.0]),
    ("sqrt(1 + s^2)", &[0.3, 1.0, -2.0]),
    ("sqrt(2 + s)", &[0.0, 1.0]),
    ("s^(1/2)", &[0.6, 2.0]),
    ("s^(3/2)", &[0.6, 2.0]),
    ("s^(-3/2)", &[0.8, 1.4]),
    ("sin(s)", &[0.0, 0.7, 2.0]),
    ("cos(s)", &[0.0, 0.7, 2.0]),
    ("sin(2*s)", &[0.3, 1.0]),
    ("cos(s/2)", &[0.5, 2.0]),
    ("sin(s)*cos(s)", &[0.4, 1.1]),
    ("sin(s)^2", &[0.4, 1.1]),
    ("2 + sin(s)", &[0.5, 1.7]),
    ("tan(s)", &[0.0, 0.4, 1.0]),
    ("tan(s/2)", &[0.3, 1.2]),
    ("(1/sqrt(2))*tan((0 - s)/sqrt(2))", &[0.2, 0.9]),
    ("sqrt(2)*tan(sqrt(2)*(0 - s))", &[0.1, 0.5]),
    ("tan(0 - s)", &[0.2, 0.8]),
    ("exp(s)", &[0.0, 1.0, -1.0]),
    ("exp(-s)", &[0.0, 1.0]),
    ("exp(s^2)", &[0.4, 0.6]),
    ("exp(sin(s))", &[0.3, 1.0]),
    ("ln(s)", &[0.5, 1.0, 3.0]),
    ("ln(1 + s^2)", &[0.5, 1.0]),
    ("ln(2 + sin(s))", &[0.4, 1.3]),
    ("s*ln(s)", &[0.6, 2.0]),
    ("s*exp(s)", &[0.2, 1.0]),
    ("sin(s)/s", &[0.5, 1.2]),
    ("sqrt(1 + cos(s)^2)", &[0.3, 1.0]),
    ("exp(s)*sin(s) + cos(s)/(1 + s^2)", &[0.2, 0.9]),
    ("9/(2*s)", &[0.5, 1.0, 2.0]),
];

#[test]
fn exact_towers_match_central_differences() {
    for (source, samples) in CORPUS {
        let expr = parse(source).unwrap();
        let tower = DerivTower::new(&expr);
        for &s in *samples {
            let exact = tower.jet(s).unwrap();
            let approx =
                fd_jet(|x| eval(&expr, x).unwrap_or(f64::NAN), s, FD_DEFAULT_STEP).unwrap();
            for k in 0..=3 {
                let e = exact.d(k).unwrap();
                let a = approx.d(k).unwrap();
                let tol = (1e-4f64).max(1e-4 * e.abs());
                assert!(
                    (e - a).abs() <= tol,
                    "{source} at s = {s}, order {k}: exact {e} vs stencil {a}"
                );
            }
            let e = exact.d(4).unwrap();
            let a = approx.d(4).unwrap();
            let tol = 1e-2 * (1.0 + e.abs() + exact.d0().abs());
            assert!(
                (e - a).abs() <= tol,
                "{source} at s = {s}, order 4: exact {e} vs stencil {a}"
            );
        }
    }
}

#[test]
fn second_order_stencil_error_shrinks_quadratically() {
    let expr = parse("exp(sin(s))").unwrap();
    let tower = DerivTower::new(&expr);
    let s = 0.7;
    let exact = tower.jet(s).unwrap().d(2).unwrap();
    let error_at = |h: f64| {
        let approx = fd_jet(|x| eval(&expr, x).unwrap_or(f64::NAN), s, h)
            .unwrap()
            .d(2)
            .unwrap();
        (approx - exact).abs()
    };
    let coarse = error_at(1e-2);
    let fine = error_at(5e-3);
    let ratio = coarse / fine;
    assert!(
        (3.0..=5.0).contains(&ratio),
        "halving the step should quarter the error, got ratio {ratio}"
    );
}
