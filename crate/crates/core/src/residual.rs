//! Scale-tracked residual values.
//!
//! Every equation in the engine is evaluated as a sum of distributed
//! monomial terms. The largest term magnitude is kept alongside the sum, so
//! a residual can be judged relative to the size of what cancelled rather
//! than against an absolute threshold. A residual of 1e-10 means nothing by
//! itself; a residual of 1e-10 against terms of order 1e2 is twelve digits
//! of cancellation.

use serde::Serialize;

/// Named residual with the scale of the largest contributing term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, scale: f64) -> Residual {
        Residual {
            name: name.into(),
            value,
            scale,
        }
    }

    /// Builds the residual from distributed terms, recording their largest
    /// magnitude as the scale.
    pub fn from_terms(name: impl Into<String>, terms: &[f64]) -> Residual {
        let (value, scale) = sum_terms(terms);
        Residual::new(name, value, scale)
    }

    /// Relative acceptance test: |value| <= tol * scale.
    pub fn passes(&self, tol: f64) -> bool {
        self.value.abs() <= tol * self.scale
    }

    /// |value| / scale, or |value| itself when every term vanished.
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// Appends `coeff * part` for every summand of a compound factor, so the
/// term list keeps one entry per monomial even when the factor cancels.
pub fn push_product(terms: &mut Vec<f64>, coeff: f64, parts: &[f64]) {
    for part in parts {
        terms.push(coeff * part);
    }
}

/// Sums the terms and returns the pair (sum, largest absolute term).
pub fn sum_terms(terms: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut scale = 0.0_f64;
    for &t in terms {
        sum += t;
        scale = scale.max(t.abs());
    }
    (sum, scale)
}
