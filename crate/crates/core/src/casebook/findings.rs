//! Quantified adjudication of ambiguous readings in the reduced systems.
//!
//! Where a reduction admits two readings (a sign, an exponent), both are
//! evaluated against the independently computed general system over random
//! samples. A variant is consistent when its worst deviation stays below the
//! tolerance; a finding is resolved when exactly one variant is consistent
//! and it is the one the evaluators use.

use rand::Rng;
use serde::Serialize;

use crate::casebook::{
    case_iii_eq3_variant, case_residuals, slant_eq3_variant, CaseId, CurvatureFactorSign,
    TorsionPower,
};
use crate::jets::Jet;
use crate::kenmotsu::{eta_from_model, EtaModel, ManifoldParams};
use crate::sampling::{random_curvature_jet, random_params, random_point, random_slant_point, rng};
use crate::tension::{residual_system, tau3_expanded, CurvePoint};

/// Tolerance separating a consistent variant from an inconsistent one.
pub const FINDINGS_TOL: f64 = 1e-10;

/// Outcome of one reading of an ambiguous display.
#[derive(Debug, Clone, Serialize)]
pub struct VariantOutcome {
    pub label: String,
    pub max_rel_deviation: f64,
    pub consistent: bool,
}

/// One adjudicated ambiguity, with every reading measured.
#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub name: String,
    pub description: String,
    pub variants: Vec<VariantOutcome>,
    pub adjudicated: String,
    pub samples: usize,
    pub tolerance: f64,
}

impl Finding {
    /// True when exactly one variant is consistent and it is the
    /// adjudicated one.
    pub fn resolved(&self) -> bool {
        let consistent: Vec<&VariantOutcome> =
            self.variants.iter().filter(|v| v.consistent).collect();
        consistent.len() == 1 && consistent[0].label == self.adjudicated
    }
}

fn outcome(label: &str, max_rel_deviation: f64) -> VariantOutcome {
    VariantOutcome {
        label: label.to_string(),
        max_rel_deviation,
        consistent: max_rel_deviation <= FINDINGS_TOL,
    }
}

/// The tangent component of the folded third tension field against the
/// first system equation: the factor is -5, not +5.
pub fn fold_sign_finding() -> Finding {
    let mut r = rng(101);
    let samples = 200;
    let mut dev_minus = 0.0_f64;
    let mut dev_plus = 0.0_f64;
    for _ in 0..samples {
        let pt = random_point(&mut r);
        let c = tau3_expanded(&pt);
        let fold = c.fold(pt.params().eta());
        let [e1, _, _] = residual_system(&pt);
        let norm = 1.0 + e1.scale;
        dev_minus = dev_minus.max((fold[0] + 5.0 * e1.value).abs() / norm);
        dev_plus = dev_plus.max((fold[0] - 5.0 * e1.value).abs() / norm);
    }
    Finding {
        name: "fold-sign".to_string(),
        description: "The tangent component of the folded third tension field equals -5 times \
                      the first system equation; the +5 reading is inconsistent."
            .to_string(),
        variants: vec![outcome("-5 * eq1", dev_minus), outcome("+5 * eq1", dev_plus)],
        adjudicated: "-5 * eq1".to_string(),
        samples,
        tolerance: FINDINGS_TOL,
    }
}

fn random_constant_torsion_point<R: Rng>(r: &mut R) -> CurvePoint {
    let s = r.random_range(0.5..3.0);
    let k1 = random_curvature_jet(r);
    let magnitude = r.random_range(0.3..1.5);
    let sign = if r.random_range(0.0..1.0) < 0.5 { -1.0 } else { 1.0 };
    let k2 = Jet::constant(sign * magnitude);
    let params = random_params(r);
    CurvePoint::new(s, k1, k2, params).expect("positive curvature and full jets")
}

/// Exponent of the torsion in the derivative term of the third
/// constant-torsion equation: cubed agrees with the general system,
/// squared does not.
pub fn torsion_power_finding() -> Finding {
    let mut r = rng(202);
    let samples = 200;
    let mut dev_cubed = 0.0_f64;
    let mut dev_squared = 0.0_f64;
    for _ in 0..samples {
        let pt = random_constant_torsion_point(&mut r);
        let [_, _, e3] = residual_system(&pt);
        let norm = 1.0 + e3.scale;
        let cubed = case_iii_eq3_variant(&pt, TorsionPower::Cubed, CurvatureFactorSign::Minus);
        let squared = case_iii_eq3_variant(&pt, TorsionPower::Squared, CurvatureFactorSign::Minus);
        dev_cubed = dev_cubed.max((cubed.value - e3.value).abs() / norm);
        dev_squared = dev_squared.max((squared.value - e3.value).abs() / norm);
    }
    Finding {
        name: "case-iii-torsion-power".to_string(),
        description: "The torsion factor multiplying k1' in the third constant-torsion equation \
                      is cubed; the squared reading disagrees with the general system."
            .to_string(),
        variants: vec![outcome("cubed", dev_cubed), outcome("squared", dev_squared)],
        adjudicated: "cubed".to_string(),
        samples,
        tolerance: FINDINGS_TOL,
    }
}

/// Sign of the contact coefficient inside the (A, B) factor of the third
/// reduced equation, measured over both the constant-torsion and the slant
/// families: minus agrees with the general system, plus does not.
pub fn curvature_sign_finding() -> Finding {
    let mut r = rng(303);
    let per_family = 150;
    let mut dev_minus = 0.0_f64;
    let mut dev_plus = 0.0_f64;
    for _ in 0..per_family {
        let pt = random_constant_torsion_point(&mut r);
        let [_, _, e3] = residual_system(&pt);
        let norm = 1.0 + e3.scale;
        let minus = case_iii_eq3_variant(&pt, TorsionPower::Cubed, CurvatureFactorSign::Minus);
        let plus = case_iii_eq3_variant(&pt, TorsionPower::Cubed, CurvatureFactorSign::Plus);
        dev_minus = dev_minus.max((minus.value - e3.value).abs() / norm);
        dev_plus = dev_plus.max((plus.value - e3.value).abs() / norm);
    }
    for _ in 0..per_family {
        let pt = random_slant_point(&mut r);
        let [_, _, e3] = residual_system(&pt);
        let norm = 1.0 + e3.scale;
        let minus = slant_eq3_variant(&pt, CurvatureFactorSign::Minus).expect("slant data matches");
        let plus = slant_eq3_variant(&pt, CurvatureFactorSign::Plus).expect("slant data matches");
        dev_minus = dev_minus.max((minus.value - e3.value).abs() / norm);
        dev_plus = dev_plus.max((plus.value - e3.value).abs() / norm);
    }
    Finding {
        name: "eq3-curvature-sign".to_string(),
        description: "The curvature factor in the third reduced equation reads A - B(...); the \
                      A + B(...) reading disagrees with the general system in both the \
                      constant-torsion and slant reductions."
            .to_string(),
        variants: vec![outcome("minus", dev_minus), outcome("plus", dev_plus)],
        adjudicated: "minus".to_string(),
        samples: 2 * per_family,
        tolerance: FINDINGS_TOL,
    }
}

/// Scalar curvature forced for a slant circle with vanishing B: the reduced
/// system holds with r = +3 k1^2 and fails with r = -3 k1^2.
pub fn slant_r_sign_finding() -> Finding {
    let mut r = rng(404);
    let samples = 100;
    let mut dev_plus = 0.0_f64;
    let mut dev_minus = 0.0_f64;
    for _ in 0..samples {
        let k1v = r.random_range(0.5..2.0);
        let theta = r.random_range(0.3..1.2);
        let f0 = k1v * r.random_range(0.1..0.45);
        let f1 = -k1v * k1v / 2.0 - f0 * f0;
        for (sigma, dev) in [(1.0, &mut dev_plus), (-1.0, &mut dev_minus)] {
            let scalar = sigma * 3.0 * k1v * k1v;
            let eta = eta_from_model(&EtaModel::Slant(theta), f0, k1v).expect("admissible slant");
            let f = Jet::with_usable([f0, f1, 0.0, 0.0, 0.0], 1);
            let params = ManifoldParams::new(f, scalar, eta).expect("unit eta");
            let pt = CurvePoint::new(1.0, Jet::constant(k1v), Jet::constant(0.0), params)
                .expect("constant circle data");
            let rows = case_residuals(CaseId::SlantCaseII, &pt).expect("hypotheses hold");
            for row in rows {
                *dev = dev.max(row.relative());
            }
        }
    }
    Finding {
        name: "slant-case-ii-r-sign".to_string(),
        description: "With the closed-form warping (so B = 0), a slant circle solves the reduced \
                      system exactly when r = +3 k1^2; the -3 k1^2 reading fails it."
            .to_string(),
        variants: vec![outcome("+3 k1^2", dev_plus), outcome("-3 k1^2", dev_minus)],
        adjudicated: "+3 k1^2".to_string(),
        samples,
        tolerance: FINDINGS_TOL,
    }
}

/// Every adjudicated finding, in a fixed order.
pub fn all_findings() -> Vec<Finding> {
    vec![
        fold_sign_finding(),
        torsion_power_finding(),
        curvature_sign_finding(),
        slant_r_sign_finding(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_finding_resolves_to_its_adjudicated_reading() {
        for finding in all_findings() {
            assert!(
                finding.resolved(),
                "{}: variants {:?}",
                finding.name,
                finding.variants
            );
            assert!(finding.samples > 0);
        }
    }

    #[test]
    fn adjudicated_labels_are_stable() {
        let names: Vec<(String, String)> = all_findings()
            .into_iter()
            .map(|f| (f.name, f.adjudicated))
            .collect();
        assert_eq!(
            names,
            vec![
                ("fold-sign".to_string(), "-5 * eq1".to_string()),
                ("case-iii-torsion-power".to_string(), "cubed".to_string()),
                ("eq3-curvature-sign".to_string(), "minus".to_string()),
                ("slant-case-ii-r-sign".to_string(), "+3 k1^2".to_string()),
            ]
        );
    }

    #[test]
    fn rejected_variants_deviate_by_orders_of_magnitude() {
        for finding in all_findings() {
            let rejected: Vec<&VariantOutcome> = finding
                .variants
                .iter()
                .filter(|v| v.label != finding.adjudicated)
                .collect();
            assert!(!rejected.is_empty());
            for v in rejected {
                assert!(
                    v.max_rel_deviation > 1e-3,
                    "{} / {}: {}",
                    finding.name,
                    v.label,
                    v.max_rel_deviation
                );
            }
        }
    }
}
