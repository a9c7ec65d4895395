//! Seeded random generators for stress testing the algebra.
//!
//! Everything here is deterministic: the same seed yields the same stream on
//! every platform, so a failing draw can be reproduced from its seed alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jets::Jet;
use crate::kenmotsu::{eta_from_model, EtaModel, ManifoldParams};
use crate::tension::CurvePoint;

/// Deterministic generator for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Curvature jet: value in [0.3, 2.5), derivatives in [-1.5, 1.5).
pub fn random_curvature_jet<R: Rng>(rng: &mut R) -> Jet {
    let mut d = [0.0; 5];
    d[0] = rng.random_range(0.3..2.5);
    for slot in d.iter_mut().skip(1) {
        *slot = rng.random_range(-1.5..1.5);
    }
    Jet::new(d)
}

/// Torsion jet with every slot in [-1.5, 1.5).
pub fn random_torsion_jet<R: Rng>(rng: &mut R) -> Jet {
    let mut d = [0.0; 5];
    for slot in d.iter_mut() {
        *slot = rng.random_range(-1.5..1.5);
    }
    Jet::new(d)
}

/// Uniformly random unit vector, by rejection from the cube.
pub fn random_unit_eta<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (0.2..=1.0).contains(&norm) {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Ambient data with a random warping 1-jet, scalar curvature in [-5, 5),
/// and a random unit contact field.
pub fn random_params<R: Rng>(rng: &mut R) -> ManifoldParams {
    let f = Jet::with_usable(
        [
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            0.0,
            0.0,
            0.0,
        ],
        1,
    );
    let r = rng.random_range(-5.0..5.0);
    let eta = random_unit_eta(rng);
    ManifoldParams::new(f, r, eta).expect("unit eta and usable warping jet")
}

/// Full curve point with arc length in [0.5, 3).
pub fn random_point<R: Rng>(rng: &mut R) -> CurvePoint {
    let s = rng.random_range(0.5..3.0);
    let k1 = random_curvature_jet(rng);
    let k2 = random_torsion_jet(rng);
    let params = random_params(rng);
    CurvePoint::new(s, k1, k2, params).expect("positive curvature and full jets")
}

/// Curve point whose contact field follows the slant model for a random
/// admissible angle: |f| < k1 keeps the binormal radicand positive.
pub fn random_slant_point<R: Rng>(rng: &mut R) -> CurvePoint {
    let s = rng.random_range(0.5..3.0);
    let k1 = random_curvature_jet(rng);
    let k2 = random_torsion_jet(rng);
    let theta = rng.random_range(0.2..1.3);
    let f0 = k1.d0() * rng.random_range(-0.9..0.9);
    let f1 = rng.random_range(-1.5..1.5);
    let r = rng.random_range(-5.0..5.0);
    let eta = eta_from_model(&EtaModel::Slant(theta), f0, k1.d0()).expect("admissible slant data");
    let f = Jet::with_usable([f0, f1, 0.0, 0.0, 0.0], 1);
    let params = ManifoldParams::new(f, r, eta).expect("unit slant eta");
    CurvePoint::new(s, k1, k2, params).expect("positive curvature and full jets")
}
