//! Verification engine for triharmonic Frenet curves in 3-dimensional
//! f-Kenmotsu manifolds.
//!
//! The crate evaluates the third-order tension field of a unit-speed Frenet
//! curve along two independent routes: a generic recursion built from the
//! frame covariant derivative and the ambient curvature operator, and the
//! closed-form component expansions. On top of that it provides the reduced
//! residual systems for the constant-curvature and non-constant-curvature
//! case splits, closed-form solution profiles, a damped Newton search for
//! constant-curvature solutions, and grid scanners that certify or refute a
//! candidate curve numerically.
//!
//! Layering, bottom to top:
//!
//! * [`dsl`] - scalar expressions in the arc-length parameter with exact
//!   structural differentiation,
//! * [`jets`] - fixed-order derivative jets and finite-difference probes,
//! * [`frenet`] - covariant derivatives of frame fields along a curve,
//! * [`kenmotsu`] - ambient manifold data and the curvature operator,
//! * [`residual`] - scale-tracked residual values,
//! * [`tension`] - the tension fields and the full residual system,
//! * [`casebook`] - per-case reduced systems, closed forms, and verdicts,
//! * [`solver`] - Newton root search and grid scans,
//! * [`sampling`] - seeded random inputs for certification sweeps.

pub mod casebook;
pub mod dsl;
pub mod frenet;
pub mod jets;
pub mod kenmotsu;
pub mod residual;
pub mod sampling;
pub mod solver;
pub mod tension;
