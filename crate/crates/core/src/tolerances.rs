//! Default numerical thresholds.
//!
//! Every check in the crate reads its threshold from a [`Tolerances`] value so
//! that scenario files can override individual entries. The defaults are the
//! contract values; tests pin them.

use serde::{Deserialize, Serialize};

/// Angular-momentum algebra identities (commutators, Casimir, Hermiticity).
pub const ALGEBRA: f64 = 1e-12;
/// Skew-Hermiticity accepted by the matrix exponential.
pub const SKEW_HERMITIAN: f64 = 1e-12;
/// `U U^H = I` for every unitary produced.
pub const UNITARITY: f64 = 1e-10;
/// Samples with `sin(theta)` at or below this are treated as on the pole.
pub const POLE_EPSILON: f64 = 1e-8;
/// Relative deviation of `|dr/ds|` from one before a curve is rejected.
pub const ARC_LENGTH_SPEED: f64 = 1e-10;
/// Tangents shorter than this are degenerate.
pub const DEGENERATE_TANGENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max `| ||psi|| - 1 |` over the run.
    pub norm: f64,
    /// Max `1 - |<analytic|numeric>|` over the run.
    pub fidelity: f64,
    /// Max `|<I(t)> - m|`, also bounds helicity-population drift.
    pub helicity: f64,
    /// `|<H>| <= dynamical_phase * |omega|` at every node.
    pub dynamical_phase: f64,
    /// Transport residual relative to `k * Omega`.
    pub transport: f64,
    /// Momentum eigenvalue mismatch relative to `k`.
    pub momentum: f64,
    /// Coefficient `C` in `C * max(j,1)^3 * (Omega dt)^2 * Omega` for the Schrodinger residual.
    pub schrodinger_coeff: f64,
    /// Coefficient `C` in `C * max(j,1) * (Omega dt)^2 * Omega` for the Liouville-von Neumann residual.
    pub lvn_coeff: f64,
    /// Max state difference between the midpoint propagator and the RK4 oracle.
    pub oracle: f64,
    /// Absolute tolerance on an expected final geometric phase, radians.
    pub phase: f64,
    /// Relative tolerance on an expected arc length.
    pub arc_length: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: 1e-10,
            fidelity: 1e-8,
            helicity: 1e-8,
            dynamical_phase: 1e-6,
            transport: 1e-8,
            momentum: 1e-9,
            schrodinger_coeff: 1.0,
            lvn_coeff: 1.0,
            oracle: 1e-7,
            phase: 1e-6,
            arc_length: 1e-3,
        }
    }
}
