//! Consistency checks on the transported states: the SO(3) conjugation of
//! vector operators by `V(t)`, the momentum eigenvalue equation, and the
//! helicity invariant `I(t) = k^(t) . J`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::analytic_solution::rotation_operator;
use crate::error::{FiberError, Result};
use crate::evolution::hamiltonian_at;
use crate::guide_geometry::WaveVectorTrack;
use crate::spin_algebra::{commutator, max_abs, CMatrix, CVector, SpinRepresentation, I};

/// Coefficients `M` of `V^H p_i V = sum_j M_ij p_j` for any vector operator `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugationMatrix {
    pub theta: f64,
    pub phi: f64,
    pub matrix: Matrix3<f64>,
}

impl ConjugationMatrix {
    /// `max |M M^T - I|` and `|det M - 1|`, whichever is larger.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = self.matrix;
        (m * m.transpose() - Matrix3::identity())
            .abs()
            .max()
            .max((m.determinant() - 1.0).abs())
    }
}

/// Assembles `M` term by term from
///
/// ```text
/// V^H p1 V = p1 + sin(th) cos(ph) p3 + (1 - cos th) cos(ph)/th (beta p+ + beta* p-)
/// V^H p2 V = p2 + sin(th) sin(ph) p3 + (1 - cos th) sin(ph)/th (beta p+ + beta* p-)
/// V^H p3 V = p3 + (cos th - 1) p3    + sin(th)/th             (beta p+ + beta* p-)
/// ```
///
/// with `p+- = p1 +- i p2`. The `1/th` is absorbed into `beta/th = -exp(-i ph)/2`,
/// which keeps the expression finite at `th = 0`.
pub fn conjugation_matrix(theta: f64, phi: f64) -> ConjugationMatrix {
    let beta_over_theta = Complex64::from_polar(-0.5, -phi);
    // beta p+ + beta* p- = 2 Re(beta) p1 - 2 Im(beta) p2
    let ladder = Vector3::new(2.0 * beta_over_theta.re, -2.0 * beta_over_theta.im, 0.0);
    let (st, ct) = theta.sin_cos();
    let one_minus_ct = 2.0 * (0.5 * theta).sin().powi(2);
    let (sp, cp) = phi.sin_cos();

    let row1 = Vector3::x() + Vector3::z() * (st * cp) + ladder * (one_minus_ct * cp);
    let row2 = Vector3::y() + Vector3::z() * (st * sp) + ladder * (one_minus_ct * sp);
    let row3 = Vector3::z() + Vector3::z() * (ct - 1.0) + ladder * st;
    ConjugationMatrix {
        theta,
        phi,
        matrix: Matrix3::from_rows(&[row1.transpose(), row2.transpose(), row3.transpose()]),
    }
}

/// Largest entry of `V^H J_i V - sum_j M_ij J_j` over `i`.
pub fn adjoint_action_defect(rep: &SpinRepresentation, theta: f64, phi: f64) -> f64 {
    let v = rotation_operator(theta, phi, rep);
    let m = conjugation_matrix(theta, phi).matrix;
    (0..3)
        .map(|i| {
            let lhs = v.matrix().adjoint() * rep.component(i) * v.matrix();
            let rhs = (0..3).fold(CMatrix::zeros(rep.dim(), rep.dim()), |acc, j| {
                acc + rep.component(j).map(|z| z * m[(i, j)])
            });
            max_abs(&(lhs - rhs))
        })
        .fold(0.0, f64::max)
}

/// Eigenvalue of `p_i` on `V(t)|m, k z^>`:
/// `k sin(th)(d_1i cos ph + d_2i sin ph) - k (1 - cos th) d_3i + k_i`, with
/// `(k_1, k_2, k_3) = (0, 0, k)` the momentum of the reference state.
pub fn momentum_eigenvalues(track: &WaveVectorTrack, n: usize) -> Vector3<f64> {
    let k = track.k_mag;
    let (th, ph) = (track.theta[n], track.phi[n]);
    let initial = Vector3::new(0.0, 0.0, k);
    let one_minus_ct = 2.0 * (0.5 * th).sin().powi(2);
    Vector3::new(k * th.sin() * ph.cos(), k * th.sin() * ph.sin(), -k * one_minus_ct) + initial
}

/// Same eigenvalue obtained as `M(th, ph) (0, 0, k)`.
pub fn momentum_eigenvalues_via_conjugation(track: &WaveVectorTrack, n: usize) -> Vector3<f64> {
    conjugation_matrix(track.theta[n], track.phi[n]).matrix * Vector3::new(0.0, 0.0, track.k_mag)
}

/// `k^ . J`.
pub fn helicity(rep: &SpinRepresentation, k_hat: &Vector3<f64>) -> Result<CMatrix> {
    let norm = k_hat.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(FiberError::NonUnitVector {
            what: "helicity direction",
            norm,
        });
    }
    Ok(rep.dot(k_hat))
}

/// `max | dI/dt - i [I, H] |` at interior node `n`, with `dI/dt` from the two
/// neighbouring midpoints.
pub fn lvn_residual(track: &WaveVectorTrack, rep: &SpinRepresentation, n: usize) -> Result<f64> {
    if track.len() < 3 {
        return Err(FiberError::InvalidTrack("residual needs at least three nodes".into()));
    }
    if n == 0 || n + 1 >= track.len() {
        return Err(FiberError::InvalidTrack(format!("node {n} is not interior")));
    }
    let ahead = rep.dot(&track.mid_k_hat(n));
    let behind = rep.dot(&track.mid_k_hat(n - 1));
    let d_dt = (ahead - behind).map(|z| z / track.dt);
    let inv = rep.dot(&track.k_hat(n));
    let h = hamiltonian_at(&track.omega[n], rep);
    let bracket = commutator(&inv, &h).map(|z| z * I);
    Ok(max_abs(&(d_dt - bracket)))
}

pub fn lvn_residuals(track: &WaveVectorTrack, rep: &SpinRepresentation) -> Result<Vec<f64>> {
    (1..track.len() - 1).map(|n| lvn_residual(track, rep, n)).collect()
}

/// `|<m, k^(t_n)|psi_n>|^2` for every `m`, using `V(t_n)|m>` as the eigenbasis.
pub fn helicity_populations(
    track: &WaveVectorTrack,
    rep: &SpinRepresentation,
    states: &[CVector],
) -> Result<Vec<Vec<f64>>> {
    if states.len() != track.len() {
        return Err(FiberError::DimensionMismatch {
            expected: track.len(),
            found: states.len(),
        });
    }
    Ok(states
        .iter()
        .enumerate()
        .map(|(n, psi)| {
            let coeffs = rotation_operator(track.theta[n], track.phi[n], rep).matrix().adjoint() * psi;
            coeffs.iter().map(|c| c.norm_sqr()).collect()
        })
        .collect())
}

/// Largest change of any helicity population from its value at `t_0`.
pub fn population_drift(populations: &[Vec<f64>]) -> f64 {
    let Some(first) = populations.first() else {
        return 0.0;
    };
    populations
        .iter()
        .flat_map(|p| p.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// One named pass/fail check with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            passed: measured <= threshold,
        }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            passed: measured >= threshold,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub checks: Vec<Check>,
}

impl VerificationSummary {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
