//! Closed-form transported states.
//!
//! Starting from the helicity eigenstate `V(theta_0, phi_0)|m>`, the exact
//! solution is
//!
//! ```text
//! |m, k(t)> = exp(-i phi_m(t)) V(t) |m>,
//! V(t)      = exp(beta J+ - beta* J-),   beta = -(theta/2) exp(-i phi),
//! phi_m(t)  = m * integral_0^t phidot (1 - cos theta) dt'
//! ```
//!
//! `phi_m / m` is the signed solid angle swept by `k^` as seen from +z. In the
//! working frame `theta_0 = 0` and the initial state is just `|m>`.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{FiberError, Result};
use crate::evolution::QuantumState;
use crate::guide_geometry::WaveVectorTrack;
use crate::spin_algebra::{expm_skew, CVector, SpinRepresentation, UnitaryMatrix, I};
use crate::tolerances::POLE_EPSILON;

/// `phi_m(t_n)` on the track grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub times: Vec<f64>,
    pub m: f64,
    pub values: Vec<f64>,
}

/// `phidot` at the nodes from differences on the doubled grid.
fn azimuth_rate(track: &WaveVectorTrack) -> Vec<f64> {
    let n = track.len();
    let dt = track.dt;
    let (phi, mid) = (&track.phi, &track.mid_phi);
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * phi[0] + 4.0 * mid[0] - phi[1]) / dt
            } else if i == n - 1 {
                (3.0 * phi[i] - 4.0 * mid[i - 1] + phi[i - 1]) / dt
            } else {
                (mid[i] - mid[i - 1]) / dt
            }
        })
        .collect()
}

/// Cumulative `integral phidot (1 - cos theta) dt` by the trapezoidal rule.
pub fn solid_angle_series(track: &WaveVectorTrack) -> Result<Vec<f64>> {
    let rate = azimuth_rate(track);
    let integrand: Vec<f64> = track
        .theta
        .iter()
        .zip(&rate)
        .enumerate()
        .map(|(i, (&th, &phidot))| {
            if i > 0 && th.sin() <= POLE_EPSILON && th.cos() < 0.0 && phidot != 0.0 {
                return Err(FiberError::PolePassage { t: track.times[i] });
            }
            // 1 - cos(theta) without cancellation near the north pole.
            Ok(phidot * 2.0 * (0.5 * th).sin().powi(2))
        })
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(integrand.len());
    out.push(0.0);
    for w in integrand.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * track.dt;
        out.push(acc);
    }
    Ok(out)
}

pub fn phase_series(track: &WaveVectorTrack, m: f64) -> Result<PhaseSeries> {
    let solid = solid_angle_series(track)?;
    Ok(PhaseSeries {
        times: track.times.clone(),
        m,
        values: solid.into_iter().map(|s| m * s).collect(),
    })
}

/// `phi_m(t_n)`.
pub fn geometric_phase(track: &WaveVectorTrack, m: f64, n: usize) -> Result<f64> {
    if n >= track.len() {
        return Err(FiberError::DimensionMismatch {
            expected: track.len(),
            found: n,
        });
    }
    Ok(m * solid_angle_series(track)?[n])
}

/// `V = exp(beta J+ - beta* J-)` with `beta = -(theta/2) exp(-i phi)`.
pub fn rotation_operator(theta: f64, phi: f64, rep: &SpinRepresentation) -> UnitaryMatrix {
    let beta = Complex64::from_polar(-0.5 * theta, -phi);
    let generator = rep.jplus.map(|z| z * beta) - rep.jminus.map(|z| z * beta.conj());
    expm_skew(&generator).expect("ladder generator is skew-Hermitian")
}

/// The same operator written as `exp(-i theta n.J)`, `n = (-sin phi, cos phi, 0)`.
pub fn rotation_operator_axis_form(theta: f64, phi: f64, rep: &SpinRepresentation) -> UnitaryMatrix {
    let axis = Vector3::new(-phi.sin(), phi.cos(), 0.0);
    expm_skew(&rep.dot(&(axis * theta)).map(|z| -I * z)).expect("axis generator is skew-Hermitian")
}

/// Normalised helicity-basis coefficients `(m, c_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicityWeights(Vec<(f64, Complex64)>);

impl HelicityWeights {
    pub fn pure(m: f64) -> Self {
        HelicityWeights(vec![(m, Complex64::new(1.0, 0.0))])
    }

    pub fn new(rep: &SpinRepresentation, weights: Vec<(f64, Complex64)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FiberError::validation("superposition", "must not be empty"));
        }
        let mut seen = Vec::new();
        for (m, _) in &weights {
            let idx = rep.index_of(*m)?;
            if seen.contains(&idx) {
                return Err(FiberError::validation("superposition", format!("m = {m} listed twice")));
            }
            seen.push(idx);
        }
        let norm = weights.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(FiberError::validation(
                "superposition",
                "coefficients must not all vanish",
            ));
        }
        Ok(HelicityWeights(
            weights.into_iter().map(|(m, c)| (m, c / norm)).collect(),
        ))
    }

    pub fn components(&self) -> &[(f64, Complex64)] {
        &self.0
    }

    /// `sum |c_m|^2 m`.
    pub fn mean_helicity(&self) -> f64 {
        self.0.iter().map(|(m, c)| c.norm_sqr() * m).sum()
    }

    /// The component with the largest weight (first on ties).
    pub fn dominant_m(&self) -> f64 {
        self.0
            .iter()
            .fold(None::<(f64, f64)>, |best, &(m, c)| match best {
                Some((_, w)) if w >= c.norm_sqr() => best,
                _ => Some((m, c.norm_sqr())),
            })
            .map(|(m, _)| m)
            .expect("non-empty weights")
    }

    pub fn is_pure(&self) -> bool {
        self.0.len() == 1
    }
}

/// Precomputed solid-angle series for evaluating exact states on a track.
#[derive(Debug, Clone)]
pub struct AnalyticSolution<'a> {
    track: &'a WaveVectorTrack,
    solid_angle: Vec<f64>,
}

impl<'a> AnalyticSolution<'a> {
    pub fn new(track: &'a WaveVectorTrack) -> Result<Self> {
        Ok(AnalyticSolution {
            track,
            solid_angle: solid_angle_series(track)?,
        })
    }

    pub fn solid_angle(&self) -> &[f64] {
        &self.solid_angle
    }

    pub fn phase(&self, m: f64, n: usize) -> f64 {
        m * self.solid_angle[n]
    }

    pub fn rotation(&self, rep: &SpinRepresentation, n: usize) -> UnitaryMatrix {
        rotation_operator(self.track.theta[n], self.track.phi[n], rep)
    }

    /// `sum_m c_m exp(-i phi_m(t_n)) V(t_n) |m>`.
    pub fn state(&self, rep: &SpinRepresentation, weights: &HelicityWeights, n: usize) -> Result<CVector> {
        let v = self.rotation(rep, n);
        let mut coeffs = CVector::zeros(rep.dim());
        for &(m, c) in weights.components() {
            coeffs[rep.index_of(m)?] += c * Complex64::from_polar(1.0, -self.phase(m, n));
        }
        Ok(v.apply(&coeffs))
    }

    pub fn states(&self, rep: &SpinRepresentation, weights: &HelicityWeights) -> Result<Vec<CVector>> {
        (0..self.track.len()).map(|n| self.state(rep, weights, n)).collect()
    }
}

/// `exp(-i phi_m(t_n)) V(theta_n, phi_n) |m>`.
pub fn analytic_state(track: &WaveVectorTrack, rep: &SpinRepresentation, m: f64, n: usize) -> Result<QuantumState> {
    if n >= track.len() {
        return Err(FiberError::DimensionMismatch {
            expected: track.len(),
            found: n,
        });
    }
    let amps = AnalyticSolution::new(track)?.state(rep, &HelicityWeights::pure(m), n)?;
    QuantumState::new(amps)
}

/// The state the exact solution starts from: `V(theta_0, phi_0) sum c_m |m>`.
pub fn initial_state(
    track: &WaveVectorTrack,
    rep: &SpinRepresentation,
    weights: &HelicityWeights,
) -> Result<QuantumState> {
    let mut coeffs = CVector::zeros(rep.dim());
    for &(m, c) in weights.components() {
        coeffs[rep.index_of(m)?] += c;
    }
    QuantumState::normalized(rotation_operator(track.theta[0], track.phi[0], rep).apply(&coeffs))
}
