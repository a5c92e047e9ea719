//! `H(t) = omega(t) . J` and its time-ordered propagation.
//!
//! Each step is the finite rotation `exp(-i dt omega(t_n + dt/2) . J)`, the
//! exponential midpoint rule. It is unitary by construction and second order
//! in `dt`. A classical RK4 integrator lives in [`oracle`] for cross-checks.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{FiberError, Result};
use crate::guide_geometry::WaveVectorTrack;
use crate::spin_algebra::{expm_skew, CMatrix, CVector, SpinRepresentation, I};

/// Unit vector over the `J3` basis `m = j..-j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: CVector,
}

impl QuantumState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(FiberError::validation("state", format!("norm {norm} is not 1")));
        }
        Ok(QuantumState { amplitudes })
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(FiberError::validation("state", "amplitudes must not vanish"));
        }
        Ok(QuantumState {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// `|m>`.
    pub fn basis(rep: &SpinRepresentation, m: f64) -> Result<Self> {
        Ok(QuantumState {
            amplitudes: rep.basis_state(m)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }
}

/// `<a|op|a>`.
pub fn expectation(a: &CVector, op: &CMatrix) -> Complex64 {
    a.dotc(&(op * a))
}

/// `|<a|b>|`.
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}

/// Output of [`propagate`]. Every per-node array has the grid length;
/// residual arrays hold `None` where the residual is undefined (end nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub norms: Vec<f64>,
    pub helicity: Vec<f64>,
    pub energy: Vec<f64>,
    pub fidelity: Option<Vec<f64>>,
    pub schrodinger_residual: Option<Vec<Option<f64>>>,
}

impl EvolutionReport {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Records `|<reference_n|psi_n>|` for every node.
    pub fn attach_fidelity(&mut self, reference: &[CVector]) -> Result<()> {
        if reference.len() != self.states.len() {
            return Err(FiberError::DimensionMismatch {
                expected: self.states.len(),
                found: reference.len(),
            });
        }
        self.fidelity = Some(
            reference
                .iter()
                .zip(&self.states)
                .map(|(a, b)| fidelity(a, b))
                .collect(),
        );
        Ok(())
    }

    pub fn attach_schrodinger_residual(&mut self, track: &WaveVectorTrack, rep: &SpinRepresentation) -> Result<()> {
        let interior = schrodinger_residual(&self.states, track, rep)?;
        let mut column = vec![None; self.len()];
        for (slot, r) in column[1..self.len() - 1].iter_mut().zip(interior) {
            *slot = Some(r);
        }
        self.schrodinger_residual = Some(column);
        Ok(())
    }
}

/// `omega . J`.
pub fn hamiltonian_at(omega: &Vector3<f64>, rep: &SpinRepresentation) -> CMatrix {
    rep.dot(omega)
}

/// One midpoint step `exp(-i dt omega . J)`.
pub fn step_operator(omega: &Vector3<f64>, dt: f64, rep: &SpinRepresentation) -> Result<CMatrix> {
    Ok(expm_skew(&hamiltonian_at(omega, rep).map(|z| -I * dt * z))?.into_matrix())
}

fn check_inputs(track: &WaveVectorTrack, rep: &SpinRepresentation, dim: usize) -> Result<()> {
    if dim != rep.dim() {
        return Err(FiberError::DimensionMismatch {
            expected: rep.dim(),
            found: dim,
        });
    }
    if track.len() < 2 || track.mid_omega.len() + 1 != track.len() {
        return Err(FiberError::InvalidTrack(
            "track needs at least two nodes and matching midpoints".into(),
        ));
    }
    Ok(())
}

/// Integrates `i dpsi/dt = H(t) psi` from `psi0` along the track.
pub fn propagate(track: &WaveVectorTrack, rep: &SpinRepresentation, psi0: &QuantumState) -> Result<EvolutionReport> {
    check_inputs(track, rep, psi0.dim())?;
    let n = track.len();
    let mut states = Vec::with_capacity(n);
    let mut psi = psi0.amplitudes().clone();
    states.push(psi.clone());
    for w in &track.mid_omega {
        psi = step_operator(w, track.dt, rep)? * psi;
        states.push(psi.clone());
    }

    let norms = states.iter().map(|s| s.norm()).collect();
    let helicity = states
        .iter()
        .enumerate()
        .map(|(i, s)| expectation(s, &rep.dot(&track.k_hat(i))).re)
        .collect();
    let energy = states
        .iter()
        .zip(&track.omega)
        .map(|(s, w)| expectation(s, &hamiltonian_at(w, rep)).re)
        .collect();

    Ok(EvolutionReport {
        times: track.times.clone(),
        states,
        norms,
        helicity,
        energy,
        fidelity: None,
        schrodinger_residual: None,
    })
}

/// `|| i (psi_{n+1} - psi_{n-1}) / (2 dt) - H(t_n) psi_n ||` at interior nodes.
pub fn schrodinger_residual(states: &[CVector], track: &WaveVectorTrack, rep: &SpinRepresentation) -> Result<Vec<f64>> {
    if states.len() != track.len() {
        return Err(FiberError::DimensionMismatch {
            expected: track.len(),
            found: states.len(),
        });
    }
    if states.len() < 3 {
        return Err(FiberError::InvalidTrack("residual needs at least three nodes".into()));
    }
    let scale = Complex64::new(0.0, 1.0 / (2.0 * track.dt));
    Ok((1..states.len() - 1)
        .map(|n| {
            let lhs = (&states[n + 1] - &states[n - 1]) * scale;
            let rhs = hamiltonian_at(&track.omega[n], rep) * &states[n];
            (lhs - rhs).norm()
        })
        .collect())
}

pub mod oracle {
    //! Classical fourth-order Runge-Kutta on `dpsi/dt = -i H(t) psi`, using
    //! the track's node and midpoint samples for the three stage times and
    //! renormalising after each step.

    use super::*;

    pub fn propagate_rk4(
        track: &WaveVectorTrack,
        rep: &SpinRepresentation,
        psi0: &QuantumState,
    ) -> Result<Vec<CVector>> {
        check_inputs(track, rep, psi0.dim())?;
        let dt = track.dt;
        let rhs = |w: &Vector3<f64>, psi: &CVector| -> CVector { (hamiltonian_at(w, rep) * psi) * (-I) };
        let mut psi = psi0.amplitudes().clone();
        let mut out = Vec::with_capacity(track.len());
        out.push(psi.clone());
        for n in 0..track.steps() {
            let (w0, wm, w1) = (&track.omega[n], &track.mid_omega[n], &track.omega[n + 1]);
            let half = Complex64::new(0.5 * dt, 0.0);
            let full = Complex64::new(dt, 0.0);
            let k1 = rhs(w0, &psi);
            let k2 = rhs(wm, &(&psi + &k1 * half));
            let k3 = rhs(wm, &(&psi + &k2 * half));
            let k4 = rhs(w1, &(&psi + &k3 * full));
            psi += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                * Complex64::new(dt / 6.0, 0.0);
            let norm = psi.norm();
            psi /= Complex64::new(norm, 0.0);
            out.push(psi.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guide_geometry::{sample_track, FrameChoice, GuidePath, PathShape, TrackOptions};
    use crate::spin_algebra::make_spin_rep;
    use std::f64::consts::TAU;

    fn lab() -> TrackOptions {
        TrackOptions {
            frame: FrameChoice::Lab,
            ..Default::default()
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let rep = make_spin_rep(1.0).unwrap();
        let zero = hamiltonian_at(&Vector3::zeros(), &rep);
        assert!(zero.iter().all(|z| z.norm() == 0.0));
        let h = hamiltonian_at(&Vector3::new(0.0, 0.0, 2.5), &rep);
        assert!((h - rep.j3.map(|z| z * 2.5)).iter().all(|z| z.norm() < 1e-15));
        let h = hamiltonian_at(&Vector3::new(0.3, -1.1, 0.7), &rep);
        assert!((&h - h.adjoint()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn straight_path_leaves_state_unchanged() {
        let rep = make_spin_rep(1.5).unwrap();
        let path = GuidePath::new(PathShape::straight(Vector3::x(), 5.0).unwrap(), 1.0).unwrap();
        let track = sample_track(&path, 1.0, 5.0, 50, TrackOptions::default()).unwrap();
        let psi0 = QuantumState::basis(&rep, 0.5).unwrap();
        let report = propagate(&track, &rep, &psi0).unwrap();
        for s in &report.states {
            assert_eq!(s, psi0.amplitudes());
        }
        let res = schrodinger_residual(&report.states, &track, &rep).unwrap();
        assert!(res.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn constant_omega_gives_diagonal_phases() {
        // A lab-frame circle has omega = (0, 0, speed/radius) throughout.
        let (radius, speed) = (1.0, 1.3);
        let omega = speed / radius;
        let rep = make_spin_rep(1.0).unwrap();
        let path = GuidePath::new(PathShape::circular_arc(radius, 1.0).unwrap(), speed).unwrap();
        let track = sample_track(&path, 1.0, path.duration(), 1000, lab()).unwrap();
        for m in rep.m_values() {
            let psi0 = QuantumState::basis(&rep, m).unwrap();
            let report = propagate(&track, &rep, &psi0).unwrap();
            for (t, s) in report.times.iter().zip(&report.states) {
                let expected = psi0.amplitudes() * Complex64::from_polar(1.0, -m * omega * t);
                assert!((s - expected).norm() < 1e-10, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn constant_omega_residual_is_second_order() {
        let rep = make_spin_rep(1.0).unwrap();
        let path = GuidePath::new(PathShape::circular_arc(1.0, 1.0).unwrap(), 1.0).unwrap();
        let psi0 = QuantumState::normalized(CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.2),
            Complex64::new(0.0, -0.3),
        ]))
        .unwrap();
        let max_res = |steps: usize| {
            let track = sample_track(&path, 1.0, TAU, steps, lab()).unwrap();
            let report = propagate(&track, &rep, &psi0).unwrap();
            schrodinger_residual(&report.states, &track, &rep)
                .unwrap()
                .into_iter()
                .fold(0.0, f64::max)
        };
        let (r1, r2, r3) = (max_res(200), max_res(400), max_res(800));
        let slope1 = (r1 / r2).log2();
        let slope2 = (r2 / r3).log2();
        assert!(
            (slope1 - 2.0).abs() < 0.05 && (slope2 - 2.0).abs() < 0.05,
            "{slope1} {slope2}"
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let rep = make_spin_rep(1.0).unwrap();
        let path = GuidePath::new(PathShape::circular_arc(1.0, 0.2).unwrap(), 1.0).unwrap();
        let track = sample_track(&path, 1.0, 1.0, 10, lab()).unwrap();
        let psi0 = QuantumState::basis(&make_spin_rep(0.5).unwrap(), 0.5).unwrap();
        assert!(matches!(
            propagate(&track, &rep, &psi0),
            Err(FiberError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_constructors_validate() {
        assert!(QuantumState::new(CVector::from_element(2, Complex64::new(1.0, 0.0))).is_err());
        assert!(QuantumState::normalized(CVector::zeros(2)).is_err());
    }
}
