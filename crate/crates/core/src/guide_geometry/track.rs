use nalgebra::{Matrix3, Vector3};

use super::{angular_velocity, spherical_angles, working_frame, Curve, PathShape};
use crate::error::{FiberError, Result};
use crate::tolerances::{ARC_LENGTH_SPEED, DEGENERATE_TANGENT, POLE_EPSILON};

/// A path together with its constant traversal speed (arc length per unit time).
#[derive(Debug, Clone, PartialEq)]
pub struct GuidePath {
    pub shape: PathShape,
    pub speed: f64,
}

impl GuidePath {
    pub fn new(shape: PathShape, speed: f64) -> Result<Self> {
        if !(speed.is_finite() && speed > 0.0) {
            return Err(FiberError::validation(
                "path.speed",
                format!("must be positive, got {speed}"),
            ));
        }
        Ok(GuidePath { shape, speed })
    }

    /// Time needed to traverse the whole path.
    pub fn duration(&self) -> f64 {
        self.shape.length() / self.speed
    }
}

/// Coordinate frame the track is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FrameChoice {
    /// Rotated so that `k(0)` points along +z; `theta(0) = 0`.
    #[default]
    Working,
    /// The path's own coordinates.
    Lab,
    /// Any proper rotation applied to lab coordinates.
    Custom(Matrix3<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    /// Closed-form tangent rates where the curve provides them.
    #[default]
    Auto,
    /// Second-order central differences (one-sided at the ends) regardless.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackOptions {
    pub frame: FrameChoice,
    pub derivatives: DerivativeMode,
}

/// Wave vector sampled on a uniform grid `t_n = n dt`, `n = 0..=steps`, plus
/// the midpoints `t_n + dt/2` used by the midpoint propagator and by central
/// differences on the doubled grid. All vectors are in `frame` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveVectorTrack {
    pub k_mag: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub k: Vec<Vector3<f64>>,
    pub kdot: Vec<Vector3<f64>>,
    pub omega: Vec<Vector3<f64>>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub mid_times: Vec<f64>,
    pub mid_k: Vec<Vector3<f64>>,
    pub mid_kdot: Vec<Vector3<f64>>,
    pub mid_omega: Vec<Vector3<f64>>,
    pub mid_theta: Vec<f64>,
    pub mid_phi: Vec<f64>,
    /// Lab -> frame rotation.
    pub frame: Matrix3<f64>,
    pub frame_choice: FrameChoice,
}

pub fn sample_track(
    path: &GuidePath,
    k_mag: f64,
    t_end: f64,
    steps: usize,
    options: TrackOptions,
) -> Result<WaveVectorTrack> {
    sample_curve(&path.shape, path.speed, k_mag, t_end, steps, options)
}

/// Samples `k(t) = k_mag * T(speed t)` on the doubled grid and derives
/// `kdot`, `omega` and the spherical angles.
pub fn sample_curve(
    curve: &dyn Curve,
    speed: f64,
    k_mag: f64,
    t_end: f64,
    steps: usize,
    options: TrackOptions,
) -> Result<WaveVectorTrack> {
    if steps < 2 {
        return Err(FiberError::InvalidTrack(format!("need at least 2 steps, got {steps}")));
    }
    if !(k_mag.is_finite() && k_mag > 0.0) {
        return Err(FiberError::validation(
            "k_mag",
            format!("must be positive, got {k_mag}"),
        ));
    }
    if !(speed.is_finite() && speed > 0.0) {
        return Err(FiberError::validation(
            "path.speed",
            format!("must be positive, got {speed}"),
        ));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(FiberError::validation(
            "t_end",
            format!("must be positive, got {t_end}"),
        ));
    }
    let domain = curve.length() / speed;
    if t_end > domain * (1.0 + 1e-12) {
        return Err(FiberError::DomainExceeded { t: t_end, domain });
    }

    let fine = 2 * steps;
    let h = t_end / fine as f64;
    let fine_times: Vec<f64> = (0..=fine)
        .map(|i| if i == fine { t_end } else { i as f64 * h })
        .collect();

    let mut units = Vec::with_capacity(fine + 1);
    for &t in &fine_times {
        let s = (speed * t).min(curve.length());
        let d = curve.tangent(s);
        let norm = d.norm();
        if norm.is_nan() || norm < DEGENERATE_TANGENT {
            return Err(FiberError::DegenerateTangent { t, speed: norm * speed });
        }
        if (norm - 1.0).abs() > ARC_LENGTH_SPEED {
            return Err(FiberError::NonUniformSpeed { t, ds_norm: norm });
        }
        units.push(d / norm);
    }

    let analytic: Option<Vec<Vector3<f64>>> = match options.derivatives {
        DerivativeMode::FiniteDifference => None,
        DerivativeMode::Auto => fine_times
            .iter()
            .map(|&t| curve.tangent_rate((speed * t).min(curve.length())).map(|r| r * speed))
            .collect(),
    };
    let unit_rates = analytic.unwrap_or_else(|| central_differences(&units, h));

    let frame = match options.frame {
        FrameChoice::Working => working_frame(&units[0])?,
        FrameChoice::Lab => Matrix3::identity(),
        FrameChoice::Custom(r) => {
            let defect = (r * r.transpose() - Matrix3::identity()).abs().max();
            if defect > 1e-10 || (r.determinant() - 1.0).abs() > 1e-10 {
                return Err(FiberError::validation(
                    "frame",
                    "custom frame must be a proper rotation",
                ));
            }
            r
        }
    };

    let framed_units: Vec<Vector3<f64>> = units.iter().map(|u| (frame * u).normalize()).collect();
    let ks: Vec<Vector3<f64>> = framed_units.iter().map(|u| u * k_mag).collect();
    let kdots: Vec<Vector3<f64>> = unit_rates.iter().map(|r| frame * r * k_mag).collect();
    let omegas = ks
        .iter()
        .zip(&kdots)
        .map(|(k, kd)| angular_velocity(k, kd))
        .collect::<Result<Vec<_>>>()?;
    let angles = spherical_angles(&framed_units, &fine_times)?;

    let evens = |v: &[Vector3<f64>]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    let odds = |v: &[Vector3<f64>]| v.iter().skip(1).step_by(2).copied().collect::<Vec<_>>();
    let evens_f = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    let odds_f = |v: &[f64]| v.iter().skip(1).step_by(2).copied().collect::<Vec<_>>();

    Ok(WaveVectorTrack {
        k_mag,
        dt: 2.0 * h,
        times: evens_f(&fine_times),
        k: evens(&ks),
        kdot: evens(&kdots),
        omega: evens(&omegas),
        theta: evens_f(&angles.theta),
        phi: evens_f(&angles.phi),
        mid_times: odds_f(&fine_times),
        mid_k: odds(&ks),
        mid_kdot: odds(&kdots),
        mid_omega: odds(&omegas),
        mid_theta: odds_f(&angles.theta),
        mid_phi: odds_f(&angles.phi),
        frame,
        frame_choice: options.frame,
    })
}

/// Second-order differences: central inside, one-sided three-point at the ends.
fn central_differences(v: &[Vector3<f64>], h: f64) -> Vec<Vector3<f64>> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

impl WaveVectorTrack {
    /// Number of grid intervals.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty track")
    }

    pub fn k_hat(&self, n: usize) -> Vector3<f64> {
        self.k[n] / self.k_mag
    }

    pub fn mid_k_hat(&self, n: usize) -> Vector3<f64> {
        self.mid_k[n] / self.k_mag
    }

    /// `k(t_n)` back in lab coordinates.
    pub fn lab_k(&self, n: usize) -> Vector3<f64> {
        self.frame.transpose() * self.k[n]
    }

    /// Largest `|omega|` over nodes and midpoints.
    pub fn max_turning_rate(&self) -> f64 {
        self.omega
            .iter()
            .chain(&self.mid_omega)
            .map(|w| w.norm())
            .fold(0.0, f64::max)
    }

    /// Net change of the unwrapped azimuth.
    pub fn azimuth_winding(&self) -> f64 {
        self.phi[self.phi.len() - 1] - self.phi[0]
    }

    /// Checks every structural invariant of a sampled track.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        let lens = [
            self.k.len(),
            self.kdot.len(),
            self.omega.len(),
            self.theta.len(),
            self.phi.len(),
        ];
        if n < 3 || lens.iter().any(|&l| l != n) {
            return Err(FiberError::InvalidTrack("inconsistent node array lengths".into()));
        }
        let mids = [
            self.mid_times.len(),
            self.mid_k.len(),
            self.mid_kdot.len(),
            self.mid_omega.len(),
            self.mid_theta.len(),
            self.mid_phi.len(),
        ];
        if mids.iter().any(|&l| l != n - 1) {
            return Err(FiberError::InvalidTrack("inconsistent midpoint array lengths".into()));
        }
        for i in 0..n {
            let k = self.k[i];
            if ((k.norm() - self.k_mag) / self.k_mag).abs() > 1e-10 {
                return Err(FiberError::InvalidTrack(format!("|k| drifts at t = {}", self.times[i])));
            }
            if self.omega[i].dot(&k).abs() > 1e-10 * self.k_mag.max(1.0) * self.omega[i].norm().max(1.0) {
                return Err(FiberError::InvalidTrack(format!(
                    "omega not orthogonal to k at t = {}",
                    self.times[i]
                )));
            }
            let (th, ph) = (self.theta[i], self.phi[i]);
            let rebuilt = Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
            if (rebuilt - self.k_hat(i)).norm() > 1e-10 {
                return Err(FiberError::InvalidTrack(format!(
                    "angles do not reconstruct k at t = {}",
                    self.times[i]
                )));
            }
        }
        if matches!(self.frame_choice, FrameChoice::Working) && self.theta[0].abs() > 1e-12 {
            return Err(FiberError::InvalidTrack("working frame must start at theta = 0".into()));
        }
        for i in 0..n - 1 {
            let defined = |th: f64| th.sin() > POLE_EPSILON;
            if defined(self.theta[i])
                && defined(self.theta[i + 1])
                && (self.phi[i + 1] - self.phi[i]).abs() >= std::f64::consts::PI
            {
                return Err(FiberError::InvalidTrack(format!(
                    "azimuth jumps at t = {}",
                    self.times[i]
                )));
            }
        }
        Ok(())
    }
}
