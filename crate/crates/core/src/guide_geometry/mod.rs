//! Guide paths and the wave-vector track they impose.
//!
//! A perfect guide keeps `|k|` fixed and `k` tangent to the path, so the track
//! is `k(t) = k_mag * T(speed * t)` for the unit tangent `T(s)`. The coupling
//! field is `omega = k x kdot / k^2`, and `kdot + k x omega = 0` holds whenever
//! `|k|` is constant.

mod path;
mod track;

pub use path::{ArchimedeanSpiral, CompositePath, Curve, PathShape};
pub use track::{sample_curve, sample_track, DerivativeMode, FrameChoice, GuidePath, TrackOptions, WaveVectorTrack};

use nalgebra::{Matrix3, Vector3};

use crate::error::{FiberError, Result};
use crate::spin_algebra::su2_to_so3;
use crate::tolerances::POLE_EPSILON;

/// `(k x kdot) / |k|^2`.
pub fn angular_velocity(k: &Vector3<f64>, kdot: &Vector3<f64>) -> Result<Vector3<f64>> {
    let k2 = k.norm_squared();
    if k2 == 0.0 {
        return Err(FiberError::ZeroVector { what: "wave vector" });
    }
    Ok(k.cross(kdot) / k2)
}

/// Rotation taking the unit vector `from` onto the unit vector `to` about the
/// axis `from x to`. Antiparallel inputs rotate by pi about `antipodal_axis`
/// (projected perpendicular to `from`).
pub(crate) fn rotation_taking(from: &Vector3<f64>, to: &Vector3<f64>, antipodal_axis: &Vector3<f64>) -> Matrix3<f64> {
    let cross = from.cross(to);
    let sin = cross.norm();
    let cos = from.dot(to);
    if sin <= 1e-14 {
        if cos > 0.0 {
            return Matrix3::identity();
        }
        let mut axis = antipodal_axis - from * from.dot(antipodal_axis);
        if axis.norm() < 1e-6 {
            axis = Vector3::y() - from * from.y;
        }
        return su2_to_so3(&axis.normalize(), std::f64::consts::PI).expect("unit axis");
    }
    su2_to_so3(&(cross / sin), sin.atan2(cos)).expect("unit axis")
}

/// Rotation `R` with `R k0/|k0| = z`: about `k0 x z` by the angle between
/// them; identity when already aligned; pi about x when antiparallel.
pub fn working_frame(k0: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let n = k0.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(FiberError::ZeroVector {
            what: "initial wave vector",
        });
    }
    Ok(rotation_taking(&(k0 / n), &Vector3::z(), &Vector3::x()))
}

/// Polar and unwrapped azimuthal angles of a sequence of unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalAngles {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

/// `theta = atan2(sqrt(x^2 + y^2), z)` and `phi` by nearest-branch
/// continuation of `atan2(y, x)`.
///
/// Samples with `sin(theta) <= POLE_EPSILON` have no azimuth. Leading ones take
/// the first defined value, trailing ones the last; a pole sample with defined
/// neighbours on both sides is a pole passage, reported at its time.
pub fn spherical_angles(units: &[Vector3<f64>], times: &[f64]) -> Result<SphericalAngles> {
    if units.len() != times.len() {
        return Err(FiberError::DimensionMismatch {
            expected: units.len(),
            found: times.len(),
        });
    }
    let theta: Vec<f64> = units.iter().map(|u| u.xy().norm().atan2(u.z)).collect();
    let defined: Vec<bool> = theta.iter().map(|th| th.sin() > POLE_EPSILON).collect();

    let Some(first) = defined.iter().position(|&d| d) else {
        return Ok(SphericalAngles {
            phi: vec![0.0; units.len()],
            theta,
        });
    };
    let last = defined.iter().rposition(|&d| d).unwrap_or(first);
    if let Some(offset) = defined[first..=last].iter().position(|&d| !d) {
        return Err(FiberError::PolePassage {
            t: times[first + offset],
        });
    }

    let mut phi = vec![0.0; units.len()];
    let mut prev = units[first].y.atan2(units[first].x);
    phi[first] = prev;
    for i in first + 1..=last {
        let raw = units[i].y.atan2(units[i].x);
        let mut delta = raw - prev.rem_euclid(std::f64::consts::TAU);
        delta = (delta + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        prev += delta;
        phi[i] = prev;
    }
    for i in 0..first {
        phi[i] = phi[first];
    }
    for i in last + 1..units.len() {
        phi[i] = phi[last];
    }
    Ok(SphericalAngles { theta, phi })
}

/// `|kdot + k x omega|` at every node; vanishes for constant `|k|`.
pub fn transport_residual(track: &WaveVectorTrack) -> Vec<f64> {
    track
        .k
        .iter()
        .zip(&track.kdot)
        .zip(&track.omega)
        .map(|((k, kd), w)| (kd + k.cross(w)).norm())
        .collect()
}
