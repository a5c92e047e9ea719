//! Arc-length parametrised guide curves.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};

use super::rotation_taking;
use crate::error::{FiberError, Result};

/// A guide curve parametrised by arc length `s` in `[0, length]`.
pub trait Curve {
    fn length(&self) -> f64;

    fn point(&self, s: f64) -> Vector3<f64>;

    /// `dr/ds`. Unit length for a proper arc-length parametrisation.
    fn tangent(&self, s: f64) -> Vector3<f64>;

    /// `d(unit tangent)/ds` when the curve knows it in closed form. Callers
    /// fall back to finite differences on `None`.
    fn tangent_rate(&self, _s: f64) -> Option<Vector3<f64>> {
        None
    }
}

/// Shapes of guide supported by scenario files.
#[derive(Debug, Clone, PartialEq)]
pub enum PathShape {
    /// Line through the origin along `direction`.
    Straight {
        direction: Vector3<f64>,
        length: f64,
    },
    /// Circle of `radius` in the xy-plane, counter-clockwise from `(radius, 0, 0)`.
    CircularArc {
        radius: f64,
        turns: f64,
    },
    /// Right-handed helix about +z; `pitch` is the rise per turn.
    Helix {
        radius: f64,
        pitch: f64,
        turns: f64,
    },
    /// `r = inner_radius + spacing * psi / 2pi` in the xy-plane.
    ArchimedeanSpiral(ArchimedeanSpiral),
    Composite(CompositePath),
}

impl PathShape {
    pub fn straight(direction: Vector3<f64>, length: f64) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(FiberError::validation("path.direction", "must be a nonzero vector"));
        }
        positive("path.length", length)?;
        Ok(PathShape::Straight {
            direction: direction / n,
            length,
        })
    }

    pub fn circular_arc(radius: f64, turns: f64) -> Result<Self> {
        positive("path.radius", radius)?;
        positive("path.turns", turns)?;
        Ok(PathShape::CircularArc { radius, turns })
    }

    pub fn helix(radius: f64, pitch: f64, turns: f64) -> Result<Self> {
        positive("path.radius", radius)?;
        positive("path.turns", turns)?;
        if !pitch.is_finite() {
            return Err(FiberError::validation("path.pitch", "must be finite"));
        }
        Ok(PathShape::Helix { radius, pitch, turns })
    }

    /// Helix whose tangent keeps the polar angle `cone_angle` to +z.
    pub fn helix_with_cone_angle(radius: f64, cone_angle: f64, turns: f64) -> Result<Self> {
        if !(cone_angle > 0.0 && cone_angle < std::f64::consts::PI) {
            return Err(FiberError::validation("path.cone_angle", "must lie in (0, pi)"));
        }
        Self::helix(radius, TAU * radius / cone_angle.tan(), turns)
    }

    pub fn spiral(inner_radius: f64, spacing: f64, turns: f64) -> Result<Self> {
        Ok(PathShape::ArchimedeanSpiral(ArchimedeanSpiral::new(
            inner_radius,
            spacing,
            turns,
        )?))
    }

    pub fn composite(segments: Vec<PathShape>) -> Result<Self> {
        Ok(PathShape::Composite(CompositePath::new(segments)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PathShape::Straight { .. } => "straight",
            PathShape::CircularArc { .. } => "circular_arc",
            PathShape::Helix { .. } => "helix",
            PathShape::ArchimedeanSpiral(_) => "archimedean_spiral",
            PathShape::Composite(_) => "composite",
        }
    }

    /// Unit normal of the plane containing the curve, for planar kinds.
    pub fn plane_normal(&self) -> Option<Vector3<f64>> {
        match self {
            PathShape::CircularArc { .. } | PathShape::ArchimedeanSpiral(_) => Some(Vector3::z()),
            _ => None,
        }
    }

    fn helix_parts(radius: f64, pitch: f64) -> (f64, f64) {
        let circumference = TAU * radius;
        let per_turn = circumference.hypot(pitch);
        (per_turn, TAU / per_turn)
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(FiberError::validation(field, format!("must be positive, got {x}")))
    }
}

impl Curve for PathShape {
    fn length(&self) -> f64 {
        match self {
            PathShape::Straight { length, .. } => *length,
            PathShape::CircularArc { radius, turns } => TAU * radius * turns,
            PathShape::Helix { radius, pitch, turns } => Self::helix_parts(*radius, *pitch).0 * turns,
            PathShape::ArchimedeanSpiral(sp) => sp.length(),
            PathShape::Composite(c) => c.length(),
        }
    }

    fn point(&self, s: f64) -> Vector3<f64> {
        match self {
            PathShape::Straight { direction, .. } => direction * s,
            PathShape::CircularArc { radius, .. } => {
                let a = s / radius;
                Vector3::new(radius * a.cos(), radius * a.sin(), 0.0)
            }
            PathShape::Helix { radius, pitch, .. } => {
                let (per_turn, rate) = Self::helix_parts(*radius, *pitch);
                let a = rate * s;
                Vector3::new(radius * a.cos(), radius * a.sin(), pitch * s / per_turn)
            }
            PathShape::ArchimedeanSpiral(sp) => sp.point(s),
            PathShape::Composite(c) => c.point(s),
        }
    }

    fn tangent(&self, s: f64) -> Vector3<f64> {
        match self {
            PathShape::Straight { direction, .. } => *direction,
            PathShape::CircularArc { radius, .. } => {
                let a = s / radius;
                Vector3::new(-a.sin(), a.cos(), 0.0)
            }
            PathShape::Helix { radius, pitch, .. } => {
                let (per_turn, rate) = Self::helix_parts(*radius, *pitch);
                let a = rate * s;
                Vector3::new(-radius * rate * a.sin(), radius * rate * a.cos(), pitch / per_turn)
            }
            PathShape::ArchimedeanSpiral(sp) => sp.tangent(s),
            PathShape::Composite(c) => c.tangent(s),
        }
    }

    fn tangent_rate(&self, s: f64) -> Option<Vector3<f64>> {
        match self {
            PathShape::Straight { .. } => Some(Vector3::zeros()),
            PathShape::CircularArc { radius, .. } => {
                let a = s / radius;
                Some(Vector3::new(-a.cos(), -a.sin(), 0.0) / *radius)
            }
            PathShape::Helix { radius, pitch, .. } => {
                let (_, rate) = Self::helix_parts(*radius, *pitch);
                let a = rate * s;
                Some(Vector3::new(-a.cos(), -a.sin(), 0.0) * (radius * rate * rate))
            }
            PathShape::ArchimedeanSpiral(sp) => sp.tangent_rate(s),
            PathShape::Composite(c) => c.tangent_rate(s),
        }
    }
}

/// Archimedean spiral `r(psi) = r0 + a psi` with `a = spacing / 2pi`.
///
/// Arc length has the closed form
/// `L(r) = [r sqrt(r^2 + a^2) + a^2 asinh(r / a)] / (2a)`, inverted per sample
/// by safeguarded Newton iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchimedeanSpiral {
    inner_radius: f64,
    spacing: f64,
    turns: f64,
    length: f64,
}

impl ArchimedeanSpiral {
    pub fn new(inner_radius: f64, spacing: f64, turns: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && inner_radius >= 0.0) {
            return Err(FiberError::validation("path.inner_radius", "must be non-negative"));
        }
        positive("path.spacing", spacing)?;
        positive("path.turns", turns)?;
        let mut sp = ArchimedeanSpiral {
            inner_radius,
            spacing,
            turns,
            length: 0.0,
        };
        sp.length = sp.length_at_angle(sp.max_angle());
        Ok(sp)
    }

    /// Spiral with the given inner radius and turn count whose arc length is
    /// `length`; the spacing is found by bisection.
    pub fn with_length(inner_radius: f64, turns: f64, length: f64) -> Result<Self> {
        positive("path.length", length)?;
        positive("path.turns", turns)?;
        let min_len = TAU * inner_radius * turns;
        if length <= min_len {
            return Err(FiberError::validation(
                "path.length",
                format!("must exceed the circle length {min_len} of the inner radius"),
            ));
        }
        let arc = |spacing: f64| ArchimedeanSpiral::new(inner_radius, spacing, turns).map(|s| s.length);
        let mut lo = 0.0;
        let mut hi = 1.0;
        while arc(hi)? < length {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if arc(mid)? < length {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        ArchimedeanSpiral::new(inner_radius, 0.5 * (lo + hi), turns)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn turns(&self) -> f64 {
        self.turns
    }

    pub fn outer_radius(&self) -> f64 {
        self.radius(self.max_angle())
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn growth(&self) -> f64 {
        self.spacing / TAU
    }

    fn max_angle(&self) -> f64 {
        TAU * self.turns
    }

    fn radius(&self, psi: f64) -> f64 {
        self.inner_radius + self.growth() * psi
    }

    fn primitive(&self, r: f64) -> f64 {
        let a = self.growth();
        (r * r.hypot(a) + a * a * (r / a).asinh()) / (2.0 * a)
    }

    pub fn length_at_angle(&self, psi: f64) -> f64 {
        self.primitive(self.radius(psi)) - self.primitive(self.inner_radius)
    }

    /// Polar angle `psi` reached after arc length `s`.
    pub fn angle_at_length(&self, s: f64) -> f64 {
        let max = self.max_angle();
        let s = s.clamp(0.0, self.length);
        let (mut lo, mut hi) = (0.0, max);
        let mut psi = max * s / self.length;
        for _ in 0..60 {
            let f = self.length_at_angle(psi) - s;
            if f.abs() <= 1e-15 * self.length.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = psi;
            } else {
                lo = psi;
            }
            let speed = self.radius(psi).hypot(self.growth());
            let next = psi - f / speed;
            psi = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        psi
    }

    fn derivatives(&self, psi: f64) -> (Vector3<f64>, Vector3<f64>) {
        let a = self.growth();
        let r = self.radius(psi);
        let (sn, cs) = psi.sin_cos();
        let d1 = Vector3::new(a * cs - r * sn, a * sn + r * cs, 0.0);
        let d2 = Vector3::new(-2.0 * a * sn - r * cs, 2.0 * a * cs - r * sn, 0.0);
        (d1, d2)
    }

    pub fn point(&self, s: f64) -> Vector3<f64> {
        let psi = self.angle_at_length(s);
        let r = self.radius(psi);
        Vector3::new(r * psi.cos(), r * psi.sin(), 0.0)
    }

    pub fn tangent(&self, s: f64) -> Vector3<f64> {
        let (d1, _) = self.derivatives(self.angle_at_length(s));
        d1 / d1.norm()
    }

    pub fn tangent_rate(&self, s: f64) -> Option<Vector3<f64>> {
        let (d1, d2) = self.derivatives(self.angle_at_length(s));
        let speed = d1.norm();
        // dT/dpsi = (d2 |d1|^2 - d1 (d1.d2)) / |d1|^3, and ds = |d1| dpsi.
        Some((d2 * speed * speed - d1 * d1.dot(&d2)) / speed.powi(4))
    }
}

/// Segments joined end to end with matching tangents. Each segment after the
/// first is rigidly moved by the minimal rotation taking its start tangent onto
/// the previous end tangent. Curvature may jump at the joins.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositePath {
    segments: Vec<PathShape>,
    placements: Vec<(Matrix3<f64>, Vector3<f64>)>,
    starts: Vec<f64>,
    length: f64,
}

impl CompositePath {
    pub fn new(segments: Vec<PathShape>) -> Result<Self> {
        if segments.is_empty() {
            return Err(FiberError::validation(
                "path.segments",
                "must contain at least one segment",
            ));
        }
        let mut placements = Vec::with_capacity(segments.len());
        let mut starts = Vec::with_capacity(segments.len());
        let mut offset = 0.0;
        for (i, seg) in segments.iter().enumerate() {
            let placement = if i == 0 {
                (Matrix3::identity(), Vector3::zeros())
            } else {
                let prev = &segments[i - 1];
                let (prev_rot, prev_shift): (Matrix3<f64>, Vector3<f64>) = placements[i - 1];
                let end = prev.length();
                let end_point = prev_rot * prev.point(end) + prev_shift;
                let end_tangent = (prev_rot * prev.tangent(end)).normalize();
                let rot = rotation_taking(&seg.tangent(0.0).normalize(), &end_tangent, &Vector3::x());
                (rot, end_point - rot * seg.point(0.0))
            };
            placements.push(placement);
            starts.push(offset);
            offset += seg.length();
        }
        Ok(CompositePath {
            segments,
            placements,
            starts,
            length: offset,
        })
    }

    pub fn segments(&self) -> &[PathShape] {
        &self.segments
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let idx = self.starts.iter().rposition(|&start| start < s).unwrap_or_default();
        (idx, (s - self.starts[idx]).min(self.segments[idx].length()))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point(&self, s: f64) -> Vector3<f64> {
        let (i, local) = self.locate(s);
        let (rot, shift) = self.placements[i];
        rot * self.segments[i].point(local) + shift
    }

    pub fn tangent(&self, s: f64) -> Vector3<f64> {
        let (i, local) = self.locate(s);
        self.placements[i].0 * self.segments[i].tangent(local)
    }

    pub fn tangent_rate(&self, s: f64) -> Option<Vector3<f64>> {
        let (i, local) = self.locate(s);
        self.segments[i].tangent_rate(local).map(|d| self.placements[i].0 * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_length(c: &dyn Curve, n: usize) -> f64 {
        // Composite Simpson on |dr/ds|; equals the length iff the curve is arc-length parametrised.
        let h = c.length() / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * c.tangent(i as f64 * h).norm();
        }
        sum * h / 3.0
    }

    fn chord_length(c: &dyn Curve, n: usize) -> f64 {
        let h = c.length() / n as f64;
        (0..n)
            .map(|i| (c.point((i + 1) as f64 * h) - c.point(i as f64 * h)).norm())
            .sum()
    }

    #[test]
    fn kinds_are_unit_speed() {
        let shapes = [
            PathShape::straight(Vector3::new(1.0, 2.0, 3.0), 4.0).unwrap(),
            PathShape::circular_arc(2.0, 1.5).unwrap(),
            PathShape::helix(1.0, 0.7, 2.0).unwrap(),
            PathShape::spiral(1.0, 0.6, 2.25).unwrap(),
        ];
        for shape in &shapes {
            let l = shape.length();
            for i in 0..=50 {
                let s = l * i as f64 / 50.0;
                assert!(
                    (shape.tangent(s).norm() - 1.0).abs() < 1e-12,
                    "{} at s={s}",
                    shape.kind()
                );
            }
            let chord = chord_length(shape, 20_000);
            assert!((chord - l).abs() < 1e-6 * l, "{}: chord {chord} vs {l}", shape.kind());
        }
    }

    #[test]
    fn tangent_rates_match_differences() {
        let shapes = [
            PathShape::circular_arc(2.0, 1.0).unwrap(),
            PathShape::helix(1.0, 0.7, 2.0).unwrap(),
            PathShape::spiral(0.5, 1.1, 2.0).unwrap(),
        ];
        for shape in &shapes {
            let h = 1e-5;
            for s in [0.3, 1.7, shape.length() * 0.8] {
                let fd = (shape.tangent(s + h) - shape.tangent(s - h)) / (2.0 * h);
                let exact = shape.tangent_rate(s).unwrap();
                assert!((fd - exact).norm() < 1e-8, "{} s={s}", shape.kind());
            }
        }
    }

    #[test]
    fn spiral_length_matches_quadrature() {
        let sp = PathShape::spiral(1.0, 0.6, 2.25).unwrap();
        let quad = numeric_length(&sp, 4000);
        assert!((quad - sp.length()).abs() < 1e-9 * sp.length());
    }

    #[test]
    fn spiral_bisection_hits_target_length() {
        let sp = ArchimedeanSpiral::with_length(1.0, 2.25, 25.0).unwrap();
        assert!((sp.length() - 25.0).abs() < 1e-10);
        assert!(sp.spacing() > 0.0);
        assert!(ArchimedeanSpiral::with_length(1.0, 2.25, 10.0).is_err());
    }

    #[test]
    fn spiral_angle_inverts_length() {
        let sp = ArchimedeanSpiral::new(0.2, 0.9, 3.0).unwrap();
        for i in 0..=30 {
            let psi = sp.max_angle() * i as f64 / 30.0;
            let s = sp.length_at_angle(psi);
            assert!((sp.angle_at_length(s) - psi).abs() < 1e-10);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(PathShape::straight(Vector3::zeros(), 1.0).is_err());
        assert!(PathShape::circular_arc(-1.0, 1.0).is_err());
        assert!(PathShape::spiral(1.0, 0.5, 0.0).is_err());
        assert!(PathShape::spiral(1.0, 0.5, -2.0).is_err());
        assert!(PathShape::composite(vec![]).is_err());
    }

    #[test]
    fn composite_is_tangent_continuous() {
        let c = PathShape::composite(vec![
            PathShape::straight(Vector3::z(), 1.0).unwrap(),
            PathShape::circular_arc(1.0, 0.25).unwrap(),
            PathShape::helix(0.5, 0.3, 1.0).unwrap(),
        ])
        .unwrap();
        let PathShape::Composite(ref comp) = c else {
            unreachable!()
        };
        let mut s = 0.0;
        for seg in comp.segments() {
            s += seg.length();
            let before = c.tangent(s - 1e-9);
            let after = c.tangent(s + 1e-9);
            assert!((before - after).norm() < 1e-7);
            let p0 = c.point(s - 1e-9);
            let p1 = c.point(s + 1e-9);
            assert!((p0 - p1).norm() < 1e-7);
        }
        assert!((c.length() - s).abs() < 1e-12);
    }
}
