#![allow(dead_code)]

use fiberwave::guide_geometry::{DerivativeMode, FrameChoice, TrackOptions};
use fiberwave::{sample_track, GuidePath, PathShape, WaveVectorTrack};
use std::f64::consts::PI;

pub const CONE_ANGLE: f64 = PI / 3.0;

pub fn options(frame: FrameChoice, derivatives: DerivativeMode) -> TrackOptions {
    TrackOptions { frame, derivatives }
}

pub fn lab() -> TrackOptions {
    options(FrameChoice::Lab, DerivativeMode::Auto)
}

pub fn cone_path(cone: f64) -> GuidePath {
    GuidePath::new(PathShape::helix_with_cone_angle(1.0, cone, 1.0).unwrap(), 1.0).unwrap()
}

pub fn track_for(path: &GuidePath, steps: usize, opts: TrackOptions) -> WaveVectorTrack {
    sample_track(path, 1.0, path.duration(), steps, opts).unwrap()
}

pub fn cone_track(steps: usize, opts: TrackOptions) -> WaveVectorTrack {
    track_for(&cone_path(CONE_ANGLE), steps, opts)
}

pub fn line_path() -> GuidePath {
    GuidePath::new(
        PathShape::straight(nalgebra::Vector3::new(1.0, 1.0, 1.0), 10.0).unwrap(),
        1.0,
    )
    .unwrap()
}

pub fn circle_path() -> GuidePath {
    GuidePath::new(PathShape::circular_arc(1.0, 1.0).unwrap(), 1.0).unwrap()
}

pub fn spiral_path() -> GuidePath {
    let spiral = fiberwave::guide_geometry::ArchimedeanSpiral::with_length(1.0, 2.25, 25.0).unwrap();
    GuidePath::new(PathShape::ArchimedeanSpiral(spiral), 1.0).unwrap()
}

/// Least-squares slope of `log(err)` against `log(dt)`.
pub fn loglog_slope(dts: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}
