//! Scenario file schema (TOML, or JSON with the same keys) and validation.

use std::path::Path;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Deserialize;

use crate::analytic_solution::HelicityWeights;
use crate::error::{FiberError, Result};
use crate::guide_geometry::{
    ArchimedeanSpiral, Curve, DerivativeMode, FrameChoice, GuidePath, PathShape, TrackOptions,
};
use crate::spin_algebra::{HalfInt, SpinRepresentation};
use crate::tolerances::Tolerances;

pub const DEFAULT_K_MAG: f64 = 1.0;
pub const DEFAULT_STEPS: usize = 10_000;

/// A half-integer written either as a number (`1.5`) or a fraction (`"3/2"`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpinValue {
    Number(f64),
    Text(String),
}

impl SpinValue {
    pub fn to_f64(&self) -> std::result::Result<f64, String> {
        match self {
            SpinValue::Number(x) => Ok(*x),
            SpinValue::Text(s) => {
                let s = s.trim();
                if let Some((num, den)) = s.split_once('/') {
                    let num: f64 = num.trim().parse().map_err(|_| format!("cannot parse {s:?}"))?;
                    let den: f64 = den.trim().parse().map_err(|_| format!("cannot parse {s:?}"))?;
                    if den == 0.0 {
                        return Err(format!("zero denominator in {s:?}"));
                    }
                    Ok(num / den)
                } else {
                    s.parse().map_err(|_| format!("cannot parse {s:?}"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentFile {
    pub m: SpinValue,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathFile {
    Straight {
        direction: [f64; 3],
        length: f64,
    },
    CircularArc {
        radius: f64,
        turns: f64,
    },
    Helix {
        radius: f64,
        pitch: Option<f64>,
        cone_angle: Option<f64>,
        turns: f64,
    },
    ArchimedeanSpiral {
        inner_radius: f64,
        spacing: Option<f64>,
        length: Option<f64>,
        turns: f64,
    },
    Composite {
        segments: Vec<PathFile>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// `phi_m(T)` for the reported `m`, radians.
    pub final_phase: Option<f64>,
    /// Traversed arc length, path length units.
    pub arc_length: Option<f64>,
    /// Minimum number of full tangent windings in the unwrapped azimuth.
    pub min_windings: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub j: SpinValue,
    pub m: Option<SpinValue>,
    pub superposition: Option<Vec<ComponentFile>>,
    pub k_mag: Option<f64>,
    #[serde(default = "one")]
    pub speed: f64,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default = "working")]
    pub frame: String,
    #[serde(default = "auto")]
    pub derivatives: String,
    pub path: PathFile,
    #[serde(default)]
    pub run_oracle_integrator: bool,
    #[serde(default)]
    pub emit_states: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub expect: Expectations,
}

fn one() -> f64 {
    1.0
}

fn working() -> String {
    "working".into()
}

fn auto() -> String {
    "auto".into()
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub j: HalfInt,
    pub weights: HelicityWeights,
    pub k_mag: f64,
    pub path: GuidePath,
    pub t_end: f64,
    pub steps: usize,
    pub options: TrackOptions,
    pub run_oracle_integrator: bool,
    pub emit_states: bool,
    pub tolerances: Tolerances,
    pub expect: Expectations,
}

/// Outcome of validating a file: a scenario or field-level errors, plus warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub scenario: std::result::Result<Scenario, Vec<FiberError>>,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn representation(&self) -> SpinRepresentation {
        SpinRepresentation::from_label(self.j).expect("validated spin label")
    }

    pub fn reported_m(&self) -> f64 {
        self.weights.dominant_m()
    }

    pub fn frame_name(&self) -> &'static str {
        match self.options.frame {
            FrameChoice::Working => "working",
            FrameChoice::Lab => "lab",
            FrameChoice::Custom(_) => "custom",
        }
    }
}

pub fn parse_scenario_text(text: &str, is_json: bool) -> Result<ScenarioFile> {
    if is_json {
        serde_json::from_str(text).map_err(|e| FiberError::Parse(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e| FiberError::Parse(e.to_string()))
    }
}

pub fn read_scenario_file(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_scenario_text(&text, is_json)
}

fn build_shape(file: &PathFile, prefix: &str) -> Result<PathShape> {
    let field = |name: &str| format!("{prefix}.{name}");
    let relabel = |e: FiberError| match e {
        FiberError::Validation { field: f, message } => FiberError::Validation {
            field: f.replacen("path", prefix, 1),
            message,
        },
        other => other,
    };
    match file {
        PathFile::Straight { direction, length } => {
            PathShape::straight(Vector3::from_row_slice(direction), *length).map_err(relabel)
        }
        PathFile::CircularArc { radius, turns } => PathShape::circular_arc(*radius, *turns).map_err(relabel),
        PathFile::Helix {
            radius,
            pitch,
            cone_angle,
            turns,
        } => match (pitch, cone_angle) {
            (Some(p), None) => PathShape::helix(*radius, *p, *turns).map_err(relabel),
            (None, Some(a)) => PathShape::helix_with_cone_angle(*radius, *a, *turns).map_err(relabel),
            _ => Err(FiberError::validation(
                field("pitch"),
                "give exactly one of pitch or cone_angle",
            )),
        },
        PathFile::ArchimedeanSpiral {
            inner_radius,
            spacing,
            length,
            turns,
        } => {
            let spiral = match (spacing, length) {
                (Some(s), None) => ArchimedeanSpiral::new(*inner_radius, *s, *turns),
                (None, Some(l)) => ArchimedeanSpiral::with_length(*inner_radius, *turns, *l),
                _ => Err(FiberError::validation(
                    field("spacing"),
                    "give exactly one of spacing or length",
                )),
            };
            spiral.map(PathShape::ArchimedeanSpiral).map_err(relabel)
        }
        PathFile::Composite { segments } => {
            let shapes = segments
                .iter()
                .enumerate()
                .map(|(i, seg)| build_shape(seg, &format!("{prefix}.segments[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            PathShape::composite(shapes).map_err(relabel)
        }
    }
}

/// Checks every field, collecting all problems rather than stopping at the first.
pub fn validate(file: &ScenarioFile) -> Validated {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    if file.name.trim().is_empty() || file.name.contains(['/', '\\']) {
        errors.push(FiberError::validation(
            "name",
            "must be a non-empty file-name-safe string",
        ));
    }

    let rep = match file.j.to_f64() {
        Err(msg) => {
            errors.push(FiberError::validation("j", msg));
            None
        }
        Ok(j) => match SpinRepresentation::new(j) {
            Ok(rep) => Some(rep),
            Err(FiberError::Validation { message, .. }) => {
                errors.push(FiberError::validation("j", message));
                None
            }
            Err(_) => {
                errors.push(FiberError::validation(
                    "j",
                    format!("must be a positive half-integer, got {j}"),
                ));
                None
            }
        },
    };

    let weights = match (&file.m, &file.superposition) {
        (Some(_), Some(_)) => {
            errors.push(FiberError::validation("m", "give either m or superposition, not both"));
            None
        }
        (None, None) => {
            errors.push(FiberError::validation("m", "missing (or give a superposition)"));
            None
        }
        (Some(m), None) => match (m.to_f64(), &rep) {
            (Err(msg), _) => {
                errors.push(FiberError::validation("m", msg));
                None
            }
            (Ok(m), Some(rep)) => match rep.index_of(m) {
                Ok(_) => Some(HelicityWeights::pure(m)),
                Err(_) => {
                    errors.push(FiberError::validation(
                        "m",
                        format!("must be one of j, j-1, ..., -j; got {m}"),
                    ));
                    None
                }
            },
            (Ok(_), None) => None,
        },
        (None, Some(parts)) => {
            let mut comps = Vec::new();
            for (i, c) in parts.iter().enumerate() {
                match c.m.to_f64() {
                    Ok(m) => comps.push((m, Complex64::new(c.re, c.im))),
                    Err(msg) => errors.push(FiberError::validation(format!("superposition[{i}].m"), msg)),
                }
            }
            match &rep {
                Some(rep) if comps.len() == parts.len() => match HelicityWeights::new(rep, comps) {
                    Ok(w) => Some(w),
                    Err(FiberError::Validation { message, .. }) => {
                        errors.push(FiberError::validation("superposition", message));
                        None
                    }
                    Err(e) => {
                        errors.push(FiberError::validation("superposition", e.to_string()));
                        None
                    }
                },
                _ => None,
            }
        }
    };

    let k_mag = match file.k_mag {
        None => {
            warnings.push(format!("k_mag not given; defaulting to {DEFAULT_K_MAG}"));
            DEFAULT_K_MAG
        }
        Some(k) if k > 0.0 && k.is_finite() => k,
        Some(k) => {
            errors.push(FiberError::validation("k_mag", format!("must be positive, got {k}")));
            DEFAULT_K_MAG
        }
    };

    let path = build_shape(&file.path, "path").and_then(|shape| GuidePath::new(shape, file.speed));
    let path = match path {
        Ok(p) => Some(p),
        Err(e) => {
            errors.push(e);
            None
        }
    };

    let steps = file.steps.unwrap_or(DEFAULT_STEPS);
    if steps < 2 {
        errors.push(FiberError::validation(
            "steps",
            format!("must be at least 2, got {steps}"),
        ));
    }

    let t_end = match (&path, file.t_end) {
        (Some(p), None) => p.duration(),
        (Some(p), Some(t)) => {
            if !(t.is_finite() && t > 0.0) {
                errors.push(FiberError::validation("t_end", format!("must be positive, got {t}")));
            } else if t > p.duration() * (1.0 + 1e-12) {
                errors.push(FiberError::validation(
                    "t_end",
                    format!("{t} exceeds the path traversal time {}", p.duration()),
                ));
            }
            t
        }
        (None, t) => t.unwrap_or(0.0),
    };

    let frame = match file.frame.as_str() {
        "working" => FrameChoice::Working,
        "lab" => FrameChoice::Lab,
        other => {
            errors.push(FiberError::validation(
                "frame",
                format!("expected \"working\" or \"lab\", got {other:?}"),
            ));
            FrameChoice::Working
        }
    };
    let derivatives = match file.derivatives.as_str() {
        "auto" => DerivativeMode::Auto,
        "finite_difference" => DerivativeMode::FiniteDifference,
        other => {
            errors.push(FiberError::validation(
                "derivatives",
                format!("expected \"auto\" or \"finite_difference\", got {other:?}"),
            ));
            DerivativeMode::Auto
        }
    };

    let tol = &file.tolerances;
    for (name, v) in [
        ("norm", tol.norm),
        ("fidelity", tol.fidelity),
        ("helicity", tol.helicity),
        ("dynamical_phase", tol.dynamical_phase),
        ("transport", tol.transport),
        ("momentum", tol.momentum),
        ("schrodinger_coeff", tol.schrodinger_coeff),
        ("lvn_coeff", tol.lvn_coeff),
        ("oracle", tol.oracle),
        ("phase", tol.phase),
        ("arc_length", tol.arc_length),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            errors.push(FiberError::validation(
                format!("tolerances.{name}"),
                "must be a non-negative number",
            ));
        }
    }
    if let Some(w) = file.expect.min_windings {
        if !(w.is_finite() && w >= 0.0) {
            errors.push(FiberError::validation("expect.min_windings", "must be non-negative"));
        }
    }
    if let Some(l) = file.expect.arc_length {
        if !(l.is_finite() && l > 0.0) {
            errors.push(FiberError::validation("expect.arc_length", "must be positive"));
        }
    }

    let scenario = match (errors.is_empty(), rep, weights, path) {
        (true, Some(rep), Some(weights), Some(path)) => Ok(Scenario {
            name: file.name.clone(),
            description: file.description.clone(),
            j: rep.label(),
            weights,
            k_mag,
            path,
            t_end,
            steps,
            options: TrackOptions { frame, derivatives },
            run_oracle_integrator: file.run_oracle_integrator,
            emit_states: file.emit_states,
            tolerances: file.tolerances,
            expect: file.expect.clone(),
        }),
        _ => Err(errors),
    };
    Validated { scenario, warnings }
}

impl Scenario {
    /// Arc length actually traversed, `speed * t_end`.
    pub fn traversed_length(&self) -> f64 {
        (self.path.speed * self.t_end).min(self.path.shape.length())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
j = "1/2"
m = 0.5
k_mag = 1.0
steps = 100
[path]
kind = "circular_arc"
radius = 1.0
turns = 0.25
"#;

    fn check(text: &str) -> Validated {
        validate(&parse_scenario_text(text, false).unwrap())
    }

    fn fields(v: &Validated) -> Vec<String> {
        match &v.scenario {
            Ok(_) => vec![],
            Err(errs) => errs
                .iter()
                .map(|e| match e {
                    FiberError::Validation { field, .. } => field.clone(),
                    other => other.to_string(),
                })
                .collect(),
        }
    }

    #[test]
    fn base_is_valid() {
        let v = check(BASE);
        let s = v.scenario.unwrap();
        assert!(v.warnings.is_empty());
        assert_eq!(s.j, HalfInt::from_doubled(1));
        assert!((s.t_end - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn negative_j_names_field() {
        let v = check(&BASE.replace("j = \"1/2\"", "j = -1"));
        assert!(fields(&v).contains(&"j".to_string()));
    }

    #[test]
    fn missing_k_mag_defaults_with_warning() {
        let v = check(&BASE.replace("k_mag = 1.0\n", ""));
        assert_eq!(v.scenario.unwrap().k_mag, 1.0);
        assert_eq!(v.warnings.len(), 1);
        assert!(v.warnings[0].contains("k_mag"));
    }

    #[test]
    fn spiral_turns_must_be_positive() {
        let text = BASE.replace(
            "kind = \"circular_arc\"\nradius = 1.0\nturns = 0.25",
            "kind = \"archimedean_spiral\"\ninner_radius = 1.0\nspacing = 0.5\nturns = 0.0",
        );
        assert_eq!(fields(&check(&text)), vec!["path.turns".to_string()]);
    }

    #[test]
    fn m_outside_range() {
        let v = check(&BASE.replace("m = 0.5", "m = 1.5"));
        assert_eq!(fields(&v), vec!["m".to_string()]);
    }

    #[test]
    fn t_end_beyond_domain() {
        let v = check(&BASE.replace("steps = 100", "steps = 100\nt_end = 10.0"));
        assert_eq!(fields(&v), vec!["t_end".to_string()]);
    }

    #[test]
    fn several_errors_are_collected() {
        let v = check(
            &BASE
                .replace("m = 0.5", "m = 3")
                .replace("steps = 100", "steps = 1\nframe = \"sideways\""),
        );
        let f = fields(&v);
        assert!(f.contains(&"m".to_string()) && f.contains(&"steps".to_string()) && f.contains(&"frame".to_string()));
    }

    #[test]
    fn unknown_keys_fail_to_parse() {
        assert!(parse_scenario_text(&BASE.replace("steps = 100", "stepz = 100"), false).is_err());
    }

    #[test]
    fn json_alternative() {
        let json = r#"{"name":"t","j":1,"m":0,"path":{"kind":"helix","radius":1,"cone_angle":0.5,"turns":1}}"#;
        let v = validate(&parse_scenario_text(json, true).unwrap());
        let s = v.scenario.unwrap();
        assert_eq!(s.steps, DEFAULT_STEPS);
        assert_eq!(s.path.shape.kind(), "helix");
    }

    #[test]
    fn superposition_is_normalised() {
        let text = BASE.replace(
            "m = 0.5",
            "superposition = [{ m = 0.5, re = 3.0 }, { m = \"-1/2\", re = 0.0, im = 4.0 }]",
        );
        let s = check(&text).scenario.unwrap();
        assert!((s.weights.mean_helicity() - (0.5 * 0.36 - 0.5 * 0.64)).abs() < 1e-15);
    }

    #[test]
    fn spin_value_fractions() {
        assert_eq!(SpinValue::Text("3/2".into()).to_f64().unwrap(), 1.5);
        assert_eq!(SpinValue::Text(" 2 ".into()).to_f64().unwrap(), 2.0);
        assert!(SpinValue::Text("1/0".into()).to_f64().is_err());
        assert!(SpinValue::Text("x".into()).to_f64().is_err());
    }
}
