use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::tolerances::Tolerances;
use crate::verification::Check;

use super::run::Simulation;
use super::spec::Scenario;

pub const TIMESERIES_COLUMNS: [&str; 10] = [
    "t",
    "theta",
    "phi",
    "phase_analytic",
    "norm",
    "helicity_expect",
    "energy_expect",
    "fidelity",
    "schrodinger_residual",
    "lvn_residual",
];

/// Shortest round-trip decimal form; empty for a missing value.
pub fn format_float(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

pub fn timeseries_csv(sim: &Simulation) -> String {
    let track = &sim.track;
    let report = &sim.report;
    let mut out = TIMESERIES_COLUMNS.join(",");
    out.push('\n');
    for n in 0..track.len() {
        let row = [
            Some(track.times[n]),
            Some(track.theta[n]),
            Some(track.phi[n]),
            Some(sim.phase[n]),
            Some(report.norms[n]),
            Some(report.helicity[n]),
            Some(report.energy[n]),
            report.fidelity.as_ref().map(|f| f[n]),
            report.schrodinger_residual.as_ref().and_then(|r| r[n]),
            sim.lvn_residual[n],
        ];
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn states_csv(sim: &Simulation) -> String {
    let ms = sim.rep.m_values();
    let mut out = String::from("t");
    for m in &ms {
        let _ = write!(out, ",re_{m},im_{m}");
    }
    out.push('\n');
    for (t, state) in sim.report.times.iter().zip(&sim.report.states) {
        out.push_str(&format_float(Some(*t)));
        for c in state.iter() {
            let _ = write!(out, ",{},{}", format_float(Some(c.re)), format_float(Some(c.im)));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub description: String,
    pub j: f64,
    pub m: f64,
    pub dim: usize,
    pub path_kind: String,
    pub frame: String,
    pub k_mag: f64,
    pub t_end: f64,
    pub steps: usize,
    pub dt: f64,
    pub max_turning_rate: f64,
    pub final_phase: f64,
    pub final_solid_angle_weight: f64,
    pub arc_length: f64,
    pub tangent_windings: f64,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(scenario: &Scenario, sim: &Simulation, warnings: &[String]) -> Self {
        let m = scenario.reported_m();
        let final_phase = *sim.phase.last().expect("non-empty track");
        Report {
            name: scenario.name.clone(),
            description: scenario.description.clone(),
            j: scenario.j.value(),
            m,
            dim: sim.rep.dim(),
            path_kind: scenario.path.shape.kind().to_string(),
            frame: scenario.frame_name().to_string(),
            k_mag: scenario.k_mag,
            t_end: scenario.t_end,
            steps: scenario.steps,
            dt: sim.track.dt,
            max_turning_rate: sim.track.max_turning_rate(),
            final_phase,
            final_solid_angle_weight: if m != 0.0 { final_phase / m } else { 0.0 },
            arc_length: sim.arc_length,
            tangent_windings: sim.windings,
            tolerances: scenario.tolerances,
            checks: sim.summary.checks.clone(),
            passed: sim.summary.all_passed(),
            warnings: warnings.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub timeseries: PathBuf,
    pub report: PathBuf,
    pub states: Option<PathBuf>,
}

pub fn write_outputs(
    scenario: &Scenario,
    sim: &Simulation,
    warnings: &[String],
    out_dir: &Path,
) -> Result<OutputPaths> {
    fs::create_dir_all(out_dir)?;
    let timeseries = out_dir.join(format!("{}_timeseries.csv", scenario.name));
    fs::write(&timeseries, timeseries_csv(sim))?;

    let report = out_dir.join(format!("{}_report.json", scenario.name));
    let json = serde_json::to_string_pretty(&Report::new(scenario, sim, warnings))
        .map_err(|e| crate::error::FiberError::Io(e.to_string()))?;
    fs::write(&report, json + "\n")?;

    let states = if scenario.emit_states {
        let path = out_dir.join(format!("{}_states.csv", scenario.name));
        fs::write(&path, states_csv(sim))?;
        Some(path)
    } else {
        None
    };
    Ok(OutputPaths {
        timeseries,
        report,
        states,
    })
}
