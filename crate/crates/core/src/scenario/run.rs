use std::path::Path;

use crate::analytic_solution::{initial_state, AnalyticSolution};
use crate::error::Result;
use crate::evolution::{expectation, hamiltonian_at, oracle::propagate_rk4, propagate, EvolutionReport};
use crate::guide_geometry::{sample_track, transport_residual, Curve, WaveVectorTrack};
use crate::spin_algebra::{CVector, SpinRepresentation};
use crate::verification::{
    helicity_populations, lvn_residuals, momentum_eigenvalues, momentum_eigenvalues_via_conjugation, population_drift,
    Check, VerificationSummary,
};

use super::output::{write_outputs, OutputPaths};
use super::spec::Scenario;

/// Everything computed for one scenario, before anything is written.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub rep: SpinRepresentation,
    pub track: WaveVectorTrack,
    pub report: EvolutionReport,
    pub exact_states: Vec<CVector>,
    /// `phi_m(t_n)` for the scenario's reported `m`.
    pub phase: Vec<f64>,
    pub lvn_residual: Vec<Option<f64>>,
    pub transport_residual: Vec<f64>,
    pub oracle_states: Option<Vec<CVector>>,
    /// Chord-sum length of the traversed path.
    pub arc_length: f64,
    /// Net tangent windings from the unwrapped azimuth.
    pub windings: f64,
    pub summary: VerificationSummary,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub simulation: Simulation,
    pub paths: OutputPaths,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.simulation.summary.all_passed()
    }

    /// 0 when every enabled check passes, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            3
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc: f64, v| if v.is_nan() { f64::NAN } else { acc.max(v) })
}

fn chord_length(scenario: &Scenario, track: &WaveVectorTrack) -> f64 {
    let shape = &scenario.path.shape;
    let s_of = |t: f64| (scenario.path.speed * t).min(shape.length());
    track
        .times
        .windows(2)
        .map(|w| (shape.point(s_of(w[1])) - shape.point(s_of(w[0]))).norm())
        .sum()
}

/// Runs geometry, propagation, the exact solution and every check.
pub fn simulate(scenario: &Scenario) -> Result<Simulation> {
    let rep = scenario.representation();
    let track = sample_track(
        &scenario.path,
        scenario.k_mag,
        scenario.t_end,
        scenario.steps,
        scenario.options,
    )?;
    let psi0 = initial_state(&track, &rep, &scenario.weights)?;
    let mut report = propagate(&track, &rep, &psi0)?;

    let analytic = AnalyticSolution::new(&track)?;
    let exact_states = analytic.states(&rep, &scenario.weights)?;
    report.attach_fidelity(&exact_states)?;
    report.attach_schrodinger_residual(&track, &rep)?;

    let m_ref = scenario.reported_m();
    let phase: Vec<f64> = analytic.solid_angle().iter().map(|s| m_ref * s).collect();

    let mut lvn_column = vec![None; track.len()];
    for (slot, r) in lvn_column[1..track.len() - 1]
        .iter_mut()
        .zip(lvn_residuals(&track, &rep)?)
    {
        *slot = Some(r);
    }
    let transport = transport_residual(&track);
    let oracle_states = if scenario.run_oracle_integrator {
        Some(propagate_rk4(&track, &rep, &psi0)?)
    } else {
        None
    };

    let tol = &scenario.tolerances;
    let omega_char = track.max_turning_rate();
    let j_scale = rep.j().max(1.0);
    let order2 = (omega_char * track.dt).powi(2) * omega_char;
    let mut summary = VerificationSummary::default();

    summary.push(Check::at_most("norm_drift", report.max_norm_drift(), tol.norm));

    let fidelities = report.fidelity.as_deref().unwrap_or_default();
    summary.push(Check::at_most(
        "fidelity_defect",
        max_of(fidelities.iter().map(|f| 1.0 - f)),
        tol.fidelity,
    ));

    let phase_gap = max_of(
        exact_states
            .iter()
            .zip(&report.states)
            .map(|(a, b)| a.dotc(b).arg().abs()),
    );
    summary.push(Check::at_most("numeric_phase_agreement", phase_gap, tol.phase));

    let mean_m = scenario.weights.mean_helicity();
    summary.push(Check::at_most(
        "helicity_drift",
        max_of(report.helicity.iter().map(|h| (h - mean_m).abs())),
        tol.helicity,
    ));
    let populations = helicity_populations(&track, &rep, &report.states)?;
    summary.push(Check::at_most(
        "helicity_population_drift",
        population_drift(&populations),
        tol.helicity,
    ));

    if scenario.weights.is_pure() {
        let worst = max_of(report.states.iter().zip(&track.omega).map(|(s, w)| {
            let e = expectation(s, &hamiltonian_at(w, &rep)).re.abs();
            if w.norm() > 0.0 {
                e / w.norm()
            } else {
                e
            }
        }));
        summary.push(Check::at_most("dynamical_phase", worst, tol.dynamical_phase));
    }

    summary.push(Check::at_most(
        "transport_residual",
        max_of(transport.iter().copied()),
        tol.transport * track.k_mag * omega_char,
    ));
    summary.push(Check::at_most(
        "momentum_eigenvalue",
        max_of((0..track.len()).map(|n| (momentum_eigenvalues(&track, n) - track.k[n]).norm())),
        tol.momentum * track.k_mag,
    ));
    summary.push(Check::at_most(
        "momentum_conjugation",
        max_of((0..track.len()).map(|n| (momentum_eigenvalues_via_conjugation(&track, n) - track.k[n]).norm())),
        tol.momentum * track.k_mag,
    ));

    let schrodinger = report.schrodinger_residual.as_deref().unwrap_or_default();
    summary.push(Check::at_most(
        "schrodinger_residual",
        max_of(schrodinger.iter().flatten().copied()),
        tol.schrodinger_coeff * j_scale.powi(3) * order2 + 1e-12,
    ));
    summary.push(Check::at_most(
        "lvn_residual",
        max_of(lvn_column.iter().flatten().copied()),
        tol.lvn_coeff * j_scale * order2 + 1e-12,
    ));

    if let Some(rk4) = &oracle_states {
        let gap = max_of(rk4.iter().zip(&report.states).map(|(a, b)| (a - b).norm()));
        summary.push(Check::at_most("oracle_agreement", gap, tol.oracle));
    }

    let arc_length = chord_length(scenario, &track);
    let windings = track.azimuth_winding().abs() / std::f64::consts::TAU;
    if let Some(expected) = scenario.expect.final_phase {
        let last = *phase.last().expect("non-empty track");
        summary.push(Check::at_most("final_phase", (last - expected).abs(), tol.phase));
    }
    if let Some(expected) = scenario.expect.arc_length {
        summary.push(Check::at_most(
            "arc_length",
            ((arc_length - expected) / expected).abs(),
            tol.arc_length,
        ));
    }
    if let Some(min) = scenario.expect.min_windings {
        summary.push(Check::at_least("tangent_windings", windings, min));
    }

    Ok(Simulation {
        rep,
        track,
        report,
        exact_states,
        phase,
        lvn_residual: lvn_column,
        transport_residual: transport,
        oracle_states,
        arc_length,
        windings,
        summary,
    })
}

/// Simulates and writes `<name>_timeseries.csv` and `<name>_report.json` (and
/// `<name>_states.csv` when requested) into `out_dir`.
pub fn run_scenario(scenario: &Scenario, warnings: &[String], out_dir: &Path) -> Result<ScenarioOutcome> {
    let simulation = simulate(scenario)?;
    let paths = write_outputs(scenario, &simulation, warnings, out_dir)?;
    Ok(ScenarioOutcome { simulation, paths })
}
