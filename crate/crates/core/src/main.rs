use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fiberwave::scenario::{self, ScenarioFile};
use fiberwave::FiberError;

#[derive(Parser)]
#[command(name = "fiberwave", version, about = "Spin-j matter waves along curved atom guides")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its time series and report.
    Run {
        /// Scenario file (TOML or JSON) or the name of a built-in scenario.
        scenario: String,
        /// Output directory (default: $FIBERWAVE_OUT or the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of integration steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Also run the RK4 cross-check integrator.
        #[arg(long)]
        oracle: bool,
    },
    /// Check a scenario file without running it.
    Validate { scenario: String },
    /// List the built-in scenarios.
    List,
}

fn load(source: &str) -> Result<ScenarioFile, FiberError> {
    let path = Path::new(source);
    if path.exists() {
        return scenario::read_scenario_file(path);
    }
    scenario::builtin(source).ok_or_else(|| FiberError::Io(format!("{source}: no such file or built-in scenario")))
}

fn report_errors(errors: &[FiberError]) -> ExitCode {
    for e in errors {
        eprintln!("error: {e}");
    }
    let code = errors.iter().map(FiberError::exit_code).max().unwrap_or(2);
    ExitCode::from(code as u8)
}

fn prepare(
    source: &str,
    steps: Option<usize>,
    oracle: bool,
) -> Result<(scenario::Scenario, Vec<String>), Vec<FiberError>> {
    let mut file = load(source).map_err(|e| vec![e])?;
    if steps.is_some() {
        file.steps = steps;
    }
    if oracle {
        file.run_oracle_integrator = true;
    }
    let validated = scenario::validate(&file);
    for w in &validated.warnings {
        eprintln!("warning: {w}");
    }
    validated.scenario.map(|s| (s, validated.warnings))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, description) in scenario::list_scenarios() {
                println!("{name:<12} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario: source } => match prepare(&source, None, false) {
            Ok((s, _)) => {
                println!("{}: ok ({} steps, t_end = {})", s.name, s.steps, s.t_end);
                ExitCode::SUCCESS
            }
            Err(errors) => report_errors(&errors),
        },
        Command::Run {
            scenario: source,
            out,
            steps,
            oracle,
        } => {
            let (s, warnings) = match prepare(&source, steps, oracle) {
                Ok(v) => v,
                Err(errors) => return report_errors(&errors),
            };
            let out_dir = out
                .or_else(|| std::env::var_os("FIBERWAVE_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            match scenario::run_scenario(&s, &warnings, &out_dir) {
                Ok(outcome) => {
                    for c in &outcome.simulation.summary.checks {
                        let mark = if c.passed { "ok  " } else { "FAIL" };
                        println!("{mark} {:<26} {:.3e} (limit {:.3e})", c.name, c.measured, c.threshold);
                    }
                    println!("wrote {}", outcome.paths.timeseries.display());
                    println!("wrote {}", outcome.paths.report.display());
                    if let Some(p) = &outcome.paths.states {
                        println!("wrote {}", p.display());
                    }
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => report_errors(&[e]),
            }
        }
    }
}
