//! Batch front end: scenario files in, CSV time series and a JSON report out.

mod output;
mod run;
mod spec;

pub use output::{format_float, timeseries_csv, write_outputs, OutputPaths, Report, TIMESERIES_COLUMNS};
pub use run::{run_scenario, simulate, ScenarioOutcome, Simulation};
pub use spec::{
    parse_scenario_text, read_scenario_file, validate, ComponentFile, Expectations, PathFile, Scenario, ScenarioFile,
    SpinValue, Validated, DEFAULT_K_MAG, DEFAULT_STEPS,
};

pub struct Builtin {
    pub name: &'static str,
    pub source: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "straight",
        source: include_str!("../../scenarios/straight.toml"),
    },
    Builtin {
        name: "circle",
        source: include_str!("../../scenarios/circle.toml"),
    },
    Builtin {
        name: "cone",
        source: include_str!("../../scenarios/cone.toml"),
    },
    Builtin {
        name: "cone_loop",
        source: include_str!("../../scenarios/cone_loop.toml"),
    },
    Builtin {
        name: "luo_spiral",
        source: include_str!("../../scenarios/luo_spiral.toml"),
    },
];

pub fn list_scenarios() -> Vec<(&'static str, String)> {
    BUILTINS
        .iter()
        .map(|b| {
            let description = parse_scenario_text(b.source, false)
                .map(|f| f.description)
                .unwrap_or_default();
            (b.name, description)
        })
        .collect()
}

pub fn builtin(name: &str) -> Option<ScenarioFile> {
    BUILTINS
        .iter()
        .find(|b| b.name == name)
        .map(|b| parse_scenario_text(b.source, false).expect("built-in scenarios parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        for b in BUILTINS {
            let file = builtin(b.name).unwrap();
            assert_eq!(file.name, b.name);
            let v = validate(&file);
            assert!(v.scenario.is_ok(), "{}: {:?}", b.name, v.scenario);
            assert!(v.warnings.is_empty());
        }
        assert!(list_scenarios().iter().any(|(n, _)| *n == "luo_spiral"));
        assert!(builtin("nope").is_none());
    }
}
