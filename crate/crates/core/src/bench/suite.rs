//! The two reproduction suites: packing (`exp1`) and covering (`exp2`), each
//! over the stationary case and three non-stationary demand patterns.

use std::path::{Path, PathBuf};

use super::config::{default_seeds, AlgorithmSpec, ExperimentConfig, FamilySpec, OptSpec, PatternSpec, ScheduleSpec};
use super::metrics::MetricsReport;
use super::plot::emit_plots;
use super::run::{run_experiment, write_outputs, ExperimentOutput, RunOptions};
use crate::algorithms::{DalConfig, IalConfig};
use crate::problem::ConstraintDirection;
use crate::{Error, Result};

pub const BETA: [f64; 4] = [0.95, 0.9, 0.85, 0.8];
pub const MU0: f64 = 5.0;
pub const SIGMA0: f64 = 10.0 / 3.0;
pub const DEFAULT_HORIZON: usize = 10_000;

/// Case labels with their demand-mean multipliers.
pub const CASES: [(&str, &[f64]); 4] = [
    ("stationary", &[2.0]),
    ("nonstationary-1", &[1.0, 3.0]),
    ("nonstationary-2", &[3.0, 1.0]),
    ("nonstationary-3", &[1.0, 2.0, 3.0, 2.0, 1.0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exp1,
    Exp2,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(Suite::Exp1),
            "exp2" => Ok(Suite::Exp2),
            other => Err(Error::config(format!("unknown suite {other:?}; expected exp1 or exp2"))),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Exp1 => "exp1",
            Suite::Exp2 => "exp2",
        }
    }

    pub fn family(self) -> FamilySpec {
        match self {
            Suite::Exp1 => FamilySpec {
                beta: BETA.to_vec(),
                budget_cap: 80.0,
                capacity_scale: 11.5,
                direction: ConstraintDirection::Packing,
            },
            Suite::Exp2 => FamilySpec {
                beta: BETA.to_vec(),
                budget_cap: 20.0,
                capacity_scale: 3.8,
                direction: ConstraintDirection::Covering,
            },
        }
    }

    /// One config per case, in table order.
    pub fn configs(self, horizon: usize, seeds: &[u64]) -> Vec<ExperimentConfig> {
        CASES
            .iter()
            .map(|(case, ks)| ExperimentConfig {
                case: (*case).to_string(),
                horizon,
                seeds: seeds.to_vec(),
                family: self.family(),
                schedule: ScheduleSpec::Pattern(PatternSpec {
                    ks: ks.to_vec(),
                    mu0: MU0,
                    sigma0: SIGMA0,
                }),
                corruption: None,
                predictions: None,
                algorithms: vec![AlgorithmSpec::Dal(DalConfig::default()), AlgorithmSpec::Ial(IalConfig::default())],
                opt: OptSpec::default(),
                output: None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSettings {
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub options: RunOptions,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            horizon: DEFAULT_HORIZON,
            seeds: default_seeds(),
            options: RunOptions::default(),
        }
    }
}

/// Runs all four cases and merges their reports and traces.
pub fn run_suite(suite: Suite, settings: &SuiteSettings) -> Result<ExperimentOutput> {
    let mut reports = Vec::new();
    let mut traces = Vec::new();
    for config in suite.configs(settings.horizon, &settings.seeds) {
        let out = run_experiment(&config, settings.options)?;
        reports.push(out.report);
        traces.extend(out.traces);
    }
    Ok(ExperimentOutput {
        report: MetricsReport::concat(reports),
        traces,
    })
}

/// Writes the suite's report, traces and `figure.svg`. Returns the figure
/// path when one was drawn.
pub fn write_suite_outputs(output: &ExperimentOutput, dir: &Path) -> Result<Option<PathBuf>> {
    write_outputs(output, dir)?;
    emit_plots(&output.traces, dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::metrics::emit_table;
    use crate::bench::run::TracePolicy;

    #[test]
    fn configs_are_valid() {
        for suite in [Suite::Exp1, Suite::Exp2] {
            let configs = suite.configs(100, &[0]);
            assert_eq!(configs.len(), 4);
            for c in &configs {
                c.validate().unwrap();
            }
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("exp2".parse::<Suite>().unwrap(), Suite::Exp2);
        assert!("exp3".parse::<Suite>().is_err());
    }

    #[test]
    fn short_suite_table_shape() {
        let settings = SuiteSettings {
            horizon: 100,
            seeds: vec![0, 1],
            options: RunOptions {
                jobs: 2,
                traces: TracePolicy::FirstSeed,
            },
        };
        let out = run_suite(Suite::Exp1, &settings).unwrap();
        assert!(out.report.failures.is_empty());
        let table = emit_table(&out.report);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 5);
        assert_eq!(out.traces.len(), 8);

        let dir = tempfile::tempdir().unwrap();
        let fig = write_suite_outputs(&out, dir.path()).unwrap();
        assert!(fig.unwrap().exists());
        assert!(dir.path().join("report.csv").exists());
    }
}
