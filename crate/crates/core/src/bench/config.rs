//! Experiment configuration files.
//!
//! A config is a JSON document. Unknown keys are rejected at every level.
//!
//! ```json
//! {
//!   "case": "stationary",
//!   "horizon": 10000,
//!   "seeds": [0, 1, 2],
//!   "family": {"beta": [0.95, 0.9, 0.85, 0.8], "budget_cap": 80,
//!              "capacity_scale": 11.5, "direction": "packing"},
//!   "schedule": {"pattern": {"ks": [1, 3], "mu0": 5, "sigma0": 3.3333}},
//!   "algorithms": [{"kind": "dal"}, {"kind": "ial"}]
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{DalConfig, IalConfig};
use crate::environments::{CorruptionPlan, EnvironmentSchedule, PredictionSchedule, Segment};
use crate::problem::{ConstraintDirection, ResourceAllocation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub beta: Vec<f64>,
    pub budget_cap: f64,
    /// Raw consumption corresponding to one normalized unit.
    pub capacity_scale: f64,
    pub direction: ConstraintDirection,
}

impl FamilySpec {
    pub fn build(&self) -> Result<ResourceAllocation> {
        ResourceAllocation::new(self.beta.clone(), self.budget_cap, self.capacity_scale, self.direction)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    /// Demand mean multipliers, one per equal-length interval.
    pub ks: Vec<f64>,
    pub mu0: f64,
    pub sigma0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Pattern(PatternSpec),
    Segments(Vec<Segment>),
}

impl ScheduleSpec {
    pub fn build(&self, horizon: usize, n_resources: usize) -> Result<EnvironmentSchedule> {
        let schedule = match self {
            ScheduleSpec::Pattern(p) => EnvironmentSchedule::from_pattern(horizon, &p.ks, p.mu0, p.sigma0, n_resources)?,
            ScheduleSpec::Segments(segments) => EnvironmentSchedule::new(segments.clone())?,
        };
        if schedule.horizon() != horizon {
            return Err(Error::config(format!(
                "schedule covers {} periods but horizon is {horizon}",
                schedule.horizon()
            )));
        }
        if schedule.dim() != n_resources {
            return Err(Error::config("schedule dimension differs from the number of resources"));
        }
        Ok(schedule)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictionSpec {
    /// The true schedule.
    Exact,
    /// The true schedule with every location moved by `shift`.
    Shifted { shift: f64 },
    Schedule {
        segments: Vec<Segment>,
        #[serde(default)]
        declared_inaccuracy: Option<f64>,
    },
}

impl PredictionSpec {
    pub fn build(&self, truth: &EnvironmentSchedule) -> Result<PredictionSchedule> {
        let p = match self {
            PredictionSpec::Exact => PredictionSchedule::exact(truth),
            PredictionSpec::Shifted { shift } => PredictionSchedule::shifted(truth, *shift)?,
            PredictionSpec::Schedule {
                segments,
                declared_inaccuracy,
            } => PredictionSchedule {
                schedule: EnvironmentSchedule::new(segments.clone())?,
                declared_inaccuracy: *declared_inaccuracy,
            },
        };
        if p.schedule.horizon() != truth.horizon() || p.schedule.dim() != truth.dim() {
            return Err(Error::config("predictions must match the schedule's horizon and dimension"));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    Dal(DalConfig),
    Ial(IalConfig),
}

/// SAA settings of the fluid benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptSpec {
    #[serde(default = "default_opt_samples")]
    pub samples: usize,
    #[serde(default = "default_opt_seed")]
    pub seed: u64,
}

fn default_opt_samples() -> usize {
    4000
}

fn default_opt_seed() -> u64 {
    1
}

impl Default for OptSpec {
    fn default() -> Self {
        OptSpec {
            samples: default_opt_samples(),
            seed: default_opt_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label used in report rows and trace file names.
    #[serde(default = "default_case")]
    pub case: String,
    pub horizon: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub family: FamilySpec,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub corruption: Option<CorruptionPlan>,
    #[serde(default)]
    pub predictions: Option<PredictionSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub opt: OptSpec,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_case() -> String {
    "default".to_string()
}

/// Twenty replications.
pub fn default_seeds() -> Vec<u64> {
    (0..20).collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("horizon must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed is required"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("at least one algorithm is required"));
        }
        if self.case.is_empty() || !self.case.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::config("case labels use ASCII letters, digits, '-', '_' and '.'"));
        }
        let family = self.family.build()?;
        let schedule = self.schedule.build(self.horizon, family.n_resources())?;
        if let Some(plan) = &self.corruption {
            plan.resolve(self.horizon, 0)?;
        }
        if let Some(p) = &self.predictions {
            p.build(&schedule)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "horizon": 10,
        "family": {"beta": [0.5], "budget_cap": 1, "capacity_scale": 1, "direction": "packing"},
        "schedule": {"pattern": {"ks": [1], "mu0": 1, "sigma0": 0}},
        "algorithms": [{"kind": "dal"}, {"kind": "ial", "n_samples": 10}]
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.seeds.len(), 20);
        assert_eq!(c.case, "default");
        assert_eq!(c.opt, OptSpec::default());
        match &c.algorithms[1] {
            AlgorithmSpec::Ial(cfg) => assert_eq!(cfg.n_samples, 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let top = MINIMAL.replacen("\"horizon\"", "\"colour\": 1, \"horizon\"", 1);
        assert!(ExperimentConfig::from_json(&top).is_err());
        let nested = MINIMAL.replace("{\"kind\": \"dal\"}", "{\"kind\": \"dal\", \"speed\": 2}");
        assert!(ExperimentConfig::from_json(&nested).is_err());
        let family = MINIMAL.replace("\"budget_cap\": 1", "\"budget_cap\": 1, \"cap\": 2");
        assert!(ExperimentConfig::from_json(&family).is_err());
    }

    #[test]
    fn horizon_must_match_segments() {
        let text = MINIMAL.replace(
            r#"{"pattern": {"ks": [1], "mu0": 1, "sigma0": 0}}"#,
            r#"{"segments": [{"start": 1, "end": 9, "distribution": {"kind": "discrete", "atoms": [[1.0]], "weights": [1.0]}}]}"#,
        );
        assert!(matches!(ExperimentConfig::from_json(&text), Err(Error::Config(_))));
    }

    #[test]
    fn round_trips() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_case_label() {
        let text = MINIMAL.replacen("\"horizon\"", "\"case\": \"a,b\", \"horizon\"", 1);
        assert!(ExperimentConfig::from_json(&text).is_err());
    }
}
