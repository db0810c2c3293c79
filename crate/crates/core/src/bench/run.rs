use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{AlgorithmSpec, ExperimentConfig, PredictionSpec};
use super::metrics::{CellFailure, MetricsReport, MetricsRow};
use super::traces::{write_trace, LabeledTrace};
use crate::algorithms::{dal_run, ial_precompute, ial_run, Horizon, IalPlan, RunTrace};
use crate::environments::{apply_corruption, corrupted_groups, CorruptionPlan, EnvironmentSchedule};
use crate::problem::ResourceAllocation;
use crate::solvers::{fluid_opt, FluidSettings};
use crate::{Error, Result};

/// Which traces a run keeps in memory for writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TracePolicy {
    #[default]
    All,
    /// Only the first configured seed of every algorithm.
    FirstSeed,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `0` uses rayon's default.
    pub jobs: usize,
    pub traces: TracePolicy,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: 0,
            traces: TracePolicy::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: MetricsReport,
    pub traces: Vec<LabeledTrace>,
}

struct Prepared {
    family: ResourceAllocation,
    schedule: EnvironmentSchedule,
    plan: CorruptionPlan,
    /// `None` when some seed needs its own benchmark.
    shared_opt: Option<f64>,
    ial: Option<std::result::Result<(IalPlan, Option<f64>), String>>,
}

fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let family = config.family.build()?;
    let schedule = config.schedule.build(config.horizon, family.n_resources())?;
    let plan = config.corruption.clone().unwrap_or_else(CorruptionPlan::none);
    let corrupted = !matches!(&plan.periods, crate::environments::PeriodSelection::Explicit { periods } if periods.is_empty());
    let shared_opt = if corrupted {
        None
    } else {
        let groups = schedule.saa_groups(config.opt.samples, config.opt.seed);
        Some(fluid_opt(&family, &groups, FluidSettings::default())?.raw_value)
    };
    let ial_config = config.algorithms.iter().find_map(|a| match a {
        AlgorithmSpec::Ial(c) => Some(c),
        _ => None,
    });
    let ial = ial_config.map(|cfg| {
        let spec = config.predictions.clone().unwrap_or(PredictionSpec::Exact);
        let predictions = spec.build(&schedule).map_err(|e| e.to_string())?;
        let w_t = predictions.inaccuracy(&family, &schedule).ok();
        ial_precompute(&family, &predictions.schedule, cfg)
            .map(|p| (p, w_t))
            .map_err(|e| e.to_string())
    });
    Ok(Prepared {
        family,
        schedule,
        plan,
        shared_opt,
        ial,
    })
}

/// Algorithm labels, made unique by suffixing repeats with `#k`.
fn labels(config: &ExperimentConfig) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in &config.algorithms {
        let base = match a {
            AlgorithmSpec::Dal(c) if c.discrete_c.is_some() => "DAL-EXP3",
            AlgorithmSpec::Dal(_) => "DAL",
            AlgorithmSpec::Ial(_) => "IAL",
        };
        let k = out.iter().filter(|l| l.split('#').next() == Some(base)).count();
        out.push(if k == 0 { base.to_string() } else { format!("{base}#{}", k + 1) });
    }
    out
}

struct Cell {
    row: MetricsRow,
    trace: Option<LabeledTrace>,
}

fn run_cell(
    config: &ExperimentConfig,
    prep: &Prepared,
    alg: usize,
    label: &str,
    seed: u64,
    keep: bool,
) -> Result<Cell> {
    let clean = prep.schedule.sample_horizon(seed);
    let horizon = apply_corruption(clean, &prep.plan, seed)?;
    let opt = match prep.shared_opt {
        Some(v) => v,
        None => {
            let groups = corrupted_groups(&prep.schedule, &prep.plan, seed, config.opt.samples, config.opt.seed)?;
            fluid_opt(&prep.family, &groups, FluidSettings::default())?.raw_value
        }
    };
    let view = Horizon::from(&horizon);
    let (mut trace, w_t): (RunTrace, Option<f64>) = match &config.algorithms[alg] {
        AlgorithmSpec::Dal(cfg) => (dal_run(&prep.family, &view, cfg, seed)?, None),
        AlgorithmSpec::Ial(cfg) => {
            let (plan, w_t) = match &prep.ial {
                Some(Ok(p)) => p,
                Some(Err(msg)) => return Err(Error::config(format!("IAL precompute failed: {msg}"))),
                None => unreachable!("IAL plan is prepared whenever IAL is configured"),
            };
            (ial_run(&prep.family, &view, plan, cfg, seed)?, *w_t)
        }
    };
    trace.algorithm = label.to_string();
    let row = MetricsRow::new(label, &config.case, seed, trace.objective(), opt, trace.d_t(), trace.w, w_t);
    Ok(Cell {
        row,
        trace: keep.then(|| LabeledTrace {
            case: config.case.clone(),
            seed,
            trace,
        }),
    })
}

/// Runs every `(algorithm, seed)` cell on a bounded pool. Cell errors become
/// report failures; only configuration and benchmark errors abort.
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentOutput> {
    let prep = prepare(config)?;
    let labels = labels(config);
    let cells: Vec<(usize, u64)> = (0..config.algorithms.len())
        .flat_map(|a| config.seeds.iter().map(move |s| (a, *s)))
        .collect();
    let keep = |seed: u64| match options.traces {
        TracePolicy::All => true,
        TracePolicy::FirstSeed => Some(&seed) == config.seeds.first(),
        TracePolicy::None => false,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let results: Vec<(usize, u64, Result<Cell>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(a, s)| (a, s, run_cell(config, &prep, a, &labels[a], s, keep(s))))
            .collect()
    });

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (a, seed, r) in results {
        match r {
            Ok(cell) => {
                rows.push(cell.row);
                traces.extend(cell.trace);
            }
            Err(e) => failures.push(CellFailure {
                algorithm: labels[a].clone(),
                case: config.case.clone(),
                seed,
                message: e.to_string(),
            }),
        }
    }
    traces.sort_by(|a, b| (&a.trace.algorithm, a.seed).cmp(&(&b.trace.algorithm, b.seed)));
    Ok(ExperimentOutput {
        report: MetricsReport::from_cells(rows, failures),
        traces,
    })
}

/// Writes `report.csv`, `failures.txt` when some cell failed, and every kept
/// trace under `traces/`. Returns the trace paths.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    output.report.write_csv(&dir.join("report.csv"))?;
    if !output.report.failures.is_empty() {
        let text: String = output
            .report
            .failures
            .iter()
            .map(|f| format!("{} {} seed {}: {}\n", f.case, f.algorithm, f.seed, f.message))
            .collect();
        let path = dir.join("failures.txt");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    let trace_dir = dir.join("traces");
    output.traces.iter().map(|t| write_trace(&trace_dir, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::metrics::SeedLabel;

    fn smoke(horizon: usize, seeds: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{
                "case": "smoke",
                "horizon": {horizon},
                "seeds": {seeds},
                "family": {{"beta": [0.5, 0.4], "budget_cap": 4, "capacity_scale": 2, "direction": "packing"}},
                "schedule": {{"pattern": {{"ks": [1], "mu0": 1, "sigma0": 0.5}}}},
                "algorithms": [{{"kind": "dal"}}, {{"kind": "ial", "n_samples": 50}}],
                "opt": {{"samples": 50}}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn single_period_smoke() {
        let out = run_experiment(&smoke(1, "[0]"), RunOptions::default()).unwrap();
        assert!(out.report.failures.is_empty());
        let per_seed: Vec<_> = out.report.per_seed().collect();
        assert_eq!(per_seed.len(), 2);
        assert!(per_seed.iter().all(|r| r.regret.is_finite()));
        assert_eq!(out.traces.len(), 2);
    }

    #[test]
    fn row_count_is_cells_plus_aggregates() {
        let out = run_experiment(&smoke(30, "[3, 1, 2]"), RunOptions { jobs: 2, traces: TracePolicy::FirstSeed }).unwrap();
        assert_eq!(out.report.rows.len(), 3 * 2 + 2 * 2);
        assert_eq!(out.traces.len(), 2);
        assert!(out.traces.iter().all(|t| t.seed == 3));
        let seeds: Vec<SeedLabel> = out.report.rows.iter().take(3).map(|r| r.seed).collect();
        assert_eq!(seeds, [SeedLabel::Seed(1), SeedLabel::Seed(2), SeedLabel::Seed(3)]);
    }

    #[test]
    fn output_independent_of_worker_count() {
        let c = smoke(40, "[0, 1, 2, 3]");
        let a = run_experiment(&c, RunOptions { jobs: 1, traces: TracePolicy::All }).unwrap();
        let b = run_experiment(&c, RunOptions { jobs: 3, traces: TracePolicy::All }).unwrap();
        assert_eq!(a.report.to_csv(), b.report.to_csv());
        assert_eq!(a.traces, b.traces);
    }

    #[test]
    fn cell_errors_do_not_abort() {
        let mut c = smoke(20, "[0, 1]");
        if let AlgorithmSpec::Dal(cfg) = &mut c.algorithms[0] {
            cfg.discrete_c = Some(vec![vec![100.0]]);
        }
        let out = run_experiment(&c, RunOptions::default()).unwrap();
        assert_eq!(out.report.failures.len(), 2);
        assert_eq!(out.report.failures[0].algorithm, "DAL-EXP3");
        assert_eq!(out.report.per_seed().count(), 2);
    }

    #[test]
    fn duplicate_algorithms_get_distinct_labels() {
        let mut c = smoke(5, "[0]");
        c.algorithms.push(c.algorithms[0].clone());
        assert_eq!(labels(&c), ["DAL", "IAL", "DAL#2"]);
    }

    #[test]
    fn writes_report_and_traces() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&smoke(10, "[0]"), RunOptions::default()).unwrap();
        let paths = write_outputs(&out, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(dir.path().join("report.csv").exists());
        assert!(!dir.path().join("failures.txt").exists());
    }
}
