use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// Report CSV header, in order.
pub const REPORT_COLUMNS: [&str; 10] = [
    "algorithm", "case", "seed", "objective", "opt", "regret", "rel_regret", "d_T", "W", "W_T",
];

/// Per-seed cell or one of the two aggregate rows of a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SeedLabel {
    Seed(u64),
    Mean,
    Std,
}

impl fmt::Display for SeedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedLabel::Seed(s) => write!(f, "{s}"),
            SeedLabel::Mean => f.write_str("mean"),
            SeedLabel::Std => f.write_str("std"),
        }
    }
}

impl std::str::FromStr for SeedLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean" => Ok(SeedLabel::Mean),
            "std" => Ok(SeedLabel::Std),
            _ => s.parse().map(SeedLabel::Seed).map_err(|_| format!("bad seed label {s:?}")),
        }
    }
}

/// One report line. Objectives are in raw minimization units; `W_T` is only
/// defined for prediction-driven algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub algorithm: String,
    pub case: String,
    pub seed: SeedLabel,
    pub objective: f64,
    pub opt: f64,
    pub regret: f64,
    pub rel_regret: f64,
    pub d_t: f64,
    pub w: f64,
    pub w_t: Option<f64>,
}

impl MetricsRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(algorithm: &str, case: &str, seed: u64, objective: f64, opt: f64, d_t: f64, w: usize, w_t: Option<f64>) -> Self {
        let regret = objective - opt;
        MetricsRow {
            algorithm: algorithm.to_string(),
            case: case.to_string(),
            seed: SeedLabel::Seed(seed),
            objective,
            opt,
            regret,
            rel_regret: regret / opt.abs(),
            d_t,
            w: w as f64,
            w_t,
        }
    }

    fn numbers(&self) -> [Option<f64>; 7] {
        [
            Some(self.objective),
            Some(self.opt),
            Some(self.regret),
            Some(self.rel_regret),
            Some(self.d_t),
            Some(self.w),
            self.w_t,
        ]
    }

    fn with_numbers(&self, seed: SeedLabel, v: [Option<f64>; 7]) -> Self {
        MetricsRow {
            algorithm: self.algorithm.clone(),
            case: self.case.clone(),
            seed,
            objective: v[0].unwrap_or(f64::NAN),
            opt: v[1].unwrap_or(f64::NAN),
            regret: v[2].unwrap_or(f64::NAN),
            rel_regret: v[3].unwrap_or(f64::NAN),
            d_t: v[4].unwrap_or(f64::NAN),
            w: v[5].unwrap_or(f64::NAN),
            w_t: v[6],
        }
    }
}

/// A cell that produced no trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub algorithm: String,
    pub case: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
    pub failures: Vec<CellFailure>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        f64::NAN
    };
    (mean, var.sqrt())
}

impl MetricsReport {
    /// Builds a report from per-seed rows: each `(case, algorithm)` group in
    /// first-appearance order of cases, algorithms sorted, seeds ascending,
    /// followed by its `mean` and sample `std` rows.
    pub fn from_cells(mut cells: Vec<MetricsRow>, failures: Vec<CellFailure>) -> Self {
        let mut cases: Vec<String> = Vec::new();
        for c in &cells {
            if !cases.contains(&c.case) {
                cases.push(c.case.clone());
            }
        }
        cells.sort_by(|a, b| {
            let ca = cases.iter().position(|c| *c == a.case);
            let cb = cases.iter().position(|c| *c == b.case);
            ca.cmp(&cb).then_with(|| a.algorithm.cmp(&b.algorithm)).then(a.seed.cmp(&b.seed))
        });
        let mut rows = Vec::with_capacity(cells.len() + 4);
        let mut start = 0;
        while start < cells.len() {
            let mut end = start;
            while end < cells.len() && cells[end].case == cells[start].case && cells[end].algorithm == cells[start].algorithm {
                end += 1;
            }
            let group = &cells[start..end];
            let mut mean = [None; 7];
            let mut std = [None; 7];
            for k in 0..7 {
                let vals: Vec<f64> = group.iter().filter_map(|r| r.numbers()[k]).collect();
                if !vals.is_empty() {
                    let (m, s) = mean_std(&vals);
                    mean[k] = Some(m);
                    std[k] = Some(s);
                }
            }
            rows.extend_from_slice(group);
            rows.push(group[0].with_numbers(SeedLabel::Mean, mean));
            rows.push(group[0].with_numbers(SeedLabel::Std, std));
            start = end;
        }
        let mut failures = failures;
        failures.sort_by(|a, b| (&a.case, &a.algorithm, a.seed).cmp(&(&b.case, &b.algorithm, b.seed)));
        MetricsReport { rows, failures }
    }

    /// Merges reports of several experiments, keeping their order.
    pub fn concat(reports: impl IntoIterator<Item = MetricsReport>) -> Self {
        let mut out = MetricsReport::default();
        for r in reports {
            out.rows.extend(r.rows);
            out.failures.extend(r.failures);
        }
        out
    }

    /// The aggregate row of one group.
    pub fn aggregate(&self, algorithm: &str, case: &str, which: SeedLabel) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.case == case && r.seed == which)
    }

    pub fn per_seed(&self) -> impl Iterator<Item = &MetricsRow> {
        self.rows.iter().filter(|r| matches!(r.seed, SeedLabel::Seed(_)))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.algorithm.clone(), r.case.clone(), r.seed.to_string()];
            rec.extend(r.numbers().iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(format!("{other:?}")),
        })?;
        let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if headers.iter().ne(REPORT_COLUMNS) {
            return Err(parse_err(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
        }
        let mut rows = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            let num = |k: usize| -> Result<Option<f64>> {
                let s = &rec[k];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .map(Some)
                        .map_err(|_| parse_err(format!("row {}: bad number {s:?} in {}", line + 2, REPORT_COLUMNS[k])))
                }
            };
            let seed: SeedLabel = rec[2].parse().map_err(parse_err)?;
            let v = [num(3)?, num(4)?, num(5)?, num(6)?, num(7)?, num(8)?, num(9)?];
            let base = MetricsRow {
                algorithm: rec[0].to_string(),
                case: rec[1].to_string(),
                seed,
                objective: 0.0,
                opt: 0.0,
                regret: 0.0,
                rel_regret: 0.0,
                d_t: 0.0,
                w: 0.0,
                w_t: None,
            };
            rows.push(base.with_numbers(seed, v));
        }
        Ok(MetricsReport {
            rows,
            failures: Vec::new(),
        })
    }
}

/// Mean relative regret in percent, one row per algorithm and one column
/// per case (cases and algorithms in first-appearance order).
pub fn emit_table(report: &MetricsReport) -> String {
    let mut cases: Vec<&str> = Vec::new();
    let mut algorithms: Vec<&str> = Vec::new();
    for r in report.rows.iter().filter(|r| r.seed == SeedLabel::Mean) {
        if !cases.contains(&r.case.as_str()) {
            cases.push(&r.case);
        }
        if !algorithms.contains(&r.algorithm.as_str()) {
            algorithms.push(&r.algorithm);
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["algorithm"];
    header.extend(&cases);
    w.write_record(&header).expect("in-memory write");
    for a in &algorithms {
        let mut rec = vec![a.to_string()];
        for c in &cases {
            rec.push(
                report
                    .aggregate(a, c, SeedLabel::Mean)
                    .map(|r| format!("{:.2}", 100.0 * r.rel_regret))
                    .unwrap_or_default(),
            );
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells() -> Vec<MetricsRow> {
        vec![
            MetricsRow::new("IAL", "a", 1, -90.0, -100.0, 0.0, 0, Some(0.5)),
            MetricsRow::new("DAL", "a", 1, -80.0, -100.0, 0.1, 0, None),
            MetricsRow::new("DAL", "a", 0, -90.0, -100.0, -0.1, 0, None),
            MetricsRow::new("IAL", "a", 0, -95.0, -100.0, 0.0, 0, Some(0.5)),
        ]
    }

    #[test]
    fn aggregates_mean_and_sample_std() {
        let r = MetricsReport::from_cells(cells(), vec![]);
        assert_eq!(r.rows.len(), 4 + 4);
        let m = r.aggregate("DAL", "a", SeedLabel::Mean).unwrap();
        assert!((m.regret - 15.0).abs() < 1e-12);
        assert!((m.rel_regret - 0.15).abs() < 1e-12);
        let s = r.aggregate("DAL", "a", SeedLabel::Std).unwrap();
        assert!((s.regret - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.aggregate("DAL", "a", SeedLabel::Mean).unwrap().w_t, None);
        assert_eq!(r.aggregate("IAL", "a", SeedLabel::Mean).unwrap().w_t, Some(0.5));
    }

    #[test]
    fn rows_are_sorted_by_algorithm_then_seed() {
        let r = MetricsReport::from_cells(cells(), vec![]);
        let labels: Vec<String> = r.rows.iter().map(|r| format!("{}:{}", r.algorithm, r.seed)).collect();
        assert_eq!(labels, ["DAL:0", "DAL:1", "DAL:mean", "DAL:std", "IAL:0", "IAL:1", "IAL:mean", "IAL:std"]);
    }

    #[test]
    fn csv_round_trip() {
        let r = MetricsReport::from_cells(cells(), vec![]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        r.write_csv(&path).unwrap();
        let back = MetricsReport::read_csv(&path).unwrap();
        assert_eq!(back.to_csv(), r.to_csv());
        assert!(r.to_csv().starts_with("algorithm,case,seed,objective,opt,regret,rel_regret,d_T,W,W_T\n"));
    }

    #[test]
    fn single_seed_std_is_nan() {
        let r = MetricsReport::from_cells(vec![MetricsRow::new("DAL", "a", 3, 1.0, 2.0, 0.0, 0, None)], vec![]);
        assert!(r.aggregate("DAL", "a", SeedLabel::Std).unwrap().regret.is_nan());
        assert!(r.rows[0].regret.is_finite());
    }

    #[test]
    fn table_shape() {
        let mut all = cells();
        all.push(MetricsRow::new("DAL", "b", 0, -70.0, -100.0, 0.0, 0, None));
        let t = emit_table(&MetricsReport::from_cells(all, vec![]));
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "algorithm,a,b");
        assert_eq!(lines[1], "DAL,15.00,30.00");
        assert_eq!(lines[2], "IAL,7.50,");
    }

    #[test]
    fn missing_file_reports_path() {
        let err = MetricsReport::read_csv(Path::new("/nonexistent/report.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/report.csv"));
    }
}
