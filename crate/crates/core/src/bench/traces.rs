//! Trace CSV files with a JSON sidecar holding run-level fields.
//!
//! Columns: `t, c, i_dual, corrupted, x_1..x_n, obj_inc, g_1..g_m,
//! cum_g_1..cum_g_m, terminated`. `c` becomes `c_1..c_d` when the first
//! stage has more than one coordinate. `i_dual` is 1-based and empty on
//! padded periods; flags are `0`/`1`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{PeriodRecord, RunTrace};
use crate::problem::ConstraintDirection;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMeta {
    pub algorithm: String,
    pub case: String,
    pub seed: u64,
    pub direction: ConstraintDirection,
    pub beta: Vec<f64>,
    pub capacity_scale: f64,
    pub mu: f64,
    pub terminated_at: Option<usize>,
    pub clipped: usize,
    pub w: usize,
}

/// A trace together with the labels of the cell that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrace {
    pub case: String,
    pub seed: u64,
    pub trace: RunTrace,
}

impl LabeledTrace {
    pub fn meta(&self) -> TraceMeta {
        TraceMeta {
            algorithm: self.trace.algorithm.clone(),
            case: self.case.clone(),
            seed: self.seed,
            direction: self.trace.direction,
            beta: self.trace.beta.clone(),
            capacity_scale: self.trace.capacity_scale,
            mu: self.trace.mu,
            terminated_at: self.trace.terminated_at,
            clipped: self.trace.clipped,
            w: self.trace.w,
        }
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}_seed{}", self.case, self.trace.algorithm, self.seed)
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

fn header(trace: &RunTrace) -> Vec<String> {
    let first = trace.records.first();
    let d = first.map_or(1, |r| r.c.len());
    let n = first.map_or(0, |r| r.x.len());
    let m = trace.beta.len();
    let mut h = vec!["t".to_string()];
    if d == 1 {
        h.push("c".into());
    } else {
        h.extend((1..=d).map(|k| format!("c_{k}")));
    }
    h.push("i_dual".into());
    h.push("corrupted".into());
    h.extend((1..=n).map(|k| format!("x_{k}")));
    h.push("obj_inc".into());
    h.extend((1..=m).map(|k| format!("g_{k}")));
    h.extend((1..=m).map(|k| format!("cum_g_{k}")));
    h.push("terminated".into());
    h
}

pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(trace)).expect("in-memory write");
    let flag = |b: bool| if b { "1".to_string() } else { "0".to_string() };
    for r in &trace.records {
        let mut rec = vec![r.t.to_string()];
        rec.extend(r.c.iter().map(f64::to_string));
        rec.push(r.i_dual.map(|i| (i + 1).to_string()).unwrap_or_default());
        rec.push(flag(r.corrupted));
        rec.extend(r.x.iter().map(f64::to_string));
        rec.push(r.obj_inc.to_string());
        rec.extend(r.g.iter().map(f64::to_string));
        rec.extend(r.cum_g.iter().map(f64::to_string));
        rec.push(flag(r.terminated));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Writes `<dir>/<stem>.csv` and its sidecar; returns the CSV path.
pub fn write_trace(dir: &Path, labeled: &LabeledTrace) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{}.csv", labeled.file_stem()));
    std::fs::write(&path, trace_to_csv(&labeled.trace)).map_err(|e| Error::io(&path, e))?;
    let meta = sidecar_path(&path);
    let json = serde_json::to_string_pretty(&labeled.meta()).expect("meta serializes");
    std::fs::write(&meta, json).map_err(|e| Error::io(&meta, e))?;
    Ok(path)
}

/// Reads a trace CSV and its sidecar.
pub fn read_trace(path: &Path) -> Result<LabeledTrace> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let meta_path = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: TraceMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
        path: meta_path.clone(),
        message: e.to_string(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let count = |prefix: &str| headers.iter().filter(|h| h.strip_prefix(prefix).is_some_and(|r| r.parse::<usize>().is_ok())).count();
    let d = if headers.get(1) == Some("c") { 1 } else { count("c_") };
    let n = count("x_");
    let m = count("g_");
    if m != meta.beta.len() || count("cum_g_") != m || headers.len() != 1 + d + 2 + n + 1 + 2 * m + 1 {
        return Err(parse_err("header does not match the trace layout".into()));
    }
    let mut records = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let row = line + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .map_err(|_| parse_err(format!("row {row}: bad number {:?}", &rec[k])))
        };
        let nums = |from: usize, len: usize| (from..from + len).map(num).collect::<Result<Vec<f64>>>();
        let flag = |k: usize| match &rec[k] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(parse_err(format!("row {row}: bad flag {other:?}"))),
        };
        let mut k = 0;
        let t = rec[k].parse::<usize>().map_err(|_| parse_err(format!("row {row}: bad period")))?;
        k += 1;
        let c = nums(k, d)?;
        k += d;
        let i_dual = match &rec[k] {
            "" => None,
            s => Some(
                s.parse::<usize>()
                    .ok()
                    .filter(|i| *i >= 1)
                    .ok_or_else(|| parse_err(format!("row {row}: bad i_dual")))?
                    - 1,
            ),
        };
        k += 1;
        let corrupted = flag(k)?;
        k += 1;
        let x = nums(k, n)?;
        k += n;
        let obj_inc = num(k)?;
        k += 1;
        let g = nums(k, m)?;
        k += m;
        let cum_g = nums(k, m)?;
        k += m;
        let terminated = flag(k)?;
        records.push(PeriodRecord {
            t,
            c,
            i_dual,
            corrupted,
            x,
            obj_inc,
            g,
            cum_g,
            terminated,
        });
    }
    Ok(LabeledTrace {
        case: meta.case,
        seed: meta.seed,
        trace: RunTrace {
            algorithm: meta.algorithm,
            direction: meta.direction,
            beta: meta.beta,
            capacity_scale: meta.capacity_scale,
            records,
            terminated_at: meta.terminated_at,
            mu: meta.mu,
            clipped: meta.clipped,
            w: meta.w,
        },
    })
}
