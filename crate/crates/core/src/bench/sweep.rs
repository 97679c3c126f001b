use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepAxis};
use super::runner::{run_experiment, ResultRecord};
use crate::error::{Error, Result};

/// Aggregate of one (axis value, cell, method) group. Both the standard deviation and the
/// standard error are reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub axis: Option<String>,
    pub value: Option<f64>,
    pub method: String,
    pub m: usize,
    pub n: usize,
    pub c: Option<f64>,
    pub total: Option<f64>,
    pub trials: usize,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub stderr_mse: f64,
    pub median_mse: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Group by cell and method, in first-appearance order. Standard deviation uses `n − 1`.
pub fn summarize(records: &[ResultRecord], axis: Option<(SweepAxis, f64)>) -> Vec<SummaryRow> {
    let mut order: Vec<(usize, String)> = Vec::new();
    let mut groups: BTreeMap<(usize, String), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.cell, r.method.clone());
        groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&(r.cell, r.method.clone())).expect("inserted").push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let vals: Vec<f64> = rs.iter().map(|r| r.test_mse).collect();
            let k = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / k;
            let std = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            let first = rs[0];
            SummaryRow {
                axis: axis.map(|(a, _)| a.name().to_string()),
                value: axis.map(|(_, v)| v),
                method: key.1.clone(),
                m: first.m,
                n: first.n,
                c: first.c,
                total: first.total,
                trials: vals.len(),
                mean_mse: mean,
                std_mse: std,
                stderr_mse: std / k.sqrt(),
                median_mse: median(&vals),
            }
        })
        .collect()
}

pub fn write_summary<W: std::io::Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: std::io::Read>(input: R) -> Result<Vec<SummaryRow>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Run the experiment once per axis value.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepOutput> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one axis value".into()));
    }
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for &v in values {
        let recs = run_experiment(&cfg.with_axis(axis, v)?)?;
        summary.extend(summarize(&recs, Some((axis, v))));
        records.extend(recs);
    }
    Ok(SweepOutput { records, summary })
}

/// Sweep over the axis named in the config's `[sweep]` table.
pub fn sweep_from_config(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let s = cfg.sweep.as_ref().ok_or_else(|| Error::Config("config has no [sweep] table".into()))?;
    sweep(cfg, s.axis, &s.values)
}
