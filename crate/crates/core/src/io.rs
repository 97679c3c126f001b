//! Plain-text formats: dataset CSV, ranking files, comparison CSV.
//!
//! Datasets use a header `f0,…,f{d−1}` followed by an optional `y` column (empty cell means
//! unlabeled) and an optional `truth` column written by the generators.

use std::io::{BufRead, Read, Write};

use crate::data::{Comparison, ComparisonSet, Ranking, SampleSet};
use crate::error::{Error, Result};

/// Dataset read back from CSV. `truth` is present only when the file has a `truth` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: SampleSet,
    pub truth: Option<Vec<f64>>,
}

pub fn write_dataset<W: Write>(out: W, samples: &SampleSet, truth: Option<&[f64]>) -> Result<()> {
    if let Some(t) = truth {
        if t.len() != samples.n() {
            return Err(Error::Dimension(format!("{} truth values for {} samples", t.len(), samples.n())));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let has_y = samples.labels().iter().any(Option::is_some);
    let mut header: Vec<String> = (0..samples.d()).map(|j| format!("f{j}")).collect();
    if has_y {
        header.push("y".into());
    }
    if truth.is_some() {
        header.push("truth".into());
    }
    w.write_record(&header)?;
    for i in 0..samples.n() {
        let mut rec: Vec<String> = samples.row(i).iter().map(|v| v.to_string()).collect();
        if has_y {
            rec.push(samples.label(i).map(|v| v.to_string()).unwrap_or_default());
        }
        if let Some(t) = truth {
            rec.push(t[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_cell(cell: &str, line: usize) -> Result<f64> {
    cell.trim().parse().map_err(|_| Error::Parse(format!("line {line}: bad number {cell:?}")))
}

pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let d = header.iter().take_while(|h| h.starts_with('f')).count();
    for (j, h) in header[..d].iter().enumerate() {
        if *h != format!("f{j}") {
            return Err(Error::Parse(format!("expected column f{j}, found {h:?}")));
        }
    }
    let rest = &header[d..];
    let y_col = rest.iter().position(|h| h == "y").map(|p| p + d);
    let truth_col = rest.iter().position(|h| h == "truth").map(|p| p + d);
    if rest.len() != usize::from(y_col.is_some()) + usize::from(truth_col.is_some()) {
        return Err(Error::Parse(format!("unexpected columns {rest:?}")));
    }
    let mut feats = Vec::new();
    let mut labels = Vec::new();
    let mut truth = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        for j in 0..d {
            feats.push(parse_cell(&rec[j], line)?);
        }
        if let Some(c) = y_col {
            let cell = rec[c].trim();
            labels.push(if cell.is_empty() { None } else { Some(parse_cell(cell, line)?) });
        } else {
            labels.push(None);
        }
        if let Some(c) = truth_col {
            truth.push(parse_cell(&rec[c], line)?);
        }
    }
    let samples = SampleSet::new(feats, d)?.with_labels(labels)?;
    Ok(Dataset { samples, truth: truth_col.map(|_| truth) })
}

/// One sample index per line; line `k` holds the index at rank position `k`.
pub fn write_ranking<W: Write>(mut out: W, ranking: &Ranking) -> Result<()> {
    for i in ranking.order() {
        writeln!(out, "{i}")?;
    }
    Ok(())
}

pub fn read_ranking<R: BufRead>(input: R) -> Result<Ranking> {
    let mut order = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        order.push(t.parse().map_err(|_| Error::Parse(format!("line {}: bad index {t:?}", k + 1)))?);
    }
    Ranking::new(order)
}

pub fn write_comparisons<W: Write>(out: W, set: &ComparisonSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "j", "z"])?;
    for c in set.iter() {
        w.write_record([c.i.to_string(), c.j.to_string(), c.z.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `n` is the universe size the indices must fall in.
pub fn read_comparisons<R: Read>(input: R, n: usize) -> Result<ComparisonSet> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != ["i", "j", "z"] {
        return Err(Error::Parse(format!("comparison header must be i,j,z, got {header:?}")));
    }
    let mut items = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", k + 2));
        let i = rec[0].trim().parse().map_err(|_| bad("i"))?;
        let j = rec[1].trim().parse().map_err(|_| bad("j"))?;
        let z = rec[2].trim().parse().map_err(|_| bad("z"))?;
        items.push(Comparison { i, j, z });
    }
    ComparisonSet::new(items, n)
}
