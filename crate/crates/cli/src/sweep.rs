//! Parameter sweeps: `name=start:end:count`.
//!
//! `name` is a dotted path into the scenario document (`gamma_peak`,
//! `rabi.g`, `thetas.1`); `theta1`..`theta3` are shorthands for the three
//! interferometer phases. Bounds accept multiples of π. The points are
//! evaluated in parallel and reported in order.

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use crate::commands::run;
use crate::error::{CliError, Result};
use crate::report::{Cell, RunReport, Table};
use crate::scenario::{parse_number, scenario_from_value};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |m: String| CliError::Sweep(format!("`{text}`: {m}"));
        let (name, range) =
            text.split_once('=').ok_or_else(|| bad("expected name=start:end:count".into()))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(bad("expected name=start:end:count".into()));
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(bad("empty parameter name".into()));
        }
        let count: usize = count.trim().parse().map_err(|_| bad(format!("count `{count}` is not a positive integer")))?;
        if count == 0 {
            return Err(bad("count must be at least 1".into()));
        }
        Ok(Self {
            name: name.to_string(),
            start: parse_number(start).map_err(bad)?,
            end: parse_number(end).map_err(bad)?,
            count,
        })
    }
}

impl SweepSpec {
    /// `count` evenly spaced points, both ends included.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + step * k as f64).collect()
    }

    fn path(&self) -> Vec<String> {
        match self.name.as_str() {
            "theta1" => vec!["thetas".into(), "0".into()],
            "theta2" => vec!["thetas".into(), "1".into()],
            "theta3" => vec!["thetas".into(), "2".into()],
            other => other.split('.').map(String::from).collect(),
        }
    }
}

/// Replaces the value at `path`; a missing object key is added, so that
/// optional fields can be swept.
fn set_path(doc: &mut Value, path: &[String], x: f64, name: &str) -> Result<()> {
    let missing = || CliError::Sweep(format!("`{name}` does not name a numeric field of the scenario"));
    let (last, parents) = path.split_last().ok_or_else(missing)?;
    let mut node = doc;
    for seg in parents {
        node = match node {
            Value::Object(map) => map.get_mut(seg).ok_or_else(missing)?,
            Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get_mut(i)).ok_or_else(missing)?,
            _ => return Err(missing()),
        };
    }
    let number = serde_json::Number::from_f64(x).ok_or_else(|| CliError::Sweep(format!("{x} is not finite")))?;
    match node {
        Value::Object(map) => {
            if matches!(map.get(last), Some(v) if !v.is_number() && !v.is_string()) {
                return Err(missing());
            }
            map.insert(last.clone(), Value::Number(number));
        }
        Value::Array(items) => {
            let slot = last.parse::<usize>().ok().and_then(|i| items.get_mut(i)).ok_or_else(missing)?;
            *slot = Value::Number(number);
        }
        _ => return Err(missing()),
    }
    Ok(())
}

/// Runs the scenario once per sweep point. The result has one table,
/// `sweep`, with the swept value followed by each run's summary.
pub fn run_sweep(doc: &Value, spec: &SweepSpec) -> Result<RunReport> {
    let base = scenario_from_value(doc.clone())?;
    let path = spec.path();
    let runs: Vec<(f64, RunReport)> = spec
        .values()
        .into_par_iter()
        .map(|x| {
            let mut d = doc.clone();
            set_path(&mut d, &path, x, &spec.name)?;
            Ok((x, run(&scenario_from_value(d)?)?))
        })
        .collect::<Result<_>>()?;

    let names: Vec<String> = runs[0].1.summary.iter().map(|(n, _)| n.clone()).collect();
    let mut table = Table::new("sweep", std::iter::once(spec.name.clone()).chain(names.iter().cloned()));
    for (x, r) in &runs {
        let mut row = vec![Cell::Num(*x)];
        for n in &names {
            row.push(r.summary_value(n).map(Cell::Num).unwrap_or(Cell::Text(String::new())));
        }
        table.push(row);
    }
    let mut metadata = runs[0].1.metadata.clone();
    metadata.insert("sweep".into(), format!("{}={}:{}:{}", spec.name, spec.start, spec.end, spec.count));
    Ok(RunReport {
        kind: base.kind().name().into(),
        input: base.to_document(),
        metadata,
        summary: vec![("points".into(), runs.len() as f64)],
        tables: vec![table],
    })
}
