//! Seeded batch experiments over random and structured geodesics.
//!
//! Sample `i` of an experiment draws from its own stream
//! `sample_rng(seed, i)`, so a report depends only on its inputs and not on
//! the thread schedule.

mod closed;
mod curvature;
mod injectivity;

pub use closed::{
    closed_geodesic_search, closed_geodesic_search_with, make_closed_geodesic, measured_length, ClosedGeodesic,
};
pub use curvature::curvature_bound_experiment;
pub use injectivity::{injectivity_probe, klingenberg_bound, ProbeOptions};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::frenet::FrenetError;
use crate::stiefel::StiefelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Stiefel(#[from] StiefelError),
    #[error(transparent)]
    Frenet(#[from] FrenetError),
}

/// Cell of a per-sample record.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Float)
    }
}

pub type Record = IndexMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl Stat {
    /// `None` when `values` is empty.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Stat> {
        let mut count = 0;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for v in values {
            count += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        (count > 0).then(|| Stat {
            min,
            max,
            mean: sum / count as f64,
            count,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub criterion: String,
    pub pass: bool,
    pub observed: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub samples: usize,
    pub parameters: IndexMap<String, Value>,
    pub summary: IndexMap<String, Stat>,
    /// Scalar findings such as an arg-max index.
    pub findings: IndexMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub records: Vec<Record>,
}

impl ExperimentReport {
    fn new(name: &str, n: usize, p: usize, seed: u64, samples: usize) -> Self {
        Self {
            name: name.to_string(),
            n,
            p,
            seed,
            samples,
            parameters: IndexMap::new(),
            summary: IndexMap::new(),
            findings: IndexMap::new(),
            verdicts: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    /// Union of record keys in first-seen order.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: IndexMap<String, ()> = IndexMap::new();
        for r in &self.records {
            for k in r.keys() {
                cols.entry(k.clone()).or_insert(());
            }
        }
        cols.into_keys().collect()
    }

    fn push_stat(&mut self, key: &str, column: &str) {
        let values = self
            .records
            .iter()
            .filter_map(|r| r.get(column)?.as_f64())
            .filter(|x| x.is_finite());
        if let Some(s) = Stat::of(values) {
            self.summary.insert(key.to_string(), s);
        }
    }

    fn push_verdict(&mut self, criterion: impl Into<String>, pass: bool, observed: f64, tolerance: f64) {
        self.verdicts.push(Verdict {
            criterion: criterion.into(),
            pass,
            observed,
            tolerance,
        });
    }
}

fn check_dims(n: usize, p: usize) -> Result<(), ExperimentError> {
    if p == 0 || n < p {
        return Err(ExperimentError::Domain(format!("St({n}, {p}) needs n >= p >= 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        let s = Stat::of([1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.count), (1.0, 3.0, 2.0, 3));
        assert!(Stat::of(std::iter::empty()).is_none());
    }

    #[test]
    fn columns_in_first_seen_order() {
        let mut rep = ExperimentReport::new("x", 3, 1, 0, 2);
        let mut a = Record::new();
        a.insert("b".into(), 1.0.into());
        let mut b = Record::new();
        b.insert("a".into(), true.into());
        b.insert("b".into(), 2.0.into());
        rep.records = vec![a, b];
        assert_eq!(rep.columns(), vec!["b".to_string(), "a".to_string()]);
    }
}
