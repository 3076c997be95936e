//! Run-level ARI records and their per-method aggregates.

use std::collections::BTreeMap;
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};

/// Method name of the per-run minimum over ensemble members.
pub const METHOD_MIN: &str = "min";
/// Method name of the per-run maximum over ensemble members.
pub const METHOD_MAX: &str = "max";
pub const METHOD_VOTE: &str = "vote";
pub const METHOD_MIXSEMBLE: &str = "mixsemble";

/// One method's score on one run of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub method: String,
    pub run: usize,
    pub seed: u64,
    pub ari: f64,
}

/// Mean and sample standard deviation of a method's ARI across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub dataset: String,
    pub method: String,
    pub mean: f64,
    pub sd: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    records: Vec<RunRecord>,
    /// Ensemble member names per dataset, in roster order.
    members: BTreeMap<String, Vec<String>>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_members(&mut self, dataset: &str, members: Vec<String>) {
        self.members.insert(dataset.to_string(), members);
    }

    pub fn members(&self, dataset: &str) -> &[String] {
        self.members.get(dataset).map_or(&[], Vec::as_slice)
    }

    pub fn push(&mut self, record: RunRecord) {
        self.records.push(record);
    }

    /// Sorts records by (dataset, method, run).
    pub fn finalize(&mut self) {
        self.records.sort_by(|a, b| {
            (a.dataset.as_str(), a.method.as_str(), a.run).cmp(&(b.dataset.as_str(), b.method.as_str(), b.run))
        });
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.records.iter().map(|r| r.dataset.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    /// ARI values of one method on one dataset, in run order.
    pub fn scores(&self, dataset: &str, method: &str) -> Vec<f64> {
        let mut rows: Vec<&RunRecord> = self
            .records
            .iter()
            .filter(|r| r.dataset == dataset && r.method == method)
            .collect();
        rows.sort_by_key(|r| r.run);
        rows.iter().map(|r| r.ari).collect()
    }

    pub fn summary(&self, dataset: &str, method: &str) -> Option<MethodSummary> {
        let scores = self.scores(dataset, method);
        if scores.is_empty() {
            return None;
        }
        let (mean, sd) = mean_and_sd(&scores);
        Some(MethodSummary {
            dataset: dataset.to_string(),
            method: method.to_string(),
            mean,
            sd,
            n_runs: scores.len(),
        })
    }

    /// One summary per (dataset, method), sorted by dataset then method.
    pub fn summaries(&self) -> Vec<MethodSummary> {
        let mut keys: Vec<(&str, &str)> = self
            .records
            .iter()
            .map(|r| (r.dataset.as_str(), r.method.as_str()))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().filter_map(|(d, m)| self.summary(d, m)).collect()
    }
}

/// Mean and sample (n - 1) standard deviation; a single value has SD 0.
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Renders `value` with four decimals, rounding the shortest decimal
/// representation of the value half away from zero (0.86905 -> "0.8691").
pub fn format_fixed4(value: f64) -> String {
    let shortest = format!("{value}");
    let parsed = Decimal::from_str(&shortest)
        .or_else(|_| Decimal::from_str(&format!("{value:.20}")))
        .unwrap_or_default();
    let mut rounded = parsed.round_dp_with_strategy(4, RoundingStrategy::MidpointAwayFromZero);
    if rounded.is_zero() {
        rounded.set_sign_positive(true);
    }
    format!("{rounded:.4}")
}
