//! Table-level scoring: RNSS over numeric multisets and RMS over
//! `(row, column, value)` entries, both built on a minimum-cost assignment.

mod assignment;
mod distance;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{CellValue, Entry, EntrySet, LinearizedTable, NumberSet};

pub use assignment::{min_cost_assignment, Assignment};
pub use distance::{levenshtein, normalized_levenshtein, relative_distance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("tau must lie in [0, 1], got {0}")]
    InvalidTau(f64),
    #[error("theta must lie in [0, 1], got {0}")]
    InvalidTheta(f64),
    #[error("rnss threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    /// Text distances above this get no partial credit.
    pub tau: f64,
    /// Numeric relative distances above this get no partial credit.
    pub theta: f64,
    pub case_insensitive: bool,
    /// Also score the prediction with row/column keys swapped and keep the
    /// better F1.
    pub transposition_search: bool,
    /// When set, RNSS treats relative distances at or below this value as
    /// exact matches.
    pub rnss_threshold: Option<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            theta: 1.0,
            case_insensitive: false,
            transposition_search: true,
            rnss_threshold: None,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.tau) {
            return Err(MetricError::InvalidTau(self.tau));
        }
        if !unit.contains(&self.theta) {
            return Err(MetricError::InvalidTheta(self.theta));
        }
        if let Some(t) = self.rnss_threshold {
            if !unit.contains(&t) {
                return Err(MetricError::InvalidThreshold(t));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnssScore {
    pub value: f64,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Pairs index into the prediction entries (unchanged by transposition,
    /// which only swaps keys).
    pub assignment: Assignment,
    pub transposed_used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rnss: RnssScore,
    pub rms: RmsScore,
}

pub fn rnss(pred: &NumberSet, target: &NumberSet) -> RnssScore {
    rnss_with_threshold(pred, target, None)
}

/// RNSS: `1 - sum(matched D(p, t)) / max(N, M)` under the minimum-cost
/// matching. An empty side against a non-empty side scores 0; two empty sets
/// score 1.
pub fn rnss_with_threshold(pred: &NumberSet, target: &NumberSet, threshold: Option<f64>) -> RnssScore {
    let (n, m) = (pred.len(), target.len());
    if n == 0 || m == 0 {
        return RnssScore {
            value: if n == m { 1.0 } else { 0.0 },
            assignment: Assignment::default(),
        };
    }
    let cost: Vec<Vec<f64>> = pred
        .values
        .iter()
        .map(|&p| {
            target
                .values
                .iter()
                .map(|&t| {
                    let d = relative_distance(p, t, 1.0);
                    match threshold {
                        Some(limit) if d <= limit => 0.0,
                        _ => d,
                    }
                })
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost);
    RnssScore {
        value: 1.0 - assignment.total_cost / n.max(m) as f64,
        assignment,
    }
}

/// Prepared comparison form of an entry.
struct Keyed<'a> {
    key: String,
    value: &'a CellValue,
    text: String,
}

impl<'a> Keyed<'a> {
    fn new(entry: &'a Entry, row_first: bool, cfg: &MetricConfig) -> Self {
        let (a, b) = if row_first {
            (&entry.row_key, &entry.col_key)
        } else {
            (&entry.col_key, &entry.row_key)
        };
        let fold = |s: String| if cfg.case_insensitive { s.to_lowercase() } else { s };
        Keyed {
            key: fold(format!("{a} {b}")),
            value: &entry.value,
            text: fold(entry.value.raw().to_string()),
        }
    }
}

fn keyed_similarity(p: &Keyed<'_>, t: &Keyed<'_>, cfg: &MetricConfig) -> f64 {
    let key_factor = 1.0 - normalized_levenshtein(&p.key, &t.key, cfg.tau);
    if key_factor == 0.0 {
        return 0.0;
    }
    let value_distance = match (p.value.as_f64(), t.value.as_f64()) {
        (Some(pv), Some(tv)) => relative_distance(pv, tv, cfg.theta),
        _ => normalized_levenshtein(&p.text, &t.text, cfg.tau),
    };
    key_factor * (1.0 - value_distance)
}

/// Similarity `(1 - NL_tau(keys)) * (1 - D_theta(values))` where keys are
/// `row_key + " " + col_key`. Numeric pairs use the relative distance;
/// anything involving a textual cell uses normalized Levenshtein on the raw
/// text.
pub fn entry_similarity(p: &Entry, t: &Entry, cfg: &MetricConfig) -> f64 {
    keyed_similarity(&Keyed::new(p, true, cfg), &Keyed::new(t, true, cfg), cfg)
}

fn rms_oriented(pred: &EntrySet, target: &EntrySet, cfg: &MetricConfig, row_first: bool) -> RmsScore {
    let (n, m) = (pred.len(), target.len());
    if n == 0 || m == 0 {
        let v = if n == m { 1.0 } else { 0.0 };
        return RmsScore {
            precision: v,
            recall: v,
            f1: v,
            assignment: Assignment::default(),
            transposed_used: !row_first,
        };
    }
    let preds: Vec<_> = pred.entries.iter().map(|e| Keyed::new(e, row_first, cfg)).collect();
    let targets: Vec<_> = target.entries.iter().map(|e| Keyed::new(e, true, cfg)).collect();
    let similarity: Vec<Vec<f64>> = preds
        .iter()
        .map(|p| targets.iter().map(|t| keyed_similarity(p, t, cfg)).collect())
        .collect();
    let cost: Vec<Vec<f64>> = similarity
        .iter()
        .map(|row| row.iter().map(|s| 1.0 - s).collect())
        .collect();
    let mut assignment = min_cost_assignment(&cost);
    let matched: f64 = assignment.pairs.iter().map(|&(i, j)| similarity[i][j]).sum();
    assignment.total_cost = assignment.pairs.iter().map(|&(i, j)| cost[i][j]).sum();
    let precision = matched / n as f64;
    let recall = matched / m as f64;
    RmsScore {
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
        assignment,
        transposed_used: !row_first,
    }
}

/// RMS precision, recall and F1 over the similarity-maximizing matching.
///
/// Precision and recall are the matched similarity mass divided by the
/// prediction and target entry counts. With `transposition_search`, the
/// prediction is also scored with its keys swapped and the higher F1 wins
/// (ties keep the original orientation).
pub fn rms(pred: &EntrySet, target: &EntrySet, cfg: &MetricConfig) -> RmsScore {
    let direct = rms_oriented(pred, target, cfg, true);
    if !cfg.transposition_search {
        return direct;
    }
    let swapped = rms_oriented(pred, target, cfg, false);
    if swapped.f1 > direct.f1 {
        swapped
    } else {
        direct
    }
}

pub fn harmonic_mean(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// RNSS and RMS of a predicted table against its target.
pub fn score_tables(pred: &LinearizedTable, target: &LinearizedTable, cfg: &MetricConfig) -> MetricReport {
    MetricReport {
        rnss: rnss_with_threshold(&pred.to_numbers(), &target.to_numbers(), cfg.rnss_threshold),
        rms: rms(&pred.to_entries(), &target.to_entries(), cfg),
    }
}
