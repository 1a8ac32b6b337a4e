use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::chartgen::{ChartType, ManifestRecord};
use crate::metrics::{score_tables, MetricConfig};
use crate::table::{parse_linearized, parse_with, LinearizedTable, ParseMode, ParseOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFlag {
    /// No prediction for this chart; scored as an empty table.
    Missing,
    /// The prediction text was blank.
    Empty,
    /// Only the lenient parser accepted the prediction.
    Lenient,
    /// Neither parser accepted the prediction; scored zero.
    ParseFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartScore {
    pub id: String,
    pub chart_type: ChartType,
    pub rnss: f64,
    pub rms_precision: f64,
    pub rms_recall: f64,
    pub rms_f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<ScoreFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreMeans {
    pub count: usize,
    pub rnss: f64,
    pub rms_precision: f64,
    pub rms_recall: f64,
    pub rms_f1: f64,
}

impl ScoreMeans {
    pub fn of<'a>(rows: impl IntoIterator<Item = &'a ChartScore>) -> Self {
        let mut m = ScoreMeans::default();
        for r in rows {
            m.count += 1;
            m.rnss += r.rnss;
            m.rms_precision += r.rms_precision;
            m.rms_recall += r.rms_recall;
            m.rms_f1 += r.rms_f1;
        }
        if m.count > 0 {
            let n = m.count as f64;
            m.rnss /= n;
            m.rms_precision /= n;
            m.rms_recall /= n;
            m.rms_f1 /= n;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub metric_config: MetricConfig,
    pub rows: Vec<ChartScore>,
    pub overall: ScoreMeans,
    pub per_type: BTreeMap<ChartType, ScoreMeans>,
    pub missing: usize,
    /// Charts left out because they had no prediction and skipping was asked for.
    pub skipped: usize,
    pub lenient_parses: usize,
    pub parse_failures: usize,
}

impl RunReport {
    pub fn from_rows(metric_config: MetricConfig, rows: Vec<ChartScore>, skipped: usize) -> Self {
        let count = |f: ScoreFlag| rows.iter().filter(|r| r.flags.contains(&f)).count();
        let mut per_type = BTreeMap::new();
        for t in ChartType::ALL {
            let means = ScoreMeans::of(rows.iter().filter(|r| r.chart_type == t));
            if means.count > 0 {
                per_type.insert(t, means);
            }
        }
        RunReport {
            metric_config,
            overall: ScoreMeans::of(&rows),
            per_type,
            missing: count(ScoreFlag::Missing) + skipped,
            skipped,
            lenient_parses: count(ScoreFlag::Lenient),
            parse_failures: count(ScoreFlag::ParseFailure),
            rows,
        }
    }

    /// Charts that were missing, skipped or unparseable.
    pub fn failures(&self) -> usize {
        self.missing + self.parse_failures
    }

    /// Per-type table followed by the overall line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {:>6} {:>8} {:>8} {:>8} {:>8}", "type", "n", "RNSS", "RMS_P", "RMS_R", "RMS_F1");
        let mut line = |name: &str, m: &ScoreMeans| {
            let _ = writeln!(
                s,
                "{:<10} {:>6} {:>8.2} {:>8.2} {:>8.2} {:>8.2}",
                name,
                m.count,
                100.0 * m.rnss,
                100.0 * m.rms_precision,
                100.0 * m.rms_recall,
                100.0 * m.rms_f1
            );
        };
        for (t, m) in &self.per_type {
            line(t.as_str(), m);
        }
        line("overall", &self.overall);
        let _ = writeln!(
            s,
            "missing {} (skipped {}), lenient {}, parse failures {}",
            self.missing, self.skipped, self.lenient_parses, self.parse_failures
        );
        s
    }
}

fn empty_table() -> LinearizedTable {
    LinearizedTable::new(None, Vec::new(), Vec::new())
}

/// Parses a prediction, strict first and lenient second.
fn parse_prediction(text: &str) -> (Option<LinearizedTable>, Option<ScoreFlag>) {
    if text.trim().is_empty() {
        return (Some(empty_table()), Some(ScoreFlag::Empty));
    }
    if let Ok(t) = parse_linearized(text, ParseMode::Strict) {
        return (Some(t), None);
    }
    match parse_with(text, &ParseOptions::lenient()) {
        Ok(t) => (Some(t), Some(ScoreFlag::Lenient)),
        Err(_) => (None, Some(ScoreFlag::ParseFailure)),
    }
}

/// Scores `predictions` (id → table text) against the manifest ground truths.
pub fn score_predictions(
    manifest: &[ManifestRecord],
    predictions: &HashMap<String, String>,
    cfg: &MetricConfig,
    skip_missing: bool,
) -> Result<RunReport, CliError> {
    cfg.validate().map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let known: std::collections::HashSet<&str> = manifest.iter().map(|r| r.id.as_str()).collect();
    let mut unknown: Vec<&String> = predictions.keys().filter(|id| !known.contains(id.as_str())).collect();
    unknown.sort();
    if let Some(id) = unknown.first() {
        return Err(CliError::UnknownId((*id).clone()));
    }

    let scored: Vec<Option<Result<ChartScore, CliError>>> = manifest
        .par_iter()
        .map(|rec| {
            let pred_text = predictions.get(&rec.id);
            if pred_text.is_none() && skip_missing {
                return None;
            }
            let target = match parse_linearized(&rec.ground_truth_text, ParseMode::Strict) {
                Ok(t) => t,
                Err(e) => return Some(Err(CliError::InvalidConfig(format!("ground truth of {}: {e}", rec.id)))),
            };
            let (pred, flag) = match pred_text {
                None => (Some(empty_table()), Some(ScoreFlag::Missing)),
                Some(text) => parse_prediction(text),
            };
            let mut row = ChartScore {
                id: rec.id.clone(),
                chart_type: rec.chart_type,
                rnss: 0.0,
                rms_precision: 0.0,
                rms_recall: 0.0,
                rms_f1: 0.0,
                flags: flag.into_iter().collect(),
            };
            if let Some(pred) = pred {
                let m = score_tables(&pred, &target, cfg);
                row.rnss = m.rnss.value;
                row.rms_precision = m.rms.precision;
                row.rms_recall = m.rms.recall;
                row.rms_f1 = m.rms.f1;
            }
            Some(Ok(row))
        })
        .collect();

    let skipped = scored.iter().filter(|r| r.is_none()).count();
    let rows = scored.into_iter().flatten().collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport::from_rows(*cfg, rows, skipped))
}
