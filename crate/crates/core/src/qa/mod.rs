//! Chart question answering: question generation, prompting, model clients,
//! answer extraction and error statistics.

mod client;
mod eval;
mod prompt;
mod stats;
mod templates;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{ChatCompletionsClient, ClientError, HttpClient, MockClient, MockMode, ModelClient, ModelRequest, REFUSAL, TOKEN_ENV};
pub use eval::{load_prediction_bundle, load_qa_file, run_eval, run_eval_from_files, write_qa_file, EvalOutput, PredictionLine, RunOptions};
pub use prompt::{
    build_prompt, query_generation_prompt, PromptBundle, ANSWER_PROMPT, ANSWER_SYSTEM_PROMPT, QUERY_GENERATION_SYSTEM_PROMPT,
};
pub use stats::{config_delta, extract_integer, mape, relative_improvement, rmse, ExtractMode};
pub use templates::{generate_qa_pairs, instantiate, parse_generated_pair, QaTemplate, TemplateKind};

#[derive(Debug, Error)]
pub enum QaError {
    #[error("no values to score")]
    EmptyInput,
    #[error("every truth value is zero; MAPE is undefined")]
    AllZeroTruth,
    #[error("relative improvement against a zero baseline")]
    DivisionByZero,
    #[error("length mismatch: {0} truths vs {1} predictions")]
    MismatchedLengths(usize, usize),
    #[error("chart {0} has no numeric entries")]
    NoNumericEntries(String),
    #[error("no table text for chart {0}")]
    MissingTable(String),
    #[error("chart {0} is not in the manifest")]
    UnknownChart(String),
    #[error("model endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("invalid generated pair: {0}")]
    InvalidGeneratedPair(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Manifest(#[from] crate::chartgen::ChartGenError),
}

impl QaError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QaError::Io {
            path: path.into(),
            source,
        }
    }
}

/// A question about one chart with its integer answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QaPair {
    pub chart_id: String,
    pub query: String,
    pub correct_answer: i64,
}

/// What accompanies the chart image in the prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigurationKind {
    ImageOnly,
    ImagePlusBaseTable,
    ImagePlusFineTunedTable,
}

impl ConfigurationKind {
    pub const ALL: [ConfigurationKind; 3] = [
        ConfigurationKind::ImageOnly,
        ConfigurationKind::ImagePlusBaseTable,
        ConfigurationKind::ImagePlusFineTunedTable,
    ];

    pub fn requires_table(self) -> bool {
        self != ConfigurationKind::ImageOnly
    }

    /// Snake-case name, as serialized.
    pub fn name(self) -> &'static str {
        match self {
            ConfigurationKind::ImageOnly => "image_only",
            ConfigurationKind::ImagePlusBaseTable => "image_plus_base_table",
            ConfigurationKind::ImagePlusFineTunedTable => "image_plus_fine_tuned_table",
        }
    }

    /// Short column label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ConfigurationKind::ImageOnly => "Img",
            ConfigurationKind::ImagePlusBaseTable => "Img+B_t",
            ConfigurationKind::ImagePlusFineTunedTable => "Img+F_t",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace(['-', '+'], "_").as_str() {
            "img" | "image_only" | "imageonly" => Some(ConfigurationKind::ImageOnly),
            "img_b_t" | "base" | "image_plus_base_table" => Some(ConfigurationKind::ImagePlusBaseTable),
            "img_f_t" | "fine_tuned" | "finetuned" | "image_plus_fine_tuned_table" => {
                Some(ConfigurationKind::ImagePlusFineTunedTable)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfiguration {
    pub kind: ConfigurationKind,
    /// Prediction bundle (JSONL of `{"id", "table_text"}`) supplying the
    /// table for table-bearing configurations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_source: Option<PathBuf>,
}

impl EvalConfiguration {
    pub fn image_only() -> Self {
        EvalConfiguration {
            kind: ConfigurationKind::ImageOnly,
            table_source: None,
        }
    }

    pub fn with_table(kind: ConfigurationKind, table_source: impl Into<PathBuf>) -> Self {
        EvalConfiguration {
            kind,
            table_source: Some(table_source.into()),
        }
    }

    pub fn validate(&self) -> Result<(), QaError> {
        match (self.kind.requires_table(), &self.table_source) {
            (true, None) => Err(QaError::InvalidConfiguration(format!(
                "{} needs a table source",
                self.kind.label()
            ))),
            (false, Some(_)) => Err(QaError::InvalidConfiguration(format!(
                "{} does not take a table source",
                self.kind.label()
            ))),
            _ => Ok(()),
        }
    }
}

/// One model answer. `extracted` is `None` exactly when no integer could be
/// read from the response (or the request failed, see `error`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaRunRecord {
    pub chart_id: String,
    pub query: String,
    pub configuration: ConfigurationKind,
    pub model_name: String,
    pub raw_response: String,
    pub extracted: Option<i64>,
    pub correct_answer: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaReport {
    pub model_name: String,
    pub configuration: ConfigurationKind,
    /// Records with an extracted answer.
    #[serde(default)]
    pub n: usize,
    /// `None` when no record is usable.
    pub mape_percent: Option<f64>,
    pub rmse: Option<f64>,
    #[serde(default)]
    pub extraction_failures: usize,
    /// Records left out of MAPE because their correct answer is zero.
    #[serde(default)]
    pub zero_truth_excluded: usize,
}

/// Folds a record log into a report. Only the log is consulted, so the
/// result does not depend on the order requests completed in.
pub fn aggregate(model_name: &str, configuration: ConfigurationKind, records: &[QaRunRecord]) -> QaReport {
    let mut truth = Vec::new();
    let mut pred = Vec::new();
    let mut failures = 0;
    for r in records {
        match r.extracted {
            Some(p) => {
                truth.push(r.correct_answer as f64);
                pred.push(p as f64);
            }
            None => failures += 1,
        }
    }
    QaReport {
        model_name: model_name.to_string(),
        configuration,
        n: truth.len(),
        mape_percent: mape(&truth, &pred).ok(),
        rmse: rmse(&truth, &pred).ok(),
        extraction_failures: failures,
        zero_truth_excluded: truth.iter().filter(|y| **y == 0.0).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(truth: i64, got: Option<i64>) -> QaRunRecord {
        QaRunRecord {
            chart_id: "c".into(),
            query: "q".into(),
            configuration: ConfigurationKind::ImageOnly,
            model_name: "m".into(),
            raw_response: got.map(|g| g.to_string()).unwrap_or_default(),
            extracted: got,
            correct_answer: truth,
            error: None,
        }
    }

    #[test]
    fn aggregate_counts_failures_and_zero_truths() {
        let log = vec![record(62, Some(62)), record(-34, Some(-17)), record(5, None), record(0, Some(3))];
        let r = aggregate("m", ConfigurationKind::ImageOnly, &log);
        assert_eq!(r.n, 3);
        assert_eq!(r.extraction_failures, 1);
        assert_eq!(r.zero_truth_excluded, 1);
        assert!((r.mape_percent.unwrap() - 25.0).abs() < 1e-12);
        let expected_rmse = ((0.0 + 17.0f64 * 17.0 + 9.0) / 3.0).sqrt();
        assert!((r.rmse.unwrap() - expected_rmse).abs() < 1e-12);
    }

    #[test]
    fn aggregate_of_all_failures_has_no_metrics() {
        let r = aggregate("m", ConfigurationKind::ImageOnly, &[record(4, None), record(5, None)]);
        assert_eq!((r.n, r.extraction_failures), (0, 2));
        assert_eq!((r.mape_percent, r.rmse), (None, None));
    }

    #[test]
    fn aggregate_ignores_record_order() {
        let mut log: Vec<_> = (1..20).map(|i| record(i * 7, Some(i * 6))).collect();
        let a = aggregate("m", ConfigurationKind::ImageOnly, &log);
        log.reverse();
        let b = aggregate("m", ConfigurationKind::ImageOnly, &log);
        assert!((a.mape_percent.unwrap() - b.mape_percent.unwrap()).abs() < 1e-12);
        assert!((a.rmse.unwrap() - b.rmse.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn configuration_rules() {
        assert!(EvalConfiguration::image_only().validate().is_ok());
        assert!(EvalConfiguration {
            kind: ConfigurationKind::ImagePlusBaseTable,
            table_source: None
        }
        .validate()
        .is_err());
        assert!(EvalConfiguration::with_table(ConfigurationKind::ImagePlusFineTunedTable, "ft.jsonl").validate().is_ok());
        for kind in ConfigurationKind::ALL {
            assert_eq!(ConfigurationKind::parse(kind.label()), Some(kind));
        }
    }
}
