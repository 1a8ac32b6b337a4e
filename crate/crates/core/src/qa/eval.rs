use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::time::Duration;

use futures::stream::{self, StreamExt};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::client::{ClientError, ModelClient, ModelRequest};
use super::{aggregate, build_prompt, extract_integer, EvalConfiguration, ExtractMode, QaError, QaPair, QaReport, QaRunRecord};
use crate::chartgen::{load_manifest, ManifestRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Requests in flight at once.
    pub concurrency: usize,
    pub timeout: Duration,
    /// Extra attempts after the first for retryable failures.
    pub retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
    pub attach_images: bool,
    pub extract_mode: ExtractMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            concurrency: 8,
            timeout: Duration::from_secs(60),
            retries: 2,
            backoff: Duration::from_millis(500),
            attach_images: true,
            extract_mode: ExtractMode::Last,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutput {
    pub report: QaReport,
    /// In QA file order.
    pub records: Vec<QaRunRecord>,
}

#[derive(Deserialize)]
struct BundleLine {
    id: String,
    table_text: String,
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, QaError> {
    let file = fs::File::open(path).map_err(|e| QaError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| QaError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| QaError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

pub fn load_qa_file(path: &Path) -> Result<Vec<QaPair>, QaError> {
    read_jsonl(path)
}

pub fn write_qa_file(path: &Path, pairs: &[QaPair]) -> Result<(), QaError> {
    let mut text = String::new();
    for p in pairs {
        text.push_str(&serde_json::to_string(p).expect("pairs serialize"));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| QaError::io(path, e))
}

/// Reads a JSONL bundle of `{"id", "table_text"}` lines into an id → text map.
/// A later line for the same id replaces an earlier one.
pub fn load_prediction_bundle(path: &Path) -> Result<HashMap<String, String>, QaError> {
    Ok(read_jsonl::<BundleLine>(path)?.into_iter().map(|l| (l.id, l.table_text)).collect())
}

async fn ask(client: &dyn ModelClient, request: &ModelRequest, opts: &RunOptions) -> Result<String, ClientError> {
    let mut attempt = 0;
    loop {
        let result = match tokio::time::timeout(opts.timeout, client.complete(request)).await {
            Ok(r) => r,
            Err(_) => Err(ClientError::Timeout),
        };
        match result {
            Err(e) if e.is_retryable() && attempt < opts.retries => {
                tokio::time::sleep(opts.backoff * 2u32.saturating_pow(attempt)).await;
                attempt += 1;
            }
            other => return other,
        }
    }
}

/// Asks `client` every question in `pairs` under `cfg`.
///
/// `dataset_root` resolves the manifest's relative image paths. `tables`
/// supplies the table text for table-bearing configurations. An endpoint
/// that stays unreachable after all retries aborts the run; any other
/// per-request failure is kept in the log as a failed extraction.
pub async fn run_eval(
    manifest: &[ManifestRecord],
    dataset_root: &Path,
    pairs: &[QaPair],
    cfg: &EvalConfiguration,
    tables: Option<&HashMap<String, String>>,
    client: &dyn ModelClient,
    opts: &RunOptions,
) -> Result<EvalOutput, QaError> {
    if cfg.kind.requires_table() && tables.is_none() {
        return Err(QaError::InvalidConfiguration(format!("{} needs a table source", cfg.kind.label())));
    }
    let by_id: HashMap<&str, &ManifestRecord> = manifest.iter().map(|r| (r.id.as_str(), r)).collect();

    let mut requests = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let record = by_id
            .get(pair.chart_id.as_str())
            .ok_or_else(|| QaError::UnknownChart(pair.chart_id.clone()))?;
        let table = match (cfg.kind.requires_table(), tables) {
            (true, Some(t)) => Some(
                t.get(&pair.chart_id)
                    .map(String::as_str)
                    .ok_or_else(|| QaError::MissingTable(pair.chart_id.clone()))?,
            ),
            _ => None,
        };
        let mut bundle = build_prompt(pair, cfg.kind, table)?;
        if opts.attach_images {
            let img = dataset_root.join(&record.image_path);
            bundle.attach_image(&fs::read(&img).map_err(|e| QaError::io(&img, e))?);
        }
        requests.push(ModelRequest {
            model: client.model_name().to_string(),
            system: bundle.system,
            prompt: bundle.user,
            image_base64: bundle.image_base64,
            table_text: bundle.table_text,
            chart_id: pair.chart_id.clone(),
            query: pair.query.clone(),
        });
    }

    let mut done: Vec<(usize, Result<QaRunRecord, QaError>)> = stream::iter(requests.iter().zip(pairs).enumerate())
        .map(|(i, (request, pair))| async move {
            let outcome = ask(client, request, opts).await;
            let (raw_response, error) = match outcome {
                Ok(text) => (text, None),
                Err(ClientError::Unreachable(why)) => return (i, Err(QaError::EndpointUnreachable(why))),
                Err(e) => (String::new(), Some(e.to_string())),
            };
            let extracted = extract_integer(&raw_response, opts.extract_mode);
            (
                i,
                Ok(QaRunRecord {
                    chart_id: pair.chart_id.clone(),
                    query: pair.query.clone(),
                    configuration: cfg.kind,
                    model_name: client.model_name().to_string(),
                    raw_response,
                    extracted,
                    correct_answer: pair.correct_answer,
                    error,
                }),
            )
        })
        .buffer_unordered(opts.concurrency.max(1))
        .collect()
        .await;
    done.sort_by_key(|(i, _)| *i);
    let records = done.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>, _>>()?;
    Ok(EvalOutput {
        report: aggregate(client.model_name(), cfg.kind, &records),
        records,
    })
}

/// File-based wrapper: manifest JSONL, QA JSONL and, for table-bearing
/// configurations, the prediction bundle named by `cfg.table_source`.
pub async fn run_eval_from_files(
    manifest_path: &Path,
    qa_path: &Path,
    cfg: &EvalConfiguration,
    client: &dyn ModelClient,
    opts: &RunOptions,
) -> Result<EvalOutput, QaError> {
    cfg.validate()?;
    let manifest = load_manifest(manifest_path)?;
    let pairs = load_qa_file(qa_path)?;
    let tables = cfg.table_source.as_deref().map(load_prediction_bundle).transpose()?;
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    run_eval(&manifest, root, &pairs, cfg, tables.as_ref(), client, opts).await
}

/// Serialized form of a bundle line, for writers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub id: String,
    pub table_text: String,
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use async_trait::async_trait;

    use super::*;
    use crate::chartgen::{generate_dataset, GeneratorConfig, RenderConfig};
    use crate::qa::{generate_qa_pairs, ConfigurationKind, MockClient, MockMode};
    use crate::table::{parse_linearized, ParseMode};

    fn dataset(total: usize) -> (tempfile::TempDir, Vec<ManifestRecord>, Vec<QaPair>) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GeneratorConfig {
            total,
            master_seed: 3,
            render: RenderConfig { width: 480, height: 360 },
            ..GeneratorConfig::default()
        };
        let summary = generate_dataset(&cfg, dir.path()).unwrap();
        let manifest = load_manifest(&summary.manifest_path).unwrap();
        let mut pairs = Vec::new();
        for (i, r) in manifest.iter().enumerate() {
            let t = parse_linearized(&r.ground_truth_text, ParseMode::Strict).unwrap();
            pairs.extend(generate_qa_pairs(&r.id, &t, i as u64, 2).unwrap());
        }
        (dir, manifest, pairs)
    }

    fn fast() -> RunOptions {
        RunOptions {
            backoff: Duration::from_millis(1),
            timeout: Duration::from_millis(500),
            ..RunOptions::default()
        }
    }

    #[tokio::test]
    async fn oracle_mock_is_exact() {
        let (dir, manifest, pairs) = dataset(5);
        let client = MockClient::new(MockMode::Oracle, &pairs);
        let out = run_eval(&manifest, dir.path(), &pairs, &EvalConfiguration::image_only(), None, &client, &fast())
            .await
            .unwrap();
        assert_eq!(out.records.len(), pairs.len());
        assert_eq!(out.report.mape_percent, Some(0.0));
        assert_eq!(out.report.rmse, Some(0.0));
        assert_eq!(out.report.extraction_failures, 0);
        assert!(out.records.iter().all(|r| r.raw_response.is_empty() || r.extracted.is_some()));
    }

    #[tokio::test]
    async fn refusing_mock_fails_every_record() {
        let (dir, manifest, pairs) = dataset(3);
        let client = MockClient::new(MockMode::Refuse, &pairs);
        let out = run_eval(&manifest, dir.path(), &pairs, &EvalConfiguration::image_only(), None, &client, &fast())
            .await
            .unwrap();
        assert_eq!(out.report.extraction_failures, pairs.len());
        assert_eq!(out.report.n, 0);
        assert_eq!(out.report.mape_percent, None);
        assert_eq!(out.report.rmse, None);
    }

    #[tokio::test]
    async fn table_configurations_need_every_table() {
        let (dir, manifest, pairs) = dataset(3);
        let client = MockClient::new(MockMode::Oracle, &pairs);
        let mut tables: HashMap<String, String> =
            manifest.iter().map(|r| (r.id.clone(), r.ground_truth_text.clone())).collect();
        let cfg = EvalConfiguration::with_table(ConfigurationKind::ImagePlusBaseTable, "unused");
        let out = run_eval(&manifest, dir.path(), &pairs, &cfg, Some(&tables), &client, &fast()).await.unwrap();
        assert_eq!(out.report.mape_percent, Some(0.0));
        tables.remove(&manifest[0].id);
        let err = run_eval(&manifest, dir.path(), &pairs, &cfg, Some(&tables), &client, &fast()).await.unwrap_err();
        assert!(matches!(err, QaError::MissingTable(id) if id == manifest[0].id));
    }

    #[tokio::test]
    async fn unknown_chart_is_rejected() {
        let (dir, manifest, mut pairs) = dataset(2);
        pairs[0].chart_id = "nope".into();
        let client = MockClient::new(MockMode::Oracle, &pairs);
        let err = run_eval(&manifest, dir.path(), &pairs, &EvalConfiguration::image_only(), None, &client, &fast())
            .await
            .unwrap_err();
        assert!(matches!(err, QaError::UnknownChart(_)));
    }

    struct Flaky {
        calls: AtomicUsize,
        fail_first: usize,
        error: ClientError,
    }

    #[async_trait]
    impl ModelClient for Flaky {
        fn model_name(&self) -> &str {
            "flaky"
        }
        async fn complete(&self, _: &ModelRequest) -> Result<String, ClientError> {
            if self.calls.fetch_add(1, Ordering::SeqCst) < self.fail_first {
                Err(self.error.clone())
            } else {
                Ok("7".into())
            }
        }
    }

    #[tokio::test]
    async fn retries_then_succeeds() {
        let (dir, manifest, pairs) = dataset(1);
        let pairs = &pairs[..1];
        let client = Flaky {
            calls: AtomicUsize::new(0),
            fail_first: 2,
            error: ClientError::Status { code: 503, body: String::new() },
        };
        let out = run_eval(&manifest, dir.path(), pairs, &EvalConfiguration::image_only(), None, &client, &fast())
            .await
            .unwrap();
        assert_eq!(client.calls.load(Ordering::SeqCst), 3);
        assert_eq!(out.records[0].extracted, Some(7));
    }

    #[tokio::test]
    async fn persistent_unreachable_is_fatal() {
        let (dir, manifest, pairs) = dataset(1);
        let client = Flaky {
            calls: AtomicUsize::new(0),
            fail_first: usize::MAX,
            error: ClientError::Unreachable("refused".into()),
        };
        let err = run_eval(&manifest, dir.path(), &pairs, &EvalConfiguration::image_only(), None, &client, &fast())
            .await
            .unwrap_err();
        assert!(matches!(err, QaError::EndpointUnreachable(_)));
    }

    struct Slow;

    #[async_trait]
    impl ModelClient for Slow {
        fn model_name(&self) -> &str {
            "slow"
        }
        async fn complete(&self, _: &ModelRequest) -> Result<String, ClientError> {
            tokio::time::sleep(Duration::from_secs(5)).await;
            Ok("1".into())
        }
    }

    #[tokio::test]
    async fn timeouts_are_recorded_not_fatal() {
        let (dir, manifest, pairs) = dataset(1);
        let opts = RunOptions {
            timeout: Duration::from_millis(20),
            retries: 1,
            ..fast()
        };
        let out = run_eval(&manifest, dir.path(), &pairs, &EvalConfiguration::image_only(), None, &Slow, &opts)
            .await
            .unwrap();
        assert_eq!(out.report.extraction_failures, pairs.len());
        assert!(out.records.iter().all(|r| r.error.as_deref() == Some("timed out")));
    }

    #[tokio::test]
    async fn file_round_trip() {
        let (dir, _, pairs) = dataset(2);
        let qa = dir.path().join("qa.jsonl");
        write_qa_file(&qa, &pairs).unwrap();
        assert_eq!(load_qa_file(&qa).unwrap(), pairs);
        let client = MockClient::new(MockMode::Oracle, &pairs);
        let out = run_eval_from_files(
            &dir.path().join("manifest.jsonl"),
            &qa,
            &EvalConfiguration::image_only(),
            &client,
            &fast(),
        )
        .await
        .unwrap();
        assert_eq!(out.report.n, pairs.len());
        assert!(out.records.iter().all(|r| r.raw_response.parse::<i64>().is_ok()));
    }
}
