use std::collections::HashMap;
use std::time::Duration;

use chartab::chartgen::{generate_dataset, load_manifest, GeneratorConfig, RenderConfig};
use chartab::qa::{
    generate_qa_pairs, run_eval_from_files, write_qa_file, ConfigurationKind, EvalConfiguration, HttpClient, QaError,
    RunOptions, ANSWER_SYSTEM_PROMPT,
};
use chartab::table::{parse_linearized, ParseMode};
use serde_json::{json, Value};
use wiremock::matchers::method;
use wiremock::{Mock, MockServer, Request, Respond, ResponseTemplate};

/// Answers with the correct value, wrapped in reasoning text.
struct Answerer(HashMap<String, i64>);

impl Respond for Answerer {
    fn respond(&self, request: &Request) -> ResponseTemplate {
        let body: Value = serde_json::from_slice(&request.body).unwrap();
        let prompt = body["prompt"].as_str().unwrap();
        match self.0.iter().find(|(q, _)| prompt.contains(q.as_str())) {
            Some((_, a)) => ResponseTemplate::new(200)
                .set_body_json(json!({"text": format!("Adding 2 bars gives 1,000 or so; final answer: {a}")})),
            None => ResponseTemplate::new(400),
        }
    }
}

fn fast() -> RunOptions {
    RunOptions {
        concurrency: 4,
        timeout: Duration::from_secs(5),
        retries: 1,
        backoff: Duration::from_millis(1),
        ..RunOptions::default()
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn native_endpoint_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GeneratorConfig {
        total: 4,
        master_seed: 12,
        render: RenderConfig { width: 480, height: 360 },
        ..GeneratorConfig::default()
    };
    let summary = tokio::task::spawn_blocking({
        let root = dir.path().to_path_buf();
        move || generate_dataset(&cfg, &root).unwrap()
    })
    .await
    .unwrap();
    let manifest = load_manifest(&summary.manifest_path).unwrap();
    let mut pairs = Vec::new();
    for (i, r) in manifest.iter().enumerate() {
        let t = parse_linearized(&r.ground_truth_text, ParseMode::Strict).unwrap();
        pairs.extend(generate_qa_pairs(&r.id, &t, i as u64, 2).unwrap());
    }
    let qa = dir.path().join("qa.jsonl");
    write_qa_file(&qa, &pairs).unwrap();
    let bundle = dir.path().join("ft.jsonl");
    let lines: String = manifest
        .iter()
        .map(|r| json!({"id": r.id, "table_text": r.ground_truth_text}).to_string() + "\n")
        .collect();
    std::fs::write(&bundle, lines).unwrap();

    let server = MockServer::start().await;
    Mock::given(method("POST"))
        .respond_with(Answerer(pairs.iter().map(|p| (p.query.clone(), p.correct_answer)).collect()))
        .mount(&server)
        .await;
    let client = HttpClient::new(server.uri(), "remote", None);
    let ft = EvalConfiguration::with_table(ConfigurationKind::ImagePlusFineTunedTable, &bundle);
    let out = run_eval_from_files(&summary.manifest_path, &qa, &ft, &client, &fast()).await.unwrap();
    assert_eq!(out.report.model_name, "remote");
    assert_eq!(out.report.n, pairs.len());
    assert_eq!(out.report.mape_percent, Some(0.0));
    for (r, p) in out.records.iter().zip(&pairs) {
        assert_eq!(r.extracted, Some(p.correct_answer));
        assert_eq!(r.query, p.query);
    }

    let requests = server.received_requests().await.unwrap();
    assert_eq!(requests.len(), pairs.len());
    for req in &requests {
        let body: Value = serde_json::from_slice(&req.body).unwrap();
        assert_eq!(body["system"], ANSWER_SYSTEM_PROMPT);
        assert_eq!(body["model"], "remote");
        assert!(body["image_base64"].as_str().unwrap().len() > 100);
        let table = body["table_text"].as_str().unwrap();
        assert!(manifest.iter().any(|r| r.ground_truth_text == table));
        assert!(body["prompt"].as_str().unwrap().ends_with(table));
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn dead_endpoint_aborts_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GeneratorConfig {
        total: 1,
        render: RenderConfig { width: 480, height: 360 },
        ..GeneratorConfig::default()
    };
    let root = dir.path().to_path_buf();
    let summary = tokio::task::spawn_blocking(move || generate_dataset(&cfg, &root).unwrap()).await.unwrap();
    let manifest = load_manifest(&summary.manifest_path).unwrap();
    let t = parse_linearized(&manifest[0].ground_truth_text, ParseMode::Strict).unwrap();
    let qa = dir.path().join("qa.jsonl");
    write_qa_file(&qa, &generate_qa_pairs(&manifest[0].id, &t, 0, 1).unwrap()).unwrap();

    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let client = HttpClient::new(format!("http://127.0.0.1:{port}/"), "gone", None);
    let err = run_eval_from_files(&summary.manifest_path, &qa, &EvalConfiguration::image_only(), &client, &fast())
        .await
        .unwrap_err();
    assert!(matches!(err, QaError::EndpointUnreachable(_)), "{err}");
}
