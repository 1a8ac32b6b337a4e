use std::collections::HashMap;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::QaPair;

/// Environment variable holding the bearer token for HTTP endpoints.
pub const TOKEN_ENV: &str = "CHARTAB_API_TOKEN";

/// One request/response exchange with a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRequest {
    pub model: String,
    pub system: String,
    pub prompt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_base64: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_text: Option<String>,
    /// Routing information for mocks; never sent over the wire.
    #[serde(skip)]
    pub chart_id: String,
    #[serde(skip)]
    pub query: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClientError {
    #[error("unreachable: {0}")]
    Unreachable(String),
    #[error("timed out")]
    Timeout,
    #[error("HTTP {code}: {body}")]
    Status { code: u16, body: String },
    #[error("undecodable response: {0}")]
    Decode(String),
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        match self {
            ClientError::Unreachable(_) | ClientError::Timeout => true,
            ClientError::Status { code, .. } => *code == 429 || *code >= 500,
            ClientError::Decode(_) => false,
        }
    }
}

#[async_trait]
pub trait ModelClient: Send + Sync {
    fn model_name(&self) -> &str;
    async fn complete(&self, request: &ModelRequest) -> Result<String, ClientError>;
}

fn classify(e: reqwest::Error) -> ClientError {
    if e.is_timeout() {
        ClientError::Timeout
    } else if e.is_connect() || e.is_request() {
        ClientError::Unreachable(e.to_string())
    } else {
        ClientError::Decode(e.to_string())
    }
}

async fn post_json(http: &reqwest::Client, url: &str, token: Option<&str>, body: &Value) -> Result<Value, ClientError> {
    let mut req = http.post(url).json(body);
    if let Some(t) = token {
        req = req.bearer_auth(t);
    }
    let resp = req.send().await.map_err(classify)?;
    let status = resp.status();
    if !status.is_success() {
        let body = resp.text().await.unwrap_or_default();
        return Err(ClientError::Status {
            code: status.as_u16(),
            body,
        });
    }
    resp.json().await.map_err(|e| ClientError::Decode(e.to_string()))
}

fn build_http(timeout: Option<Duration>) -> reqwest::Client {
    let mut b = reqwest::Client::builder();
    if let Some(t) = timeout {
        b = b.timeout(t);
    }
    b.build().expect("TLS backend initializes")
}

/// Native endpoint: POSTs the request as JSON and reads `{"text": ...}`.
#[derive(Debug, Clone)]
pub struct HttpClient {
    url: String,
    model: String,
    token: Option<String>,
    http: reqwest::Client,
}

impl HttpClient {
    pub fn new(url: impl Into<String>, model: impl Into<String>, token: Option<String>) -> Self {
        HttpClient {
            url: url.into(),
            model: model.into(),
            token,
            http: build_http(None),
        }
    }

    /// Token taken from [`TOKEN_ENV`] when set.
    pub fn from_env(url: impl Into<String>, model: impl Into<String>) -> Self {
        Self::new(url, model, std::env::var(TOKEN_ENV).ok())
    }
}

#[async_trait]
impl ModelClient for HttpClient {
    fn model_name(&self) -> &str {
        &self.model
    }

    async fn complete(&self, request: &ModelRequest) -> Result<String, ClientError> {
        let body = serde_json::to_value(request).expect("request serializes");
        let v = post_json(&self.http, &self.url, self.token.as_deref(), &body).await?;
        v.get("text")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ClientError::Decode("missing \"text\"".into()))
    }
}

/// Adapter for chat-completions style APIs (`{base}/chat/completions`).
#[derive(Debug, Clone)]
pub struct ChatCompletionsClient {
    base_url: String,
    model: String,
    token: Option<String>,
    http: reqwest::Client,
}

impl ChatCompletionsClient {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>, token: Option<String>) -> Self {
        ChatCompletionsClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            model: model.into(),
            token,
            http: build_http(None),
        }
    }

    pub fn from_env(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self::new(base_url, model, std::env::var(TOKEN_ENV).ok())
    }

    fn body(&self, request: &ModelRequest) -> Value {
        let mut content = vec![json!({"type": "text", "text": request.prompt})];
        if let Some(img) = &request.image_base64 {
            content.push(json!({
                "type": "image_url",
                "image_url": {"url": format!("data:image/png;base64,{img}")}
            }));
        }
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": content}
            ]
        })
    }
}

#[async_trait]
impl ModelClient for ChatCompletionsClient {
    fn model_name(&self) -> &str {
        &self.model
    }

    async fn complete(&self, request: &ModelRequest) -> Result<String, ClientError> {
        let url = format!("{}/chat/completions", self.base_url);
        let v = post_json(&self.http, &url, self.token.as_deref(), &self.body(request)).await?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ClientError::Decode("missing choices[0].message.content".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MockMode {
    /// Returns the correct answer.
    Oracle,
    /// Returns the correct answer scaled by `1 + p/100`, rounded.
    Perturb(f64),
    /// Never gives a number.
    Refuse,
}

impl MockMode {
    /// `oracle`, `refuse`, or `perturb:<percent>`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "oracle" => Some(MockMode::Oracle),
            "refuse" => Some(MockMode::Refuse),
            _ => s
                .strip_prefix("perturb:")
                .and_then(|p| p.trim_end_matches('%').parse().ok())
                .filter(|p: &f64| p.is_finite())
                .map(MockMode::Perturb),
        }
    }
}

/// Offline client answering from known QA pairs.
#[derive(Debug, Clone)]
pub struct MockClient {
    mode: MockMode,
    name: String,
    answers: HashMap<(String, String), i64>,
}

pub const REFUSAL: &str = "I cannot tell from the chart.";

impl MockClient {
    pub fn new(mode: MockMode, pairs: &[QaPair]) -> Self {
        let name = match mode {
            MockMode::Oracle => "mock-oracle".to_string(),
            MockMode::Perturb(p) => format!("mock-perturb-{p}"),
            MockMode::Refuse => "mock-refuse".to_string(),
        };
        MockClient {
            mode,
            name,
            answers: pairs
                .iter()
                .map(|p| ((p.chart_id.clone(), p.query.clone()), p.correct_answer))
                .collect(),
        }
    }
}

#[async_trait]
impl ModelClient for MockClient {
    fn model_name(&self) -> &str {
        &self.name
    }

    async fn complete(&self, request: &ModelRequest) -> Result<String, ClientError> {
        let Some(&answer) = self.answers.get(&(request.chart_id.clone(), request.query.clone())) else {
            return Ok(REFUSAL.to_string());
        };
        Ok(match self.mode {
            MockMode::Oracle => answer.to_string(),
            MockMode::Perturb(p) => {
                let v = (answer as f64 * (1.0 + p / 100.0)).round() as i64;
                format!("Reading the bars step by step, the answer is {v}")
            }
            MockMode::Refuse => REFUSAL.to_string(),
        })
    }
}
