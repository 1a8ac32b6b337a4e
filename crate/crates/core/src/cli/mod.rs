//! The `chartab` command line: corpus generation, table scoring, QA
//! evaluation and report comparison.

mod compare;
mod table_eval;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chartgen::{generate_dataset, item_seed, load_manifest, ChartGenError, ChartType, GeneratorConfig};
use crate::metrics::MetricConfig;
use crate::qa::{
    self, generate_qa_pairs, load_qa_file, parse_generated_pair, query_generation_prompt, run_eval_from_files,
    write_qa_file, ChatCompletionsClient, ConfigurationKind, EvalConfiguration, ExtractMode, HttpClient, MockClient,
    MockMode, ModelClient, QaError, QaPair, RunOptions,
};
use crate::table::{parse_linearized, ParseMode};

pub use compare::{compare, load_reports, ComparisonReport, ConfigDelta, RhoMatrix};
pub use table_eval::{score_predictions, ChartScore, RunReport, ScoreFlag, ScoreMeans};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Usage(String),
    #[error("prediction for unknown chart id {0}")]
    UnknownId(String),
    #[error("{path}: not a QA report: {reason}")]
    SchemaMismatch { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    ChartGen(#[from] ChartGenError),
    #[error(transparent)]
    Qa(#[from] QaError),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chartab", version, about = "Synthetic chart corpora, table scoring and chart QA evaluation")]
pub struct Cli {
    /// JSON config with optional "generator", "metrics" and "qa" sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for generation and scoring.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory (gen, eval-qa) or file (eval-table, gen-qa, report).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a chart corpus with ground-truth tables and a manifest.
    Gen(GenArgs),
    /// Score predicted tables against a manifest with RNSS and RMS.
    EvalTable(EvalTableArgs),
    /// Build question-answer pairs from a manifest's ground truths.
    GenQa(GenQaArgs),
    /// Ask a model (or a mock) the QA pairs under one or more configurations.
    EvalQa(EvalQaArgs),
    /// Compare QA reports across models and configurations.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// `paper-test` (1,000 charts) or `training` (50,000 charts).
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of charts; overrides preset and config.
    #[arg(long)]
    pub total: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalTableArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// JSONL of {"id", "table_text"}.
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub case_insensitive: bool,
    /// Score predictions only as given, without trying swapped keys.
    #[arg(long)]
    pub no_transpose: bool,
    #[arg(long)]
    pub rnss_threshold: Option<f64>,
    /// Leave charts without a prediction out of the means instead of scoring them zero.
    #[arg(long)]
    pub skip_missing: bool,
    /// Exit 0 even when some charts were missing or unparseable.
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct GenQaArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Questions per chart.
    #[arg(long, default_value_t = 3)]
    pub per_chart: usize,
    /// Write query-generation prompts for an external model instead of pairs.
    #[arg(long, conflicts_with = "import_responses")]
    pub emit_prompts: bool,
    /// Validate model replies (JSONL of {"chart_id", "response"}) into pairs.
    #[arg(long)]
    pub import_responses: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApiKind {
    /// POST {model, system, prompt, image_base64?, table_text?} and read {text}.
    #[default]
    Native,
    /// Chat-completions style endpoint; the URL is the API base.
    Chat,
}

#[derive(Debug, Args)]
pub struct EvalQaArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    /// `img`, `img+b_t` or `img+f_t`; repeatable.
    #[arg(long = "configuration", value_parser = parse_kind)]
    pub configurations: Vec<ConfigurationKind>,
    /// Run all three configurations.
    #[arg(long)]
    pub sweep: bool,
    /// Prediction bundle used as the base-model table.
    #[arg(long)]
    pub base_tables: Option<PathBuf>,
    /// Prediction bundle used as the fine-tuned-model table.
    #[arg(long)]
    pub ft_tables: Option<PathBuf>,
    /// `oracle`, `refuse` or `perturb:<percent>`.
    #[arg(long, value_parser = parse_mock, conflicts_with = "endpoint")]
    pub mock: Option<MockMode>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_enum)]
    pub api: Option<ApiKind>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    #[arg(long)]
    pub timeout_secs: Option<f64>,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub backoff_ms: Option<u64>,
    /// Do not attach chart images to requests.
    #[arg(long)]
    pub no_images: bool,
    #[arg(long, value_parser = parse_extract)]
    pub extract: Option<ExtractMode>,
    /// Exit 0 even when some answers could not be extracted.
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// QA report files (JSON object, array or JSONL).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ConfigurationKind, String> {
    ConfigurationKind::parse(s).ok_or_else(|| format!("unknown configuration {s:?}; use img, img+b_t or img+f_t"))
}

fn parse_mock(s: &str) -> Result<MockMode, String> {
    MockMode::parse(s).ok_or_else(|| format!("unknown mock {s:?}; use oracle, refuse or perturb:<percent>"))
}

fn parse_extract(s: &str) -> Result<ExtractMode, String> {
    match s {
        "first" => Ok(ExtractMode::First),
        "last" => Ok(ExtractMode::Last),
        _ => Err(format!("unknown extraction mode {s:?}; use first or last")),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub generator: Option<GeneratorConfig>,
    pub metrics: MetricConfig,
    pub qa: QaSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaSettings {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api: ApiKind,
    pub concurrency: usize,
    pub timeout_secs: f64,
    pub retries: u32,
    pub backoff_ms: u64,
    pub attach_images: bool,
    pub extract_mode: ExtractMode,
    pub configurations: Vec<EvalConfiguration>,
}

impl Default for QaSettings {
    fn default() -> Self {
        let d = RunOptions::default();
        QaSettings {
            endpoint: None,
            model: None,
            api: ApiKind::Native,
            concurrency: d.concurrency,
            timeout_secs: d.timeout.as_secs_f64(),
            retries: d.retries,
            backoff_ms: d.backoff.as_millis() as u64,
            attach_images: d.attach_images,
            extract_mode: d.extract_mode,
            configurations: Vec::new(),
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some items failed; reports were still written.
    Partial,
}

impl Outcome {
    fn from_failures(failures: usize, allow_partial: bool) -> Self {
        if failures > 0 && !allow_partial {
            Outcome::Partial
        } else {
            Outcome::Complete
        }
    }
}

/// Runs a parsed command line, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let config = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| {
        let buf: &mut dyn Write = &mut buf;
        match &cli.command {
            Command::Gen(a) => cmd_gen(&cli, &config, a, buf),
            Command::EvalTable(a) => cmd_eval_table(&cli, &config, a, buf),
            Command::GenQa(a) => cmd_gen_qa(&cli, a, buf),
            Command::EvalQa(a) => cmd_eval_qa(&cli, &config, a, buf),
            Command::Report(a) => cmd_report(&cli, a, buf),
        }
    });
    stdout.write_all(&buf).map_err(out_err)?;
    result
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn require_out<'a>(cli: &'a Cli, what: &str) -> Result<&'a Path, CliError> {
    cli.out
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("{what} needs --out")))
}

pub fn generator_config(cli: &Cli, config: &FileConfig, args: &GenArgs) -> Result<GeneratorConfig, CliError> {
    let mut g = match (&args.preset, &config.generator) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --preset or a generator section in the config, not both".into(),
            ))
        }
        (Some(name), None) => GeneratorConfig::preset(name)
            .ok_or_else(|| CliError::InvalidConfig(format!("unknown preset {name:?}; use paper-test or training")))?,
        (None, Some(g)) => g.clone(),
        (None, None) => GeneratorConfig::paper_test(),
    };
    if let Some(t) = args.total {
        g.total = t;
    }
    if let Some(s) = cli.seed {
        g.master_seed = s;
    }
    g.validate()?;
    Ok(g)
}

fn cmd_gen(cli: &Cli, config: &FileConfig, args: &GenArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = generator_config(cli, config, args)?;
    let out = require_out(cli, "gen")?;
    let summary = generate_dataset(&g, out)?;
    writeln!(stdout, "manifest: {}", summary.manifest_path.display()).map_err(out_err)?;
    for t in ChartType::ALL {
        writeln!(stdout, "{}: {}", t, summary.counts.get(&t).copied().unwrap_or(0)).map_err(out_err)?;
    }
    if summary.up_to_date {
        writeln!(stdout, "up-to-date").map_err(out_err)?;
    }
    Ok(Outcome::Complete)
}

fn cmd_eval_table(
    cli: &Cli,
    config: &FileConfig,
    args: &EvalTableArgs,
    stdout: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let mut m = config.metrics;
    if let Some(t) = args.tau {
        m.tau = t;
    }
    if let Some(t) = args.theta {
        m.theta = t;
    }
    if args.case_insensitive {
        m.case_insensitive = true;
    }
    if args.no_transpose {
        m.transposition_search = false;
    }
    if args.rnss_threshold.is_some() {
        m.rnss_threshold = args.rnss_threshold;
    }
    let manifest = load_manifest(&args.manifest)?;
    let predictions = qa::load_prediction_bundle(&args.predictions)?;
    let report = score_predictions(&manifest, &predictions, &m, args.skip_missing)?;
    match &cli.out {
        Some(p) => write_json(p, &report)?,
        None => {
            let json = serde_json::to_string_pretty(&report).expect("reports serialize");
            writeln!(stdout, "{json}").map_err(out_err)?;
        }
    }
    write!(stdout, "{}", report.to_text()).map_err(out_err)?;
    Ok(Outcome::from_failures(report.failures(), args.allow_partial))
}

#[derive(Deserialize)]
struct GeneratedReply {
    chart_id: String,
    response: String,
}

#[derive(Serialize)]
struct GenerationPrompt<'a> {
    chart_id: &'a str,
    system: &'a str,
    user: &'a str,
}

fn cmd_gen_qa(cli: &Cli, args: &GenQaArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let out = require_out(cli, "gen-qa")?;
    let manifest = load_manifest(&args.manifest)?;
    let seed = cli.seed.unwrap_or(0);

    if args.emit_prompts {
        let mut text = String::new();
        for r in &manifest {
            let p = query_generation_prompt(&r.ground_truth_text);
            let line = GenerationPrompt {
                chart_id: &r.id,
                system: &p.system,
                user: &p.user,
            };
            text.push_str(&serde_json::to_string(&line).expect("prompts serialize"));
            text.push('\n');
        }
        fs::write(out, text).map_err(|e| CliError::io(out, e))?;
        writeln!(stdout, "prompts: {} -> {}", manifest.len(), out.display()).map_err(out_err)?;
        return Ok(Outcome::Complete);
    }

    let mut pairs: Vec<QaPair> = Vec::new();
    let mut rejected = 0;
    if let Some(path) = &args.import_responses {
        let known: std::collections::HashSet<&str> = manifest.iter().map(|r| r.id.as_str()).collect();
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let reply: GeneratedReply = serde_json::from_str(line).map_err(|source| QaError::Json {
                path: path.clone(),
                line: i + 1,
                source,
            })?;
            if !known.contains(reply.chart_id.as_str()) {
                return Err(CliError::UnknownId(reply.chart_id));
            }
            match parse_generated_pair(&reply.chart_id, &reply.response) {
                Ok(p) => pairs.push(p),
                Err(e) => {
                    rejected += 1;
                    writeln!(stdout, "rejected: {e}").map_err(out_err)?;
                }
            }
        }
    } else {
        for (i, r) in manifest.iter().enumerate() {
            let table = parse_linearized(&r.ground_truth_text, ParseMode::Strict)
                .map_err(|e| CliError::InvalidConfig(format!("ground truth of {}: {e}", r.id)))?;
            pairs.extend(generate_qa_pairs(&r.id, &table, item_seed(seed, i), args.per_chart)?);
        }
    }
    write_qa_file(out, &pairs)?;
    writeln!(stdout, "pairs: {} -> {}", pairs.len(), out.display()).map_err(out_err)?;
    Ok(Outcome::from_failures(rejected, false))
}

fn resolve_configurations(config: &FileConfig, args: &EvalQaArgs) -> Result<Vec<EvalConfiguration>, CliError> {
    let kinds: Vec<ConfigurationKind> = if args.sweep {
        ConfigurationKind::ALL.to_vec()
    } else if !args.configurations.is_empty() {
        let mut k = args.configurations.clone();
        k.dedup();
        k
    } else if !config.qa.configurations.is_empty() {
        return Ok(config.qa.configurations.clone());
    } else {
        vec![ConfigurationKind::ImageOnly]
    };
    kinds
        .into_iter()
        .map(|kind| {
            let source = match kind {
                ConfigurationKind::ImageOnly => None,
                ConfigurationKind::ImagePlusBaseTable => args.base_tables.clone(),
                ConfigurationKind::ImagePlusFineTunedTable => args.ft_tables.clone(),
            };
            let cfg = EvalConfiguration {
                kind,
                table_source: source,
            };
            cfg.validate().map_err(|_| {
                CliError::Usage(format!(
                    "{} needs --{}",
                    kind.label(),
                    if kind == ConfigurationKind::ImagePlusBaseTable { "base-tables" } else { "ft-tables" }
                ))
            })?;
            Ok(cfg)
        })
        .collect()
}

fn cmd_eval_qa(cli: &Cli, config: &FileConfig, args: &EvalQaArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let out = require_out(cli, "eval-qa")?;
    let configurations = resolve_configurations(config, args)?;
    let q = &config.qa;
    let opts = RunOptions {
        concurrency: args.concurrency.unwrap_or(q.concurrency),
        timeout: Duration::from_secs_f64(args.timeout_secs.unwrap_or(q.timeout_secs)),
        retries: args.retries.unwrap_or(q.retries),
        backoff: Duration::from_millis(args.backoff_ms.unwrap_or(q.backoff_ms)),
        attach_images: q.attach_images && !args.no_images,
        extract_mode: args.extract.unwrap_or(q.extract_mode),
    };
    if !(opts.timeout > Duration::ZERO) || opts.concurrency == 0 {
        return Err(CliError::Usage("timeout and concurrency must be positive".into()));
    }

    let endpoint = args.endpoint.clone().or_else(|| q.endpoint.clone());
    let client: Box<dyn ModelClient> = match (args.mock, endpoint) {
        (Some(mode), _) => Box::new(MockClient::new(mode, &load_qa_file(&args.qa)?)),
        (None, Some(url)) => {
            let model = args
                .model
                .clone()
                .or_else(|| q.model.clone())
                .ok_or_else(|| CliError::Usage("an endpoint needs --model".into()))?;
            match args.api.unwrap_or(q.api) {
                ApiKind::Native => Box::new(HttpClient::from_env(url, model)),
                ApiKind::Chat => Box::new(ChatCompletionsClient::from_env(url, model)),
            }
        }
        (None, None) => return Err(CliError::Usage("eval-qa needs --mock or --endpoint".into())),
    };

    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io(Path::new("<runtime>"), e))?;
    let mut reports = Vec::new();
    let mut failures = 0;
    for cfg in &configurations {
        let result = runtime.block_on(run_eval_from_files(&args.manifest, &args.qa, cfg, client.as_ref(), &opts))?;
        let log_path = out.join(format!("records_{}.jsonl", cfg.kind.name()));
        let mut log = String::new();
        for r in &result.records {
            log.push_str(&serde_json::to_string(r).expect("records serialize"));
            log.push('\n');
        }
        fs::write(&log_path, log).map_err(|e| CliError::io(&log_path, e))?;
        write_json(&out.join(format!("report_{}.json", cfg.kind.name())), &result.report)?;
        failures += result.report.extraction_failures;
        reports.push(result.report);
    }
    write_json(&out.join("reports.json"), &reports)?;

    writeln!(
        stdout,
        "{:<24} {:<8} {:>6} {:>9} {:>10} {:>8}",
        "model", "config", "n", "MAPE%", "RMSE", "failed"
    )
    .map_err(out_err)?;
    for r in &reports {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        writeln!(
            stdout,
            "{:<24} {:<8} {:>6} {:>9} {:>10} {:>8}",
            r.model_name,
            r.configuration.label(),
            r.n,
            fmt(r.mape_percent),
            fmt(r.rmse),
            r.extraction_failures
        )
        .map_err(out_err)?;
    }
    Ok(Outcome::from_failures(failures, args.allow_partial))
}

fn cmd_report(cli: &Cli, args: &ReportArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    for p in &args.inputs {
        reports.extend(load_reports(p)?);
    }
    let comparison = compare(reports)?;
    match &cli.out {
        Some(p) => write_json(p, &comparison)?,
        None => {
            let json = serde_json::to_string_pretty(&comparison).expect("reports serialize");
            writeln!(stdout, "{json}").map_err(out_err)?;
        }
    }
    write!(stdout, "{}", comparison.to_text()).map_err(out_err)?;
    Ok(Outcome::Complete)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("chartab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn gen_config_resolution() {
        let cli = parse(&["--seed", "9", "gen", "--preset", "training", "--total", "10"]);
        let Command::Gen(a) = &cli.command else { panic!() };
        let g = generator_config(&cli, &FileConfig::default(), a).unwrap();
        assert_eq!((g.total, g.master_seed), (10, 9));

        let cli = parse(&["gen", "--total", "0"]);
        let Command::Gen(a) = &cli.command else { panic!() };
        assert!(matches!(
            generator_config(&cli, &FileConfig::default(), a),
            Err(CliError::ChartGen(ChartGenError::InvalidConfig(_)))
        ));

        let cli = parse(&["gen", "--preset", "nope"]);
        let Command::Gen(a) = &cli.command else { panic!() };
        assert!(generator_config(&cli, &FileConfig::default(), a).is_err());
    }

    #[test]
    fn flag_parsing() {
        let cli = parse(&[
            "eval-qa",
            "--manifest",
            "m",
            "--qa",
            "q",
            "--configuration",
            "img+f_t",
            "--ft-tables",
            "ft.jsonl",
            "--mock",
            "perturb:10",
        ]);
        let Command::EvalQa(a) = &cli.command else { panic!() };
        assert_eq!(a.configurations, vec![ConfigurationKind::ImagePlusFineTunedTable]);
        assert_eq!(a.mock, Some(MockMode::Perturb(10.0)));
        let cfgs = resolve_configurations(&FileConfig::default(), a).unwrap();
        assert_eq!(cfgs[0].table_source.as_deref(), Some(Path::new("ft.jsonl")));

        assert!(Cli::try_parse_from(["chartab", "eval-qa", "--manifest", "m", "--qa", "q", "--mock", "bogus"]).is_err());
    }

    #[test]
    fn table_configuration_needs_bundle() {
        let cli = parse(&["eval-qa", "--manifest", "m", "--qa", "q", "--sweep", "--mock", "oracle"]);
        let Command::EvalQa(a) = &cli.command else { panic!() };
        assert!(matches!(resolve_configurations(&FileConfig::default(), a), Err(CliError::Usage(_))));
    }

    #[test]
    fn config_file_rejects_unknown_sections() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"metrics": {"tau": 0.3}, "generator": {"total": 12}}"#).unwrap();
        let c = FileConfig::load(&p).unwrap();
        assert_eq!(c.metrics.tau, 0.3);
        assert_eq!(c.generator.unwrap().total, 12);
        fs::write(&p, r#"{"metric": {}}"#).unwrap();
        assert!(matches!(FileConfig::load(&p), Err(CliError::InvalidConfig(_))));
    }
}
