//! Synthetic bar-chart corpora: seeded chart recipes, their ground-truth
//! tables, raster renders and a JSONL manifest tying them together.

mod dataset;
mod render;
mod vocab;

use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{CellValue, DataRow, LinearizedTable};

pub use dataset::{generate_dataset, load_manifest, manifest_text, DatasetSummary, ManifestRecord, MANIFEST_FILE};
pub use render::{render, render_chart, BarRect, RenderConfig, Rendered, TextDraw, TextRole};
pub use vocab::VocabLists;

#[derive(Debug, Error)]
pub enum ChartGenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("invalid chart spec {id}: {reason}")]
    InvalidSpec { id: String, reason: String },
    #[error("cannot render {id}: {reason}")]
    Render { id: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image encoding failed for {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("manifest {path} line {line}: {source}")]
    Manifest {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl ChartGenError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ChartGenError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Simple,
    Stacked,
    Grouped,
}

impl ChartType {
    pub const ALL: [ChartType; 3] = [ChartType::Simple, ChartType::Stacked, ChartType::Grouped];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::Simple => "simple",
            ChartType::Stacked => "stacked",
            ChartType::Grouped => "grouped",
        }
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// Full recipe for one chart.
///
/// `x_label` names the category axis and `y_label` the value axis; a
/// horizontal chart draws them on the swapped physical axes. `values` is
/// indexed `[category][series]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub id: String,
    pub chart_type: ChartType,
    pub orientation: Orientation,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub annotate: bool,
    pub seed: u64,
}

impl ChartSpec {
    pub fn validate(&self) -> Result<(), ChartGenError> {
        let fail = |reason: String| {
            Err(ChartGenError::InvalidSpec {
                id: self.id.clone(),
                reason,
            })
        };
        if self.categories.is_empty() {
            return fail("no categories".into());
        }
        if self.series_names.is_empty() {
            return fail("no series".into());
        }
        if self.chart_type == ChartType::Simple && self.series_names.len() != 1 {
            return fail(format!("simple chart with {} series", self.series_names.len()));
        }
        if self.values.len() != self.categories.len()
            || self.values.iter().any(|row| row.len() != self.series_names.len())
        {
            return fail("values shape does not match categories x series".into());
        }
        Ok(())
    }

    /// Label of the physical vertical axis.
    pub fn vertical_axis_label(&self) -> &str {
        match self.orientation {
            Orientation::Vertical => &self.y_label,
            Orientation::Horizontal => &self.x_label,
        }
    }

    /// Label of the physical horizontal axis.
    pub fn horizontal_axis_label(&self) -> &str {
        match self.orientation {
            Orientation::Vertical => &self.x_label,
            Orientation::Horizontal => &self.y_label,
        }
    }
}

/// Target share of each chart type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub simple: f64,
    pub stacked: f64,
    pub grouped: f64,
}

impl Mix {
    fn share(&self, t: ChartType) -> f64 {
        match t {
            ChartType::Simple => self.simple,
            ChartType::Stacked => self.stacked,
            ChartType::Grouped => self.grouped,
        }
    }
}

impl Default for Mix {
    fn default() -> Self {
        Self {
            simple: 0.5,
            stacked: 0.3,
            grouped: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub total: usize,
    pub mix: Mix,
    pub value_range_simple: (f64, f64),
    pub value_range_multi: (f64, f64),
    pub allow_negative: bool,
    /// Negative values in stacked charts; off unless asked for.
    pub stacked_allow_negative: bool,
    /// Decimal places of generated values; 0 gives integers.
    pub decimals: u32,
    pub annotate_probability: f64,
    pub horizontal_probability: f64,
    /// Inclusive bounds on the number of categories per chart.
    pub category_count: (usize, usize),
    /// Inclusive bounds on the number of series for stacked/grouped charts.
    pub series_count: (usize, usize),
    pub vocab: VocabLists,
    pub master_seed: u64,
    pub id_prefix: String,
    pub render: RenderConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            total: 1000,
            mix: Mix::default(),
            value_range_simple: (-100.0, 100.0),
            value_range_multi: (100.0, 1000.0),
            allow_negative: true,
            stacked_allow_negative: false,
            decimals: 0,
            annotate_probability: 0.5,
            horizontal_probability: 0.5,
            category_count: (3, 7),
            series_count: (2, 5),
            vocab: VocabLists::default(),
            master_seed: 0,
            id_prefix: "chart_".into(),
            render: RenderConfig::default(),
        }
    }
}

impl GeneratorConfig {
    /// Evaluation split: 1,000 charts at 500 / 300 / 200.
    pub fn paper_test() -> Self {
        Self {
            total: 1000,
            ..Self::default()
        }
    }

    /// Fine-tuning corpus: 50,000 charts at the 50 / 30 / 20 mix.
    pub fn training() -> Self {
        Self {
            total: 50_000,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper-test" | "test" => Some(Self::paper_test()),
            "training" | "train" => Some(Self::training()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ChartGenError> {
        let bad = |msg: String| Err(ChartGenError::InvalidConfig(msg));
        if self.total == 0 {
            return bad("total must be positive".into());
        }
        let shares = [self.mix.simple, self.mix.stacked, self.mix.grouped];
        if shares.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return bad("mix shares must be non-negative".into());
        }
        if (shares.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad(format!("mix must sum to 1, got {}", shares.iter().sum::<f64>()));
        }
        for t in ChartType::ALL {
            let (lo, hi) = self.effective_range(t);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad(format!("empty value range for {t} charts: ({lo}, {hi})"));
            }
            if self.decimals == 0 && lo.ceil() > hi.floor() {
                return bad(format!("value range for {t} charts holds no integer"));
            }
        }
        if self.decimals > 6 {
            return bad("at most 6 decimal places".into());
        }
        for (name, p) in [
            ("annotate_probability", self.annotate_probability),
            ("horizontal_probability", self.horizontal_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        let (cmin, cmax) = self.category_count;
        if cmin < 1 || cmin > cmax {
            return bad("category_count must satisfy 1 <= min <= max".into());
        }
        let (smin, smax) = self.series_count;
        if smin < 1 || smin > smax {
            return bad("series_count must satisfy 1 <= min <= max".into());
        }
        self.vocab.validate()?;
        if self.vocab.categories.len() < cmax {
            return bad(format!("vocabulary has fewer than {cmax} categories"));
        }
        if self.vocab.series_names.len() < smax {
            return bad(format!("vocabulary has fewer than {smax} series names"));
        }
        Ok(())
    }

    fn effective_range(&self, t: ChartType) -> (f64, f64) {
        let (lo, hi) = match t {
            ChartType::Simple => self.value_range_simple,
            _ => self.value_range_multi,
        };
        let negatives = self.allow_negative && (t != ChartType::Stacked || self.stacked_allow_negative);
        (if negatives { lo } else { lo.max(0.0) }, hi)
    }

    /// Exact per-type counts: floor of `total * share`, with the leftover
    /// handed out by largest fractional remainder (ties to the earlier type).
    pub fn type_counts(&self) -> [(ChartType, usize); 3] {
        let quotas = ChartType::ALL.map(|t| self.total as f64 * self.mix.share(t));
        let mut counts = quotas.map(|q| q.floor() as usize);
        let assigned: usize = counts.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().take(self.total.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        [
            (ChartType::Simple, counts[0]),
            (ChartType::Stacked, counts[1]),
            (ChartType::Grouped, counts[2]),
        ]
    }
}

/// Stable 64-bit mixer (SplitMix64 finalizer).
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of chart `index` under `master_seed`.
pub fn item_seed(master_seed: u64, index: usize) -> u64 {
    mix64(master_seed ^ mix64(index as u64))
}

const TYPE_SHUFFLE_SALT: u64 = 0x7479_7065_5f73_6571;

/// Draws chart recipes for one config. Holds the shuffled chart-type
/// sequence so each index is sampled in O(1).
#[derive(Debug, Clone)]
pub struct SpecSampler<'a> {
    config: &'a GeneratorConfig,
    types: Vec<ChartType>,
}

impl<'a> SpecSampler<'a> {
    pub fn new(config: &'a GeneratorConfig) -> Result<Self, ChartGenError> {
        config.validate()?;
        let mut types: Vec<ChartType> = config
            .type_counts()
            .iter()
            .flat_map(|&(t, n)| std::iter::repeat_n(t, n))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(config.master_seed ^ TYPE_SHUFFLE_SALT));
        types.shuffle(&mut rng);
        Ok(Self { config, types })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn sample(&self, index: usize) -> Result<ChartSpec, ChartGenError> {
        let cfg = self.config;
        let chart_type = *self.types.get(index).ok_or_else(|| {
            ChartGenError::InvalidConfig(format!("index {index} out of range for total {}", cfg.total))
        })?;
        let seed = item_seed(cfg.master_seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab = &cfg.vocab;

        let title = vocab.titles.choose(&mut rng).expect("validated").clone();
        let x_label = vocab.x_labels.choose(&mut rng).expect("validated").clone();
        let y_label = vocab.y_labels.choose(&mut rng).expect("validated").clone();
        let n_categories = rng.gen_range(cfg.category_count.0..=cfg.category_count.1);
        let categories = pick_distinct(&mut rng, &vocab.categories, n_categories);
        let n_series = match chart_type {
            ChartType::Simple => 1,
            _ => rng.gen_range(cfg.series_count.0..=cfg.series_count.1),
        };
        let series_names = match chart_type {
            ChartType::Simple => vec![y_label.clone()],
            _ => pick_distinct(&mut rng, &vocab.series_names, n_series),
        };
        let (lo, hi) = cfg.effective_range(chart_type);
        let values = (0..n_categories)
            .map(|_| (0..n_series).map(|_| draw_value(&mut rng, lo, hi, cfg.decimals)).collect())
            .collect();
        let orientation = if rng.gen_bool(cfg.horizontal_probability) {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        };
        let annotate = rng.gen_bool(cfg.annotate_probability);

        Ok(ChartSpec {
            id: format!("{}{:06}", cfg.id_prefix, index),
            chart_type,
            orientation,
            title,
            x_label,
            y_label,
            categories,
            series_names,
            values,
            annotate,
            seed,
        })
    }
}

/// Samples the recipe for chart `index`; deterministic in
/// `(config.master_seed, index)`.
pub fn sample_spec(config: &GeneratorConfig, index: usize) -> Result<ChartSpec, ChartGenError> {
    SpecSampler::new(config)?.sample(index)
}

fn pick_distinct(rng: &mut ChaCha8Rng, pool: &[String], n: usize) -> Vec<String> {
    rand::seq::index::sample(rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

fn draw_value(rng: &mut ChaCha8Rng, lo: f64, hi: f64, decimals: u32) -> f64 {
    if decimals == 0 {
        rng.gen_range(lo.ceil() as i64..=hi.floor() as i64) as f64
    } else {
        let scale = 10f64.powi(decimals as i32);
        let v = (rng.gen_range(lo..=hi) * scale).round() / scale;
        // -0.0 would print as "0" but compare unequal in sign-sensitive checks.
        if v == 0.0 {
            0.0
        } else {
            v
        }
    }
}

/// Ground-truth table for a chart.
///
/// Simple charts use the header `x_label | y_label`. Stacked charts lead
/// with the label of the physical vertical axis and grouped charts with the
/// label of the physical horizontal axis, followed by the series names.
pub fn ground_truth(spec: &ChartSpec) -> LinearizedTable {
    let mut header = Vec::with_capacity(spec.series_names.len() + 1);
    match spec.chart_type {
        ChartType::Simple => {
            header.push(spec.x_label.clone());
            header.push(spec.y_label.clone());
        }
        ChartType::Stacked => {
            header.push(spec.vertical_axis_label().to_string());
            header.extend(spec.series_names.iter().cloned());
        }
        ChartType::Grouped => {
            header.push(spec.horizontal_axis_label().to_string());
            header.extend(spec.series_names.iter().cloned());
        }
    }
    let rows = spec
        .categories
        .iter()
        .zip(&spec.values)
        .map(|(category, values)| {
            DataRow::new(category.clone(), values.iter().map(|&v| CellValue::number(v)).collect())
        })
        .collect();
    LinearizedTable::new(Some(spec.title.clone()), header, rows)
}
