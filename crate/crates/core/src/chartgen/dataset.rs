use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ground_truth, render_chart, ChartGenError, ChartSpec, ChartType, GeneratorConfig, Orientation, SpecSampler};
use crate::table::serialize;

pub const MANIFEST_FILE: &str = "manifest.jsonl";
const IMAGES_DIR: &str = "images";
const TABLES_DIR: &str = "tables";

/// One line of `manifest.jsonl`. Paths are relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub chart_type: ChartType,
    pub orientation: Orientation,
    pub image_path: String,
    pub ground_truth_text: String,
    pub spec: ChartSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub manifest_path: PathBuf,
    pub counts: BTreeMap<ChartType, usize>,
    /// The existing manifest already matched byte for byte and nothing was
    /// rewritten.
    pub up_to_date: bool,
}

fn records(config: &GeneratorConfig) -> Result<Vec<ManifestRecord>, ChartGenError> {
    let sampler = SpecSampler::new(config)?;
    (0..sampler.len())
        .into_par_iter()
        .map(|i| {
            let spec = sampler.sample(i)?;
            Ok(ManifestRecord {
                id: spec.id.clone(),
                chart_type: spec.chart_type,
                orientation: spec.orientation,
                image_path: format!("{IMAGES_DIR}/{}.png", spec.id),
                ground_truth_text: serialize(&ground_truth(&spec)),
                spec,
            })
        })
        .collect()
}

/// Manifest bytes for `config` without touching the filesystem.
pub fn manifest_text(config: &GeneratorConfig) -> Result<String, ChartGenError> {
    render_manifest(&records(config)?)
}

fn render_manifest(records: &[ManifestRecord]) -> Result<String, ChartGenError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("manifest records serialize"));
        out.push('\n');
    }
    Ok(out)
}

/// Writes images, ground-truth tables and the manifest under `out_dir`.
///
/// The manifest is written last through a temporary file and rename, so its
/// presence marks a complete dataset. A stale manifest is removed before any
/// other file is touched. When the manifest on disk already equals the one
/// this config produces and every artifact exists, nothing is rewritten.
pub fn generate_dataset(config: &GeneratorConfig, out_dir: &Path) -> Result<DatasetSummary, ChartGenError> {
    let records = records(config)?;
    let text = render_manifest(&records)?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let mut counts = BTreeMap::new();
    for r in &records {
        *counts.entry(r.chart_type).or_insert(0) += 1;
    }

    let existing = fs::read(&manifest_path).ok();
    if existing.as_deref() == Some(text.as_bytes())
        && records.iter().all(|r| {
            out_dir.join(&r.image_path).is_file() && out_dir.join(table_path(&r.id)).is_file()
        })
    {
        return Ok(DatasetSummary {
            manifest_path,
            counts,
            up_to_date: true,
        });
    }
    if existing.is_some() {
        fs::remove_file(&manifest_path).map_err(|e| ChartGenError::io(&manifest_path, e))?;
    }

    for dir in [out_dir.to_path_buf(), out_dir.join(IMAGES_DIR), out_dir.join(TABLES_DIR)] {
        fs::create_dir_all(&dir).map_err(|e| ChartGenError::io(&dir, e))?;
    }
    records.par_iter().try_for_each(|r| -> Result<(), ChartGenError> {
        let table = out_dir.join(table_path(&r.id));
        fs::write(&table, format!("{}\n", r.ground_truth_text)).map_err(|e| ChartGenError::io(&table, e))?;
        render_chart(&r.spec, &out_dir.join(&r.image_path), &config.render)?;
        Ok(())
    })?;

    let tmp = out_dir.join(format!("{MANIFEST_FILE}.partial"));
    fs::write(&tmp, &text).map_err(|e| ChartGenError::io(&tmp, e))?;
    fs::rename(&tmp, &manifest_path).map_err(|e| ChartGenError::io(&manifest_path, e))?;
    Ok(DatasetSummary {
        manifest_path,
        counts,
        up_to_date: false,
    })
}

fn table_path(id: &str) -> String {
    format!("{TABLES_DIR}/{id}.txt")
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRecord>, ChartGenError> {
    let file = fs::File::open(path).map_err(|e| ChartGenError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ChartGenError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|source| ChartGenError::Manifest {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{parse_linearized, ParseMode};

    fn small(total: usize) -> GeneratorConfig {
        GeneratorConfig {
            total,
            master_seed: 5,
            render: super::super::RenderConfig {
                width: 480,
                height: 360,
            },
            ..GeneratorConfig::default()
        }
    }

    #[test]
    fn writes_layout_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let summary = generate_dataset(&small(10), dir.path()).unwrap();
        assert!(!summary.up_to_date);
        let records = load_manifest(&summary.manifest_path).unwrap();
        assert_eq!(records.len(), 10);
        for r in &records {
            let t = parse_linearized(&r.ground_truth_text, ParseMode::Strict).unwrap();
            assert!(!t.to_entries().is_empty());
            let img = image::open(dir.path().join(&r.image_path)).unwrap();
            assert_eq!((img.width(), img.height()), (480, 360));
            let table = fs::read_to_string(dir.path().join(table_path(&r.id))).unwrap();
            assert_eq!(table.trim_end(), r.ground_truth_text);
        }
        assert_eq!(summary.counts.values().sum::<usize>(), 10);
        assert!(!dir.path().join("manifest.jsonl.partial").exists());
    }

    #[test]
    fn rerun_is_up_to_date() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(4);
        generate_dataset(&cfg, dir.path()).unwrap();
        let first = fs::read(dir.path().join(MANIFEST_FILE)).unwrap();
        let again = generate_dataset(&cfg, dir.path()).unwrap();
        assert!(again.up_to_date);
        assert_eq!(fs::read(dir.path().join(MANIFEST_FILE)).unwrap(), first);

        // A missing artifact forces regeneration.
        let rec = &load_manifest(&again.manifest_path).unwrap()[0];
        fs::remove_file(dir.path().join(&rec.image_path)).unwrap();
        let repaired = generate_dataset(&cfg, dir.path()).unwrap();
        assert!(!repaired.up_to_date);
        assert!(dir.path().join(&rec.image_path).exists());
    }

    #[test]
    fn manifest_text_matches_written_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(3);
        generate_dataset(&cfg, dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap(),
            manifest_text(&cfg).unwrap()
        );
    }

    #[test]
    fn bad_manifest_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        fs::write(&p, "{}\n").unwrap();
        assert!(matches!(load_manifest(&p), Err(ChartGenError::Manifest { line: 1, .. })));
    }
}
