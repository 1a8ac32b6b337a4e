use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::qa::{config_delta, relative_improvement, ConfigurationKind, QaReport};

/// Change between two configurations of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDelta {
    pub model_name: String,
    pub from: ConfigurationKind,
    pub to: ConfigurationKind,
    pub delta_mape: f64,
    pub delta_rmse: Option<f64>,
    /// Relative MAPE reduction going from `from` to `to`, in percent.
    pub rho: Option<f64>,
}

/// `rho[i][j]` is the relative MAPE reduction of `models[j]` against
/// `models[i]` under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoMatrix {
    pub configuration: ConfigurationKind,
    pub models: Vec<String>,
    pub rho: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reports: Vec<QaReport>,
    pub config_deltas: Vec<ConfigDelta>,
    pub model_rho: Vec<RhoMatrix>,
}

/// Reads QA reports from a file holding one JSON object, a JSON array, or
/// one object per line.
pub fn load_reports(path: &Path) -> Result<Vec<QaReport>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mismatch = |reason: String| CliError::SchemaMismatch {
        path: path.to_path_buf(),
        reason,
    };
    let values: Vec<Value> = match serde_json::from_str::<Value>(&text) {
        Ok(Value::Array(items)) => items,
        Ok(v) => vec![v],
        Err(_) => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| mismatch(format!("line {}: {e}", i + 1))))
            .collect::<Result<_, _>>()?,
    };
    values
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| mismatch(e.to_string())))
        .collect()
}

/// Configuration deltas per model and model-vs-model relative improvement
/// per configuration. Needs at least two reports; each (model,
/// configuration) pair may appear once.
pub fn compare(reports: Vec<QaReport>) -> Result<ComparisonReport, CliError> {
    if reports.len() < 2 {
        return Err(CliError::Usage(format!("report needs at least 2 QA reports, got {}", reports.len())));
    }
    let mut models: Vec<String> = Vec::new();
    let mut cell: BTreeMap<(String, ConfigurationKind), &QaReport> = BTreeMap::new();
    for r in &reports {
        if !models.contains(&r.model_name) {
            models.push(r.model_name.clone());
        }
        if cell.insert((r.model_name.clone(), r.configuration), r).is_some() {
            return Err(CliError::Usage(format!(
                "duplicate report for {} under {}",
                r.model_name,
                r.configuration.label()
            )));
        }
    }

    let mut config_deltas = Vec::new();
    for m in &models {
        for (i, &from) in ConfigurationKind::ALL.iter().enumerate() {
            for &to in &ConfigurationKind::ALL[i + 1..] {
                let (Some(a), Some(b)) = (cell.get(&(m.clone(), from)), cell.get(&(m.clone(), to))) else {
                    continue;
                };
                let (Some(ma), Some(mb)) = (a.mape_percent, b.mape_percent) else {
                    continue;
                };
                config_deltas.push(ConfigDelta {
                    model_name: m.clone(),
                    from,
                    to,
                    delta_mape: config_delta(ma, mb),
                    delta_rmse: a.rmse.zip(b.rmse).map(|(x, y)| config_delta(x, y)),
                    rho: relative_improvement(ma, mb).ok(),
                });
            }
        }
    }

    let mut model_rho = Vec::new();
    for kind in ConfigurationKind::ALL {
        let present: Vec<(String, Option<f64>)> = models
            .iter()
            .filter_map(|m| cell.get(&(m.clone(), kind)).map(|r| (m.clone(), r.mape_percent)))
            .collect();
        if present.len() < 2 {
            continue;
        }
        let rho = present
            .iter()
            .map(|(_, a)| {
                present
                    .iter()
                    .map(|(_, b)| a.zip(*b).and_then(|(a, b)| relative_improvement(a, b).ok()))
                    .collect()
            })
            .collect();
        model_rho.push(RhoMatrix {
            configuration: kind,
            models: present.into_iter().map(|(m, _)| m).collect(),
            rho,
        });
    }

    Ok(ComparisonReport {
        reports,
        config_deltas,
        model_rho,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut models: Vec<&str> = Vec::new();
        for r in &self.reports {
            if !models.contains(&r.model_name.as_str()) {
                models.push(&r.model_name);
            }
        }
        let _ = write!(s, "{:<16}", "model");
        for k in ConfigurationKind::ALL {
            let _ = write!(s, " {:>9} {:>9}", format!("{} MAPE", k.label()), "RMSE");
        }
        s.push('\n');
        for m in &models {
            let _ = write!(s, "{m:<16}");
            for k in ConfigurationKind::ALL {
                let r = self.reports.iter().find(|r| r.model_name == *m && r.configuration == k);
                let _ = write!(
                    s,
                    " {:>9} {:>9}",
                    opt(r.and_then(|r| r.mape_percent)),
                    opt(r.and_then(|r| r.rmse))
                );
            }
            s.push('\n');
        }

        if !self.config_deltas.is_empty() {
            let _ = writeln!(s, "\n{:<16} {:<18} {:>8} {:>8} {:>8}", "model", "configurations", "dMAPE", "dRMSE", "rho%");
            for d in &self.config_deltas {
                let _ = writeln!(
                    s,
                    "{:<16} {:<18} {:>8.2} {:>8} {:>8}",
                    d.model_name,
                    format!("{} -> {}", d.from.label(), d.to.label()),
                    d.delta_mape,
                    opt(d.delta_rmse),
                    opt(d.rho)
                );
            }
        }

        for m in &self.model_rho {
            let _ = writeln!(s, "\nrho% under {} (row = baseline, column = compared)", m.configuration.label());
            let _ = write!(s, "{:<16}", "");
            for name in &m.models {
                let _ = write!(s, " {name:>12}");
            }
            s.push('\n');
            for (name, row) in m.models.iter().zip(&m.rho) {
                let _ = write!(s, "{name:<16}");
                for v in row {
                    let _ = write!(s, " {:>12}", opt(*v));
                }
                s.push('\n');
            }
        }
        s
    }
}
