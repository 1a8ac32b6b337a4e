use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::{QaError, QaPair};
use crate::table::{HeaderForm, LinearizedTable};

/// A question shape bound to concrete table positions. `row` indexes
/// `table.rows`, `col` indexes a row's cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaTemplate {
    Lookup { row: usize, col: usize },
    /// Same row, two columns.
    DifferenceAcrossColumns { row: usize, col_a: usize, col_b: usize },
    /// Same column, two rows.
    DifferenceAcrossRows { col: usize, row_a: usize, row_b: usize },
    RowSum { row: usize },
    ColumnSum { col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    Lookup,
    Difference,
    Sum,
}

impl QaTemplate {
    pub fn kind(&self) -> TemplateKind {
        match self {
            QaTemplate::Lookup { .. } => TemplateKind::Lookup,
            QaTemplate::DifferenceAcrossColumns { .. } | QaTemplate::DifferenceAcrossRows { .. } => {
                TemplateKind::Difference
            }
            QaTemplate::RowSum { .. } | QaTemplate::ColumnSum { .. } => TemplateKind::Sum,
        }
    }
}

fn value(table: &LinearizedTable, row: usize, col: usize) -> Option<f64> {
    table.rows.get(row)?.cells.get(col)?.as_f64()
}

fn column_name(table: &LinearizedTable, col: usize) -> Option<&str> {
    table.header.get(col + 1).map(String::as_str)
}

/// Fills in `template` against `table`. Returns `None` when a referenced
/// cell is missing or textual, or when the rounded answer is zero.
pub fn instantiate(chart_id: &str, table: &LinearizedTable, template: &QaTemplate) -> Option<QaPair> {
    let simple = table.header_form() == HeaderForm::Simple;
    let row_name = |r: usize| table.rows.get(r).map(|row| row.row_header.as_str());
    let (query, answer) = match *template {
        QaTemplate::Lookup { row, col } => {
            let v = value(table, row, col)?;
            let q = if simple {
                format!("What is the value of {}?", row_name(row)?)
            } else {
                format!("What is the value of {} for {}?", row_name(row)?, column_name(table, col)?)
            };
            (q, v)
        }
        QaTemplate::DifferenceAcrossColumns { row, col_a, col_b } => {
            if col_a == col_b {
                return None;
            }
            let a = value(table, row, col_a)?;
            let b = value(table, row, col_b)?;
            let q = format!(
                "What is the difference between the {} value of {} and {}?",
                row_name(row)?,
                column_name(table, col_a)?,
                column_name(table, col_b)?
            );
            (q, (a - b).abs())
        }
        QaTemplate::DifferenceAcrossRows { col, row_a, row_b } => {
            if row_a == row_b {
                return None;
            }
            let a = value(table, row_a, col)?;
            let b = value(table, row_b, col)?;
            let q = if simple {
                format!("What is the difference between the value of {} and {}?", row_name(row_a)?, row_name(row_b)?)
            } else {
                format!(
                    "What is the difference between the value of {} and {} for {}?",
                    row_name(row_a)?,
                    row_name(row_b)?,
                    column_name(table, col)?
                )
            };
            (q, (a - b).abs())
        }
        QaTemplate::RowSum { row } => {
            let cells = &table.rows.get(row)?.cells;
            if cells.len() < 2 {
                return None;
            }
            let total = cells.iter().map(|c| c.as_f64()).sum::<Option<f64>>()?;
            (format!("What is the total value of {} across all series?", row_name(row)?), total)
        }
        QaTemplate::ColumnSum { col } => {
            if table.rows.len() < 2 {
                return None;
            }
            let total = table.rows.iter().map(|r| r.cells.get(col)?.as_f64()).sum::<Option<f64>>()?;
            let q = if simple {
                "What is the sum of the values across all categories?".to_string()
            } else {
                format!("What is the sum of the {} values across all categories?", column_name(table, col)?)
            };
            (q, total)
        }
    };
    let answer = answer.round();
    if answer == 0.0 || !answer.is_finite() {
        return None;
    }
    Some(QaPair {
        chart_id: chart_id.to_string(),
        query,
        correct_answer: answer as i64,
    })
}

fn candidates(table: &LinearizedTable) -> Vec<QaTemplate> {
    let rows = table.rows.len();
    let cols = table.rows.iter().map(|r| r.cells.len()).max().unwrap_or(0);
    let mut out = Vec::new();
    for row in 0..rows {
        for col in 0..cols {
            out.push(QaTemplate::Lookup { row, col });
        }
    }
    for row in 0..rows {
        for col_a in 0..cols {
            for col_b in col_a + 1..cols {
                out.push(QaTemplate::DifferenceAcrossColumns { row, col_a, col_b });
            }
        }
    }
    for col in 0..cols {
        for row_a in 0..rows {
            for row_b in row_a + 1..rows {
                out.push(QaTemplate::DifferenceAcrossRows { col, row_a, row_b });
            }
        }
    }
    out.extend((0..rows).map(|row| QaTemplate::RowSum { row }));
    out.extend((0..cols).map(|col| QaTemplate::ColumnSum { col }));
    out
}

/// Up to `count` distinct question-answer pairs about `table`.
///
/// A template family (lookup, difference, sum) is drawn uniformly among the
/// families that still have unused questions, then a question within it.
/// Deterministic in `rng_seed`. Fewer than `count` pairs come back when the
/// table does not support that many distinct non-zero questions.
pub fn generate_qa_pairs(
    chart_id: &str,
    table: &LinearizedTable,
    rng_seed: u64,
    count: usize,
) -> Result<Vec<QaPair>, QaError> {
    if table.to_numbers().is_empty() {
        return Err(QaError::NoNumericEntries(chart_id.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut families: Vec<(TemplateKind, Vec<QaPair>)> =
        vec![(TemplateKind::Lookup, vec![]), (TemplateKind::Difference, vec![]), (TemplateKind::Sum, vec![])];
    let mut seen = HashSet::new();
    for template in candidates(table) {
        if let Some(pair) = instantiate(chart_id, table, &template) {
            if seen.insert(pair.query.clone()) {
                let slot = families.iter_mut().find(|(k, _)| *k == template.kind()).expect("all kinds listed");
                slot.1.push(pair);
            }
        }
    }
    for (_, pairs) in &mut families {
        pairs.shuffle(&mut rng);
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let open: Vec<usize> = (0..families.len()).filter(|&i| !families[i].1.is_empty()).collect();
        if open.is_empty() {
            break;
        }
        let pick = open[rng.gen_range(0..open.len())];
        out.push(families[pick].1.pop().expect("non-empty"));
    }
    Ok(out)
}

/// Validates a model's `{"query": ..., "correct_answer": <integer>}` reply.
/// Surrounding prose or code fences are ignored.
pub fn parse_generated_pair(chart_id: &str, response: &str) -> Result<QaPair, QaError> {
    let invalid = |why: &str| QaError::InvalidGeneratedPair(format!("{chart_id}: {why}"));
    let start = response.find('{').ok_or_else(|| invalid("no JSON object"))?;
    let end = response.rfind('}').ok_or_else(|| invalid("no JSON object"))?;
    if end < start {
        return Err(invalid("no JSON object"));
    }
    let value: Value = serde_json::from_str(&response[start..=end]).map_err(|e| invalid(&e.to_string()))?;
    let query = value
        .get("query")
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|q| !q.is_empty())
        .ok_or_else(|| invalid("missing query"))?;
    let answer = value.get("correct_answer").ok_or_else(|| invalid("missing correct_answer"))?;
    let correct_answer = match answer.as_i64() {
        Some(a) => a,
        None => match answer.as_f64() {
            Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => f as i64,
            _ => return Err(invalid("correct_answer is not an integer")),
        },
    };
    Ok(QaPair {
        chart_id: chart_id.to_string(),
        query: query.to_string(),
        correct_answer,
    })
}
