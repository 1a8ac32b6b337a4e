//! Linearized chart tables: the `|` / `<0x0A>` text form, its parsed model,
//! and the entry/number views consumed by the metrics.

mod grammar;
mod number;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grammar::{parse_linearized, parse_with, serialize, ParseMode, ParseOptions, ROW_TOKEN};
pub use number::{format_number, parse_number};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("empty input")]
    EmptyInput,
    #[error("row {0} has a different number of cells than the header")]
    RaggedRow(usize),
    #[error("row {0} has an empty row header")]
    EmptyRowHeader(usize),
    #[error("no header row found")]
    MissingHeader,
    #[error("table is not rectangular with at least two header cells")]
    NotRectangular,
}

/// One table cell. Both variants keep the source text so serialization is
/// lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellValue {
    Numeric { value: f64, raw: String },
    Textual { raw: String },
}

impl CellValue {
    /// Classifies `raw` as numeric when [`parse_number`] accepts it.
    pub fn from_raw(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        match parse_number(&raw) {
            Some(value) => CellValue::Numeric { value, raw },
            None => CellValue::Textual { raw },
        }
    }

    pub fn number(value: f64) -> Self {
        CellValue::Numeric {
            value,
            raw: format_number(value),
        }
    }

    pub fn raw(&self) -> &str {
        match self {
            CellValue::Numeric { raw, .. } | CellValue::Textual { raw } => raw,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CellValue::Numeric { value, .. } => Some(*value),
            CellValue::Textual { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    pub row_header: String,
    pub cells: Vec<CellValue>,
}

impl DataRow {
    pub fn new(row_header: impl Into<String>, cells: Vec<CellValue>) -> Self {
        Self {
            row_header: row_header.into(),
            cells,
        }
    }
}

/// Parsed chart table.
///
/// `header[0]` labels the category axis; the remaining header cells name the
/// value columns (a single value-axis label for simple charts, series names
/// otherwise). Every row carries `header.len() - 1` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedTable {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<DataRow>,
}

/// A `(row key, column key, value)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row_key: String,
    pub col_key: String,
    pub value: CellValue,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntrySet {
    pub entries: Vec<Entry>,
}

impl EntrySet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same entries with row and column keys exchanged.
    pub fn swapped(&self) -> EntrySet {
        EntrySet {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    row_key: e.col_key.clone(),
                    col_key: e.row_key.clone(),
                    value: e.value.clone(),
                })
                .collect(),
        }
    }
}

impl FromIterator<Entry> for EntrySet {
    fn from_iter<I: IntoIterator<Item = Entry>>(iter: I) -> Self {
        EntrySet {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Multiset of the numeric cells of a table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NumberSet {
    pub values: Vec<f64>,
}

impl NumberSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for NumberSet {
    fn from(values: Vec<f64>) -> Self {
        NumberSet { values }
    }
}

/// Layout of the header row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeaderForm {
    /// `category label | value label`, one value per row.
    Simple,
    /// `axis label | series_1 | ... | series_k`.
    MultiSeries,
}

impl LinearizedTable {
    pub fn new(title: Option<String>, header: Vec<String>, rows: Vec<DataRow>) -> Self {
        Self {
            title,
            header,
            rows,
        }
    }

    pub fn header_form(&self) -> HeaderForm {
        if self.header.len() == 2 && self.rows.iter().all(|r| r.cells.len() == 1) {
            HeaderForm::Simple
        } else {
            HeaderForm::MultiSeries
        }
    }

    pub fn is_rectangular(&self) -> bool {
        let width = self.header.len().saturating_sub(1);
        self.rows.iter().all(|r| r.cells.len() == width)
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    /// Row-major entries. The column key of cell `j` is `header[j + 1]`,
    /// which covers both header forms; cells past the header width get an
    /// empty column key.
    pub fn to_entries(&self) -> EntrySet {
        self.rows
            .iter()
            .flat_map(|row| {
                row.cells.iter().enumerate().map(move |(j, cell)| Entry {
                    row_key: row.row_header.clone(),
                    col_key: self.header.get(j + 1).cloned().unwrap_or_default(),
                    value: cell.clone(),
                })
            })
            .collect()
    }

    pub fn to_numbers(&self) -> NumberSet {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().filter_map(CellValue::as_f64))
            .collect::<Vec<_>>()
            .into()
    }

    /// Swaps the roles of row headers and column headers. `header[0]` and the
    /// title stay in place.
    pub fn transpose(&self) -> Result<LinearizedTable, TableError> {
        if self.header.len() < 2 || !self.is_rectangular() {
            return Err(TableError::NotRectangular);
        }
        let mut header = Vec::with_capacity(self.rows.len() + 1);
        header.push(self.header[0].clone());
        header.extend(self.rows.iter().map(|r| r.row_header.clone()));
        let rows = self.header[1..]
            .iter()
            .enumerate()
            .map(|(j, name)| {
                DataRow::new(
                    name.clone(),
                    self.rows.iter().map(|r| r.cells[j].clone()).collect(),
                )
            })
            .collect();
        Ok(LinearizedTable {
            title: self.title.clone(),
            header,
            rows,
        })
    }
}

/// Trims and collapses internal whitespace runs to a single space.
pub fn canonical_cell(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}
