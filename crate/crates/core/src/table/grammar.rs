use super::{canonical_cell, CellValue, DataRow, LinearizedTable, TableError};

/// Literal row terminator used in linearized tables.
pub const ROW_TOKEN: &str = "<0x0A>";
const TITLE_KEY: &str = "TITLE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Rows must be rectangular and row headers non-empty.
    #[default]
    Strict,
    /// Accepts ragged rows (padded to the widest row) and single-row
    /// `category | value | category | value ...` streams under a two-cell
    /// header, which are refolded into one row per pair.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    /// Treat a real line feed as a row terminator in addition to `<0x0A>`.
    pub accept_linefeed: bool,
}

impl ParseOptions {
    pub fn strict() -> Self {
        Self {
            mode: ParseMode::Strict,
            accept_linefeed: false,
        }
    }

    pub fn lenient() -> Self {
        Self {
            mode: ParseMode::Lenient,
            accept_linefeed: true,
        }
    }
}

impl From<ParseMode> for ParseOptions {
    fn from(mode: ParseMode) -> Self {
        match mode {
            ParseMode::Strict => Self::strict(),
            ParseMode::Lenient => Self::lenient(),
        }
    }
}

pub fn parse_linearized(text: &str, mode: ParseMode) -> Result<LinearizedTable, TableError> {
    parse_with(text, &mode.into())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<LinearizedTable, TableError> {
    if text.trim().is_empty() {
        return Err(TableError::EmptyInput);
    }
    let lenient = opts.mode == ParseMode::Lenient;
    let normalized;
    let text = if opts.accept_linefeed {
        normalized = text.replace("\r\n", ROW_TOKEN).replace('\n', ROW_TOKEN);
        normalized.as_str()
    } else {
        text
    };

    let mut rows = text
        .split(ROW_TOKEN)
        .enumerate()
        .map(|(i, row)| (i, row.split('|').map(canonical_cell).collect::<Vec<_>>()))
        .filter(|(_, cells)| cells.iter().any(|c| !c.is_empty()))
        .peekable();

    let mut title = None;
    if let Some((_, first)) = rows.peek() {
        let is_title = if lenient {
            first[0].eq_ignore_ascii_case(TITLE_KEY)
        } else {
            first[0] == TITLE_KEY
        };
        if is_title {
            let value = canonical_cell(&first[1..].join(" | "));
            title = (!value.is_empty()).then_some(value);
            rows.next();
        }
    }

    let (_, header) = rows.next().ok_or(TableError::MissingHeader)?;

    let mut data: Vec<DataRow> = Vec::new();
    for (index, cells) in rows {
        if lenient {
            if header.len() == 2 && is_pair_stream(&cells) {
                for pair in cells.chunks(2) {
                    data.push(DataRow::new(
                        pair[0].clone(),
                        vec![CellValue::from_raw(pair[1].clone())],
                    ));
                }
                continue;
            }
        } else {
            if cells.len() != header.len() {
                return Err(TableError::RaggedRow(index));
            }
            if cells[0].is_empty() {
                return Err(TableError::EmptyRowHeader(index));
            }
        }
        let mut cells = cells.into_iter();
        let row_header = cells.next().unwrap_or_default();
        data.push(DataRow::new(row_header, cells.map(CellValue::from_raw).collect()));
    }

    let mut header = header;
    if lenient {
        let width = data
            .iter()
            .map(|r| r.cells.len() + 1)
            .chain(std::iter::once(header.len()))
            .max()
            .unwrap_or(1);
        header.resize(width, String::new());
        for row in &mut data {
            row.cells.resize(width - 1, CellValue::Textual { raw: String::new() });
        }
    }

    Ok(LinearizedTable {
        title,
        header,
        rows: data,
    })
}

/// `label | number | label | number ...` with at least two pairs.
fn is_pair_stream(cells: &[String]) -> bool {
    cells.len() >= 4
        && cells.len().is_multiple_of(2)
        && cells
            .chunks(2)
            .all(|p| super::parse_number(&p[1]).is_some() && super::parse_number(&p[0]).is_none())
}

pub fn serialize(table: &LinearizedTable) -> String {
    let mut lines = Vec::with_capacity(table.rows.len() + 2);
    if let Some(title) = table.title.as_deref().filter(|t| !t.is_empty()) {
        lines.push(format!("{TITLE_KEY} | {title}"));
    }
    lines.push(table.header.join(" | "));
    for row in &table.rows {
        let mut line = row.row_header.clone();
        for cell in &row.cells {
            line.push_str(" | ");
            line.push_str(cell.raw());
        }
        lines.push(line);
    }
    lines.join(&format!(" {ROW_TOKEN} "))
}
