use std::sync::LazyLock;

use regex::Regex;

use super::QaError;

fn check_lengths(truth: &[f64], pred: &[f64]) -> Result<(), QaError> {
    if truth.len() != pred.len() {
        return Err(QaError::MismatchedLengths(truth.len(), pred.len()));
    }
    if truth.is_empty() {
        return Err(QaError::EmptyInput);
    }
    Ok(())
}

/// Mean absolute percentage error, in percent. Pairs whose truth is zero
/// are left out of both the sum and the count.
pub fn mape(truth: &[f64], pred: &[f64]) -> Result<f64, QaError> {
    check_lengths(truth, pred)?;
    let (sum, n) = truth
        .iter()
        .zip(pred)
        .filter(|(y, _)| **y != 0.0)
        .fold((0.0, 0usize), |(s, n), (y, p)| (s + (y - p).abs() / y.abs(), n + 1));
    if n == 0 {
        return Err(QaError::AllZeroTruth);
    }
    Ok(100.0 * sum / n as f64)
}

pub fn rmse(truth: &[f64], pred: &[f64]) -> Result<f64, QaError> {
    check_lengths(truth, pred)?;
    let sq: f64 = truth.iter().zip(pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok((sq / truth.len() as f64).sqrt())
}

/// Relative MAPE reduction from `mape_1` to `mape_2`, in percent.
pub fn relative_improvement(mape_1: f64, mape_2: f64) -> Result<f64, QaError> {
    if mape_1 == 0.0 {
        return Err(QaError::DivisionByZero);
    }
    Ok((mape_1 - mape_2) / mape_1 * 100.0)
}

/// Absolute difference of one metric between two configurations.
pub fn config_delta(metric_c1: f64, metric_c2: f64) -> f64 {
    (metric_c1 - metric_c2).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractMode {
    First,
    #[default]
    Last,
}

static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[-\u{2212}]?\d{1,3}(?:,\d{3})+(?:\.\d+)?|[-\u{2212}]?\d+(?:\.\d+)?").unwrap());

/// Pulls an integer answer out of free text.
///
/// Numeric tokens may carry a sign, thousands separators and a decimal part
/// (rounded half away from zero). A leading `-` glued to a preceding letter
/// or digit (`Q3-2024`) is read as a hyphen, not a sign.
pub fn extract_integer(response: &str, mode: ExtractMode) -> Option<i64> {
    let text = response.trim();
    let mut tokens = NUMBER.find_iter(text).filter_map(|m| {
        let mut token = m.as_str();
        let signed = token.starts_with(['-', '\u{2212}']);
        if signed {
            let glued = text[..m.start()]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_alphanumeric());
            let sign_len = token.chars().next().map_or(0, char::len_utf8);
            if glued {
                token = &token[sign_len..];
            }
        }
        let cleaned: String = token
            .chars()
            .filter(|c| *c != ',')
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .collect();
        let v: f64 = cleaned.parse().ok()?;
        let r = v.round();
        (r.abs() < 9.0e15).then_some(r as i64)
    });
    match mode {
        ExtractMode::First => tokens.next(),
        ExtractMode::Last => tokens.last(),
    }
}
