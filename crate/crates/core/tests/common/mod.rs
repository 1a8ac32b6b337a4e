//! Independent brute-force scorers used as oracles by the integration tests.
#![allow(dead_code)]

use chartab::table::{CellValue, Entry};

/// Full-matrix Levenshtein distance over chars.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in dp.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in dp[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = dp[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            dp[i][j] = sub.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
        }
    }
    dp[a.len()][b.len()]
}

pub fn nl(a: &str, b: &str, tau: f64) -> f64 {
    let len = a.chars().count().max(b.chars().count());
    if len == 0 {
        return 0.0;
    }
    let d = edit_distance(a, b) as f64 / len as f64;
    if d > tau { 1.0 } else { d }
}

pub fn rel(p: f64, t: f64, theta: f64) -> f64 {
    let d = if t == 0.0 {
        if p == 0.0 { 0.0 } else { 1.0 }
    } else {
        ((p - t) / t).abs().min(1.0)
    };
    if d > theta { 1.0 } else { d }
}

fn value_text(v: &CellValue) -> &str {
    match v {
        CellValue::Numeric { raw, .. } => raw,
        CellValue::Textual { raw } => raw,
    }
}

fn value_num(v: &CellValue) -> Option<f64> {
    match v {
        CellValue::Numeric { value, .. } => Some(*value),
        CellValue::Textual { .. } => None,
    }
}

pub fn similarity(p: &Entry, t: &Entry, tau: f64, theta: f64, swap_pred: bool) -> f64 {
    let pk = if swap_pred {
        format!("{} {}", p.col_key, p.row_key)
    } else {
        format!("{} {}", p.row_key, p.col_key)
    };
    let tk = format!("{} {}", t.row_key, t.col_key);
    let key = 1.0 - nl(&pk, &tk, tau);
    let val = match (value_num(&p.value), value_num(&t.value)) {
        (Some(a), Some(b)) => rel(a, b, theta),
        _ => nl(value_text(&p.value), value_text(&t.value), tau),
    };
    key * (1.0 - val)
}

/// Every injective map from `0..n` into `0..m` (requires n <= m).
pub fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(n, m, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Best total of `w[i][j]` over all maximal injective matchings; `maximize`
/// picks the direction.
pub fn best_matching(w: &[Vec<f64>], n: usize, m: usize, maximize: bool) -> f64 {
    let (small, large, flip) = if n <= m { (n, m, false) } else { (m, n, true) };
    let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for inj in injections(small, large) {
        let total: f64 = inj
            .iter()
            .enumerate()
            .map(|(i, &j)| if flip { w[j][i] } else { w[i][j] })
            .sum();
        best = if maximize { best.max(total) } else { best.min(total) };
    }
    best
}

pub fn rnss_oracle(pred: &[f64], target: &[f64]) -> f64 {
    let (n, m) = (pred.len(), target.len());
    if n == 0 || m == 0 {
        return if n == m { 1.0 } else { 0.0 };
    }
    let w: Vec<Vec<f64>> = pred.iter().map(|&p| target.iter().map(|&t| rel(p, t, 1.0)).collect()).collect();
    1.0 - best_matching(&w, n, m, false) / n.max(m) as f64
}

/// (precision, recall, f1).
pub fn rms_oracle(pred: &[Entry], target: &[Entry], tau: f64, theta: f64, transpose: bool) -> (f64, f64, f64) {
    let oriented = |swap: bool| {
        let (n, m) = (pred.len(), target.len());
        if n == 0 || m == 0 {
            let v = if n == m { 1.0 } else { 0.0 };
            return (v, v, v);
        }
        let w: Vec<Vec<f64>> = pred
            .iter()
            .map(|p| target.iter().map(|t| similarity(p, t, tau, theta, swap)).collect())
            .collect();
        let s = best_matching(&w, n, m, true);
        let (p, r) = (s / n as f64, s / m as f64);
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        (p, r, f)
    };
    let direct = oriented(false);
    if !transpose {
        return direct;
    }
    let swapped = oriented(true);
    if swapped.2 > direct.2 { swapped } else { direct }
}
