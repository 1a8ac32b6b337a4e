/// Relative numeric distance `min(1, |p - t| / |t|)`.
///
/// A zero target scores 0 against an exact zero and 1 otherwise. Distances
/// above `theta` lose all partial credit and become 1.
pub fn relative_distance(p: f64, t: f64, theta: f64) -> f64 {
    let d = if t == 0.0 {
        if p == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        ((p - t).abs() / t.abs()).min(1.0)
    };
    if d > theta {
        1.0
    } else {
        d
    }
}

/// Edit distance with unit insert/delete/substitute costs over Unicode
/// scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let next = (diag + usize::from(ca != cb))
                .min(row[j] + 1)
                .min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Levenshtein distance divided by the longer length, clamped to 1 when it
/// exceeds `tau`.
pub fn normalized_levenshtein(a: &str, b: &str, tau: f64) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    let d = levenshtein(a, b) as f64 / longest as f64;
    if d > tau {
        1.0
    } else {
        d
    }
}
