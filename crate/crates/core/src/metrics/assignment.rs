use serde::{Deserialize, Serialize};

/// A matching between prediction indices and target indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `(pred_index, target_index)`, sorted by `pred_index`.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// Minimum-cost assignment on a rectangular `N x M` cost matrix.
///
/// The matrix is padded to square with zero-cost dummy rows or columns and
/// solved with the Hungarian method (shortest augmenting paths with dual
/// potentials, `O(n^3)`); pairs touching a dummy are dropped, leaving
/// `min(N, M)` pairs. `total_cost` is re-summed from the input matrix in
/// `pred_index` order.
///
/// Costs must be finite and non-negative. Rows must all have the same length.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Assignment {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Assignment::default();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols));
    let n = rows.max(cols);
    let at = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            cost[i][j]
        } else {
            0.0
        }
    };

    // 1-based: u/v are row/column potentials, matched_row[j] is the row
    // currently assigned to column j (0 = free), column 0 is the virtual root.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Flip the augmenting path back to the root.
        loop {
            let prev = way[j0];
            matched_row[j0] = matched_row[prev];
            j0 = prev;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .filter_map(|j| {
            let i = matched_row[j];
            (i >= 1 && i <= rows && j <= cols).then(|| (i - 1, j - 1))
        })
        .collect();
    pairs.sort_unstable();
    let total_cost = pairs.iter().map(|&(i, j)| cost[i][j]).sum();
    Assignment { pairs, total_cost }
}


#[cfg(test)]
mod tests {
    use super::oracle::brute_force_min;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn is_matching(a: &Assignment, rows: usize, cols: usize) -> bool {
        let mut seen_r = vec![false; rows];
        let mut seen_c = vec![false; cols];
        a.pairs.len() == rows.min(cols)
            && a.pairs.iter().all(|&(i, j)| {
                let fresh = !seen_r[i] && !seen_c[j];
                seen_r[i] = true;
                seen_c[j] = true;
                fresh
            })
    }

    #[test]
    fn single_cell() {
        let a = min_cost_assignment(&[vec![0.0]]);
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.total_cost, 0.0);
    }

    #[test]
    fn anti_diagonal() {
        let a = min_cost_assignment(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(a.total_cost, 0.0);
    }

    #[test]
    fn empty_sides() {
        assert_eq!(min_cost_assignment(&[]), Assignment::default());
        assert_eq!(min_cost_assignment(&[vec![], vec![]]), Assignment::default());
    }

    #[test]
    fn rectangular_drops_dummies() {
        let wide = min_cost_assignment(&[vec![5.0, 1.0, 3.0]]);
        assert_eq!(wide.pairs, vec![(0, 1)]);
        assert_eq!(wide.total_cost, 1.0);
        let tall = min_cost_assignment(&[vec![5.0], vec![1.0], vec![3.0]]);
        assert_eq!(tall.pairs, vec![(1, 0)]);
        assert_eq!(tall.total_cost, 1.0);
    }

    #[test]
    fn random_4x4_matches_all_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let cost: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..4).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let a = min_cost_assignment(&cost);
            assert!(is_matching(&a, 4, 4));
            assert!((a.total_cost - brute_force_min(&cost)).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic() {
        let cost = vec![vec![0.5; 3]; 3];
        assert_eq!(min_cost_assignment(&cost), min_cost_assignment(&cost));
    }

    proptest! {
        #[test]
        fn optimal_on_rectangles(
            rows in 1usize..=5,
            cols in 1usize..=5,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cost: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(0.0..10.0)).collect())
                .collect();
            let a = min_cost_assignment(&cost);
            prop_assert!(is_matching(&a, rows, cols));
            prop_assert!((a.total_cost - brute_force_min(&cost)).abs() < 1e-9);
        }
    }
}
