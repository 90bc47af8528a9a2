//! Rectangular assignment via the Hungarian method with row/column potentials.

/// Minimum-cost assignment of every row to a distinct column.
///
/// Requires `rows <= cols`. Returns the column chosen for each row.
/// Runs in `O(rows² · cols)`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs at least as many columns as rows");
    assert!(cost.iter().all(|row| row.len() == m), "ragged cost matrix");

    // 1-based arrays; index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut min_slack = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=m {
                if used[col] {
                    continue;
                }
                let reduced = cost[r0 - 1][col - 1] - u[r0] - v[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=m {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0; n];
    for col in 1..=m {
        if owner[col] != 0 {
            assignment[owner[col] - 1] = col - 1;
        }
    }
    assignment
}

/// Maximum-weight matching where `weights[r][c] = None` forbids the pair.
///
/// Rows may stay unmatched. Returns the matched column per row.
pub fn max_weight_matching(weights: &[Vec<Option<f64>>]) -> Vec<Option<usize>> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let m = weights[0].len();
    let max_abs = weights.iter().flatten().flatten().fold(0.0f64, |acc, w| acc.max(w.abs()));
    // Forbidden pairs cost more than any feasible assignment could save.
    let forbidden = 1.0 + 2.0 * max_abs * n as f64;
    // One private "unmatched" column per row at zero cost.
    let cost: Vec<Vec<f64>> = weights
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut c: Vec<f64> = row.iter().map(|w| w.map_or(forbidden, |w| -w)).collect();
            c.extend((0..n).map(|d| if d == r { 0.0 } else { forbidden }));
            c
        })
        .collect();
    min_cost_assignment(&cost)
        .into_iter()
        .enumerate()
        .map(|(r, col)| (col < m && weights[r][col].is_some()).then_some(col))
        .collect()
}
