use crate::error::HgsError;

/// Solves the minimum-cost assignment problem on a square, finite,
/// non-negative cost matrix.
///
/// Returns `(assignment, total_cost)` where `assignment[row] = column`.
/// The total cost is the global minimum over all permutations. Among
/// optimal assignments (up to floating-point tolerance) the
/// lexicographically smallest one is returned, which pins down a
/// deterministic answer even on heavily tied matrices such as padded
/// cost matrices.
pub fn hungarian_min_cost(matrix: &[Vec<f64>]) -> Result<(Vec<usize>, f64), HgsError> {
    let n = matrix.len();
    for (row, cells) in matrix.iter().enumerate() {
        if cells.len() != n {
            return Err(HgsError::NotSquare {
                row,
                got: cells.len(),
                expected: n,
            });
        }
        for (col, &cell) in cells.iter().enumerate() {
            if !cell.is_finite() {
                return Err(HgsError::NotFinite { row, col });
            }
            if cell < 0.0 {
                return Err(HgsError::Negative { row, col });
            }
        }
    }
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }

    let (col_of_row, row_duals, col_duals) = solve_jv(matrix);

    // Tight edges under the optimal duals support every optimal
    // assignment (complementary slackness); refine to the
    // lexicographically smallest perfect matching among them.
    let scale = matrix
        .iter()
        .flatten()
        .fold(1.0f64, |acc, &c| acc.max(c.abs()));
    let tolerance = 1e-11 * scale;
    let mut tight = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] - row_duals[i] - col_duals[j] <= tolerance {
                tight[i].push(j);
            }
        }
    }

    let assignment = lexicographic_matching(n, &tight, col_of_row);
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| matrix[i][j])
        .sum();
    Ok((assignment, total))
}

/// Shortest-augmenting-path assignment (Jonker-Volgenant style), O(n^3).
/// Returns the matching and the row/column dual potentials.
fn solve_jv(matrix: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = matrix.len();
    // 1-indexed working arrays; index 0 is the virtual unassigned slot.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = matrix[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_to[j] {
                    min_to[j] = cur;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        if row_of_col[j] > 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    let row_duals: Vec<f64> = u[1..].to_vec();
    let col_duals: Vec<f64> = v[1..].to_vec();
    (col_of_row, row_duals, col_duals)
}

/// Greedy lexicographic refinement: processes rows in order and gives each
/// the smallest tight column that still leaves the remaining rows
/// perfectly matchable, checked by attempting to reroute the displaced row
/// along an alternating path.
fn lexicographic_matching(
    n: usize,
    tight: &[Vec<usize>],
    initial: Vec<usize>,
) -> Vec<usize> {
    let mut row_to_col: Vec<usize> = initial;
    let mut col_to_row = vec![usize::MAX; n];
    for (row, &col) in row_to_col.iter().enumerate() {
        col_to_row[col] = row;
    }
    let mut fixed = vec![false; n];

    for i in 0..n {
        let current = row_to_col[i];
        for &j in &tight[i] {
            if fixed[j] {
                continue;
            }
            if j == current {
                break;
            }
            let displaced = col_to_row[j];
            debug_assert_ne!(displaced, usize::MAX, "perfect matching invariant");

            // Tentatively give column j to row i; its old column becomes
            // free and the displaced row must be rerouted through tight
            // edges that avoid already-fixed columns (j included).
            col_to_row[j] = i;
            row_to_col[i] = j;
            col_to_row[current] = usize::MAX;
            fixed[j] = true;
            let mut visited = vec![false; n];
            let rerouted = augment(displaced, tight, &fixed, &mut visited, &mut row_to_col, &mut col_to_row);
            if rerouted {
                break;
            }
            fixed[j] = false;
            col_to_row[current] = i;
            row_to_col[i] = current;
            col_to_row[j] = displaced;
            row_to_col[displaced] = j;
        }
        fixed[row_to_col[i]] = true;
    }
    row_to_col
}

fn augment(
    row: usize,
    tight: &[Vec<usize>],
    fixed: &[bool],
    visited: &mut [bool],
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
) -> bool {
    for &col in &tight[row] {
        if fixed[col] || visited[col] {
            continue;
        }
        visited[col] = true;
        let occupant = col_to_row[col];
        if occupant == usize::MAX
            || augment(occupant, tight, fixed, visited, row_to_col, col_to_row)
        {
            col_to_row[col] = row;
            row_to_col[row] = col;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let (assignment, cost) = hungarian_min_cost(&[vec![0.0]]).unwrap();
        assert_eq!(assignment, vec![0]);
        assert_eq!(cost, 0.0);

        let (_, cost) = hungarian_min_cost(&[vec![5.0]]).unwrap();
        assert_eq!(cost, 5.0);
    }

    #[test]
    fn anti_diagonal_zeros() {
        let (assignment, cost) =
            hungarian_min_cost(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(assignment, vec![1, 0]);
        assert!(cost.abs() < 1e-12);
    }

    #[test]
    fn ties_resolve_to_lexicographically_smallest() {
        let (assignment, cost) =
            hungarian_min_cost(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(assignment, vec![0, 1]);
        assert!((cost - 2.0).abs() < 1e-12);

        // Three optima on this one; smallest is [0, 1, 2].
        let all_same = vec![vec![0.5; 3], vec![0.5; 3], vec![0.5; 3]];
        let (assignment, _) = hungarian_min_cost(&all_same).unwrap();
        assert_eq!(assignment, vec![0, 1, 2]);
    }

    #[test]
    fn lexicographic_choice_never_sacrifices_optimality() {
        // Row 0 would prefer column 0 lexicographically, but taking it
        // forces total cost 2; the optimum routes row 0 to column 1.
        let matrix = vec![vec![0.0, 0.0], vec![0.0, 2.0]];
        let (assignment, cost) = hungarian_min_cost(&matrix).unwrap();
        assert_eq!(assignment, vec![1, 0]);
        assert!(cost.abs() < 1e-12);
    }

    #[test]
    fn classic_three_by_three() {
        let matrix = vec![
            vec![8.0, 5.0, 9.0],
            vec![4.0, 2.0, 4.0],
            vec![7.0, 3.0, 8.0],
        ];
        let (assignment, cost) = hungarian_min_cost(&matrix).unwrap();
        assert_eq!(cost, 15.0);
        assert_eq!(assignment, vec![0, 2, 1]);
    }

    #[test]
    fn empty_matrix_is_trivial() {
        let (assignment, cost) = hungarian_min_cost(&[]).unwrap();
        assert!(assignment.is_empty());
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            hungarian_min_cost(&[vec![1.0, 2.0], vec![1.0]]),
            Err(HgsError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            hungarian_min_cost(&[vec![f64::NAN]]),
            Err(HgsError::NotFinite { .. })
        ));
        assert!(matches!(
            hungarian_min_cost(&[vec![f64::INFINITY]]),
            Err(HgsError::NotFinite { .. })
        ));
        assert!(matches!(
            hungarian_min_cost(&[vec![-0.1]]),
            Err(HgsError::Negative { .. })
        ));
    }
}
