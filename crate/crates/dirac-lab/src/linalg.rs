//! Minimal dense linear algebra for the small systems that show up here
//! (fiber dimensions up to 6, desk-scale Gram matrices).

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` if the matrix is numerically singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, max) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if max == 0.0 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

/// Numerical rank by row elimination with a relative pivot threshold.
pub fn rank(a: &[Vec<f64>], rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let rows = a.len();
    let cols = a[0].len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let tol = rel_tol * scale;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let (piv, max) = (row..rows)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if max <= tol {
            continue;
        }
        m.swap(row, piv);
        for r in row + 1..rows {
            let f = m[r][col] / m[row][col];
            for c in col..cols {
                m[r][c] -= f * m[row][c];
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_rank() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
        assert_eq!(rank(&a, 1e-10), 2);
        let s = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(rank(&s, 1e-10), 1);
        assert!(solve(&s, &[1.0, 1.0]).is_none());
    }
}
