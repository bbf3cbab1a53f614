//! Dense linear algebra over either backend, plus SVD rank for floats.

use crate::scalar::Scalar;

/// Reduced row echelon form. Returns the reduced rows and the pivot columns.
pub fn rref<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let pick = if S::EXACT {
            (r..a.len()).find(|&i| !a[i][c].is_zero())
        } else {
            (r..a.len())
                .filter(|&i| !a[i][c].approx_zero())
                .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
        };
        let Some(p) = pick else { continue };
        a.swap(r, p);
        let inv = S::one() / a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            if !S::EXACT {
                row[c] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Some solution of `A x = b` (free variables set to zero), if consistent.
pub fn solve_any<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> Option<Vec<S>> {
    let aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    if !S::EXACT {
        // a row reduced to (0 .. 0 | c) with tiny coefficients but sizeable c is inconsistent
        for row in red.iter().skip(pivots.len()) {
            if !row[ncols].approx_zero() {
                return None;
            }
        }
    }
    let mut x = vec![S::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = red[r][ncols].clone();
    }
    Some(x)
}

/// The unique solution of `A x = b`, or `None` if singular or inconsistent.
pub fn solve_unique<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> Option<Vec<S>> {
    if rank(a, ncols) < ncols {
        return None;
    }
    solve_any(a, b, ncols)
}

/// Basis of the right null space `{x : A x = 0}`.
pub fn nullspace<S: Scalar>(a: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let (red, pivots) = rref(a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -red[r][f].clone();
            }
            v
        })
        .collect()
}

/// Numerical rank: singular values above `1e-9` times the largest.
pub fn svd_rank(rows: &[Vec<f64>], ncols: usize) -> usize {
    if rows.is_empty() || ncols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * max).count()
}
