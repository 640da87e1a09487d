//! Dense linear systems over any [`Scalar`], by Gauss–Jordan elimination.

use crate::scalar::Scalar;

/// One solution of `A x = b`, with free variables set to zero, or `None`
/// when the system is inconsistent. Exact types pivot on the first nonzero
/// entry; others on the largest.
pub fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let candidates = (r..rows).filter(|&i| !a[i][col].approx_zero());
        let pivot = if T::is_exact() {
            candidates.into_iter().next()
        } else {
            candidates.max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("comparable"))
        };
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = T::one() / a[r][col].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        b[r] = b[r].clone() * inv;
        for i in 0..rows {
            if i == r || a[i][col].approx_zero() {
                continue;
            }
            let factor = a[i][col].clone();
            for j in 0..cols {
                let delta = factor.clone() * a[r][j].clone();
                a[i][j] = a[i][j].clone() - delta;
            }
            b[i] = b[i].clone() - factor * b[r].clone();
        }
        pivots.push((r, col));
        r += 1;
    }
    if b[r..].iter().any(|v| !v.approx_zero()) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (row, col) in pivots {
        x[col] = b[row].clone();
    }
    Some(x)
}
