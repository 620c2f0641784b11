//! Small dense helpers.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Scales `v` to unit max-norm; `None` for the zero vector.
pub fn normalize_inf(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm_inf(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|x| x / n).collect())
}

/// Basis of `{d : rows d = 0}` by Gauss-Jordan elimination with partial
/// pivoting. Entries below `tol` times the largest row entry count as zero.
pub fn null_space(rows: &[&[f64]], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let scale = a.iter().map(|r| norm_inf(r)).fold(0.0, f64::max).max(1.0);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r == a.len() {
            break;
        }
        let (best, mag) = (r..a.len())
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if mag <= tol * scale {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        for i in 0..a.len() {
            if i != r {
                let factor = a[i][c];
                if factor != 0.0 {
                    for k in 0..dim {
                        a[i][k] -= factor * a[r][k];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    (0..dim)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![0.0; dim];
            v[free] = 1.0;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[row][free];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_single_row() {
        let basis = null_space(&[&[1.0, 1.0, 0.0]], 3, 1e-12);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(dot(v, &[1.0, 1.0, 0.0]).abs() < 1e-15);
        }
    }

    #[test]
    fn null_space_of_full_rank_is_empty() {
        assert!(null_space(&[&[1.0, 0.0], &[0.0, 2.0]], 2, 1e-12).is_empty());
    }

    #[test]
    fn rank_deficient_rows() {
        let basis = null_space(&[&[1.0, 2.0], &[2.0, 4.0]], 2, 1e-12);
        assert_eq!(basis.len(), 1);
        assert!(dot(&basis[0], &[1.0, 2.0]).abs() < 1e-15);
    }
}
