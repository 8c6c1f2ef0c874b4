//! Small dense helpers over `Vec` rows.

use alloc::vec;
use alloc::vec::Vec;

use crate::jet::Scalar;

pub(crate) type Matrix<T> = Vec<Vec<T>>;

/// Cholesky factorisation succeeds, i.e. `m` is symmetric positive definite.
pub(crate) fn is_positive_definite(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Gauss-Jordan inverse with partial pivoting on values. The result is
/// symmetrised by mirroring its upper triangle, so only call this on
/// symmetric input.
pub(crate) fn invert_symmetric<T: Scalar>(m: &[Vec<T>]) -> Option<Matrix<T>> {
    let n = m.len();
    let mut a: Matrix<T> = m.to_vec();
    let mut inv: Matrix<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| T::constant(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            a[r][col]
                .value()
                .abs()
                .partial_cmp(&a[s][col].value().abs())
                .unwrap_or(core::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].value().abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                a[r][j] = a[r][j] - f * a[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            inv[i][j] = inv[j][i];
        }
    }
    Some(inv)
}

pub(crate) fn axpy(out: &mut [f64], k: f64, v: &[f64]) {
    for (o, x) in out.iter_mut().zip(v) {
        *o += k * x;
    }
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn scaled(k: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| k * x).collect()
}

/// Euclidean norm of chart components.
pub(crate) fn euclid(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&[vec![2.0, 1.0], vec![1.0, 2.0]]));
        assert!(!is_positive_definite(&[vec![0.0, 0.0], vec![0.0, 1.0]]));
        assert!(!is_positive_definite(&[vec![1.0, 2.0], vec![2.0, 1.0]]));
    }

    #[test]
    fn inverse_of_jet_matrix() {
        let x = [0.5, 2.0];
        let a = Jet2::seed(&x, 0).unwrap();
        let b = Jet2::seed(&x, 1).unwrap();
        let one = Jet2::constant(1.0);
        // [[1+a^2, a], [a, b]]
        let m = vec![vec![one + a * a, a], vec![a, b]];
        let inv = invert_symmetric(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Jet2::constant(0.0);
                for k in 0..2 {
                    s = s + m[i][k] * inv[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((s.value - target).abs() < 1e-14);
                assert!(s.grad.iter().all(|g| g.abs() < 1e-13));
                assert!(s.hess.iter().flatten().all(|h| h.abs() < 1e-12));
            }
        }
    }
}
