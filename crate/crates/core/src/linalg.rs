//! Small dense helpers for covariance factorisation.

use crate::error::{Error, Result};

/// Lower-triangular factor `L` (row-major, `n × n`) with `L Lᵀ = C`.
///
/// Positive *semi*definite matrices are accepted: pivots within
/// `tol · max diag` of zero produce a zero column. A clearly negative pivot
/// is reported as [`Error::NotPositiveSemidefinite`].
pub fn cholesky_psd(c: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(c.len(), n * n);
    let scale = (0..n).map(|i| c[i * n + i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = c[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d < -tol {
            return Err(Error::NotPositiveSemidefinite { pivot: j, value: d });
        }
        if d <= tol {
            // Degenerate direction: remaining entries in the column must vanish.
            for i in (j + 1)..n {
                let mut s = c[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if s.abs() > 1e-6 * scale.sqrt() * scale.sqrt() {
                    return Err(Error::NotPositiveSemidefinite { pivot: j, value: d });
                }
            }
            continue;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = c[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(l)
}

/// `L z` for a row-major lower-triangular `L`.
pub fn lower_mul(l: &[f64], z: &[f64]) -> Vec<f64> {
    let n = z.len();
    (0..n).map(|i| (0..=i).map(|k| l[i * n + k] * z[k]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_reproduces_matrix() {
        let c = [4.0, 2.0, 0.4, 2.0, 3.0, 0.5, 0.4, 0.5, 1.0];
        let l = cholesky_psd(&c, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((v - c[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn semidefinite_rank_one_is_accepted() {
        let c = [1.0, 1.0, 1.0, 1.0];
        let l = cholesky_psd(&c, 2).unwrap();
        assert_eq!(lower_mul(&l, &[0.7, -3.0]), vec![0.7, 0.7]);
    }

    #[test]
    fn indefinite_is_rejected() {
        let c = [1.0, 2.0, 2.0, 1.0];
        assert!(matches!(cholesky_psd(&c, 2), Err(Error::NotPositiveSemidefinite { .. })));
    }
}
