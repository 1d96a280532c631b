//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::{DMatrix, DVector};

use super::SymMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Documented constant `c` in the reconstruction bound
/// `‖m − V·Λ·Vᵀ‖₂ ≤ c · n · ε · ‖m‖₂`.
pub const RECONSTRUCTION_CONSTANT: f64 = 8.0;

/// Eigen-decomposition of a symmetric matrix.
///
/// `values` are ascending and column `k` of `vectors` is the unit
/// eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigh {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ordered `(eigenvalue, eigenvector)` pairs.
    pub fn pairs(&self) -> Vec<(f64, DVector<f64>)> {
        (0..self.len())
            .map(|k| (self.values[k], self.vectors.column(k).into_owned()))
            .collect()
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
pub fn eigh(m: &SymMatrix) -> Result<Eigh> {
    let a = m.matrix();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigh input"));
    }
    Ok(jacobi(a))
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &SymMatrix) -> Result<DVector<f64>> {
    eigh(m).map(|e| e.values)
}

pub(crate) fn jacobi(input: &DMatrix<f64>) -> Eigh {
    let n = input.nrows();
    // row-major working copy
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (input[(i, j)] + input[(j, i)]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob > 0.0 {
        let stop = (0.25 * f64::EPSILON * frob).powi(2);
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&k| a[k * n + k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[row * n + k];
        }
    }
    Eigh { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_case_is_sorted() {
        let m = SymMatrix::from_diagonal(&[2.0, -1.0]);
        let e = eigh(&m).unwrap();
        assert_eq!(e.values.as_slice(), &[-1.0, 2.0]);
        assert_abs_diff_eq!(e.vectors[(1, 0)].abs(), 1.0);
    }

    #[test]
    fn zero_matrix() {
        let e = eigh(&SymMatrix::zeros(3)).unwrap();
        assert_eq!(e.values.as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(e.vectors, DMatrix::identity(3, 3));
    }

    #[test]
    fn empty_matrix() {
        let e = eigh(&SymMatrix::zeros(0)).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn rejects_nan() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(
            SymMatrix::new(m),
            Err(Error::NonFinite(_))
        ));
    }

    // Golden values for a fixed 6×6 instance, frozen from numpy.linalg.eigvalsh
    // (LAPACK dsyevd) on the same entries.
    #[test]
    fn matches_reference_solver_on_fixed_instance() {
        #[rustfmt::skip]
        let data = [
            0.49671415, -0.1382643,  0.64768854,  1.52302986, -0.23415337, -0.23413696,
           -0.1382643,   1.57921282,  0.76743473, -0.46947439,  0.54256004, -0.46341769,
            0.64768854,  0.76743473, -0.46572975, -1.91328024, -1.72491783, -0.56228753,
            1.52302986, -0.46947439, -1.91328024, -1.01283112,  0.31424733, -0.90802408,
           -0.23415337,  0.54256004, -1.72491783,  0.31424733, -1.4123037,   1.46564877,
           -0.23413696, -0.46341769, -0.56228753, -0.90802408,  1.46564877, -0.2257763,
        ];
        let m = SymMatrix::new(DMatrix::from_row_slice(6, 6, &data)).unwrap();
        let e = eigh(&m).unwrap();
        let golden = [
            -3.668_779_329_416_021,
            -3.042_440_500_548_685_6,
            -0.032_236_382_308_469_18,
            1.238_104_982_251_764_5,
            1.891_771_762_322_614_7,
            2.572_865_567_698_796_6,
        ];
        for (got, want) in e.values.iter().zip(golden.iter()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-10);
        }
    }
}
