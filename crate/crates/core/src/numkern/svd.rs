//! One-sided (Hestenes) Jacobi singular value decomposition.
//!
//! Singular values come out with absolute accuracy of order `ε·‖A‖`, which
//! is what every rank decision in the crate relies on.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 64;

/// Thin SVD `A = U·diag(σ)·Vᵀ` with `σ` descending.
///
/// For an `m × k` input, `u` is `m × r`, `v` is `k × r` with `r = min(m, k)`
/// when `m < k`; when `m ≥ k`, `v` is the full `k × k` orthogonal factor.
/// Columns of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(a: &DMatrix<f64>) -> Svd {
    if a.nrows() >= a.ncols() {
        hestenes(a)
    } else {
        let t = hestenes(&a.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

fn hestenes(a: &DMatrix<f64>) -> Svd {
    let (m, k) = a.shape();
    // column-major columns of the working matrix
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j).iter().copied().collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for i in 0..m {
                        al += cp[i] * cp[i];
                        be += cq[i] * cq[i];
                        ga += cp[i] * cq[i];
                    }
                    (al, be, ga)
                };
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let mut u = DMatrix::zeros(m, k);
    let mut vm = DMatrix::zeros(k, k);
    let mut sigma = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma[dst] = s;
        if s > 0.0 {
            for i in 0..m {
                u[(i, dst)] = cols[src][i] / s;
            }
        }
        for i in 0..k {
            vm[(i, dst)] = v[src][i];
        }
    }
    Svd { u, sigma, v: vm }
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    svd(a).sigma.iter().fold(0.0_f64, |acc, s| acc.max(*s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reconstructs_tall_and_wide() {
        let a = DMatrix::from_row_slice(4, 3, &[
            1.0, 2.0, 0.5, //
            -1.0, 0.0, 3.0, //
            0.25, 4.0, -2.0, //
            2.0, -1.0, 1.0,
        ]);
        for m in [a.clone(), a.transpose()] {
            let d = svd(&m);
            let r = &d.u * DMatrix::from_diagonal(&d.sigma) * d.v.transpose();
            assert_abs_diff_eq!((r - &m).norm(), 0.0, epsilon = 1e-12);
            assert!(d.sigma.as_slice().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_has_tiny_singular_value() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let d = svd(&a);
        assert!(d.sigma[1] < 1e-14);
        assert_abs_diff_eq!(d.sigma[0], (5.0_f64 * 14.0).sqrt(), epsilon = 1e-12);
    }
}
