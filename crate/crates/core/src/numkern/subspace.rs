use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use super::eigen::jacobi;
use super::svd::svd;
use super::{check_finite, TolerancePolicy};
use crate::error::{Error, Result};

/// A linear subspace of `R^n`, held as an orthonormal frame.
///
/// The frame is `ambient_dim × dim`; a zero-column frame is the trivial
/// subspace and is accepted everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a frame whose columns are already orthonormal to working precision.
    pub(crate) fn from_frame_unchecked(frame: DMatrix<f64>) -> Self {
        Self { frame }
    }

    /// Wraps `frame` after checking `frameᵀ·frame = I` within `angle_tol`.
    pub fn from_orthonormal(frame: DMatrix<f64>, policy: &TolerancePolicy) -> Result<Self> {
        check_finite(&frame, "subspace frame")?;
        let d = frame.ncols();
        if d > frame.nrows() {
            return Err(Error::domain("frame has more columns than rows"));
        }
        let gram = frame.transpose() * &frame - DMatrix::<f64>::identity(d, d);
        if gram.amax() > policy.angle_tol {
            return Err(Error::domain(format!(
                "frame is not orthonormal (residual {:.3e})",
                gram.amax()
            )));
        }
        Ok(Self { frame })
    }

    /// Span of the columns of `vectors`; rank decided by `policy`.
    pub fn span(vectors: &DMatrix<f64>, policy: &TolerancePolicy) -> Result<Self> {
        column_space(vectors, policy)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            frame: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            frame: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the standard basis vectors `e_i`, `i ∈ indices` (0-based).
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut frame = DMatrix::zeros(ambient_dim, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            frame[(i, col)] = 1.0;
        }
        Self { frame }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Orthogonal projector `F·Fᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.frame * self.frame.transpose()
    }

    /// Coordinates of `other`'s frame in this frame: `Fᵀ·G`.
    pub fn coords_of(&self, other: &Subspace) -> DMatrix<f64> {
        self.frame.transpose() * other.frame()
    }

    /// Maps frame coordinates back to ambient vectors.
    pub fn embed(&self, coords: &DMatrix<f64>) -> DMatrix<f64> {
        &self.frame * coords
    }

    /// Image of a subspace given in this frame's coordinates.
    pub fn embed_subspace(&self, inner: &Subspace) -> Subspace {
        Subspace::from_frame_unchecked(&self.frame * inner.frame())
    }

    /// Distance of `x` from the subspace.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        (x - &self.frame * (self.frame.transpose() * x)).norm()
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::domain(format!(
                "ambient dimensions differ ({} vs {})",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }
}

/// Modified Gram–Schmidt, applied twice. Columns are assumed independent.
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    let k = q.ncols();
    for _ in 0..2 {
        for j in 0..k {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let ci = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &ci, 1.0);
            }
            let n = q.column(j).norm();
            if n > 0.0 {
                q.column_mut(j).unscale_mut(n);
            }
        }
    }
    q
}

/// Orthonormal frame for the column span of `m`; rank counts singular
/// values above `rank_tol·‖m‖`.
pub fn column_space(m: &DMatrix<f64>, policy: &TolerancePolicy) -> Result<Subspace> {
    check_finite(m, "column_space input")?;
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return Ok(Subspace::zero(n));
    }
    let d = svd(m);
    let norm = d.sigma[0];
    if norm == 0.0 {
        return Ok(Subspace::zero(n));
    }
    let thr = policy.threshold(norm);
    let r = d.sigma.iter().take_while(|&&s| s > thr).count();
    Ok(Subspace::from_frame_unchecked(orthonormalize(
        &d.u.columns(0, r).into_owned(),
    )))
}

/// Orthonormal frame for `{x : ‖m·x‖ ≤ rank_tol·‖m‖·‖x‖}`.
pub fn kernel(m: &DMatrix<f64>, policy: &TolerancePolicy) -> Result<Subspace> {
    check_finite(m, "kernel input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Subspace::full(m.ncols()));
    }
    let norm = super::svd::spectral_norm(m);
    kernel_abs(m, policy.threshold(norm))
}

/// Kernel with an absolute singular-value threshold.
pub fn kernel_abs(m: &DMatrix<f64>, threshold: f64) -> Result<Subspace> {
    check_finite(m, "kernel input")?;
    let c = m.ncols();
    if m.nrows() == 0 || c == 0 {
        return Ok(Subspace::full(c));
    }
    let d = svd(m);
    let keep = d.sigma.iter().take_while(|&&s| s > threshold).count();
    if m.nrows() >= c {
        // v is the full c×c factor: trailing columns span the kernel
        let f = d.v.columns(keep, c - keep).into_owned();
        Ok(Subspace::from_frame_unchecked(orthonormalize(&f)))
    } else {
        let row_space = Subspace::from_frame_unchecked(orthonormalize(
            &d.v.columns(0, keep).into_owned(),
        ));
        Ok(complement(&row_space))
    }
}

/// Euclidean orthogonal complement.
pub fn complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim();
    let d = s.dim();
    if d == 0 {
        return Subspace::full(n);
    }
    if d == n {
        return Subspace::zero(n);
    }
    let p = DMatrix::<f64>::identity(n, n) - s.projector();
    let e = jacobi(&p);
    // eigenvalues of an orthogonal projector are 0 (d times) and 1 (n − d times)
    Subspace::from_frame_unchecked(e.vectors.columns(d, n - d).into_owned())
}

/// Residual `F_b − F_a·(F_aᵀ·F_b)` and its SVD; singular values are the
/// sines of the principal angles between `a` and `b` (for `dim b ≤ dim a`;
/// any excess directions show up as ones).
fn residual_split(a: &Subspace, b: &Subspace) -> super::svd::Svd {
    let fa = a.frame();
    let fb = b.frame();
    let r = fb - fa * (fa.transpose() * fb);
    svd(&r)
}

/// `s1 ∩ s2`: directions of `s2` whose principal angle to `s1` is at most
/// `angle_tol`.
pub fn intersect(s1: &Subspace, s2: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    s1.check_same_ambient(s2)?;
    let n = s1.ambient_dim();
    if s1.is_zero() || s2.is_zero() {
        return Ok(Subspace::zero(n));
    }
    let d = residual_split(s1, s2);
    let thr = policy.angle_tol.sin();
    let keep = d.sigma.iter().take_while(|&&s| s > thr).count();
    let coeffs = d.v.columns(keep, s2.dim() - keep).into_owned();
    Ok(Subspace::from_frame_unchecked(orthonormalize(
        &(s2.frame() * coeffs),
    )))
}

/// `s1 + s2`: `s1` extended by the directions of `s2` that leave it by more
/// than `angle_tol`. Shares its rank decision with [`intersect`], so
/// `dim(s1 ∩ s2) + dim(s1 + s2) = dim s1 + dim s2` holds exactly.
pub fn sum(s1: &Subspace, s2: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    s1.check_same_ambient(s2)?;
    if s2.is_zero() {
        return Ok(s1.clone());
    }
    if s1.is_zero() {
        return Ok(s2.clone());
    }
    let d = residual_split(s1, s2);
    let thr = policy.angle_tol.sin();
    let keep = d.sigma.iter().take_while(|&&s| s > thr).count();
    let n = s1.ambient_dim();
    let mut frame = DMatrix::zeros(n, s1.dim() + keep);
    frame.columns_mut(0, s1.dim()).copy_from(s1.frame());
    frame
        .columns_mut(s1.dim(), keep)
        .copy_from(&d.u.columns(0, keep));
    Ok(Subspace::from_frame_unchecked(orthonormalize(&frame)))
}

/// True iff `small ⊆ big` within `angle_tol`.
pub fn contains(big: &Subspace, small: &Subspace, policy: &TolerancePolicy) -> Result<bool> {
    Ok(intersect(big, small, policy)?.dim() == small.dim())
}

/// Principal angles, ascending, in `[0, π/2]`; `min(dim s1, dim s2)` of them.
///
/// Small angles are taken from the sines and large ones from the cosines,
/// so both ends of the range are resolved to working precision.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    s1.check_same_ambient(s2)?;
    let (a, b) = if s1.dim() >= s2.dim() { (s1, s2) } else { (s2, s1) };
    if b.is_zero() {
        return Ok(Vec::new());
    }
    let mut sines: Vec<f64> = residual_split(a, b).sigma.iter().copied().collect();
    sines.sort_by(|x, y| x.total_cmp(y));
    let cosines = svd(&(a.frame().transpose() * b.frame())).sigma;
    Ok(sines
        .iter()
        .zip(cosines.iter())
        .map(|(&s, &c)| {
            if s < FRAC_1_SQRT_2 {
                s.clamp(0.0, 1.0).asin()
            } else {
                c.clamp(0.0, 1.0).acos()
            }
        })
        .collect())
}

/// Equal dimensions and largest principal angle at most `angle_tol`.
pub fn subspaces_equal(s1: &Subspace, s2: &Subspace, policy: &TolerancePolicy) -> Result<bool> {
    s1.check_same_ambient(s2)?;
    if s1.dim() != s2.dim() {
        return Ok(false);
    }
    Ok(principal_angles(s1, s2)?
        .iter()
        .all(|&a| a <= policy.angle_tol))
}
