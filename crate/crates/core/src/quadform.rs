//! Symmetric and skew bilinear forms: index, nullity, restriction and
//! form-orthogonal complements.
//!
//! All subspaces passed in or returned are expressed in the coordinates of
//! the enclosing `R^N`; a form that lives on a proper subspace stores its
//! matrix in that subspace's frame coordinates. In finite dimension every
//! subspace is closed and of finite codimension, and non-degeneracy and
//! strong non-degeneracy coincide, so no such hypotheses are checked.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::{
    contains, eigh, intersect, kernel_abs, spectral_norm, Subspace, SymMatrix, TolerancePolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Skew,
}

/// A bilinear form `Q[u, v] = uᵀ·M·v` on a subspace of `R^N`.
///
/// `scale` is the norm used to turn `rank_tol` into an absolute threshold.
/// A restriction keeps the scale of the form it came from, so a small
/// restricted matrix is still judged against the size of the original form.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinForm {
    ambient: Subspace,
    matrix: DMatrix<f64>,
    symmetry: Symmetry,
    scale: f64,
}

/// Index, nullity and coindex of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub index: usize,
    pub nullity: usize,
    pub coindex: usize,
}

fn project(m: DMatrix<f64>, symmetry: Symmetry) -> DMatrix<f64> {
    let t = m.transpose();
    match symmetry {
        Symmetry::Symmetric => (m + t) * 0.5,
        Symmetry::Skew => (m - t) * 0.5,
    }
}

impl BilinForm {
    /// Form on a subspace, with `matrix` in the subspace's frame coordinates.
    pub fn on_subspace(ambient: Subspace, matrix: DMatrix<f64>, symmetry: Symmetry) -> Result<Self> {
        if matrix.nrows() != ambient.dim() || matrix.ncols() != ambient.dim() {
            return Err(Error::domain(format!(
                "form matrix is {}x{} but the subspace has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                ambient.dim()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("form matrix"));
        }
        let matrix = project(matrix, symmetry);
        let scale = spectral_norm(&matrix);
        Ok(Self {
            ambient,
            matrix,
            symmetry,
            scale,
        })
    }

    /// Symmetric form on all of `R^n`.
    pub fn symmetric(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        Self::on_subspace(Subspace::full(n), m, Symmetry::Symmetric)
    }

    /// Skew form on all of `R^n`.
    pub fn skew(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        Self::on_subspace(Subspace::full(n), m, Symmetry::Skew)
    }

    pub fn from_sym(m: &SymMatrix) -> Self {
        let scale = m.norm();
        Self {
            ambient: Subspace::full(m.dim()),
            matrix: m.matrix().clone(),
            symmetry: Symmetry::Symmetric,
            scale,
        }
    }

    /// Replaces the threshold scale, keeping the larger of the two.
    pub(crate) fn with_scale_floor(mut self, scale: f64) -> Self {
        self.scale = self.scale.max(scale);
        self
    }

    pub fn ambient(&self) -> &Subspace {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn threshold(&self, policy: &TolerancePolicy) -> f64 {
        policy.threshold(self.scale)
    }

    pub fn sym_matrix(&self) -> Result<SymMatrix> {
        self.require_symmetric()?;
        Ok(SymMatrix::symmetrized(self.matrix.clone()))
    }

    /// The same form as an `N × N` matrix on the enclosing space
    /// (zero on the orthogonal complement of its subspace).
    pub fn ambient_matrix(&self) -> DMatrix<f64> {
        let f = self.ambient.frame();
        f * &self.matrix * f.transpose()
    }

    fn require_symmetric(&self) -> Result<()> {
        match self.symmetry {
            Symmetry::Symmetric => Ok(()),
            Symmetry::Skew => Err(Error::domain("operation requires a symmetric form")),
        }
    }

    /// Frame coordinates of `s`, after checking `s ⊆ ambient`.
    fn coords(&self, s: &Subspace, policy: &TolerancePolicy) -> Result<DMatrix<f64>> {
        if s.ambient_dim() != self.ambient.ambient_dim() {
            return Err(Error::domain(format!(
                "subspace lives in R^{} but the form lives in R^{}",
                s.ambient_dim(),
                self.ambient.ambient_dim()
            )));
        }
        if !contains(&self.ambient, s, policy)? {
            return Err(Error::domain("subspace is not contained in the form's domain"));
        }
        Ok(self.ambient.coords_of(s))
    }
}

/// Restriction `Q|_s` with matrix `Sᵀ·Q·S` in `s`'s frame.
pub fn restrict(q: &BilinForm, s: &Subspace, policy: &TolerancePolicy) -> Result<BilinForm> {
    let c = q.coords(s, policy)?;
    let m = c.transpose() * &q.matrix * &c;
    Ok(BilinForm::on_subspace(s.clone(), m, q.symmetry)?.with_scale_floor(q.scale))
}

/// Eigenvalue counts with threshold `rank_tol·scale`.
pub fn index_nullity(q: &BilinForm, policy: &TolerancePolicy) -> Result<IndexReport> {
    q.require_symmetric()?;
    let e = eigh(&q.sym_matrix()?)?;
    let thr = q.threshold(policy);
    let index = e.values.iter().filter(|&&v| v < -thr).count();
    let nullity = e.values.iter().filter(|&&v| v.abs() <= thr).count();
    Ok(IndexReport {
        index,
        nullity,
        coindex: q.dim() - index - nullity,
    })
}

/// `ker Q` in enclosing coordinates. For symmetric forms this is the span of
/// the eigenvectors counted by [`index_nullity`] as null, so the two agree.
pub fn kernel_of(q: &BilinForm, policy: &TolerancePolicy) -> Result<Subspace> {
    let thr = q.threshold(policy);
    let inner = match q.symmetry {
        Symmetry::Symmetric => {
            let e = eigh(&q.sym_matrix()?)?;
            let cols: Vec<usize> = (0..e.len()).filter(|&k| e.values[k].abs() <= thr).collect();
            Subspace::from_frame_unchecked(e.vectors.select_columns(cols.iter()))
        }
        Symmetry::Skew => kernel_abs(&q.matrix, thr)?,
    };
    Ok(q.ambient.embed_subspace(&inner))
}

/// `s^{⊥_Q} = {u : Q[u, w] = 0 for all w ∈ s}` inside the form's domain.
pub fn perp(q: &BilinForm, s: &Subspace, policy: &TolerancePolicy) -> Result<Subspace> {
    let c = q.coords(s, policy)?;
    if c.ncols() == 0 {
        return Ok(q.ambient.clone());
    }
    // rows are the functionals u ↦ Q[u, w_j]
    let functionals = (&q.matrix * &c).transpose();
    let inner = kernel_abs(&functionals, q.threshold(policy))?;
    Ok(q.ambient.embed_subspace(&inner))
}

/// Both sides of the index formula for a restriction:
/// `ind Q − ind Q|_W` and `ind Q|_{W^⊥} + dim(W ∩ W^⊥) − dim(W ∩ ker Q)`.
pub fn index_formula_sides(q: &BilinForm, w: &Subspace, policy: &TolerancePolicy) -> Result<(i64, i64)> {
    q.require_symmetric()?;
    let ind_q = index_nullity(q, policy)?.index as i64;
    let ind_w = index_nullity(&restrict(q, w, policy)?, policy)?.index as i64;
    let wp = perp(q, w, policy)?;
    let ind_wp = index_nullity(&restrict(q, &wp, policy)?, policy)?.index as i64;
    let w_wp = intersect(w, &wp, policy)?.dim() as i64;
    let w_ker = intersect(w, &kernel_of(q, policy)?, policy)?.dim() as i64;
    Ok((ind_q - ind_w, ind_wp + w_wp - w_ker))
}

/// True iff `Q|_s` has nullity zero.
pub fn is_nondegenerate_on(q: &BilinForm, s: &Subspace, policy: &TolerancePolicy) -> Result<bool> {
    let r = restrict(q, s, policy)?;
    Ok(match q.symmetry {
        Symmetry::Symmetric => index_nullity(&r, policy)?.nullity == 0,
        Symmetry::Skew => kernel_of(&r, policy)?.dim() == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkern::subspaces_equal;
    use approx::assert_abs_diff_eq;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn diag(d: &[f64]) -> BilinForm {
        BilinForm::from_sym(&SymMatrix::from_diagonal(d))
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx)
    }

    #[test]
    fn restrict_diagonal() {
        let q = diag(&[1.0, -1.0, 1.0]);
        let r = restrict(&q, &coord(3, &[0, 1]), &pol()).unwrap();
        assert_eq!(r.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let full = restrict(&q, &Subspace::full(3), &pol()).unwrap();
        assert_eq!(full.matrix(), q.matrix());
    }

    #[test]
    fn restrict_outside_domain_fails() {
        let q = diag(&[1.0, 2.0, 3.0]);
        let r = restrict(&q, &coord(3, &[0, 1]), &pol()).unwrap();
        assert!(matches!(
            restrict(&r, &coord(3, &[2]), &pol()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn index_nullity_examples() {
        let r = index_nullity(&diag(&[1.0, -1.0, 0.0]), &pol()).unwrap();
        assert_eq!((r.index, r.nullity, r.coindex), (1, 1, 1));
        let r = index_nullity(&diag(&[1.0; 4]), &pol()).unwrap();
        assert_eq!((r.index, r.nullity, r.coindex), (0, 0, 4));
        let w = BilinForm::skew(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        assert!(index_nullity(&w, &pol()).is_err());
    }

    #[test]
    fn perp_examples() {
        let q = diag(&[0.0, 1.0, -1.0]);
        let p = perp(&q, &coord(3, &[0, 1]), &pol()).unwrap();
        assert!(subspaces_equal(&p, &coord(3, &[0, 2]), &pol()).unwrap());

        let q = diag(&[2.0, -1.0, 3.0]);
        assert_eq!(perp(&q, &Subspace::full(3), &pol()).unwrap().dim(), 0);

        // standard ω on R^4 with ω(e_i, e_{2+i}) = 1
        let mut om = DMatrix::zeros(4, 4);
        om[(0, 2)] = 1.0;
        om[(2, 0)] = -1.0;
        om[(1, 3)] = 1.0;
        om[(3, 1)] = -1.0;
        let w = BilinForm::skew(om).unwrap();
        let p = perp(&w, &coord(4, &[0, 2, 3]), &pol()).unwrap();
        assert!(subspaces_equal(&p, &coord(4, &[3]), &pol()).unwrap());
    }

    #[test]
    fn perp_of_empty_is_everything() {
        let q = diag(&[1.0, -1.0]);
        assert_eq!(perp(&q, &Subspace::zero(2), &pol()).unwrap().dim(), 2);
    }

    #[test]
    fn index_formula_examples() {
        let q = diag(&[0.0, 1.0, -1.0]);
        assert_eq!(index_formula_sides(&q, &coord(3, &[0, 1]), &pol()).unwrap(), (1, 1));
        let id = diag(&[1.0; 4]);
        assert_eq!(index_formula_sides(&id, &coord(4, &[1, 3]), &pol()).unwrap(), (0, 0));
    }

    #[test]
    fn nondegeneracy_examples() {
        let q = diag(&[1.0, -1.0]);
        let s = Subspace::span(&DMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &pol()).unwrap();
        assert!(!is_nondegenerate_on(&q, &s, &pol()).unwrap());
        assert!(is_nondegenerate_on(&diag(&[1.0, 1.0]), &s, &pol()).unwrap());
        assert!(is_nondegenerate_on(&diag(&[0.0, 1.0]), &coord(2, &[1]), &pol()).unwrap());
    }

    #[test]
    fn restriction_keeps_parent_scale() {
        let q = diag(&[1e-12, 1.0]);
        let r = restrict(&q, &coord(2, &[0]), &pol()).unwrap();
        assert_abs_diff_eq!(r.scale(), 1.0);
        // 1e-12 is below the parent threshold, so the restriction is null
        assert_eq!(index_nullity(&r, &pol()).unwrap().nullity, 1);
    }

    #[test]
    fn kernel_agrees_with_nullity() {
        let q = diag(&[0.0, 3.0, 0.0, -2.0]);
        let k = kernel_of(&q, &pol()).unwrap();
        assert_eq!(k.dim(), index_nullity(&q, &pol()).unwrap().nullity);
        assert!(subspaces_equal(&k, &coord(4, &[0, 2]), &pol()).unwrap());
    }
}
