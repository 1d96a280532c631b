//! Dense symmetric eigenvalue and rank-revealing subspace algebra.
//!
//! Every rank or dimension decision made anywhere in the crate goes through
//! a single [`TolerancePolicy`], so results are reproducible given the input
//! and the policy. Dimensions are always returned as exact integers.

mod eigen;
mod subspace;
mod svd;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{eigh, eigvalsh, Eigh, RECONSTRUCTION_CONSTANT};
pub use subspace::{
    column_space, complement, contains, intersect, kernel, kernel_abs, orthonormalize,
    principal_angles, subspaces_equal, sum, Subspace,
};
pub use svd::{spectral_norm, svd, Svd};

/// Thresholds used for every numerical rank, nullity and equality decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancePolicy {
    /// Singular/eigenvalue threshold, relative to the matrix norm.
    pub rank_tol: f64,
    /// Largest principal angle (radians) at which subspaces count as equal.
    pub angle_tol: f64,
    /// Maximum number of mesh refinements (bisection depth).
    pub refine_limit: usize,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            angle_tol: 1e-8,
            refine_limit: 40,
        }
    }
}

impl TolerancePolicy {
    pub fn new(rank_tol: f64, angle_tol: f64, refine_limit: usize) -> Result<Self> {
        let p = Self {
            rank_tol,
            angle_tol,
            refine_limit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rank_tol.is_finite() && self.rank_tol > 0.0) {
            return Err(Error::domain("rank_tol must be a positive finite number"));
        }
        if !(self.angle_tol.is_finite() && self.angle_tol > 0.0) {
            return Err(Error::domain("angle_tol must be a positive finite number"));
        }
        if self.refine_limit == 0 {
            return Err(Error::domain("refine_limit must be at least 1"));
        }
        Ok(())
    }

    /// Absolute threshold for a matrix whose norm is `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.rank_tol * scale
    }
}

/// A real symmetric matrix, exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Symmetrizes `m` as `(m + mᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::domain(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix"));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut s = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Self(s)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Spectral norm, via the eigenvalues.
    pub fn norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        eigen::jacobi(&self.0).spectral_norm()
    }

    /// `(1 − s)·self + s·other`.
    pub fn lerp(&self, other: &SymMatrix, s: f64) -> SymMatrix {
        Self::symmetrized(&self.0 * (1.0 - s) + &other.0 * s)
    }

    /// Congruence `Mᵀ·self·M`.
    pub fn congruence(&self, m: &DMatrix<f64>) -> SymMatrix {
        Self::symmetrized(m.transpose() * &self.0 * m)
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &SymMatrix) -> SymMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.0);
        m.view_mut((a, a), (b, b)).copy_from(&other.0);
        Self(m)
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

impl std::ops::Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

pub(crate) fn check_finite(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
