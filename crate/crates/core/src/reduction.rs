//! Coisotropic reduction and the correction terms relating the Maslov index
//! of a path to that of its reduction.
//!
//! The quotient `w / w_perp` is modelled by the orthonormal complement `R`
//! of `w_perp` inside `w`; the quotient map is `u ↦ Rᵀ·u` and the reduced
//! form is `Rᵀ·Ω·R`. The projection `π: l0 ⊕ w_perp → l0` is taken along
//! `w_perp`, which is well defined because the sum is direct whenever
//! `l0 ∩ w_perp = {0}`.
//!
//! `V` below always denotes `l0 ∩ w`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::{
    column_space, complement, contains, intersect, principal_angles, subspaces_equal, sum, Subspace,
    TolerancePolicy,
};
use crate::quadform::{index_nullity, kernel_of, perp, restrict, BilinForm, Symmetry};
use crate::symplectic::{
    chart, is_lagrangian, maslov_index, ChartSegment, Lagrangian, LagrangianPath, SymplecticSpace,
};

#[derive(Debug, Clone)]
pub struct ReductionSetup {
    space: SymplecticSpace,
    w: Subspace,
    w_perp: Subspace,
    reduced: SymplecticSpace,
    r_frame: DMatrix<f64>,
}

impl ReductionSetup {
    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn w(&self) -> &Subspace {
        &self.w
    }

    pub fn w_perp(&self) -> &Subspace {
        &self.w_perp
    }

    pub fn reduced(&self) -> &SymplecticSpace {
        &self.reduced
    }

    /// Codimension `k` of `w`.
    pub fn k(&self) -> usize {
        self.w_perp.dim()
    }

    /// Quotient map in ambient coordinates, `(2n − 2k) × 2n`; its kernel
    /// on `w` is `w_perp`.
    pub fn q_map(&self) -> DMatrix<f64> {
        self.r_frame.transpose()
    }

    /// Orthonormal complement of `w_perp` inside `w`.
    pub fn representatives(&self) -> &DMatrix<f64> {
        &self.r_frame
    }

    /// Largest `|ω̄[q u, q v] − ω[u, v]|` over pairs of frame vectors of `w`.
    pub fn descent_residual(&self) -> f64 {
        let wf = self.w.frame();
        let qw = self.q_map() * wf;
        let lhs = self.reduced.pairing(&qw, &qw);
        let rhs = self.space.pairing(wf, wf);
        (lhs - rhs).amax()
    }
}

/// Reduction of `space` by the coisotropic `w`.
pub fn make_reduction(
    space: &SymplecticSpace,
    w: &Subspace,
    policy: &TolerancePolicy,
) -> Result<ReductionSetup> {
    if w.ambient_dim() != space.dim() {
        return Err(Error::domain("coisotropic subspace lives in the wrong space"));
    }
    let w_perp = perp(space.omega(), w, policy)?;
    if !contains(w, &w_perp, policy)? {
        return Err(Error::domain("subspace is not coisotropic"));
    }
    let inner = column_space(&w.coords_of(&w_perp), policy)?;
    let r = w.embed_subspace(&complement(&inner));
    let expected = w.dim() - w_perp.dim();
    if r.dim() != expected {
        return Err(Error::Internal(format!(
            "complement of w_perp in w has dimension {} instead of {expected}",
            r.dim()
        )));
    }
    let r_frame = r.frame().clone();
    let reduced = SymplecticSpace::new(space.pairing(&r_frame, &r_frame), policy)?;
    Ok(ReductionSetup {
        space: space.clone(),
        w: w.clone(),
        w_perp,
        reduced,
        r_frame,
    })
}

fn check_in_o(setup: &ReductionSetup, l: &Subspace, policy: &TolerancePolicy) -> Result<()> {
    if intersect(l, &setup.w_perp, policy)?.dim() > 0 {
        return Err(Error::domain("Lagrangian meets w_perp (outside the reducible set)"));
    }
    Ok(())
}

/// `q(l ∩ w)` without the admissibility check.
fn image(setup: &ReductionSetup, l: &Subspace, policy: &TolerancePolicy) -> Result<Lagrangian> {
    let x = intersect(l, &setup.w, policy)?;
    let img = column_space(&(setup.q_map() * x.frame()), policy)?;
    Lagrangian::new(&setup.reduced, img, policy)
}

/// `λ(l) = q(l ∩ w)` for `l ∩ w_perp = {0}`.
pub fn reduce_lagrangian(
    setup: &ReductionSetup,
    l: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    check_in_o(setup, l.sub(), policy)?;
    image(setup, l.sub(), policy)
}

/// `q(l ∩ w)` for a Lagrangian containing `w_perp` (then `l ⊆ w`).
pub fn reduce_containing(
    setup: &ReductionSetup,
    l: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    if !contains(l.sub(), &setup.w_perp, policy)? {
        return Err(Error::domain("Lagrangian does not contain w_perp"));
    }
    image(setup, l.sub(), policy)
}

/// Samplewise reduction of a path.
pub fn reduce_path(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    policy: &TolerancePolicy,
) -> Result<LagrangianPath> {
    let mut samples = Vec::with_capacity(path.len());
    for (k, s) in path.samples().iter().enumerate() {
        if intersect(s, &setup.w_perp, policy)?.dim() > 0 {
            return Err(Error::domain(format!("path sample {k} meets w_perp")));
        }
        samples.push(image(setup, s, policy)?.sub().clone());
    }
    LagrangianPath::new(&setup.reduced, path.mesh().to_vec(), samples, policy)
}

/// As [`reduce_path`], but reduced steps above `max_step` are refined by
/// sampling the input path through `sampler` at midpoints. Returns the
/// refined input path together with its reduction.
pub fn reduce_path_sampled(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    sampler: impl Fn(f64) -> Result<Subspace>,
    max_step: f64,
    policy: &TolerancePolicy,
) -> Result<(LagrangianPath, LagrangianPath)> {
    let mut r = ReducedRefiner {
        setup,
        sampler: &sampler,
        max_step,
        policy,
        mesh: vec![path.a()],
        samples: vec![path.samples()[0].clone()],
        reduced: vec![reduce_sample(setup, &path.samples()[0], path.a(), policy)?],
    };
    for k in 0..path.len() - 1 {
        let (t0, t1) = (path.mesh()[k], path.mesh()[k + 1]);
        let end = path.samples()[k + 1].clone();
        let rend = reduce_sample(setup, &end, t1, policy)?;
        r.refine(t0, t1, end, rend, 0)?;
    }
    let ReducedRefiner {
        mesh,
        samples,
        reduced,
        ..
    } = r;
    Ok((
        LagrangianPath::new(&setup.space, mesh.clone(), samples, policy)?,
        LagrangianPath::new(&setup.reduced, mesh, reduced, policy)?,
    ))
}

fn reduce_sample(setup: &ReductionSetup, s: &Subspace, t: f64, policy: &TolerancePolicy) -> Result<Subspace> {
    if intersect(s, &setup.w_perp, policy)?.dim() > 0 {
        return Err(Error::domain(format!("path sample at t = {t} meets w_perp")));
    }
    Ok(image(setup, s, policy)?.sub().clone())
}

struct ReducedRefiner<'a, F> {
    setup: &'a ReductionSetup,
    sampler: &'a F,
    max_step: f64,
    policy: &'a TolerancePolicy,
    mesh: Vec<f64>,
    samples: Vec<Subspace>,
    reduced: Vec<Subspace>,
}

impl<F: Fn(f64) -> Result<Subspace>> ReducedRefiner<'_, F> {
    fn refine(&mut self, t0: f64, t1: f64, end: Subspace, rend: Subspace, depth: usize) -> Result<()> {
        let last = self.reduced.last().expect("refinement starts after the first sample");
        let gap = principal_angles(last, &rend)?.last().copied().unwrap_or(0.0);
        if gap <= self.max_step {
            self.mesh.push(t1);
            self.samples.push(end);
            self.reduced.push(rend);
            return Ok(());
        }
        if depth >= self.policy.refine_limit {
            return Err(Error::domain(format!(
                "reduced path is not continuous enough on [{t0}, {t1}] (gap {gap:.3} rad)"
            )));
        }
        let tm = 0.5 * (t0 + t1);
        let mid = (self.sampler)(tm)?;
        let rmid = reduce_sample(self.setup, &mid, tm, self.policy)?;
        self.refine(t0, tm, mid, rmid, depth + 1)?;
        self.refine(tm, t1, end, rend, depth + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    A,
    B,
}

/// Endpoint quantities entering the reduction formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrectionTerms {
    pub ind_q: usize,
    pub dim_pi_v: usize,
    pub dim_l_v: usize,
    pub e_dim: usize,
}

/// `E = π(ℓ ∩ (l0 + w_perp))` and the form `𝔮` on it, in `E`'s frame.
pub(crate) struct ProjectedForm {
    pub e: Subspace,
    pub q: BilinForm,
}

/// Projection onto `l0` along `w_perp`, applied to the columns of `x`
/// (which must lie in `l0 ⊕ w_perp`).
fn pi(l0: &Subspace, w_perp: &Subspace, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, k) = (l0.dim(), w_perp.dim());
    let mut basis = DMatrix::zeros(l0.ambient_dim(), n + k);
    basis.columns_mut(0, n).copy_from(l0.frame());
    basis.columns_mut(n, k).copy_from(w_perp.frame());
    let gram = basis.transpose() * &basis;
    let coords = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::numeric("l0 + w_perp is not direct"))?
        * (basis.transpose() * x);
    let resid = (&basis * &coords - x).amax();
    if resid > 1e-8 * (1.0 + x.amax()) {
        let cond = crate::numkern::svd(&gram).sigma;
        return Err(Error::numeric(format!(
            "preimage solve failed (residual {resid:.3e}, Gram singular values {:.3e}..{:.3e})",
            cond.max(),
            cond.min()
        )));
    }
    Ok(l0.frame() * coords.rows(0, n))
}

pub(crate) fn projected_form(
    setup: &ReductionSetup,
    l0: &Lagrangian,
    l: &Subspace,
    policy: &TolerancePolicy,
) -> Result<ProjectedForm> {
    let s = sum(l0.sub(), &setup.w_perp, policy)?;
    let x = intersect(l, &s, policy)?;
    let g = pi(l0.sub(), &setup.w_perp, x.frame())?;
    let e = column_space(&g, policy)?;
    if e.dim() != x.dim() {
        return Err(Error::numeric("projection is not injective on ℓ ∩ (l0 + w_perp)"));
    }
    let om = setup.space.omega_matrix();
    let q = if e.dim() == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let kmat = e.frame().transpose() * &g;
        let kinv = kmat
            .try_inverse()
            .ok_or_else(|| Error::numeric("projection restricted to E is singular"))?;
        kinv.transpose() * x.frame().transpose() * om * e.frame()
    };
    let q = BilinForm::on_subspace(e.clone(), q, Symmetry::Symmetric)?
        .with_scale_floor(setup.space.omega().scale());
    Ok(ProjectedForm { e, q })
}

fn check_reference(setup: &ReductionSetup, l0: &Lagrangian, policy: &TolerancePolicy) -> Result<()> {
    if l0.space().dim() != setup.space.dim() {
        return Err(Error::domain("reference Lagrangian lives in the wrong space"));
    }
    if intersect(l0.sub(), &setup.w_perp, policy)?.dim() > 0 {
        return Err(Error::domain("l0 meets w_perp"));
    }
    Ok(())
}

fn terms_at(
    setup: &ReductionSetup,
    l0: &Lagrangian,
    l: &Subspace,
    policy: &TolerancePolicy,
) -> Result<CorrectionTerms> {
    check_in_o(setup, l, policy)?;
    let pf = projected_form(setup, l0, l, policy)?;
    let ind_q = index_nullity(&pf.q, policy)?.index;
    let v = intersect(l0.sub(), &setup.w, policy)?;
    let y = intersect(l, &sum(&v, &setup.w_perp, policy)?, policy)?;
    let dim_pi_v = column_space(&pi(l0.sub(), &setup.w_perp, y.frame())?, policy)?.dim();
    let dim_l_v = intersect(l, &v, policy)?.dim();
    Ok(CorrectionTerms {
        ind_q,
        dim_pi_v,
        dim_l_v,
        e_dim: pf.e.dim(),
    })
}

/// Correction terms at one end of `path`.
pub fn correction_terms(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    l0: &Lagrangian,
    t_end: End,
    policy: &TolerancePolicy,
) -> Result<CorrectionTerms> {
    check_reference(setup, l0, policy)?;
    let k = match t_end {
        End::A => 0,
        End::B => path.len() - 1,
    };
    terms_at(setup, l0, &path.samples()[k], policy)
}

/// Both sides of the reduction formula: `μ_{l0}(ℓ) − μ_{λ(l0)}(λ∘ℓ)` and
/// `ind 𝔮_a − ind 𝔮_b + dim π_V(a) − dim π_V(b) − dim(ℓ(a) ∩ V) + dim(ℓ(b) ∩ V)`.
pub fn reduction_sides(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    l0: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<(i64, i64)> {
    let (lhs, rhs, _) = reduction_detail(setup, path, l0, policy)?;
    Ok((lhs, rhs))
}

/// Everything [`reduction_sides`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionDetail {
    pub mu: i64,
    pub mu_reduced: i64,
    pub at_a: CorrectionTerms,
    pub at_b: CorrectionTerms,
}

pub fn reduction_detail(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    l0: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<(i64, i64, ReductionDetail)> {
    check_reference(setup, l0, policy)?;
    let mu = maslov_index(path, l0, policy)?;
    let reduced = reduce_path(setup, path, policy)?;
    let l0_bar = reduce_lagrangian(setup, l0, policy)?;
    let mu_reduced = maslov_index(&reduced, &l0_bar, policy)?;
    let at_a = correction_terms(setup, path, l0, End::A, policy)?;
    let at_b = correction_terms(setup, path, l0, End::B, policy)?;
    let s = |c: &CorrectionTerms| c.ind_q as i64 + c.dim_pi_v as i64 - c.dim_l_v as i64;
    Ok((
        mu - mu_reduced,
        s(&at_a) - s(&at_b),
        ReductionDetail {
            mu,
            mu_reduced,
            at_a,
            at_b,
        },
    ))
}

/// Outcome of checking the chart identities on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    /// `ker Q_t = ℓ(t) ∩ l0`.
    pub kernel: bool,
    /// `V^{⊥Q_t} = E_t`.
    pub perp: bool,
    /// `Q_t|_{E_t} = 𝔮_t`.
    pub form: bool,
    pub samples_checked: usize,
}

impl IdentityReport {
    pub fn all(&self) -> bool {
        self.kernel && self.perp && self.form
    }
}

/// Checks, at every sample of `segment`, that the chart form `Q_t` over
/// `l0` (with a complement containing `w_perp`) satisfies the kernel, perp
/// and form identities against `ℓ(t)`, `E_t` and `𝔮_t`.
pub fn chart_identities(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    l0: &Lagrangian,
    segment: &ChartSegment,
    policy: &TolerancePolicy,
) -> Result<IdentityReport> {
    check_reference(setup, l0, policy)?;
    if !contains(segment.l1.sub(), &setup.w_perp, policy)? {
        return Err(Error::domain("chart complement does not contain w_perp"));
    }
    if !subspaces_equal(segment.l0.sub(), l0.sub(), policy)? {
        return Err(Error::domain("segment is charted over a different l0"));
    }
    let (first, last) = segment.samples;
    if last >= path.len() {
        return Err(Error::domain("segment does not belong to this path"));
    }
    let v = intersect(l0.sub(), &setup.w, policy)?;
    let mut rep = IdentityReport {
        kernel: true,
        perp: true,
        form: true,
        samples_checked: 0,
    };
    let form_tol = policy.angle_tol.sqrt();
    for k in first..=last {
        let l = &path.samples()[k];
        let qt = BilinForm::on_subspace(
            segment.l0.sub().clone(),
            segment.form_path.samples()[k - first].matrix().clone(),
            Symmetry::Symmetric,
        )?
        .with_scale_floor(segment.form_path.scale());
        let ker = kernel_of(&qt, policy)?;
        rep.kernel &= subspaces_equal(&ker, &intersect(l, l0.sub(), policy)?, policy)?;
        let pf = projected_form(setup, l0, l, policy)?;
        let vp = perp(&qt, &v, policy)?;
        rep.perp &= subspaces_equal(&vp, &pf.e, policy)?;
        let r = restrict(&qt, &pf.e, policy)?;
        let diff = (r.matrix() - pf.q.matrix()).amax();
        rep.form &= diff <= form_tol * (1.0 + pf.q.matrix().amax());
        rep.samples_checked += 1;
    }
    Ok(rep)
}

/// Largest entry of `Q|_V − Gᵀ·Q̄·G`, where `Q` is the chart of `l` over
/// `(l0, l1)`, `Q̄` the chart of `λ(l)` over `(λ(l0), λ(l1))` and `G` maps
/// `V`-coordinates to `λ(l0)`-coordinates through the quotient map.
pub fn chart_compatibility_defect(
    setup: &ReductionSetup,
    l0: &Lagrangian,
    l1: &Lagrangian,
    l: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<f64> {
    let q = chart(l0, l1, l, policy)?;
    let v = intersect(l0.sub(), &setup.w, policy)?;
    let qv = restrict(&q, &v, policy)?;
    let l0b = reduce_lagrangian(setup, l0, policy)?;
    let l1b = reduce_containing(setup, l1, policy)?;
    let lb = reduce_lagrangian(setup, l, policy)?;
    let qb = chart(&l0b, &l1b, &lb, policy)?;
    let g = l0b.frame().transpose() * setup.q_map() * v.frame();
    Ok((qv.matrix() - g.transpose() * qb.matrix() * g).amax())
}

/// True iff `λ(l)` is Lagrangian in the reduced space.
pub fn reduces_to_lagrangian(
    setup: &ReductionSetup,
    l: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<bool> {
    let r = reduce_lagrangian(setup, l, policy)?;
    Ok(is_lagrangian(&setup.reduced, r.sub(), policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkern::SymMatrix;
    use crate::symplectic::{lagrangian_complement, standard_space, unchart};
    use approx::assert_abs_diff_eq;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    /// Standard `R^4`, `w = span(e1, e3, e4)`, `l0 = span(e1, e2)`.
    fn worked() -> (SymplecticSpace, ReductionSetup, Lagrangian) {
        let sp = standard_space(2).unwrap();
        let w = perp(sp.omega(), &Subspace::coordinate(4, &[3]), &pol()).unwrap();
        let setup = make_reduction(&sp, &w, &pol()).unwrap();
        let l0 = Lagrangian::new(&sp, Subspace::coordinate(4, &[0, 1]), &pol()).unwrap();
        (sp, setup, l0)
    }

    /// `ℓ(s) = span(e1 − s·e3, e2 − e4)` on `[−1, 1]`.
    fn worked_path(sp: &SymplecticSpace) -> LagrangianPath {
        LagrangianPath::from_sampler(
            sp,
            -1.0,
            1.0,
            8,
            |s| {
                let m = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, -s, 0.0, 0.0, 1.0, 0.0, -1.0]);
                column_space(&m, &pol())
            },
            &pol(),
        )
        .unwrap()
    }

    #[test]
    fn full_space_reduces_to_itself() {
        let sp = standard_space(2).unwrap();
        let setup = make_reduction(&sp, &Subspace::full(4), &pol()).unwrap();
        assert_eq!(setup.k(), 0);
        assert_eq!(setup.reduced().omega_matrix(), sp.omega_matrix());
        assert_eq!(setup.q_map(), DMatrix::identity(4, 4));
    }

    #[test]
    fn worked_setup() {
        let (_, setup, l0) = worked();
        assert!(subspaces_equal(setup.w(), &Subspace::coordinate(4, &[0, 2, 3]), &pol()).unwrap());
        assert!(subspaces_equal(setup.w_perp(), &Subspace::coordinate(4, &[3]), &pol()).unwrap());
        assert_eq!(setup.reduced().dim(), 2);
        assert!(setup.descent_residual() < 1e-14);
        // ē1, ē3 are the images of e1, e3
        let e1 = setup.q_map() * DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let e3 = setup.q_map() * DMatrix::from_column_slice(4, 1, &[0.0, 0.0, 1.0, 0.0]);
        assert_abs_diff_eq!(setup.reduced().pairing(&e1, &e3)[(0, 0)], 1.0, epsilon = 1e-14);
        let lb = reduce_lagrangian(&setup, &l0, &pol()).unwrap();
        let want = column_space(&e1, &pol()).unwrap();
        assert!(subspaces_equal(lb.sub(), &want, &pol()).unwrap());
    }

    #[test]
    fn non_coisotropic_is_rejected() {
        let sp = standard_space(2).unwrap();
        assert!(make_reduction(&sp, &Subspace::coordinate(4, &[0, 1]), &pol()).is_err());
    }

    #[test]
    fn lagrangian_meeting_w_perp_is_rejected() {
        let (sp, setup, _) = worked();
        let l = Lagrangian::new(&sp, Subspace::coordinate(4, &[2, 3]), &pol()).unwrap();
        assert!(matches!(reduce_lagrangian(&setup, &l, &pol()), Err(Error::Domain(_))));
    }

    #[test]
    fn worked_corrections_and_sides() {
        let (sp, setup, l0) = worked();
        let path = worked_path(&sp);
        for end in [End::A, End::B] {
            let c = correction_terms(&setup, &path, &l0, end, &pol()).unwrap();
            assert_eq!(c, CorrectionTerms { ind_q: 0, dim_pi_v: 0, dim_l_v: 0, e_dim: 1 });
        }
        let pf = projected_form(&setup, &l0, &path.samples()[0], &pol()).unwrap();
        assert!(subspaces_equal(&pf.e, &Subspace::coordinate(4, &[1]), &pol()).unwrap());
        assert_abs_diff_eq!(pf.q.matrix()[(0, 0)], 1.0, epsilon = 1e-12);

        let (lhs, rhs, d) = reduction_detail(&setup, &path, &l0, &pol()).unwrap();
        assert_eq!((d.mu, d.mu_reduced), (1, 1));
        assert_eq!((lhs, rhs), (0, 0));
    }

    #[test]
    fn worked_identities_hold() {
        let (_, setup, l0) = worked();
        let sp = setup.space().clone();
        let path = worked_path(&sp);
        let l1 = lagrangian_complement(&l0, Some(setup.w_perp()), &pol()).unwrap();
        let seg = ChartSegment::new(&path, 0, path.len() - 1, &l0, &l1, &pol()).unwrap();
        let rep = chart_identities(&setup, &path, &l0, &seg, &pol()).unwrap();
        assert!(rep.all());
        assert_eq!(rep.samples_checked, path.len());
    }

    #[test]
    fn trivial_reduction_corrections() {
        let sp = standard_space(2).unwrap();
        let setup = make_reduction(&sp, &Subspace::full(4), &pol()).unwrap();
        let l0 = Lagrangian::new(&sp, Subspace::coordinate(4, &[0, 1]), &pol()).unwrap();
        let path = worked_path(&sp);
        let c = correction_terms(&setup, &path, &l0, End::A, &pol()).unwrap();
        // ℓ(−1) ∩ l0 = {0}
        assert_eq!(c, CorrectionTerms { ind_q: 0, dim_pi_v: 0, dim_l_v: 0, e_dim: 0 });
        assert_eq!(reduction_sides(&setup, &path, &l0, &pol()).unwrap(), (0, 0));
    }

    #[test]
    fn chart_commutes_with_reduction() {
        let (sp, setup, l0) = worked();
        let l1 = lagrangian_complement(&l0, Some(setup.w_perp()), &pol()).unwrap();
        let q = BilinForm::on_subspace(
            l0.sub().clone(),
            SymMatrix::new(DMatrix::from_row_slice(2, 2, &[0.3, -0.7, -0.7, 1.1])).unwrap().into_matrix(),
            Symmetry::Symmetric,
        )
        .unwrap();
        let l = unchart(&l0, &l1, &q, &pol()).unwrap();
        assert_eq!(l.space(), &sp);
        assert!(chart_compatibility_defect(&setup, &l0, &l1, &l, &pol()).unwrap() < 1e-12);
    }
}
