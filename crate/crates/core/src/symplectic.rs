//! Lagrangian subspaces, graph charts and the Maslov index.
//!
//! For complementary Lagrangians `l0`, `l1`, every Lagrangian `l` transverse
//! to `l1` is the graph of a map `T: l0 → l1`, and the chart sends `l` to the
//! symmetric form `Q[u, v] = ω[T·u, v]` on `l0`. The Maslov index of a path
//! relative to `l0` is the sum of spectral flows of chart forms over a cover
//! of the path by chart segments. Its sign is fixed by this chart formula
//! together with the spectral-flow endpoint convention.
//!
//! Symmetric forms on `l0` are plain symmetric matrices in `l0`'s frame.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numkern::{
    column_space, complement, contains, intersect, kernel_abs, principal_angles, spectral_norm, svd,
    Subspace, SymMatrix, TolerancePolicy,
};
use crate::quadform::{BilinForm, Symmetry};
use crate::specflow::{spectral_flow, FormPath};

/// Largest principal angle (radians) allowed between consecutive samples of
/// a [`LagrangianPath`].
pub const MAX_STEP_ANGLE: f64 = 0.35;

/// `R^{2n}` with an invertible skew form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    omega: BilinForm,
}

impl SymplecticSpace {
    pub fn new(omega: DMatrix<f64>, policy: &TolerancePolicy) -> Result<Self> {
        let n2 = omega.nrows();
        if n2 == 0 || !n2.is_multiple_of(2) || !omega.is_square() {
            return Err(Error::domain("symplectic form must be square of even positive size"));
        }
        let asym = (&omega + omega.transpose()).amax();
        let form = BilinForm::skew(omega.clone())?;
        if asym > policy.threshold(form.scale()) {
            return Err(Error::domain("symplectic form is not skew"));
        }
        let smin = svd(form.matrix()).sigma.min();
        if smin <= policy.threshold(form.scale()) {
            return Err(Error::domain("symplectic form is degenerate"));
        }
        Ok(Self { omega: form })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Half the dimension.
    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    pub fn omega(&self) -> &BilinForm {
        &self.omega
    }

    pub fn omega_matrix(&self) -> &DMatrix<f64> {
        self.omega.matrix()
    }

    /// `ω[x, y]` for the columns of `x` and `y`.
    pub fn pairing(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        x.transpose() * self.omega_matrix() * y
    }

    fn threshold(&self, policy: &TolerancePolicy) -> f64 {
        self.omega.threshold(policy)
    }
}

/// `R^{2n}` with `ω(e_i, e_{n+i}) = 1`.
pub fn standard_space(n: usize) -> Result<SymplecticSpace> {
    if n == 0 {
        return Err(Error::domain("standard space needs n ≥ 1"));
    }
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        om[(i, n + i)] = 1.0;
        om[(n + i, i)] = -1.0;
    }
    SymplecticSpace::new(om, &TolerancePolicy::default())
}

/// True iff `s` is isotropic (`ω|_s ≈ 0`).
pub fn is_isotropic(space: &SymplecticSpace, s: &Subspace, policy: &TolerancePolicy) -> bool {
    s.ambient_dim() == space.dim()
        && space.pairing(s.frame(), s.frame()).amax() <= space.threshold(policy)
}

/// True iff `s` has dimension `n` and is isotropic.
pub fn is_lagrangian(space: &SymplecticSpace, s: &Subspace, policy: &TolerancePolicy) -> bool {
    s.dim() == space.n() && is_isotropic(space, s, policy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    space: SymplecticSpace,
    sub: Subspace,
}

impl Lagrangian {
    pub fn new(space: &SymplecticSpace, sub: Subspace, policy: &TolerancePolicy) -> Result<Self> {
        if !is_lagrangian(space, &sub, policy) {
            return Err(Error::domain("subspace is not Lagrangian"));
        }
        Ok(Self {
            space: space.clone(),
            sub,
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        self.sub.frame()
    }
}

fn inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::numeric(format!("{what} is singular")))
}

/// Lagrangian complement of `l` containing the isotropic `must_contain`.
pub fn lagrangian_complement(
    l: &Lagrangian,
    must_contain: Option<&Subspace>,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    lagrangian_complement_steered(l, must_contain, None, policy)
}

/// As [`lagrangian_complement`], with the remaining freedom fixed by the
/// symmetric `shear` (of size `n − dim must_contain`).
///
/// Complements of `l` are the graphs `span(f + F·P)` over a fixed isotropic
/// `f` with `ω(F, f) = I`, for symmetric `P`; containing `must_contain`
/// pins `P` on a subspace and `shear` chooses the rest.
pub fn lagrangian_complement_steered(
    l: &Lagrangian,
    must_contain: Option<&Subspace>,
    shear: Option<&DMatrix<f64>>,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    let space = l.space();
    let n = space.n();
    let f0 = l.frame();
    let om = space.omega_matrix();

    let g = complement(l.sub()).frame().clone();
    let a = f0.transpose() * om * &g;
    let g = &g * inverse(&a, "ω pairing between a Lagrangian and its orthogonal complement")?;
    let b = g.transpose() * om * &g;
    let f = &g + f0 * &b * 0.5;

    let (p0, null) = match must_contain {
        None => (DMatrix::zeros(n, n), DMatrix::identity(n, n)),
        Some(iso) if iso.dim() == 0 => (DMatrix::zeros(n, n), DMatrix::identity(n, n)),
        Some(iso) => {
            if iso.ambient_dim() != space.dim() || !is_isotropic(space, iso, policy) {
                return Err(Error::domain("subspace to contain is not isotropic"));
            }
            if intersect(l.sub(), iso, policy)?.dim() > 0 {
                return Err(Error::domain("subspace to contain meets the Lagrangian"));
            }
            let mut basis = DMatrix::zeros(2 * n, 2 * n);
            basis.columns_mut(0, n).copy_from(f0);
            basis.columns_mut(n, n).copy_from(&f);
            let coords = basis
                .lu()
                .solve(iso.frame())
                .ok_or_else(|| Error::Internal("complement basis is singular".into()))?;
            let ai = coords.rows(0, n).into_owned();
            let bi = coords.rows(n, n).into_owned();
            let bpinv = (bi.transpose() * &bi)
                .try_inverse()
                .ok_or_else(|| Error::Internal("constraint coordinates lose rank".into()))?
                * bi.transpose();
            let abp = &ai * &bpinv;
            let p0 = &abp + abp.transpose() - bpinv.transpose() * (bi.transpose() * &ai) * &bpinv;
            let null = kernel_abs(&bi.transpose(), policy.threshold(spectral_norm(&bi)))?
                .frame()
                .clone();
            (p0, null)
        }
    };

    let mut p = p0;
    if let Some(s) = shear {
        if s.nrows() != null.ncols() || s.ncols() != null.ncols() {
            return Err(Error::domain(format!(
                "shear must be {0}x{0}",
                null.ncols()
            )));
        }
        p += &null * (s + s.transpose()) * 0.5 * null.transpose();
    }
    let p = (&p + p.transpose()) * 0.5;
    let frame = &f + f0 * p;
    let sub = column_space(&frame, policy)?;

    let ok_lag = is_lagrangian(space, &sub, policy);
    let ok_transverse = intersect(l.sub(), &sub, policy)?.dim() == 0;
    let ok_contains = match must_contain {
        Some(iso) => contains(&sub, iso, policy)?,
        None => true,
    };
    if !(ok_lag && ok_transverse && ok_contains) {
        return Err(Error::Internal(format!(
            "complement construction failed (lagrangian: {ok_lag}, transverse: {ok_transverse}, \
             contains: {ok_contains})"
        )));
    }
    Ok(Lagrangian {
        space: space.clone(),
        sub,
    })
}

/// Precomputed data for one graph chart.
struct Chart<'a> {
    l0: &'a Lagrangian,
    l1: &'a Lagrangian,
    basis_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    k: DMatrix<f64>,
}

impl<'a> Chart<'a> {
    fn new(l0: &'a Lagrangian, l1: &'a Lagrangian, policy: &TolerancePolicy) -> Result<Self> {
        if l0.space().dim() != l1.space().dim() {
            return Err(Error::domain("Lagrangians live in different spaces"));
        }
        if intersect(l0.sub(), l1.sub(), policy)?.dim() > 0 {
            return Err(Error::domain("chart Lagrangians are not complementary"));
        }
        let n = l0.space().n();
        let mut basis = DMatrix::zeros(2 * n, 2 * n);
        basis.columns_mut(0, n).copy_from(l0.frame());
        basis.columns_mut(n, n).copy_from(l1.frame());
        let k = l0.space().pairing(l1.frame(), l0.frame());
        Ok(Self {
            l0,
            l1,
            basis_lu: basis.lu(),
            k,
        })
    }

    /// Chart form of `l` in `l0`'s frame. Transversality must be checked by
    /// the caller.
    fn form(&self, l: &Subspace, policy: &TolerancePolicy) -> Result<SymMatrix> {
        let n = self.l0.space().n();
        let z = self
            .basis_lu
            .solve(l.frame())
            .ok_or_else(|| Error::numeric("chart basis is singular"))?;
        let a = z.rows(0, n).into_owned();
        let b = z.rows(n, n).into_owned();
        let tc = b * inverse(&a, "graph coordinates (Lagrangian not transverse to l1)")?;
        let q = tc.transpose() * &self.k;
        let asym = (&q - q.transpose()).amax();
        if asym > policy.angle_tol.sqrt() * (1.0 + q.amax()) {
            return Err(Error::numeric(format!(
                "chart form is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        SymMatrix::new(q)
    }
}

/// Graph chart `φ_{l0,l1}(l)` as a symmetric form on `l0`.
pub fn chart(
    l0: &Lagrangian,
    l1: &Lagrangian,
    l: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<BilinForm> {
    let c = Chart::new(l0, l1, policy)?;
    if intersect(l.sub(), l1.sub(), policy)?.dim() > 0 {
        return Err(Error::domain("Lagrangian is outside the chart domain (meets l1)"));
    }
    let q = c.form(l.sub(), policy)?;
    BilinForm::on_subspace(l0.sub().clone(), q.into_matrix(), Symmetry::Symmetric)
}

/// Inverse chart: the graph of `T = K⁻ᵀ·Q` with `K = ω(F1, F0)`.
pub fn unchart(
    l0: &Lagrangian,
    l1: &Lagrangian,
    q: &BilinForm,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    if q.symmetry() != Symmetry::Symmetric {
        return Err(Error::domain("chart forms are symmetric"));
    }
    if q.ambient().ambient_dim() != l0.space().dim() || !crate::numkern::subspaces_equal(q.ambient(), l0.sub(), policy)? {
        return Err(Error::domain("form does not live on l0"));
    }
    let c = Chart::new(l0, l1, policy)?;
    // express q in l0's own frame
    let rot = l0.frame().transpose() * q.ambient().frame();
    let qm = &rot * q.matrix() * rot.transpose();
    let qm = (&qm + qm.transpose()) * 0.5;
    let tc = inverse(&c.k.transpose(), "ω pairing of l1 and l0")? * qm;
    let frame = l0.frame() + c.l1.frame() * tc;
    Lagrangian::new(l0.space(), column_space(&frame, policy)?, policy)
}

/// Sampled path of Lagrangians with a bounded step between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPath {
    space: SymplecticSpace,
    mesh: Vec<f64>,
    samples: Vec<Subspace>,
}

impl LagrangianPath {
    pub fn new(
        space: &SymplecticSpace,
        mesh: Vec<f64>,
        samples: Vec<Subspace>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        if mesh.len() < 2 || mesh.len() != samples.len() {
            return Err(Error::domain("a path needs at least two samples, one per mesh point"));
        }
        if mesh.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("path mesh"));
        }
        if mesh.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("mesh must be strictly increasing"));
        }
        for (k, s) in samples.iter().enumerate() {
            if !is_lagrangian(space, s, policy) {
                return Err(Error::domain(format!("sample {k} is not Lagrangian")));
            }
        }
        let path = Self {
            space: space.clone(),
            mesh,
            samples,
        };
        for k in 0..path.samples.len() - 1 {
            let g = path.step_gap(k)?;
            if g > MAX_STEP_ANGLE {
                return Err(Error::domain(format!(
                    "samples {k} and {} are {g:.3} rad apart (bound {MAX_STEP_ANGLE})",
                    k + 1
                )));
            }
        }
        Ok(path)
    }

    /// Samples `sampler` on `initial_steps` equal steps of `[a, b]`, bisecting
    /// steps that exceed the continuity bound (at most `refine_limit` times).
    pub fn from_sampler(
        space: &SymplecticSpace,
        a: f64,
        b: f64,
        initial_steps: usize,
        sampler: impl Fn(f64) -> Result<Subspace>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        Self::from_sampler_with_step(space, a, b, initial_steps, MAX_STEP_ANGLE, sampler, policy)
    }

    /// As [`LagrangianPath::from_sampler`] with a tighter step bound
    /// `max_step ≤ MAX_STEP_ANGLE`.
    pub fn from_sampler_with_step(
        space: &SymplecticSpace,
        a: f64,
        b: f64,
        initial_steps: usize,
        max_step: f64,
        sampler: impl Fn(f64) -> Result<Subspace>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        if !(a < b) {
            return Err(Error::domain("need a < b"));
        }
        if !(max_step > 0.0 && max_step <= MAX_STEP_ANGLE) {
            return Err(Error::domain(format!("step bound must lie in (0, {MAX_STEP_ANGLE}]")));
        }
        let steps = initial_steps.max(1);
        let mut mesh = Vec::new();
        let mut samples = Vec::new();
        let grid: Vec<f64> = (0..=steps)
            .map(|j| if j == steps { b } else { a + (b - a) * j as f64 / steps as f64 })
            .collect();
        mesh.push(grid[0]);
        samples.push(sampler(grid[0])?);
        let mut r = Refiner {
            sampler: &sampler,
            max_step,
            policy,
            mesh: &mut mesh,
            samples: &mut samples,
        };
        for w in grid.windows(2) {
            let end = sampler(w[1])?;
            r.refine(w[0], w[1], end, 0)?;
        }
        Self::new(space, mesh, samples, policy)
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn samples(&self) -> &[Subspace] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.mesh[0]
    }

    pub fn b(&self) -> f64 {
        self.mesh[self.mesh.len() - 1]
    }

    /// Sample `k` as a [`Lagrangian`].
    pub fn lagrangian(&self, k: usize) -> Lagrangian {
        Lagrangian {
            space: self.space.clone(),
            sub: self.samples[k].clone(),
        }
    }

    /// Largest principal angle between samples `k` and `k + 1`.
    pub fn step_gap(&self, k: usize) -> Result<f64> {
        Ok(principal_angles(&self.samples[k], &self.samples[k + 1])?
            .last()
            .copied()
            .unwrap_or(0.0))
    }

    pub fn reversed(&self) -> LagrangianPath {
        let (a, b) = (self.a(), self.b());
        LagrangianPath {
            space: self.space.clone(),
            mesh: self.mesh.iter().rev().map(|&t| a + b - t).collect(),
            samples: self.samples.iter().rev().cloned().collect(),
        }
    }

    pub fn split_at(&self, k: usize) -> Result<(LagrangianPath, LagrangianPath)> {
        if k == 0 || k + 1 >= self.mesh.len() {
            return Err(Error::domain("split index must be an interior mesh point"));
        }
        let left = LagrangianPath {
            space: self.space.clone(),
            mesh: self.mesh[..=k].to_vec(),
            samples: self.samples[..=k].to_vec(),
        };
        let right = LagrangianPath {
            space: self.space.clone(),
            mesh: self.mesh[k..].to_vec(),
            samples: self.samples[k..].to_vec(),
        };
        Ok((left, right))
    }

    /// `self` followed by `other`, shifted to start where `self` ends.
    pub fn concatenate(&self, other: &LagrangianPath, policy: &TolerancePolicy) -> Result<LagrangianPath> {
        let last = &self.samples[self.samples.len() - 1];
        if !crate::numkern::subspaces_equal(last, &other.samples[0], policy)? {
            return Err(Error::domain("end of the first path differs from start of the second"));
        }
        let shift = self.b() - other.a();
        let mut mesh = self.mesh.clone();
        mesh.extend(other.mesh[1..].iter().map(|t| t + shift));
        let mut samples = self.samples.clone();
        samples.extend(other.samples[1..].iter().cloned());
        LagrangianPath::new(&self.space, mesh, samples, policy)
    }
}

struct Refiner<'a, F> {
    sampler: &'a F,
    max_step: f64,
    policy: &'a TolerancePolicy,
    mesh: &'a mut Vec<f64>,
    samples: &'a mut Vec<Subspace>,
}

impl<F: Fn(f64) -> Result<Subspace>> Refiner<'_, F> {
    fn refine(&mut self, t0: f64, t1: f64, end: Subspace, depth: usize) -> Result<()> {
        let start = self.samples.last().expect("refinement starts after the first sample");
        let gap = principal_angles(start, &end)?.last().copied().unwrap_or(0.0);
        if gap <= self.max_step {
            self.mesh.push(t1);
            self.samples.push(end);
            return Ok(());
        }
        if depth >= self.policy.refine_limit {
            return Err(Error::domain(format!(
                "sampler is not continuous enough on [{t0}, {t1}] (gap {gap:.3} rad)"
            )));
        }
        let tm = 0.5 * (t0 + t1);
        let mid = (self.sampler)(tm)?;
        self.refine(t0, tm, mid, depth + 1)?;
        self.refine(tm, t1, end, depth + 1)
    }
}

/// A stretch of a Lagrangian path covered by one graph chart.
#[derive(Debug, Clone)]
pub struct ChartSegment {
    pub interval: (f64, f64),
    /// Indices of the first and last path samples in the segment.
    pub samples: (usize, usize),
    pub l0: Lagrangian,
    pub l1: Lagrangian,
    pub form_path: FormPath,
}

impl ChartSegment {
    /// Charts samples `first..=last` of `path` with `(l0, l1)`.
    pub fn new(
        path: &LagrangianPath,
        first: usize,
        last: usize,
        l0: &Lagrangian,
        l1: &Lagrangian,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        if first >= last || last >= path.len() {
            return Err(Error::domain("segment needs at least two samples"));
        }
        let c = Chart::new(l0, l1, policy)?;
        let mut forms = Vec::with_capacity(last - first + 1);
        for k in first..=last {
            if intersect(&path.samples[k], l1.sub(), policy)?.dim() > 0 {
                return Err(Error::domain(format!("sample {k} meets the chart complement")));
            }
            forms.push(c.form(&path.samples[k], policy)?);
        }
        let form_path = FormPath::new(path.mesh[first..=last].to_vec(), forms)?;
        Ok(Self {
            interval: (path.mesh[first], path.mesh[last]),
            samples: (first, last),
            l0: l0.clone(),
            l1: l1.clone(),
            form_path,
        })
    }

    pub fn flow(&self, policy: &TolerancePolicy) -> Result<i64> {
        Ok(spectral_flow(&self.form_path, policy)?.flow)
    }
}

/// Candidate complements examined per cover round.
const CANDIDATES_PER_ROUND: usize = 12;
const COVER_SEED: u64 = 0x6d61_736c_6f76;

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    (&g + g.transpose()) * (0.5 * scale)
}

/// Step gaps and, for later lookups, nothing else: computed once per path.
fn step_gaps(path: &LagrangianPath) -> Result<Vec<f64>> {
    (0..path.len() - 1).map(|k| path.step_gap(k)).collect()
}

/// Furthest sample index reachable from `from` (not beyond `limit`) while
/// every step stays safely transverse to `l1`.
fn reach(
    path: &LagrangianPath,
    gaps: &[f64],
    l1: &Lagrangian,
    from: usize,
    limit: usize,
    policy: &TolerancePolicy,
) -> Result<usize> {
    let min_angle = |k: usize| -> Result<f64> {
        Ok(principal_angles(&path.samples[k], l1.sub())?
            .first()
            .copied()
            .unwrap_or(std::f64::consts::FRAC_PI_2))
    };
    let mut end = from;
    let mut here = min_angle(from)?;
    while end < limit {
        let next = min_angle(end + 1)?;
        let need = 1.5 * gaps[end] + policy.angle_tol;
        if here <= need || next <= need {
            break;
        }
        end += 1;
        here = next;
    }
    Ok(end)
}

struct CoverOptions {
    seed: u64,
    shear_scale: f64,
    include_default: bool,
}

/// Greedy chart cover of samples `from..=to`.
fn cover_range(
    path: &LagrangianPath,
    gaps: &[f64],
    l0: &Lagrangian,
    from: usize,
    to: usize,
    opts: &CoverOptions,
    policy: &TolerancePolicy,
    out: &mut Vec<ChartSegment>,
) -> Result<()> {
    let n = l0.space().n();
    let mut start = from;
    while start < to {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (start as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut best: Option<(usize, Lagrangian)> = None;
        let mut attempts = 0;
        'rounds: for round in 0..policy.refine_limit {
            for c in 0..CANDIDATES_PER_ROUND {
                attempts += 1;
                let shear = if opts.include_default && round == 0 && c == 0 {
                    None
                } else {
                    Some(random_symmetric(&mut rng, n, opts.shear_scale * (1.0 + round as f64)))
                };
                let l1 = match lagrangian_complement_steered(l0, None, shear.as_ref(), policy) {
                    Ok(l1) => l1,
                    Err(_) => continue,
                };
                let r = reach(path, gaps, &l1, start, to, policy)?;
                if r > start && best.as_ref().is_none_or(|(b, _)| r > *b) {
                    best = Some((r, l1));
                }
                if r == to {
                    break 'rounds;
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (end, l1) = best.ok_or(Error::ChartCover {
            index: start,
            attempts,
        })?;
        out.push(ChartSegment::new(path, start, end, l0, &l1, policy)?);
        start = end;
    }
    Ok(())
}

/// Chart segments used by [`maslov_index`].
pub fn chart_cover(
    path: &LagrangianPath,
    l0: &Lagrangian,
    policy: &TolerancePolicy,
) -> Result<Vec<ChartSegment>> {
    check_same_space(path, l0)?;
    let gaps = step_gaps(path)?;
    let mut out = Vec::new();
    let opts = CoverOptions {
        seed: COVER_SEED,
        shear_scale: 0.5,
        include_default: true,
    };
    cover_range(path, &gaps, l0, 0, path.len() - 1, &opts, policy, &mut out)?;
    Ok(out)
}

fn check_same_space(path: &LagrangianPath, l0: &Lagrangian) -> Result<()> {
    if path.space().dim() != l0.space().dim()
        || path.space().omega_matrix() != l0.space().omega_matrix()
    {
        return Err(Error::domain("path and reference Lagrangian live in different spaces"));
    }
    Ok(())
}

/// Maslov index `μ_{l0}` of a sampled path: the sum of chart-form spectral
/// flows over a greedy chart cover.
pub fn maslov_index(path: &LagrangianPath, l0: &Lagrangian, policy: &TolerancePolicy) -> Result<i64> {
    chart_cover(path, l0, policy)?
        .iter()
        .map(|s| s.flow(policy))
        .sum()
}

/// Default seed of [`maslov_oracle`].
pub const ORACLE_SEED: u64 = 0x00d1_ff0a_c1e5;

/// [`maslov_index`] recomputed over a random partition with random
/// complements; for differential testing.
pub fn maslov_oracle(path: &LagrangianPath, l0: &Lagrangian, policy: &TolerancePolicy) -> Result<i64> {
    maslov_oracle_seeded(path, l0, ORACLE_SEED, policy)
}

pub fn maslov_oracle_seeded(
    path: &LagrangianPath,
    l0: &Lagrangian,
    seed: u64,
    policy: &TolerancePolicy,
) -> Result<i64> {
    check_same_space(path, l0)?;
    let gaps = step_gaps(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = path.len() - 1;
    let mut breaks = vec![0];
    for k in 1..last {
        if rand::Rng::random_bool(&mut rng, 0.3) {
            breaks.push(k);
        }
    }
    breaks.push(last);
    let mut out = Vec::new();
    for (i, w) in breaks.windows(2).enumerate() {
        let opts = CoverOptions {
            seed: seed.wrapping_add(1 + i as u64),
            shear_scale: 1.5,
            include_default: false,
        };
        cover_range(path, &gaps, l0, w[0], w[1], &opts, policy, &mut out)?;
    }
    out.iter().map(|s| s.flow(policy)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkern::subspaces_equal;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn lag(space: &SymplecticSpace, cols: &[f64], n_cols: usize) -> Lagrangian {
        let m = DMatrix::from_column_slice(space.dim(), n_cols, cols);
        Lagrangian::new(space, column_space(&m, &pol()).unwrap(), &pol()).unwrap()
    }

    fn rotating(a: f64, b: f64) -> (SymplecticSpace, LagrangianPath) {
        let sp = standard_space(1).unwrap();
        let path = LagrangianPath::from_sampler(
            &sp,
            a,
            b,
            8,
            |t| column_space(&DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]), &pol()),
            &pol(),
        )
        .unwrap();
        (sp, path)
    }

    #[test]
    fn standard_forms() {
        let s1 = standard_space(1).unwrap();
        assert_eq!(s1.omega_matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let s2 = standard_space(2).unwrap();
        assert_eq!(s2.omega_matrix()[(1, 3)], 1.0);
        assert_eq!(s2.omega_matrix()[(3, 1)], -1.0);
        assert_eq!(s2.omega_matrix()[(0, 1)], 0.0);
        for n in 1..=16 {
            assert!(standard_space(n).is_ok());
        }
        assert!(standard_space(0).is_err());
    }

    #[test]
    fn lagrangian_examples() {
        let sp = standard_space(3).unwrap();
        assert!(is_lagrangian(&sp, &Subspace::coordinate(6, &[0, 1, 2]), &pol()));
        let plane = Subspace::coordinate(6, &[0, 3]);
        assert!(!is_lagrangian(&sp, &plane, &pol()));
    }

    #[test]
    fn default_complement_of_horizontal() {
        let sp = standard_space(2).unwrap();
        let l = lag(&sp, &[1., 0., 0., 0., 0., 1., 0., 0.], 2);
        let c = lagrangian_complement(&l, None, &pol()).unwrap();
        assert!(subspaces_equal(c.sub(), &Subspace::coordinate(4, &[2, 3]), &pol()).unwrap());
    }

    #[test]
    fn complement_containing_a_vector() {
        let sp = standard_space(2).unwrap();
        let l = lag(&sp, &[1., 0., 0., 0., 0., 1., 0., 0.], 2);
        let e4 = Subspace::coordinate(4, &[3]);
        let c = lagrangian_complement(&l, Some(&e4), &pol()).unwrap();
        assert!(contains(c.sub(), &e4, &pol()).unwrap());
        assert_eq!(intersect(c.sub(), l.sub(), &pol()).unwrap().dim(), 0);
        assert!(is_lagrangian(&sp, c.sub(), &pol()));
        // a vector inside l cannot be contained
        assert!(lagrangian_complement(&l, Some(&Subspace::coordinate(4, &[0])), &pol()).is_err());
    }

    #[test]
    fn chart_of_rotated_line_is_minus_tangent() {
        let sp = standard_space(1).unwrap();
        let l0 = lag(&sp, &[1., 0.], 1);
        let l1 = lag(&sp, &[0., 1.], 1);
        for t in [-1.2, -0.3, 0.0, 0.4, 1.0] {
            let l = lag(&sp, &[f64::cos(t), f64::sin(t)], 1);
            let q = chart(&l0, &l1, &l, &pol()).unwrap();
            assert_abs_diff_eq!(q.matrix()[(0, 0)], -f64::tan(t), epsilon = 1e-12);
            let back = unchart(&l0, &l1, &q, &pol()).unwrap();
            assert!(subspaces_equal(back.sub(), l.sub(), &pol()).unwrap());
        }
        assert!(chart(&l0, &l1, &l1, &pol()).is_err());
    }

    #[test]
    fn chart_of_l0_is_zero() {
        let sp = standard_space(2).unwrap();
        let l0 = lag(&sp, &[1., 0., 0., 0., 0., 1., 0., 0.], 2);
        let l1 = lagrangian_complement(&l0, None, &pol()).unwrap();
        let q = chart(&l0, &l1, &l0, &pol()).unwrap();
        assert!(q.matrix().amax() < 1e-15);
        let z = BilinForm::on_subspace(l0.sub().clone(), DMatrix::zeros(2, 2), Symmetry::Symmetric).unwrap();
        assert!(subspaces_equal(unchart(&l0, &l1, &z, &pol()).unwrap().sub(), l0.sub(), &pol()).unwrap());
    }

    #[test]
    fn rotating_line_has_index_minus_one() {
        let (sp, path) = rotating(PI / 4.0, 3.0 * PI / 4.0);
        let l0 = lag(&sp, &[0., 1.], 1);
        assert_eq!(maslov_index(&path, &l0, &pol()).unwrap(), -1);
        assert_eq!(maslov_oracle(&path, &l0, &pol()).unwrap(), -1);
    }

    #[test]
    fn constant_and_transverse_paths() {
        let sp = standard_space(1).unwrap();
        let l = column_space(&DMatrix::from_column_slice(2, 1, &[1.0, 0.3]), &pol()).unwrap();
        let path = LagrangianPath::new(&sp, vec![0.0, 1.0], vec![l.clone(), l], &pol()).unwrap();
        let l0 = lag(&sp, &[0., 1.], 1);
        assert_eq!(maslov_index(&path, &l0, &pol()).unwrap(), 0);
        // stays away from span(e1)
        let (_, p) = rotating(0.3, 2.8);
        let e1 = lag(&sp, &[1., 0.], 1);
        assert_eq!(maslov_index(&p, &e1, &pol()).unwrap(), 0);
    }

    #[test]
    fn full_turn_and_its_reversal() {
        let (sp, path) = rotating(0.1, 0.1 + 2.0 * PI);
        let l0 = lag(&sp, &[0., 1.], 1);
        let mu = maslov_index(&path, &l0, &pol()).unwrap();
        assert_eq!(mu.abs(), 2);
        assert_eq!(maslov_index(&path.reversed(), &l0, &pol()).unwrap(), -mu);
    }

    #[test]
    fn path_rejects_jumps() {
        let sp = standard_space(1).unwrap();
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert!(LagrangianPath::new(&sp, vec![0.0, 1.0], vec![e1, e2], &pol()).is_err());
    }
}
