//! Seeded instance generators.
//!
//! Every generator is a pure function of its [`Seed`] and parameters.
//! Degenerate instances are built with exact zeros placed in a random
//! orthonormal basis, so the promised kernels and isotropic vectors hold by
//! construction rather than by thresholding.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkern::{
    column_space, complement, intersect, orthonormalize, spectral_norm, Subspace, SymMatrix, TolerancePolicy,
};
use crate::quadform::{index_nullity, is_nondegenerate_on, perp, restrict, BilinForm, Symmetry};
use crate::reduction::{make_reduction, reduce_path_sampled, ReductionSetup};
use crate::specflow::FormPath;
use crate::symplectic::{
    lagrangian_complement_steered, standard_space, unchart, Lagrangian, LagrangianPath,
    SymplecticSpace,
};

/// Per-trial seed: the generator state depends only on `(master, trial_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub trial_index: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Seed {
    pub fn new(master: u64, trial_index: u64) -> Self {
        Self {
            master,
            trial_index,
        }
    }

    /// ChaCha stream `trial_index` keyed by `master`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master);
        r.set_stream(self.trial_index);
        r
    }

    /// Independent seed for a sub-generator of the same trial.
    pub fn child(&self, salt: u64) -> Seed {
        Seed {
            master: splitmix(self.master ^ splitmix(salt)),
            trial_index: self.trial_index,
        }
    }
}

/// Entry of a signature pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Symmetrized Gaussian matrix `(G + Gᵀ)/2`.
pub fn gaussian_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Haar-like random orthogonal matrix (Gram–Schmidt of a Gaussian matrix).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let g = gaussian(rng, n, n);
        let q = orthonormalize(&g);
        if (q.transpose() * &q - DMatrix::identity(n, n)).amax() < 1e-12 {
            return q;
        }
    }
}

/// `Q1·diag(s)·Q2` with `s ∈ [0.5, 2]`, so the condition number is at most 4.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let s = DMatrix::from_fn(n, n, |i, j| if i == j { rng.random_range(0.5..2.0) } else { 0.0 });
    q1 * s * q2
}

/// Random `d`-dimensional subspace of `inside`.
pub fn random_subspace_in(rng: &mut ChaCha8Rng, inside: &Subspace, d: usize) -> Subspace {
    let coeffs = orthonormalize(&gaussian(rng, inside.dim(), d));
    Subspace::from_frame_unchecked(orthonormalize(&(inside.frame() * coeffs)))
}

pub fn random_subspace(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Subspace {
    random_subspace_in(rng, &Subspace::full(n), d)
}

fn pattern_value(rng: &mut ChaCha8Rng, s: Sign) -> f64 {
    match s {
        Sign::Pos => rng.random_range(0.5..2.0),
        Sign::Neg => -rng.random_range(0.5..2.0),
        Sign::Zero => 0.0,
    }
}

/// Random symmetric matrix; with a pattern, `Mᵀ·diag(pattern)·M` for a
/// well-conditioned `M`, so the inertia is known by construction.
pub fn gen_symmetric(seed: &Seed, n: usize, pattern: Option<&[Sign]>) -> Result<SymMatrix> {
    let mut rng = seed.rng();
    sym_with_pattern(&mut rng, n, pattern)
}

fn sym_with_pattern(rng: &mut ChaCha8Rng, n: usize, pattern: Option<&[Sign]>) -> Result<SymMatrix> {
    match pattern {
        None => SymMatrix::new(gaussian_symmetric(rng, n)),
        Some(p) => {
            if p.len() != n {
                return Err(Error::domain(format!(
                    "signature pattern has length {} but n = {n}",
                    p.len()
                )));
            }
            let d: Vec<f64> = p.iter().map(|&s| pattern_value(rng, s)).collect();
            let m = well_conditioned(rng, n);
            Ok(SymMatrix::from_diagonal(&d).congruence(&m))
        }
    }
}

/// Kinds of engineered degeneracy relative to a subspace `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// `ker Q ∩ W ≠ 0`.
    KernelInW,
    /// `W ∩ W^{⊥Q} ≠ 0` through a vector that is not in `ker Q`.
    IsotropicInW,
    /// `ker Q ≠ 0` but meeting `W` trivially.
    KernelOutsideW,
}

/// Symmetric matrix in basis coordinates where `W` is spanned by the first
/// `d` basis vectors, carrying the requested degeneracies. Kinds that do not
/// fit the dimensions are skipped; the applied kinds are returned.
fn engineered(
    rng: &mut ChaCha8Rng,
    n: usize,
    d: usize,
    kinds: &[Degeneracy],
) -> (DMatrix<f64>, Vec<Degeneracy>) {
    let mut q = gaussian_symmetric(rng, n);
    let mut applied = Vec::new();
    let mut used_w = 0;
    for &k in kinds {
        match k {
            Degeneracy::KernelInW if used_w < d => {
                let i = used_w;
                used_w += 1;
                q.row_mut(i).fill(0.0);
                q.column_mut(i).fill(0.0);
                applied.push(k);
            }
            Degeneracy::IsotropicInW if used_w < d && d < n => {
                let i = used_w;
                used_w += 1;
                for j in 0..d {
                    q[(i, j)] = 0.0;
                    q[(j, i)] = 0.0;
                }
                // keep it out of the kernel
                if q.row(i).amax() < 0.25 {
                    q[(i, d)] = 1.0;
                    q[(d, i)] = 1.0;
                }
                applied.push(k);
            }
            _ => {}
        }
    }
    if kinds.contains(&Degeneracy::KernelOutsideW) && d < n {
        let mut u = DMatrix::zeros(n, 1);
        let tail = gaussian(rng, n - d, 1);
        u.view_mut((d, 0), (n - d, 1)).copy_from(&tail);
        let u = &u / u.norm();
        let p = DMatrix::identity(n, n) - &u * u.transpose();
        q = &p * q * &p;
        applied.push(Degeneracy::KernelOutsideW);
    }
    (q, applied)
}

fn pick_kinds(rng: &mut ChaCha8Rng) -> Vec<Degeneracy> {
    let all = [
        Degeneracy::KernelInW,
        Degeneracy::IsotropicInW,
        Degeneracy::KernelOutsideW,
    ];
    let mut kinds: Vec<Degeneracy> = all.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    if kinds.is_empty() {
        kinds.push(all[rng.random_range(0..3)]);
    }
    kinds
}

/// A form with a subspace, for the index formula.
#[derive(Debug, Clone)]
pub struct IndexInstance {
    pub q: BilinForm,
    pub w: Subspace,
    pub degeneracy: Vec<Degeneracy>,
}

/// Random `(Q, W)` with `dim W = d`; with `degenerate`, one or more
/// [`Degeneracy`] kinds are engineered.
pub fn gen_index_instance(seed: &Seed, n: usize, d: usize, degenerate: bool) -> Result<IndexInstance> {
    if d > n || n == 0 {
        return Err(Error::domain("need 0 ≤ d ≤ n and n ≥ 1"));
    }
    let mut rng = seed.rng();
    let mut kinds = if degenerate { pick_kinds(&mut rng) } else { Vec::new() };
    if degenerate && (d == 0 || d == n) {
        // the only kind that always fits
        kinds.push(if d == 0 { Degeneracy::KernelOutsideW } else { Degeneracy::KernelInW });
    }
    let (qb, applied) = engineered(&mut rng, n, d, &kinds);
    let b = random_orthogonal(&mut rng, n);
    let q = BilinForm::symmetric(&b * qb * b.transpose())?;
    let w = Subspace::from_frame_unchecked(b.columns(0, d).into_owned());
    Ok(IndexInstance {
        q,
        w,
        degeneracy: applied,
    })
}

/// Options for [`gen_form_path`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathOptions {
    pub closed: bool,
    pub invertible: bool,
    pub constant_kernel_dim: Option<usize>,
    pub endpoint_pattern: Option<Vec<Sign>>,
}

fn random_mesh(rng: &mut ChaCha8Rng, segments: usize) -> Vec<f64> {
    let mut acc = vec![0.0];
    for _ in 0..segments {
        let step: f64 = rng.random_range(0.5..1.5);
        acc.push(acc[acc.len() - 1] + step);
    }
    let total = acc[segments];
    let mut mesh: Vec<f64> = acc.iter().map(|t| t / total).collect();
    mesh[segments] = 1.0;
    mesh
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = gaussian(rng, n, n);
    let scale = if n > 0 { 1.0 / n as f64 } else { 1.0 };
    &a * a.transpose() * scale + DMatrix::identity(n, n) * 0.5
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

/// Random piecewise-linear path on `[0, 1]` with `mesh_size` segments.
///
/// `invertible` paths are `Gᵀ·(P_t ⊕ −N_t)·G` with positive definite
/// blocks and a fixed invertible `G`, so every interpolated sample is
/// invertible too. `constant_kernel_dim = r` prepends a zero block of size
/// `r` before the congruence. `endpoint_pattern` fixes the inertia of both
/// endpoint samples.
pub fn gen_form_path(seed: &Seed, n: usize, mesh_size: usize, options: &PathOptions) -> Result<FormPath> {
    if mesh_size == 0 {
        return Err(Error::domain("a path needs at least one segment"));
    }
    let r = options.constant_kernel_dim.unwrap_or(0);
    if r > n {
        return Err(Error::domain("constant kernel dimension exceeds n"));
    }
    let structured = options.invertible || options.constant_kernel_dim.is_some();
    if options.invertible && r > 0 {
        return Err(Error::domain("an invertible path cannot have a kernel"));
    }
    if structured && options.endpoint_pattern.is_some() {
        return Err(Error::domain("endpoint pattern conflicts with a structured path"));
    }
    let mut rng = seed.rng();
    let mesh = random_mesh(&mut rng, mesh_size);
    let count = mesh.len();
    let mut samples: Vec<SymMatrix> = Vec::with_capacity(count);
    if structured {
        let m = n - r;
        let pos = rng.random_range(0..=m);
        let g = well_conditioned(&mut rng, n);
        for _ in 0..count {
            let inner = block_diag(&spd(&mut rng, pos), &(-spd(&mut rng, m - pos)));
            let x = block_diag(&DMatrix::zeros(r, r), &inner);
            samples.push(SymMatrix::new(g.transpose() * x * &g)?);
        }
    } else {
        for k in 0..count {
            let endpoint = k == 0 || k + 1 == count;
            let s = match (&options.endpoint_pattern, endpoint) {
                (Some(p), true) => sym_with_pattern(&mut rng, n, Some(p))?,
                _ => SymMatrix::new(gaussian_symmetric(&mut rng, n))?,
            };
            samples.push(s);
        }
    }
    if options.closed {
        samples[count - 1] = samples[0].clone();
    }
    FormPath::new(mesh, samples)
}

/// Invertible matrices `I + E_t` with `‖E_t‖ = 1/2`, one per mesh point.
pub fn gen_gl_path(seed: &Seed, n: usize, points: usize) -> Vec<DMatrix<f64>> {
    let mut rng = seed.rng();
    (0..points)
        .map(|_| {
            let e = gaussian(&mut rng, n, n);
            let nrm = spectral_norm(&e);
            let e = if nrm > 0.0 { e * (0.5 / nrm) } else { e };
            DMatrix::identity(n, n) + e
        })
        .collect()
}

/// A path together with a finite-codimension subspace.
#[derive(Debug, Clone)]
pub struct RestrictionInstance {
    pub path: FormPath,
    pub v: Subspace,
    /// Engineered degeneracies at `a` and `b`.
    pub at_a: Vec<Degeneracy>,
    pub at_b: Vec<Degeneracy>,
}

/// Random `(path, V)` with `codim V = codim` and `mesh_size` segments.
/// With `degenerate`, endpoint samples carry engineered degeneracies with
/// respect to both `H` and `V`.
pub fn gen_restriction_instance(
    seed: &Seed,
    n: usize,
    codim: usize,
    mesh_size: usize,
    degenerate: bool,
    closed: bool,
) -> Result<RestrictionInstance> {
    if codim > n || mesh_size == 0 {
        return Err(Error::domain("need codim ≤ n and at least one segment"));
    }
    let mut rng = seed.rng();
    let d = n - codim;
    let mesh = random_mesh(&mut rng, mesh_size);
    let b = random_orthogonal(&mut rng, n);
    let count = mesh.len();
    let mut samples_b = Vec::with_capacity(count);
    let (mut at_a, mut at_b) = (Vec::new(), Vec::new());
    for k in 0..count {
        let end = k == 0 || k + 1 == count;
        if end && degenerate && rng.random_bool(0.8) {
            let kinds = pick_kinds(&mut rng);
            let (q, applied) = engineered(&mut rng, n, d, &kinds);
            if k == 0 {
                at_a = applied;
            } else {
                at_b = applied;
            }
            samples_b.push(q);
        } else {
            samples_b.push(gaussian_symmetric(&mut rng, n));
        }
    }
    if closed {
        samples_b[count - 1] = samples_b[0].clone();
        at_b = at_a.clone();
    }
    let samples = samples_b
        .into_iter()
        .map(|q| SymMatrix::new(&b * q * b.transpose()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictionInstance {
        path: FormPath::new(mesh, samples)?,
        v: Subspace::from_frame_unchecked(b.columns(0, d).into_owned()),
        at_a,
        at_b,
    })
}

/// Retry budget of [`find_nondegenerate_subspace`].
pub const SEARCH_BUDGET: usize = 1000;

/// Random subspace of codimension `codim` inside `inside` on which both
/// forms are nondegenerate.
pub fn find_nondegenerate_subspace(
    q1: &BilinForm,
    q2: &BilinForm,
    inside: &Subspace,
    codim: usize,
    seed: &Seed,
    policy: &TolerancePolicy,
) -> Result<Subspace> {
    if codim > inside.dim() {
        return Err(Error::domain("codimension exceeds the dimension of the search space"));
    }
    let d = inside.dim() - codim;
    let mut rng = seed.rng();
    let (mut min1, mut min2) = (usize::MAX, usize::MAX);
    for _ in 0..SEARCH_BUDGET {
        let s = random_subspace_in(&mut rng, inside, d);
        let n1 = nullity_on(q1, &s, policy)?;
        let n2 = nullity_on(q2, &s, policy)?;
        min1 = min1.min(n1);
        min2 = min2.min(n2);
        if n1 == 0 && n2 == 0 {
            debug_assert!(is_nondegenerate_on(q1, &s, policy)? && is_nondegenerate_on(q2, &s, policy)?);
            return Ok(s);
        }
    }
    Err(Error::SearchExhausted {
        attempts: SEARCH_BUDGET,
        min_nullity_first: min1,
        min_nullity_second: min2,
    })
}

fn nullity_on(q: &BilinForm, s: &Subspace, policy: &TolerancePolicy) -> Result<usize> {
    Ok(index_nullity(&restrict(q, s, policy)?, policy)?.nullity)
}

/// Random `k`-dimensional isotropic subspace by symplectic Gram–Schmidt.
pub fn random_isotropic(
    rng: &mut ChaCha8Rng,
    space: &SymplecticSpace,
    k: usize,
) -> Result<Subspace> {
    let dim = space.dim();
    if k > space.n() {
        return Err(Error::domain("isotropic subspaces have dimension at most n"));
    }
    let om = space.omega_matrix();
    let w = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x.transpose() * om * y)[(0, 0)];
    let mut es: Vec<DMatrix<f64>> = Vec::new();
    let mut fs: Vec<DMatrix<f64>> = Vec::new();
    let reduce = |x: DMatrix<f64>, es: &[DMatrix<f64>], fs: &[DMatrix<f64>]| {
        let mut x = x;
        for (e, f) in es.iter().zip(fs.iter()) {
            x = &x - e * w(&x, f) + f * w(&x, e);
        }
        x
    };
    while es.len() < k {
        let e = reduce(gaussian(rng, dim, 1), &es, &fs);
        let f = reduce(gaussian(rng, dim, 1), &es, &fs);
        let p = w(&e, &f);
        if p.abs() < 1e-3 * e.norm() * f.norm() {
            continue;
        }
        es.push(e);
        fs.push(f / p);
    }
    let mut frame = DMatrix::zeros(dim, k);
    for (j, e) in es.iter().enumerate() {
        frame.set_column(j, &e.column(0));
    }
    column_space(&frame, &TolerancePolicy::default())
}

/// Random graph `span([I; A])` with `A` symmetric; Lagrangian for the standard form.
pub fn random_graph_lagrangian(
    rng: &mut ChaCha8Rng,
    space: &SymplecticSpace,
    policy: &TolerancePolicy,
) -> Result<Lagrangian> {
    let n = space.n();
    let a = gaussian_symmetric(rng, n);
    let mut m = DMatrix::zeros(2 * n, n);
    m.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
    m.view_mut((n, 0), (n, n)).copy_from(&a);
    Lagrangian::new(space, column_space(&m, policy)?, policy)
}

/// Options for [`gen_lagrangian_scenario`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LagrangianOptions {
    /// Some interior sample meets `l0`.
    pub hit_l0: bool,
    /// Endpoint samples meet `l0` in engineered positions relative to `V`.
    pub degenerate_endpoints: bool,
}

/// A reduction scenario.
#[derive(Debug, Clone)]
pub struct LagrangianScenario {
    pub space: SymplecticSpace,
    pub setup: ReductionSetup,
    pub l0: Lagrangian,
    /// A complement of `l0` containing `w_perp`; the path is charted over it.
    pub l1: Lagrangian,
    pub path: LagrangianPath,
    /// Index of a sample engineered to meet `l0`, if any.
    pub hit_sample: Option<usize>,
}

/// Step bound used when sampling generated Lagrangian paths.
pub const SCENARIO_STEP: f64 = 0.1;

/// Step bound for the reduced image of generated paths.
pub const REDUCED_STEP: f64 = 0.2;

/// Random reduction scenario in standard `R^{2n}` with `codim w = k`.
///
/// The path is the image under the inverse chart over `(l0, l1)` of a
/// piecewise-linear path of symmetric forms, with `l1 ⊇ w_perp`; such
/// graphs never meet `w_perp`. Forms with a kernel give samples that meet
/// `l0` (the kernel of the chart form is `ℓ ∩ l0`), placed relative to
/// `V = l0 ∩ w` as requested.
pub fn gen_lagrangian_scenario(
    seed: &Seed,
    n: usize,
    k: usize,
    options: &LagrangianOptions,
    policy: &TolerancePolicy,
) -> Result<LagrangianScenario> {
    if n == 0 || (k > 0 && k >= n) {
        return Err(Error::domain("need n ≥ 1 and k = 0 or 1 ≤ k ≤ n − 1"));
    }
    let mut rng = seed.rng();
    let space = standard_space(n)?;
    let iso = random_isotropic(&mut rng, &space, k)?;
    let w = perp(space.omega(), &iso, policy)?;
    let setup = make_reduction(&space, &w, policy)?;
    let l0 = loop {
        let l0 = random_graph_lagrangian(&mut rng, &space, policy)?;
        if intersect(l0.sub(), setup.w_perp(), policy)?.dim() == 0 {
            break l0;
        }
    };
    let shear = gaussian_symmetric(&mut rng, n - k) * 0.5;
    let l1 = lagrangian_complement_steered(&l0, Some(setup.w_perp()), Some(&shear), policy)?;

    // V = l0 ∩ w in l0's frame coordinates, completed to an orthonormal basis
    let v = intersect(l0.sub(), setup.w(), policy)?;
    let vc = l0.sub().coords_of(&v);
    let dv = vc.ncols();
    let rest = complement(&column_space(&vc, policy)?);
    let mut basis = DMatrix::zeros(n, n);
    basis.columns_mut(0, dv).copy_from(&vc);
    basis.columns_mut(dv, n - dv).copy_from(rest.frame());
    let basis = orthonormalize(&basis);

    let segments = rng.random_range(2..=5);
    let mesh = random_mesh(&mut rng, segments);
    let count = mesh.len();
    let hit = if options.hit_l0 {
        Some(rng.random_range(1..count - 1))
    } else {
        None
    };
    let mut forms = Vec::with_capacity(count);
    for j in 0..count {
        let end = j == 0 || j + 1 == count;
        let engineered_here = (end && options.degenerate_endpoints && rng.random_bool(0.8)) || hit == Some(j);
        let qb = if engineered_here {
            let mut kinds = pick_kinds(&mut rng);
            if hit == Some(j) {
                // a hit needs a kernel, inside or outside V
                kinds.push(if dv < n { Degeneracy::KernelOutsideW } else { Degeneracy::KernelInW });
            }
            engineered(&mut rng, n, dv, &kinds).0
        } else {
            gaussian_symmetric(&mut rng, n)
        };
        forms.push((&basis * qb * basis.transpose()) * 1.5);
    }
    let path_forms = FormPath::new(
        mesh.clone(),
        forms.into_iter().map(SymMatrix::new).collect::<Result<Vec<_>>>()?,
    )?;

    let sampler = |t: f64| -> Result<Subspace> {
        let q = path_forms.at(t)?;
        let form = BilinForm::on_subspace(l0.sub().clone(), q.into_matrix(), Symmetry::Symmetric)?;
        Ok(unchart(&l0, &l1, &form, policy)?.sub().clone())
    };
    // piecewise sampling keeps every form mesh point, engineered ones included
    let mut lmesh: Vec<f64> = Vec::new();
    let mut lsamples = Vec::new();
    for j in 0..count - 1 {
        let piece = LagrangianPath::from_sampler_with_step(
            &space,
            mesh[j],
            mesh[j + 1],
            4,
            SCENARIO_STEP,
            sampler,
            policy,
        )?;
        let skip = usize::from(j > 0);
        lmesh.extend_from_slice(&piece.mesh()[skip..]);
        lsamples.extend_from_slice(&piece.samples()[skip..]);
    }
    let path = LagrangianPath::new(&space, lmesh, lsamples, policy)?;
    // refine further where the reduced path moves too fast
    let (path, _) = reduce_path_sampled(&setup, &path, sampler, REDUCED_STEP, policy)?;
    let hit_sample = hit.and_then(|h| path.mesh().iter().position(|&t| t == mesh[h]));
    Ok(LagrangianScenario {
        space,
        setup,
        l0,
        l1,
        path,
        hit_sample,
    })
}

/// Random Hamiltonian flow `t ↦ exp(t·X)·L` on `[0, 1]` in standard
/// `R^{2n}`, with a random reference Lagrangian.
pub fn gen_maslov_path(
    seed: &Seed,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<(SymplecticSpace, Lagrangian, LagrangianPath)> {
    let mut rng = seed.rng();
    let space = standard_space(n)?;
    let l0 = random_graph_lagrangian(&mut rng, &space, policy)?;
    let start = random_graph_lagrangian(&mut rng, &space, policy)?;
    let s = gaussian_symmetric(&mut rng, 2 * n) * 2.0;
    // X = Ω⁻¹·S is Hamiltonian for ω(x, y) = xᵀ·Ω·y
    let x = -(space.omega_matrix() * s);
    let f0 = start.frame().clone();
    let path = LagrangianPath::from_sampler_with_step(
        &space,
        0.0,
        1.0,
        16,
        SCENARIO_STEP,
        |t| column_space(&((&x * t).exp() * &f0), policy),
        policy,
    )?;
    Ok((space, l0, path))
}
