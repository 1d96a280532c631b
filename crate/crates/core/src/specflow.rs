//! Paths of symmetric forms and their spectral flow.
//!
//! A [`FormPath`] is piecewise linear in the matrix entries between mesh
//! points. Spectral flow counts eigenvalues crossing zero upwards, with the
//! convention that an eigenvalue equal to zero (within the threshold
//! `rank_tol·scale`) sits on the nonnegative side. Under that convention the
//! flow of any finite-dimensional path is `ind Q_a − ind Q_b`; a different
//! endpoint convention would shift endpoint terms by kernel dimensions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::{eigvalsh, intersect, svd, Subspace, SymMatrix, TolerancePolicy};
use crate::quadform::{index_nullity, kernel_of, perp, restrict, BilinForm};

/// Piecewise-linear path `t ↦ Q_t` over a strictly increasing mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FormPath {
    mesh: Vec<f64>,
    samples: Vec<SymMatrix>,
    scale: f64,
}

impl FormPath {
    pub fn new(mesh: Vec<f64>, samples: Vec<SymMatrix>) -> Result<Self> {
        if mesh.len() < 2 {
            return Err(Error::domain("a path needs at least two mesh points"));
        }
        if mesh.len() != samples.len() {
            return Err(Error::domain(format!(
                "{} mesh points but {} samples",
                mesh.len(),
                samples.len()
            )));
        }
        if mesh.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("path mesh"));
        }
        if mesh.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("mesh must be strictly increasing"));
        }
        let n = samples[0].dim();
        if samples.iter().any(|s| s.dim() != n) {
            return Err(Error::domain("path samples differ in dimension"));
        }
        let scale = samples.iter().map(SymMatrix::norm).fold(0.0, f64::max);
        Ok(Self {
            mesh,
            samples,
            scale,
        })
    }

    /// Samples `f` at the mesh points.
    pub fn from_fn(mesh: Vec<f64>, f: impl Fn(f64) -> SymMatrix) -> Result<Self> {
        let samples = mesh.iter().map(|&t| f(t)).collect();
        Self::new(mesh, samples)
    }

    /// Linear path between two forms on `[a, b]`.
    pub fn linear(a: f64, b: f64, start: SymMatrix, end: SymMatrix) -> Result<Self> {
        Self::new(vec![a, b], vec![start, end])
    }

    pub fn constant(a: f64, b: f64, q: SymMatrix) -> Result<Self> {
        Self::new(vec![a, b], vec![q.clone(), q])
    }

    pub(crate) fn with_scale_floor(mut self, scale: f64) -> Self {
        self.scale = self.scale.max(scale);
        self
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn samples(&self) -> &[SymMatrix] {
        &self.samples
    }

    pub fn a(&self) -> f64 {
        self.mesh[0]
    }

    pub fn b(&self) -> f64 {
        self.mesh[self.mesh.len() - 1]
    }

    pub fn start(&self) -> &SymMatrix {
        &self.samples[0]
    }

    pub fn end(&self) -> &SymMatrix {
        &self.samples[self.samples.len() - 1]
    }

    /// Largest sample norm (or an inherited larger value).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn threshold(&self, policy: &TolerancePolicy) -> f64 {
        policy.threshold(self.scale)
    }

    /// Endpoint (or any sample) as a form judged at the path's scale.
    pub fn form_at_sample(&self, k: usize) -> BilinForm {
        BilinForm::from_sym(&self.samples[k]).with_scale_floor(self.scale)
    }

    pub fn start_form(&self) -> BilinForm {
        self.form_at_sample(0)
    }

    pub fn end_form(&self) -> BilinForm {
        self.form_at_sample(self.samples.len() - 1)
    }

    /// `Q_t` for `t ∈ [a, b]`.
    pub fn at(&self, t: f64) -> Result<SymMatrix> {
        if !(self.a() <= t && t <= self.b()) {
            return Err(Error::domain(format!(
                "t = {t} outside [{}, {}]",
                self.a(),
                self.b()
            )));
        }
        let k = self.segment_of(t);
        let (t0, t1) = (self.mesh[k], self.mesh[k + 1]);
        if t == t0 {
            return Ok(self.samples[k].clone());
        }
        if t == t1 {
            return Ok(self.samples[k + 1].clone());
        }
        Ok(self.samples[k].lerp(&self.samples[k + 1], (t - t0) / (t1 - t0)))
    }

    fn segment_of(&self, t: f64) -> usize {
        let last = self.mesh.len() - 2;
        match self.mesh.binary_search_by(|m| m.total_cmp(&t)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    /// First and last samples agree within `rank_tol·scale`.
    pub fn is_closed(&self, policy: &TolerancePolicy) -> bool {
        self.start().max_abs_diff(self.end()) <= self.threshold(policy)
    }

    /// The same path traversed backwards on the same interval.
    pub fn reversed(&self) -> FormPath {
        let (a, b) = (self.a(), self.b());
        FormPath {
            mesh: self.mesh.iter().rev().map(|&t| a + b - t).collect(),
            samples: self.samples.iter().rev().cloned().collect(),
            scale: self.scale,
        }
    }

    /// Splits at the interior mesh point with index `k`.
    pub fn split_at(&self, k: usize) -> Result<(FormPath, FormPath)> {
        if k == 0 || k + 1 >= self.mesh.len() {
            return Err(Error::domain("split index must be an interior mesh point"));
        }
        let left = FormPath::new(self.mesh[..=k].to_vec(), self.samples[..=k].to_vec())?;
        let right = FormPath::new(self.mesh[k..].to_vec(), self.samples[k..].to_vec())?;
        Ok((left, right))
    }

    /// The same path on a finer mesh containing `points`.
    pub fn refined(&self, points: &[f64]) -> Result<FormPath> {
        let mut mesh: Vec<f64> = self.mesh.iter().chain(points.iter()).copied().collect();
        mesh.sort_by(|x, y| x.total_cmp(y));
        mesh.dedup();
        let samples = mesh.iter().map(|&t| self.at(t)).collect::<Result<Vec<_>>>()?;
        Ok(FormPath::new(mesh, samples)?.with_scale_floor(self.scale))
    }
}

/// Evidence for a spectral-flow value: on each subinterval no eigenvalue of
/// any `Q_t` equals the barrier `ε_i`, by a Weyl-bound margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SfCertificate {
    pub partition: Vec<f64>,
    pub barriers: Vec<f64>,
    pub margins: Vec<f64>,
    pub flow: i64,
}

impl SfCertificate {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

struct Certifier<'a> {
    policy: &'a TolerancePolicy,
    theta: f64,
    cap: f64,
    cert: SfCertificate,
}

impl Certifier<'_> {
    /// Barrier in `[θ, cap]` as far as possible from `spectrum`; returns
    /// `(ε, distance)`.
    fn barrier(&self, spectrum: &DVector<f64>) -> (f64, f64) {
        let lo_b = self.theta;
        let hi_b = self.cap.max(lo_b);
        let n = spectrum.len();
        let mut best = (0.5 * (lo_b + hi_b), f64::NEG_INFINITY);
        for g in 0..=n {
            let lo = if g == 0 { f64::NEG_INFINITY } else { spectrum[g - 1] };
            let hi = if g == n { f64::INFINITY } else { spectrum[g] };
            let (l, h) = (lo.max(lo_b), hi.min(hi_b));
            if l > h {
                continue;
            }
            let eps = 0.5 * (l + h);
            let score = (eps - lo).min(hi - eps);
            if score > best.1 {
                best = (eps, score);
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn certify(
        &mut self,
        t0: f64,
        t1: f64,
        q0: &SymMatrix,
        q1: &SymMatrix,
        e0: &DVector<f64>,
        e1: &DVector<f64>,
        depth: usize,
    ) -> Result<()> {
        let mid = q0.lerp(q1, 0.5);
        let radius = 0.5 * (q1 - q0).norm();
        let em = eigvalsh(&mid)?;
        let (eps, score) = self.barrier(&em);
        let margin = score - radius;
        if margin > self.theta {
            let lower = -self.theta;
            let count = |e: &DVector<f64>| e.iter().filter(|&&v| v >= lower && v < eps).count() as i64;
            self.cert.flow += count(e1) - count(e0);
            self.cert.partition.push(t1);
            self.cert.barriers.push(eps);
            self.cert.margins.push(margin);
            return Ok(());
        }
        if depth >= self.policy.refine_limit {
            return Err(Error::Certification {
                t0,
                t1,
                refinements: depth,
            });
        }
        let tm = 0.5 * (t0 + t1);
        self.certify(t0, tm, q0, &mid, e0, &em, depth + 1)?;
        self.certify(tm, t1, &mid, q1, &em, e1, depth + 1)
    }
}

/// Certified spectral flow over `[a, b]`.
pub fn spectral_flow(p: &FormPath, policy: &TolerancePolicy) -> Result<SfCertificate> {
    policy.validate()?;
    let theta = p.threshold(policy);
    let mut c = Certifier {
        policy,
        theta,
        cap: if p.scale > 0.0 { p.scale } else { 1.0 },
        cert: SfCertificate {
            partition: vec![p.a()],
            barriers: Vec::new(),
            margins: Vec::new(),
            flow: 0,
        },
    };
    let eig: Vec<DVector<f64>> = p.samples.iter().map(eigvalsh).collect::<Result<_>>()?;
    for k in 0..p.mesh.len() - 1 {
        c.certify(
            p.mesh[k],
            p.mesh[k + 1],
            &p.samples[k],
            &p.samples[k + 1],
            &eig[k],
            &eig[k + 1],
            0,
        )?;
    }
    Ok(c.cert)
}

/// Minimum sampling density accepted by [`spectral_flow_oracle`].
pub const ORACLE_MIN_SAMPLES: usize = 100;
const ORACLE_MAX_DEPTH: usize = 20;

/// Dense-sampling cross-check for [`spectral_flow`].
///
/// Eigenvalues of consecutive samples are paired greedily by distance and
/// each pair that moves between `< −θ` and `≥ −θ` counts as a crossing.
/// A step where a crossing eigenvalue could as well have stayed on its side
/// is subdivided; if that does not settle it the oracle gives up. This
/// is a heuristic and is meant for differential testing only.
pub fn spectral_flow_oracle(
    p: &FormPath,
    samples_per_segment: usize,
    policy: &TolerancePolicy,
) -> Result<i64> {
    if samples_per_segment < ORACLE_MIN_SAMPLES {
        return Err(Error::domain(format!(
            "oracle needs at least {ORACLE_MIN_SAMPLES} samples per segment"
        )));
    }
    let theta = p.threshold(policy);
    let mut flow = 0;
    for k in 0..p.mesh.len() - 1 {
        let (t0, t1) = (p.mesh[k], p.mesh[k + 1]);
        let (q0, q1) = (&p.samples[k], &p.samples[k + 1]);
        let at = |s: f64| -> SymMatrix {
            if s == 0.0 {
                q0.clone()
            } else if s == 1.0 {
                q1.clone()
            } else {
                q0.lerp(q1, s)
            }
        };
        let mut prev = eigvalsh(q0)?;
        for j in 1..=samples_per_segment {
            let s0 = (j - 1) as f64 / samples_per_segment as f64;
            let s1 = j as f64 / samples_per_segment as f64;
            let next = eigvalsh(&at(s1))?;
            flow += oracle_step(&at, s0, s1, &prev, &next, theta, 0)
                .map_err(|s| Error::OracleInconclusive {
                    t: t0 + s * (t1 - t0),
                    reason: "eigenvalue pairing ambiguous after subdivision".into(),
                })?;
            prev = next;
        }
    }
    Ok(flow)
}

fn oracle_step(
    at: &dyn Fn(f64) -> SymMatrix,
    s0: f64,
    s1: f64,
    prev: &DVector<f64>,
    next: &DVector<f64>,
    theta: f64,
    depth: usize,
) -> std::result::Result<i64, f64> {
    match pair_crossings(prev, next, theta) {
        Some(c) => Ok(c),
        None if depth < ORACLE_MAX_DEPTH => {
            let sm = 0.5 * (s0 + s1);
            let mid = eigvalsh(&at(sm)).map_err(|_| sm)?;
            Ok(oracle_step(at, s0, sm, prev, &mid, theta, depth + 1)?
                + oracle_step(at, sm, s1, &mid, next, theta, depth + 1)?)
        }
        None => Err(0.5 * (s0 + s1)),
    }
}

/// Greedy nearest pairing; `None` when a crossing eigenvalue has a
/// comparably close destination that does not cross.
fn pair_crossings(prev: &DVector<f64>, next: &DVector<f64>, theta: f64) -> Option<i64> {
    let n = prev.len();
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cand.push(((prev[i] - next[j]).abs(), i, j));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_i = vec![false; n];
    let mut used_j = vec![false; n];
    let mut flow = 0;
    for (d, i, j) in cand {
        if used_i[i] || used_j[j] {
            continue;
        }
        used_i[i] = true;
        used_j[j] = true;
        let below0 = prev[i] < -theta;
        let below1 = next[j] < -theta;
        if below0 == below1 {
            continue;
        }
        // a destination on the starting side about as close would undo the
        // crossing; a sample inside the zero band settles it either way
        let at_zero = prev[i].abs() <= 2.0 * theta || next[j].abs() <= 2.0 * theta;
        let alt = (0..n)
            .filter(|&m| m != j && (next[m] < -theta) == below0)
            .map(|m| (next[m] - prev[i]).abs())
            .fold(f64::INFINITY, f64::min);
        if !at_zero && alt <= 2.0 * d + theta {
            return None;
        }
        flow += if below0 { 1 } else { -1 };
    }
    Some(flow)
}

/// Eigenvalues at `samples_per_segment + 1` evenly spaced times per mesh
/// segment (shared endpoints listed once).
pub fn eigen_tracks(p: &FormPath, samples_per_segment: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let per = samples_per_segment.max(1);
    let mut out = Vec::new();
    for k in 0..p.mesh.len() - 1 {
        let (t0, t1) = (p.mesh[k], p.mesh[k + 1]);
        let first = if k == 0 { 0 } else { 1 };
        for j in first..=per {
            let s = j as f64 / per as f64;
            let q = match j {
                0 => p.samples[k].clone(),
                j if j == per => p.samples[k + 1].clone(),
                _ => p.samples[k].lerp(&p.samples[k + 1], s),
            };
            out.push((t0 + s * (t1 - t0), eigvalsh(&q)?.iter().copied().collect()));
        }
    }
    Ok(out)
}

/// Samplewise restriction `t ↦ Q_t|_v` in `v`'s frame, judged at the
/// scale of the original path.
pub fn restrict_path(p: &FormPath, v: &Subspace, policy: &TolerancePolicy) -> Result<FormPath> {
    if v.ambient_dim() != p.dim() {
        return Err(Error::domain(format!(
            "subspace lives in R^{} but the path acts on R^{}",
            v.ambient_dim(),
            p.dim()
        )));
    }
    let samples = (0..p.samples.len())
        .map(|k| restrict(&p.form_at_sample(k), v, policy).and_then(|f| f.sym_matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormPath::new(p.mesh.clone(), samples)?.with_scale_floor(p.scale))
}

fn endpoint_terms(q: &BilinForm, v: &Subspace, policy: &TolerancePolicy) -> Result<i64> {
    let vp = perp(q, v, policy)?;
    let ind = index_nullity(&restrict(q, &vp, policy)?, policy)?.index as i64;
    let v_vp = intersect(v, &vp, policy)?.dim() as i64;
    let v_ker = intersect(v, &kernel_of(q, policy)?, policy)?.dim() as i64;
    Ok(ind + v_vp - v_ker)
}

/// Both sides of the restriction formula for spectral flow:
/// `sf(Q) − sf(Q|_V)` and the endpoint expression
/// `Σ_{t=a,b} ± (ind Q_t|_{V^⊥} + dim(V ∩ V^⊥) − dim(V ∩ ker Q_t))`.
pub fn restriction_sides(p: &FormPath, v: &Subspace, policy: &TolerancePolicy) -> Result<(i64, i64)> {
    let restricted = restrict_path(p, v, policy)?;
    let lhs = spectral_flow(p, policy)?.flow - spectral_flow(&restricted, policy)?.flow;
    let rhs = endpoint_terms(&p.start_form(), v, policy)? - endpoint_terms(&p.end_form(), v, policy)?;
    Ok((lhs, rhs))
}

/// `p1` followed by `p2`, with `p2` shifted to start where `p1` ends.
pub fn concatenate(p1: &FormPath, p2: &FormPath, policy: &TolerancePolicy) -> Result<FormPath> {
    if p1.dim() != p2.dim() {
        return Err(Error::domain("paths differ in dimension"));
    }
    let scale = p1.scale.max(p2.scale);
    if p1.end().max_abs_diff(p2.start()) > policy.threshold(scale) {
        return Err(Error::domain("end of the first path differs from start of the second"));
    }
    let shift = p1.b() - p2.a();
    let mut mesh = p1.mesh.clone();
    mesh.extend(p2.mesh[1..].iter().map(|t| t + shift));
    let mut samples = p1.samples.clone();
    samples.extend(p2.samples[1..].iter().cloned());
    Ok(FormPath::new(mesh, samples)?.with_scale_floor(scale))
}

/// Brings two paths on the same interval onto their common mesh.
fn common_mesh(p1: &FormPath, p2: &FormPath) -> Result<(FormPath, FormPath)> {
    if p1.a() != p2.a() || p1.b() != p2.b() {
        return Err(Error::domain("paths are defined on different intervals"));
    }
    if p1.mesh == p2.mesh {
        return Ok((p1.clone(), p2.clone()));
    }
    Ok((p1.refined(&p2.mesh)?, p2.refined(&p1.mesh)?))
}

/// Block-diagonal path `Q¹_t ⊕ Q²_t`.
pub fn direct_sum(p1: &FormPath, p2: &FormPath) -> Result<FormPath> {
    let (p1, p2) = common_mesh(p1, p2)?;
    let samples = p1
        .samples
        .iter()
        .zip(p2.samples.iter())
        .map(|(x, y)| x.direct_sum(y))
        .collect();
    Ok(FormPath::new(p1.mesh.clone(), samples)?.with_scale_floor(p1.scale.max(p2.scale)))
}

/// Samplewise sum `Q_t + K_t`.
pub fn add(p: &FormPath, k: &FormPath) -> Result<FormPath> {
    if p.dim() != k.dim() {
        return Err(Error::domain("paths differ in dimension"));
    }
    let (p, k) = common_mesh(p, k)?;
    let samples = p.samples.iter().zip(k.samples.iter()).map(|(x, y)| x + y).collect();
    FormPath::new(p.mesh.clone(), samples)
}

/// Cogredient path `M_tᵀ·Q_t·M_t`, one `M` per mesh point.
pub fn conjugate(p: &FormPath, mpath: &[DMatrix<f64>], policy: &TolerancePolicy) -> Result<FormPath> {
    if mpath.len() != p.mesh.len() {
        return Err(Error::domain("need one matrix per mesh point"));
    }
    let n = p.dim();
    let mut samples = Vec::with_capacity(mpath.len());
    for (k, (m, q)) in mpath.iter().zip(p.samples.iter()).enumerate() {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::domain("conjugating matrix has the wrong shape"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("conjugating matrix"));
        }
        let smin = svd(m).sigma.iter().copied().fold(f64::INFINITY, f64::min);
        if n > 0 && smin <= policy.rank_tol {
            return Err(Error::domain(format!(
                "conjugating matrix at mesh point {k} is numerically singular (σ_min = {smin:.3e})"
            )));
        }
        samples.push(q.congruence(m));
    }
    FormPath::new(p.mesh.clone(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn d(v: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(v)
    }

    fn ramp(a: f64, b: f64) -> FormPath {
        FormPath::linear(a, b, d(&[a]), d(&[b])).unwrap()
    }

    fn both(p: &FormPath) -> (i64, i64) {
        (
            spectral_flow(p, &pol()).unwrap().flow,
            spectral_flow_oracle(p, 100, &pol()).unwrap(),
        )
    }

    #[test]
    fn single_upward_crossing() {
        assert_eq!(both(&ramp(-1.0, 1.0)), (1, 1));
    }

    #[test]
    fn zero_at_start_counts_nonnegative() {
        assert_eq!(both(&ramp(0.0, 1.0)), (0, 0));
    }

    #[test]
    fn opposite_crossings_cancel() {
        let p = FormPath::linear(-1.0, 1.0, d(&[-1.0, 1.0]), d(&[1.0, -1.0])).unwrap();
        assert_eq!(both(&p), (0, 0));
    }

    #[test]
    fn constant_and_zero_paths_have_no_flow() {
        let p = FormPath::constant(0.0, 1.0, d(&[1.0, 0.0, -2.0])).unwrap();
        assert_eq!(both(&p), (0, 0));
        let z = FormPath::constant(0.0, 1.0, SymMatrix::zeros(2)).unwrap();
        assert_eq!(both(&z), (0, 0));
    }

    #[test]
    fn certificate_shape() {
        let c = spectral_flow(&ramp(-1.0, 1.0), &pol()).unwrap();
        assert_eq!(c.partition.len(), c.barriers.len() + 1);
        assert_eq!(c.partition.first(), Some(&-1.0));
        assert_eq!(c.partition.last(), Some(&1.0));
        assert!(c.min_margin() > 0.0);
        assert!(c.barriers.iter().all(|&e| e > 0.0));
    }

    #[test]
    fn certification_gives_up_with_tiny_refine_limit() {
        let p = FormPath::linear(-1.0, 1.0, d(&[-1.0, -1.0]), d(&[1.0, 1.0])).unwrap();
        let tight = TolerancePolicy::new(1e-9, 1e-8, 1).unwrap();
        assert!(matches!(
            spectral_flow(&p, &tight),
            Err(Error::Certification { .. })
        ));
        assert_eq!(spectral_flow(&p, &pol()).unwrap().flow, 2);
    }

    #[test]
    fn oracle_rejects_sparse_sampling() {
        assert!(spectral_flow_oracle(&ramp(-1.0, 1.0), 10, &pol()).is_err());
    }

    #[test]
    fn restriction_examples() {
        let p = FormPath::linear(-1.0, 1.0, d(&[1.0, 1.0, -1.0]), d(&[1.0, 1.0, 1.0])).unwrap();
        let v = Subspace::coordinate(3, &[0, 1]);
        assert_eq!(restriction_sides(&p, &v, &pol()).unwrap(), (1, 1));

        let p = FormPath::linear(-1.0, 1.0, d(&[-1.0, 1.0, -1.0]), d(&[1.0, 1.0, -1.0])).unwrap();
        assert_eq!(restriction_sides(&p, &v, &pol()).unwrap(), (0, 0));
    }

    #[test]
    fn restrict_path_to_coordinate_block() {
        let p = FormPath::linear(0.0, 1.0, d(&[1.0, 2.0, 3.0]), d(&[4.0, 5.0, 6.0])).unwrap();
        let r = restrict_path(&p, &Subspace::coordinate(3, &[0, 2]), &pol()).unwrap();
        assert_eq!(r.start(), &d(&[1.0, 3.0]));
        assert_eq!(r.end(), &d(&[4.0, 6.0]));
        let full = restrict_path(&p, &Subspace::full(3), &pol()).unwrap();
        assert_eq!(full.samples(), p.samples());
    }

    #[test]
    fn concatenate_with_reversal_is_closed() {
        let p = ramp(-1.0, 2.0);
        let loop_ = concatenate(&p, &p.reversed(), &pol()).unwrap();
        assert!(loop_.is_closed(&pol()));
        assert_eq!(loop_.b(), 5.0);
        assert_eq!(spectral_flow(&loop_, &pol()).unwrap().flow, 0);
    }

    #[test]
    fn split_and_rejoin_round_trips() {
        let p = FormPath::new(vec![0.0, 0.5, 1.0], vec![d(&[-1.0]), d(&[0.5]), d(&[2.0])]).unwrap();
        let (l, r) = p.split_at(1).unwrap();
        let back = concatenate(&l, &r, &pol()).unwrap();
        assert_eq!(back.mesh(), p.mesh());
        assert_eq!(back.samples(), p.samples());
    }

    #[test]
    fn concatenate_rejects_gap() {
        assert!(concatenate(&ramp(-1.0, 1.0), &ramp(0.0, 2.0), &pol()).is_err());
    }

    #[test]
    fn direct_sum_adds_flow() {
        let p = direct_sum(&ramp(-1.0, 1.0), &FormPath::linear(-1.0, 1.0, d(&[0.0]), d(&[1.0])).unwrap()).unwrap();
        assert_eq!(spectral_flow(&p, &pol()).unwrap().flow, 1);
        let empty = FormPath::constant(-1.0, 1.0, SymMatrix::zeros(0)).unwrap();
        let q = direct_sum(&ramp(-1.0, 1.0), &empty).unwrap();
        assert_eq!(q.samples(), ramp(-1.0, 1.0).samples());
    }

    #[test]
    fn direct_sum_resamples_mismatched_meshes() {
        let p1 = FormPath::new(vec![0.0, 0.5, 1.0], vec![d(&[-1.0]), d(&[0.0]), d(&[1.0])]).unwrap();
        let p2 = FormPath::linear(0.0, 1.0, d(&[2.0]), d(&[4.0])).unwrap();
        let s = direct_sum(&p1, &p2).unwrap();
        assert_eq!(s.mesh(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.samples()[1], d(&[0.0, 3.0]));
    }

    #[test]
    fn conjugation_examples() {
        let p = FormPath::linear(-1.0, 1.0, d(&[-1.0, 2.0]), d(&[1.0, -3.0])).unwrap();
        let id = vec![DMatrix::identity(2, 2); 2];
        assert_eq!(conjugate(&p, &id, &pol()).unwrap().samples(), p.samples());
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let q = conjugate(&p, &[rot.clone(), rot], &pol()).unwrap();
        assert_eq!(spectral_flow(&q, &pol()).unwrap().flow, spectral_flow(&p, &pol()).unwrap().flow);
        let sing = vec![DMatrix::zeros(2, 2); 2];
        assert!(conjugate(&p, &sing, &pol()).is_err());
    }

    #[test]
    fn tracks_cover_the_mesh() {
        let tr = eigen_tracks(&ramp(-1.0, 1.0), 4).unwrap();
        assert_eq!(tr.len(), 5);
        assert_eq!(tr[2], (0.0, vec![0.0]));
    }
}
