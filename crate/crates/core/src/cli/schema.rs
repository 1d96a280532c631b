//! Scenario, instance and report file formats (JSON).
//!
//! Matrices are row-major arrays of rows. Subspaces are given by frames
//! whose columns span them; frames need not be orthonormal.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::numkern::{column_space, SymMatrix, TolerancePolicy};
use crate::quadform::BilinForm;
use crate::specflow::FormPath;
use crate::symplectic::{standard_space, Lagrangian, LagrangianPath, SymplecticSpace};
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Index of a form against a subspace and its perp.
    #[serde(alias = "eq1")]
    Index,
    Sf,
    /// Structural spectral-flow properties: invertible paths, concatenation,
    /// direct sums, cogredience, closed perturbations, constant kernels.
    Properties,
    /// Spectral flow against the flow of the restricted path.
    #[serde(alias = "thm1")]
    Restriction,
    /// Closed paths restricted to a finite-codimension subspace.
    Closed,
    Maslov,
    /// Maslov index against the index of the reduced path.
    #[serde(alias = "thm2")]
    Reduction,
    Identities,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Index => "index",
            SuiteKind::Sf => "sf",
            SuiteKind::Properties => "properties",
            SuiteKind::Restriction => "restriction",
            SuiteKind::Closed => "closed",
            SuiteKind::Maslov => "maslov",
            SuiteKind::Reduction => "reduction",
            SuiteKind::Identities => "identities",
        }
    }
}

/// Optional overrides of [`TolerancePolicy`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyOverride {
    pub rank_tol: Option<f64>,
    pub angle_tol: Option<f64>,
    pub refine_limit: Option<usize>,
}

impl PolicyOverride {
    pub fn apply(&self, mut p: TolerancePolicy) -> TolerancePolicy {
        if let Some(v) = self.rank_tol {
            p.rank_tol = v;
        }
        if let Some(v) = self.angle_tol {
            p.angle_tol = v;
        }
        if let Some(v) = self.refine_limit {
            p.refine_limit = v;
        }
        p
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trials: usize,
    /// Inclusive dimension range; its meaning depends on the suite.
    pub dims: Option<[usize; 2]>,
    /// Codimensions to draw from (`codim V` for restriction/closed, `k` for reduction/identities).
    pub codims: Option<Vec<usize>>,
    pub mesh_max: Option<usize>,
    /// Share of trials built with engineered degeneracies.
    pub degenerate_fraction: Option<f64>,
    pub policy: Option<PolicyOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    pub kind: SuiteKind,
    #[serde(default)]
    pub parameters: Parameters,
    /// Instances evaluated after the generated trials; their schema is the
    /// instance schema matching `kind`.
    pub explicit_instances: Option<Vec<serde_json::Value>>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let s: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::domain(format!("scenario file: {e}")))?;
        check_version(&s.schema_version)?;
        if let Some(insts) = &s.explicit_instances {
            for (i, v) in insts.iter().enumerate() {
                Instance::from_value(s.kind.instance_kind()?, v.clone())
                    .map_err(|e| Error::domain(format!("explicit instance {i}: {e}")))?;
            }
        }
        if let Some(f) = s.parameters.degenerate_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::domain("degenerate_fraction must lie in [0, 1]"));
            }
        }
        if let Some([lo, hi]) = s.parameters.dims {
            if lo > hi {
                return Err(Error::domain("dims range is empty"));
            }
        }
        Ok(s)
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::domain(format!(
            "unsupported schema_version {v:?} (expected {SCHEMA_VERSION:?})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Index,
    Sf,
    Restriction,
    Maslov,
    Reduce,
}

impl SuiteKind {
    pub fn instance_kind(self) -> Result<InstanceKind> {
        Ok(match self {
            SuiteKind::Index => InstanceKind::Index,
            SuiteKind::Sf => InstanceKind::Sf,
            SuiteKind::Restriction | SuiteKind::Closed => InstanceKind::Restriction,
            SuiteKind::Maslov => InstanceKind::Maslov,
            SuiteKind::Reduction | SuiteKind::Identities => InstanceKind::Reduce,
            SuiteKind::Properties => {
                return Err(Error::domain("the properties suite takes no explicit instances"))
            }
        })
    }
}

/// Top level of an instance file for `compute`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    pub kind: InstanceKind,
    pub instance: serde_json::Value,
    pub policy: Option<PolicyOverride>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<(Instance, Option<PolicyOverride>)> {
        let f: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::domain(format!("instance file: {e}")))?;
        check_version(&f.schema_version)?;
        Ok((Instance::from_value(f.kind, f.instance)?, f.policy))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub q: Rows,
    pub w: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfSpec {
    pub mesh: Vec<f64>,
    pub samples: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionSpec {
    pub mesh: Vec<f64>,
    pub samples: Vec<Rows>,
    pub v: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaslovSpec {
    /// Defaults to the standard form of the right size.
    pub omega: Option<Rows>,
    pub l0: Rows,
    pub mesh: Vec<f64>,
    pub frames: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSpec {
    pub omega: Option<Rows>,
    /// Frame of the coisotropic subspace.
    pub w: Rows,
    pub l0: Rows,
    pub mesh: Vec<f64>,
    pub frames: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Index(IndexSpec),
    Sf(SfSpec),
    Restriction(RestrictionSpec),
    Maslov(MaslovSpec),
    Reduce(ReduceSpec),
}

impl Instance {
    pub fn from_value(kind: InstanceKind, v: serde_json::Value) -> Result<Self> {
        let e = |e: serde_json::Error| Error::domain(format!("instance: {e}"));
        let inst = match kind {
            InstanceKind::Index => Instance::Index(serde_json::from_value(v).map_err(e)?),
            InstanceKind::Sf => Instance::Sf(serde_json::from_value(v).map_err(e)?),
            InstanceKind::Restriction => Instance::Restriction(serde_json::from_value(v).map_err(e)?),
            InstanceKind::Maslov => Instance::Maslov(serde_json::from_value(v).map_err(e)?),
            InstanceKind::Reduce => Instance::Reduce(serde_json::from_value(v).map_err(e)?),
        };
        inst.check_shapes()?;
        Ok(inst)
    }

    /// Shape checks only; numerical validity is checked when the instance
    /// is built.
    fn check_shapes(&self) -> Result<()> {
        let all = |ms: &[Rows]| ms.iter().try_for_each(|m| to_matrix(m).map(|_| ()));
        match self {
            Instance::Index(s) => all(&[s.q.clone(), s.w.clone()]),
            Instance::Sf(s) => all(&s.samples),
            Instance::Restriction(s) => {
                all(&s.samples)?;
                to_matrix(&s.v).map(|_| ())
            }
            Instance::Maslov(s) => {
                all(&s.frames)?;
                to_matrix(&s.l0).map(|_| ())
            }
            Instance::Reduce(s) => {
                all(&s.frames)?;
                to_matrix(&s.l0)?;
                to_matrix(&s.w).map(|_| ())
            }
        }
    }
}

/// Row-major rows to a matrix; ragged input is rejected.
pub fn to_matrix(rows: &Rows) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::domain("ragged matrix"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_rows(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn space_for(omega: &Option<Rows>, dim: usize, policy: &TolerancePolicy) -> Result<SymplecticSpace> {
    match omega {
        Some(o) => SymplecticSpace::new(to_matrix(o)?, policy),
        None => {
            if !dim.is_multiple_of(2) {
                return Err(Error::domain("ambient dimension is odd"));
            }
            standard_space(dim / 2)
        }
    }
}

impl IndexSpec {
    pub fn build(&self, policy: &TolerancePolicy) -> Result<(BilinForm, crate::numkern::Subspace)> {
        let q = BilinForm::symmetric(to_matrix(&self.q)?)?;
        let w = column_space(&to_matrix(&self.w)?, policy)?;
        if w.ambient_dim() != q.dim() {
            return Err(Error::domain("subspace frame has the wrong number of rows"));
        }
        Ok((q, w))
    }
}

fn form_path(mesh: &[f64], samples: &[Rows]) -> Result<FormPath> {
    let samples = samples
        .iter()
        .map(|m| SymMatrix::new(to_matrix(m)?))
        .collect::<Result<Vec<_>>>()?;
    FormPath::new(mesh.to_vec(), samples)
}

impl SfSpec {
    pub fn build(&self) -> Result<FormPath> {
        form_path(&self.mesh, &self.samples)
    }

    pub fn from_path(p: &FormPath) -> Self {
        Self {
            mesh: p.mesh().to_vec(),
            samples: p.samples().iter().map(|s| to_rows(s.matrix())).collect(),
        }
    }
}

impl RestrictionSpec {
    pub fn build(&self, policy: &TolerancePolicy) -> Result<(FormPath, crate::numkern::Subspace)> {
        let p = form_path(&self.mesh, &self.samples)?;
        let v = column_space(&to_matrix(&self.v)?, policy)?;
        if v.ambient_dim() != p.dim() {
            return Err(Error::domain("subspace frame has the wrong number of rows"));
        }
        Ok((p, v))
    }
}

fn lagrangian_path(
    space: &SymplecticSpace,
    mesh: &[f64],
    frames: &[Rows],
    policy: &TolerancePolicy,
) -> Result<LagrangianPath> {
    let samples = frames
        .iter()
        .map(|f| column_space(&to_matrix(f)?, policy))
        .collect::<Result<Vec<_>>>()?;
    LagrangianPath::new(space, mesh.to_vec(), samples, policy)
}

impl MaslovSpec {
    pub fn build(&self, policy: &TolerancePolicy) -> Result<(Lagrangian, LagrangianPath)> {
        let l0m = to_matrix(&self.l0)?;
        let space = space_for(&self.omega, l0m.nrows(), policy)?;
        let l0 = Lagrangian::new(&space, column_space(&l0m, policy)?, policy)?;
        Ok((l0, lagrangian_path(&space, &self.mesh, &self.frames, policy)?))
    }
}

impl ReduceSpec {
    pub fn build(
        &self,
        policy: &TolerancePolicy,
    ) -> Result<(crate::reduction::ReductionSetup, Lagrangian, LagrangianPath)> {
        let l0m = to_matrix(&self.l0)?;
        let space = space_for(&self.omega, l0m.nrows(), policy)?;
        let w = column_space(&to_matrix(&self.w)?, policy)?;
        let setup = crate::reduction::make_reduction(&space, &w, policy)?;
        let l0 = Lagrangian::new(&space, column_space(&l0m, policy)?, policy)?;
        Ok((setup, l0, lagrangian_path(&space, &self.mesh, &self.frames, policy)?))
    }
}
