//! Randomized verification suites.
//!
//! Trial `i` of a run with master seed `s` depends only on `(s, i)` and the
//! scenario parameters, and trials are reported in index order, so reports
//! do not depend on the number of worker threads.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::schema::{
    to_rows, IndexSpec, Instance, Parameters, ScenarioFile, SfSpec, SuiteKind, RestrictionSpec,
    SCHEMA_VERSION,
};
use crate::numkern::{intersect, TolerancePolicy};
use crate::quadform::{index_formula_sides, index_nullity};
use crate::reduction::{chart_identities, reduction_detail, ReductionSetup};
use crate::scenarios::{
    gen_index_instance, gen_form_path, gen_gl_path, gen_lagrangian_scenario, gen_maslov_path,
    gen_restriction_instance, LagrangianOptions, PathOptions, Seed, Sign,
};
use crate::specflow::{
    add, concatenate, conjugate, direct_sum, restrict_path, spectral_flow, spectral_flow_oracle,
    restriction_sides, FormPath, ORACLE_MIN_SAMPLES,
};
use crate::symplectic::{maslov_index, maslov_oracle_seeded, ChartSegment, Lagrangian, LagrangianPath};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 1 runs inline.
    pub jobs: usize,
    /// Record wall times (makes reports differ between runs).
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    /// Leading hex digits of the SHA-256 of the trial inputs.
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<i64>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<TrialError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

impl TrialRecord {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.defect == Some(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub policy: TolerancePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub trials: usize,
    pub failures: usize,
    pub errors: usize,
    pub max_abs_defect: i64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub kind: SuiteKind,
    pub environment: Environment,
    pub aggregate: Aggregate,
    pub trials: Vec<TrialRecord>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// 0 on pass, 3 if any trial raised an error, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.aggregate.errors > 0 {
            3
        } else if self.aggregate.failures > 0 {
            1
        } else {
            0
        }
    }
}

/// What a trial computed: both sides, the defect and a summary.
struct Outcome {
    lhs: i64,
    rhs: i64,
    defect: i64,
    details: Value,
}

impl Outcome {
    fn sides(lhs: i64, rhs: i64, details: Value) -> Self {
        Self {
            lhs,
            rhs,
            defect: lhs - rhs,
            details,
        }
    }
}

/// Per-trial context shared by the suites.
struct Ctx<'a> {
    params: &'a Parameters,
    policy: TolerancePolicy,
}

impl Ctx<'_> {
    fn dims(&self, default: [usize; 2]) -> [usize; 2] {
        self.params.dims.unwrap_or(default)
    }

    fn codims(&self, default: &[usize]) -> Vec<usize> {
        self.params.codims.clone().unwrap_or_else(|| default.to_vec())
    }

    fn mesh_max(&self, default: usize) -> usize {
        self.params.mesh_max.unwrap_or(default).max(1)
    }

    /// Deterministic share: exactly `⌊(i+1)f⌋ − ⌊i f⌋` of trial `i`.
    fn degenerate(&self, i: u64) -> bool {
        let f = self.params.degenerate_fraction.unwrap_or(0.5);
        ((i + 1) as f64 * f).floor() > (i as f64 * f).floor()
    }
}

fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

fn path_inputs(p: &FormPath) -> Value {
    serde_json::to_value(SfSpec::from_path(p)).expect("path serializes")
}

fn lagrangian_inputs(path: &LagrangianPath, l0: &Lagrangian) -> Value {
    json!({
        "l0": to_rows(l0.frame()),
        "mesh": path.mesh(),
        "frames": path.samples().iter().map(|s| to_rows(s.frame())).collect::<Vec<_>>(),
    })
}

fn draw(rng: &mut impl Rng, range: [usize; 2]) -> usize {
    rng.random_range(range[0]..=range[1])
}

fn sign_pattern(rng: &mut impl Rng, n: usize, zeros: bool) -> Vec<Sign> {
    (0..n)
        .map(|_| match rng.random_range(0..if zeros { 5 } else { 4 }) {
            0 | 1 => Sign::Pos,
            2 | 3 => Sign::Neg,
            _ => Sign::Zero,
        })
        .collect()
}

fn index_difference(p: &FormPath, policy: &TolerancePolicy) -> Result<i64> {
    let a = index_nullity(&p.start_form(), policy)?.index as i64;
    let b = index_nullity(&p.end_form(), policy)?.index as i64;
    Ok(a - b)
}

fn flow(p: &FormPath, policy: &TolerancePolicy) -> Result<i64> {
    Ok(spectral_flow(p, policy)?.flow)
}

// ---- suites ----

fn index_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let mut rng = seed.child(0).rng();
    let n = draw(&mut rng, ctx.dims([2, 12])).max(1);
    let degenerate = ctx.degenerate(seed.trial_index);
    let d = if degenerate { rng.random_range(1..=n) } else { rng.random_range(0..=n) };
    let inst = gen_index_instance(&seed, n, d, degenerate)?;
    let inputs = json!({"q": to_rows(inst.q.matrix()), "w": to_rows(inst.w.frame())});
    let (lhs, rhs) = index_formula_sides(&inst.q, &inst.w, &ctx.policy)?;
    let details = json!({"n": n, "dim_w": d, "degeneracy": inst.degeneracy});
    Ok((inputs, Outcome::sides(lhs, rhs, details)))
}

fn index_explicit(ctx: &Ctx, s: &IndexSpec) -> Result<Outcome> {
    let (q, w) = s.build(&ctx.policy)?;
    let (lhs, rhs) = index_formula_sides(&q, &w, &ctx.policy)?;
    Ok(Outcome::sides(lhs, rhs, json!({"n": q.dim(), "dim_w": w.dim()})))
}

fn sf_check(p: &FormPath, policy: &TolerancePolicy, mut details: Value) -> Result<Outcome> {
    let cert = spectral_flow(p, policy)?;
    let oracle = spectral_flow_oracle(p, ORACLE_MIN_SAMPLES, policy)?;
    let rhs = index_difference(p, policy)?;
    details["oracle"] = json!(oracle);
    details["certificate_segments"] = json!(cert.partition.len().saturating_sub(1));
    details["min_margin"] = json!(cert.min_margin());
    let defect = if cert.flow != rhs { cert.flow - rhs } else { oracle - rhs };
    Ok(Outcome {
        lhs: cert.flow,
        rhs,
        defect,
        details,
    })
}

fn sf_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let mut rng = seed.child(0).rng();
    let n = draw(&mut rng, ctx.dims([1, 8])).max(1);
    let mesh = rng.random_range(1..=ctx.mesh_max(20));
    let degenerate = ctx.degenerate(seed.trial_index);
    let opts = PathOptions {
        endpoint_pattern: degenerate.then(|| sign_pattern(&mut rng, n, true)),
        ..Default::default()
    };
    let p = gen_form_path(&seed, n, mesh, &opts)?;
    let details = json!({"n": n, "segments": mesh, "endpoint_pattern": opts.endpoint_pattern});
    Ok((path_inputs(&p), sf_check(&p, &ctx.policy, details)?))
}

const PROPERTY_NAMES: [&str; 6] = [
    "invertible",
    "concatenation",
    "direct_sum",
    "cogredience",
    "closed_perturbation",
    "constant_kernel",
];

fn properties_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let pol = &ctx.policy;
    let which = (seed.trial_index % 6) as usize;
    let mut rng = seed.child(0).rng();
    let dims = ctx.dims([1, 8]);
    let n = draw(&mut rng, dims).max(1);
    let mesh = rng.random_range(1..=ctx.mesh_max(12));
    let degenerate = ctx.degenerate(seed.trial_index / 6);
    let pattern = degenerate.then(|| sign_pattern(&mut rng, n, true));
    let plain = PathOptions {
        endpoint_pattern: pattern.clone(),
        ..Default::default()
    };
    let mut details = json!({"property": PROPERTY_NAMES[which], "n": n, "segments": mesh});
    let (inputs, lhs, rhs) = match which {
        0 => {
            let opts = PathOptions { invertible: true, ..Default::default() };
            let p = gen_form_path(&seed, n, mesh, &opts)?;
            (path_inputs(&p), flow(&p, pol)?, 0)
        }
        1 => {
            let p = gen_form_path(&seed, n, mesh.max(2), &plain)?;
            let k = rng.random_range(1..p.mesh().len() - 1);
            let (l, r) = p.split_at(k)?;
            let glued = concatenate(&l, &r, pol)?;
            details["split"] = json!(k);
            (path_inputs(&p), flow(&glued, pol)?, flow(&l, pol)? + flow(&r, pol)?)
        }
        2 => {
            let n2 = draw(&mut rng, dims).max(1);
            let p1 = gen_form_path(&seed, n, mesh, &plain)?;
            let p2 = gen_form_path(&seed.child(1), n2, rng.random_range(1..=ctx.mesh_max(12)), &PathOptions::default())?;
            details["n2"] = json!(n2);
            let inputs = json!([path_inputs(&p1), path_inputs(&p2)]);
            (inputs, flow(&direct_sum(&p1, &p2)?, pol)?, flow(&p1, pol)? + flow(&p2, pol)?)
        }
        3 => {
            let p = gen_form_path(&seed, n, mesh, &plain)?;
            let m = gen_gl_path(&seed.child(1), n, p.mesh().len());
            let c = conjugate(&p, &m, pol)?;
            let inputs = json!([path_inputs(&p), m.iter().map(to_rows).collect::<Vec<_>>()]);
            (inputs, flow(&c, pol)?, flow(&p, pol)?)
        }
        4 => {
            let closed = PathOptions { closed: true, ..plain };
            let p = gen_form_path(&seed, n, mesh, &closed)?;
            let k = gen_form_path(&seed.child(1), n, rng.random_range(1..=ctx.mesh_max(12)), &PathOptions { closed: true, ..Default::default() })?;
            let inputs = json!([path_inputs(&p), path_inputs(&k)]);
            (inputs, flow(&add(&p, &k)?, pol)?, flow(&p, pol)?)
        }
        _ => {
            let r = rng.random_range(1..=n);
            let opts = PathOptions { constant_kernel_dim: Some(r), ..Default::default() };
            let p = gen_form_path(&seed, n, mesh, &opts)?;
            details["kernel_dim"] = json!(r);
            (path_inputs(&p), flow(&p, pol)?, 0)
        }
    };
    Ok((inputs, Outcome::sides(lhs, rhs, details)))
}

/// A codimension from `codims` (non-empty) and a dimension of at least `codim + 1`.
fn codim_and_dim(rng: &mut impl Rng, dims: [usize; 2], codims: &[usize]) -> Result<(usize, usize)> {
    let codim = codims[rng.random_range(0..codims.len())];
    let lo = dims[0].max(codim + 1);
    if lo > dims[1] {
        return Err(Error::domain(format!("no dimension in {dims:?} fits codimension {codim}")));
    }
    Ok((codim, rng.random_range(lo..=dims[1])))
}

fn restriction_trial(ctx: &Ctx, seed: Seed, closed: bool) -> Result<(Value, Outcome)> {
    let mut rng = seed.child(0).rng();
    let codims = ctx.codims(&[1, 2, 3]);
    if codims.is_empty() {
        return Err(Error::domain("no codimensions given"));
    }
    let (codim, n) = codim_and_dim(&mut rng, ctx.dims([2, 10]), &codims)?;
    let mesh = rng.random_range(1..=ctx.mesh_max(8));
    let degenerate = ctx.degenerate(seed.trial_index);
    let inst = gen_restriction_instance(&seed, n, codim, mesh, degenerate, closed)?;
    let mut inputs = path_inputs(&inst.path);
    inputs["v"] = json!(to_rows(inst.v.frame()));
    let details = json!({"n": n, "codim": codim, "segments": mesh, "at_a": inst.at_a, "at_b": inst.at_b});
    let (lhs, rhs) = if closed {
        let r = restrict_path(&inst.path, &inst.v, &ctx.policy)?;
        (flow(&inst.path, &ctx.policy)?, flow(&r, &ctx.policy)?)
    } else {
        restriction_sides(&inst.path, &inst.v, &ctx.policy)?
    };
    Ok((inputs, Outcome::sides(lhs, rhs, details)))
}

fn restriction_explicit(ctx: &Ctx, s: &RestrictionSpec, closed: bool) -> Result<Outcome> {
    let (p, v) = s.build(&ctx.policy)?;
    let (lhs, rhs) = if closed {
        let r = restrict_path(&p, &v, &ctx.policy)?;
        (flow(&p, &ctx.policy)?, flow(&r, &ctx.policy)?)
    } else {
        restriction_sides(&p, &v, &ctx.policy)?
    };
    Ok(Outcome::sides(lhs, rhs, json!({"n": p.dim(), "codim": p.dim() - v.dim()})))
}

fn maslov_check(ctx: &Ctx, path: &LagrangianPath, l0: &Lagrangian, oracle_seed: u64, mut details: Value) -> Result<Outcome> {
    let pol = &ctx.policy;
    let mu = maslov_index(path, l0, pol)?;
    let oracle = maslov_oracle_seeded(path, l0, oracle_seed, pol)?;
    let mut defect = mu - oracle;
    details["oracle"] = json!(oracle);
    details["samples"] = json!(path.len());
    if path.len() >= 3 {
        let k = path.len() / 2;
        let (l, r) = path.split_at(k)?;
        let parts = maslov_index(&l, l0, pol)? + maslov_index(&r, l0, pol)?;
        details["split_sum"] = json!(parts);
        if defect == 0 {
            defect = mu - parts;
        }
    }
    let transverse = |s| -> Result<bool> { Ok(intersect(s, l0.sub(), pol)?.dim() == 0) };
    if transverse(&path.samples()[0])? && transverse(&path.samples()[path.len() - 1])? {
        let rev = maslov_index(&path.reversed(), l0, pol)?;
        details["reversed"] = json!(rev);
        if defect == 0 {
            defect = mu + rev;
        }
    }
    Ok(Outcome {
        lhs: mu,
        rhs: oracle,
        defect,
        details,
    })
}

fn maslov_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let mut rng = seed.child(0).rng();
    let n = draw(&mut rng, ctx.dims([1, 6])).max(1);
    let (_, l0, path) = gen_maslov_path(&seed, n, &ctx.policy)?;
    let oracle_seed = seed.child(1).rng().random();
    let out = maslov_check(ctx, &path, &l0, oracle_seed, json!({"n": n}))?;
    Ok((lagrangian_inputs(&path, &l0), out))
}

fn reduction_check(ctx: &Ctx, setup: &ReductionSetup, path: &LagrangianPath, l0: &Lagrangian, mut details: Value) -> Result<Outcome> {
    let (lhs, rhs, d) = reduction_detail(setup, path, l0, &ctx.policy)?;
    details["mu"] = json!(d.mu);
    details["mu_reduced"] = json!(d.mu_reduced);
    details["at_a"] = json!(d.at_a);
    details["at_b"] = json!(d.at_b);
    Ok(Outcome::sides(lhs, rhs, details))
}

fn scenario_params(ctx: &Ctx, seed: Seed) -> Result<(usize, usize, LagrangianOptions)> {
    let mut rng = seed.child(0).rng();
    let codims = ctx.codims(&[0, 1, 2, 3]);
    if codims.is_empty() {
        return Err(Error::domain("no codimensions given"));
    }
    let (k, n) = codim_and_dim(&mut rng, ctx.dims([2, 8]), &codims)?;
    let opts = LagrangianOptions {
        hit_l0: seed.trial_index % 3 != 2,
        degenerate_endpoints: ctx.degenerate(seed.trial_index),
    };
    Ok((n, k, opts))
}

fn reduction_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let (n, k, opts) = scenario_params(ctx, seed)?;
    let sc = gen_lagrangian_scenario(&seed, n, k, &opts, &ctx.policy)?;
    let mut inputs = lagrangian_inputs(&sc.path, &sc.l0);
    inputs["w"] = json!(to_rows(sc.setup.w().frame()));
    let details = json!({
        "n": n,
        "k": k,
        "hit_l0": opts.hit_l0,
        "degenerate_endpoints": opts.degenerate_endpoints,
        "hit_sample": sc.hit_sample,
    });
    Ok((inputs, reduction_check(ctx, &sc.setup, &sc.path, &sc.l0, details)?))
}

fn identities_trial(ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    let (n, k, opts) = scenario_params(ctx, seed)?;
    let sc = gen_lagrangian_scenario(&seed, n, k, &opts, &ctx.policy)?;
    let mut inputs = lagrangian_inputs(&sc.path, &sc.l0);
    inputs["w"] = json!(to_rows(sc.setup.w().frame()));
    inputs["l1"] = json!(to_rows(sc.l1.frame()));
    let seg = ChartSegment::new(&sc.path, 0, sc.path.len() - 1, &sc.l0, &sc.l1, &ctx.policy)?;
    let rep = chart_identities(&sc.setup, &sc.path, &sc.l0, &seg, &ctx.policy)?;
    let held = [rep.kernel, rep.perp, rep.form].iter().filter(|b| **b).count() as i64;
    let details = json!({"n": n, "k": k, "identities": rep, "hit_sample": sc.hit_sample});
    Ok((inputs, Outcome::sides(held, 3, details)))
}

fn generated_trial(kind: SuiteKind, ctx: &Ctx, seed: Seed) -> Result<(Value, Outcome)> {
    match kind {
        SuiteKind::Index => index_trial(ctx, seed),
        SuiteKind::Sf => sf_trial(ctx, seed),
        SuiteKind::Properties => properties_trial(ctx, seed),
        SuiteKind::Restriction => restriction_trial(ctx, seed, false),
        SuiteKind::Closed => restriction_trial(ctx, seed, true),
        SuiteKind::Maslov => maslov_trial(ctx, seed),
        SuiteKind::Reduction => reduction_trial(ctx, seed),
        SuiteKind::Identities => identities_trial(ctx, seed),
    }
}

fn explicit_trial(kind: SuiteKind, ctx: &Ctx, inst: &Instance) -> Result<Outcome> {
    match (kind, inst) {
        (SuiteKind::Index, Instance::Index(s)) => index_explicit(ctx, s),
        (SuiteKind::Sf, Instance::Sf(s)) => sf_check(&s.build()?, &ctx.policy, json!({})),
        (SuiteKind::Restriction, Instance::Restriction(s)) => restriction_explicit(ctx, s, false),
        (SuiteKind::Closed, Instance::Restriction(s)) => restriction_explicit(ctx, s, true),
        (SuiteKind::Maslov, Instance::Maslov(s)) => {
            let (l0, path) = s.build(&ctx.policy)?;
            maslov_check(ctx, &path, &l0, crate::symplectic::ORACLE_SEED, json!({}))
        }
        (SuiteKind::Reduction, Instance::Reduce(s)) => {
            let (setup, l0, path) = s.build(&ctx.policy)?;
            reduction_check(ctx, &setup, &path, &l0, json!({}))
        }
        (SuiteKind::Identities, Instance::Reduce(_)) => Err(Error::domain(
            "explicit identity instances need a chart complement; use generated trials",
        )),
        _ => Err(Error::domain("instance does not match the suite kind")),
    }
}

fn record(index: u64, inputs: &Value, res: Result<Outcome>, time_ms: Option<f64>) -> TrialRecord {
    match res {
        Ok(o) => TrialRecord {
            index,
            digest: digest(inputs),
            lhs: Some(o.lhs),
            rhs: Some(o.rhs),
            defect: Some(o.defect),
            details: o.details,
            error: None,
            time_ms,
        },
        Err(e) => TrialRecord {
            index,
            digest: digest(inputs),
            lhs: None,
            rhs: None,
            defect: None,
            details: Value::Null,
            error: Some(TrialError {
                kind: e.kind().to_string(),
                message: e.to_string(),
            }),
            time_ms,
        },
    }
}

fn run_one(scenario: &ScenarioFile, ctx: &Ctx, index: u64, timing: bool) -> TrialRecord {
    let start = Instant::now();
    let generated = scenario.parameters.trials as u64;
    let elapsed = |s: Instant| timing.then(|| s.elapsed().as_secs_f64() * 1e3);
    if index < generated {
        let seed = Seed::new(scenario.parameters.seed, index);
        match generated_trial(scenario.kind, ctx, seed) {
            Ok((inputs, o)) => record(index, &inputs, Ok(o), elapsed(start)),
            Err(e) => record(index, &json!({"seed": seed}), Err(e), elapsed(start)),
        }
    } else {
        let raw = &scenario.explicit_instances.as_ref().expect("index within explicit instances")
            [(index - generated) as usize];
        let res = scenario
            .kind
            .instance_kind()
            .and_then(|k| Instance::from_value(k, raw.clone()))
            .and_then(|inst| explicit_trial(scenario.kind, ctx, &inst));
        record(index, raw, res, elapsed(start))
    }
}

/// Runs every trial of `scenario` and assembles the report.
pub fn run_suite(scenario: &ScenarioFile, opts: &RunOptions) -> Result<Report> {
    let policy = scenario
        .parameters
        .policy
        .unwrap_or_default()
        .apply(TolerancePolicy::default());
    policy.validate()?;
    let ctx = Ctx {
        params: &scenario.parameters,
        policy,
    };
    let total = scenario.parameters.trials as u64
        + scenario.explicit_instances.as_ref().map_or(0, Vec::len) as u64;
    let start = Instant::now();
    let trials: Vec<TrialRecord> = if opts.jobs <= 1 {
        (0..total).map(|i| run_one(scenario, &ctx, i, opts.timing)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..total)
                .into_par_iter()
                .map(|i| run_one(scenario, &ctx, i, opts.timing))
                .collect()
        })
    };
    let errors = trials.iter().filter(|t| t.error.is_some()).count();
    let failures = trials
        .iter()
        .filter(|t| t.error.is_none() && t.defect != Some(0))
        .count();
    let max_abs_defect = trials
        .iter()
        .filter_map(|t| t.defect)
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        kind: scenario.kind,
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: scenario.parameters.seed,
            policy,
        },
        aggregate: Aggregate {
            trials: trials.len(),
            failures,
            errors,
            max_abs_defect,
            passed: errors == 0 && failures == 0,
            wall_time_s: opts.timing.then(|| start.elapsed().as_secs_f64()),
        },
        trials,
    })
}
