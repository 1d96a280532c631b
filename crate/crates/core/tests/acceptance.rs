//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde_json::Value;

use spectral_maslov::cli::{run_suite, Instance, InstanceFile, Report, RunOptions, ScenarioFile, TrialRecord};
use spectral_maslov::numkern::TolerancePolicy;
use spectral_maslov::reduction::reduction_detail;
use spectral_maslov::symplectic::{maslov_index, maslov_oracle};
use spectral_maslov::Result;

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn scenario(name: &str) -> ScenarioFile {
    let text = std::fs::read_to_string(manifest(&format!("scenarios/{name}.json"))).expect("scenario file");
    ScenarioFile::parse(&text).expect("scenario parses")
}

struct Outcome {
    ok: bool,
    summary: String,
}

/// Shared report checks: the expected trial count, no errors, zero defects.
fn clean(r: &Report, trials: usize) -> std::result::Result<(), String> {
    let a = &r.aggregate;
    if a.trials != trials {
        return Err(format!("{} trials, expected {trials}", a.trials));
    }
    if a.errors > 0 {
        let first = r.trials.iter().find(|t| t.error.is_some()).expect("counted");
        return Err(format!("{} errors (first: trial {}: {})", a.errors, first.index, first.error.as_ref().unwrap().message));
    }
    if a.failures > 0 || a.max_abs_defect != 0 {
        return Err(format!("{} failures, max |defect| {}", a.failures, a.max_abs_defect));
    }
    Ok(())
}

fn timed(name: &str) -> (Report, f64) {
    let s = scenario(name);
    let start = Instant::now();
    let r = run_suite(&s, &RunOptions::default()).expect("suite runs");
    (r, start.elapsed().as_secs_f64())
}

fn detail<'a>(t: &'a TrialRecord, key: &str) -> &'a Value {
    &t.details[key]
}

fn non_empty(v: &Value) -> bool {
    v.as_array().is_some_and(|a| !a.is_empty())
}

fn dims_within(r: &Report, key: &str, lo: u64, hi: u64) -> bool {
    r.trials.iter().all(|t| detail(t, key).as_u64().is_some_and(|n| (lo..=hi).contains(&n)))
}

fn within(secs: f64, limit: f64) -> std::result::Result<(), String> {
    if secs >= limit {
        return Err(format!("took {secs:.1} s, limit {limit} s"));
    }
    Ok(())
}

fn index_formula(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("index");
    clean(&r, 1000)?;
    within(secs, 10.0)?;
    if !dims_within(&r, "n", 2, 12) {
        return Err("dimension outside 2..12".into());
    }
    let degenerate = r.trials.iter().filter(|t| non_empty(detail(t, "degeneracy"))).count();
    let share = degenerate as f64 / 1000.0;
    if share < 0.3 {
        return Err(format!("only {:.1}% degenerate", 100.0 * share));
    }
    let kinds: std::collections::BTreeSet<&str> = r
        .trials
        .iter()
        .flat_map(|t| detail(t, "degeneracy").as_array().into_iter().flatten())
        .filter_map(Value::as_str)
        .collect();
    if kinds.len() < 3 {
        return Err(format!("degeneracy kinds seen: {kinds:?}"));
    }
    reports.insert("index", r);
    Ok(format!("1000 trials, {:.1}% engineered degenerate (all three kinds), all defects 0, {secs:.2} s", 100.0 * share))
}

fn spectral_flow_cross_check(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("sf");
    clean(&r, 200)?;
    within(secs, 30.0)?;
    if !dims_within(&r, "n", 1, 8) || !dims_within(&r, "segments", 1, 20) {
        return Err("path size outside n ≤ 8, mesh ≤ 20".into());
    }
    for t in &r.trials {
        if detail(t, "oracle").as_i64() != t.lhs || t.lhs != t.rhs {
            return Err(format!("trial {}: certified {:?}, oracle {}, index difference {:?}", t.index, t.lhs, detail(t, "oracle"), t.rhs));
        }
    }
    let nonzero = r.trials.iter().filter(|t| t.lhs != Some(0)).count();
    reports.insert("sf", r);
    Ok(format!("200 paths, certified = oracle = index difference ({nonzero} with nonzero flow), no certification failure, {secs:.2} s"))
}

fn property_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("properties");
    clean(&r, 600)?;
    let mut per: BTreeMap<String, usize> = BTreeMap::new();
    for t in &r.trials {
        *per.entry(detail(t, "property").as_str().unwrap_or("?").to_string()).or_default() += 1;
    }
    if per.len() != 6 || per.values().any(|&c| c < 100) {
        return Err(format!("trial counts per property: {per:?}"));
    }
    reports.insert("properties", r);
    Ok(format!("6 properties x 100 trials, zero defects, {secs:.2} s"))
}

fn restriction_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("restriction");
    clean(&r, 500)?;
    within(secs, 60.0)?;
    if !dims_within(&r, "n", 1, 10) || !dims_within(&r, "codim", 1, 3) {
        return Err("instance size outside n ≤ 10, codim 1..3".into());
    }
    let degenerate = r
        .trials
        .iter()
        .filter(|t| non_empty(detail(t, "at_a")) || non_empty(detail(t, "at_b")))
        .count();
    let share = degenerate as f64 / 500.0;
    if share < 0.3 {
        return Err(format!("only {:.1}% with degenerate endpoints", 100.0 * share));
    }
    reports.insert("restriction", r);
    Ok(format!("500 instances, {:.1}% degenerate endpoints, lhs = rhs throughout, {secs:.2} s", 100.0 * share))
}

fn closed_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("closed");
    clean(&r, 100)?;
    reports.insert("closed", r);
    Ok(format!("100 closed paths, flow equals restricted flow, {secs:.2} s"))
}

fn instance(name: &str) -> (Instance, TolerancePolicy) {
    let text = std::fs::read_to_string(manifest(&format!("instances/{name}.json"))).expect("instance file");
    let (inst, over) = InstanceFile::parse(&text).expect("instance parses");
    (inst, over.unwrap_or_default().apply(TolerancePolicy::default()))
}

/// `span(cos t·e1 + sin t·e2)` on `[π/4, 3π/4]` against `span(e2)`.
fn rotating_example() -> Result<(i64, i64)> {
    let (Instance::Maslov(inst), pol) = instance("rotating_lagrangian") else {
        panic!("rotating instance has the wrong kind");
    };
    let (l0, path) = inst.build(&pol)?;
    Ok((maslov_index(&path, &l0, &pol)?, maslov_oracle(&path, &l0, &pol)?))
}

fn maslov_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("maslov");
    clean(&r, 200)?;
    if !dims_within(&r, "n", 1, 6) {
        return Err("dimension outside n ≤ 6".into());
    }
    let split = r.trials.iter().filter(|t| detail(t, "split_sum").as_i64() == t.lhs).count();
    if split != 200 {
        return Err(format!("concatenation additivity held on {split}/200 paths"));
    }
    let (mu, oracle) = rotating_example().map_err(|e| e.to_string())?;
    if (mu, oracle) != (-1, -1) {
        return Err(format!("rotating example gave {mu} (oracle {oracle}), expected -1"));
    }
    reports.insert("maslov", r);
    Ok(format!("200 paths, index = oracle and split additivity exact; rotating example = -1; {secs:.2} s"))
}

fn worked_reduction() -> Result<(i64, i64, i64)> {
    let (Instance::Reduce(inst), pol) = instance("worked_reduction") else {
        panic!("worked instance has the wrong kind");
    };
    let (setup, l0, path) = inst.build(&pol)?;
    let (lhs, rhs, d) = reduction_detail(&setup, &path, &l0, &pol)?;
    Ok((d.mu, d.mu_reduced, lhs - rhs))
}

fn reduction_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("reduction");
    clean(&r, 300)?;
    within(secs, 120.0)?;
    if !dims_within(&r, "n", 2, 8) || !dims_within(&r, "k", 0, 3) {
        return Err("scenario size outside 2n ∈ 4..16, k ≤ 3".into());
    }
    let ks: std::collections::BTreeSet<u64> = r.trials.iter().filter_map(|t| detail(t, "k").as_u64()).collect();
    let hits = r.trials.iter().filter(|t| !detail(t, "hit_sample").is_null()).count();
    let degenerate = r.trials.iter().filter(|t| detail(t, "degenerate_endpoints").as_bool() == Some(true)).count();
    if ks.len() != 4 || hits == 0 || degenerate == 0 {
        return Err(format!("coverage: k values {ks:?}, {hits} paths meeting l0, {degenerate} with degenerate endpoints"));
    }
    let worked = worked_reduction().map_err(|e| e.to_string())?;
    if worked != (1, 1, 0) {
        return Err(format!("worked instance gave (mu, mu_reduced, defect) = {worked:?}"));
    }
    reports.insert("reduction", r);
    Ok(format!(
        "300 scenarios (k = 0..3, {hits} meeting l0, {degenerate} degenerate-endpoint), lhs = rhs; worked instance mu = 1, mu_reduced = 1, defect 0; {secs:.2} s"
    ))
}

fn identity_suite(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let (r, secs) = timed("identities");
    clean(&r, 200)?;
    let samples: u64 = r
        .trials
        .iter()
        .filter_map(|t| t.details["identities"]["samples_checked"].as_u64())
        .sum();
    reports.insert("identities", r);
    Ok(format!("kernel, perp and form identities hold on 200 instances ({samples} samples), {secs:.2} s"))
}

fn determinism(reports: &mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String> {
    let mut checked = Vec::new();
    for (name, first) in reports.iter() {
        let s = scenario(name);
        let again = run_suite(&s, &RunOptions { jobs: 4, timing: false }).map_err(|e| e.to_string())?;
        if first.to_json() != again.to_json() {
            return Err(format!("{name}: report under --jobs 4 differs from --jobs 1"));
        }
        checked.push(*name);
    }
    let s = scenario("sf");
    let twice = run_suite(&s, &RunOptions::default()).map_err(|e| e.to_string())?;
    if twice.to_json() != reports["sf"].to_json() {
        return Err("sf: second serial run differs".into());
    }
    if checked.len() != 8 {
        return Err(format!("only {} suites available to compare", checked.len()));
    }
    Ok(format!("byte-identical reports for {} under --jobs 1 and --jobs 4", checked.join(", ")))
}

type Criterion = fn(&mut BTreeMap<&'static str, Report>) -> std::result::Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("index formula suite", index_formula),
        ("spectral-flow cross-validation", spectral_flow_cross_check),
        ("spectral-flow property suite", property_suite),
        ("restriction formula suite", restriction_suite),
        ("closed-path restriction suite", closed_suite),
        ("Maslov suite", maslov_suite),
        ("reduction formula suite", reduction_suite),
        ("chart identity suite", identity_suite),
        ("determinism", determinism),
    ];
    let mut reports = BTreeMap::new();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut reports))) {
            Ok(Ok(summary)) => Outcome { ok: true, summary },
            Ok(Err(summary)) => Outcome { ok: false, summary },
            Err(_) => Outcome {
                ok: false,
                summary: "panicked".into(),
            },
        };
        if !out.ok {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if out.ok { "PASS" } else { "FAIL" }, i + 1, out.summary);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
