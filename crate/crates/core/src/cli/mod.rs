//! Command-line front end: `run` executes a suite from a scenario file,
//! `compute` evaluates one instance file.
//!
//! Exit codes: 0 pass, 1 identity failure, 2 unreadable or malformed
//! input, 3 numeric or certification error.

pub mod runner;
pub mod schema;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use runner::{run_suite, Report, RunOptions, TrialRecord};
pub use schema::{Instance, InstanceFile, PolicyOverride, ScenarioFile, SuiteKind};

use crate::numkern::TolerancePolicy;
use crate::reduction::reduction_detail;
use crate::specflow::{eigen_tracks, spectral_flow, FormPath};
use crate::symplectic::{chart_cover, maslov_index};
use crate::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spectral-maslov", version, about = "Spectral flow and Maslov index verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the suite described by a scenario file and write a JSON report.
    Run(RunArgs),
    /// Evaluate one instance file.
    Compute(ComputeArgs),
}

#[derive(Debug, Args, Default)]
pub struct PolicyArgs {
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[arg(long)]
    pub angle_tol: Option<f64>,
    #[arg(long)]
    pub refine_limit: Option<usize>,
}

impl PolicyArgs {
    fn overlay(&self, base: Option<PolicyOverride>) -> Option<PolicyOverride> {
        if self.rank_tol.is_none() && self.angle_tol.is_none() && self.refine_limit.is_none() {
            return base;
        }
        let b = base.unwrap_or_default();
        Some(PolicyOverride {
            rank_tol: self.rank_tol.or(b.rank_tol),
            angle_tol: self.angle_tol.or(b.angle_tol),
            refine_limit: self.refine_limit.or(b.refine_limit),
        })
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Inclusive dimension range, `LO-HI` or a single value.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<[usize; 2]>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Include wall times in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComputeKind {
    Sf,
    Maslov,
    Reduce,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    pub kind: ComputeKind,
    pub instance: PathBuf,
    /// Write eigenvalue tracks (`t λ_1 … λ_n` per line) to this file.
    #[arg(long)]
    pub emit_tracks: Option<PathBuf>,
    /// Track samples per mesh segment.
    #[arg(long, default_value_t = 20)]
    pub track_samples: usize,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

fn parse_dims(s: &str) -> std::result::Result<[usize; 2], String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let r = match s.split_once('-') {
        Some((a, b)) => [parse(a)?, parse(b)?],
        None => {
            let v = parse(s)?;
            [v, v]
        }
    };
    if r[0] > r[1] {
        return Err("empty range".into());
    }
    Ok(r)
}

/// Exit code for an error raised outside the trials.
fn code_for(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_PARSE,
        _ => EXIT_NUMERIC,
    }
}

/// Applies command-line flags on top of the scenario parameters.
pub fn apply_flags(mut s: ScenarioFile, args: &RunArgs) -> ScenarioFile {
    if let Some(v) = args.seed {
        s.parameters.seed = v;
    }
    if let Some(v) = args.trials {
        s.parameters.trials = v;
    }
    if let Some(v) = args.dims {
        s.parameters.dims = Some(v);
    }
    s.parameters.policy = args.policy.overlay(s.parameters.policy);
    s
}

fn run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", args.scenario.display());
            return EXIT_PARSE;
        }
    };
    let scenario = match ScenarioFile::parse(&text) {
        Ok(s) => apply_flags(s, args),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_PARSE;
        }
    };
    let opts = RunOptions {
        jobs: args.jobs.max(1),
        timing: args.timing,
    };
    let report = match run_suite(&scenario, &opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return code_for(&e);
        }
    };
    let json = report.to_json();
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                let _ = writeln!(err, "cannot write {}: {e}", p.display());
                return EXIT_NUMERIC;
            }
        }
        None => {
            let _ = out.write_all(json.as_bytes());
        }
    }
    let a = &report.aggregate;
    let _ = writeln!(
        err,
        "{}: {} trials, {} failures, {} errors, max |defect| {}",
        report.kind.name(),
        a.trials,
        a.failures,
        a.errors,
        a.max_abs_defect
    );
    for t in report.trials.iter().filter(|t| t.error.is_some()) {
        let e = t.error.as_ref().expect("filtered");
        let _ = writeln!(err, "trial {} ({}): {}", t.index, t.digest, e.message);
    }
    report.exit_code()
}

fn write_tracks(path: &PathBuf, paths: &[FormPath], samples: usize) -> crate::Result<()> {
    let mut text = String::new();
    for (i, p) in paths.iter().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        for (t, ev) in eigen_tracks(p, samples)? {
            text.push_str(&format!("{t}"));
            for v in ev {
                text.push_str(&format!(" {v}"));
            }
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))
}

/// Lines printed by `compute`, and whether the result counts as a pass.
fn compute_inner(args: &ComputeArgs, text: &str) -> crate::Result<(Vec<String>, bool)> {
    let (inst, file_policy) = InstanceFile::parse(text)?;
    let policy = args
        .policy
        .overlay(file_policy)
        .unwrap_or_default()
        .apply(TolerancePolicy::default());
    policy.validate()?;
    let expected = match &inst {
        Instance::Sf(_) => ComputeKind::Sf,
        Instance::Maslov(_) => ComputeKind::Maslov,
        Instance::Reduce(_) => ComputeKind::Reduce,
        _ => return Err(Error::domain("compute takes sf, maslov or reduce instances")),
    };
    if expected != args.kind {
        return Err(Error::domain("instance kind does not match the subcommand"));
    }
    // parsing is done; later errors are numeric
    evaluate(args, inst, &policy).map_err(|e| match e {
        Error::Domain(m) => Error::Numeric(m),
        other => other,
    })
}

fn evaluate(args: &ComputeArgs, inst: Instance, policy: &TolerancePolicy) -> crate::Result<(Vec<String>, bool)> {
    let policy = *policy;
    match inst {
        Instance::Sf(s) => {
            let p = s.build()?;
            let cert = spectral_flow(&p, &policy)?;
            if let Some(t) = &args.emit_tracks {
                write_tracks(t, &[p], args.track_samples)?;
            }
            Ok((vec![cert.flow.to_string()], true))
        }
        Instance::Maslov(s) => {
            let (l0, path) = s.build(&policy)?;
            let mu = maslov_index(&path, &l0, &policy)?;
            if let Some(t) = &args.emit_tracks {
                let segs = chart_cover(&path, &l0, &policy)?;
                let forms: Vec<FormPath> = segs.into_iter().map(|s| s.form_path).collect();
                write_tracks(t, &forms, args.track_samples)?;
            }
            Ok((vec![mu.to_string()], true))
        }
        Instance::Reduce(s) => {
            let (setup, l0, path) = s.build(&policy)?;
            let (lhs, rhs, d) = reduction_detail(&setup, &path, &l0, &policy)?;
            if let Some(t) = &args.emit_tracks {
                let segs = chart_cover(&path, &l0, &policy)?;
                let forms: Vec<FormPath> = segs.into_iter().map(|s| s.form_path).collect();
                write_tracks(t, &forms, args.track_samples)?;
            }
            Ok((
                vec![
                    format!("mu {}", d.mu),
                    format!("mu_reduced {}", d.mu_reduced),
                    format!("lhs {lhs}"),
                    format!("rhs {rhs}"),
                    format!("defect {}", lhs - rhs),
                ],
                lhs == rhs,
            ))
        }
        _ => Err(Error::domain("compute takes sf, maslov or reduce instances")),
    }
}

fn compute(args: &ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(&args.instance) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", args.instance.display());
            return EXIT_PARSE;
        }
    };
    match compute_inner(args, &text) {
        Ok((lines, ok)) => {
            for l in lines {
                let _ = writeln!(out, "{l}");
            }
            if ok {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            code_for(&e)
        }
    }
}

/// Executes a parsed command line; returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Run(a) => run(a, out, err),
        Command::Compute(a) => compute(a, out, err),
    }
}
