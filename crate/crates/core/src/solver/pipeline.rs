//! The two-solution pipeline: audit, sub-solution, threshold, first solution,
//! mountain pass, De Giorgi bound.

use std::io::{self, Write};

use crate::hypotheses::{check_all, HypothesisReport, ProblemSpec};
use crate::orlicz::{Grid, GridFunction};
use crate::threshold::{
    classify, lambda_star, truncation_constants, Classification, ThresholdOptions, ThresholdResult,
};

use super::degiorgi::{degiorgi_bound, DeGiorgiReport};
use super::descent::{minimize, DescentOptions};
use super::energy::{verify_solution, DiscreteEnergy, EnergyState, ResidualReport, Truncation};
use super::mountain::{mountain_pass, uphill_endpoint, MountainPassOptions, MountainPassOutcome};
use super::subsolution::{build_subsolution, SubSolution};
use super::{Result, SolverError};

/// Last stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Threshold,
    FirstSolution,
    MountainPass,
    DeGiorgi,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub seed: u64,
    pub embedding_trials: usize,
    /// Fixed `λ`; otherwise `lambda_fraction · λ*`, or the problem's own `λ`
    /// when `λ* = ∞`.
    pub lambda: Option<f64>,
    pub lambda_fraction: f64,
    pub torsion: DescentOptions,
    pub first: DescentOptions,
    pub mountain: MountainPassOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            seed: 0,
            embedding_trials: 200,
            lambda: None,
            lambda_fraction: 0.5,
            torsion: DescentOptions::default(),
            first: DescentOptions { tol: 1e-9, ..Default::default() },
            mountain: MountainPassOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FirstSolution {
    pub state: EnergyState,
    pub check: ResidualReport,
    pub log: Vec<(usize, f64, f64)>,
    /// `Σφ(|∇u|)|∇u|h ≥ i_Φ H(u)` held at every iterate.
    pub coercivity_ok: bool,
}

#[derive(Debug, Clone)]
pub struct SecondSolution {
    pub endpoint: GridFunction,
    pub endpoint_scale: f64,
    pub outcome: MountainPassOutcome,
    pub state: EnergyState,
    pub check: ResidualReport,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub hypotheses: HypothesisReport,
    pub classification: Classification,
    /// Sub-solution at `λ = 1`, which fixes the constants behind `λ*`.
    pub probe: SubSolution,
    /// Sub-solution rebuilt for the working `λ`.
    pub sub: SubSolution,
    pub probe_threshold: ThresholdResult,
    pub threshold: ThresholdResult,
    pub lambda: f64,
    pub r_star: f64,
    pub first: Option<FirstSolution>,
    pub second: Option<SecondSolution>,
    pub degiorgi: Option<DeGiorgiReport>,
}

/// Radial scaling onto `{H ≤ r}`: `u` itself when inside, else `su` with
/// `H(su) ≤ r` and `s` bisected to machine precision.
pub fn project_to_ball(energy: &DiscreteEnergy, u: &[f64], r: f64) -> Vec<f64> {
    if energy.h_value(u) <= r {
        return u.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v: Vec<f64> = u.iter().map(|x| mid * x).collect();
        if energy.h_value(&v) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    u.iter().map(|x| lo * x).collect()
}

fn threshold_for(
    spec: &ProblemSpec,
    sub: &SubSolution,
    report: &HypothesisReport,
    cls: Classification,
    opts: &PipelineOptions,
) -> Result<ThresholdResult> {
    let constants = truncation_constants(spec, sub.k2, sub.k1)?;
    let topts = ThresholdOptions {
        seed: opts.seed,
        n_trials: opts.embedding_trials,
        embedding_constant: None,
        phi_star: report.ha2.phi_star.clone(),
    };
    Ok(lambda_star(spec, constants, cls, &topts)?)
}

pub fn run_pipeline(spec: &ProblemSpec, opts: &PipelineOptions, stage: Stage) -> Result<PipelineReport> {
    spec.validate()?;
    let hypotheses = check_all(spec)?;
    run_pipeline_checked(spec, hypotheses, opts, stage)
}

/// As [`run_pipeline`], reusing an audit already computed for `spec`.
pub fn run_pipeline_checked(
    spec: &ProblemSpec,
    hypotheses: HypothesisReport,
    opts: &PipelineOptions,
    stage: Stage,
) -> Result<PipelineReport> {
    if !hypotheses.all_pass() {
        let failed: Vec<String> = hypotheses.lines().into_iter().filter(|l| l.contains("FAIL")).collect();
        return Err(SolverError::HypothesisFailure(failed.join("; ")));
    }
    let op = &spec.operator;
    let grid = &spec.grid;
    let delta = hypotheses.hf1.delta;
    let probe = build_subsolution(op, grid, delta, spec.r_ar, 1.0, &opts.torsion)?;
    let classification = classify(&spec.upsilon, spec.phi())?;
    let probe_threshold = threshold_for(spec, &probe, &hypotheses, classification, opts)?;
    let lambda = match opts.lambda {
        Some(l) => l,
        None if probe_threshold.lambda_star.is_finite() => opts.lambda_fraction * probe_threshold.lambda_star,
        None => spec.lambda,
    };
    // A smaller load shrinks u̲ and k₂, hence C₁, so λ* can only grow.
    let sub = build_subsolution(op, grid, delta, spec.r_ar, lambda, &opts.torsion)?;
    let threshold = threshold_for(spec, &sub, &hypotheses, classification, opts)?;
    let r_star = threshold.r_star(lambda)?;
    let mut report = PipelineReport {
        hypotheses,
        classification,
        probe,
        sub,
        probe_threshold,
        threshold,
        lambda,
        r_star,
        first: None,
        second: None,
        degiorgi: None,
    };
    if stage == Stage::Threshold {
        return Ok(report);
    }

    let trunc = Truncation::new(&spec.reaction, &report.sub.u_under);
    let energy = DiscreteEnergy::truncated(op, *grid, lambda, trunc);
    let i_phi = spec.phi().require_indices().map_err(SolverError::from)?.lower;
    let mut coercivity_ok = true;
    let proj = |u: &[f64]| project_to_ball(&energy, u, r_star);
    let out = minimize(&energy, report.sub.u_under.values(), &opts.first, Some(&proj), &mut |u| {
        let h = energy.h_value(u);
        if energy.flux_work(u) < i_phi * h * (1.0 - 1e-12) {
            coercivity_ok = false;
        }
    })?;
    let state = energy.state_of(out.u)?;
    if !(state.h_value < r_star) {
        return Err(SolverError::PinnedToBall { h_value: state.h_value, r_star });
    }
    let check = verify_solution(&energy, &state.u, Some(report.sub.u_under.values()));
    report.first = Some(FirstSolution { state, check, log: out.log, coercivity_ok });
    if stage == Stage::FirstSolution {
        return Ok(report);
    }

    let first = report.first.as_ref().expect("first solution");
    let (endpoint, endpoint_scale) = uphill_endpoint(&energy, first.state.j_value)?;
    let outcome = mountain_pass(&energy, first.state.u.values(), endpoint.values(), &opts.mountain)?;
    let state = energy.state_of(outcome.v.clone())?;
    let check = verify_solution(&energy, &state.u, Some(report.sub.u_under.values()));
    report.second = Some(SecondSolution { endpoint, endpoint_scale, outcome, state, check });
    if stage == Stage::MountainPass {
        return Ok(report);
    }

    let first = report.first.as_ref().expect("first solution");
    let s_phi = spec.phi().require_indices().map_err(SolverError::from)?.upper;
    let p_exp = report.hypotheses.ha2.i_phi_star;
    let u = &first.state.u;
    report.degiorgi = Some(degiorgi_bound(u, p_exp, p_exp / s_phi, 0.25 * u.max())?);
    Ok(report)
}

/// `x,u_lambda,v_lambda,u_under` including both boundary rows.
pub fn write_solution_csv<W: Write>(
    mut w: W,
    grid: &Grid,
    u_lambda: Option<&GridFunction>,
    v_lambda: Option<&GridFunction>,
    u_under: &GridFunction,
) -> io::Result<()> {
    writeln!(w, "x,u_lambda,v_lambda,u_under")?;
    let col = |f: Option<&GridFunction>, i: usize| f.map(|g| g.values()[i].to_string()).unwrap_or_default();
    let blank = |f: Option<&GridFunction>| if f.is_some() { "0" } else { "" };
    writeln!(w, "0,{},{},0", blank(u_lambda), blank(v_lambda))?;
    for i in 0..grid.n_interior() {
        writeln!(w, "{},{},{},{}", grid.x(i), col(u_lambda, i), col(v_lambda, i), u_under.values()[i])?;
    }
    writeln!(w, "{},{},{},0", grid.measure(), blank(u_lambda), blank(v_lambda))
}

/// `iteration,J,residual`.
pub fn write_log_csv<W: Write>(mut w: W, log: &[(usize, f64, f64)]) -> io::Result<()> {
    writeln!(w, "iteration,J,residual")?;
    for (k, j, r) in log {
        writeln!(w, "{k},{j},{r}")?;
    }
    Ok(())
}
