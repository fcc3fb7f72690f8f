//! Subcommand bodies. Each returns `Ok(true)` on success, `Ok(false)` when a
//! numeric or hypothesis check failed after its reports were written.

use std::io::Write;

use anyhow::anyhow;
use philab_core::hypotheses::{builtin_example, check_all, Builtin, BuiltinParams, HypothesisReport};
use philab_core::solver::{run_pipeline_checked, write_log_csv, write_solution_csv, PipelineReport, Stage};
use philab_core::threshold::write_kappa_csv;
use philab_core::young::{
    build_pathological, compute_indices, delta2_nabla2, divergence_test, sobolev_conjugate_regularized,
    young_conjugate, EvalDomain, ExpMinusLinear, LogGrid, PathologicalParams, YoungFunction,
};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::output::{cell, field, Manifest, OutDir};
use crate::{ConfigArgs, ExampleArgs, FunctionArgs, PipelineArgs};

pub enum CliError {
    /// Bad flags, unreadable or invalid configuration.
    Usage(anyhow::Error),
    /// The computation itself failed.
    Numeric(anyhow::Error),
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Usage(e.into())
}

fn numeric<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Numeric(e.into())
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The selected function, its label and a hashable description.
fn select_function(args: &FunctionArgs) -> Result<(YoungFunction, String)> {
    let Some(name) = args.builtin.as_deref() else {
        let cfg = Config::load(args.config.as_deref(), &args.set).map_err(usage)?;
        let op = cfg.operator().map_err(usage)?;
        let desc = format!("config:{}", cfg.hash());
        return Ok((op.phi().clone(), desc));
    };
    if args.config.is_some() || !args.set.is_empty() {
        return Err(usage(anyhow!("--builtin and --config/--set are exclusive")));
    }
    let psi = match name {
        "power" => YoungFunction::power(args.coef.unwrap_or(1.0), args.p.unwrap_or(2.0)),
        "pathological" => {
            let params = PathologicalParams::new(
                args.p.unwrap_or(3.0),
                args.q.unwrap_or(2.0),
                args.eps.unwrap_or(PathologicalParams::DEFAULT_EPS),
            )
            .map_err(usage)?;
            build_pathological(params).map_err(usage)?
        }
        "log-power" => {
            let op = philab_core::hypotheses::Operator::log_power(args.p.unwrap_or(3.0)).map_err(usage)?;
            op.phi().clone()
        }
        "exp" => YoungFunction::new(ExpMinusLinear, EvalDomain::new(1e-8, 700.0).map_err(usage)?),
        other => return Err(usage(anyhow!("unknown builtin `{other}` (power, pathological, log-power, exp)"))),
    };
    let desc = format!("builtin={name} p={:?} q={:?} eps={:?} coef={:?}", args.p, args.q, args.eps, args.coef);
    Ok((psi, desc))
}

fn sample_grid(args: &FunctionArgs, lo: f64, hi: f64, n: usize) -> Result<LogGrid> {
    LogGrid::new(args.t_min.unwrap_or(lo), args.t_max.unwrap_or(hi), args.points.unwrap_or(n)).map_err(usage)
}

fn function_manifest(command: &str, args: &FunctionArgs, desc: &str) -> Manifest {
    let mut m = Manifest::new(command);
    m.set(
        "config_sha256",
        digest(&format!("{desc} t_min={:?} t_max={:?} points={:?}", args.t_min, args.t_max, args.points)),
    );
    m.set("seed", "none");
    m
}

pub fn indices(args: &FunctionArgs) -> Result<bool> {
    let (mut psi, desc) = select_function(args)?;
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let grid = match (args.t_min, args.t_max, args.points) {
        (None, None, None) => psi.default_index_grid().map_err(usage)?,
        _ => sample_grid(args, 1e-4, 1e6, 2000)?,
    };
    let mut manifest = function_manifest("indices", args, &desc);
    let idx = compute_indices(&psi, &grid).map_err(numeric)?;
    psi.set_indices(idx);
    let (d2, n2) = delta2_nabla2(&psi).map_err(numeric)?;
    out.write("indices.csv", |w| {
        writeln!(w, "function,lower,upper,lower_at_infinity,upper_at_infinity,delta2,nabla2")?;
        writeln!(
            w,
            "{},{},{},{},{},{d2},{n2}",
            field(&psi.label()),
            idx.lower,
            idx.upper,
            idx.at_infinity_lower,
            idx.at_infinity_upper
        )
    })
    .map_err(numeric)?;
    out.write("index_ratio.csv", |w| {
        writeln!(w, "t,ratio")?;
        for &t in grid.points() {
            writeln!(w, "{t},{}", cell(psi.index_ratio(t).ok()))?;
        }
        Ok(())
    })
    .map_err(numeric)?;
    println!("{}: lower index {:.6}, upper index {:.6}", psi.label(), idx.lower, idx.upper);
    println!("Delta2 {d2}, nabla2 {n2}");
    manifest.set("status", "ok");
    manifest.write(&out).map_err(numeric)?;
    Ok(true)
}

pub fn conjugate(args: &FunctionArgs) -> Result<bool> {
    let (psi, desc) = select_function(args)?;
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let grid = sample_grid(args, 1e-2, 1e2, 100)?;
    let mut manifest = function_manifest("conjugate", args, &desc);
    let conj = young_conjugate(&psi).map_err(numeric)?;
    let bi = young_conjugate(&conj).map_err(numeric)?;
    let mut worst: f64 = 0.0;
    out.write("conjugate.csv", |w| {
        writeln!(w, "t,psi,conjugate,biconjugate,relative_error")?;
        for &t in grid.points() {
            let v = psi.value(t).ok();
            let b = bi.value(t).ok();
            let err = match (v, b) {
                (Some(v), Some(b)) if v > 0.0 => Some((b - v).abs() / v),
                _ => None,
            };
            worst = worst.max(err.unwrap_or(f64::INFINITY));
            writeln!(w, "{t},{},{},{},{}", cell(v), cell(conj.value(t).ok()), cell(b), cell(err))?;
        }
        Ok(())
    })
    .map_err(numeric)?;
    println!("{}: max relative involution error {worst:.3e}", psi.label());
    manifest.set("involution_error", worst);
    manifest.set("status", "ok");
    manifest.write(&out).map_err(numeric)?;
    Ok(true)
}

pub fn sobolev(args: &FunctionArgs, n_dim: Option<f64>) -> Result<bool> {
    let (psi, desc) = select_function(args)?;
    let n_dim = match (n_dim, args.builtin.is_none()) {
        (Some(n), _) => n,
        (None, true) => Config::load(args.config.as_deref(), &args.set).map_err(usage)?.hypotheses.n_dim,
        (None, false) => 4.0,
    };
    let psi = if psi.indices().is_some() { psi } else { psi.with_default_indices().map_err(numeric)? };
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let mut manifest = function_manifest("sobolev-conjugate", args, &format!("{desc} N={n_dim}"));
    let div = divergence_test(&psi, n_dim).map_err(numeric)?;
    out.write("divergence.csv", |w| {
        writeln!(w, "T,theta_integral")?;
        for (t, v) in &div.values {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    })
    .map_err(numeric)?;
    if !div.diverges {
        println!("{}: the integral of Theta saturates for N = {n_dim}; no Sobolev conjugate", psi.label());
        manifest.set("status", "failure");
        manifest.write(&out).map_err(numeric)?;
        return Ok(false);
    }
    let (star, q0) = sobolev_conjugate_regularized(&psi, n_dim).map_err(numeric)?;
    let grid = sample_grid(args, 1e-2, 1e2, 100)?;
    out.write("sobolev.csv", |w| {
        writeln!(w, "t,phi,phi_star")?;
        for &t in grid.points() {
            writeln!(w, "{t},{},{}", cell(psi.value(t).ok()), cell(star.value(t).ok()))?;
        }
        Ok(())
    })
    .map_err(numeric)?;
    let star = star.with_default_indices().map_err(numeric)?;
    let idx = star.require_indices().map_err(numeric)?;
    println!("{}: Phi_* indices [{:.6}, {:.6}] for N = {n_dim}", psi.label(), idx.lower, idx.upper);
    if let Some(q) = q0 {
        println!("Phi continued as a power of exponent {q:.4} below t = 1");
    }
    manifest.set("status", "ok");
    manifest.write(&out).map_err(numeric)?;
    Ok(true)
}

fn write_hypotheses(out: &OutDir, report: &HypothesisReport) -> Result<()> {
    out.write("hypotheses.csv", |w| {
        writeln!(w, "hypothesis,verdict,detail")?;
        for line in report.lines() {
            let (head, detail) = line.split_once(": ").unwrap_or((&line, ""));
            let (name, verdict) = head.split_once(' ').unwrap_or((head, ""));
            writeln!(w, "{},{},{}", field(name), field(verdict), field(detail))?;
        }
        Ok(())
    })
    .map_err(numeric)
}

fn print_hypotheses(report: &HypothesisReport) {
    for line in report.lines() {
        println!("{line}");
    }
}

fn config_manifest(command: &str, cfg: &Config) -> Manifest {
    let mut m = Manifest::new(command);
    m.set("config_sha256", cfg.hash());
    m.set("seed", cfg.solver.seed);
    for (k, v) in cfg.tolerances() {
        m.set(k, v);
    }
    m
}

pub fn check(args: &ConfigArgs) -> Result<bool> {
    let cfg = Config::load(args.config.as_deref(), &args.set).map_err(usage)?;
    let spec = cfg.problem().map_err(usage)?;
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let mut manifest = config_manifest("check", &cfg);
    let report = check_all(&spec).map_err(numeric)?;
    write_hypotheses(&out, &report)?;
    print_hypotheses(&report);
    let pass = report.all_pass();
    manifest.set("status", if pass { "ok" } else { "failure" });
    manifest.write(&out).map_err(numeric)?;
    Ok(pass)
}

pub fn verify_example(args: &ExampleArgs) -> Result<bool> {
    let which: Builtin = args.name.parse().map_err(usage)?;
    let params = BuiltinParams {
        p: args.p,
        q: args.q,
        eps: args.eps,
        n_dim: args.n_dim,
        r: args.r,
        gamma: args.gamma,
        lambda: args.lambda,
        h: args.h,
        ..Default::default()
    };
    let spec = builtin_example(which, &params).map_err(usage)?;
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let mut manifest = Manifest::new("verify-example");
    manifest.set("config_sha256", digest(&format!("{} {params:?}", args.name)));
    manifest.set("seed", "none");
    let report = check_all(&spec).map_err(numeric)?;
    write_hypotheses(&out, &report)?;
    println!("{}", spec.name);
    print_hypotheses(&report);
    let pass = report.all_pass();
    manifest.set("status", if pass { "ok" } else { "failure" });
    manifest.write(&out).map_err(numeric)?;
    Ok(pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineCommand {
    LambdaStar,
    Solve,
    MountainPass,
    DeGiorgi,
}

impl PipelineCommand {
    fn name(self) -> &'static str {
        match self {
            PipelineCommand::LambdaStar => "lambda-star",
            PipelineCommand::Solve => "solve",
            PipelineCommand::MountainPass => "mountain-pass",
            PipelineCommand::DeGiorgi => "degiorgi",
        }
    }

    fn stage(self) -> Stage {
        match self {
            PipelineCommand::LambdaStar => Stage::Threshold,
            PipelineCommand::Solve => Stage::FirstSolution,
            PipelineCommand::MountainPass => Stage::MountainPass,
            PipelineCommand::DeGiorgi => Stage::DeGiorgi,
        }
    }
}

pub fn pipeline(args: &PipelineArgs, command: PipelineCommand) -> Result<bool> {
    let cfg = Config::load(Some(&args.config), &args.set).map_err(usage)?;
    let spec = cfg.problem().map_err(usage)?;
    let out = OutDir::create(&args.out.out).map_err(usage)?;
    let mut manifest = config_manifest(command.name(), &cfg);
    let hypotheses = check_all(&spec).map_err(numeric)?;
    write_hypotheses(&out, &hypotheses)?;
    print_hypotheses(&hypotheses);
    let report = match run_pipeline_checked(&spec, hypotheses, &cfg.pipeline_options(), command.stage()) {
        Ok(r) => r,
        Err(e) => {
            manifest.set("status", "failure");
            manifest.set("error", &e);
            manifest.write(&out).map_err(numeric)?;
            println!("FAIL: {e}");
            return Ok(false);
        }
    };
    let ok = write_pipeline(&out, &report, &mut manifest)?;
    manifest.set("status", if ok { "ok" } else { "failure" });
    manifest.write(&out).map_err(numeric)?;
    Ok(ok)
}

/// Writes every artifact the report holds; `false` if a solution check failed.
fn write_pipeline(out: &OutDir, r: &PipelineReport, manifest: &mut Manifest) -> Result<bool> {
    let t = &r.threshold;
    println!("case {}, lambda* = {}, lambda = {}, r* = {}", t.case, t.lambda_star, r.lambda, r.r_star);
    println!(
        "sub-solution: n = {}, max = {}, delta = {}, k1 = {}, k2 = {}",
        r.sub.n_hat,
        r.sub.u_under.max(),
        r.sub.delta,
        r.sub.k1,
        r.sub.k2
    );
    manifest.set("lambda", r.lambda);
    manifest.set("lambda_star", t.lambda_star);
    out.write("threshold.csv", |w| t.write_csv(w, &[r.lambda])).map_err(numeric)?;
    let rs: Vec<f64> = (0..=80).map(|k| r.r_star * 10f64.powf((k as f64 - 40.0) / 20.0)).collect();
    let curve = t.kappa_curve(r.lambda, &rs).map_err(numeric)?;
    out.write("kappa.csv", |w| write_kappa_csv(w, &curve)).map_err(numeric)?;
    let mut ok = r.sub.slopes_hold();
    let Some(first) = &r.first else {
        return Ok(ok);
    };
    let s = &first.state;
    println!(
        "first solution: J = {}, H = {}, residual = {:e}, max = {}, above sub-solution {}",
        s.j_value,
        s.h_value,
        s.residual,
        s.u.max(),
        first.check.above_sub
    );
    ok &= first.check.above_sub && first.check.positive && first.coercivity_ok;
    out.write("convergence_first.csv", |w| write_log_csv(w, &first.log)).map_err(numeric)?;
    let second = r.second.as_ref();
    out.write("solution.csv", |w| {
        write_solution_csv(w, s.u.grid(), Some(&s.u), second.map(|v| &v.state.u), &r.sub.u_under)
    })
    .map_err(numeric)?;
    if let Some(v) = second {
        let vs = &v.state;
        let gap = vs.u.values().iter().zip(s.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "mountain pass: J = {}, residual = {:e}, max = {}, sup distance to the first = {}, endpoint scale M = {}",
            vs.j_value,
            vs.residual,
            vs.u.max(),
            gap,
            v.endpoint_scale
        );
        ok &= v.check.above_sub && v.check.positive && vs.j_value >= s.j_value;
        out.write("convergence_mountain.csv", |w| write_log_csv(w, &v.outcome.log)).map_err(numeric)?;
    }
    if let Some(d) = &r.degiorgi {
        println!(
            "De Giorgi: M = {}, levels = {}, ln C = {}, reaches zero {}, recursion holds {}",
            d.bound,
            d.levels.len(),
            d.log_c,
            d.reaches_zero(),
            d.recursion_holds()
        );
        ok &= d.reaches_zero() && d.recursion_holds() && d.nonincreasing_after_smallness();
        out.write("degiorgi.csv", |w| d.write_csv(w)).map_err(numeric)?;
    }
    Ok(ok)
}
