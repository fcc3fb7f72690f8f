use philab_core::hypotheses::{builtin_example, Builtin, BuiltinParams, Operator, ProblemSpec};
use philab_core::orlicz::{Grid, GridFunction};
use philab_core::solver::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn closed_form(p: f64, c: f64, x: f64) -> f64 {
    let e = p / (p - 1.0);
    c.powf(1.0 / (p - 1.0)) * ((p - 1.0) / p) * (0.5f64.powf(e) - (x - 0.5).abs().powf(e))
}

fn torsion_error(p: f64, c: f64, h: f64) -> f64 {
    let grid = Grid::with_spacing(1.0, h).unwrap();
    let u = solve_torsion(&Operator::power(p).unwrap(), c, &grid, &DescentOptions::default()).unwrap();
    grid.nodes().iter().zip(u.values()).map(|(x, v)| (closed_form(p, c, *x) - v).abs()).fold(0.0, f64::max)
}

#[test]
fn torsion_matches_closed_form_with_first_order_convergence() {
    for p in [2.0, 3.0] {
        for c in [1.0, 0.1] {
            let errs: Vec<f64> = (6..=9).map(|k| torsion_error(p, c, 2f64.powi(-k))).collect();
            let h8 = 2f64.powi(-8);
            assert!(errs[2] <= 5.0 * h8, "p = {p}, c = {c}: {errs:?}");
            // Least-squares slope of log err against log h.
            let pts: Vec<(f64, f64)> =
                errs.iter().enumerate().map(|(i, e)| ((-(6.0 + i as f64)) * 2f64.ln(), e.max(1e-300).ln())).collect();
            let n = pts.len() as f64;
            let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            // Exact nodal values (p = 2) leave only rounding, which is fine too.
            assert!(slope >= 1.0 || errs.iter().all(|e| *e < 1e-9), "p = {p}, c = {c}: order {slope}, {errs:?}");
        }
    }
}

fn a5() -> ProblemSpec {
    builtin_example(Builtin::A5, &BuiltinParams::default()).unwrap()
}

fn a5_energy(spec: &ProblemSpec) -> (DiscreteEnergy, PipelineReport) {
    let report = run_pipeline(spec, &PipelineOptions::default(), Stage::Threshold).unwrap();
    let trunc = Truncation::new(&spec.reaction, &report.sub.u_under);
    (DiscreteEnergy::truncated(&spec.operator, spec.grid, report.lambda, trunc), report)
}

#[test]
fn gradient_matches_central_differences() {
    let spec = a5();
    let (energy, report) = a5_energy(&spec);
    let under = report.sub.u_under.values();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let amp = rng.gen_range(0.1..3.0);
        let u: Vec<f64> = under.iter().map(|b| b + amp * rng.gen_range(-0.5..1.0) * b.sqrt()).collect();
        let v: Vec<f64> = (0..u.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = energy.gradient(&u);
        let analytic: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        let eps = 1e-5;
        let shift = |t: f64| -> Vec<f64> { u.iter().zip(&v).map(|(a, b)| a + t * b).collect() };
        let fd = (energy.energy(&shift(eps)) - energy.energy(&shift(-eps))) / (2.0 * eps);
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-12);
        assert!(rel < 1e-5, "relative error {rel}: fd {fd}, analytic {analytic}");
    }
}

#[test]
fn energy_state_identities() {
    let spec = a5();
    let (energy, report) = a5_energy(&spec);
    let s = energy.state(&report.sub.u_under);
    assert_eq!(s.j_value, s.h_value - energy.lambda() * s.k_value);
    assert_eq!(s.residual, max_abs(&s.gradient));
    // u ≡ 0 has F̂(x, 0) = 0.
    let zero = GridFunction::zeros(spec.grid);
    assert_eq!(energy.k_value(zero.values()), 0.0);
}

#[test]
fn subsolution_residual_is_sign_definite() {
    let spec = a5();
    let (energy, report) = a5_energy(&spec);
    // −Δ_Φ u̲ = 1/n̂ ≤ λ f̂(x, u̲): the gradient of J at u̲ is nonpositive.
    let g = energy.gradient(report.sub.u_under.values());
    let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(g.iter().all(|x| *x <= 1e-8 * scale), "{g:?}");
}

#[test]
fn a5_two_solutions() {
    let spec = a5();
    let r = run_pipeline(&spec, &PipelineOptions::default(), Stage::DeGiorgi).unwrap();
    assert!(r.hypotheses.all_pass());
    assert!(r.sub.u_under.max() < r.sub.delta && r.sub.delta < spec.r_ar && r.sub.slopes_hold());
    assert!(r.lambda < r.threshold.lambda_star);
    let first = r.first.as_ref().unwrap();
    assert!(first.state.residual < 1e-6 && first.state.h_value < r.r_star);
    assert!(first.check.above_sub && first.check.positive && first.coercivity_ok);
    let second = r.second.as_ref().unwrap();
    let (u, v) = (&first.state, &second.state);
    assert!(v.residual < 1e-4 && v.j_value >= u.j_value);
    let gap = u.u.values().iter().zip(v.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap > 1e-2, "{gap}");
    assert!(second.outcome.path_max >= u.j_value.max(energy_at(&spec, &r, second.endpoint.values())));
    // A perturbed solution is clearly not critical.
    let trunc = Truncation::new(&spec.reaction, &r.sub.u_under);
    let energy = DiscreteEnergy::truncated(&spec.operator, spec.grid, r.lambda, trunc);
    let hat = plateau_hat(&spec.grid).unwrap();
    let bumped: Vec<f64> = u.u.values().iter().zip(hat.values()).map(|(a, b)| a + 0.1 * b).collect();
    let check = verify_solution(&energy, &GridFunction::new(spec.grid, bumped).unwrap(), None);
    assert!(check.residual > 10.0 * 1e-6, "{check:?}");
    let d = r.degiorgi.as_ref().unwrap();
    assert!(d.reaches_zero() && d.recursion_holds() && d.nonincreasing_after_smallness());
    assert!(d.bound >= u.u.max());
}

fn energy_at(spec: &ProblemSpec, r: &PipelineReport, w: &[f64]) -> f64 {
    let trunc = Truncation::new(&spec.reaction, &r.sub.u_under);
    DiscreteEnergy::truncated(&spec.operator, spec.grid, r.lambda, trunc).energy(w)
}

#[test]
fn pure_energy_has_no_mountain_pass() {
    // λ → 0: J is the strictly convex H, whose only critical point is 0.
    let spec = a5();
    let (_, report) = a5_energy(&spec);
    let convex =
        DiscreteEnergy::truncated(&spec.operator, spec.grid, 0.0, Truncation::new(&spec.reaction, &report.sub.u_under));
    let zero = vec![0.0; spec.grid.n_interior()];
    let hat = plateau_hat(&spec.grid).unwrap();
    let far: Vec<f64> = hat.values().iter().map(|x| -x).collect();
    let mirrored: Vec<f64> = hat.values().to_vec();
    let err = mountain_pass(&convex, &far, &mirrored, &MountainPassOptions::default()).unwrap_err();
    assert!(matches!(err, SolverError::Collapse { .. }), "{err:?}");
    assert!(matches!(
        mountain_pass(&convex, &zero, &mirrored, &MountainPassOptions::default()),
        Err(SolverError::Precondition(_))
    ));
}

#[test]
fn resolution_changes_subsolution_index_by_at_most_one_doubling() {
    let op = Operator::log_power(3.0).unwrap();
    let opts = DescentOptions::default();
    let coarse = build_subsolution(&op, &Grid::with_spacing(1.0, 1.0 / 64.0).unwrap(), 1.0, 4.0, 0.04, &opts).unwrap();
    let fine = build_subsolution(&op, &Grid::with_spacing(1.0, 1.0 / 128.0).unwrap(), 1.0, 4.0, 0.04, &opts).unwrap();
    let ratio = coarse.n_hat.max(fine.n_hat) / coarse.n_hat.min(fine.n_hat);
    assert!(ratio <= 2, "{} vs {}", coarse.n_hat, fine.n_hat);
}
