use std::sync::Arc;

use philab_core::hypotheses::{builtin_example, check_ha2, Builtin, BuiltinParams, ProblemSpec};
use philab_core::threshold::*;
use philab_core::young::{EvalDomain, Primitive, YoungFunction};

/// `Φ = t²/2` in dimension 3 against `Υ = t² log(e + t)`: `Φ < Υ` while the
/// logarithmic gap is too slow for the tail scan to certify `≪`. The lower
/// index of `Υ` is pinned to its exact value 2 (the limit at `0⁺`), which the
/// sampled grid only approaches from above.
fn greater_setup() -> (ProblemSpec, YoungFunction) {
    let mut spec = builtin_example(Builtin::PathologicalReaction, &BuiltinParams::default()).unwrap();
    let e = std::f64::consts::E;
    let domain = EvalDomain::new(1e-8, 1e30).unwrap();
    let mut ups =
        Primitive::new(Arc::new(move |t: f64| 2.0 * t * (e + t).ln() + t * t / (e + t)), None, domain, "t^2 log(e+t)")
            .unwrap()
            .into_young(domain)
            .with_default_indices()
            .unwrap();
    let mut idx = *ups.indices().unwrap();
    idx.lower = 2.0;
    ups.set_indices(idx);
    spec.upsilon = ups;
    let star = check_ha2(spec.phi(), spec.n_dim).unwrap().phi_star.unwrap();
    (spec, star)
}

#[test]
fn third_case_reduces_through_intermediate_function() {
    let (spec, star) = greater_setup();
    let cls = classify(&spec.upsilon, spec.phi()).unwrap();
    assert_eq!(cls.case, Case::Greater);
    let c = truncation_constants(&spec, 1.0, 0.5).unwrap();
    let opts = ThresholdOptions { phi_star: Some(star), n_trials: 30, ..Default::default() };
    let res = lambda_star(&spec, c, cls, &opts).unwrap();
    let d3 = res.case3.as_ref().unwrap();
    assert!(d3.index_bracket_ok, "{:?}", d3.upsilon_hat.indices());
    assert!(d3.ordering_ok);
    assert!(d3.c1_hat >= c.c1);
    let d4 = res.case4.unwrap();
    assert!(d4.theta > 0.0);
    let l = 0.5 * res.lambda_star;
    assert!(l * res.kappa_bound(l, res.r_star(l).unwrap()).unwrap() < 1.0);
}

#[test]
fn a5_threshold_with_estimated_embedding() {
    let spec = builtin_example(Builtin::A5, &BuiltinParams::default()).unwrap();
    let c = truncation_constants(&spec, 0.2, 0.1).unwrap();
    let cls = classify(&spec.upsilon, spec.phi()).unwrap();
    let opts = ThresholdOptions { seed: 7, n_trials: 60, ..Default::default() };
    let res = lambda_star(&spec, c, cls, &opts).unwrap();
    let again = lambda_star(&spec, c, cls, &opts).unwrap();
    assert_eq!(res.lambda_star, again.lambda_star);
    let d = res.case4.unwrap();
    assert!(d.k > 0.0 && d.k.is_finite());
    let rs: Vec<f64> = (0..200).map(|i| d.r_min * 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0)).collect();
    let curve = res.kappa_curve(1.0, &rs).unwrap();
    let (imin, _) = curve
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &(_, k))| if k < bv { (i, k) } else { (bi, bv) });
    // U-shape with the minimum at r*, up to one grid step in log scale
    assert!((curve[imin].0 / d.r_min).ln().abs() <= 4.0 * 10f64.ln() / 199.0 + 1e-12);
    assert!(curve[0].1 > curve[imin].1 && curve[199].1 > curve[imin].1);
}
