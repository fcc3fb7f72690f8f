use philab_core::young::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pathological() -> YoungFunction {
    build_pathological(PathologicalParams::new(3.0, 2.0, 1.9).unwrap()).unwrap()
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    LogGrid::new(lo, hi, n).unwrap().points().to_vec()
}

#[test]
fn pathological_indices_reach_q_and_p() {
    let psi = pathological().with_default_indices().unwrap();
    let idx = psi.indices().unwrap();
    assert!((idx.lower - 2.0).abs() < 1e-3, "{idx:?}");
    assert!((idx.upper - 3.0).abs() < 1e-3, "{idx:?}");
    assert_eq!(delta2_nabla2(&psi).unwrap(), (true, true));
}

#[test]
fn pathological_second_derivative_ratio_bounds() {
    let psi = pathological();
    let (q, p, be) = (2.0, 3.0, 0.5 * 1.9);
    for t in log_points(1e-6, 1e29, 3000) {
        let r = t * psi.second_derivative(t).unwrap() / psi.derivative(t).unwrap();
        assert!(r > q - 1.0 - be && r < p - 1.0 + be, "t={t} ratio={r}");
        assert!(psi.second_derivative(t).unwrap() > 0.0);
    }
}

#[test]
fn pathological_is_not_a_power() {
    let psi = pathological();
    let ratios: Vec<f64> = log_points(3.0, 1e27, 4000).iter().map(|&t| psi.value(t).unwrap() / t.powf(2.5)).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo > 10.0);
}

#[test]
fn conjugate_involution() {
    let cases = vec![
        YoungFunction::power(1.0 / 1.5, 1.5),
        YoungFunction::power(0.5, 2.0),
        YoungFunction::power(1.0 / 3.0, 3.0),
        pathological(),
    ];
    for psi in cases {
        let bar = young_conjugate(&psi).unwrap();
        let barbar = young_conjugate(&bar).unwrap();
        for t in log_points(1e-3, 1e6, 100) {
            let (a, b) = (psi.value(t).unwrap(), barbar.value(t).unwrap());
            assert!((a - b).abs() / a < 1e-6, "{} at t={t}: {a} vs {b}", psi.label());
        }
    }
}

#[test]
fn young_inequality_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for psi in [YoungFunction::power(1.0 / 3.0, 3.0), pathological()] {
        let bar = young_conjugate(&psi).unwrap();
        for _ in 0..1000 {
            let s = 10f64.powf(rng.gen_range(-3.0..4.0));
            let t = 10f64.powf(rng.gen_range(-3.0..6.0));
            let (ps, pt) = (psi.value(s).unwrap(), bar.value(t).unwrap());
            assert!(s * t <= (ps + pt) * (1.0 + 1e-12));
            let d = psi.derivative(s).unwrap();
            let eq = bar.value(d).unwrap() + ps;
            assert!((eq - s * d).abs() <= 1e-8 * s * d);
            let mid = s * bar.inverse(ps).unwrap();
            assert!(ps <= mid * (1.0 + 1e-9) && mid <= 2.0 * ps * (1.0 + 1e-9));
        }
    }
}

#[test]
fn factor_bounds_for_pathological() {
    let psi = pathological().with_default_indices().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let k = 10f64.powf(rng.gen_range(-2.0..2.0));
        let t = 10f64.powf(rng.gen_range(-2.0..3.0));
        let v = psi.value(t).unwrap();
        let kt = psi.value(k * t).unwrap();
        assert!(zeta_lower(&psi, k).unwrap() * v <= kt * (1.0 + 1e-9));
        assert!(kt <= zeta_upper(&psi, k).unwrap() * v * (1.0 + 1e-9));
    }
}

#[test]
fn conjugate_and_sobolev_index_bracketing() {
    let psi = pathological().with_default_indices().unwrap();
    let idx = *psi.indices().unwrap();
    let dual = |x: f64| x / (x - 1.0);
    let bar = young_conjugate(&psi).unwrap().with_default_indices().unwrap();
    let b = bar.indices().unwrap();
    assert!(dual(idx.upper) <= b.lower + 1e-2 && b.upper <= dual(idx.lower) + 1e-2, "{b:?}");

    let n = 5.0;
    let star = |x: f64| n * x / (n - x);
    let sob = sobolev_conjugate(&psi, n).unwrap().with_default_indices().unwrap();
    let s = sob.indices().unwrap();
    assert!(star(idx.lower) <= s.lower + 1e-2 && s.upper <= star(idx.upper) + 1e-2, "{s:?}");
}

#[test]
fn sum_of_powers_and_power_conjugate_orderings() {
    let a = YoungFunction::power(1.0, 2.0);
    let b = YoungFunction::power(1.0, 3.0);
    assert_eq!(ordering(&a, &b), Relation::MuchLess);
    assert_eq!(ordering(&b, &b), Relation::Less { c: 1.0 });
}
