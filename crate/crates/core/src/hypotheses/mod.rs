//! Problem encoding and sampled audits of the structural hypotheses on the
//! operator (ellipticity, Sobolev-type growth) and on the reaction
//! (blow-up at 0, subcritical growth, Ambrosetti–Rabinowitz condition).
//!
//! A PASS is sampled evidence on finite grids, never a proof.

mod builtin;
mod operator;
mod reaction;

use std::fmt;

use thiserror::Error;

use crate::orlicz::{Grid, OrliczError};
use crate::par::Execution;
use crate::quad::{adaptive, QuadError};
use crate::young::{
    divergence_test, sobolev_conjugate_regularized, young_conjugate, LogGrid, YoungError, YoungFunction,
};

pub use builtin::{ar_threshold, builtin_example, Builtin, BuiltinParams};
pub use operator::{Operator, OperatorKind, LOG_POWER_DOMAIN};
pub use reaction::{Reaction, RegularPart};

#[derive(Debug, Error)]
pub enum HypothesisError {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid reaction: {0}")]
    InvalidReaction(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
}

pub type Result<T> = std::result::Result<T, HypothesisError>;

/// The data of the Dirichlet problem `−Δ_Φ u = λ f(x, u)`, `u > 0`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub operator: Operator,
    pub reaction: Reaction,
    /// Growth function `Υ` with cached indices.
    pub upsilon: YoungFunction,
    pub c1: f64,
    pub c2: f64,
    pub mu: f64,
    /// Threshold `R` of the Ambrosetti–Rabinowitz condition.
    pub r_ar: f64,
    pub lambda: f64,
    pub n_dim: f64,
    pub grid: Grid,
    /// Upper end of the window on which the AR condition is sampled.
    pub t_max: f64,
}

impl ProblemSpec {
    pub fn phi(&self) -> &YoungFunction {
        self.operator.phi()
    }

    pub fn gamma(&self) -> f64 {
        self.reaction.gamma
    }

    /// Nodes at which x-dependent checks are sampled; a single node for
    /// autonomous reactions.
    pub fn sample_nodes(&self) -> Vec<f64> {
        if self.reaction.is_autonomous() {
            vec![0.5 * self.grid.measure()]
        } else {
            self.grid.nodes()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gamma = self.gamma();
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(HypothesisError::Construction(format!("gamma = {gamma} must lie in (0, 1)")));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("R", self.r_ar), ("lambda", self.lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HypothesisError::Construction(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.n_dim >= 2.0) {
            return Err(HypothesisError::Construction(format!("N = {} must be at least 2", self.n_dim)));
        }
        if self.upsilon.indices().is_none() {
            return Err(HypothesisError::Construction("Upsilon must carry computed indices".into()));
        }
        let grid = LogGrid::new(1e-3, 1e3, 60).map_err(HypothesisError::from)?;
        for &t in grid.points() {
            let phi = self.phi().derivative(t)?;
            let ta = t * self.operator.a(t);
            if (phi - ta).abs() > 1e-8 * phi.abs() {
                return Err(HypothesisError::Construction(format!("phi(t) != t a(t) at t = {t}: {phi} vs {ta}")));
            }
        }
        Ok(())
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ha1Report {
    pub inf: f64,
    pub sup: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Ha2Report {
    pub diverges: bool,
    /// `(T, ∫₁^T Θ)` samples behind the divergence verdict.
    pub theta_integrals: Vec<(f64, f64)>,
    pub s_phi: f64,
    /// `NaN` when `Φ_*` could not be built.
    pub i_phi_star: f64,
    /// Exponent of the power continuation used near 0, if any.
    pub regularized: Option<f64>,
    pub phi_star: Option<YoungFunction>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hf1Report {
    /// `0` when no dyadic `δ` works.
    pub delta: f64,
    /// `min_x f(x, 10^{-k})`, `k = 1..8`.
    pub minima: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hf2Report {
    /// Largest relative excess of `f` over `c₁Ῡ⁻¹(Υ(s)) + c₂s^{-γ}`.
    pub max_violation: f64,
    pub i_upsilon: f64,
    pub s_upsilon: f64,
    pub index_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hf3Report {
    /// Largest `(μF − tf)/(1 + |tf|)` over the sampled window.
    pub max_violation: f64,
    pub mu: f64,
    pub s_phi: f64,
    pub mu_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub ha1: Ha1Report,
    pub ha2: Ha2Report,
    pub hf1: Hf1Report,
    pub hf2: Hf2Report,
    pub hf3: Hf3Report,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.ha1.pass && self.ha2.pass && self.hf1.pass && self.hf2.pass && self.hf3.pass
    }

    /// One explanatory line per hypothesis.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "H(a)1 {}: inf t a'/a = {:.6}, sup = {:.6} (need inf > -1, sup finite)",
            verdict(self.ha1.pass),
            self.ha1.inf,
            self.ha1.sup
        )];
        let reg = match self.ha2.regularized {
            Some(q) => format!(", Phi continued as a power of exponent {q:.4} below t = 1"),
            None => String::new(),
        };
        out.push(format!(
            "H(a)2 {}: integral of Theta {} on [1, 1e8]; s_Phi = {:.6}, i_Phi* = {:.6}{}",
            verdict(self.ha2.pass),
            if self.ha2.diverges { "diverges" } else { "saturates (converges)" },
            self.ha2.s_phi,
            self.ha2.i_phi_star,
            reg
        ));
        out.push(format!(
            "H(f)1 {}: delta = {} (sampled evidence), min f(., 10^-k) for k = 1..8 {}",
            verdict(self.hf1.pass),
            self.hf1.delta,
            if self.hf1.minima.windows(2).all(|w| w[1] > w[0]) { "increasing" } else { "not increasing" }
        ));
        out.push(format!(
            "H(f)2 {}: max relative excess over growth bound = {:.3e}; i_Ups = {:.6}, s_Ups = {:.6}, index condition {}",
            verdict(self.hf2.pass),
            self.hf2.max_violation,
            self.hf2.i_upsilon,
            self.hf2.s_upsilon,
            if self.hf2.index_ok { "holds" } else { "fails" }
        ));
        out.push(format!(
            "H(f)3 {}: max (mu F - t f)/(1+|t f|) = {:.3e}; mu = {} vs s_Phi = {:.6}",
            verdict(self.hf3.pass),
            self.hf3.max_violation,
            self.hf3.mu,
            self.hf3.s_phi
        ));
        out
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.lines() {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Ellipticity: `−1 < inf t a'/a ≤ sup t a'/a < ∞` on 2000 samples in `[1e-4, 1e6]`.
pub fn check_ha1(op: &Operator) -> Result<Ha1Report> {
    let grid = LogGrid::new(1e-4, 1e6, 2000)?;
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for &t in grid.points() {
        let a = op.a(t);
        if !(a > 0.0) {
            return Err(HypothesisError::InvalidOperator(format!("a({t}) = {a} is not positive")));
        }
        let r = op.ellipticity_ratio(t);
        inf = inf.min(r);
        sup = sup.max(r);
    }
    Ok(Ha1Report { inf, sup, pass: inf > -1.0 && sup.is_finite() })
}

/// Divergence of `∫₁^∞ Θ_Φ` and `s_Φ < i_{Φ_*}`.
pub fn check_ha2(phi: &YoungFunction, n_dim: f64) -> Result<Ha2Report> {
    let idx = *phi.require_indices()?;
    let div = divergence_test(phi, n_dim)?;
    let mut report = Ha2Report {
        diverges: div.diverges,
        theta_integrals: div.values,
        s_phi: idx.upper,
        i_phi_star: f64::NAN,
        regularized: None,
        phi_star: None,
        pass: false,
    };
    if !div.diverges {
        return Ok(report);
    }
    let (star, q0) = sobolev_conjugate_regularized(phi, n_dim)?;
    let star = star.with_default_indices()?;
    report.i_phi_star = star.require_indices()?.lower;
    report.regularized = q0;
    report.phi_star = Some(star);
    report.pass = idx.upper < report.i_phi_star;
    Ok(report)
}

/// Blow-up of `f` at `0⁺`: largest dyadic `δ ≤ 1` with `f ≥ 1` on `(0, δ)`.
pub fn check_hf1(spec: &ProblemSpec) -> Result<Hf1Report> {
    let nodes = spec.sample_nodes();
    let min_f = |s: f64| -> Result<f64> {
        let mut m = f64::INFINITY;
        for &x in &nodes {
            let v = spec.reaction.value(x, s);
            if v.is_nan() || v < 0.0 {
                return Err(HypothesisError::InvalidReaction(format!("f({x}, {s}) = {v}")));
            }
            m = m.min(v);
        }
        Ok(m)
    };
    let mut delta = 0.0;
    for k in 0..=60 {
        let d = 2f64.powi(-k);
        let samples = LogGrid::new(d * 1e-6, d, 50)?;
        let mut ok = true;
        for &s in samples.points() {
            if min_f(s)? < 1.0 {
                ok = false;
                break;
            }
        }
        if ok {
            delta = d;
            break;
        }
    }
    let minima: Vec<f64> = (1..=8).map(|k| min_f(10f64.powi(-k))).collect::<Result<_>>()?;
    let increasing = minima.windows(2).all(|w| w[1] > w[0]);
    Ok(Hf1Report { delta, minima, pass: delta > 0.0 && increasing })
}

/// Growth bound `f ≤ c₁Ῡ⁻¹(Υ(s)) + c₂s^{-γ}` and `1 < i_Υ ≤ s_Υ < i_{Φ_*}`.
pub fn check_hf2(spec: &ProblemSpec, i_phi_star: f64) -> Result<Hf2Report> {
    let ups = &spec.upsilon;
    let idx = *ups.require_indices()?;
    let conj = young_conjugate(ups)?;
    let nodes = spec.sample_nodes();
    let samples = LogGrid::new(1e-4, 1e4, 200)?;
    let gamma = spec.gamma();
    let per_s = Execution::default().try_map(samples.points(), |&s| -> Result<f64> {
        let bound = spec.c1 * conj.inverse(ups.value(s)?)? + spec.c2 * s.powf(-gamma);
        let mut worst = f64::NEG_INFINITY;
        for &x in &nodes {
            worst = worst.max((spec.reaction.value(x, s) - bound) / bound);
        }
        Ok(worst)
    })?;
    let max_violation = per_s.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let index_ok = 1.0 < idx.lower && idx.upper < i_phi_star;
    Ok(Hf2Report {
        max_violation,
        i_upsilon: idx.lower,
        s_upsilon: idx.upper,
        index_ok,
        pass: max_violation <= 1e-8 && index_ok,
    })
}

/// Ambrosetti–Rabinowitz: `μF(x,t) ≤ t f(x,t)` on 200 samples of `[R, T_max]`,
/// with `F(x,t) = ∫_R^t f(x,s) ds` by adaptive quadrature.
pub fn check_hf3(spec: &ProblemSpec, t_max: f64) -> Result<Hf3Report> {
    let s_phi = spec.phi().require_indices()?.upper;
    let mu = spec.mu;
    let r = spec.r_ar;
    let samples = LogGrid::new(r, t_max.max(r * 10.0), 200)?;
    let pts = samples.points();
    let per_x = Execution::default().try_map(&spec.sample_nodes(), |&x| -> Result<f64> {
        let mut big_f = 0.0;
        let mut worst = f64::NEG_INFINITY;
        let mut prev = r;
        for &t in pts {
            big_f += adaptive(|s| spec.reaction.value(x, s), prev, t, 0.0, 1e-12)?;
            prev = t;
            let tf = t * spec.reaction.value(x, t);
            worst = worst.max((mu * big_f - tf) / (1.0 + tf.abs()));
        }
        Ok(worst)
    })?;
    let max_violation = per_x.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let mu_ok = mu > s_phi;
    Ok(Hf3Report { max_violation, mu, s_phi, mu_ok, pass: mu_ok && max_violation <= 1e-6 })
}

/// Runs all five audits; the Sobolev conjugate from the second feeds the
/// index condition of the fourth.
pub fn check_all(spec: &ProblemSpec) -> Result<HypothesisReport> {
    let ha1 = check_ha1(&spec.operator)?;
    let ha2 = check_ha2(spec.phi(), spec.n_dim)?;
    let hf1 = check_hf1(spec)?;
    let hf2 = check_hf2(spec, ha2.i_phi_star)?;
    let hf3 = check_hf3(spec, spec.t_max)?;
    Ok(HypothesisReport { ha1, ha2, hf1, hf2, hf3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ha1_for_powers() {
        let r = check_ha1(&Operator::power(3.0).unwrap()).unwrap();
        assert!(r.pass && (r.inf - 1.0).abs() < 1e-15 && (r.sup - 1.0).abs() < 1e-15);
        let bad = check_ha1(&Operator::power_unchecked(0.0)).unwrap();
        assert!(!bad.pass && (bad.inf + 2.0).abs() < 1e-15);
    }

    #[test]
    fn ha1_for_log_power() {
        let r = check_ha1(&Operator::log_power(3.0).unwrap()).unwrap();
        assert!(r.pass);
        assert!(r.inf > 1.0 && r.inf < 1.1, "{r:?}");
        assert!(r.sup < 2.0 && r.sup > 1.99, "{r:?}");
    }

    #[test]
    fn ha2_power_verdicts() {
        let ok = check_ha2(&YoungFunction::power(1.0, 3.0).with_default_indices().unwrap(), 4.0).unwrap();
        assert!(ok.diverges && ok.pass);
        assert!((ok.i_phi_star - 12.0).abs() < 1e-6);
        let bad = check_ha2(&YoungFunction::power(1.0, 5.0).with_default_indices().unwrap(), 4.0).unwrap();
        assert!(!bad.diverges && !bad.pass);
    }
}
