//! Sobolev–Orlicz conjugate `Φ_*`, defined by `Φ_*⁻¹(t) = ∫₀^t Θ(s) ds` with
//! `Θ(s) = Φ⁻¹(s)/s^{1+1/N}`.
//!
//! Substituting `s = Φ(y)` turns the integral into
//! `g(τ) = ∫₀^τ yφ(y)Φ(y)^{-1-1/N} dy`, so that `Φ_*(g(τ)) = Φ(τ)` and
//! `Φ_*'(g(τ)) = Φ(τ)^{1+1/N}/τ`. No inversion of `Φ` is needed; `g` is
//! tabulated on log-spaced knots and inverted by safeguarded Newton steps.

use super::generators::NearZeroPower;
use super::{EvalDomain, Generator, Result, YoungError, YoungFunction};
use crate::quad::{adaptive_log, gauss_legendre8};

#[derive(Debug, Clone)]
pub struct SobolevConjugate {
    phi: YoungFunction,
    n_dim: f64,
    log_lo: f64,
    step: f64,
    knots: Vec<f64>,
    g: Vec<f64>,
    /// Exponent of the power law `g(τ) ∝ τ^a` used below the first knot.
    tail_exponent: f64,
}

const KNOTS_PER_DECADE: f64 = 50.0;

/// `yφ(y)Φ(y)^{-1-1/N}` computed in logarithms.
fn integrand(phi: &YoungFunction, n_dim: f64, y: f64) -> f64 {
    let gen = phi.generator();
    let (v, d) = match (gen.value(y), gen.derivative(y)) {
        (Ok(v), Ok(d)) => (v, d),
        _ => return f64::NAN,
    };
    (y.ln() + d.ln() - (1.0 + 1.0 / n_dim) * v.ln()).exp()
}

impl SobolevConjugate {
    fn build(phi: YoungFunction, n_dim: f64) -> Result<Self> {
        let dom = phi.domain();
        let w = |y: f64| integrand(&phi, n_dim, y);
        let t0 = dom.lo;
        let t1 = dom.lo * 10.0;
        let (w0, w1) = (w(t0) * t0, w(t1) * t1);
        let a = (w1 / w0).ln() / 10f64.ln();
        if !a.is_finite() || a <= 0.01 {
            return Err(YoungError::SingularIntegrand(format!(
                "integrand of Phi_*^-1 behaves like y^({:.4} - 1) near 0",
                a
            )));
        }
        let log_lo = dom.lo.ln();
        let n = (dom.decades() * KNOTS_PER_DECADE).ceil() as usize + 1;
        let step = (dom.hi.ln() - log_lo) / (n - 1) as f64;
        let knots: Vec<f64> = (0..n).map(|i| (log_lo + step * i as f64).exp()).collect();
        let mut g = Vec::with_capacity(n);
        g.push(w0 / a);
        for win in knots.windows(2) {
            let seg = gauss_legendre8(w, win[0], win[1]);
            g.push(g.last().unwrap() + seg);
        }
        if let Some(bad) = g.iter().position(|v| !v.is_finite()) {
            return Err(YoungError::NonFinite { t: knots[bad] });
        }
        Ok(SobolevConjugate { phi, n_dim, log_lo, step, knots, g, tail_exponent: a })
    }

    fn w(&self, y: f64) -> f64 {
        integrand(&self.phi, self.n_dim, y)
    }

    /// `g(τ) = Φ_*⁻¹(Φ(τ))`.
    pub fn g_at(&self, tau: f64) -> f64 {
        if tau < self.knots[0] {
            return self.g[0] * (tau / self.knots[0]).powf(self.tail_exponent);
        }
        let j = (((tau.ln() - self.log_lo) / self.step).floor() as usize).min(self.knots.len() - 1);
        let j = if self.knots[j] > tau && j > 0 { j - 1 } else { j };
        self.g[j] + gauss_legendre8(|y| self.w(y), self.knots[j], tau)
    }

    /// `τ` with `g(τ) = t`.
    pub fn tau_of(&self, t: f64) -> Result<f64> {
        if t < self.g[0] {
            return Ok(self.knots[0] * (t / self.g[0]).powf(1.0 / self.tail_exponent));
        }
        let last = self.g.len() - 1;
        if t > self.g[last] * (1.0 + 1e-12) {
            return Err(YoungError::Domain { t, lo: self.g[0], hi: self.g[last] });
        }
        let j = match self.g.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(j) => return Ok(self.knots[j]),
            Err(j) => j.clamp(1, last) - 1,
        };
        let (mut lo, mut hi) = (self.knots[j], self.knots[j + 1]);
        let frac = (t - self.g[j]) / (self.g[j + 1] - self.g[j]);
        let mut tau = lo + frac * (hi - lo);
        for _ in 0..60 {
            let r = self.g[j] + gauss_legendre8(|y| self.w(y), self.knots[j], tau) - t;
            if r > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let mut next = tau - r / self.w(tau);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - tau).abs() <= 1e-15 * tau {
                return Ok(next);
            }
            tau = next;
        }
        Ok(tau)
    }

    pub fn n_dim(&self) -> f64 {
        self.n_dim
    }

    /// The generator `Φ` actually used (possibly regularised near 0).
    pub fn phi(&self) -> &YoungFunction {
        &self.phi
    }

    fn domain(&self) -> EvalDomain {
        EvalDomain { lo: self.g[0], hi: *self.g.last().unwrap() }
    }
}

impl Generator for SobolevConjugate {
    fn value(&self, t: f64) -> Result<f64> {
        let tau = self.tau_of(t)?;
        self.phi.generator().value(tau)
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let tau = self.tau_of(t)?;
        let v = self.phi.generator().value(tau)?;
        Ok(((1.0 + 1.0 / self.n_dim) * v.ln() - tau.ln()).exp())
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        let run = || -> Result<f64> {
            let tau = self.tau_of(t)?;
            let gen = self.phi.generator();
            let (v, d) = (gen.value(tau)?, gen.derivative(tau)?);
            let e = 1.0 + 1.0 / self.n_dim;
            let first = v.powf(e) / tau;
            // d/dτ of Φ^e/τ, times dτ/dt = 1/w(τ)
            let dtau = e * d / v * first - first / tau;
            Ok(dtau / self.w(tau))
        };
        Some(run())
    }
    fn label(&self) -> String {
        format!("sobolev({}, N={})", self.phi.label(), self.n_dim)
    }
}

/// Outcome of the divergence test for `∫₁^T Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// `(T, ∫₁^T Θ)` for `T = 10², …, 10⁸`.
    pub values: Vec<(f64, f64)>,
    pub diverges: bool,
}

/// `∫_a^b Θ(s) ds` through the substitution `s = Φ(y)`.
pub fn theta_integral(phi: &YoungFunction, n_dim: f64, a: f64, b: f64) -> Result<f64> {
    let ya = phi.inverse(a)?;
    let yb = phi.inverse(b)?;
    Ok(adaptive_log(|y| integrand(phi, n_dim, y), ya, yb, 0.0, 1e-11)?)
}

/// Samples `I_k = ∫₁^{10^k} Θ` for `k = 2..8`.
///
/// Divergence requires every successive ratio `I_{k+1}/I_k ≥ 1 + 10⁻³` and
/// increments that do not shrink geometrically: a convergent tail with a
/// slowly decaying integrand still passes the ratio test on this window,
/// while its increments contract by a fixed factor below one per decade.
pub fn divergence_test(phi: &YoungFunction, n_dim: f64) -> Result<Divergence> {
    let mut values = Vec::new();
    for k in 2..=8 {
        let t = 10f64.powi(k);
        values.push((t, theta_integral(phi, n_dim, 1.0, t)?));
    }
    let ratios_ok = values.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 + 1e-3));
    let inc: Vec<f64> = std::iter::once(values[0].1).chain(values.windows(2).map(|w| w[1].1 - w[0].1)).collect();
    let n = inc.len();
    let increments_ok = inc[n - 1] >= inc[n - 2] * (1.0 - 1e-3);
    Ok(Divergence { values, diverges: ratios_ok && increments_ok })
}

/// `Φ_*` for `Φ` whose integrand is integrable at 0 and divergent at infinity.
pub fn sobolev_conjugate(phi: &YoungFunction, n_dim: f64) -> Result<YoungFunction> {
    if !(n_dim >= 2.0) {
        return Err(YoungError::Construction(format!("dimension N = {n_dim} must be at least 2")));
    }
    let div = divergence_test(phi, n_dim)?;
    if !div.diverges {
        let (t, v) = *div.values.last().unwrap();
        return Err(YoungError::NotDiverging(format!("integral up to {t:e} saturates at {v}")));
    }
    let sc = SobolevConjugate::build(phi.clone(), n_dim)?;
    let domain = sc.domain();
    Ok(YoungFunction::new(sc, domain))
}

/// As [`sobolev_conjugate`], but when the integrand is not integrable at 0
/// the generator is first replaced below `t = 1` by the C¹ power continuation
/// (which leaves `Φ` unchanged at infinity, the only place the conjugate
/// enters the hypotheses). Returns the exponent used, if any.
pub fn sobolev_conjugate_regularized(phi: &YoungFunction, n_dim: f64) -> Result<(YoungFunction, Option<f64>)> {
    match sobolev_conjugate(phi, n_dim) {
        Err(YoungError::SingularIntegrand(msg)) => {
            let reg = NearZeroPower::new(phi.clone(), 1.0)?;
            let q0 = reg.exponent();
            if q0 >= n_dim {
                return Err(YoungError::SingularIntegrand(format!("{msg}; power continuation {q0} is not below N")));
            }
            Ok((sobolev_conjugate(&reg.young(), n_dim)?, Some(q0)))
        }
        other => other.map(|f| (f, None)),
    }
}
