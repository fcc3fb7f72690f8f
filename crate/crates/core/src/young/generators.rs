//! Closed-form and tabulated generators.

use std::fmt;
use std::sync::Arc;

use super::{EvalDomain, Generator, Result, YoungError, YoungFunction};
use crate::quad::{adaptive, gauss_legendre8};

/// `coef * t^p`.
#[derive(Debug, Clone, Copy)]
pub struct Power {
    pub coef: f64,
    pub p: f64,
}

impl Generator for Power {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.coef * t.powf(self.p))
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        Ok(self.coef * self.p * t.powf(self.p - 1.0))
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        Some(Ok(self.coef * self.p * (self.p - 1.0) * t.powf(self.p - 2.0)))
    }
    fn label(&self) -> String {
        format!("{}*t^{}", self.coef, self.p)
    }
}

/// `Σ c_k t^{p_k}`.
#[derive(Debug, Clone)]
pub struct PowerSum {
    terms: Vec<(f64, f64)>,
}

impl PowerSum {
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        PowerSum { terms }
    }
}

impl Generator for PowerSum {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.terms.iter().map(|&(c, p)| c * t.powf(p)).sum())
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        Ok(self.terms.iter().map(|&(c, p)| c * p * t.powf(p - 1.0)).sum())
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        Some(Ok(self.terms.iter().map(|&(c, p)| c * p * (p - 1.0) * t.powf(p - 2.0)).sum()))
    }
    fn label(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(c, p)| format!("{c}*t^{p}")).collect();
        parts.join("+")
    }
}

/// `e^t − t − 1`, outside Δ₂.
#[derive(Debug, Clone, Copy)]
pub struct ExpMinusLinear;

impl Generator for ExpMinusLinear {
    fn value(&self, t: f64) -> Result<f64> {
        if t < 1e-3 {
            // series keeps full relative precision near 0
            Ok(t * t * (0.5 + t * (1.0 / 6.0 + t * (1.0 / 24.0 + t / 120.0))))
        } else {
            Ok(t.exp_m1() - t)
        }
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        Ok(t.exp_m1())
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        Some(Ok(t.exp()))
    }
    fn label(&self) -> String {
        "exp(t)-t-1".into()
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `Φ(t) = ∫₀^t φ(s) ds` with a cumulative table on log-spaced knots.
///
/// Values between knots add one 8-point Gauss-Legendre panel, so `Φ' = φ`
/// holds exactly and `Φ` is accurate to roughly machine precision.
#[derive(Clone)]
pub struct Primitive {
    phi: ScalarFn,
    dphi: Option<ScalarFn>,
    label: String,
    log_lo: f64,
    step: f64,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Primitive").field("label", &self.label).field("knots", &self.knots.len()).finish()
    }
}

impl Primitive {
    pub const KNOTS_PER_DECADE: usize = 50;

    pub fn new(phi: ScalarFn, dphi: Option<ScalarFn>, domain: EvalDomain, label: impl Into<String>) -> Result<Self> {
        let log_lo = domain.lo.ln();
        let n = (domain.decades() * Self::KNOTS_PER_DECADE as f64).ceil() as usize + 1;
        let step = (domain.hi.ln() - log_lo) / (n - 1) as f64;
        let knots: Vec<f64> = (0..n).map(|i| (log_lo + step * i as f64).exp()).collect();
        let head = adaptive(|s| phi(s), 0.0, knots[0], 0.0, 1e-13)?;
        let mut cumulative = Vec::with_capacity(n);
        cumulative.push(head);
        for w in knots.windows(2) {
            let seg = gauss_legendre8(|s| phi(s), w[0], w[1]);
            let prev = *cumulative.last().unwrap();
            cumulative.push(prev + seg);
        }
        if let Some(bad) = cumulative.iter().position(|v| !v.is_finite()) {
            return Err(YoungError::NonFinite { t: knots[bad] });
        }
        Ok(Primitive { phi, dphi, label: label.into(), log_lo, step, knots, cumulative })
    }

    pub fn into_young(self, domain: EvalDomain) -> YoungFunction {
        YoungFunction::new(self, domain)
    }
}

impl Generator for Primitive {
    fn value(&self, t: f64) -> Result<f64> {
        if t < self.knots[0] {
            return Ok(gauss_legendre8(|s| (self.phi)(s), 0.0, t));
        }
        let j = (((t.ln() - self.log_lo) / self.step).floor() as usize).min(self.knots.len() - 1);
        // guard against rounding in the knot index
        let j = if self.knots[j] > t && j > 0 { j - 1 } else { j };
        Ok(self.cumulative[j] + gauss_legendre8(|s| (self.phi)(s), self.knots[j], t))
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        Ok((self.phi)(t))
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        self.dphi.as_ref().map(|d| Ok(d(t)))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `√(Ψ₁Ψ₂)`, the intermediate function between two Young functions.
#[derive(Debug, Clone)]
pub struct GeometricMean {
    pub first: YoungFunction,
    pub second: YoungFunction,
}

impl Generator for GeometricMean {
    fn value(&self, t: f64) -> Result<f64> {
        Ok((self.first.value(t)? * self.second.value(t)?).sqrt())
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let (a, b) = (self.first.value(t)?, self.second.value(t)?);
        let (da, db) = (self.first.derivative(t)?, self.second.derivative(t)?);
        let g = (a * b).sqrt();
        Ok(0.5 * g * (da / a + db / b))
    }
    fn label(&self) -> String {
        format!("sqrt(({})*({}))", self.first.label(), self.second.label())
    }
}

impl GeometricMean {
    pub fn young(first: YoungFunction, second: YoungFunction) -> YoungFunction {
        let d1 = first.domain();
        let d2 = second.domain();
        let domain = EvalDomain { lo: d1.lo.max(d2.lo), hi: d1.hi.min(d2.hi) };
        YoungFunction::new(GeometricMean { first, second }, domain)
    }
}

/// `Ψ` above `t0`, replaced below `t0` by the C¹ power `Ψ(t0)(t/t0)^{q0}`
/// with `q0 = t0Ψ'(t0)/Ψ(t0)`.
#[derive(Debug, Clone)]
pub struct NearZeroPower {
    base: YoungFunction,
    t0: f64,
    v0: f64,
    q0: f64,
}

impl NearZeroPower {
    pub fn new(base: YoungFunction, t0: f64) -> Result<Self> {
        let v0 = base.value(t0)?;
        let q0 = t0 * base.derivative(t0)? / v0;
        if !(q0 > 1.0) {
            return Err(YoungError::Construction(format!("near-zero exponent {q0} must exceed 1")));
        }
        Ok(NearZeroPower { base, t0, v0, q0 })
    }

    pub fn exponent(&self) -> f64 {
        self.q0
    }

    pub fn young(self) -> YoungFunction {
        let domain = self.base.domain();
        YoungFunction::new(self, domain)
    }
}

impl Generator for NearZeroPower {
    fn value(&self, t: f64) -> Result<f64> {
        if t < self.t0 {
            Ok(self.v0 * (t / self.t0).powf(self.q0))
        } else {
            self.base.value(t)
        }
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        if t < self.t0 {
            Ok(self.v0 * self.q0 / self.t0 * (t / self.t0).powf(self.q0 - 1.0))
        } else {
            self.base.derivative(t)
        }
    }
    fn label(&self) -> String {
        format!("{} (power below {})", self.base.label(), self.t0)
    }
}
