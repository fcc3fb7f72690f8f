//! Uhlenbeck-type operators `div(a(|∇u|)∇u)` with `φ(t) = t a(t) = Φ'(t)`.

use std::sync::Arc;

use crate::young::{EvalDomain, LogGrid, Primitive, YoungFunction};

use super::{HypothesisError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `a(t) = t^{p-2}`, `Φ(t) = t^p/p`.
    Power { p: f64 },
    /// `a(t) = t^{p-2} log(1+t)`, `Φ(t) = ∫₀^t s^{p-1} log(1+s) ds`.
    LogPower { p: f64 },
    /// `a(t) = Φ'(t)/t` for a Young function with analytic second derivative.
    FromYoung,
}

#[derive(Debug, Clone)]
pub struct Operator {
    kind: OperatorKind,
    phi: YoungFunction,
}

/// Evaluation domain of the logarithmic operator. The index at infinity
/// approaches `p` only like `1/log t`, so the domain reaches far out.
pub const LOG_POWER_DOMAIN: EvalDomain = EvalDomain { lo: 1e-8, hi: 1e80 };

impl Operator {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(HypothesisError::Construction(format!("power operator needs p > 1, got {p}")));
        }
        let phi = YoungFunction::power(1.0 / p, p).with_default_indices()?;
        Ok(Operator { kind: OperatorKind::Power { p }, phi })
    }

    /// Operator with arbitrary `a(t) = t^{p-2}`, including exponents for
    /// which `Φ` is not a Young function; only `check_ha1` is meaningful then.
    pub fn power_unchecked(p: f64) -> Self {
        Operator { kind: OperatorKind::Power { p }, phi: YoungFunction::power(1.0, 2.0) }
    }

    pub fn log_power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(HypothesisError::Construction(format!("log-power operator needs p > 1, got {p}")));
        }
        let phi_fn = Arc::new(move |s: f64| s.powf(p - 1.0) * s.ln_1p());
        let dphi = Arc::new(move |s: f64| (p - 1.0) * s.powf(p - 2.0) * s.ln_1p() + s.powf(p - 1.0) / (1.0 + s));
        let prim = Primitive::new(phi_fn, Some(dphi), LOG_POWER_DOMAIN, format!("int_0^t s^{}log(1+s)ds", p - 1.0))?;
        let decades = LOG_POWER_DOMAIN.hi.log10() + 4.0;
        let grid = LogGrid::new(1e-4, LOG_POWER_DOMAIN.hi, (decades * 100.0) as usize)?;
        let phi = prim.into_young(LOG_POWER_DOMAIN).with_indices_on(&grid)?;
        Ok(Operator { kind: OperatorKind::LogPower { p }, phi })
    }

    pub fn from_young(phi: YoungFunction) -> Result<Self> {
        if !phi.has_second_derivative() {
            return Err(HypothesisError::Construction("operator needs an analytic second derivative".into()));
        }
        let phi = if phi.indices().is_some() { phi } else { phi.with_default_indices()? };
        Ok(Operator { kind: OperatorKind::FromYoung, phi })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn phi(&self) -> &YoungFunction {
        &self.phi
    }

    pub fn a(&self, t: f64) -> f64 {
        match self.kind {
            OperatorKind::Power { p } => t.powf(p - 2.0),
            OperatorKind::LogPower { p } => t.powf(p - 2.0) * t.ln_1p(),
            OperatorKind::FromYoung => self.phi.derivative(t).unwrap_or(f64::NAN) / t,
        }
    }

    pub fn da(&self, t: f64) -> f64 {
        match self.kind {
            OperatorKind::Power { p } => (p - 2.0) * t.powf(p - 3.0),
            OperatorKind::LogPower { p } => (p - 2.0) * t.powf(p - 3.0) * t.ln_1p() + t.powf(p - 2.0) / (1.0 + t),
            OperatorKind::FromYoung => {
                let d1 = self.phi.derivative(t).unwrap_or(f64::NAN);
                let d2 = self.phi.second_derivative(t).unwrap_or(f64::NAN);
                (t * d2 - d1) / (t * t)
            }
        }
    }

    /// `t a'(t)/a(t)`.
    pub fn ellipticity_ratio(&self, t: f64) -> f64 {
        match self.kind {
            OperatorKind::Power { p } => p - 2.0,
            OperatorKind::LogPower { p } => p - 2.0 + t / ((1.0 + t) * t.ln_1p()),
            OperatorKind::FromYoung => t * self.da(t) / self.a(t),
        }
    }

    /// `φ(t) = t a(t)`, extended oddly to negative arguments.
    pub fn flux(&self, g: f64) -> f64 {
        if g == 0.0 {
            return 0.0;
        }
        let t = g.abs();
        g.signum()
            * match self.kind {
                OperatorKind::Power { p } => t.powf(p - 1.0),
                OperatorKind::LogPower { p } => t.powf(p - 1.0) * t.ln_1p(),
                OperatorKind::FromYoung => self.phi.derivative(t).unwrap_or(f64::NAN),
            }
    }

    /// `φ'(|g|) = a + t a'`.
    pub fn flux_derivative(&self, g: f64) -> f64 {
        let t = g.abs();
        if t == 0.0 {
            return match self.kind {
                OperatorKind::Power { p: 2.0 } => 1.0,
                _ => 0.0,
            };
        }
        match self.kind {
            OperatorKind::Power { p } => (p - 1.0) * t.powf(p - 2.0),
            OperatorKind::LogPower { p } => (p - 1.0) * t.powf(p - 2.0) * t.ln_1p() + t.powf(p - 1.0) / (1.0 + t),
            OperatorKind::FromYoung => self.phi.second_derivative(t).unwrap_or(f64::NAN),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            OperatorKind::Power { p } => format!("p-Laplacian(p={p})"),
            OperatorKind::LogPower { p } => format!("log-weighted p-Laplacian(p={p})"),
            OperatorKind::FromYoung => format!("Phi-Laplacian({})", self.phi.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_power_ratio_matches_finite_differences() {
        let op = Operator::log_power(3.0).unwrap();
        for &t in &[1e-3, 0.1, 1.0, 10.0, 1e4] {
            let h = t * 1e-6;
            let fd = (op.a(t + h) - op.a(t - h)) / (2.0 * h);
            assert!((fd - op.da(t)).abs() < 1e-6 * op.da(t).abs());
            let r = t * fd / op.a(t);
            assert!((r - op.ellipticity_ratio(t)).abs() < 1e-6 * r.abs());
        }
    }

    #[test]
    fn log_power_indices_are_p_and_p_plus_one() {
        let op = Operator::log_power(3.0).unwrap();
        let idx = op.phi().indices().unwrap();
        assert!((idx.lower - 3.0).abs() < 1e-2, "{idx:?}");
        assert!((idx.upper - 4.0).abs() < 1e-2, "{idx:?}");
        // bracketing by the indices of a
        assert!(1.0 + 2.0 <= idx.lower + 1e-12 && idx.upper <= 2.0 + 2.0 + 1e-12);
    }

    #[test]
    fn flux_is_phi_prime() {
        let op = Operator::log_power(3.0).unwrap();
        for &t in &[0.01, 2.0, 300.0] {
            assert!((op.flux(t) - op.phi().derivative(t).unwrap()).abs() < 1e-8 * op.flux(t));
            assert_eq!(op.flux(-t), -op.flux(t));
        }
    }

    #[test]
    fn from_young_matches_power() {
        let op = Operator::from_young(YoungFunction::power(1.0 / 3.0, 3.0)).unwrap();
        let pw = Operator::power(3.0).unwrap();
        for &t in &[0.1, 1.0, 7.0] {
            assert!((op.a(t) - pw.a(t)).abs() < 1e-12);
            assert!((op.ellipticity_ratio(t) - 1.0).abs() < 1e-9);
            assert!((op.flux_derivative(t) - pw.flux_derivative(t)).abs() < 1e-9);
        }
    }
}
