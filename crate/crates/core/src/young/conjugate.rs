//! Legendre transform of a Young function.

use super::{EvalDomain, Generator, Result, YoungError, YoungFunction};
use crate::roots::{golden_max, invert_increasing, RootError, INVERSION_RTOL};

/// `Ψ̄(t) = max_{s ≥ 0} {st − Ψ(s)}`, evaluated through `s = (Ψ')⁻¹(t)`.
#[derive(Debug, Clone)]
pub struct Conjugate {
    base: YoungFunction,
}

impl Conjugate {
    /// Maximiser `s(t)` of `st − Ψ(s)`.
    pub fn maximiser(&self, t: f64) -> Result<f64> {
        let dom = self.base.domain();
        let gen = self.base.generator();
        let guess = 1.0f64.clamp(dom.lo, dom.hi);
        match invert_increasing(|s| gen.derivative(s).unwrap_or(f64::NAN), t, guess, dom.lo, dom.hi, INVERSION_RTOL) {
            Ok(s) => Ok(s),
            Err(RootError::Bracket { .. }) => Err(YoungError::OutOfRange { t }),
            Err(RootError::NonFinite { .. }) => {
                let obj = |v: f64| {
                    let s = v.exp();
                    s * t - gen.value(s).unwrap_or(f64::INFINITY)
                };
                let v = golden_max(obj, dom.lo.ln(), dom.hi.ln(), 1e-13);
                let s = v.exp();
                if s <= dom.lo * 1.000_001 || s >= dom.hi * 0.999_999 {
                    Err(YoungError::OutOfRange { t })
                } else {
                    Ok(s)
                }
            }
        }
    }
}

impl Generator for Conjugate {
    fn value(&self, t: f64) -> Result<f64> {
        let s = self.maximiser(t)?;
        Ok((s * t - self.base.generator().value(s)?).max(0.0))
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        self.maximiser(t)
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        if !self.base.has_second_derivative() {
            return None;
        }
        Some(self.maximiser(t).and_then(|s| Ok(1.0 / self.base.second_derivative(s)?)))
    }
    fn label(&self) -> String {
        format!("conj({})", self.base.label())
    }
}

/// Young conjugate; its evaluation domain is `Ψ'` applied to the base domain.
pub fn young_conjugate(psi: &YoungFunction) -> Result<YoungFunction> {
    let dom = psi.domain();
    let lo = psi.derivative(dom.lo)?;
    let hi = psi.derivative(dom.hi)?;
    let domain = EvalDomain::new(lo, hi)?;
    Ok(YoungFunction::new(Conjugate { base: psi.clone() }, domain))
}
