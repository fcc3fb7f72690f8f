//! Young function with distinct lower and upper indices at infinity.
//!
//! `Ψ(t) = t^α e^{η(t)}` where `η` is a quadratic below `t = e` and an
//! oscillating multiple of `log t` above, with phase `ζ(t) = ε log(log t)`.

use std::f64::consts::E;

use super::{EvalDomain, Generator, Result, YoungError, YoungFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathologicalParams {
    pub p: f64,
    pub q: f64,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PathologicalParams {
    pub const DEFAULT_EPS: f64 = 1.9;

    pub fn new(p: f64, q: f64, eps: f64) -> Result<Self> {
        let params = PathologicalParams { p, q, eps, alpha: 0.5 * (p + q), beta: 0.5 * (p - q) };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let PathologicalParams { p, q, eps, alpha, beta } = *self;
        if !(p > 1.0 && q > 1.0 && q < p && p.is_finite()) {
            return Err(YoungError::Construction(format!("need 1 < q < p, got p = {p}, q = {q}")));
        }
        if alpha != 0.5 * (p + q) || beta != 0.5 * (p - q) {
            return Err(YoungError::Construction("alpha/beta inconsistent with p, q".into()));
        }
        let bound = 4f64.min((q - 1.0) / beta);
        if !(eps > 0.0 && eps < bound) {
            return Err(YoungError::Construction(format!("eps = {eps} must lie in (0, {bound})")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Pathological {
    params: PathologicalParams,
}

/// Lower (`t ≤ e`) and upper (`t ≥ e`) branch of `(η, η', η'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Lower,
    Upper,
}

impl Pathological {
    pub fn new(params: PathologicalParams) -> Result<Self> {
        params.validate()?;
        Ok(Pathological { params })
    }

    pub fn params(&self) -> PathologicalParams {
        self.params
    }

    /// `ζ(t) = ε log(log t)`, defined for `t > 1`.
    pub fn zeta(&self, t: f64) -> f64 {
        self.params.eps * t.ln().ln()
    }

    /// `(η, η', η'')` on the requested branch, without branch selection.
    pub fn eta_branch(&self, t: f64, branch: Branch) -> (f64, f64, f64) {
        let PathologicalParams { eps, beta, .. } = self.params;
        match branch {
            Branch::Lower => {
                let c = beta * eps / (E * E);
                let eta = 0.5 * c * (E - t) * (E - t) - beta * eps / (1.0 + eps * eps);
                (eta, c * (t - E), c)
            }
            Branch::Upper => {
                let lt = t.ln();
                let z = eps * lt.ln();
                let (s, c) = z.sin_cos();
                let eta = beta * lt / (1.0 + eps * eps) * (s - eps * c);
                let d1 = beta * s / t;
                let dz = eps / (t * lt);
                let d2 = beta / (t * t) * (t * dz * c - s);
                (eta, d1, d2)
            }
        }
    }

    pub fn eta(&self, t: f64) -> (f64, f64, f64) {
        self.eta_branch(t, if t <= E { Branch::Lower } else { Branch::Upper })
    }
}

impl Generator for Pathological {
    fn value(&self, t: f64) -> Result<f64> {
        let (eta, _, _) = self.eta(t);
        Ok((self.params.alpha * t.ln() + eta).exp())
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let (eta, d1, _) = self.eta(t);
        let psi = (self.params.alpha * t.ln() + eta).exp();
        Ok(psi / t * (self.params.alpha + t * d1))
    }
    fn second_derivative(&self, t: f64) -> Option<Result<f64>> {
        let (eta, d1, d2) = self.eta(t);
        let psi = (self.params.alpha * t.ln() + eta).exp();
        let m = self.params.alpha + t * d1;
        Some(Ok(psi / (t * t) * ((m - 1.0) * m + t * d1 + t * t * d2)))
    }
    fn label(&self) -> String {
        let PathologicalParams { p, q, eps, .. } = self.params;
        format!("pathological(p={p},q={q},eps={eps})")
    }
}

/// The pathological Young function on the default evaluation domain.
pub fn build_pathological(params: PathologicalParams) -> Result<YoungFunction> {
    Ok(YoungFunction::new(Pathological::new(params)?, EvalDomain::DEFAULT))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default() -> Pathological {
        Pathological::new(PathologicalParams::new(3.0, 2.0, 1.9).unwrap()).unwrap()
    }

    #[test]
    fn eps_bound_is_strict() {
        assert!(PathologicalParams::new(3.0, 2.0, 2.0).is_err());
        assert!(PathologicalParams::new(3.0, 2.0, 0.0).is_err());
        assert!(PathologicalParams::new(2.0, 3.0, 0.5).is_err());
        let mut p = PathologicalParams::new(3.0, 2.0, 1.0).unwrap();
        p.alpha += 1e-15;
        assert!(p.validate().is_err());
    }

    #[test]
    fn branches_match_at_e() {
        let g = default();
        let lo = g.eta_branch(E, Branch::Lower);
        let up = g.eta_branch(E, Branch::Upper);
        let beta = 0.5;
        let eps = 1.9;
        assert!((lo.0 + beta * eps / (1.0 + eps * eps)).abs() < 1e-15);
        assert!((lo.0 - up.0).abs() < 1e-12);
        assert!((lo.1 - up.1).abs() < 1e-12);
        assert!((lo.2 - up.2).abs() < 1e-12);
    }

    #[test]
    fn peak_of_sine_is_a_pure_power() {
        let g = default();
        // ζ = π/2 ⇔ t = exp(exp(π/(2ε)))
        let t = (std::f64::consts::FRAC_PI_2 / 1.9).exp().exp();
        let expo = 2.5 + 0.5 / (1.0 + 1.9 * 1.9);
        let v = g.value(t).unwrap();
        assert!((v / t.powf(expo) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let g = default();
        for &t in &[0.3, 2.0, 5.0, 1e3, 1e7] {
            let h = t * 1e-6;
            let fd = (g.value(t + h).unwrap() - g.value(t - h).unwrap()) / (2.0 * h);
            let d = g.derivative(t).unwrap();
            assert!((fd - d).abs() < 1e-7 * d, "t={t}");
            let fd2 = (g.derivative(t + h).unwrap() - g.derivative(t - h).unwrap()) / (2.0 * h);
            let d2 = g.second_derivative(t).unwrap().unwrap();
            assert!((fd2 - d2).abs() < 1e-6 * d2.abs(), "t={t}");
        }
    }
}
