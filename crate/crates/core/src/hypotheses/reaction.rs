//! Reaction terms `f(x, s) = w(x) g(s) + c s^{-γ}`, split into a regular part
//! and a singular part so that truncation and quadrature can treat the
//! singularity exactly.

use std::f64::consts::PI;

use crate::quad::adaptive;
use crate::young::{young_conjugate, YoungFunction};

use super::{HypothesisError, Result};

#[derive(Debug, Clone)]
pub enum RegularPart {
    Zero,
    /// `coef · s^r`.
    Power {
        coef: f64,
        r: f64,
    },
    /// `Υ(s)/s`.
    UpsilonOverT {
        upsilon: YoungFunction,
    },
    /// `coef · log(1+s)`.
    Log1p {
        coef: f64,
    },
    /// `coef · Ῡ⁻¹(Υ(s))`.
    ConjInverse {
        coef: f64,
        upsilon: YoungFunction,
        conjugate: YoungFunction,
    },
}

impl RegularPart {
    pub fn conj_inverse(coef: f64, upsilon: YoungFunction) -> Result<Self> {
        let conjugate = young_conjugate(&upsilon)?;
        Ok(RegularPart::ConjInverse { coef, upsilon, conjugate })
    }

    fn value(&self, s: f64) -> f64 {
        match self {
            RegularPart::Zero => 0.0,
            RegularPart::Power { coef, r } => coef * s.powf(*r),
            RegularPart::UpsilonOverT { upsilon } => {
                if s == 0.0 {
                    0.0
                } else {
                    upsilon.value(s).unwrap_or(f64::NAN) / s
                }
            }
            RegularPart::Log1p { coef } => coef * s.ln_1p(),
            RegularPart::ConjInverse { coef, upsilon, conjugate } => {
                if s == 0.0 {
                    return 0.0;
                }
                let v = upsilon.value(s).unwrap_or(f64::NAN);
                coef * conjugate.inverse(v).unwrap_or(f64::NAN)
            }
        }
    }

    fn derivative(&self, s: f64) -> f64 {
        match self {
            RegularPart::Zero => 0.0,
            RegularPart::Power { coef, r } => {
                if s == 0.0 {
                    if *r > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    coef * r * s.powf(r - 1.0)
                }
            }
            RegularPart::UpsilonOverT { upsilon } => {
                if s == 0.0 {
                    return 0.0;
                }
                let v = upsilon.value(s).unwrap_or(f64::NAN);
                let d = upsilon.derivative(s).unwrap_or(f64::NAN);
                (s * d - v) / (s * s)
            }
            RegularPart::Log1p { coef } => coef / (1.0 + s),
            RegularPart::ConjInverse { .. } => {
                let h = (s * 1e-6).max(1e-12);
                let lo = (s - h).max(0.0);
                (self.value(s + h) - self.value(lo)) / (s + h - lo)
            }
        }
    }

    /// `∫₀^s g`.
    fn primitive(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            RegularPart::Zero => 0.0,
            RegularPart::Power { coef, r } => coef * s.powf(r + 1.0) / (r + 1.0),
            RegularPart::Log1p { coef } => coef * ((1.0 + s) * s.ln_1p() - s),
            _ => adaptive(|t| self.value(t), 0.0, s, 0.0, 1e-12).unwrap_or(f64::NAN),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RegularPart::Zero => "0".into(),
            RegularPart::Power { coef, r } => format!("{coef}*s^{r}"),
            RegularPart::UpsilonOverT { upsilon } => format!("({})/s", upsilon.label()),
            RegularPart::Log1p { coef } => format!("{coef}*log(1+s)"),
            RegularPart::ConjInverse { coef, upsilon, .. } => format!("{coef}*conj^-1(({})(s))", upsilon.label()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reaction {
    pub regular: RegularPart,
    /// Coefficient of `s^{-γ}`.
    pub singular_coef: f64,
    pub gamma: f64,
    /// Amplitude `m` of the spatial weight `w(x) = 1 + m sin(πx/L)`.
    pub spatial_amplitude: f64,
    pub length: f64,
}

impl Reaction {
    pub fn new(regular: RegularPart, singular_coef: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(HypothesisError::Construction(format!("gamma = {gamma} must lie in (0, 1)")));
        }
        if singular_coef < 0.0 {
            return Err(HypothesisError::InvalidReaction("negative singular coefficient".into()));
        }
        Ok(Reaction { regular, singular_coef, gamma, spatial_amplitude: 0.0, length: 1.0 })
    }

    pub fn with_spatial_weight(mut self, amplitude: f64, length: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(HypothesisError::Construction(format!("spatial amplitude {amplitude} must lie in [0, 1)")));
        }
        self.spatial_amplitude = amplitude;
        self.length = length;
        Ok(self)
    }

    pub fn is_autonomous(&self) -> bool {
        self.spatial_amplitude == 0.0
    }

    pub fn weight(&self, x: f64) -> f64 {
        1.0 + self.spatial_amplitude * (PI * x / self.length).sin()
    }

    /// `f(x, s)` for `s > 0`.
    pub fn value(&self, x: f64, s: f64) -> f64 {
        self.weight(x) * self.regular.value(s) + self.singular_coef * s.powf(-self.gamma)
    }

    pub fn regular_value(&self, x: f64, s: f64) -> f64 {
        self.weight(x) * self.regular.value(s)
    }

    /// `∂f/∂s`.
    pub fn derivative(&self, x: f64, s: f64) -> f64 {
        self.weight(x) * self.regular.derivative(s) - self.gamma * self.singular_coef * s.powf(-self.gamma - 1.0)
    }

    /// `∫₀^s f(x, t) dt`, finite because `γ < 1`.
    pub fn primitive(&self, x: f64, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.weight(x) * self.regular.primitive(s) + self.singular_coef * s.powf(1.0 - self.gamma) / (1.0 - self.gamma)
    }

    pub fn label(&self) -> String {
        let mut s = self.regular.label();
        if self.singular_coef > 0.0 {
            s.push_str(&format!(" + {}*s^-{}", self.singular_coef, self.gamma));
        }
        if !self.is_autonomous() {
            s = format!("(1+{}sin(pi x/L))[{}]", self.spatial_amplitude, s);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_reaction_primitive() {
        let f = Reaction::new(RegularPart::Power { coef: 1.0, r: 3.5 }, 1.0, 0.5).unwrap();
        let s: f64 = 0.7;
        let exact = s.powf(4.5) / 4.5 + 2.0 * s.sqrt();
        assert!((f.primitive(0.3, s) - exact).abs() < 1e-14);
        let h = 1e-6;
        let fd = (f.value(0.0, s + h) - f.value(0.0, s - h)) / (2.0 * h);
        assert!((fd - f.derivative(0.0, s)).abs() < 1e-6);
    }

    #[test]
    fn quadrature_primitive_matches_closed_form() {
        let ups = YoungFunction::power(1.0, 3.0);
        let f = Reaction::new(RegularPart::UpsilonOverT { upsilon: ups }, 0.0, 0.5).unwrap();
        assert!((f.primitive(0.0, 2.0) - 8.0 / 3.0).abs() < 1e-11);
        let g = Reaction::new(RegularPart::Log1p { coef: 1.0 }, 0.0, 0.5).unwrap();
        let q = adaptive(|t: f64| t.ln_1p(), 0.0, 5.0, 0.0, 1e-13).unwrap();
        assert!((g.primitive(0.0, 5.0) - q).abs() < 1e-12);
    }

    #[test]
    fn spatial_weight_bounds() {
        assert!(Reaction::new(RegularPart::Zero, 1.0, 0.5).unwrap().with_spatial_weight(1.5, 1.0).is_err());
        assert!(Reaction::new(RegularPart::Zero, 1.0, 1.5).is_err());
        let f = Reaction::new(RegularPart::Power { coef: 1.0, r: 2.0 }, 0.0, 0.5)
            .unwrap()
            .with_spatial_weight(0.5, 1.0)
            .unwrap();
        assert!((f.value(0.5, 2.0) - 6.0).abs() < 1e-12);
        assert!(!f.is_autonomous());
    }
}
