//! Numeric calculus of Young functions.
//!
//! A [`YoungFunction`] wraps a [`Generator`] (the analytic or numerically
//! constructed map `t ↦ Ψ(t)` with its derivatives) together with the
//! interval on which evaluation is trusted and, once computed, its growth
//! indices.

mod conjugate;
mod generators;
mod ordering;
mod pathological;
mod sobolev;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::par::Execution;
use crate::quad::QuadError;
use crate::roots::{self, RootError, INVERSION_RTOL};

pub use conjugate::young_conjugate;
pub use generators::{ExpMinusLinear, GeometricMean, NearZeroPower, Power, PowerSum, Primitive};
pub use ordering::{ordering, ordering_with, Relation};
pub use pathological::{build_pathological, Branch, Pathological, PathologicalParams};
pub use sobolev::{
    divergence_test, sobolev_conjugate, sobolev_conjugate_regularized, theta_integral, Divergence, SobolevConjugate,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum YoungError {
    #[error("argument {t} lies outside the evaluation domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },
    #[error("maximiser of s*t - Psi(s) escapes the evaluation domain for t = {t}")]
    OutOfRange { t: f64 },
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("singular integrand near 0: {0}")]
    SingularIntegrand(String),
    #[error("integral of Theta does not diverge at infinity: {0}")]
    NotDiverging(String),
    #[error("growth indices have not been computed; call compute_indices first")]
    MissingIndices,
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Root(#[from] RootError),
}

pub type Result<T> = std::result::Result<T, YoungError>;

/// The analytic content of a Young function.
///
/// Implementations may assume `t > 0`; the wrapper handles `t = 0` and the
/// evaluation-domain checks.
pub trait Generator: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> Result<f64>;
    fn derivative(&self, t: f64) -> Result<f64>;
    fn second_derivative(&self, _t: f64) -> Option<Result<f64>> {
        None
    }
    fn label(&self) -> String;
}

/// Interval `[lo, hi]` on which evaluation is numerically trustworthy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalDomain {
    pub lo: f64,
    pub hi: f64,
}

impl EvalDomain {
    pub const DEFAULT: EvalDomain = EvalDomain { lo: 1e-8, hi: 1e30 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(YoungError::Construction(format!("bad evaluation domain [{lo}, {hi}]")));
        }
        Ok(EvalDomain { lo, hi })
    }

    pub fn decades(&self) -> f64 {
        (self.hi / self.lo).log10()
    }
}

/// Growth indices `i_Ψ ≤ s_Ψ` together with their at-infinity estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexPair {
    pub lower: f64,
    pub upper: f64,
    pub at_infinity_lower: f64,
    pub at_infinity_upper: f64,
}

/// Log-spaced sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    points: Vec<f64>,
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(YoungError::InvalidGrid(format!("[{lo}, {hi}] with {n} points")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let points = (0..n)
            .map(|i| {
                if i == 0 {
                    lo
                } else if i == n - 1 {
                    hi
                } else {
                    (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect();
        Ok(LogGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn decades(&self) -> f64 {
        (self.hi() / self.lo()).log10()
    }
}

/// Default index grid: 2000 points on `[1e-4, 1e6]`.
pub const INDEX_GRID_LO: f64 = 1e-4;
pub const INDEX_GRID_HI: f64 = 1e6;
pub const INDEX_GRID_POINTS: usize = 2000;

#[derive(Clone)]
pub struct YoungFunction {
    generator: Arc<dyn Generator>,
    domain: EvalDomain,
    indices: Option<IndexPair>,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YoungFunction")
            .field("label", &self.generator.label())
            .field("domain", &self.domain)
            .field("indices", &self.indices)
            .finish()
    }
}

impl YoungFunction {
    pub fn new(generator: impl Generator + 'static, domain: EvalDomain) -> Self {
        YoungFunction { generator: Arc::new(generator), domain, indices: None }
    }

    pub fn from_arc(generator: Arc<dyn Generator>, domain: EvalDomain) -> Self {
        YoungFunction { generator, domain, indices: None }
    }

    /// `coef * t^p`.
    pub fn power(coef: f64, p: f64) -> Self {
        Self::new(Power { coef, p }, EvalDomain::DEFAULT)
    }

    pub fn label(&self) -> String {
        self.generator.label()
    }

    pub fn generator(&self) -> &Arc<dyn Generator> {
        &self.generator
    }

    pub fn domain(&self) -> EvalDomain {
        self.domain
    }

    pub fn with_domain(mut self, domain: EvalDomain) -> Self {
        self.domain = domain;
        self.indices = None;
        self
    }

    pub fn indices(&self) -> Option<&IndexPair> {
        self.indices.as_ref()
    }

    pub fn require_indices(&self) -> Result<&IndexPair> {
        self.indices.as_ref().ok_or(YoungError::MissingIndices)
    }

    pub fn set_indices(&mut self, indices: IndexPair) {
        self.indices = Some(indices);
    }

    /// Computes indices on the default grid and caches them.
    pub fn with_default_indices(mut self) -> Result<Self> {
        let grid = self.default_index_grid()?;
        let idx = compute_indices(&self, &grid)?;
        self.indices = Some(idx);
        Ok(self)
    }

    /// Computes indices on `grid` and caches them.
    pub fn with_indices_on(mut self, grid: &LogGrid) -> Result<Self> {
        let idx = compute_indices(&self, grid)?;
        self.indices = Some(idx);
        Ok(self)
    }

    fn check_arg(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 || t > self.domain.hi * (1.0 + 1e-12) {
            return Err(YoungError::Domain { t, lo: self.domain.lo, hi: self.domain.hi });
        }
        Ok(())
    }

    fn finite(t: f64, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(YoungError::NonFinite { t })
        }
    }

    /// `Ψ(t)` for `0 ≤ t ≤ hi`; arguments below `lo` are evaluated but carry
    /// whatever accuracy the generator has there.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_arg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Self::finite(t, self.generator.value(t)?)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_arg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Self::finite(t, self.generator.derivative(t)?)
    }

    /// Analytic second derivative when the generator has one, otherwise a
    /// central difference of the first derivative.
    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        self.check_arg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.generator.second_derivative(t) {
            Some(v) => Self::finite(t, v?),
            None => {
                let h = t * 1e-5;
                let up = self.generator.derivative(t + h)?;
                let dn = self.generator.derivative(t - h)?;
                Self::finite(t, (up - dn) / (2.0 * h))
            }
        }
    }

    pub fn has_second_derivative(&self) -> bool {
        self.generator.second_derivative(1.0).is_some()
    }

    /// `Ψ⁻¹(y)` by monotone root finding.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        if !(y > 0.0) {
            return Err(YoungError::NonFinite { t: y });
        }
        let guess = 1.0f64.clamp(self.domain.lo, self.domain.hi);
        let lo = self.domain.lo * 1e-6;
        let t = roots::invert_increasing(
            |t| self.generator.value(t).unwrap_or(f64::NAN),
            y,
            guess,
            lo,
            self.domain.hi,
            INVERSION_RTOL * 1e-2,
        )?;
        Ok(t)
    }

    /// Index ratio `tΨ'(t)/Ψ(t)`.
    pub fn index_ratio(&self, t: f64) -> Result<f64> {
        let v = self.value(t)?;
        let d = self.derivative(t)?;
        Self::finite(t, t * d / v)
    }

    /// Default index grid intersected with the evaluation domain, widened
    /// towards the domain's lower end if fewer than 8 decades remain.
    pub fn default_index_grid(&self) -> Result<LogGrid> {
        let mut hi = INDEX_GRID_HI.min(self.domain.hi);
        let mut lo = INDEX_GRID_LO.max(self.domain.lo);
        if (hi / lo).log10() < 8.0 {
            lo = (hi * 1e-8).max(self.domain.lo);
        }
        if (hi / lo).log10() < 8.0 {
            hi = (lo * 1e8).min(self.domain.hi);
        }
        LogGrid::new(lo, hi, INDEX_GRID_POINTS)
    }

    /// Samples the Young-function axioms: `Ψ' > 0`, midpoint convexity, and
    /// the decade trend of `Ψ(t)/t` at both ends.
    pub fn validate(&self, grid: &LogGrid) -> Result<()> {
        let pts = grid.points();
        let mut prev = 0.0;
        for &t in pts {
            let d = self.derivative(t)?;
            if !(d > 0.0) {
                return Err(YoungError::Construction(format!("derivative not positive at t = {t}")));
            }
            let v = self.value(t)?;
            if v < prev {
                return Err(YoungError::Construction(format!("not increasing at t = {t}")));
            }
            prev = v;
        }
        for w in pts.windows(2).step_by(7) {
            let (s, t) = (w[0], w[1] * 3.0);
            if t > self.domain.hi {
                continue;
            }
            let mid = self.value(0.5 * (s + t))?;
            let avg = 0.5 * (self.value(s)? + self.value(t)?);
            if mid > avg * (1.0 + 1e-9) {
                return Err(YoungError::Construction(format!("convexity fails on [{s}, {t}]")));
            }
        }
        let decade = |t: f64| -> Result<f64> { Ok(self.value(t)? / t) };
        let (lo, hi) = (grid.lo(), grid.hi());
        if !(decade(lo)? < decade(lo * 10.0)?) || !(decade(hi / 10.0)? < decade(hi)?) {
            return Err(YoungError::Construction("Psi(t)/t is not increasing across end decades".into()));
        }
        Ok(())
    }
}

/// Growth indices as grid extrema of `tΨ'(t)/Ψ(t)`.
pub fn compute_indices(psi: &YoungFunction, grid: &LogGrid) -> Result<IndexPair> {
    compute_indices_with(psi, grid, Execution::default())
}

pub fn compute_indices_with(psi: &YoungFunction, grid: &LogGrid, exec: Execution) -> Result<IndexPair> {
    let pts = grid.points();
    if pts.len() < 1000 {
        return Err(YoungError::InvalidGrid(format!("{} points, need at least 1000", pts.len())));
    }
    if grid.decades() < 8.0 - 1e-9 {
        return Err(YoungError::InvalidGrid(format!("spans {:.2} decades, need 8", grid.decades())));
    }
    let dom = psi.domain();
    if grid.lo() < dom.lo * (1.0 - 1e-12) || grid.hi() > dom.hi * (1.0 + 1e-12) {
        return Err(YoungError::InvalidGrid(format!(
            "[{}, {}] not inside evaluation domain [{}, {}]",
            grid.lo(),
            grid.hi(),
            dom.lo,
            dom.hi
        )));
    }
    let ratios = exec.try_map(pts, |&t| psi.index_ratio(t))?;
    let (lower, upper) = min_max(&ratios);
    let top = grid.hi() / 100.0;
    let prev = grid.hi() / 10.0;
    let window: Vec<f64> = pts.iter().zip(&ratios).filter(|(t, _)| **t >= top).map(|(_, r)| *r).collect();
    let (mut inf_lo, mut inf_hi) = min_max(&window);
    // Unbounded growth: the last sample exceeds the value one decade earlier by 50 %.
    let last = *ratios.last().unwrap();
    let decade_back = pts.iter().zip(&ratios).filter(|(t, _)| **t <= prev).map(|(_, r)| *r).next_back().unwrap_or(last);
    let mut upper = upper;
    if last > 1.5 * decade_back && is_nondecreasing_tail(&window) {
        inf_hi = f64::INFINITY;
        upper = f64::INFINITY;
    }
    if inf_lo > inf_hi {
        inf_lo = inf_hi;
    }
    Ok(IndexPair { lower, upper, at_infinity_lower: inf_lo, at_infinity_upper: inf_hi })
}

fn is_nondecreasing_tail(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9))
}

pub(crate) fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// `min{k^{i_Ψ}, k^{s_Ψ}}`.
pub fn zeta_lower(psi: &YoungFunction, k: f64) -> Result<f64> {
    let idx = psi.require_indices()?;
    Ok(zeta_lower_raw(idx, k))
}

/// `max{k^{i_Ψ}, k^{s_Ψ}}`.
pub fn zeta_upper(psi: &YoungFunction, k: f64) -> Result<f64> {
    let idx = psi.require_indices()?;
    Ok(zeta_upper_raw(idx, k))
}

pub(crate) fn zeta_lower_raw(idx: &IndexPair, k: f64) -> f64 {
    k.powf(idx.lower).min(k.powf(idx.upper))
}

pub(crate) fn zeta_upper_raw(idx: &IndexPair, k: f64) -> f64 {
    k.powf(idx.lower).max(k.powf(idx.upper))
}

/// Inverse of `ζ̲_Ψ` on `[0, ∞)`.
pub fn zeta_lower_inverse(idx: &IndexPair, y: f64) -> f64 {
    if y <= 1.0 {
        y.powf(1.0 / idx.upper)
    } else {
        y.powf(1.0 / idx.lower)
    }
}

/// `(in Δ₂, in ∇₂)` from the at-infinity index estimates.
pub fn delta2_nabla2(psi: &YoungFunction) -> Result<(bool, bool)> {
    let idx = psi.require_indices()?;
    Ok((idx.at_infinity_upper.is_finite(), idx.at_infinity_lower > 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> YoungFunction {
        YoungFunction::power(1.0, 3.0)
    }

    #[test]
    fn cubic_indices_are_three() {
        let psi = cubic().with_default_indices().unwrap();
        let idx = psi.indices().unwrap();
        assert!((idx.lower - 3.0).abs() < 1e-12 && (idx.upper - 3.0).abs() < 1e-12);
        assert!((idx.at_infinity_lower - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_powers_indices_approach_limits() {
        let psi = YoungFunction::new(PowerSum::new(vec![(1.0, 2.0), (1.0, 3.0)]), EvalDomain::DEFAULT);
        // analytic ratio (2t²+3t³)/(t²+t³) = 2 + t/(1+t)
        let narrow = compute_indices(&psi, &LogGrid::new(1e-4, 1e6, 2000).unwrap()).unwrap();
        let wide = compute_indices(&psi, &LogGrid::new(1e-8, 1e12, 4000).unwrap()).unwrap();
        let oracle = |t: f64| 2.0 + t / (1.0 + t);
        assert!((narrow.lower - oracle(1e-4)).abs() < 1e-9);
        assert!((narrow.upper - oracle(1e6)).abs() < 1e-9);
        assert!((wide.lower - 2.0).abs() < (narrow.lower - 2.0).abs());
        assert!((3.0 - wide.upper).abs() < (3.0 - narrow.upper).abs());
        assert!(wide.lower > 2.0 && wide.upper < 3.0);
    }

    #[test]
    fn short_grid_is_rejected() {
        let psi = cubic();
        let g = LogGrid::new(1.0, 1e5, 2000).unwrap();
        assert!(matches!(compute_indices(&psi, &g), Err(YoungError::InvalidGrid(_))));
        let g = LogGrid::new(1e-4, 1e6, 500).unwrap();
        assert!(matches!(compute_indices(&psi, &g), Err(YoungError::InvalidGrid(_))));
    }

    #[test]
    fn zeta_requires_indices() {
        assert!(matches!(zeta_lower(&cubic(), 2.0), Err(YoungError::MissingIndices)));
    }

    #[test]
    fn zeta_at_one_and_power_equality() {
        let psi = YoungFunction::power(0.5, 2.5).with_default_indices().unwrap();
        assert_eq!(zeta_lower(&psi, 1.0).unwrap(), 1.0);
        assert_eq!(zeta_upper(&psi, 1.0).unwrap(), 1.0);
        for &(k, t) in &[(0.3, 2.0), (7.0, 0.01), (1.5, 40.0)] {
            let lhs = zeta_lower(&psi, k).unwrap() * psi.value(t).unwrap();
            let rhs = zeta_upper(&psi, k).unwrap() * psi.value(t).unwrap();
            let mid = psi.value(k * t).unwrap();
            assert!((lhs - mid).abs() <= 1e-12 * mid && (rhs - mid).abs() <= 1e-12 * mid);
        }
    }

    #[test]
    fn power_is_in_delta2_and_nabla2() {
        let psi = YoungFunction::power(1.0, 1.7).with_default_indices().unwrap();
        assert_eq!(delta2_nabla2(&psi).unwrap(), (true, true));
    }

    #[test]
    fn exponential_fails_delta2() {
        let psi = YoungFunction::new(ExpMinusLinear, EvalDomain::new(1e-8, 700.0).unwrap());
        let grid = psi.default_index_grid().unwrap();
        let psi = psi.with_indices_on(&grid).unwrap();
        // analytic oracle: t e^t / (e^t - t - 1) ~ t at infinity
        let r = psi.index_ratio(600.0).unwrap();
        assert!((r - 600.0).abs() < 1e-6 * 600.0);
        let (d2, _) = delta2_nabla2(&psi).unwrap();
        assert!(!d2);
    }

    #[test]
    fn validate_accepts_power_and_rejects_concave() {
        let grid = LogGrid::new(1e-4, 1e6, 200).unwrap();
        YoungFunction::power(1.0, 2.0).validate(&grid).unwrap();
        let sqrt = YoungFunction::power(1.0, 0.5);
        assert!(sqrt.validate(&grid).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let psi = YoungFunction::power(1.0 / 3.0, 3.0);
        for &y in &[1e-9, 0.3, 5.0, 1e12] {
            let t = psi.inverse(y).unwrap();
            assert!((psi.value(t).unwrap() - y).abs() < 1e-10 * y);
        }
    }

    #[test]
    fn evaluation_above_domain_is_an_error() {
        let psi = cubic();
        assert!(matches!(psi.value(1e31), Err(YoungError::Domain { .. })));
        assert!(matches!(psi.value(-1.0), Err(YoungError::Domain { .. })));
    }
}
