//! Truncation constants, case classification of `Υ` against `Φ`, and the
//! admissible parameter range `λ < λ*` with its radius `r*_λ`.

use std::fmt;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypotheses::{check_ha2, HypothesisError, ProblemSpec};
use crate::orlicz::{estimate_embedding_constant, OrliczError};
use crate::young::{
    ordering, young_conjugate, zeta_upper, GeometricMean, LogGrid, Relation, YoungError, YoungFunction,
};

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("Upsilon and Phi are not comparable in either direction")]
    Unclassifiable,
    #[error("no tail threshold below 1e30 for {0}")]
    NoTailThreshold(String),
    #[error("case contradiction: {0}")]
    CaseContradiction(String),
    #[error("lambda = {lambda} is not below lambda* = {lambda_star}")]
    LambdaOutOfRange { lambda: f64, lambda_star: f64 },
}

pub type Result<T> = std::result::Result<T, ThresholdError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `Υ ≪ Φ`.
    MuchLess,
    /// `Υ < Φ`.
    Less,
    /// `Υ > Φ`, reduced to the next case through `√(ΥΦ_*)`.
    Greater,
    /// `Υ ≫ Φ`.
    MuchGreater,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::MuchLess => "MuchLess",
            Case::Less => "Less",
            Case::Greater => "Greater",
            Case::MuchGreater => "MuchGreater",
        };
        f.write_str(s)
    }
}

/// A case tag with the comparison constant `c` of `Υ(t) ≤ Φ(ct)` when the
/// case is [`Case::Less`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub case: Case,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConstants {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Constants of the bounds `|F̂| ≤ C₁ + C₂Υ(|s|)` and
/// `f̂ ≤ c₁Ῡ⁻¹(Υ(|s|)) + αd^{−γ} + β`, given `k₁d ≤ u̲ ≤ k₂d`.
pub fn truncation_constants(spec: &ProblemSpec, k2: f64, k1: f64) -> Result<TruncationConstants> {
    if !(k1 > 0.0 && k2 >= k1 && k2.is_finite()) {
        return Err(ThresholdError::Invalid(format!("slopes must satisfy 0 < k1 <= k2, got k1 = {k1}, k2 = {k2}")));
    }
    let gamma = spec.gamma();
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ThresholdError::Invalid(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    let ups = &spec.upsilon;
    let ups_one = ups.value(1.0)?;
    if !(ups_one > 0.0) {
        return Err(ThresholdError::Invalid("Upsilon(1) must be positive".into()));
    }
    let kd = k2 * spec.grid.diameter();
    let ups_kd = ups.value(kd)?;
    let (c1, c2) = (spec.c1, spec.c2);
    let big_c1 = 2.0 * c1 * ups_kd + c2 * kd.powf(1.0 - gamma) + c2 / (1.0 - gamma);
    let big_c2 = 2.0 * c1 + c2 / ((1.0 - gamma) * ups_one);
    let alpha = c2 * k1.powf(-gamma);
    let beta = c1 * young_conjugate(ups)?.inverse(ups_kd)?;
    Ok(TruncationConstants { c1: big_c1, c2: big_c2, alpha, beta })
}

/// `Π(ρ) = (C₁ + C₂Υ(ρ))|Ω|`.
pub fn pi_bound(spec: &ProblemSpec, constants: &TruncationConstants, rho: f64) -> Result<f64> {
    let ups = if rho > 0.0 { spec.upsilon.value(rho)? } else { 0.0 };
    Ok((constants.c1 + constants.c2 * ups) * spec.grid.measure())
}

/// Orders `Υ` against `Φ` in both directions; `≪` verdicts win over `<`,
/// and `Υ < Φ` wins over `Φ < Υ`.
pub fn classify(upsilon: &YoungFunction, phi: &YoungFunction) -> Result<Classification> {
    let up = ordering(upsilon, phi);
    let down = ordering(phi, upsilon);
    let cls = match (up, down) {
        (Relation::MuchLess, _) => Classification { case: Case::MuchLess, c: None },
        (_, Relation::MuchLess) => Classification { case: Case::MuchGreater, c: None },
        (Relation::Less { c }, _) => Classification { case: Case::Less, c: Some(c) },
        (_, Relation::Less { .. }) => Classification { case: Case::Greater, c: None },
        _ => return Err(ThresholdError::Unclassifiable),
    };
    Ok(cls)
}

/// `k̂(r) = A/r + Br^θ`.
pub fn khat(a: f64, b: f64, theta: f64, r: f64) -> f64 {
    a / r + b * r.powf(theta)
}

/// Critical point `r* = (A/(θB))^{1/(θ+1)}` of `k̂` and the value `k̂(r*)`.
pub fn khat_minimum(a: f64, b: f64, theta: f64) -> (f64, f64) {
    let r = (a / (theta * b)).powf(1.0 / (theta + 1.0));
    (r, khat(a, b, theta, r))
}

/// The published compact expression `[A^θ B(θ + θ^{−θ})]^{1/(θ+1)}` for the
/// minimum of `k̂`. Kept only to document that it disagrees with
/// [`khat_minimum`] (at `A = B = θ = 1` it gives `√2` instead of `2`).
pub fn khat_minimum_compact(a: f64, b: f64, theta: f64) -> f64 {
    (a.powf(theta) * b * (theta + theta.powf(-theta))).powf(1.0 / (theta + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Data {
    pub eps: f64,
    pub m_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Data {
    pub c: f64,
    pub m: f64,
}

#[derive(Debug, Clone)]
pub struct Case3Data {
    /// `Υ̂ = √(ΥΦ_*)` with cached indices.
    pub upsilon_hat: YoungFunction,
    /// `Υ ≤ Φ_*` beyond this point.
    pub m: f64,
    pub c1_hat: f64,
    pub c2_hat: f64,
    /// Computed indices of `Υ̂` lie between the averaged indices of `Υ` and `Φ_*`.
    pub index_bracket_ok: bool,
    /// `Υ ≪ Υ̂ ≪ Φ_*`.
    pub ordering_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case4Data {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    /// Embedding constant used in `ζ̄_Υ(k)`.
    pub k: f64,
    pub r_min: f64,
    pub kappa_min: f64,
}

#[derive(Debug, Clone)]
pub struct ThresholdOptions {
    pub seed: u64,
    pub n_trials: usize,
    /// Overrides the randomised embedding constant.
    pub embedding_constant: Option<f64>,
    /// `Φ_*` with cached indices; computed from `Φ` when absent.
    pub phi_star: Option<YoungFunction>,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { seed: 0, n_trials: 200, embedding_constant: None, phi_star: None }
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub case: Case,
    pub constants: TruncationConstants,
    /// `+∞` in the first case.
    pub lambda_star: f64,
    /// Evaluated at the problem's own `λ`.
    pub case1: Option<Case1Data>,
    pub case2: Option<Case2Data>,
    pub case3: Option<Case3Data>,
    pub case4: Option<Case4Data>,
    upsilon: YoungFunction,
    phi: YoungFunction,
    measure: f64,
    diameter: f64,
}

const TAIL_WINDOW: f64 = 1e6;
const TAIL_SAMPLES: usize = 120;
const TAIL_CAP: f64 = 1e30;

/// Smallest dyadic `M` such that `holds(t)` on a log-sampled window
/// `[M, min(10⁶M, hi)]`.
fn tail_threshold<F>(what: &str, hi: f64, holds: F) -> Result<f64>
where
    F: Fn(f64) -> std::result::Result<bool, YoungError>,
{
    for k in -30..=100 {
        let m = 2f64.powi(k);
        if m > TAIL_CAP {
            break;
        }
        let top = (m * TAIL_WINDOW).min(hi);
        if top <= m * 10.0 {
            break;
        }
        let grid = LogGrid::new(m, top, TAIL_SAMPLES)?;
        let mut ok = true;
        for &t in grid.points() {
            if !holds(t)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(m);
        }
    }
    Err(ThresholdError::NoTailThreshold(what.into()))
}

impl ThresholdResult {
    /// `r*_λ` for `λ < λ*`.
    pub fn r_star(&self, lambda: f64) -> Result<f64> {
        self.check_lambda(lambda)?;
        match self.case {
            Case::MuchLess => {
                let d = self.case1_at(lambda)?;
                let crit = 2.0 * lambda * self.plateau(d.m_eps)?;
                Ok(2.0 * crit)
            }
            Case::Less => {
                let d = self.case2.expect("second-case data");
                let slope = self.c2_zeta(d.c)?;
                Ok(2.0 * self.plateau(d.m)? / (1.0 / lambda - slope))
            }
            Case::Greater | Case::MuchGreater => Ok(self.case4.expect("fourth-case data").r_min),
        }
    }

    /// The case-appropriate upper bound on `κ(r)`; in the first case `ε`
    /// depends on `λ`.
    pub fn kappa_bound(&self, lambda: f64, r: f64) -> Result<f64> {
        Ok(self.kappa_curve(lambda, &[r])?[0].1)
    }

    pub fn kappa_curve(&self, lambda: f64, r_values: &[f64]) -> Result<Vec<(f64, f64)>> {
        let (num, tail): (f64, Box<dyn Fn(f64) -> f64>) = match self.case {
            Case::MuchLess => {
                let d = self.case1_at(lambda)?;
                let lim = self.constants.c2 * self.zeta_phi(1.0)? * d.eps;
                (self.plateau(d.m_eps)?, Box::new(move |_| lim))
            }
            Case::Less => {
                let d = self.case2.expect("second-case data");
                let lim = self.c2_zeta(d.c)?;
                (self.plateau(d.m)?, Box::new(move |_| lim))
            }
            Case::Greater | Case::MuchGreater => {
                let d = self.case4.expect("fourth-case data");
                (d.a, Box::new(move |r: f64| d.b * r.powf(d.theta)))
            }
        };
        Ok(r_values.iter().map(|&r| (r, num / r + tail(r))).collect())
    }

    /// `ε` and `M_ε` for a given `λ` in the first case.
    pub fn case1_at(&self, lambda: f64) -> Result<Case1Data> {
        if self.case != Case::MuchLess {
            return Err(ThresholdError::Invalid("first-case data requested for another case".into()));
        }
        let z = self.zeta_phi(1.0)?;
        let eps = (1.0f64).min(1.0 / (2.0 * self.constants.c2 * z * lambda));
        let hi = self.upsilon.domain().hi.min(self.phi.domain().hi);
        let (ups, phi) = (&self.upsilon, &self.phi);
        let m_eps = tail_threshold("Upsilon <= eps Phi", hi, |t| Ok(ups.value(t)? <= eps * phi.value(t)?))?;
        Ok(Case1Data { eps, m_eps })
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        if !(lambda > 0.0 && lambda < self.lambda_star) {
            return Err(ThresholdError::LambdaOutOfRange { lambda, lambda_star: self.lambda_star });
        }
        Ok(())
    }

    /// `(C₁ + C₂Υ(M))|Ω|`.
    fn plateau(&self, m: f64) -> Result<f64> {
        Ok((self.constants.c1 + self.constants.c2 * self.upsilon.value(m)?) * self.measure)
    }

    /// `ζ̄_Φ(2c d_Ω)`.
    fn zeta_phi(&self, c: f64) -> Result<f64> {
        Ok(zeta_upper(&self.phi, 2.0 * c * self.diameter)?)
    }

    fn c2_zeta(&self, c: f64) -> Result<f64> {
        Ok(self.constants.c2 * self.zeta_phi(c)?)
    }

    /// One row per requested `λ`; `r_star` is empty when `λ ≥ λ*`.
    pub fn write_csv<W: Write>(&self, mut w: W, lambdas: &[f64]) -> io::Result<()> {
        writeln!(w, "case,C1,C2,A,B,theta,lambda_star,lambda,r_star")?;
        let (a, b, theta) = match self.case4 {
            Some(d) => (d.a.to_string(), d.b.to_string(), d.theta.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        for &l in lambdas {
            let r = self.r_star(l).map(|r| r.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{a},{b},{theta},{},{l},{r}",
                self.case, self.constants.c1, self.constants.c2, self.lambda_star
            )?;
        }
        Ok(())
    }
}

pub fn write_kappa_csv<W: Write>(mut w: W, curve: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "r,kappa_bound")?;
    for (r, k) in curve {
        writeln!(w, "{r},{k}")?;
    }
    Ok(())
}

/// Builds `λ*` and the data behind `r*_λ` for the classified case.
pub fn lambda_star(
    spec: &ProblemSpec,
    constants: TruncationConstants,
    classification: Classification,
    options: &ThresholdOptions,
) -> Result<ThresholdResult> {
    let phi = spec.phi().clone();
    let mut result = ThresholdResult {
        case: classification.case,
        constants,
        lambda_star: f64::INFINITY,
        case1: None,
        case2: None,
        case3: None,
        case4: None,
        upsilon: spec.upsilon.clone(),
        phi: phi.clone(),
        measure: spec.grid.measure(),
        diameter: spec.grid.diameter(),
    };
    match classification.case {
        Case::MuchLess => {
            result.case1 = Some(result.case1_at(spec.lambda)?);
        }
        Case::Less => {
            let c = classification
                .c
                .ok_or_else(|| ThresholdError::Invalid("second case needs the comparison constant c".into()))?;
            let hi = spec.upsilon.domain().hi.min(phi.domain().hi / c);
            let ups = &spec.upsilon;
            let m = tail_threshold("Upsilon(t) <= Phi(ct)", hi, |t| Ok(ups.value(t)? <= phi.value(c * t)?))?;
            result.case2 = Some(Case2Data { c, m });
            result.lambda_star = 1.0 / result.c2_zeta(c)?;
        }
        Case::Greater => {
            let phi_star = match &options.phi_star {
                Some(s) => s.clone(),
                None => check_ha2(&phi, spec.n_dim)?
                    .phi_star
                    .ok_or_else(|| ThresholdError::CaseContradiction("Phi_* is unavailable".into()))?,
            };
            let case3 = intermediate(spec, &constants, &phi_star)?;
            let d4 = fourth_case(spec, &phi, &case3.upsilon_hat, case3.c1_hat, case3.c2_hat, options)?;
            result.lambda_star = 1.0 / d4.kappa_min;
            result.case4 = Some(d4);
            result.case3 = Some(case3);
        }
        Case::MuchGreater => {
            let d4 = fourth_case(spec, &phi, &spec.upsilon, constants.c1, constants.c2, options)?;
            result.lambda_star = 1.0 / d4.kappa_min;
            result.case4 = Some(d4);
        }
    }
    Ok(result)
}

fn intermediate(spec: &ProblemSpec, constants: &TruncationConstants, phi_star: &YoungFunction) -> Result<Case3Data> {
    let ups = &spec.upsilon;
    let hi = ups.domain().hi.min(phi_star.domain().hi);
    let m = tail_threshold("Upsilon <= Phi_*", hi, |t| Ok(ups.value(t)? <= phi_star.value(t)?))?;
    let upsilon_hat = GeometricMean::young(ups.clone(), phi_star.clone()).with_default_indices()?;
    let (iu, is, ih) = (ups.require_indices()?, phi_star.require_indices()?, upsilon_hat.require_indices()?);
    let tol = 1e-2;
    let index_bracket_ok = 0.5 * (iu.lower + is.lower) <= ih.lower + tol
        && ih.lower <= ih.upper
        && ih.upper <= 0.5 * (iu.upper + is.upper) + tol;
    let ordering_ok =
        ordering(ups, &upsilon_hat) == Relation::MuchLess && ordering(&upsilon_hat, phi_star) == Relation::MuchLess;
    Ok(Case3Data {
        upsilon_hat,
        m,
        c1_hat: constants.c1 + constants.c2 * ups.value(m)?,
        c2_hat: constants.c2,
        index_bracket_ok,
        ordering_ok,
    })
}

fn fourth_case(
    spec: &ProblemSpec,
    phi: &YoungFunction,
    upsilon: &YoungFunction,
    c1: f64,
    c2: f64,
    options: &ThresholdOptions,
) -> Result<Case4Data> {
    let s_ups = upsilon.require_indices()?.upper;
    let i_phi = phi.require_indices()?.lower;
    let theta = s_ups / i_phi - 1.0;
    if !(theta > 0.0) {
        return Err(ThresholdError::CaseContradiction(format!(
            "theta = s_Upsilon/i_Phi - 1 = {theta} must be positive"
        )));
    }
    let k = match options.embedding_constant {
        Some(k) => k,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            estimate_embedding_constant(phi, upsilon, &spec.grid, options.n_trials, &mut rng)?
        }
    };
    let z = zeta_upper(upsilon, k)?;
    let a = c1 * spec.grid.measure() + c2 * z;
    let b = c2 * z;
    let (r_min, kappa_min) = khat_minimum(a, b, theta);
    Ok(Case4Data { a, b, theta, k, r_min, kappa_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::{builtin_example, Builtin, BuiltinParams};
    use crate::roots::golden_min;

    fn a5() -> ProblemSpec {
        builtin_example(Builtin::A5, &BuiltinParams::default()).unwrap()
    }

    #[test]
    fn constants_by_substitution() {
        let mut spec = a5();
        spec.upsilon = YoungFunction::power(1.0, 2.0).with_default_indices().unwrap();
        // Υ = t² gives Υ(1) = 1; k₂ d_Ω = 1 on the unit interval
        let c = truncation_constants(&spec, 1.0, 1.0).unwrap();
        assert!((c.c1 - 5.0).abs() < 1e-12 && (c.c2 - 4.0).abs() < 1e-12, "{c:?}");
        assert!((c.alpha - 1.0).abs() < 1e-12);
        // Ῡ for t² is t²/4, so Ῡ⁻¹(1) = 2
        assert!((c.beta - 2.0).abs() < 1e-8, "{}", c.beta);
        assert!((pi_bound(&spec, &c, 0.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(truncation_constants(&spec, 1.0, 0.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let t2 = YoungFunction::power(1.0, 2.0).with_default_indices().unwrap();
        let t3 = YoungFunction::power(1.0, 3.0).with_default_indices().unwrap();
        assert_eq!(classify(&t2, &t3).unwrap().case, Case::MuchLess);
        assert_eq!(classify(&t3, &t2).unwrap().case, Case::MuchGreater);
        let same = classify(&t2, &t2).unwrap();
        assert_eq!(same, Classification { case: Case::Less, c: Some(1.0) });
        let spec = a5();
        assert_eq!(classify(&spec.upsilon, spec.phi()).unwrap().case, Case::MuchGreater);
    }

    #[test]
    fn khat_minimum_oracle() {
        let (r, k) = khat_minimum(1.0, 1.0, 1.0);
        assert!((r - 1.0).abs() < 1e-15 && (k - 2.0).abs() < 1e-15);
        assert!((khat_minimum_compact(1.0, 1.0, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        let (a, b, theta) = (3.0, 0.2, 0.7);
        let (r, k) = khat_minimum(a, b, theta);
        let rg = golden_min(|r| khat(a, b, theta, r), 1e-3, 1e3, 1e-12);
        assert!((khat(a, b, theta, rg) - k).abs() < 1e-10 * k);
        assert!((rg - r).abs() < 1e-4 * r);
    }

    #[test]
    fn second_case_threshold() {
        let mut spec = a5();
        let phi = spec.phi().clone();
        spec.upsilon = phi.clone();
        let c = TruncationConstants { c1: 1.0, c2: 1.0, alpha: 1.0, beta: 1.0 };
        let cls = classify(&spec.upsilon, &phi).unwrap();
        assert_eq!(cls.case, Case::Less);
        let res = lambda_star(&spec, c, cls, &ThresholdOptions::default()).unwrap();
        let expected = 1.0 / zeta_upper(&phi, 2.0).unwrap();
        assert!((res.lambda_star - expected).abs() < 1e-14 * expected);
        let l = 0.5 * res.lambda_star;
        let r = res.r_star(l).unwrap();
        assert!(l * res.kappa_bound(l, r).unwrap() < 1.0);
        assert!(res.r_star(2.0 * res.lambda_star).is_err());
        let curve = res.kappa_curve(l, &[1.0, 10.0, 100.0]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn first_case_is_unbounded() {
        let mut spec = a5();
        spec.upsilon = YoungFunction::power(1.0, 2.0).with_default_indices().unwrap();
        let c = truncation_constants(&spec, 1.0, 1.0).unwrap();
        let cls = classify(&spec.upsilon, spec.phi()).unwrap();
        assert_eq!(cls.case, Case::MuchLess);
        let res = lambda_star(&spec, c, cls, &ThresholdOptions::default()).unwrap();
        assert!(res.lambda_star.is_infinite());
        for l in [0.1, 1.0, 100.0] {
            let r = res.r_star(l).unwrap();
            assert!(l * res.kappa_bound(l, r).unwrap() < 1.0);
        }
        let d = res.case1_at(1.0).unwrap();
        let lim = c.c2 * zeta_upper(spec.phi(), 2.0).unwrap() * d.eps;
        let far = res.kappa_bound(1.0, 1e12).unwrap();
        assert!((far - lim).abs() < 1e-6 * lim);
    }

    #[test]
    fn fourth_case_uses_embedding_constant() {
        let spec = a5();
        let c = truncation_constants(&spec, 1.0, 0.5).unwrap();
        let cls = classify(&spec.upsilon, spec.phi()).unwrap();
        let opts = ThresholdOptions { embedding_constant: Some(0.5), ..Default::default() };
        let res = lambda_star(&spec, c, cls, &opts).unwrap();
        let d = res.case4.unwrap();
        assert!((d.theta - (4.5 / 3.0 - 1.0)).abs() < 1e-2, "{d:?}");
        assert!((res.lambda_star * d.kappa_min - 1.0).abs() < 1e-15);
        let mut bigger = c;
        bigger.c2 *= 2.0;
        let res2 = lambda_star(&spec, bigger, cls, &opts).unwrap();
        assert!(res2.lambda_star <= res.lambda_star);
        let mut buf = Vec::new();
        res.write_csv(&mut buf, &[0.5 * res.lambda_star, 2.0 * res.lambda_star]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().ends_with(','));
    }
}
