//! Built-in problems: the logarithmic operator with power reaction, the
//! pathological pair `(Φ, Υ)`, and the `Υ(t)/t + t^{-γ}` reaction.

use std::str::FromStr;

use crate::orlicz::Grid;
use crate::young::{build_pathological, LogGrid, PathologicalParams, YoungFunction};

use super::{HypothesisError, Operator, ProblemSpec, Reaction, RegularPart, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Pathological `Φ` and `Υ` with `f = Υ(t)/t + t^{-γ}`.
    A4,
    /// `a(t) = t^{p-2} log(1+t)`, `f = t^r + t^{-γ}`, `Υ = t^{r+1}`.
    A5,
    /// `Φ = t²/2` with a pathological `Υ` and `f = Υ(t)/t + t^{-γ}`.
    PathologicalReaction,
}

impl FromStr for Builtin {
    type Err = HypothesisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A4" | "a4" => Ok(Builtin::A4),
            "A5" | "a5" => Ok(Builtin::A5),
            "pathological-reaction" => Ok(Builtin::PathologicalReaction),
            other => Err(HypothesisError::Construction(format!("unknown builtin example `{other}`"))),
        }
    }
}

/// Optional overrides; `None` picks the example's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuiltinParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub eps: Option<f64>,
    pub n_dim: Option<f64>,
    pub r: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub length: Option<f64>,
    pub h: Option<f64>,
    pub t_max: Option<f64>,
}

pub const DEFAULT_H: f64 = 1.0 / 128.0;
pub const DEFAULT_T_MAX: f64 = 1e4;

/// Smallest dyadic `R` with `μ/(1−γ) t^{1−γ} ≤ (1 − μ/i_Υ) Υ(t)` on
/// `[R, 10⁶R]`; the inequality makes the AR condition hold for
/// `f = Υ(t)/t + t^{-γ}` and for `f = t^r + t^{-γ}` with `Υ = t^{r+1}`.
pub fn ar_threshold(mu: f64, gamma: f64, i_upsilon: f64, upsilon: &YoungFunction) -> Result<f64> {
    let slack = 1.0 - mu / i_upsilon;
    if !(slack > 0.0) {
        return Err(HypothesisError::Construction(format!("mu = {mu} must lie below i_Upsilon = {i_upsilon}")));
    }
    for k in -20..=60 {
        let r = 2f64.powi(k);
        let grid = LogGrid::new(r, r * 1e6, 200)?;
        let mut ok = true;
        for &t in grid.points() {
            if mu / (1.0 - gamma) * t.powf(1.0 - gamma) > slack * upsilon.value(t)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
    }
    Err(HypothesisError::Construction("no dyadic AR threshold below 2^60".into()))
}

pub fn builtin_example(which: Builtin, params: &BuiltinParams) -> Result<ProblemSpec> {
    let length = params.length.unwrap_or(1.0);
    let grid = Grid::with_spacing(length, params.h.unwrap_or(DEFAULT_H))?;
    let lambda = params.lambda.unwrap_or(1.0);
    let t_max = params.t_max.unwrap_or(DEFAULT_T_MAX);
    match which {
        Builtin::A5 => {
            let p = params.p.unwrap_or(3.0);
            let n = params.n_dim.unwrap_or(4.0);
            let r = params.r.unwrap_or(3.5);
            let gamma = params.gamma.unwrap_or(0.5);
            let p_star = n * p / (n - p);
            // p = N − 1 is admitted: the divergence and index conditions
            // still hold there and the reference configuration sits on it.
            if !(p > 1.0 && p <= n - 1.0) {
                return Err(HypothesisError::Construction(format!("need 1 < p <= N - 1, got p = {p}, N = {n}")));
            }
            if !(n < p + p * p) {
                return Err(HypothesisError::Construction(format!("need N < p + p^2, got N = {n}")));
            }
            if !(r > p && r < p_star - 1.0) {
                return Err(HypothesisError::Construction(format!(
                    "need r in (p, p* - 1) = ({p}, {}), got {r}",
                    p_star - 1.0
                )));
            }
            let operator = Operator::log_power(p)?;
            let upsilon = YoungFunction::power(1.0, r + 1.0).with_default_indices()?;
            let reaction = Reaction::new(RegularPart::Power { coef: 1.0, r }, 1.0, gamma)?;
            let s_phi = operator.phi().require_indices()?.upper;
            let i_ups = r + 1.0;
            let mu = 0.5 * (s_phi + i_ups);
            let r_ar = ar_threshold(mu, gamma, i_ups, &upsilon)?;
            Ok(ProblemSpec {
                name: "A5".into(),
                operator,
                reaction,
                upsilon,
                c1: 1.0,
                c2: 1.0,
                mu,
                r_ar,
                lambda,
                n_dim: n,
                grid,
                t_max,
            })
        }
        Builtin::A4 => {
            let p = params.p.unwrap_or(3.0);
            let q = params.q.unwrap_or(2.0);
            let eps = params.eps.unwrap_or(PathologicalParams::DEFAULT_EPS);
            let n = params.n_dim.unwrap_or(4.0);
            let gamma = params.gamma.unwrap_or(0.5);
            let q_star = n * q / (n - q);
            if !(p < n && q < n) {
                return Err(HypothesisError::Construction(format!("need p < N, got p = {p}, N = {n}")));
            }
            // Υ indices s < r placed strictly between p and q*.
            let (s_ups, r_ups) = (p + 0.3 * (q_star - p), p + 0.7 * (q_star - p));
            if !(r_ups < q_star && s_ups > p) {
                return Err(HypothesisError::Construction(format!("need p < q* = {q_star}")));
            }
            let phi = build_pathological(PathologicalParams::new(p, q, eps)?)?.with_default_indices()?;
            let ups_eps = eps.min(0.95 * 4f64.min((s_ups - 1.0) / (0.5 * (r_ups - s_ups))));
            let upsilon =
                build_pathological(PathologicalParams::new(r_ups, s_ups, ups_eps)?)?.with_default_indices()?;
            let operator = Operator::from_young(phi)?;
            let reaction = Reaction::new(RegularPart::UpsilonOverT { upsilon: upsilon.clone() }, 1.0, gamma)?;
            let mu = 0.5 * (p + s_ups);
            let r_ar = ar_threshold(mu, gamma, s_ups, &upsilon)?;
            Ok(ProblemSpec {
                name: "A4".into(),
                operator,
                reaction,
                upsilon,
                c1: 1.0,
                c2: 1.0,
                mu,
                r_ar,
                lambda,
                n_dim: n,
                grid,
                t_max,
            })
        }
        Builtin::PathologicalReaction => {
            let n = params.n_dim.unwrap_or(3.0);
            let gamma = params.gamma.unwrap_or(0.5);
            let p_ups = params.p.unwrap_or(4.5);
            let q_ups = params.q.unwrap_or(3.5);
            let eps = params.eps.unwrap_or(PathologicalParams::DEFAULT_EPS);
            let operator = Operator::power(2.0)?;
            let upsilon = build_pathological(PathologicalParams::new(p_ups, q_ups, eps)?)?.with_default_indices()?;
            let reaction = Reaction::new(RegularPart::UpsilonOverT { upsilon: upsilon.clone() }, 1.0, gamma)?;
            let mu = 0.5 * (2.0 + q_ups);
            let r_ar = ar_threshold(mu, gamma, q_ups, &upsilon)?;
            Ok(ProblemSpec {
                name: "pathological-reaction".into(),
                operator,
                reaction,
                upsilon,
                c1: 1.0,
                c2: 1.0,
                mu,
                r_ar,
                lambda,
                n_dim: n,
                grid,
                t_max,
            })
        }
    }
}
