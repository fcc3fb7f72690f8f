//! TOML run configuration. Every key is optional; the defaults describe the
//! logarithmic example with `p = 3`, `N = 4`, `r = 3.5`, `γ = 0.5`.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use philab_core::hypotheses::{ar_threshold, Operator, ProblemSpec, Reaction, RegularPart};
use philab_core::orlicz::Grid;
use philab_core::solver::{DescentOptions, MountainPassOptions, PipelineOptions};
use philab_core::young::{build_pathological, PathologicalParams, YoungFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub operator: OperatorSection,
    pub reaction: ReactionSection,
    pub hypotheses: HypothesesSection,
    pub grid: GridSection,
    pub solver: SolverSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSection {
    /// `power`, `log-power` or `pathological`.
    pub kind: String,
    pub p: f64,
    pub q: f64,
    pub eps: f64,
}

impl Default for OperatorSection {
    fn default() -> Self {
        OperatorSection { kind: "log-power".into(), p: 3.0, q: 2.0, eps: PathologicalParams::DEFAULT_EPS }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReactionSection {
    /// `power`, `log1p`, `upsilon-over-t`, `conj-inverse` or `zero`.
    pub regular: String,
    pub coef: f64,
    pub r: f64,
    pub singular_coef: f64,
    pub gamma: f64,
    pub spatial_amplitude: f64,
    /// `power` or `pathological`.
    pub upsilon: String,
    /// Exponent of a power `Υ`; `r + 1` when absent.
    pub upsilon_exponent: Option<f64>,
    pub upsilon_p: f64,
    pub upsilon_q: f64,
    pub upsilon_eps: f64,
}

impl Default for ReactionSection {
    fn default() -> Self {
        ReactionSection {
            regular: "power".into(),
            coef: 1.0,
            r: 3.5,
            singular_coef: 1.0,
            gamma: 0.5,
            spatial_amplitude: 0.0,
            upsilon: "power".into(),
            upsilon_exponent: None,
            upsilon_p: 4.5,
            upsilon_q: 3.5,
            upsilon_eps: PathologicalParams::DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HypothesesSection {
    pub n_dim: f64,
    pub c1: f64,
    pub c2: f64,
    /// AR exponent; midway between `s_Φ` and `i_Υ` when absent.
    pub mu: Option<f64>,
    /// AR threshold `R`; smallest admissible dyadic value when absent.
    pub r_ar: Option<f64>,
    pub t_max: f64,
}

impl Default for HypothesesSection {
    fn default() -> Self {
        HypothesesSection { n_dim: 4.0, c1: 1.0, c2: 1.0, mu: None, r_ar: None, t_max: 1e4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub length: f64,
    pub h: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { length: 1.0, h: 1.0 / 128.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub seed: u64,
    /// Working `λ`; `lambda_fraction · λ*` when absent.
    pub lambda: Option<f64>,
    pub lambda_fraction: f64,
    pub embedding_trials: usize,
    pub torsion_tol: f64,
    pub first_tol: f64,
    pub descent_max_iter: usize,
    pub mountain_tol: f64,
    pub mountain_max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            seed: 0,
            lambda: None,
            lambda_fraction: 0.5,
            embedding_trials: 200,
            torsion_tol: 1e-8,
            first_tol: 1e-9,
            descent_max_iter: 2000,
            mountain_tol: 1e-4,
            mountain_max_iter: 5000,
        }
    }
}

/// Parses `value` as a TOML literal, falling back to a bare string.
fn literal(value: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {value}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

impl Config {
    /// Reads `path` (or starts from the defaults) and applies `section.key=value`
    /// overrides before validation, so unknown keys fail either way.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
        let mut table = match path {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
                toml::from_str::<toml::Table>(&text).with_context(|| format!("cannot parse config {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| anyhow!("override `{item}` is not key=value"))?;
            let (section, field) =
                key.trim().split_once('.').ok_or_else(|| anyhow!("override key `{key}` must be section.key"))?;
            let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let toml::Value::Table(sec) = entry else {
                bail!("`{section}` is not a section");
            };
            sec.insert(field.to_string(), literal(value.trim()));
        }
        let cfg: Config = toml::Value::Table(table).try_into().context("invalid configuration")?;
        Ok(cfg)
    }

    /// SHA-256 of the effective configuration in canonical TOML form.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn upsilon(&self) -> Result<YoungFunction> {
        let r = &self.reaction;
        let ups = match r.upsilon.as_str() {
            "power" => YoungFunction::power(1.0, r.upsilon_exponent.unwrap_or(r.r + 1.0)),
            "pathological" => build_pathological(PathologicalParams::new(r.upsilon_p, r.upsilon_q, r.upsilon_eps)?)?,
            other => bail!("unknown reaction.upsilon `{other}` (power, pathological)"),
        };
        Ok(ups.with_default_indices()?)
    }

    pub fn operator(&self) -> Result<Operator> {
        let o = &self.operator;
        Ok(match o.kind.as_str() {
            "power" => Operator::power(o.p)?,
            "log-power" => Operator::log_power(o.p)?,
            "pathological" => Operator::from_young(build_pathological(PathologicalParams::new(o.p, o.q, o.eps)?)?)?,
            other => bail!("unknown operator.kind `{other}` (power, log-power, pathological)"),
        })
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let operator = self.operator()?;
        let upsilon = self.upsilon()?;
        let r = &self.reaction;
        let regular = match r.regular.as_str() {
            "power" => RegularPart::Power { coef: r.coef, r: r.r },
            "log1p" => RegularPart::Log1p { coef: r.coef },
            "upsilon-over-t" => RegularPart::UpsilonOverT { upsilon: upsilon.clone() },
            "conj-inverse" => RegularPart::conj_inverse(r.coef, upsilon.clone())?,
            "zero" => RegularPart::Zero,
            other => bail!("unknown reaction.regular `{other}` (power, log1p, upsilon-over-t, conj-inverse, zero)"),
        };
        let g = &self.grid;
        let reaction =
            Reaction::new(regular, r.singular_coef, r.gamma)?.with_spatial_weight(r.spatial_amplitude, g.length)?;
        let h = &self.hypotheses;
        let s_phi = operator.phi().require_indices()?.upper;
        let i_ups = upsilon.require_indices()?.lower;
        let mu = h.mu.unwrap_or(0.5 * (s_phi + i_ups));
        // Without an admissible dyadic threshold the AR audit itself reports
        // the failure, so any positive R serves.
        let r_ar = match h.r_ar {
            Some(v) => v,
            None => ar_threshold(mu, r.gamma, i_ups, &upsilon).unwrap_or(1.0),
        };
        let spec = ProblemSpec {
            name: "config".into(),
            operator,
            reaction,
            upsilon,
            c1: h.c1,
            c2: h.c2,
            mu,
            r_ar,
            lambda: self.solver.lambda.unwrap_or(1.0),
            n_dim: h.n_dim,
            grid: Grid::with_spacing(g.length, g.h)?,
            t_max: h.t_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        let s = &self.solver;
        PipelineOptions {
            seed: s.seed,
            embedding_trials: s.embedding_trials,
            lambda: s.lambda,
            lambda_fraction: s.lambda_fraction,
            torsion: DescentOptions { tol: s.torsion_tol, max_iter: s.descent_max_iter, ..Default::default() },
            first: DescentOptions { tol: s.first_tol, max_iter: s.descent_max_iter, ..Default::default() },
            mountain: MountainPassOptions { tol: s.mountain_tol, max_iter: s.mountain_max_iter, ..Default::default() },
        }
    }

    /// `key=value` lines for the manifest.
    pub fn tolerances(&self) -> Vec<(&'static str, String)> {
        let s = &self.solver;
        vec![
            ("torsion_tol", format!("{:e}", s.torsion_tol)),
            ("first_tol", format!("{:e}", s.first_tol)),
            ("mountain_tol", format!("{:e}", s.mountain_tol)),
            ("descent_max_iter", s.descent_max_iter.to_string()),
            ("mountain_max_iter", s.mountain_max_iter.to_string()),
            ("embedding_trials", s.embedding_trials.to_string()),
        ]
    }
}
