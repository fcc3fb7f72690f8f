//! Discrete variational pipeline: torsion sub-solution, truncated energy,
//! constrained local minimum, mountain-pass second solution and the
//! De Giorgi `L∞` diagnostic.

mod degiorgi;
mod descent;
mod energy;
mod mountain;
mod pipeline;
mod subsolution;

use thiserror::Error;

use crate::hypotheses::HypothesisError;
use crate::orlicz::OrliczError;
use crate::threshold::ThresholdError;
use crate::young::YoungError;

pub use degiorgi::{degiorgi_bound, DeGiorgiReport};
pub use descent::{max_abs, minimize, newton_polish, DescentOptions, DescentOutcome, Functional, Projection};
pub use energy::{verify_solution, DiscreteEnergy, EnergyState, ResidualReport, Source, Truncation};
pub use mountain::{mountain_pass, plateau_hat, uphill_endpoint, MountainPassOptions, MountainPassOutcome};
pub use pipeline::{
    project_to_ball, run_pipeline, run_pipeline_checked, write_log_csv, write_solution_csv, FirstSolution,
    PipelineOptions, PipelineReport, SecondSolution, Stage,
};
pub use subsolution::{build_subsolution, solve_torsion, SubSolution, MAX_N_HAT};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("{what} did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { what: String, iterations: usize, residual: f64 },
    #[error("{what} stalled: no acceptable step at residual {residual:e}")]
    Stalled { what: String, residual: f64 },
    #[error("degenerate problem: {0}")]
    Degenerate(String),
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error("local minimiser pinned to the modular ball: H = {h_value} vs r* = {r_star}")]
    PinnedToBall { h_value: f64, r_star: f64 },
    #[error("mountain-pass path collapsed onto the start (gap {gap:e})")]
    Collapse { gap: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("overflow guard: {0}")]
    Overflow(String),
    #[error("De Giorgi recursion unfittable: {0}")]
    Unfittable(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
