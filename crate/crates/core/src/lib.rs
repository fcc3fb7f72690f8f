//! Numerical laboratory for singular Φ-Laplacian Dirichlet problems.
//!
//! Modules build on each other bottom-up: [`young`] (Young-function
//! calculus), [`orlicz`] (discrete Orlicz–Sobolev space), [`hypotheses`]
//! (problem encoding and audits), [`threshold`] (λ* and r*), [`solver`]
//! (two-solution variational pipeline).

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod hypotheses;
pub mod orlicz;
pub mod par;
pub mod quad;
pub mod roots;
pub mod solver;
pub mod threshold;
pub mod tridiag;
pub mod young;
