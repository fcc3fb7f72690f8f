//! De Giorgi level-set iteration as an `L∞` diagnostic on grid functions.

use std::io::{self, Write};

use crate::orlicz::GridFunction;

use super::{Result, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct DeGiorgiReport {
    /// `k_n = M(1 − 2^{−(n+1)})`.
    pub levels: Vec<f64>,
    /// `y_n = Σ_{u ≥ k_n} (u − k_n)^p h`.
    pub masses: Vec<f64>,
    pub p_exp: f64,
    pub a: f64,
    pub b: f64,
    /// `ln C`, the upper envelope of `ln(y_{n+1} / (bⁿ y_n^{1+a}))`; `−∞`
    /// when no step has two positive masses.
    pub log_c: f64,
    pub bound: f64,
    /// First `n` with `y_n ≤ C^{−1/a} b^{−1/a²}`.
    pub smallness_index: usize,
    /// `Σ (u − M)₊^p h`, zero on success.
    pub final_mass: f64,
    pub doublings: usize,
}

impl DeGiorgiReport {
    /// `y₀ = 0`: `M/2` already bounds `u` and no recursion step was observed.
    pub fn trivial(&self) -> bool {
        self.masses[0] == 0.0
    }

    pub fn nonincreasing_after_smallness(&self) -> bool {
        self.masses[self.smallness_index..].windows(2).all(|w| w[1] <= w[0])
    }

    pub fn reaches_zero(&self) -> bool {
        self.masses.last() == Some(&0.0) && self.final_mass == 0.0
    }

    /// `y_{n+1} ≤ C bⁿ y_n^{1+a}` at every step, checked in logarithms.
    pub fn recursion_holds(&self) -> bool {
        self.masses
            .windows(2)
            .enumerate()
            .all(|(n, w)| w[1] == 0.0 || (w[0] > 0.0 && step_log(n, w[0], w[1], self.a, self.b) <= self.log_c))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,k_n,y_n")?;
        for (n, (k, y)) in self.levels.iter().zip(&self.masses).enumerate() {
            writeln!(w, "{n},{k},{y}")?;
        }
        Ok(())
    }
}

fn step_log(n: usize, y: f64, y_next: f64, a: f64, b: f64) -> f64 {
    y_next.ln() - n as f64 * b.ln() - (1.0 + a) * y.ln()
}

fn mass(u: &[f64], k: f64, p: f64, h: f64) -> f64 {
    // `+ 0.0` turns the empty sum's −0 into 0.
    u.iter().filter(|v| **v >= k).map(|v| (v - k).powf(p)).sum::<f64>() * h + 0.0
}

pub const MAX_LEVELS: usize = 200;
pub const MAX_BOUND_DOUBLINGS: usize = 200;

/// Doubles `M` from `2K` until the smallness condition holds for the fitted
/// recursion constants and `Σ(u − M)₊^p h = 0`. The exponents come from
/// `r = ratio`, `a = r − 1`, `b = 2^{pr}`; `C` is fitted as the upper
/// envelope of the observed steps.
pub fn degiorgi_bound(u: &GridFunction, p_exp: f64, ratio: f64, k_start: f64) -> Result<DeGiorgiReport> {
    if !(p_exp > 1.0 && ratio > 1.0) {
        return Err(SolverError::Unfittable(format!("need p > 1 and r > 1, got p = {p_exp}, r = {ratio}")));
    }
    if !(k_start > 0.0) || u.values().iter().any(|v| !v.is_finite()) {
        return Err(SolverError::Unfittable("need K > 0 and a finite function".into()));
    }
    let (a, b) = (ratio - 1.0, 2f64.powf(p_exp * ratio));
    let h = u.grid().h();
    let vals = u.values();
    let mut m = 2.0 * k_start;
    for doublings in 0..MAX_BOUND_DOUBLINGS {
        let mut levels = Vec::new();
        let mut masses = Vec::new();
        for n in 0..MAX_LEVELS {
            let k = m * (1.0 - 0.5f64.powi(n as i32 + 1));
            let y = mass(vals, k, p_exp, h);
            levels.push(k);
            masses.push(y);
            if y == 0.0 {
                break;
            }
        }
        let log_c = masses
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > 0.0 && w[1] > 0.0)
            .map(|(n, w)| step_log(n, w[0], w[1], a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        let log_threshold = -log_c / a - b.ln() / (a * a);
        let smallness_index = masses.iter().position(|y| *y == 0.0 || y.ln() <= log_threshold);
        let final_mass = mass(vals, m, p_exp, h);
        if let Some(s) = smallness_index {
            if s == 0 && final_mass == 0.0 && masses.last() == Some(&0.0) {
                return Ok(DeGiorgiReport {
                    levels,
                    masses,
                    p_exp,
                    a,
                    b,
                    log_c,
                    bound: m,
                    smallness_index: s,
                    final_mass,
                    doublings,
                });
            }
        }
        m *= 2.0;
    }
    Err(SolverError::Unfittable("no admissible bound M found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::Grid;

    #[test]
    fn constant_function_is_bounded_immediately() {
        let g = Grid::new(1.0, 15).unwrap();
        let u = GridFunction::from_fn(g, |_| 3.0).unwrap();
        let r = degiorgi_bound(&u, 2.0, 1.5, 1.5).unwrap();
        assert!(r.bound <= 6.0);
        assert_eq!(r.levels[0], 0.5 * r.bound);
        assert!(r.reaches_zero() && r.recursion_holds() && r.nonincreasing_after_smallness());
    }

    #[test]
    fn smooth_bump() {
        let g = Grid::new(1.0, 127).unwrap();
        let u = GridFunction::from_fn(g, |x| (std::f64::consts::PI * x).sin()).unwrap();
        let r = degiorgi_bound(&u, 3.0, 2.0, 0.25).unwrap();
        assert!(r.bound >= 1.0 && r.reaches_zero());
        assert!(r.recursion_holds() && r.nonincreasing_after_smallness());
        for (n, k) in r.levels.iter().enumerate() {
            assert_eq!(*k, r.bound * (1.0 - 0.5f64.powi(n as i32 + 1)));
        }
    }
}
