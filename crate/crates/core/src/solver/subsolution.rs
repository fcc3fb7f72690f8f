//! Torsion problems `−Δ_Φ u = c` and the sub-solution built from them.

use crate::hypotheses::Operator;
use crate::orlicz::{Grid, GridFunction};
use crate::roots::invert_increasing;

use super::descent::{minimize, DescentOptions};
use super::energy::DiscreteEnergy;
use super::{Result, SolverError};

/// Discrete flux balance `φ(g_c) = c h ((N−1)/2 − c)` integrated cell by
/// cell; the descent below starts from it and only has to confirm it.
fn flux_profile(op: &Operator, c: f64, grid: &Grid) -> Result<Vec<f64>> {
    let h = grid.h();
    let cells = grid.n_cells();
    let mut u = Vec::with_capacity(grid.n_interior());
    let mut acc = 0.0;
    let mut guess = 1.0;
    for k in 0..grid.n_interior() {
        let target = c * h * ((cells as f64 - 1.0) / 2.0 - k as f64);
        let g = if target == 0.0 {
            0.0
        } else {
            let t = invert_increasing(|t| op.flux(t), target.abs(), guess, 1e-300, 1e300, 1e-14)
                .map_err(|e| SolverError::Degenerate(format!("flux inversion failed: {e}")))?;
            guess = t;
            target.signum() * t
        };
        acc += g * h;
        u.push(acc);
    }
    Ok(u)
}

/// Minimiser of `Σ Φ(|∇u|)h − cΣu h`, to gradient tolerance `opts.tol`.
pub fn solve_torsion(op: &Operator, c: f64, grid: &Grid, opts: &DescentOptions) -> Result<GridFunction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(SolverError::Degenerate(format!("torsion load must be positive, got {c}")));
    }
    let energy = DiscreteEnergy::torsion(op, *grid, c);
    let start = flux_profile(op, c, grid)?;
    let out = minimize(&energy, &start, opts, None, &mut |_| {})?;
    Ok(GridFunction::new(*grid, out.u)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubSolution {
    pub u_under: GridFunction,
    /// Torsion load is `1/n_hat`.
    pub n_hat: u64,
    pub delta: f64,
    pub k1: f64,
    pub k2: f64,
}

impl SubSolution {
    /// `k₁d(x_i) ≤ u̲_i ≤ k₂d(x_i)` at every interior node.
    pub fn slopes_hold(&self) -> bool {
        let g = self.u_under.grid();
        self.u_under.values().iter().enumerate().all(|(i, &u)| {
            let d = g.distance(i);
            self.k1 * d <= u * (1.0 + 1e-14) && u <= self.k2 * d * (1.0 + 1e-14)
        })
    }
}

pub const MAX_N_HAT: u64 = 1_000_000_000;

/// Torsion solutions with loads `1/n`, `n = 1, 2, 4, …`, until the maximum
/// drops below `δ` and `1/n ≤ λ`, so that `−Δ_Φ u̲ = 1/n ≤ λ ≤ λ f(x, u̲)`.
/// `δ` is halved first until it lies below the AR threshold `R`.
pub fn build_subsolution(
    op: &Operator,
    grid: &Grid,
    delta: f64,
    r_ar: f64,
    lambda: f64,
    opts: &DescentOptions,
) -> Result<SubSolution> {
    if !(delta > 0.0) {
        return Err(SolverError::HypothesisFailure("no blow-up threshold delta > 0".into()));
    }
    let mut delta = delta;
    while delta >= r_ar {
        delta *= 0.5;
    }
    let mut n: u64 = 1;
    loop {
        let load = 1.0 / n as f64;
        if load <= lambda {
            let u = solve_torsion(op, load, grid, opts)?;
            if u.max() < delta {
                if u.min() <= 0.0 {
                    return Err(SolverError::Degenerate("torsion solution is not positive".into()));
                }
                let ratios: Vec<f64> = u.values().iter().enumerate().map(|(i, v)| v / grid.distance(i)).collect();
                let k1 = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let k2 = ratios.iter().copied().fold(0.0, f64::max);
                return Ok(SubSolution { u_under: u, n_hat: n, delta, k1, k2 });
            }
        }
        n = n
            .checked_mul(2)
            .filter(|n| *n <= MAX_N_HAT)
            .ok_or_else(|| SolverError::Degenerate(format!("torsion load would need n above {MAX_N_HAT}")))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form(p: f64, c: f64, x: f64) -> f64 {
        let e = p / (p - 1.0);
        c.powf(1.0 / (p - 1.0)) * ((p - 1.0) / p) * (0.5f64.powf(e) - (x - 0.5).abs().powf(e))
    }

    #[test]
    fn laplacian_torsion_is_parabola() {
        let grid = Grid::with_spacing(1.0, 1.0 / 256.0).unwrap();
        let u = solve_torsion(&Operator::power(2.0).unwrap(), 1.0, &grid, &DescentOptions::default()).unwrap();
        let err = grid.nodes().iter().zip(u.values()).map(|(x, v)| (x * (1.0 - x) / 2.0 - v).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
        assert!((u.max() - 0.125).abs() < 1e-3);
    }

    #[test]
    fn comparison_in_the_load() {
        let grid = Grid::with_spacing(1.0, 1.0 / 64.0).unwrap();
        let op = Operator::power(3.0).unwrap();
        let opts = DescentOptions::default();
        let a = solve_torsion(&op, 0.5, &grid, &opts).unwrap();
        let b = solve_torsion(&op, 0.6, &grid, &opts).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x < y));
        let err =
            grid.nodes().iter().zip(a.values()).map(|(x, v)| (closed_form(3.0, 0.5, *x) - v).abs()).fold(0.0, f64::max);
        assert!(err <= 5.0 * grid.h(), "{err}");
    }

    #[test]
    fn subsolution_respects_delta_and_slopes() {
        let grid = Grid::with_spacing(1.0, 1.0 / 64.0).unwrap();
        let op = Operator::power(3.0).unwrap();
        let s = build_subsolution(&op, &grid, 0.05, 4.0, 1.0, &DescentOptions::default()).unwrap();
        assert!(s.u_under.max() < 0.05);
        assert!(s.n_hat > 1 && s.slopes_hold());
        assert!(s.k1 <= s.k2);
        let again = build_subsolution(&op, &grid, 0.05, 4.0, 1e-3, &DescentOptions::default()).unwrap();
        assert!(again.n_hat >= 1000);
    }
}
