//! Climbing-image string method for mountain-pass critical points, and the
//! far endpoint used to start it.

use crate::orlicz::GridFunction;

use super::descent::{dot, max_abs, newton_polish, Functional};
use super::energy::DiscreteEnergy;
use super::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountainPassOptions {
    /// Budget of peak-descent iterations.
    pub max_iter: usize,
    /// Residual required of the returned critical point.
    pub tol: f64,
    /// Newton is tried from the current peak every this many iterations.
    pub newton_every: usize,
    pub newton_iter: usize,
    pub armijo: f64,
}

impl Default for MountainPassOptions {
    fn default() -> Self {
        MountainPassOptions { max_iter: 5000, tol: 1e-4, newton_every: 10, newton_iter: 60, armijo: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MountainPassOutcome {
    pub v: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    /// Peak energy on the initial segment from `u0` towards `u1`.
    pub path_max: f64,
    pub iterations: usize,
    /// `(iteration, J, residual)` at the current peak.
    pub log: Vec<(usize, f64, f64)>,
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn along(u0: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    u0.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

/// Local maximiser of `t ↦ J(u0 + tv)` nearest to `t_guess`, located by
/// bracketing and bisecting the sign of the directional derivative.
/// `None` when the ray has no interior peak.
fn ray_peak<F: Functional + ?Sized>(f: &F, u0: &[f64], v: &[f64], t_guess: f64) -> Option<f64> {
    // Non-finite energy counts as beyond the peak.
    let rising = |t: f64| {
        let w = along(u0, v, t);
        f.energy(&w).is_finite() && dot(&f.gradient(&w), v) > 0.0
    };
    let (mut lo, mut hi);
    if rising(t_guess) {
        lo = t_guess;
        hi = 2.0 * t_guess;
        let mut k = 0;
        while rising(hi) {
            lo = hi;
            hi *= 2.0;
            k += 1;
            if k > 1100 || !hi.is_finite() {
                return None;
            }
        }
    } else {
        hi = t_guess;
        lo = 0.5 * t_guess;
        let floor = t_guess * 1e-12;
        while !rising(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < floor {
                return None;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rising(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Mountain-pass critical point between a local minimiser `u0` and a state
/// `u1` with `J(u1) ≤ J(u0)`, by local minimax over rays from `u0`: each
/// direction `v` is scored by the peak of `J` along `u0 + tv`, and the
/// direction moves down the metric gradient taken at that peak. Newton
/// from the peak finishes the search once it lands on a critical point
/// distinct from `u0` with energy at least `J(u0)`.
pub fn mountain_pass<F: Functional + ?Sized>(
    f: &F,
    u0: &[f64],
    u1: &[f64],
    opts: &MountainPassOptions,
) -> Result<MountainPassOutcome> {
    let (e0, e1) = (f.energy(u0), f.energy(u1));
    let scale = 1.0 + e0.abs().max(e1.abs());
    if !(e1 <= e0 + 1e-12 * scale) {
        return Err(SolverError::Precondition(format!("endpoint energy {e1} exceeds the start energy {e0}")));
    }
    let diff: Vec<f64> = u1.iter().zip(u0).map(|(a, b)| a - b).collect();
    let sep = norm(&diff);
    if !(sep > 0.0) {
        return Err(SolverError::Precondition("endpoints coincide".into()));
    }
    let mut v: Vec<f64> = diff.iter().map(|x| x / sep).collect();
    // Without an interior peak the segment never rises above its ends.
    let collapse = SolverError::Collapse { gap: e1.max(e0) - e0 };
    let mut t = match ray_peak(f, u0, &v, 0.5 * sep) {
        Some(t) if t < sep => t,
        _ => return Err(collapse),
    };
    let mut w = along(u0, &v, t);
    let mut ew = f.energy(&w);
    let path_max = ew;
    let mut log = Vec::new();
    let away_min = 1e-6 * max_abs(&diff);
    let mut s = 1.0;
    for iter in 0..opts.max_iter {
        let g = f.gradient(&w);
        let res = max_abs(&g);
        log.push((iter, ew, res));
        if !(ew - e0 > 0.0) {
            return Err(SolverError::Collapse { gap: ew - e0 });
        }
        let away = |x: &[f64]| max_abs(&x.iter().zip(u0).map(|(a, b)| a - b).collect::<Vec<_>>()) > away_min;
        if res < opts.tol && away(&w) {
            return Ok(MountainPassOutcome { v: w, energy: ew, residual: res, path_max, iterations: iter, log });
        }
        if iter % opts.newton_every == opts.newton_every - 1 {
            let (x, rx) = newton_polish(f, &w, 1e-3 * opts.tol, opts.newton_iter);
            let ex = f.energy(&x);
            if rx < opts.tol && ex >= e0 && away(&x) {
                log.push((iter + 1, ex, rx));
                return Ok(MountainPassOutcome { v: x, energy: ex, residual: rx, path_max, iterations: iter + 1, log });
            }
        }
        let Some(d) = f.metric(&w).solve(&g) else {
            return Err(SolverError::Degenerate("metric is singular at the peak".into()));
        };
        let slope = dot(&g, &d);
        let mut accepted = false;
        for _ in 0..60 {
            let dir: Vec<f64> = v.iter().zip(&d).map(|(a, b)| t * a - s * b).collect();
            let nd = norm(&dir);
            if nd > 0.0 && nd.is_finite() {
                let vt: Vec<f64> = dir.iter().map(|x| x / nd).collect();
                if let Some(tt) = ray_peak(f, u0, &vt, t) {
                    let wt = along(u0, &vt, tt);
                    let et = f.energy(&wt);
                    if et.is_finite() && et <= ew - opts.armijo * s * slope {
                        (v, t, w, ew) = (vt, tt, wt, et);
                        accepted = true;
                        break;
                    }
                }
            }
            s *= 0.5;
        }
        if !accepted {
            let (x, rx) = newton_polish(f, &w, 1e-3 * opts.tol, opts.newton_iter);
            let ex = f.energy(&x);
            if rx < opts.tol && ex >= e0 && away(&x) {
                return Ok(MountainPassOutcome { v: x, energy: ex, residual: rx, path_max, iterations: iter + 1, log });
            }
            return Err(SolverError::Stalled { what: "mountain pass".into(), residual: res });
        }
        s = (2.0 * s).min(1.0);
    }
    Err(SolverError::NoConvergence {
        what: "mountain pass".into(),
        iterations: opts.max_iter,
        residual: max_abs(&f.gradient(&w)),
    })
}

/// Plateau hat: 1 on the middle half, linear down to the boundary.
pub fn plateau_hat(grid: &crate::orlicz::Grid) -> Result<GridFunction> {
    let l = grid.measure();
    Ok(GridFunction::from_fn(*grid, |x| (4.0 * x.min(l - x) / l).min(1.0))?)
}

pub const MAX_UPHILL_DOUBLINGS: usize = 200;

/// `M u₀` for the first dyadic `M ≥ 1` with `J(M u₀) < J(u_λ) − 1`.
pub fn uphill_endpoint(energy: &DiscreteEnergy, j_ref: f64) -> Result<(GridFunction, f64)> {
    let u0 = plateau_hat(energy.grid())?;
    let mut m = 1.0;
    for _ in 0..MAX_UPHILL_DOUBLINGS {
        let cand = u0.scaled(m);
        let j = energy.energy(cand.values());
        if j.is_finite() && j < j_ref - 1.0 {
            return Ok((cand, m));
        }
        m *= 2.0;
    }
    Err(SolverError::Overflow(format!(
        "J(M u0) stayed above J(u_lambda) - 1 up to M = 2^{MAX_UPHILL_DOUBLINGS}; the AR growth is not visible"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tridiag::Tridiagonal;

    struct Poly {
        quartic: bool,
    }

    impl Functional for Poly {
        fn dim(&self) -> usize {
            1
        }
        fn energy(&self, u: &[f64]) -> f64 {
            if self.quartic {
                u[0].powi(4) - 2.0 * u[0].powi(2)
            } else {
                u[0] * u[0]
            }
        }
        fn gradient(&self, u: &[f64]) -> Vec<f64> {
            if self.quartic {
                vec![4.0 * u[0].powi(3) - 4.0 * u[0]]
            } else {
                vec![2.0 * u[0]]
            }
        }
        fn hessian(&self, u: &[f64]) -> Tridiagonal {
            let mut t = Tridiagonal::zeros(1);
            t.diag[0] = if self.quartic { 12.0 * u[0] * u[0] - 4.0 } else { 2.0 };
            t
        }
        fn metric(&self, _: &[f64]) -> Tridiagonal {
            Tridiagonal::identity(1)
        }
    }

    #[test]
    fn double_well_pass_is_at_origin() {
        let out = mountain_pass(&Poly { quartic: true }, &[-1.0], &[1.0], &MountainPassOptions::default()).unwrap();
        assert!(out.v[0].abs() < 1e-8, "{out:?}");
        assert!(out.energy.abs() < 1e-12 && out.residual < 1e-4);
        assert!(out.path_max >= -1.0);
    }

    #[test]
    fn convex_functional_collapses() {
        let err =
            mountain_pass(&Poly { quartic: false }, &[-1.0], &[1.0], &MountainPassOptions::default()).unwrap_err();
        assert!(matches!(err, SolverError::Collapse { .. }), "{err:?}");
    }

    #[test]
    fn uphill_endpoint_rejects_higher_end() {
        let err = mountain_pass(&Poly { quartic: true }, &[-1.0], &[0.5], &MountainPassOptions::default());
        assert!(matches!(err, Err(SolverError::Precondition(_))));
    }
}
