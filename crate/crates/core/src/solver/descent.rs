//! Line-search Newton and preconditioned descent for functionals on `ℝⁿ`
//! with tridiagonal second variation.

use crate::tridiag::Tridiagonal;

use super::{Result, SolverError};

/// A smooth functional with a tridiagonal Hessian and an SPD metric used as
/// preconditioner when the Hessian is indefinite.
pub trait Functional {
    fn dim(&self) -> usize;
    /// Non-finite values mark states outside the admissible range.
    fn energy(&self, u: &[f64]) -> f64;
    fn gradient(&self, u: &[f64]) -> Vec<f64>;
    fn hessian(&self, u: &[f64]) -> Tridiagonal;
    fn metric(&self, u: &[f64]) -> Tridiagonal;
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(u: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    u.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Stop when `max |∇J| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub max_halvings: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { tol: 1e-8, max_iter: 2000, armijo: 1e-4, max_halvings: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub u: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `(iteration, J, residual)` per iterate.
    pub log: Vec<(usize, f64, f64)>,
}

pub type Projection<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

/// Minimises `f` from `u0`. Each step tries the Newton direction when the
/// Hessian is positive definite and the metric-preconditioned gradient
/// otherwise, with Armijo backtracking. Near convergence, where energy
/// differences drown in rounding, a Newton step that halves the residual is
/// accepted without the Armijo test. `project` maps trial states back into
/// the admissible set; `observe` sees every accepted iterate.
pub fn minimize<F: Functional + ?Sized>(
    f: &F,
    u0: &[f64],
    opts: &DescentOptions,
    project: Option<Projection<'_>>,
    observe: &mut dyn FnMut(&[f64]),
) -> Result<DescentOutcome> {
    let mut u = match project {
        Some(p) => p(u0),
        None => u0.to_vec(),
    };
    let mut e = f.energy(&u);
    if !e.is_finite() {
        return Err(SolverError::Degenerate("initial state has non-finite energy".into()));
    }
    let mut log = Vec::new();
    observe(&u);
    for iter in 0..=opts.max_iter {
        let g = f.gradient(&u);
        let res = max_abs(&g);
        log.push((iter, e, res));
        if res < opts.tol {
            return Ok(DescentOutcome { u, energy: e, residual: res, iterations: iter, log });
        }
        if iter == opts.max_iter {
            break;
        }
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let hess = f.hessian(&u);
        let newton = if hess.is_spd() { hess.solve(&neg) } else { None };
        let mut accepted = None;
        for (is_newton, dir) in [(true, newton), (false, f.metric(&u).solve(&neg))] {
            let Some(d) = dir else { continue };
            if !(dot(&g, &d) < 0.0) {
                continue;
            }
            let mut t = 1.0;
            for _ in 0..opts.max_halvings {
                let mut trial = axpy(&u, t, &d);
                if let Some(p) = project {
                    trial = p(&trial);
                }
                let et = f.energy(&trial);
                if et.is_finite() {
                    let step: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
                    let armijo = et <= e + opts.armijo * dot(&g, &step);
                    let polish = is_newton && t == 1.0 && max_abs(&f.gradient(&trial)) < 0.5 * res;
                    if armijo || polish {
                        accepted = Some((trial, et));
                        break;
                    }
                }
                t *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }
        match accepted {
            Some((next, en)) => {
                u = next;
                e = en;
                observe(&u);
            }
            None => return Err(SolverError::Stalled { what: "descent".into(), residual: res }),
        }
    }
    let residual = log.last().map(|l| l.2).unwrap_or(f64::NAN);
    Err(SolverError::NoConvergence { what: "descent".into(), iterations: opts.max_iter, residual })
}

/// Newton's method on `∇J = 0` with backtracking on the residual; converges
/// to nondegenerate critical points of any Morse index. Returns the best
/// state reached together with its residual.
pub fn newton_polish<F: Functional + ?Sized>(f: &F, u0: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let mut u = u0.to_vec();
    let mut g = f.gradient(&u);
    let mut res = max_abs(&g);
    for _ in 0..max_iter {
        if !(res >= tol) {
            break;
        }
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let Some(d) = f.hessian(&u).solve(&neg) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = axpy(&u, t, &d);
            let gt = f.gradient(&trial);
            let rt = max_abs(&gt);
            if rt.is_finite() && rt < res * (1.0 - 1e-4 * t) {
                u = trial;
                g = gt;
                res = rt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (u, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J(u) = Σ (u_i − i)⁴/4 + Σ (u_i − u_{i+1})²/2`, strictly convex with a
    /// degenerate quartic part.
    struct Quartic(usize);

    impl Functional for Quartic {
        fn dim(&self) -> usize {
            self.0
        }
        fn energy(&self, u: &[f64]) -> f64 {
            let a: f64 = u.iter().enumerate().map(|(i, x)| (x - i as f64).powi(4) / 4.0).sum();
            let b: f64 = u.windows(2).map(|w| (w[0] - w[1]).powi(2) / 2.0).sum();
            a + b
        }
        fn gradient(&self, u: &[f64]) -> Vec<f64> {
            let n = u.len();
            (0..n)
                .map(|i| {
                    let mut g = (u[i] - i as f64).powi(3);
                    if i > 0 {
                        g += u[i] - u[i - 1];
                    }
                    if i + 1 < n {
                        g += u[i] - u[i + 1];
                    }
                    g
                })
                .collect()
        }
        fn hessian(&self, u: &[f64]) -> Tridiagonal {
            let n = u.len();
            let mut t = Tridiagonal::zeros(n);
            for (i, ui) in u.iter().enumerate() {
                t.diag[i] =
                    3.0 * (ui - i as f64).powi(2) + if i > 0 { 1.0 } else { 0.0 } + if i + 1 < n { 1.0 } else { 0.0 };
            }
            t.lower.iter_mut().for_each(|x| *x = -1.0);
            t.upper.iter_mut().for_each(|x| *x = -1.0);
            t
        }
        fn metric(&self, u: &[f64]) -> Tridiagonal {
            let mut t = self.hessian(u);
            t.diag.iter_mut().for_each(|d| *d += 1.0);
            t
        }
    }

    #[test]
    fn minimises_degenerate_quartic() {
        let f = Quartic(5);
        let out = minimize(&f, &[10.0; 5], &DescentOptions::default(), None, &mut |_| {}).unwrap();
        assert!(out.residual < 1e-8);
        assert!(out.log.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    }

    #[test]
    fn projection_keeps_iterates_in_box() {
        let f = Quartic(3);
        let clip = |u: &[f64]| u.iter().map(|x| x.min(0.5)).collect::<Vec<_>>();
        let mut worst = f64::NEG_INFINITY;
        let opts = DescentOptions { max_iter: 50, ..Default::default() };
        let _ = minimize(&f, &[0.0; 3], &opts, Some(&clip), &mut |u| worst = worst.max(max_abs(u)));
        assert!(worst <= 0.5);
    }

    #[test]
    fn newton_finds_saddle() {
        struct DoubleWell;
        impl Functional for DoubleWell {
            fn dim(&self) -> usize {
                1
            }
            fn energy(&self, u: &[f64]) -> f64 {
                u[0].powi(4) - 2.0 * u[0].powi(2)
            }
            fn gradient(&self, u: &[f64]) -> Vec<f64> {
                vec![4.0 * u[0].powi(3) - 4.0 * u[0]]
            }
            fn hessian(&self, u: &[f64]) -> Tridiagonal {
                let mut t = Tridiagonal::zeros(1);
                t.diag[0] = 12.0 * u[0] * u[0] - 4.0;
                t
            }
            fn metric(&self, _: &[f64]) -> Tridiagonal {
                Tridiagonal::identity(1)
            }
        }
        let (u, res) = newton_polish(&DoubleWell, &[0.3], 1e-14, 50);
        assert!(res < 1e-14 && u[0].abs() < 1e-14);
    }
}
