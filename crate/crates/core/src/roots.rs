//! Scalar root finding and one-dimensional maximisation.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("could not bracket a root of the monotone map for target {target} within [{lo}, {hi}]")]
    Bracket { target: f64, lo: f64, hi: f64 },
    #[error("non-finite function value at {x}")]
    NonFinite { x: f64 },
}

/// Relative tolerance used by every monotone inversion in the crate.
pub const INVERSION_RTOL: f64 = 1e-10;

/// Solves `f(x) = target` for an increasing `f` on `(lo, hi)` with `0 < lo`.
///
/// Starts from `guess`, expands the bracket by doubling/halving, then runs
/// bisection in `ln x` polished with secant steps (Illinois variant).
pub fn invert_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    guess: f64,
    lo: f64,
    hi: f64,
    rtol: f64,
) -> Result<f64, RootError> {
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            Err(RootError::NonFinite { x })
        } else {
            Ok(v - target)
        }
    };
    let mut a = guess.clamp(lo, hi);
    let fa0 = eval(a)?;
    if fa0 == 0.0 {
        return Ok(a);
    }
    let mut b = a;
    let (mut fa, mut fb);
    if fa0 < 0.0 {
        fa = fa0;
        loop {
            if b >= hi {
                return Err(RootError::Bracket { target, lo, hi });
            }
            b = (b * 2.0).min(hi);
            fb = eval(b)?;
            if fb >= 0.0 {
                break;
            }
            a = b;
            fa = fb;
        }
    } else {
        fb = fa0;
        loop {
            if a <= lo {
                return Err(RootError::Bracket { target, lo, hi });
            }
            a = (a * 0.5).max(lo);
            fa = eval(a)?;
            if fa <= 0.0 {
                break;
            }
            b = a;
            fb = fa;
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    // Illinois regula falsi in log space, with bisection safeguard.
    let (mut la, mut lb) = (a.ln(), b.ln());
    let mut side = 0i8;
    for _ in 0..300 {
        if (lb - la).abs() <= rtol {
            break;
        }
        let mut lc = (la * fb - lb * fa) / (fb - fa);
        if !lc.is_finite() || lc <= la || lc >= lb {
            lc = 0.5 * (la + lb);
        }
        let fc = eval(lc.exp())?;
        if fc == 0.0 {
            return Ok(lc.exp());
        }
        if fc < 0.0 {
            la = lc;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            lb = lc;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok((0.5 * (la + lb)).exp())
}

/// Golden-section search for the maximiser of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimiser of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    golden_max(|x| -f(x), a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic() {
        let x = invert_increasing(|x| x * x * x, 27.0, 1.0, 1e-12, 1e12, 1e-12).unwrap();
        assert!((x - 3.0).abs() < 1e-10);
    }

    #[test]
    fn inverts_from_above() {
        let x = invert_increasing(|x: f64| x.ln(), -5.0, 100.0, 1e-12, 1e12, 1e-13).unwrap();
        assert!((x - (-5f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn bracket_failure_is_reported() {
        let r = invert_increasing(|x: f64| x.min(2.0), 5.0, 1.0, 1e-3, 1e3, 1e-10);
        assert!(matches!(r, Err(RootError::Bracket { .. })));
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let x = golden_max(|x| -(x - 1.25) * (x - 1.25), -3.0, 4.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-8);
    }
}
