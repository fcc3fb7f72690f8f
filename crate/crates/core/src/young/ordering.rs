//! Growth comparison of two Young functions near infinity.

use super::{Result, YoungFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    /// `Ψ₁ ≪ Ψ₂`: `Ψ₁(t)/Ψ₂(ηt) → 0` for every `η > 0`.
    MuchLess,
    /// `Ψ₁(t) ≤ Ψ₂(ct)` for large `t`, with the tested `c`.
    Less {
        c: f64,
    },
    Neither,
}

const TAIL_DECADES: f64 = 4.0;
const TAIL_SAMPLES: usize = 200;
const ETAS: [f64; 3] = [0.1, 1.0, 10.0];
const MAX_DOUBLINGS: i32 = 30;

/// Compares `psi1` against `psi2`; the index shortcut `s_{Ψ₁} < i_{Ψ₂}` is
/// applied first when both carry cached indices.
pub fn ordering(psi1: &YoungFunction, psi2: &YoungFunction) -> Relation {
    ordering_with(psi1, psi2, true)
}

pub fn ordering_with(psi1: &YoungFunction, psi2: &YoungFunction, index_shortcut: bool) -> Relation {
    if index_shortcut {
        if let (Some(a), Some(b)) = (psi1.indices(), psi2.indices()) {
            if a.upper < b.lower {
                return Relation::MuchLess;
            }
        }
    }
    tail_scan(psi1, psi2).unwrap_or(Relation::Neither)
}

fn tail_scan(psi1: &YoungFunction, psi2: &YoungFunction) -> Result<Relation> {
    let (d1, d2) = (psi1.domain(), psi2.domain());
    let hi = 1e8f64.min(d1.hi).min(d2.hi / 10.0);
    let lo = hi / 10f64.powf(TAIL_DECADES);
    if lo < d1.lo.max(d2.lo * 10.0) {
        return Ok(Relation::Neither);
    }
    let ts: Vec<f64> = (0..TAIL_SAMPLES).map(|i| lo * (hi / lo).powf(i as f64 / (TAIL_SAMPLES - 1) as f64)).collect();
    let v1: Vec<f64> = ts.iter().map(|&t| psi1.value(t)).collect::<Result<_>>()?;

    let mut much_less = true;
    for eta in ETAS {
        let r: Vec<f64> = ts.iter().zip(&v1).map(|(&t, &a)| Ok(a / psi2.value(eta * t)?)).collect::<Result<_>>()?;
        let monotone = r.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        if !(monotone && r[r.len() - 1] < 0.1 * r[0]) {
            much_less = false;
            break;
        }
    }
    if much_less {
        return Ok(Relation::MuchLess);
    }
    for j in 0..=MAX_DOUBLINGS {
        let c = 2f64.powi(j);
        if ts.last().unwrap() * c > d2.hi {
            break;
        }
        let r: Vec<f64> = ts.iter().zip(&v1).map(|(&t, &a)| Ok(a / psi2.value(c * t)?)).collect::<Result<_>>()?;
        let bounded = r.iter().all(|&x| x <= 1.0 + 1e-12);
        // a ratio still growing across the window would cross 1 further out
        let per_decade = TAIL_SAMPLES / TAIL_DECADES as usize;
        let first = r[..per_decade].iter().cloned().fold(0.0, f64::max);
        let last = r[r.len() - per_decade..].iter().cloned().fold(0.0, f64::max);
        if bounded && last <= first * (1.0 + 1e-9) {
            return Ok(Relation::Less { c });
        }
    }
    Ok(Relation::Neither)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_much_less_than_cube() {
        let a = YoungFunction::power(1.0, 2.0);
        let b = YoungFunction::power(1.0, 3.0);
        assert_eq!(ordering_with(&a, &b, false), Relation::MuchLess);
        assert_eq!(ordering_with(&b, &a, false), Relation::Neither);
    }

    #[test]
    fn equal_functions_are_less_with_unit_constant() {
        let a = YoungFunction::power(1.0, 3.0);
        assert_eq!(ordering(&a, &a), Relation::Less { c: 1.0 });
    }

    #[test]
    fn scaled_function_needs_a_constant() {
        let a = YoungFunction::power(5.0, 3.0);
        let b = YoungFunction::power(1.0, 3.0);
        assert_eq!(ordering(&a, &b), Relation::Less { c: 2.0 });
    }

    #[test]
    fn index_shortcut_skips_scan() {
        use super::super::IndexPair;
        let a = YoungFunction::power(1.0, 3.0).with_default_indices().unwrap();
        let mut b = YoungFunction::power(1.0, 3.0);
        // planted indices: a scan would answer Less, the shortcut answers first
        b.set_indices(IndexPair { lower: 3.5, upper: 4.0, at_infinity_lower: 3.5, at_infinity_upper: 4.0 });
        assert_eq!(ordering_with(&a, &b, false), Relation::Less { c: 1.0 });
        assert_eq!(ordering(&a, &b), Relation::MuchLess);
    }
}
