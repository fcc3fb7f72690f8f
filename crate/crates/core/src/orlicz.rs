//! Discrete Orlicz–Sobolev space on a uniform 1D Dirichlet grid.

use std::io::{self, Write};

use rand::Rng;
use thiserror::Error;

use crate::par::{ordered_sum, Execution};
use crate::young::{YoungError, YoungFunction};

#[derive(Debug, Error)]
pub enum OrliczError {
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid function has {got} values, grid has {expected} interior nodes")]
    Length { expected: usize, got: usize },
    #[error("non-finite nodal value at index {0}")]
    NonFinite(usize),
    #[error("Luxemburg norm bisection failed to bracket (modular {0})")]
    NormBracket(f64),
}

pub type Result<T> = std::result::Result<T, OrliczError>;

/// Uniform grid on `Ω = (0, L)` with `n` interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_interior: usize,
    length: f64,
    h: f64,
}

/// Below this many samples the sum loops run sequentially regardless of the
/// requested execution policy.
pub const PARALLEL_THRESHOLD: usize = 4096;

impl Grid {
    pub fn new(length: f64, n_interior: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || n_interior == 0 {
            return Err(OrliczError::Grid(format!("length {length}, {n_interior} interior nodes")));
        }
        Ok(Grid { n_interior, length, h: length / (n_interior + 1) as f64 })
    }

    /// Grid whose spacing is `h`; `L/h` must be (close to) an integer ≥ 2.
    pub fn with_spacing(length: f64, h: f64) -> Result<Self> {
        let cells = (length / h).round();
        if cells < 2.0 || ((cells * h - length) / length).abs() > 1e-9 {
            return Err(OrliczError::Grid(format!("spacing {h} does not divide length {length}")));
        }
        Self::new(length, cells as usize - 1)
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn n_cells(&self) -> usize {
        self.n_interior + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        self.length
    }

    /// `d_Ω`.
    pub fn diameter(&self) -> f64 {
        self.length
    }

    /// Coordinate of interior node `i` (0-based).
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_interior).map(|i| self.x(i)).collect()
    }

    /// Distance to the boundary, `d(x_i)`.
    pub fn distance(&self, i: usize) -> f64 {
        let x = self.x(i);
        x.min(self.length - x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_interior() {
            return Err(OrliczError::Length { expected: grid.n_interior(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(OrliczError::NonFinite(i));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![0.0; grid.n_interior()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction { grid: self.grid, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `x,u` rows including both boundary zeros.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,u")?;
        writeln!(w, "0,0")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.grid.x(i), v)?;
        }
        writeln!(w, "{},0", self.grid.measure())
    }
}

fn pick(exec: Execution, n: usize) -> Execution {
    if n < PARALLEL_THRESHOLD {
        Execution::Sequential
    } else {
        exec
    }
}

/// `Σ Ψ(|v_i|)·h` over arbitrary samples.
pub fn modular_of(psi: &YoungFunction, values: &[f64], h: f64, exec: Execution) -> Result<f64> {
    let terms = pick(exec, values.len()).try_map(values, |v| psi.value(v.abs()))?;
    Ok(ordered_sum(&terms) * h)
}

/// Nodal modular `Σ_i Ψ(|u_i|)·h`.
pub fn modular(psi: &YoungFunction, u: &GridFunction) -> Result<f64> {
    modular_of(psi, &u.values, u.grid.h, Execution::default())
}

/// Luxemburg norm of arbitrary samples with weight `h`.
pub fn luxemburg_of(psi: &YoungFunction, values: &[f64], h: f64, exec: Execution) -> Result<f64> {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Ok(0.0);
    }
    let m = |lam: f64| -> Result<f64> {
        let scaled: Vec<f64> = values.iter().map(|v| v / lam).collect();
        modular_of(psi, &scaled, h, exec)
    };
    // modular(u/λ) is decreasing in λ; bracket the crossing of 1.
    let (mut lo, mut hi) = (sup, sup);
    let mut guard = 0;
    while m(lo)? < 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(OrliczError::NormBracket(m(lo)?));
        }
    }
    guard = 0;
    while m(hi)? > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(OrliczError::NormBracket(m(hi)?));
        }
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = (lo * hi).sqrt();
        if m(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `inf{λ > 0 : modular(Ψ, u/λ) ≤ 1}`.
pub fn luxemburg_norm(psi: &YoungFunction, u: &GridFunction) -> Result<f64> {
    luxemburg_of(psi, &u.values, u.grid.h, Execution::default())
}

/// Forward differences on the `n + 1` cells, boundary values 0.
pub fn gradient(u: &GridFunction) -> Vec<f64> {
    gradient_of(&u.values, u.grid.h)
}

pub fn gradient_of(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    (0..=n)
        .map(|c| {
            let right = if c < n { values[c] } else { 0.0 };
            let left = if c > 0 { values[c - 1] } else { 0.0 };
            (right - left) / h
        })
        .collect()
}

/// `H(u) = Σ_cells Φ(|∇u|)·h`.
pub fn energy_modular(phi: &YoungFunction, u: &GridFunction) -> Result<f64> {
    modular_of(phi, &gradient(u), u.grid.h, Execution::default())
}

/// Randomised surrogate for the best constant `k` in `‖u‖_Υ ≤ k‖∇u‖_Φ`:
/// the largest observed ratio over smooth random trials, doubled.
pub fn estimate_embedding_constant<R: Rng>(
    phi: &YoungFunction,
    target: &YoungFunction,
    grid: &Grid,
    n_trials: usize,
    rng: &mut R,
) -> Result<f64> {
    estimate_embedding_constant_with(phi, target, grid, n_trials, rng, Execution::default())
}

pub fn estimate_embedding_constant_with<R: Rng>(
    phi: &YoungFunction,
    target: &YoungFunction,
    grid: &Grid,
    n_trials: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<f64> {
    let trials: Vec<Vec<f64>> = (0..n_trials).map(|k| random_trial(grid, k, rng)).collect();
    let ratios = exec.try_map(&trials, |vals| -> Result<f64> {
        if vals.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let num = luxemburg_of(target, vals, grid.h(), Execution::Sequential)?;
        let den = luxemburg_of(phi, &gradient_of(vals, grid.h()), grid.h(), Execution::Sequential)?;
        Ok(num / den)
    })?;
    Ok(2.0 * ratios.into_iter().fold(0.0, f64::max))
}

/// Alternates short sine series and plateau bumps with log-uniform amplitude.
fn random_trial<R: Rng>(grid: &Grid, k: usize, rng: &mut R) -> Vec<f64> {
    let l = grid.measure();
    let amp = 10f64.powf(rng.gen_range(-2.0..2.0));
    if k % 3 == 2 {
        let c = rng.gen_range(0.2..0.8) * l;
        let w = rng.gen_range(0.1..0.45) * l;
        grid.nodes()
            .iter()
            .map(|&x| {
                let s = ((x - c).abs() / w).min(1.0);
                let lim = x.min(l - x) / w;
                amp * (1.0 - s * s).max(0.0).min(lim)
            })
            .collect()
    } else {
        let modes = 1 + k % 4;
        let coef: Vec<f64> =
            (1..=modes).map(|j| if j == 1 { 1.0 } else { rng.gen_range(-1.0..1.0) / (j * j) as f64 }).collect();
        grid.nodes()
            .iter()
            .map(|&x| {
                amp * coef
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * ((j + 1) as f64 * std::f64::consts::PI * x / l).sin())
                    .sum::<f64>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{zeta_lower, zeta_upper};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize) -> Grid {
        Grid::new(1.0, n).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::with_spacing(2.0, 0.25).unwrap();
        assert_eq!(g.n_interior(), 7);
        assert!((g.h() * g.n_cells() as f64 - 2.0).abs() < 1e-15);
        assert!((0..7).all(|i| g.distance(i) > 0.0));
        assert!(Grid::with_spacing(1.0, 0.3).is_err());
    }

    #[test]
    fn zero_function() {
        let psi = YoungFunction::power(1.0, 2.0);
        let u = GridFunction::zeros(unit(9));
        assert_eq!(modular(&psi, &u).unwrap(), 0.0);
        assert_eq!(luxemburg_norm(&psi, &u).unwrap(), 0.0);
        assert!(gradient(&u).iter().all(|g| *g == 0.0));
        assert_eq!(energy_modular(&psi, &u).unwrap(), 0.0);
    }

    #[test]
    fn unit_function_modular_tends_to_one() {
        let psi = YoungFunction::power(1.0, 2.0);
        let u = GridFunction::from_fn(unit(999), |_| 1.0).unwrap();
        assert!((modular(&psi, &u).unwrap() - 0.999).abs() < 1e-12);
    }

    #[test]
    fn power_norm_is_lp_norm() {
        let p = 3.0;
        let psi = YoungFunction::power(1.0, p);
        let u = GridFunction::from_fn(unit(50), |x| (7.0 * x).sin() + 0.3).unwrap();
        let lp = u.values().iter().map(|v| v.abs().powf(p)).sum::<f64>() * u.grid().h();
        let n = luxemburg_norm(&psi, &u).unwrap();
        assert!((n - lp.powf(1.0 / p)).abs() < 1e-10 * n);
        let m = modular(&psi, &u.scaled(1.0 / n)).unwrap();
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hat_gradient_and_energy() {
        let g = unit(127);
        let u = GridFunction::from_fn(g, |x| 1.0 - (2.0 * x - 1.0).abs()).unwrap();
        let grad = gradient(&u);
        assert!(grad.iter().all(|s| (s.abs() - 2.0).abs() < 1e-9));
        assert!(grad.iter().sum::<f64>().abs() * g.h() < 1e-12);
        let h = energy_modular(&YoungFunction::power(0.5, 2.0), &u).unwrap();
        assert!((h - 2.0).abs() < 1e-9);
    }

    #[test]
    fn modular_norm_sandwich() {
        let psi = YoungFunction::power(1.0, 2.0).with_default_indices().unwrap();
        let psi2 = YoungFunction::new(
            crate::young::PowerSum::new(vec![(1.0, 2.0), (1.0, 3.0)]),
            crate::young::EvalDomain::DEFAULT,
        )
        .with_default_indices()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [&psi, &psi2] {
            for _ in 0..30 {
                let a = 10f64.powf(rng.gen_range(-2.0..2.0));
                let u = GridFunction::from_fn(unit(63), |x| a * (3.0 * x).sin()).unwrap();
                let n = luxemburg_norm(f, &u).unwrap();
                let m = modular(f, &u).unwrap();
                assert!(zeta_lower(f, n).unwrap() <= m * (1.0 + 1e-8));
                assert!(m <= zeta_upper(f, n).unwrap() * (1.0 + 1e-8));
            }
        }
    }

    #[test]
    fn csv_has_boundary_rows() {
        let u = GridFunction::from_fn(unit(3), |x| x).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "x,u\n0,0\n0.25,0.25\n0.5,0.5\n0.75,0.75\n1,0\n");
    }

    #[test]
    fn embedding_constant_for_quadratics() {
        let psi = YoungFunction::power(1.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = estimate_embedding_constant(&psi, &psi, &unit(127), 60, &mut rng).unwrap();
        assert!((0.25..=0.7).contains(&k), "{k}");
    }
}
