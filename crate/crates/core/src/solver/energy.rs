//! Truncated reaction and the discrete energy `J_λ = H − λK`.

use crate::hypotheses::{Operator, OperatorKind, Reaction};
use crate::orlicz::{gradient_of, Grid, GridFunction, PARALLEL_THRESHOLD};
use crate::par::{ordered_sum, Execution};
use crate::tridiag::Tridiagonal;

use super::descent::{max_abs, Functional};
use super::Result;

/// `f̂(x, s) = f(x, u̲(x))` for `|s| ≤ u̲(x)` and `f(x, |s|)` above, stored
/// per interior node.
#[derive(Debug, Clone)]
pub struct Truncation {
    reaction: Reaction,
    x: Vec<f64>,
    under: Vec<f64>,
    f_under: Vec<f64>,
    p_under: Vec<f64>,
}

impl Truncation {
    pub fn new(reaction: &Reaction, under: &GridFunction) -> Self {
        let x = under.grid().nodes();
        let u = under.values().to_vec();
        let f_under = x.iter().zip(&u).map(|(&x, &s)| reaction.value(x, s)).collect();
        let p_under = x.iter().zip(&u).map(|(&x, &s)| reaction.primitive(x, s)).collect();
        Truncation { reaction: reaction.clone(), x, under: u, f_under, p_under }
    }

    pub fn under(&self) -> &[f64] {
        &self.under
    }

    pub fn reaction(&self) -> &Reaction {
        &self.reaction
    }

    /// `f̂(x_i, s)`.
    pub fn f_hat(&self, i: usize, s: f64) -> f64 {
        let a = s.abs();
        if a <= self.under[i] {
            self.f_under[i]
        } else {
            self.reaction.value(self.x[i], a)
        }
    }

    /// `∂f̂/∂s (x_i, s)`; zero on the frozen part.
    pub fn f_hat_ds(&self, i: usize, s: f64) -> f64 {
        let a = s.abs();
        if a <= self.under[i] {
            0.0
        } else {
            s.signum() * self.reaction.derivative(self.x[i], a)
        }
    }

    /// `F̂(x_i, s) = ∫₀^s f̂(x_i, t) dt`: linear below `u̲`, the exact
    /// primitive of `f` above it. Odd in `s`.
    pub fn big_f_hat(&self, i: usize, s: f64) -> f64 {
        let a = s.abs();
        let v = if a <= self.under[i] {
            self.f_under[i] * a
        } else {
            self.f_under[i] * self.under[i] + self.reaction.primitive(self.x[i], a) - self.p_under[i]
        };
        s.signum() * v
    }
}

/// Right-hand side of the discrete problem.
#[derive(Debug, Clone)]
pub enum Source {
    /// Constant load `c`, the torsion problem.
    Constant(f64),
    Truncated(Box<Truncation>),
}

/// `J(u) = Σ_cells Φ(|∇u|)h − λ Σ_nodes F̂(x_i, u_i)h` with zero Dirichlet data.
#[derive(Debug, Clone)]
pub struct DiscreteEnergy {
    operator: Operator,
    grid: Grid,
    lambda: f64,
    source: Source,
}

/// Snapshot of `J_λ` and its nodal gradient at a state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyState {
    pub u: GridFunction,
    pub h_value: f64,
    pub k_value: f64,
    pub j_value: f64,
    pub gradient: Vec<f64>,
    /// `max_i |∇J_i|`, the weak residual against hat test functions.
    pub residual: f64,
}

impl DiscreteEnergy {
    pub fn torsion(operator: &Operator, grid: Grid, c: f64) -> Self {
        DiscreteEnergy { operator: operator.clone(), grid, lambda: 1.0, source: Source::Constant(c) }
    }

    pub fn truncated(operator: &Operator, grid: Grid, lambda: f64, truncation: Truncation) -> Self {
        DiscreteEnergy { operator: operator.clone(), grid, lambda, source: Source::Truncated(Box::new(truncation)) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    fn exec(&self) -> Execution {
        if self.grid.n_cells() >= PARALLEL_THRESHOLD {
            Execution::default()
        } else {
            Execution::Sequential
        }
    }

    /// `Φ(t)`, falling back to the raw generator below the trusted domain
    /// and to `+∞` above it.
    fn phi_value(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        if let OperatorKind::Power { p } = self.operator.kind() {
            return t.powf(p) / p;
        }
        let phi = self.operator.phi();
        let d = phi.domain();
        if t < d.lo {
            phi.generator().value(t).unwrap_or(f64::NAN)
        } else {
            phi.value(t).unwrap_or(f64::INFINITY)
        }
    }

    fn source_value(&self, i: usize, s: f64) -> f64 {
        match &self.source {
            Source::Constant(c) => *c,
            Source::Truncated(t) => t.f_hat(i, s),
        }
    }

    fn source_primitive(&self, i: usize, s: f64) -> f64 {
        match &self.source {
            Source::Constant(c) => c * s,
            Source::Truncated(t) => t.big_f_hat(i, s),
        }
    }

    fn source_ds(&self, i: usize, s: f64) -> f64 {
        match &self.source {
            Source::Constant(_) => 0.0,
            Source::Truncated(t) => t.f_hat_ds(i, s),
        }
    }

    /// `H(u) = Σ Φ(|∇u|)h`.
    pub fn h_value(&self, u: &[f64]) -> f64 {
        let h = self.grid.h();
        let g = gradient_of(u, h);
        let terms = self.exec().map(&g, |&g| self.phi_value(g.abs()));
        ordered_sum(&terms) * h
    }

    /// `K(u) = Σ F̂(x_i, u_i)h`.
    pub fn k_value(&self, u: &[f64]) -> f64 {
        let terms = self.exec().map_range(u.len(), |i| self.source_primitive(i, u[i]));
        ordered_sum(&terms) * self.grid.h()
    }

    /// `Σ φ(|∇u|)|∇u|h`, compared against `i_Φ H(u)` by the coercivity check.
    pub fn flux_work(&self, u: &[f64]) -> f64 {
        let h = self.grid.h();
        let g = gradient_of(u, h);
        let terms = self.exec().map(&g, |&g| self.operator.flux(g) * g);
        ordered_sum(&terms) * h
    }

    pub fn state(&self, u: &GridFunction) -> EnergyState {
        let v = u.values();
        let h_value = self.h_value(v);
        let k_value = self.k_value(v);
        let gradient = self.gradient(v);
        let residual = max_abs(&gradient);
        EnergyState { u: u.clone(), h_value, k_value, j_value: h_value - self.lambda * k_value, gradient, residual }
    }

    pub fn state_of(&self, values: Vec<f64>) -> Result<EnergyState> {
        Ok(self.state(&GridFunction::new(self.grid, values)?))
    }

    /// Cell weights `φ'(|∇u|)/h` of the operator linearisation.
    fn cell_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let h = self.grid.h();
        gradient_of(u, h).iter().map(|&g| self.operator.flux_derivative(g) / h).collect()
    }

    fn assemble(&self, w: &[f64], n: usize) -> Tridiagonal {
        let mut t = Tridiagonal::zeros(n);
        for i in 0..n {
            t.diag[i] = w[i] + w[i + 1];
        }
        for i in 0..n.saturating_sub(1) {
            t.upper[i] = -w[i + 1];
            t.lower[i] = -w[i + 1];
        }
        t
    }
}

impl Functional for DiscreteEnergy {
    fn dim(&self) -> usize {
        self.grid.n_interior()
    }

    fn energy(&self, u: &[f64]) -> f64 {
        self.h_value(u) - self.lambda * self.k_value(u)
    }

    /// `∇J_i = φ(g_i) − φ(g_{i+1}) − λ f̂(x_i, u_i)h`, with cell `i` to the
    /// left of node `i`.
    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let h = self.grid.h();
        let flux: Vec<f64> = gradient_of(u, h).iter().map(|&g| self.operator.flux(g)).collect();
        self.exec().map_range(u.len(), |i| flux[i] - flux[i + 1] - self.lambda * self.source_value(i, u[i]) * h)
    }

    fn hessian(&self, u: &[f64]) -> Tridiagonal {
        let h = self.grid.h();
        let mut t = self.assemble(&self.cell_stiffness(u), u.len());
        for (i, d) in t.diag.iter_mut().enumerate() {
            *d -= self.lambda * self.source_ds(i, u[i]) * h;
        }
        t
    }

    /// Operator linearisation with stiffness floored at `10⁻⁸` of its
    /// largest cell, so degenerate operators stay invertible.
    fn metric(&self, u: &[f64]) -> Tridiagonal {
        let mut w = self.cell_stiffness(u);
        let top = w.iter().fold(0.0f64, |m, x| m.max(*x));
        let floor = (1e-8 * top).max(1e-12 / self.grid.h());
        w.iter_mut().for_each(|x| *x = x.max(floor));
        self.assemble(&w, u.len())
    }
}

/// Outcome of the weak-form check of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    /// `u ≥ u̲ − 10⁻¹⁰` at every node; true when no sub-solution is given.
    pub above_sub: bool,
    pub positive: bool,
}

pub fn verify_solution(energy: &DiscreteEnergy, u: &GridFunction, under: Option<&[f64]>) -> ResidualReport {
    let v = u.values();
    let residual = max_abs(&energy.gradient(v));
    let above_sub = under.is_none_or(|w| v.iter().zip(w).all(|(a, b)| *a >= b - 1e-10));
    ResidualReport { residual, above_sub, positive: v.iter().all(|x| *x > 0.0) }
}
