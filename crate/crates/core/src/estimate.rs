//! Constrained hinge-loss minimization and baselines.

use std::fs;
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::measure::Dataset;
use crate::signal_sets::SignalSet;
use crate::Vector;

/// Budget and step schedule for the projected (sub)gradient solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Number of (sub)gradient steps. Zero returns the initializer.
    pub max_iters: usize,
    /// Hinge solver step size at iteration k is `step0 / √(k+1)`.
    pub step0: f64,
    /// Early stop once the best objective improved by less than this over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    /// Scaling parameter: the constraint set is `μK`.
    pub mu: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step0: 1.0,
            tolerance: 1e-7,
            window: 200,
            mu: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::invalid(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.step0.is_finite() && self.step0 > 0.0) {
            return Err(Error::invalid(format!("step0 must be positive, got {}", self.step0)));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::invalid("tolerance must be non-negative"));
        }
        if self.window == 0 {
            return Err(Error::invalid("stagnation window must be at least 1"));
        }
        Ok(())
    }
}

/// Output of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "vector_as_list")]
    pub x_hat: Vector,
    /// Objective value at `x_hat` (hinge risk or squared loss, by solver).
    pub objective: f64,
    /// Best objective seen after each evaluated iterate.
    #[serde(skip)]
    pub trace: Vec<f64>,
    pub iterations_used: usize,
}

impl Estimate {
    /// Writes the objective trace as `iteration,best_objective` rows.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("iteration,best_objective\n");
        for (k, v) in self.trace.iter().enumerate() {
            out.push_str(&format!("{k},{v}\n"));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

mod vector_as_list {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        Ok(Vector::from(Vec::<f64>::deserialize(d)?))
    }
}

fn hinge(v: f64) -> f64 {
    (1.0 - v).max(0.0)
}

/// Margins `y_i ⟨a_i, x⟩`.
fn margins(data: &Dataset, x: &Vector) -> Result<Vector> {
    check_dim(data.dim(), x.len())?;
    Ok(data.a.dot(x) * &data.y)
}

fn risk_from_margins(margins: &Vector) -> f64 {
    margins.iter().map(|&v| hinge(v)).sum::<f64>() / margins.len() as f64
}

/// `(1/m) Σ z_i a_i` with `z_i = −y_i·1[margin_i ≤ 1]`.
fn subgradient_from_margins(data: &Dataset, margins: &Vector) -> Vector {
    let mut g = Array1::zeros(data.dim());
    for ((row, &y), &margin) in data.a.outer_iter().zip(&data.y).zip(margins) {
        if margin <= 1.0 {
            g.scaled_add(-y, &row);
        }
    }
    g / data.samples() as f64
}

/// Empirical hinge risk `R_m(x) = (1/m) Σ max{0, 1 − y_i⟨a_i, x⟩}`.
pub fn hinge_objective(data: &Dataset, x: &Vector) -> Result<f64> {
    Ok(risk_from_margins(&margins(data, x)?))
}

/// A subgradient of [`hinge_objective`] at `x`.
pub fn hinge_subgradient(data: &Dataset, x: &Vector) -> Result<Vector> {
    let m = margins(data, x)?;
    Ok(subgradient_from_margins(data, &m))
}

/// Tracks the best iterate and the stagnation rule shared by both solvers.
struct Progress {
    best_x: Vector,
    best: f64,
    trace: Vec<f64>,
    tolerance: f64,
    window: usize,
}

impl Progress {
    fn new(x: &Vector, cfg: &SolverConfig) -> Self {
        Self {
            best_x: x.clone(),
            best: f64::INFINITY,
            trace: Vec::with_capacity(cfg.max_iters.min(1 << 16) + 1),
            tolerance: cfg.tolerance,
            window: cfg.window,
        }
    }

    fn record(&mut self, iteration: usize, x: &Vector, objective: f64) -> Result<()> {
        if !objective.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                iteration,
                detail: format!(
                    "objective {objective}, iterate norm {}, best objective so far {}",
                    x.dot(x).sqrt(),
                    self.best
                ),
            });
        }
        if objective < self.best {
            self.best = objective;
            self.best_x.assign(x);
        }
        self.trace.push(self.best);
        Ok(())
    }

    fn stagnated(&self) -> bool {
        let len = self.trace.len();
        len > self.window && self.trace[len - 1 - self.window] - self.best < self.tolerance
    }

    fn finish(self, iterations_used: usize) -> Estimate {
        Estimate {
            x_hat: self.best_x,
            objective: self.best,
            trace: self.trace,
            iterations_used,
        }
    }
}

/// Minimizes the empirical hinge risk over `μK` by projected subgradient
/// descent from `x = 0`, returning the best iterate.
pub fn solve_hinge(data: &Dataset, set: &SignalSet, cfg: &SolverConfig) -> Result<Estimate> {
    cfg.validate()?;
    check_dim(set.dim(), data.dim())?;
    let mut x: Vector = Array1::zeros(data.dim());
    let mut progress = Progress::new(&x, cfg);
    let mut k = 0;
    loop {
        let m = margins(data, &x)?;
        progress.record(k, &x, risk_from_margins(&m))?;
        if k == cfg.max_iters || progress.stagnated() {
            break;
        }
        let g = subgradient_from_margins(data, &m);
        let step = cfg.step0 / ((k + 1) as f64).sqrt();
        x.scaled_add(-step, &g);
        x = set.project_scaled(&x, cfg.mu)?;
        k += 1;
    }
    Ok(progress.finish(k))
}

/// Squared loss `(1/m) Σ (⟨a_i, x⟩ − y_i)²`.
pub fn lasso_objective(data: &Dataset, x: &Vector) -> Result<f64> {
    check_dim(data.dim(), x.len())?;
    let r = data.a.dot(x) - &data.y;
    Ok(r.dot(&r) / data.samples() as f64)
}

/// Largest eigenvalue of `(2/m) AᵀA` by 50 power iterations.
fn lasso_lipschitz(data: &Dataset) -> f64 {
    let n = data.dim();
    let scale = 2.0 / data.samples() as f64;
    let mut v: Vector = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut eig = 0.0;
    for _ in 0..50 {
        let w = data.a.t().dot(&data.a.dot(&v)) * scale;
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        eig = v.dot(&w);
        v = w / norm;
    }
    eig
}

/// Generalized Lasso: projected gradient descent on the squared loss over
/// `μK` with fixed step `1/L`.
pub fn solve_lasso(data: &Dataset, set: &SignalSet, cfg: &SolverConfig) -> Result<Estimate> {
    cfg.validate()?;
    check_dim(set.dim(), data.dim())?;
    let lipschitz = lasso_lipschitz(data);
    let step = if lipschitz > 0.0 { 1.0 / lipschitz } else { 0.0 };
    let scale = 2.0 / data.samples() as f64;
    let mut x: Vector = Array1::zeros(data.dim());
    let mut progress = Progress::new(&x, cfg);
    let mut k = 0;
    loop {
        let residual = data.a.dot(&x) - &data.y;
        progress.record(k, &x, residual.dot(&residual) / data.samples() as f64)?;
        if k == cfg.max_iters || progress.stagnated() {
            break;
        }
        let grad = data.a.t().dot(&residual) * scale;
        x.scaled_add(-step, &grad);
        x = set.project_scaled(&x, cfg.mu)?;
        k += 1;
    }
    Ok(progress.finish(k))
}

/// Empirical correlation direction `(1/m) Σ y_i a_i`.
pub fn linear_estimate(data: &Dataset) -> Vector {
    data.a.t().dot(&data.y) / data.samples() as f64
}

/// Direction-recovery error `‖x0 − x̂/‖x̂‖‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedError {
    pub value: f64,
    /// Set when `x̂ = 0`, whose direction is undefined; `value` is then 2.
    pub degenerate: bool,
}

pub fn normalized_error(x0: &Vector, x_hat: &Vector) -> Result<NormalizedError> {
    check_dim(x0.len(), x_hat.len())?;
    let n0 = x0.dot(x0).sqrt();
    if (n0 - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("ground truth must have unit norm, got {n0}")));
    }
    let norm = x_hat.dot(x_hat).sqrt();
    if norm == 0.0 {
        return Ok(NormalizedError {
            value: 2.0,
            degenerate: true,
        });
    }
    let diff = x0 - &(x_hat / norm);
    Ok(NormalizedError {
        value: diff.dot(&diff).sqrt().min(2.0),
        degenerate: false,
    })
}
