//! Reproducible Monte Carlo experiments over sample sizes and scalings.
//!
//! Every trial is a pure function of `(base_seed, m, trial)`, so sweeps give
//! identical records whether trials run sequentially or on a worker pool.

mod fit;
mod output;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{normalized_error, solve_hinge, SolverConfig};
use crate::measure::{generate_dataset, Quantizer};
use crate::par::Execution;
use crate::rng;
use crate::signal_sets::{sample_signal, SignalKind, SignalSet};

pub use fit::{bootstrap_slope_ci, increases, log_log_slope, median, quantile_sorted};
pub use output::{emit, parse, read_spec};

/// Bootstrap resamples behind [`SlopeFit`] intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

fn default_mu_constant() -> f64 {
    2.0
}

/// A sweep over sample sizes (or scalings) with a fixed model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: usize,
    pub s: usize,
    pub set: SignalSet,
    pub quantizer: Quantizer,
    /// Ground-truth generator; exactly `s`-sparse when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalKind>,
    #[serde(default)]
    pub m_grid: Vec<usize>,
    pub trials_per_m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_grid: Option<Vec<f64>>,
    /// `c` in `m = ⌈c·μ⁴·s·ln n⌉` for scaling sweeps.
    #[serde(default = "default_mu_constant")]
    pub mu_sweep_constant: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    pub base_seed: u64,
    /// Wall-clock times make records.csv differ between runs, so they are
    /// written as 0 unless requested.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentSpec {
    pub fn signal_kind(&self) -> SignalKind {
        self.signal.clone().unwrap_or(SignalKind::ExactSparse { s: self.s })
    }

    /// Checks everything except the grids.
    fn validate_model(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::invalid(format!("s must satisfy 1 <= s <= n, got s={}", self.s)));
        }
        self.set.validate()?;
        if self.set.dim() != self.n {
            return Err(Error::invalid(format!(
                "signal set lives in dimension {}, spec has n={}",
                self.set.dim(),
                self.n
            )));
        }
        self.quantizer.validate()?;
        self.solver.validate()?;
        if self.trials_per_m == 0 {
            return Err(Error::invalid("trials_per_m must be at least 1"));
        }
        // Surface malformed signal descriptors before any trial runs.
        sample_signal(&self.signal_kind(), self.n, self.base_seed)?;
        Ok(())
    }

    /// Validation for [`run_sweep`].
    pub fn validate(&self) -> Result<()> {
        self.validate_model()?;
        if self.m_grid.is_empty() {
            return Err(Error::invalid("m_grid must not be empty"));
        }
        if self.m_grid[0] == 0 {
            return Err(Error::invalid("m_grid entries must be positive"));
        }
        if self.m_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("m_grid must be strictly increasing"));
        }
        Ok(())
    }

    /// Validation for [`run_mu_sweep`].
    pub fn validate_mu_sweep(&self) -> Result<()> {
        self.validate_model()?;
        if !matches!(self.set, SignalSet::ScaledL1Ball { .. }) {
            return Err(Error::invalid("scaling sweeps require a scaled_l1_ball signal set"));
        }
        let grid = self.mu_grid.as_deref().unwrap_or_default();
        if grid.is_empty() {
            return Err(Error::invalid("mu_grid must not be empty for a scaling sweep"));
        }
        if grid.iter().any(|&mu| !(mu.is_finite() && mu > 0.0)) {
            return Err(Error::invalid("mu_grid entries must be positive and finite"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("mu_grid must be strictly increasing"));
        }
        if !(self.mu_sweep_constant.is_finite() && self.mu_sweep_constant > 0.0) {
            return Err(Error::invalid("mu_sweep_constant must be positive"));
        }
        Ok(())
    }

    /// Sample size used for scaling `mu`: `⌈c·μ⁴·s·ln n⌉` (at least 1).
    pub fn samples_for_mu(&self, mu: f64) -> usize {
        let m = self.mu_sweep_constant * mu.powi(4) * self.s as f64 * (self.n as f64).ln();
        (m.ceil() as usize).max(1)
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub error: f64,
    pub objective: f64,
    pub wall_time_ms: f64,
}

/// Per-grid-point summary of the trial errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub m: usize,
    pub mu: f64,
    pub trials: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Least-squares slope of log(median error) against log(m) or log(μ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub regressor: Regressor,
    pub slope: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    M,
    Mu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    pub fit: SlopeFit,
}

impl SweepResult {
    pub fn medians(&self) -> Vec<f64> {
        self.summary.iter().map(|r| r.median).collect()
    }

    /// Summarizes `records` (already ordered by grid point, then trial) and
    /// fits the slope against `regressor`.
    pub fn from_records(records: Vec<TrialRecord>, mus: &[(usize, f64)], regressor: Regressor, seed: u64) -> Self {
        let mut summary = Vec::with_capacity(mus.len());
        let mut groups = Vec::with_capacity(mus.len());
        for &(m, mu) in mus {
            let mut errors: Vec<f64> = records.iter().filter(|r| r.m == m).map(|r| r.error).collect();
            errors.sort_by(f64::total_cmp);
            if errors.is_empty() {
                continue;
            }
            summary.push(SummaryRow {
                m,
                mu,
                trials: errors.len(),
                median: quantile_sorted(&errors, 0.5),
                q1: quantile_sorted(&errors, 0.25),
                q3: quantile_sorted(&errors, 0.75),
            });
            groups.push(errors);
        }
        let x: Vec<f64> = summary
            .iter()
            .map(|r| match regressor {
                Regressor::M => r.m as f64,
                Regressor::Mu => r.mu,
            })
            .collect();
        let slope = log_log_slope(&x, &summary.iter().map(|r| r.median).collect::<Vec<_>>());
        let ci = slope.and_then(|_| bootstrap_slope_ci(&x, &groups, BOOTSTRAP_RESAMPLES, seed));
        SweepResult {
            records,
            summary,
            fit: SlopeFit {
                regressor,
                slope,
                ci_low: ci.map(|c| c.0),
                ci_high: ci.map(|c| c.1),
                resamples: BOOTSTRAP_RESAMPLES,
            },
        }
    }
}

/// Seed of trial `trial` at sample size `m`.
pub fn trial_seed(base_seed: u64, m: usize, trial: usize) -> u64 {
    rng::derive_seed(base_seed, &[m as u64, trial as u64])
}

/// Draws a fresh signal and dataset, solves with the spec's solver settings
/// and records the normalized error.
pub fn run_trial(spec: &ExperimentSpec, m: usize, trial: usize) -> Result<TrialRecord> {
    run_trial_scaled(spec, m, trial, spec.solver.mu)
}

fn run_trial_scaled(spec: &ExperimentSpec, m: usize, trial: usize, mu: f64) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(spec.base_seed, m, trial);
    let x0 = sample_signal(&spec.signal_kind(), spec.n, seed)?;
    let data = generate_dataset(&x0, m, &spec.quantizer, seed)?;
    let cfg = SolverConfig { mu, ..spec.solver };
    let est = solve_hinge(&data, &spec.set, &cfg)?;
    let error = normalized_error(&x0, &est.x_hat)?.value;
    let wall_time_ms = if spec.record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(TrialRecord {
        m,
        trial,
        seed,
        error,
        objective: est.objective,
        wall_time_ms,
    })
}

fn run_grid(spec: &ExperimentSpec, grid: &[(usize, f64)], exec: Execution) -> Result<Vec<TrialRecord>> {
    let trials = spec.trials_per_m;
    exec.map_indexed(grid.len() * trials, |i| {
        let (m, mu) = grid[i / trials];
        run_trial_scaled(spec, m, i % trials, mu)
    })
    .into_iter()
    .collect()
}

fn bootstrap_seed(spec: &ExperimentSpec) -> u64 {
    rng::derive_seed(spec.base_seed, &[u64::MAX])
}

/// All trials over `m_grid`, summarized and fitted against `m`.
pub fn run_sweep(spec: &ExperimentSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let grid: Vec<(usize, f64)> = spec.m_grid.iter().map(|&m| (m, spec.solver.mu)).collect();
    let records = run_grid(spec, &grid, exec)?;
    Ok(SweepResult::from_records(
        records,
        &grid,
        Regressor::M,
        bootstrap_seed(spec),
    ))
}

/// For each `μ` in `mu_grid`, runs trials over `μK` at `m = ⌈c·μ⁴·s·ln n⌉`
/// and fits the error against `μ`.
pub fn run_mu_sweep(spec: &ExperimentSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate_mu_sweep()?;
    let grid: Vec<(usize, f64)> = spec
        .mu_grid
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|&mu| (spec.samples_for_mu(mu), mu))
        .collect();
    if grid.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid(
            "mu_grid is too fine: two scalings map to the same sample size",
        ));
    }
    let records = run_grid(spec, &grid, exec)?;
    Ok(SweepResult::from_records(
        records,
        &grid,
        Regressor::Mu,
        bootstrap_seed(spec),
    ))
}
