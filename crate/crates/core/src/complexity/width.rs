use ndarray::Array1;
use rand::Rng;
use rand_distr::StandardNormal;

use super::montecarlo::mc_estimate;
use super::WidthEstimate;
use crate::error::{check_dim, Error, Result};
use crate::par::Execution;
use crate::signal_sets::{dykstra, project_l2_ball, SignalSet};
use crate::Vector;

fn gaussian(n: usize, rng: &mut impl Rng) -> Vector {
    Array1::from_shape_simple_fn(n, || rng.sample(StandardNormal))
}

/// `w(K) = E sup_{x ∈ K} ⟨g, x⟩` by Monte Carlo over `g ~ N(0, Iₙ)`.
pub fn gaussian_width(set: &SignalSet, samples: usize, seed: u64) -> Result<WidthEstimate> {
    gaussian_width_with(set, samples, seed, Execution::default())
}

pub fn gaussian_width_with(set: &SignalSet, samples: usize, seed: u64, exec: Execution) -> Result<WidthEstimate> {
    if samples < 2 {
        return Err(Error::invalid("width estimation needs at least 2 samples"));
    }
    let n = set.dim();
    let stats = mc_estimate(samples, seed, exec, |rng| set.support(&gaussian(n, rng)))?;
    Ok(WidthEstimate {
        mean: stats.mean,
        std_error: stats.std_error(),
        samples,
        lower_bound: false,
    })
}

/// Inner-maximization budget of [`local_width`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWidthConfig {
    /// Step multipliers (in units of `t/‖g‖`), one ascent run each.
    pub restarts: [f64; 3],
    pub iterations: usize,
    pub dykstra_iters: usize,
    pub dykstra_tol: f64,
}

impl Default for LocalWidthConfig {
    fn default() -> Self {
        Self {
            restarts: [1.0, 4.0, 0.25],
            iterations: 500,
            dykstra_iters: 2000,
            dykstra_tol: 1e-10,
        }
    }
}

/// Local width `w_t(K − x0) = E sup {⟨g, h⟩ : h ∈ (K − x0) ∩ t·B2}`.
///
/// The inner supremum is approached by projected ascent onto
/// `K ∩ B(x0, t)` (Dykstra), so the estimate is a lower bound.
pub fn local_width(set: &SignalSet, anchor: &Vector, t: f64, samples: usize, seed: u64) -> Result<WidthEstimate> {
    local_width_with(
        set,
        anchor,
        t,
        samples,
        seed,
        &LocalWidthConfig::default(),
        Execution::default(),
    )
}

pub fn local_width_with(
    set: &SignalSet,
    anchor: &Vector,
    t: f64,
    samples: usize,
    seed: u64,
    cfg: &LocalWidthConfig,
    exec: Execution,
) -> Result<WidthEstimate> {
    check_dim(set.dim(), anchor.len())?;
    if samples < 2 {
        return Err(Error::invalid("width estimation needs at least 2 samples"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("scale t must be positive and finite, got {t}")));
    }
    let residual = set.membership_residual(anchor)?;
    if residual > 1e-9 {
        return Err(Error::invalid(format!(
            "anchor lies outside the set (residual {residual:e})"
        )));
    }
    // Reject sets without a projection up front rather than per sample.
    set.project(anchor)?;

    let n = set.dim();
    let stats = mc_estimate(samples, seed, exec, |rng| {
        let g = gaussian(n, rng);
        Ok(local_sup(set, anchor, t, &g, cfg))
    })?;
    Ok(WidthEstimate {
        mean: stats.mean,
        std_error: stats.std_error(),
        samples,
        lower_bound: true,
    })
}

fn local_sup(set: &SignalSet, anchor: &Vector, t: f64, g: &Vector, cfg: &LocalWidthConfig) -> f64 {
    let g_norm = g.dot(g).sqrt();
    if g_norm == 0.0 {
        return 0.0;
    }
    let onto_set = |x: &Vector| set.project(x).expect("projection validated on the anchor");
    let onto_ball = |x: &Vector| anchor + &project_l2_ball(&(x - anchor), t);
    let project = |x: &Vector| -> Option<Vector> {
        let out = dykstra(x, &[&onto_set, &onto_ball], cfg.dykstra_iters, cfg.dykstra_tol);
        let h = &out.point - anchor;
        let feasible =
            h.dot(&h).sqrt() <= t * (1.0 + 1e-9) && set.membership_residual(&out.point).is_ok_and(|r| r <= 1e-9);
        feasible.then_some(out.point)
    };
    let value = |x: &Vector| g.dot(&(x - anchor));

    let mut best = 0.0f64;
    for &mult in &cfg.restarts {
        let step = mult * t / g_norm;
        let mut x = anchor.clone();
        for _ in 0..cfg.iterations {
            let Some(next) = project(&(&x + &(g * step))) else {
                break;
            };
            let moved = (&next - &x).dot(&(&next - &x)).sqrt();
            x = next;
            best = best.max(value(&x));
            if moved <= 1e-12 * t {
                break;
            }
        }
    }
    best
}

/// Effective dimension `w² / scale²`, with the diameter (global) or the
/// localization scale `t` (local) as `scale`.
pub fn effective_dim(width: &WidthEstimate, scale: f64) -> f64 {
    width.mean * width.mean / (scale * scale)
}
