use std::f64::consts::{FRAC_2_PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::montecarlo::{mc_estimate, McStats, MC_CHUNK};
use super::ParamEstimate;
use crate::error::{Error, Result};
use crate::measure::{sign, QuantizeFn, Quantizer};
use crate::par::Execution;
use crate::quadrature::{golden_section_min, GaussLegendre, DEFAULT_POINTS};
use crate::rng;

/// How [`lambda_of`] evaluates `λ_f = E[f(g)g]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum LambdaMethod {
    /// Exact for Sign and BitFlip; AdditiveGaussian falls back to quadrature.
    ClosedForm,
    Quadrature {
        points: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

/// `E[f(g) sign(g) | |g| = x]`.
fn conditional_correlation(q: &Quantizer, x: f64) -> f64 {
    match *q {
        Quantizer::Sign => 1.0,
        Quantizer::BitFlip { p } => 2.0 * p - 1.0,
        Quantizer::AdditiveGaussian { sigma: 0.0 } => 1.0,
        Quantizer::AdditiveGaussian { sigma } => libm::erf(x / (SQRT_2 * sigma)),
    }
}

fn lambda_quadrature(q: &Quantizer, quad: &GaussLegendre) -> f64 {
    quad.half_normal_expectation(&[], |x| x * conditional_correlation(q, x))
}

pub fn lambda_of(q: &Quantizer, method: LambdaMethod) -> Result<ParamEstimate> {
    q.validate()?;
    let exact = |value: f64, method: &str| ParamEstimate {
        value,
        std_error: 0.0,
        method: method.to_string(),
        seed: None,
    };
    match method {
        LambdaMethod::ClosedForm => match *q {
            Quantizer::Sign => Ok(exact(FRAC_2_PI.sqrt(), "closed_form")),
            Quantizer::BitFlip { p } => Ok(exact((2.0 * p - 1.0) * FRAC_2_PI.sqrt(), "closed_form")),
            Quantizer::AdditiveGaussian { .. } => lambda_of(q, LambdaMethod::Quadrature { points: DEFAULT_POINTS }),
        },
        LambdaMethod::Quadrature { points } => {
            if points == 0 {
                return Err(Error::invalid("quadrature needs at least one node"));
            }
            Ok(exact(lambda_quadrature(q, &GaussLegendre::new(points)), "quadrature"))
        }
        LambdaMethod::MonteCarlo { samples, seed } => lambda_monte_carlo(q, samples, seed, Execution::default()),
    }
}

/// Monte Carlo `E[f(g)g]` for any quantizer, including user-supplied ones.
pub fn lambda_monte_carlo(f: &dyn QuantizeFn, samples: usize, seed: u64, exec: Execution) -> Result<ParamEstimate> {
    if samples < 2 {
        return Err(Error::invalid("Monte Carlo needs at least 2 samples"));
    }
    let stats = mc_estimate(samples, seed, exec, |rng| {
        let g: f64 = rng.sample(StandardNormal);
        Ok(f.quantize(g, rng) * g)
    })?;
    Ok(ParamEstimate {
        value: stats.mean,
        std_error: stats.std_error(),
        method: "monte_carlo".to_string(),
        seed: Some(seed),
    })
}

/// Expected hinge risk along the truth, `R(s) = E[(1 − s·f(g)g)₊]`.
pub fn hinge_risk_along_truth(q: &Quantizer, s: f64, quad_points: usize) -> f64 {
    risk(q, s, &GaussLegendre::new(quad_points))
}

fn risk(q: &Quantizer, s: f64, quad: &GaussLegendre) -> f64 {
    let kink = if s > 0.0 { 1.0 / s } else { f64::INFINITY };
    quad.half_normal_expectation(&[kink], |x| {
        let agree = 0.5 * (1.0 + conditional_correlation(q, x));
        agree * (1.0 - s * x).max(0.0) + (1.0 - agree) * (1.0 + s * x)
    })
}

fn risk_derivative(q: &Quantizer, s: f64, quad: &GaussLegendre) -> f64 {
    let kink = if s > 0.0 { 1.0 / s } else { f64::INFINITY };
    quad.half_normal_expectation(&[kink], |x| {
        let agree = 0.5 * (1.0 + conditional_correlation(q, x));
        let active = if s * x < 1.0 { 1.0 } else { 0.0 };
        -x * agree * active + x * (1.0 - agree)
    })
}

/// `μ_f = argmin_{s ∈ [0, 1]} E[(1 − s·f(g)g)₊]`.
pub fn mu_of(q: &Quantizer, quad_points: usize) -> Result<f64> {
    q.validate()?;
    if quad_points == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let quad = GaussLegendre::new(quad_points);
    let lambda = lambda_quadrature(q, &quad);
    if lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "μ requires a positive correlation λ, got {lambda}"
        )));
    }
    if risk_derivative(q, 1.0, &quad) < 0.0 {
        return Ok(1.0);
    }
    let (mu, _) = golden_section_min(0.0, 1.0, 1e-10, |s| risk(q, s, &quad));
    Ok(mu)
}

/// Outcome of the binned (C2) check `E[f(g) sign(g) | |g|] ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2Report {
    /// Smallest bin mean.
    pub margin: f64,
    /// Standard error of the bin attaining the margin.
    pub margin_std_error: f64,
    pub bin_means: Vec<f64>,
    pub bin_std_errors: Vec<f64>,
    pub passes: bool,
}

pub fn check_c2(q: &Quantizer, samples: usize, bins: usize, seed: u64) -> Result<C2Report> {
    q.validate()?;
    check_c2_with(q, samples, bins, seed, Execution::default())
}

/// Bins `|g|` into `bins` equal-count groups and reports the per-bin mean of
/// `f(g)·sign(g)`.
pub fn check_c2_with(f: &dyn QuantizeFn, samples: usize, bins: usize, seed: u64, exec: Execution) -> Result<C2Report> {
    if bins == 0 {
        return Err(Error::invalid("C2 check needs at least one bin"));
    }
    if samples < 2 * bins {
        return Err(Error::invalid(format!(
            "C2 check needs at least 2 samples per bin, got {samples} samples for {bins} bins"
        )));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let mut pairs: Vec<(f64, f64)> = exec
        .map_indexed(chunks, |c| {
            let mut rng = rng::stream(seed, c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            (0..len)
                .map(|_| {
                    let g: f64 = rng.sample(StandardNormal);
                    (g.abs(), f.quantize(g, &mut rng) * sign(g))
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut bin_means = Vec::with_capacity(bins);
    let mut bin_std_errors = Vec::with_capacity(bins);
    for b in 0..bins {
        let lo = b * samples / bins;
        let hi = (b + 1) * samples / bins;
        let mut stats = McStats::default();
        for &(_, v) in &pairs[lo..hi] {
            stats.push(v);
        }
        bin_means.push(stats.mean);
        bin_std_errors.push(stats.std_error());
    }
    let (worst, &margin) = bin_means
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one bin");
    let margin_std_error = bin_std_errors[worst];
    Ok(C2Report {
        margin,
        margin_std_error,
        passes: margin >= -3.0 * margin_std_error,
        bin_means,
        bin_std_errors,
    })
}

/// `λ`, `μ` and the C2 margin of a quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub mu: f64,
    pub c2_margin: f64,
}

pub fn model_params(
    q: &Quantizer,
    quad_points: usize,
    c2_samples: usize,
    c2_bins: usize,
    seed: u64,
) -> Result<ModelParams> {
    let lambda = lambda_of(q, LambdaMethod::Quadrature { points: quad_points })?.value;
    let mu = mu_of(q, quad_points)?;
    let c2 = check_c2(q, c2_samples, c2_bins, seed)?;
    Ok(ModelParams {
        lambda,
        mu,
        c2_margin: c2.margin,
    })
}
