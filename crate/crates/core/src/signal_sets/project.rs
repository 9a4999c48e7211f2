use ndarray::Array1;

use super::SignalSet;
use crate::error::{check_dim, Error, Result};
use crate::Vector;

/// Iteration cap for Dykstra's alternating projections.
pub const DYKSTRA_MAX_ITERS: usize = 10_000;
/// Stop once successive Dykstra iterates move less than this.
pub const DYKSTRA_TOL: f64 = 1e-10;

/// Projection onto `radius · B2`.
pub fn project_l2_ball(v: &Vector, radius: f64) -> Vector {
    let norm = v.dot(v).sqrt();
    if norm <= radius {
        v.clone()
    } else {
        v * (radius / norm)
    }
}

/// Exact projection onto `radius · B1` by sorting magnitudes (O(n log n)).
pub fn project_l1_ball(v: &Vector, radius: f64) -> Vector {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.clone();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.mapv(|x| x.signum() * (x.abs() - theta).max(0.0))
}

#[derive(Debug, Clone)]
pub struct DykstraOutcome {
    pub point: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// Combined movement of the iterate and the correction terms in the last sweep.
    pub residual: f64,
}

/// Dykstra's alternating projections onto the intersection of convex sets,
/// each given by its Euclidean projector.
pub fn dykstra(v: &Vector, projectors: &[&dyn Fn(&Vector) -> Vector], max_iters: usize, tol: f64) -> DykstraOutcome {
    let mut x = v.clone();
    let mut corrections: Vec<Vector> = vec![Array1::zeros(v.len()); projectors.len()];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iters {
        let start = x.clone();
        let mut moved_sq = 0.0;
        for (proj, p) in projectors.iter().zip(corrections.iter_mut()) {
            let shifted = &x + &*p;
            x = proj(&shifted);
            let next = shifted - &x;
            let dp = &next - &*p;
            moved_sq += dp.dot(&dp);
            *p = next;
        }
        let step = &x - &start;
        // The iterate alone can stall while corrections still evolve.
        residual = (step.dot(&step) + moved_sq).sqrt();
        if residual < tol {
            return DykstraOutcome {
                point: x,
                iterations: iter,
                converged: true,
                residual,
            };
        }
    }
    DykstraOutcome {
        point: x,
        iterations: max_iters,
        converged: false,
        residual,
    }
}

/// Projection onto `r · B1 ∩ B2`.
///
/// The KKT conditions give `x(λ) = S_λ(v) / max(1, ‖S_λ(v)‖₂)` where `λ ≥ 0`
/// is the ℓ1 multiplier; `‖x(λ)‖₁` crosses `r` exactly once, so `λ` is found
/// by bisection on sorted magnitudes with prefix sums.
pub(crate) fn project_eff_sparse(v: &Vector, r: f64) -> Result<Vector> {
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut sum = Vec::with_capacity(mags.len() + 1);
    let mut sum_sq = Vec::with_capacity(mags.len() + 1);
    sum.push(0.0);
    sum_sq.push(0.0);
    for &u in &mags {
        sum.push(sum.last().unwrap() + u);
        sum_sq.push(sum_sq.last().unwrap() + u * u);
    }
    // ‖x(λ)‖₁ − r in O(log n).
    let excess = |lambda: f64| {
        let k = mags.partition_point(|&u| u > lambda);
        let kf = k as f64;
        let l1 = sum[k] - kf * lambda;
        let l2 = (sum_sq[k] - 2.0 * lambda * sum[k] + kf * lambda * lambda)
            .max(0.0)
            .sqrt();
        l1 / l2.max(1.0) - r
    };
    let lambda = if excess(0.0) <= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, mags[0]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let mut x = v.mapv(|a| a.signum() * (a.abs() - lambda).max(0.0));
    let l2 = x.dot(&x).sqrt();
    if l2 > 1.0 {
        x /= l2;
    }
    let l1: f64 = x.iter().map(|a| a.abs()).sum();
    if l1 > r {
        x *= r / l1;
    }
    Ok(x)
}

impl SignalSet {
    /// Euclidean projection `argmin_{x ∈ K} ‖x − v‖₂`.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        check_dim(self.dim(), v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("cannot project a vector with non-finite entries"));
        }
        match self {
            SignalSet::L2Ball { radius, .. } => Ok(project_l2_ball(v, *radius)),
            SignalSet::ScaledL1Ball { radius, .. } => Ok(project_l1_ball(v, *radius)),
            SignalSet::EffSparse { .. } => project_eff_sparse(v, self.l1_radius().unwrap_or(1.0)),
            SignalSet::Subspace { basis } => {
                let inside = basis.t().dot(&basis.dot(v));
                Ok(project_l2_ball(&inside, 1.0))
            }
            SignalSet::Polytope { .. } => Err(Error::Unsupported("projection onto general polytopes".into())),
        }
    }

    /// Projection onto the scaled set `μK`, computed as `μ · Proj_K(v / μ)`.
    pub fn project_scaled(&self, v: &Vector, mu: f64) -> Result<Vector> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("scaling parameter must be positive, got {mu}")));
        }
        if mu == 1.0 {
            return self.project(v);
        }
        Ok(self.project(&(v / mu))? * mu)
    }
}
