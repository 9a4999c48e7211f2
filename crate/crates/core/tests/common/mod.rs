//! Oracles shared by the integration suites.

#![allow(dead_code)]

use ndarray::Array1;
use onebit_core::{Dataset, SignalSet, Vector};

/// `E‖g‖₂` for `g ~ N(0, Iₙ)`: `√2·Γ((n+1)/2)/Γ(n/2)`.
pub fn chi_mean(n: usize) -> f64 {
    let n = n as f64;
    2f64.sqrt() * (libm::lgamma((n + 1.0) / 2.0) - libm::lgamma(n / 2.0)).exp()
}

/// Minimum of the empirical hinge risk over the points of the grid
/// `{−r, −r + step, …, r}ⁿ` that lie in `set`.
pub fn grid_min_hinge(data: &Dataset, set: &SignalSet, r: f64, step: f64) -> f64 {
    let n = data.dim();
    let k = (2.0 * r / step).round() as usize + 1;
    let coords: Vec<f64> = (0..k).map(|i| -r + i as f64 * step).collect();
    let rows: Vec<Vec<f64>> = data.a.outer_iter().map(|r| r.to_vec()).collect();
    let risk = |x: &[f64]| {
        rows.iter()
            .zip(&data.y)
            .map(|(a, y)| (1.0 - y * a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>()).max(0.0))
            .sum::<f64>()
            / rows.len() as f64
    };
    let mut idx = vec![0usize; n];
    let mut x: Vector = Array1::zeros(n);
    let mut best = f64::INFINITY;
    loop {
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = coords[i];
        }
        if set.membership_residual(&x).unwrap() <= 1e-12 {
            best = best.min(risk(x.as_slice().unwrap()));
        }
        let mut d = 0;
        loop {
            if d == n {
                return best;
            }
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
