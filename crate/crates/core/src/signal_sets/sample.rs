use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::Vector;

/// Generator family for unit-norm ground-truth signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `s` uniformly chosen coordinates with standard Gaussian values.
    ExactSparse { s: usize },
    /// Sorted magnitudes `min(1, (i/s)^(−decay))`, random signs and positions.
    Compressible { s: usize, decay: f64 },
    /// Gaussian direction inside the span of the orthonormal rows of `basis`.
    Subspace { basis: Vec<Vec<f64>> },
    /// Uniform (Dirichlet) mixture of the given vertices, rescaled to unit norm.
    PolytopeMix { vertices: Vec<Vec<f64>> },
}

/// Draws a unit-norm signal in `Rⁿ` deterministically from `seed`.
pub fn sample_signal(kind: &SignalKind, n: usize, seed: u64) -> Result<Vector> {
    if n == 0 {
        return Err(Error::invalid("ambient dimension must be positive"));
    }
    let mut rng = rng::stream(seed, rng::streams::SIGNAL);
    let x: Vector = match kind {
        SignalKind::ExactSparse { s } => {
            check_sparsity(*s, n)?;
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let mut x = Array1::zeros(n);
            for &i in &idx[..*s] {
                // A zero draw would shrink the support; it has probability zero
                // but the loop keeps ‖x‖₀ = s exact.
                let mut v: f64 = 0.0;
                while v == 0.0 {
                    v = rng.sample(StandardNormal);
                }
                x[i] = v;
            }
            x
        }
        SignalKind::Compressible { s, decay } => {
            check_sparsity(*s, n)?;
            if !(decay.is_finite() && *decay > 0.0) {
                return Err(Error::invalid(format!("decay must be positive, got {decay}")));
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let mut x = Array1::zeros(n);
            for (rank, &i) in idx.iter().enumerate() {
                let ratio = (rank + 1) as f64 / *s as f64;
                let mag = ratio.max(1.0).powf(-decay);
                x[i] = if rng.random::<bool>() { mag } else { -mag };
            }
            x
        }
        SignalKind::Subspace { basis } => {
            let basis = to_matrix(basis, n)?;
            let coeffs: Vector = (0..basis.nrows()).map(|_| rng.sample(StandardNormal)).collect();
            basis.t().dot(&coeffs)
        }
        SignalKind::PolytopeMix { vertices } => {
            let vertices = to_matrix(vertices, n)?;
            let weights: Vector = (0..vertices.nrows())
                .map(|_| Exp1.sample(&mut rng))
                .collect::<Vec<f64>>()
                .into();
            vertices.t().dot(&(&weights / weights.sum()))
        }
    };
    let norm = x.dot(&x).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid("signal generator produced a zero vector"));
    }
    Ok(x / norm)
}

/// Orthonormal basis (rows) of a uniformly random `d`-dimensional subspace of `Rⁿ`.
pub fn random_subspace(d: usize, n: usize, seed: u64) -> Result<Array2<f64>> {
    if d == 0 || d > n {
        return Err(Error::invalid(format!("subspace dimension {d} must lie in 1..={n}")));
    }
    let mut rng = rng::stream(seed, rng::streams::MATRIX);
    let mut basis = Array2::<f64>::zeros((d, n));
    let mut row = 0;
    while row < d {
        let mut v: Vector = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        // Two Gram–Schmidt passes keep the rows orthonormal to machine precision.
        for _ in 0..2 {
            for prev in basis.outer_iter().take(row) {
                let c = prev.dot(&v);
                v.scaled_add(-c, &prev);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-8 {
            basis.row_mut(row).assign(&(v / norm));
            row += 1;
        }
    }
    Ok(basis)
}

fn check_sparsity(s: usize, n: usize) -> Result<()> {
    if s == 0 || s > n {
        Err(Error::invalid(format!("sparsity s={s} must lie in 1..={n}")))
    } else {
        Ok(())
    }
}

fn to_matrix(rows: &[Vec<f64>], n: usize) -> Result<Array2<f64>> {
    if rows.is_empty() {
        return Err(Error::invalid("generator needs at least one row"));
    }
    let mut flat = Vec::with_capacity(rows.len() * n);
    for r in rows {
        check_dim(n, r.len())?;
        flat.extend_from_slice(r);
    }
    Array2::from_shape_vec((rows.len(), n), flat).map_err(|e| Error::invalid(e.to_string()))
}
