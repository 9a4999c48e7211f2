//! Convex signal sets with Euclidean projections and support functions.
//!
//! Every set is convex, bounded and contains the origin. The projections feed
//! the constrained solvers; the support functions feed the width estimators.

mod project;
mod sample;
mod support;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::Vector;

pub use project::{dykstra, project_l1_ball, project_l2_ball, DykstraOutcome, DYKSTRA_MAX_ITERS, DYKSTRA_TOL};
pub use sample::{random_subspace, sample_signal, SignalKind};
pub use support::soft_threshold;

/// Tolerance used when validating orthonormal bases.
const BASIS_TOL: f64 = 1e-8;

/// A convex, bounded signal set `K ⊂ Rⁿ` with `0 ∈ K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetDescriptor", into = "SetDescriptor")]
pub enum SignalSet {
    /// `radius · B2`.
    L2Ball { n: usize, radius: f64 },
    /// `radius · B1`.
    ScaledL1Ball { n: usize, radius: f64 },
    /// Effectively sparse vectors `r · B1 ∩ B2`, with `r = √s` unless overridden.
    EffSparse { n: usize, s: usize, l1_radius: Option<f64> },
    /// `E ∩ B2` for the subspace `E` spanned by the orthonormal rows of `basis` (d×n).
    Subspace { basis: Array2<f64> },
    /// Convex hull of the listed vertices; the origin must be one of them.
    Polytope { n: usize, vertices: Vec<Vector> },
}

impl SignalSet {
    pub fn l2_ball(n: usize, radius: f64) -> Result<Self> {
        Self::validated(SignalSet::L2Ball { n, radius })
    }

    pub fn l1_ball(n: usize, radius: f64) -> Result<Self> {
        Self::validated(SignalSet::ScaledL1Ball { n, radius })
    }

    pub fn eff_sparse(n: usize, s: usize) -> Result<Self> {
        Self::validated(SignalSet::EffSparse { n, s, l1_radius: None })
    }

    /// `l1_radius · B1 ∩ B2` (for instance `‖x0‖₁` instead of `√s`).
    pub fn eff_sparse_with_radius(n: usize, s: usize, l1_radius: f64) -> Result<Self> {
        Self::validated(SignalSet::EffSparse {
            n,
            s,
            l1_radius: Some(l1_radius),
        })
    }

    pub fn subspace(basis: Array2<f64>) -> Result<Self> {
        Self::validated(SignalSet::Subspace { basis })
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::invalid("polytope needs at least one vertex"))?;
        Self::validated(SignalSet::Polytope { n, vertices })
    }

    fn validated(set: Self) -> Result<Self> {
        set.validate()?;
        Ok(set)
    }

    /// Checks the structural invariants of the set.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, r: f64| {
            if r.is_finite() && r > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {r}")))
            }
        };
        if self.dim() == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        match self {
            SignalSet::L2Ball { radius, .. } | SignalSet::ScaledL1Ball { radius, .. } => positive("radius", *radius),
            SignalSet::EffSparse { n, s, l1_radius } => {
                if *s == 0 || s > n {
                    return Err(Error::invalid(format!("sparsity s={s} must lie in 1..={n}")));
                }
                if let Some(r) = l1_radius {
                    positive("l1_radius", *r)?;
                }
                Ok(())
            }
            SignalSet::Subspace { basis } => {
                let (d, n) = basis.dim();
                if d == 0 || d > n {
                    return Err(Error::invalid(format!("subspace dimension {d} must lie in 1..={n}")));
                }
                let gram = basis.dot(&basis.t());
                for ((i, j), &v) in gram.indexed_iter() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    if (v - target).abs() > BASIS_TOL {
                        return Err(Error::invalid("subspace basis rows must be orthonormal"));
                    }
                }
                Ok(())
            }
            SignalSet::Polytope { n, vertices } => {
                if vertices.is_empty() {
                    return Err(Error::invalid("polytope needs at least one vertex"));
                }
                for v in vertices {
                    check_dim(*n, v.len())?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::invalid("polytope vertices must be finite"));
                    }
                }
                if !vertices.iter().any(|v| v.iter().all(|&x| x == 0.0)) {
                    return Err(Error::invalid("polytope must list the origin as a vertex"));
                }
                Ok(())
            }
        }
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            SignalSet::L2Ball { n, .. }
            | SignalSet::ScaledL1Ball { n, .. }
            | SignalSet::EffSparse { n, .. }
            | SignalSet::Polytope { n, .. } => *n,
            SignalSet::Subspace { basis } => basis.ncols(),
        }
    }

    /// ℓ1 radius of an `EffSparse` set.
    pub fn l1_radius(&self) -> Option<f64> {
        match self {
            SignalSet::EffSparse { s, l1_radius, .. } => Some(l1_radius.unwrap_or((*s as f64).sqrt())),
            SignalSet::ScaledL1Ball { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            SignalSet::L2Ball { radius, .. } | SignalSet::ScaledL1Ball { radius, .. } => 2.0 * radius,
            SignalSet::EffSparse { .. } => {
                // ±x for any unit vector with ‖x‖₁ ≤ r; 1-sparse ones always qualify.
                let r = self.l1_radius().unwrap_or(1.0);
                2.0 * r.min(1.0)
            }
            SignalSet::Subspace { .. } => 2.0,
            SignalSet::Polytope { vertices, .. } => {
                let mut best = 0.0f64;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        best = best.max((a - b).dot(&(a - b)).sqrt());
                    }
                }
                best
            }
        }
    }

    /// Largest constraint violation of `x` (0 for members).
    pub fn membership_residual(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let l2 = x.dot(x).sqrt();
        let l1 = x.iter().map(|v| v.abs()).sum::<f64>();
        Ok(match self {
            SignalSet::L2Ball { radius, .. } => (l2 - radius).max(0.0),
            SignalSet::ScaledL1Ball { radius, .. } => (l1 - radius).max(0.0),
            SignalSet::EffSparse { .. } => {
                let r = self.l1_radius().unwrap_or(1.0);
                (l1 - r).max(l2 - 1.0).max(0.0)
            }
            SignalSet::Subspace { basis } => {
                let coords = basis.dot(x);
                let inside = basis.t().dot(&coords);
                let off = (x - &inside).dot(&(x - &inside)).sqrt();
                off.max(l2 - 1.0).max(0.0)
            }
            SignalSet::Polytope { .. } => return Err(Error::Unsupported("membership test for polytopes".into())),
        })
    }

    /// Membership residual of `x` in the scaled set `μK`.
    pub fn scaled_membership_residual(&self, x: &Vector, mu: f64) -> Result<f64> {
        Ok(mu * self.membership_residual(&(x / mu))?)
    }
}

/// JSON form of a [`SignalSet`], e.g. `{"variant": "eff_sparse", "s": 4, "n": 128}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
enum SetDescriptor {
    L2Ball {
        n: usize,
        #[serde(default = "unit")]
        radius: f64,
    },
    ScaledL1Ball {
        n: usize,
        radius: f64,
    },
    EffSparse {
        n: usize,
        s: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l1_radius: Option<f64>,
    },
    Subspace {
        n: usize,
        basis: Vec<Vec<f64>>,
    },
    Polytope {
        n: usize,
        vertices: Vec<Vec<f64>>,
    },
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<SetDescriptor> for SignalSet {
    type Error = Error;

    fn try_from(d: SetDescriptor) -> Result<Self> {
        let set = match d {
            SetDescriptor::L2Ball { n, radius } => SignalSet::L2Ball { n, radius },
            SetDescriptor::ScaledL1Ball { n, radius } => SignalSet::ScaledL1Ball { n, radius },
            SetDescriptor::EffSparse { n, s, l1_radius } => SignalSet::EffSparse { n, s, l1_radius },
            SetDescriptor::Subspace { n, basis } => {
                let d = basis.len();
                let flat: Vec<f64> = basis
                    .into_iter()
                    .map(|row| {
                        check_dim(n, row.len())?;
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()?
                    .concat();
                let basis = Array2::from_shape_vec((d, n), flat).map_err(|e| Error::invalid(e.to_string()))?;
                SignalSet::Subspace { basis }
            }
            SetDescriptor::Polytope { n, vertices } => SignalSet::Polytope {
                n,
                vertices: vertices.into_iter().map(Array1::from).collect(),
            },
        };
        set.validate()?;
        Ok(set)
    }
}

impl From<SignalSet> for SetDescriptor {
    fn from(set: SignalSet) -> Self {
        match set {
            SignalSet::L2Ball { n, radius } => SetDescriptor::L2Ball { n, radius },
            SignalSet::ScaledL1Ball { n, radius } => SetDescriptor::ScaledL1Ball { n, radius },
            SignalSet::EffSparse { n, s, l1_radius } => SetDescriptor::EffSparse { n, s, l1_radius },
            SignalSet::Subspace { basis } => SetDescriptor::Subspace {
                n: basis.ncols(),
                basis: basis.outer_iter().map(|r| r.to_vec()).collect(),
            },
            SignalSet::Polytope { n, vertices } => SetDescriptor::Polytope {
                n,
                vertices: vertices.into_iter().map(|v| v.to_vec()).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn descriptor_json_shape() {
        let set: SignalSet = serde_json::from_str(r#"{"variant": "eff_sparse", "s": 4, "n": 128}"#).unwrap();
        assert_eq!(
            set,
            SignalSet::EffSparse {
                n: 128,
                s: 4,
                l1_radius: None
            }
        );
        assert_eq!(set.l1_radius(), Some(2.0));
        let back = serde_json::to_string(&set).unwrap();
        assert_eq!(back, r#"{"variant":"eff_sparse","n":128,"s":4}"#);
    }

    #[test]
    fn descriptor_rejects_invalid_sets() {
        assert!(serde_json::from_str::<SignalSet>(r#"{"variant": "eff_sparse", "s": 9, "n": 8}"#).is_err());
        assert!(serde_json::from_str::<SignalSet>(r#"{"variant": "l2_ball", "n": 3, "radius": -1}"#).is_err());
        assert!(
            serde_json::from_str::<SignalSet>(r#"{"variant": "polytope", "n": 2, "vertices": [[1, 0], [0, 1]]}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<SignalSet>(r#"{"variant": "subspace", "n": 2, "basis": [[1, 0], [1, 0]]}"#).is_err()
        );
    }

    #[test]
    fn subspace_round_trip() {
        let set = SignalSet::subspace(array![[0.6, 0.8, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let json = serde_json::to_string(&set).unwrap();
        let back: SignalSet = serde_json::from_str(&json).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn membership_residuals() {
        let set = SignalSet::eff_sparse(4, 1).unwrap();
        assert_eq!(set.membership_residual(&array![0.0, 1.0, 0.0, 0.0]).unwrap(), 0.0);
        let r = set.membership_residual(&array![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        assert!(set.membership_residual(&array![1.0]).is_err());
    }

    #[test]
    fn diameters() {
        assert_eq!(SignalSet::l2_ball(3, 1.5).unwrap().diameter(), 3.0);
        assert_eq!(SignalSet::eff_sparse(10, 3).unwrap().diameter(), 2.0);
        let poly = SignalSet::polytope(vec![array![0.0, 0.0], array![3.0, 4.0]]).unwrap();
        assert_eq!(poly.diameter(), 5.0);
    }
}
