use super::SignalSet;
use crate::error::{check_dim, Result};
use crate::quadrature::golden_section_min;
use crate::Vector;

/// Componentwise soft thresholding `sign(g)·(|g| − λ)₊`.
pub fn soft_threshold(g: &Vector, lambda: f64) -> Vector {
    g.mapv(|x| x.signum() * (x.abs() - lambda).max(0.0))
}

fn soft_threshold_norm(g: &Vector, lambda: f64) -> f64 {
    g.iter()
        .map(|x| (x.abs() - lambda).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `sup_{x ∈ r·B1 ∩ B2} ⟨g, x⟩ = min_{λ ≥ 0} λ·r + ‖S_λ(g)‖₂`.
///
/// The minimand is convex in λ and constant-slope beyond `‖g‖∞`, so the
/// search is confined to `[0, ‖g‖∞]`.
pub(crate) fn eff_sparse_support(g: &Vector, r: f64) -> f64 {
    let sup_norm = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sup_norm == 0.0 {
        return 0.0;
    }
    let dual = |lambda: f64| lambda * r + soft_threshold_norm(g, lambda);
    let (_, value) = golden_section_min(0.0, sup_norm, 1e-12 * sup_norm.max(1.0), dual);
    value.min(dual(0.0)).min(dual(sup_norm))
}

impl SignalSet {
    /// Support function `sup_{x ∈ K} ⟨g, x⟩`.
    pub fn support(&self, g: &Vector) -> Result<f64> {
        check_dim(self.dim(), g.len())?;
        Ok(match self {
            SignalSet::L2Ball { radius, .. } => radius * g.dot(g).sqrt(),
            SignalSet::ScaledL1Ball { radius, .. } => radius * g.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            SignalSet::EffSparse { .. } => eff_sparse_support(g, self.l1_radius().unwrap_or(1.0)),
            SignalSet::Subspace { basis } => {
                let coords = basis.dot(g);
                coords.dot(&coords).sqrt()
            }
            SignalSet::Polytope { vertices, .. } => vertices.iter().map(|v| v.dot(g)).fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    #[test]
    fn closed_forms() {
        let l2 = SignalSet::l2_ball(2, 1.0).unwrap();
        assert_eq!(l2.support(&array![3.0, 4.0]).unwrap(), 5.0);
        let l1 = SignalSet::l1_ball(2, 2.0).unwrap();
        assert_eq!(l1.support(&array![3.0, -4.0]).unwrap(), 8.0);
        let poly = SignalSet::polytope(vec![array![0.0, 0.0], array![1.0, 2.0], array![-1.0, 0.5]]).unwrap();
        assert_eq!(poly.support(&array![1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(poly.support(&array![-1.0, -1.0]).unwrap(), 0.5);
    }

    #[test]
    fn eff_sparse_matches_grid_oracle() {
        // sup over √2·B1 ∩ B2 in R⁴ for g = (1,1,1,1), grid step 1e-3 on the
        // box. The objective is symmetric, so the grid runs over the sorted
        // orthant x1 ≥ x2 ≥ x3 ≥ x4 ≥ 0, which contains a maximizer.
        let g = array![1.0, 1.0, 1.0, 1.0];
        let r = 2f64.sqrt();
        let steps = 1000usize;
        let h = 1.0 / steps as f64;
        let mut best = 0.0f64;
        for i in 0..=steps {
            let a = i as f64 * h;
            for j in 0..=i {
                let b = j as f64 * h;
                if a + b > r || a * a + b * b > 1.0 {
                    break;
                }
                for k in 0..=j {
                    let c = k as f64 * h;
                    let l1 = a + b + c;
                    let l2 = a * a + b * b + c * c;
                    if l1 > r || l2 > 1.0 {
                        break;
                    }
                    // best feasible d ≤ c
                    let d_l1 = r - l1;
                    let d_l2 = (1.0 - l2).sqrt();
                    let d = ((d_l1.min(d_l2).min(c) / h).floor() * h).max(0.0);
                    best = best.max(l1 + d);
                }
            }
        }
        let set = SignalSet::eff_sparse(4, 2).unwrap();
        let value = set.support(&g).unwrap();
        assert_abs_diff_eq!(value, best, epsilon = 1e-3);
        assert_abs_diff_eq!(value, r, epsilon = 1e-9);
    }

    #[test]
    fn subspace_support_is_projected_norm() {
        let set = SignalSet::subspace(array![[0.6, 0.8, 0.0]]).unwrap();
        assert_abs_diff_eq!(set.support(&array![1.0, 1.0, 7.0]).unwrap(), 1.4, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn positively_homogeneous(
            raw in prop::collection::vec(-3.0f64..3.0, 8),
            c in 0.01f64..50.0,
        ) {
            let g = Array1::from(raw);
            let sets = [
                SignalSet::l2_ball(8, 1.3).unwrap(),
                SignalSet::l1_ball(8, 0.7).unwrap(),
                SignalSet::eff_sparse(8, 3).unwrap(),
            ];
            for set in &sets {
                let a = set.support(&(&g * c)).unwrap();
                let b = c * set.support(&g).unwrap();
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }

        #[test]
        fn eff_sparse_below_intersection_bound(
            raw in prop::collection::vec(-3.0f64..3.0, 12),
            s in 1usize..12,
        ) {
            let g = Array1::from(raw);
            let set = SignalSet::eff_sparse(12, s).unwrap();
            let value = set.support(&g).unwrap();
            let sup_norm = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let bound = ((s as f64).sqrt() * sup_norm).min(g.dot(&g).sqrt());
            prop_assert!(value <= bound + 1e-9);
            // The maximizer of ⟨g,·⟩ over s-sparse unit vectors is feasible.
            let mut mags: Vec<f64> = g.iter().map(|x| x.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let top: f64 = mags[..s].iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(value >= top - 1e-9);
        }
    }
}
