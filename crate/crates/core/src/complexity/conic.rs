use crate::error::{Error, Result};
use crate::quadrature::{golden_section_min, GaussLegendre, HALF_NORMAL_CUTOFF};

/// `s(1 + τ²) + (n − s)·E[(|g| − τ)₊²]`, whose infimum over `τ ≥ 0` is the
/// statistical dimension of the ℓ1 descent cone at an s-sparse point.
pub fn l1_descent_cone_objective(n: usize, s: usize, tau: f64, quad: &GaussLegendre) -> f64 {
    let tail = quad.half_normal_expectation(&[tau], |x| {
        let d = (x - tau).max(0.0);
        d * d
    });
    s as f64 * (1.0 + tau * tau) + (n - s) as f64 * tail
}

/// Conic effective dimension of `‖x0‖₁B1 − x0` for an s-sparse `x0` in `Rⁿ`.
pub fn conic_effdim_l1(n: usize, s: usize, quad_points: usize) -> Result<f64> {
    if s == 0 || s > n {
        return Err(Error::invalid(format!(
            "sparsity must satisfy 1 <= s <= n, got s={s}, n={n}"
        )));
    }
    if quad_points == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    if s == n {
        return Ok(n as f64);
    }
    let quad = GaussLegendre::new(quad_points);
    let (_, value) = golden_section_min(0.0, HALF_NORMAL_CUTOFF, 1e-10, |tau| {
        l1_descent_cone_objective(n, s, tau, &quad)
    });
    Ok(value.min(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{normal_cdf, normal_pdf, DEFAULT_POINTS};
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn full_support_is_whole_space() {
        assert_eq!(conic_effdim_l1(10, 10, DEFAULT_POINTS).unwrap(), 10.0);
    }

    #[test]
    fn rejects_bad_sparsity() {
        assert!(conic_effdim_l1(10, 11, DEFAULT_POINTS).is_err());
        assert!(conic_effdim_l1(10, 0, DEFAULT_POINTS).is_err());
    }

    #[test]
    fn tail_moment_matches_closed_form() {
        // E[(|g| − τ)₊²] = 2[(1 + τ²)Q(τ) − τφ(τ)]
        let quad = GaussLegendre::new(DEFAULT_POINTS);
        for tau in [0.0, 0.3, 1.0, 2.5, 4.0] {
            let got = l1_descent_cone_objective(2, 1, tau, &quad) - (1.0 + tau * tau);
            let want = 2.0 * ((1.0 + tau * tau) * normal_cdf(-tau) - tau * normal_pdf(tau));
            assert!((got - want).abs() < 1e-10, "tau={tau}: {got} vs {want}");
        }
    }

    #[test]
    fn monotone_in_sparsity() {
        let mut prev = 0.0;
        for s in 1..=64 {
            let d = conic_effdim_l1(64, s, DEFAULT_POINTS).unwrap();
            assert!(d >= prev - 1e-9, "s={s}: {d} < {prev}");
            prev = d;
        }
    }

    /// Squared distance from `g` to the polar of the descent cone, i.e. the
    /// cone generated by the ℓ1 subdifferential at a point with support
    /// `0..s` and positive signs.
    fn polar_distance_sq(g: &[f64], s: usize) -> f64 {
        let f = |tau: f64| {
            let on: f64 = g[..s].iter().map(|&x| (x - tau).powi(2)).sum();
            let off: f64 = g[s..].iter().map(|&x| (x.abs() - tau).max(0.0).powi(2)).sum();
            on + off
        };
        let hi = g.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 1.0;
        golden_section_min(0.0, hi, 1e-12, f).1
    }

    #[test]
    fn matches_projection_oracle() {
        let (n, s) = (64, 4);
        let mut rng = crate::rng::stream(11, 0);
        let draws = 10_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            // Moreau: ‖Π_C g‖ = dist(g, C°)
            total += polar_distance_sq(&g, s);
        }
        let oracle = total / draws as f64;
        let value = conic_effdim_l1(n, s, DEFAULT_POINTS).unwrap();
        assert!((value - oracle).abs() / oracle < 0.05, "{value} vs {oracle}");
    }
}
