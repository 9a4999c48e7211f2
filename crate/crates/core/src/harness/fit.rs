//! Order statistics, log-log regression and the trial bootstrap.

use rand::Rng;

use crate::rng;

/// Linear-interpolation quantile of sorted data, `q ∈ [0, 1]`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Least-squares slope of `log y` against `log x`. `None` when fewer than two
/// distinct abscissae or a non-positive value makes the fit undefined.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// Percentile bootstrap (95%) of the median-based slope, resampling trials
/// independently within each grid point.
pub fn bootstrap_slope_ci(x: &[f64], groups: &[Vec<f64>], resamples: usize, seed: u64) -> Option<(f64, f64)> {
    let mut rng = rng::stream(seed, rng::streams::BOOTSTRAP);
    let mut slopes = Vec::with_capacity(resamples);
    let mut scratch = Vec::new();
    for _ in 0..resamples {
        let medians: Vec<f64> = groups
            .iter()
            .map(|g| {
                scratch.clear();
                scratch.extend((0..g.len()).map(|_| g[rng.random_range(0..g.len())]));
                median(&scratch)
            })
            .collect();
        if let Some(s) = log_log_slope(x, &medians) {
            slopes.push(s);
        }
    }
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(f64::total_cmp);
    Some((quantile_sorted(&slopes, 0.025), quantile_sorted(&slopes, 0.975)))
}

/// Number of adjacent pairs where `values` goes up.
pub fn increases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_quartiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.25), 2.0);
        assert_eq!(quantile_sorted(&v, 0.75), 4.0);
    }

    #[test]
    fn flat_fit() {
        assert_eq!(log_log_slope(&[100.0, 1000.0], &[0.3, 0.3]), Some(0.0));
    }

    #[test]
    fn exact_power_law() {
        let x = [250.0, 500.0, 1000.0, 2000.0, 4000.0];
        let y: Vec<f64> = x.iter().map(|m: &f64| 3.0 * m.powf(-0.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn undefined_fits() {
        assert_eq!(log_log_slope(&[1.0], &[1.0]), None);
        assert_eq!(log_log_slope(&[1.0, 2.0], &[0.0, 1.0]), None);
        assert_eq!(log_log_slope(&[2.0, 2.0], &[1.0, 3.0]), None);
    }

    #[test]
    fn bootstrap_of_noiseless_groups_is_degenerate() {
        let x = [1.0, 2.0, 4.0];
        let groups: Vec<Vec<f64>> = x.iter().map(|m: &f64| vec![1.0 / m; 5]).collect();
        let (lo, hi) = bootstrap_slope_ci(&x, &groups, 200, 1).unwrap();
        assert!((lo + 1.0).abs() < 1e-12 && (hi + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_interval_brackets_slope() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let groups: Vec<Vec<f64>> = x
            .iter()
            .map(|m: &f64| (0..9).map(|t| (1.0 + 0.05 * (t as f64 - 4.0)) / m.sqrt()).collect())
            .collect();
        let (lo, hi) = bootstrap_slope_ci(&x, &groups, 1000, 7).unwrap();
        assert!(lo <= -0.5 && -0.5 <= hi, "[{lo}, {hi}]");
    }

    #[test]
    fn counts_increases() {
        assert_eq!(increases(&[3.0, 2.0, 2.5, 1.0]), 1);
        assert_eq!(increases(&[]), 0);
    }
}
