//! Gauss–Legendre quadrature and Gaussian expectation helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Upper end of the truncated half-normal integration range.
pub const HALF_NORMAL_CUTOFF: f64 = 10.0;

/// Default number of nodes per integration panel.
pub const DEFAULT_POINTS: usize = 200;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule. Nodes are roots of P_n found by Newton's
    /// method from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// E[h(|g|)] for standard Gaussian g, integrating piecewise over the
    /// panels delimited by `breaks` (kinks of `h`) within `[0, cutoff]`.
    pub fn half_normal_expectation(&self, breaks: &[f64], h: impl Fn(f64) -> f64) -> f64 {
        let mut edges = vec![0.0];
        edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < HALF_NORMAL_CUTOFF));
        edges.push(HALF_NORMAL_CUTOFF);
        edges.sort_by(f64::total_cmp);
        edges
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], |x| h(x) * half_normal_pdf(x)))
            .sum()
    }
}

/// Returns (P_n(x), P_n'(x)).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Density of |g| on [0, ∞).
#[inline]
pub fn half_normal_pdf(x: f64) -> f64 {
    2.0 * normal_pdf(x)
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns the midpoint of the final bracket and the value there.
pub fn golden_section_min(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 shrink steps reduce any bracket below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // Endpoint minima (monotone functions) are reported at the endpoint value.
    if fc < fx && fc <= fd {
        (c, fc)
    } else if fd < fx {
        (d, fd)
    } else {
        (x, fx)
    }
}
