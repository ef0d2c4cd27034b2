//! One-dimensional quadrature rules shared by the boundary and profile
//! integrators, plus Richardson extrapolation for the `r -> 1` limits.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Recursive bisection driven by the Gauss-Legendre estimate.
///
/// Each panel is split until the two-half estimate agrees with the whole
/// panel to `rel_tol` relative to the top-level estimate, or to
/// `abs_floor`. The per-panel tolerance is not halved with depth, so
/// integrable endpoint singularities terminate.
/// Exceeding `max_depth` levels is an error.
pub fn adaptive<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    f: &F,
    rel_tol: f64,
    abs_floor: f64,
    max_depth: u32,
) -> Result<f64> {
    let whole = rule.integrate(a, b, f);
    let abs_tol = (rel_tol * whole.abs()).max(abs_floor);
    adaptive_step(rule, a, b, whole, f, abs_tol, 0, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    f: &F,
    abs_tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let halves = left + right;
    let change = (halves - whole).abs();
    if change <= abs_tol {
        return Ok(halves);
    }
    if depth + 1 >= max_depth {
        return Err(Error::Refinement {
            levels: max_depth,
            last_change: change,
        });
    }
    let l = adaptive_step(rule, a, mid, left, f, abs_tol, depth + 1, max_depth)?;
    let r = adaptive_step(rule, mid, b, right, f, abs_tol, depth + 1, max_depth)?;
    Ok(l + r)
}

/// Trapezoid rule for a `2π`-periodic integrand on `m` equispaced points.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(m: usize, mut f: F) -> f64 {
    let h = 2.0 * PI / m as f64;
    (0..m).map(|j| f(j as f64 * h)).sum::<f64>() * h
}

/// Polynomial extrapolation of `values[i] = F(steps[i])` to `step = 0`
/// (Neville's scheme). Returns the extrapolated value and the difference
/// between the last two diagonal entries as an error estimate.
pub fn richardson(steps: &[f64], values: &[f64]) -> (f64, f64) {
    assert_eq!(steps.len(), values.len());
    assert!(!steps.is_empty());
    let n = steps.len();
    let mut table = values.to_vec();
    let mut prev_diag = table[n - 1];
    let mut diag = table[n - 1];
    for level in 1..n {
        for i in (level..n).rev() {
            let hi = steps[i - level];
            let hj = steps[i];
            table[i] = (hi * table[i] - hj * table[i - 1]) / (hi - hj);
        }
        prev_diag = diag;
        diag = table[n - 1];
    }
    (diag, (diag - prev_diag).abs())
}
