//! Riemann map of the inverted complement and the series quantities of
//! the conformal argument: `λ = Q(0)`, the Laurent tail `a_n`, the area
//! series `A_r`, the weighted perimeter `S_r` on `|z| = r` and the
//! Cauchy mean-value bound on `|λ|^{p+1}`.
//!
//! Notation: `h: B₁ → D` with `h(0) = 0`, `h'(0) > 0`; `G = h/z`,
//! `Q = 1/G`, `g = 1/h = Q/z = λ/z + Σ_{n≥0} a_n zⁿ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::geometry::{self, Domain, InversionOptions, RadialFunction};
use crate::measures;
use crate::quadrature;
use crate::series;

pub const MAX_THEODORSEN_ITERATIONS: usize = 200;
pub const DEFAULT_SERIES_ORDER: usize = 256;
pub const DEFAULT_MAP_TOL: f64 = 1e-13;
/// `min |G|` on the unit circle below this is treated as degenerate.
const DEGENERACY_FLOOR: f64 = 1e-8;

/// Exponents `k` of the ladder `r = 1 - 2^{-k}`.
pub const LADDER: std::ops::RangeInclusive<i32> = 4..=12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalData {
    /// Truncation order `N`.
    pub order: usize,
    /// `h_0..=h_N` with `h_0 = 0`, `h_1 = h'(0) > 0`.
    pub h_coeffs: Vec<Complex64>,
    /// `G_0..G_{N-1}`.
    pub g_coeffs: Vec<Complex64>,
    /// `Q_0..Q_{N-1}` by power-series reciprocal of `G`.
    pub q_coeffs: Vec<Complex64>,
    pub lambda: Complex64,
    /// `a_0..a_{N-2}`, with `a_n = Q_{n+1}`.
    pub laurent_tail: Vec<Complex64>,
    /// `sup_t | |h(e^{it})| - ρ_D(arg h(e^{it})) |`.
    pub theodorsen_residual: f64,
    pub iterations: usize,
    /// Boundary correspondence `θ(t_j)`, `t_j = 2πj/4N`, unwrapped.
    pub boundary_angles: Vec<f64>,
    radial: RadialFunction,
}

impl ConformalData {
    /// `a_n` for `n ≥ -1` (`a_{-1} = λ`); zero past the truncation.
    pub fn a(&self, n: i64) -> Complex64 {
        if n == -1 {
            self.lambda
        } else {
            self.laurent_tail.get(n as usize).copied().unwrap_or_default()
        }
    }

    /// `Σ_{n≥1} n |a_n|²`.
    pub fn tail_energy(&self) -> f64 {
        self.laurent_tail
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    pub fn map(&self, w: Complex64) -> Complex64 {
        fourier::eval_series(&self.h_coeffs, w)
    }

    pub fn map_derivative(&self, w: Complex64) -> Complex64 {
        fourier::eval_series(&fourier::derivative(&self.h_coeffs), w)
    }

    pub fn radial(&self) -> &RadialFunction {
        &self.radial
    }

    /// Samples per circle for trapezoid sums.
    pub fn circle_samples(&self) -> usize {
        4 * self.order
    }

    /// Preimage `h^{-1}(y)` by Newton's method from the boundary
    /// correspondence.
    pub fn inverse(&self, y: Complex64) -> Complex64 {
        if y.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phi = y.arg();
        let gauge = y.norm() / self.radial.radius(phi);
        let t = self.correspondence_inverse(phi);
        let mut w = Complex64::from_polar(gauge.min(0.999), t);
        let dh = fourier::derivative(&self.h_coeffs);
        let mut res = (self.map(w) - y).norm();
        for _ in 0..60 {
            let step = (fourier::eval_series(&self.h_coeffs, w) - y) / fourier::eval_series(&dh, w);
            let mut lambda = 1.0;
            let mut next = w - step * lambda;
            let mut next_res = (self.map(next) - y).norm();
            while next_res > res && lambda > 1e-4 {
                lambda *= 0.5;
                next = w - step * lambda;
                next_res = (self.map(next) - y).norm();
            }
            w = next;
            let done = next_res <= 1e-15 * y.norm().max(1.0) || (res - next_res).abs() == 0.0;
            res = next_res;
            if done {
                break;
            }
        }
        w
    }

    /// Parameter `t` with `θ(t) = φ` (mod 2π), by linear interpolation.
    fn correspondence_inverse(&self, phi: f64) -> f64 {
        let m = self.boundary_angles.len();
        let two_pi = 2.0 * PI;
        let base = self.boundary_angles[0];
        let target = base + (phi - base).rem_euclid(two_pi);
        let h = two_pi / m as f64;
        for j in 0..m {
            let a = self.boundary_angles[j];
            let b = if j + 1 < m {
                self.boundary_angles[j + 1]
            } else {
                self.boundary_angles[0] + two_pi
            };
            if target >= a && target <= b {
                let frac = if b > a { (target - a) / (b - a) } else { 0.0 };
                return (j as f64 + frac) * h;
            }
        }
        phi
    }
}

/// Theodorsen iteration for the Riemann map of a domain star-shaped
/// about the origin.
///
/// The boundary correspondence solves `θ(t) - t = H[log ρ(θ(·))](t)`
/// with `H` the conjugate-function operator, evaluated by FFT on `4N`
/// points. `log(h(z)/z)` is then the analytic completion of
/// `log ρ(θ(t))`, whose exponential gives `G` directly. Disks skip the
/// iteration and use the Möbius map.
pub fn riemann_map(domain: &Domain, order: usize, tol: f64) -> Result<ConformalData> {
    let radial = domain.radial_about_origin().ok_or_else(|| {
        Error::Precondition("Riemann map needs a disk or centered Fourier star containing the origin".into())
    })?;
    if order < 64 || !order.is_power_of_two() {
        return Err(Error::Range(format!(
            "series order {order} must be a power of two ≥ 64"
        )));
    }
    let m = 4 * order;
    let ts: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let (theta, g_coeffs, iterations) = match &radial {
        RadialFunction::Disk { center, radius } => disk_map(*center, *radius, &ts, order)?,
        _ => theodorsen(&radial, &ts, order, tol)?,
    };
    let mut h_coeffs = Vec::with_capacity(order + 1);
    h_coeffs.push(Complex64::new(0.0, 0.0));
    h_coeffs.extend_from_slice(&g_coeffs);
    let q_coeffs = series::reciprocal(&g_coeffs, order);
    let lambda = q_coeffs[0];
    let laurent_tail = q_coeffs[1..].to_vec();

    let h_vals = fourier::eval_on_circle(&h_coeffs, 1.0, m);
    let theodorsen_residual = h_vals
        .iter()
        .map(|hv| (hv.norm() - radial.radius(hv.arg())).abs())
        .fold(0.0, f64::max);

    Ok(ConformalData {
        order,
        h_coeffs,
        g_coeffs,
        q_coeffs,
        lambda,
        laurent_tail,
        theodorsen_residual,
        iterations,
        boundary_angles: theta,
        radial,
    })
}

/// Möbius map onto a disk: with `a = -c/R`, `h(w) = R(1-|a|²) w/(1+āw)`,
/// so `G_n = R(1-|a|²)(-ā)^n` and `θ(t) = t - arg(1 + ā e^{it})`.
fn disk_map(center: Complex64, radius: f64, ts: &[f64], order: usize) -> Result<(Vec<f64>, Vec<Complex64>, usize)> {
    let a = -center / radius;
    let scale = radius * (1.0 - a.norm_sqr());
    let min_g = scale / (1.0 + a.norm());
    if min_g < DEGENERACY_FLOOR {
        return Err(Error::Degenerate { min_modulus: min_g });
    }
    let theta = ts
        .iter()
        .map(|&t| t - (Complex64::new(1.0, 0.0) + a.conj() * Complex64::from_polar(1.0, t)).arg())
        .collect();
    let ratio = -a.conj();
    let mut g_coeffs = Vec::with_capacity(order);
    let mut term = Complex64::new(scale, 0.0);
    for _ in 0..order {
        g_coeffs.push(term);
        term *= ratio;
    }
    Ok((theta, g_coeffs, 0))
}

fn theodorsen(
    radial: &RadialFunction,
    ts: &[f64],
    order: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Complex64>, usize)> {
    let mut theta = ts.to_vec();
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_THEODORSEN_ITERATIONS {
        iterations += 1;
        let log_rho: Vec<f64> = theta.iter().map(|&th| radial.radius(th).ln()).collect();
        let conj = fourier::conjugate(&log_rho);
        change = 0.0;
        for ((th, t), c) in theta.iter_mut().zip(ts).zip(&conj) {
            let next = t + c;
            change = f64::max(change, (next - *th).abs());
            *th = next;
        }
        if change < tol {
            break;
        }
    }
    if !(change < tol) {
        return Err(Error::Convergence {
            iterations,
            residual: change,
        });
    }

    let g_boundary: Vec<Complex64> = theta
        .iter()
        .zip(ts)
        .map(|(&th, &t)| Complex64::new(radial.radius(th).ln(), th - t).exp())
        .collect();
    let min_g = g_boundary.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);
    if min_g < DEGENERACY_FLOOR {
        return Err(Error::Degenerate { min_modulus: min_g });
    }
    let (mut g_coeffs, _) = fourier::taylor_from_boundary(&g_boundary, order - 1);
    // gauge: h'(0) = G_0 is real positive up to rounding
    g_coeffs[0] = Complex64::new(g_coeffs[0].norm(), 0.0);
    Ok((theta, g_coeffs, iterations))
}

/// `A_r = π(|λ|²/r² - Σ_{n≥1} n|a_n|² r^{2n})`.
pub fn area_series(cd: &ConformalData, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(PI * (cd.lambda.norm_sqr() / (r * r) - tail_sum(cd, r)))
}

/// `Σ_{n≥1} n|a_n|² r^{2n}`.
pub fn tail_sum(cd: &ConformalData, r: f64) -> f64 {
    let r2 = r * r;
    cd.laurent_tail
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| n as f64 * a.norm_sqr() * r2.powi(n as i32))
        .sum()
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Range(format!("radius {r} must lie in (0, 1)")));
    }
    Ok(())
}

/// `Q` and `Q'` on `|z| = r` at `M = 4N` equispaced points.
fn q_on_circle(cd: &ConformalData, r: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = cd.circle_samples();
    let q = fourier::eval_on_circle(&cd.q_coeffs, r, m);
    let dq = fourier::eval_on_circle(&fourier::derivative(&cd.q_coeffs), r, m);
    (q, dq)
}

/// `S_r = r ∫₀^{2π} |g'(re^{it})| |g(re^{it})|^p dt` by the trapezoid rule.
pub fn weighted_perimeter_series(cd: &ConformalData, p: f64, r: f64) -> Result<f64> {
    check_radius(r)?;
    let m = cd.circle_samples();
    let (q, dq) = q_on_circle(cd, r);
    let sum: f64 = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            let g = q[j] / z;
            let dg = (z * dq[j] - q[j]) / (z * z);
            dg.norm() * g.norm().powf(p)
        })
        .sum();
    Ok(r * sum * 2.0 * PI / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyBound {
    /// `|λ|^{p+1}`.
    pub lambda_term: f64,
    /// `r^{p+1} S_r / 2π`.
    pub perimeter_term: f64,
    /// `|mean of τ = u e^{pφ} on |z| = r|`, which equals `|τ(0)| = |λ|^{p+1}`.
    pub tau_mean_modulus: f64,
}

/// Cauchy mean-value step: `|λ|^{p+1} = |τ(0)| ≤ r^{p+1} S_r / 2π` with
/// `τ = u·exp(pφ)`, `u = z²g' = zQ' - Q`, `φ` the holomorphic logarithm
/// of `Q` built from the series of `Q'/Q`.
pub fn cauchy_lambda_bound(cd: &ConformalData, p: f64, r: f64) -> Result<CauchyBound> {
    check_radius(r)?;
    let m = cd.circle_samples();
    let (q, dq) = q_on_circle(cd, r);
    let winding = winding_number(&q);
    if winding != 0 {
        return Err(Error::Logarithm { winding, radius: r });
    }
    // φ' = Q'/Q = Q'·G
    let dq_series = fourier::derivative(&cd.q_coeffs);
    let dphi = series::multiply(&dq_series, &cd.g_coeffs, cd.order - 1);
    let phi_series = series::integrate(&dphi, cd.lambda.ln());
    let phi = fourier::eval_on_circle(&phi_series, r, m);
    let mut tau_sum = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
        let u = z * dq[j] - q[j];
        tau_sum += u * (phi[j] * p).exp();
    }
    let tau_mean = tau_sum / m as f64;
    let s_r = weighted_perimeter_series(cd, p, r)?;
    Ok(CauchyBound {
        lambda_term: cd.lambda.norm().powf(p + 1.0),
        perimeter_term: r.powf(p + 1.0) * s_r / (2.0 * PI),
        tau_mean_modulus: tau_mean.norm(),
    })
}

fn winding_number(values: &[Complex64]) -> i64 {
    let m = values.len();
    let total: f64 = (0..m).map(|j| (values[(j + 1) % m] / values[j]).arg()).sum();
    (total / (2.0 * PI)).round() as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReplayReport {
    pub p: f64,
    pub lambda: Complex64,
    /// `a_0`, the center offset of the Laurent expansion.
    pub a0: Complex64,
    pub tail_energy: f64,
    /// `((|Ω|/π)^{(p+1)/2}, |λ|^{p+1}, P_p/2π)` with `|Ω|` and `P_p` the
    /// extrapolated `A_r` and `S_r` limits.
    pub chain: [f64; 3],
    pub r_grid: Vec<f64>,
    #[serde(rename = "A_r")]
    pub area_r: Vec<f64>,
    #[serde(rename = "S_r")]
    pub perimeter_r: Vec<f64>,
    pub area_limit: f64,
    pub perimeter_limit: f64,
    /// Richardson error estimates of the two limits.
    pub area_limit_error: f64,
    pub perimeter_limit_error: f64,
    /// Direct quadrature of `|Ω|` and `∫_{∂Ω}|x|^p dσ` for cross-checking.
    pub area_direct: f64,
    pub perimeter_direct: f64,
    #[serde(rename = "residual")]
    pub theodorsen_residual: f64,
    pub inversion_residual: f64,
    pub cauchy: Vec<CauchyBound>,
}

impl ProofReplayReport {
    pub fn chain_is_monotone(&self, slack: f64) -> bool {
        self.chain[0] <= self.chain[1] + slack && self.chain[1] <= self.chain[2] + slack
    }
}

/// Inversion, Riemann map, the `A_r`/`S_r` ladder and the limit chain.
pub fn replay_proof(omega: &Domain, p: f64, order: usize) -> Result<ProofReplayReport> {
    if !(p >= -1.0) {
        return Err(Error::Range(format!("p = {p} must be ≥ -1")));
    }
    if omega.radial_about_origin().is_none() {
        return Err(Error::Precondition(
            "proof replay needs a disk or centered Fourier star containing the origin".into(),
        ));
    }
    let inversion = geometry::invert_complement(omega, InversionOptions::default())?;
    let cd = riemann_map(&inversion.domain, order, DEFAULT_MAP_TOL)?;

    let steps: Vec<f64> = LADDER.map(|k| 2f64.powi(-k)).collect();
    let r_grid: Vec<f64> = steps.iter().map(|h| 1.0 - h).collect();
    let area_r = r_grid
        .iter()
        .map(|&r| area_series(&cd, r))
        .collect::<Result<Vec<_>>>()?;
    let perimeter_r = r_grid
        .iter()
        .map(|&r| weighted_perimeter_series(&cd, p, r))
        .collect::<Result<Vec<_>>>()?;
    let cauchy = r_grid
        .iter()
        .map(|&r| cauchy_lambda_bound(&cd, p, r))
        .collect::<Result<Vec<_>>>()?;
    let (area_limit, area_limit_error) = quadrature::richardson(&steps, &area_r);
    let (perimeter_limit, perimeter_limit_error) = quadrature::richardson(&steps, &perimeter_r);

    let chain = [
        measures::isoperimetric_lhs(area_limit, p),
        cd.lambda.norm().powf(p + 1.0),
        perimeter_limit / (2.0 * PI),
    ];
    Ok(ProofReplayReport {
        p,
        lambda: cd.lambda,
        a0: cd.a(0),
        tail_energy: cd.tail_energy(),
        chain,
        r_grid,
        area_r,
        perimeter_r,
        area_limit,
        perimeter_limit,
        area_limit_error,
        perimeter_limit_error,
        area_direct: omega.area(),
        perimeter_direct: measures::weighted_perimeter(omega, p, 1024)?,
        theodorsen_residual: cd.theodorsen_residual,
        inversion_residual: inversion.residual,
        cauchy,
    })
}
