//! FFT helpers for periodic boundary data: real Fourier coefficients,
//! the conjugate-function (circle Hilbert) transform and evaluation of
//! power series on circles.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn fft_forward(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

pub fn fft_inverse(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(data.len()).process(data);
}

/// Real trigonometric coefficients `(a0, cos[1..=k], sin[1..=k])` of
/// `f(t) = a0 + Σ c_k cos kt + s_k sin kt` from `m` equispaced samples
/// `f(2πj/m)`, truncated at `order` harmonics (`order < m/2`).
pub fn real_coefficients(samples: &[f64], order: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let m = samples.len();
    assert!(2 * order < m, "order {order} needs more than {} samples", 2 * order);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    let scale = 1.0 / m as f64;
    let a0 = buf[0].re * scale;
    let cos = (1..=order).map(|k| 2.0 * buf[k].re * scale).collect();
    let sin = (1..=order).map(|k| -2.0 * buf[k].im * scale).collect();
    (a0, cos, sin)
}

/// Conjugate function on the circle: Fourier multiplier `-i sign(k)`,
/// zero mean, Nyquist mode dropped.
pub fn conjugate(samples: &[f64]) -> Vec<f64> {
    let m = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf[0] = Complex64::new(0.0, 0.0);
    let half = m / 2;
    for (k, c) in buf.iter_mut().enumerate().skip(1) {
        if m.is_multiple_of(2) && k == half {
            *c = Complex64::new(0.0, 0.0);
        } else if k < m.div_ceil(2) {
            *c *= Complex64::new(0.0, -1.0);
        } else {
            *c *= Complex64::new(0.0, 1.0);
        }
    }
    fft_inverse(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Taylor coefficients `c_0..=c_order` of a function analytic in the
/// disk from its boundary samples at `e^{2πij/m}`. Also returns the
/// largest negative-frequency magnitude, which vanishes for exactly
/// analytic data.
pub fn taylor_from_boundary(samples: &[Complex64], order: usize) -> (Vec<Complex64>, f64) {
    let m = samples.len();
    assert!(order < m / 2);
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let scale = 1.0 / m as f64;
    let coeffs = buf[..=order].iter().map(|c| c * scale).collect();
    let leak = buf[m / 2 + 1..].iter().map(|c| c.norm() * scale).fold(0.0, f64::max);
    (coeffs, leak)
}

/// Values of `Σ c_n z^n` at `z = r e^{2πij/m}`, `j = 0..m`.
pub fn eval_on_circle(coeffs: &[Complex64], r: f64, m: usize) -> Vec<Complex64> {
    assert!(coeffs.len() <= m, "series longer than the sample count");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut rn = 1.0;
    for (slot, c) in buf.iter_mut().zip(coeffs) {
        *slot = c * rn;
        rn *= r;
    }
    // Σ c_n r^n e^{2πinj/m} is an unnormalized inverse DFT
    fft_inverse(&mut buf);
    buf
}

/// Horner evaluation of a power series at a single point.
pub fn eval_series(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Coefficients of the derivative series.
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(n, c)| c * n as f64).collect()
}
