//! Truncated complex power series.

use num_complex::Complex64;

/// Product `a·b` truncated to `len` terms.
pub fn multiply(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Coefficients of `1/a` up to `len` terms by the recursion
/// `q_0 = 1/a_0`, `q_n = -(1/a_0) Σ_{k=1..n} a_k q_{n-k}`.
///
/// The recursion runs on `a(ρz)` with `ρ` chosen so the rescaled
/// coefficients stay bounded, then the result is scaled back.
pub fn reciprocal(a: &[Complex64], len: usize) -> Vec<Complex64> {
    assert!(
        !a.is_empty() && a[0] != Complex64::new(0.0, 0.0),
        "reciprocal needs a_0 ≠ 0"
    );
    // growth rate estimate of |a_n/a_0|^{1/n}
    let a0 = a[0].norm();
    let growth = a
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(n, c)| (c.norm() / a0).powf(1.0 / n as f64))
        .fold(0.0, f64::max);
    let rho = if growth > 1.0 { 1.0 / growth } else { 1.0 };
    let scaled: Vec<Complex64> = a
        .iter()
        .take(len)
        .enumerate()
        .map(|(n, c)| c * rho.powi(n as i32))
        .collect();
    let inv0 = 1.0 / scaled[0];
    let mut q = vec![Complex64::new(0.0, 0.0); len];
    q[0] = inv0;
    for n in 1..len {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n.min(scaled.len() - 1) {
            acc += scaled[k] * q[n - k];
        }
        q[n] = -acc * inv0;
    }
    if rho != 1.0 {
        for (n, c) in q.iter_mut().enumerate() {
            *c /= rho.powi(n as i32);
        }
    }
    q
}

/// Antiderivative with constant term `c0`.
pub fn integrate(a: &[Complex64], c0: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(c0);
    out.extend(a.iter().enumerate().map(|(n, c)| c / (n + 1) as f64));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn reciprocal_of_geometric_series() {
        // 1/(1 + z/2) = Σ (-1/2)^n z^n
        let q = reciprocal(&[c(1.0), c(0.5)], 20);
        for (n, v) in q.iter().enumerate() {
            assert!((v - c((-0.5f64).powi(n as i32))).norm() < 1e-15);
        }
    }

    #[test]
    fn reciprocal_times_series_is_one() {
        let a = vec![c(2.0), Complex64::new(0.3, -0.4), c(3.0), Complex64::new(0.0, 1.5)];
        let q = reciprocal(&a, 12);
        let prod = multiply(&a, &q, 12);
        assert!((prod[0] - c(1.0)).norm() < 1e-14);
        for v in &prod[1..] {
            assert!(v.norm() < 1e-9 * 3f64.powi(12), "{v}");
        }
    }

    #[test]
    fn integrate_shifts_coefficients() {
        let i = integrate(&[c(1.0), c(2.0), c(3.0)], c(5.0));
        assert_eq!(i, vec![c(5.0), c(1.0), c(1.0), c(1.0)]);
    }
}
