//! Seeded random domains and profiles.
//!
//! Every sample index gets its own ChaCha stream derived from
//! `(seed, index)`, so a batch is reproducible regardless of how it is
//! split across threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Domain, FourierStar, Point};

/// Independent stream for sample `index` of a batch seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random Fourier radius functions `ρ = a0 (1 + Σ c_k cos kθ + s_k sin kθ)`
/// with `c_k, s_k` uniform in `±amplitude/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarSampler {
    pub max_harmonics: usize,
    pub amplitude: f64,
    /// Rejection threshold: `min ρ > min_ratio · a0`.
    pub min_ratio: f64,
    /// Optional cap on `max |ρ'/ρ|`.
    pub max_slope: Option<f64>,
}

impl Default for StarSampler {
    fn default() -> Self {
        StarSampler {
            max_harmonics: 6,
            amplitude: 0.4,
            min_ratio: 0.2,
            max_slope: None,
        }
    }
}

const CHECK_GRID: usize = 1024;
const MAX_REJECTIONS: usize = 10_000;

impl StarSampler {
    /// Gentler stars whose inverted complements are well inside the
    /// Theodorsen convergence region.
    pub fn mild() -> Self {
        StarSampler {
            max_harmonics: 4,
            amplitude: 0.15,
            min_ratio: 0.5,
            max_slope: Some(0.5),
        }
    }

    /// `(cos, sin)` coefficients relative to `a0 = 1`.
    pub fn coefficients<R: Rng>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        for _ in 0..MAX_REJECTIONS {
            let k = rng.gen_range(1..=self.max_harmonics.max(1));
            let mut cos = Vec::with_capacity(k);
            let mut sin = Vec::with_capacity(k);
            for j in 1..=k {
                let bound = self.amplitude / j as f64;
                cos.push(rng.gen_range(-bound..=bound));
                sin.push(rng.gen_range(-bound..=bound));
            }
            if self.accepts(&cos, &sin) {
                return (cos, sin);
            }
        }
        (Vec::new(), Vec::new())
    }

    fn accepts(&self, cos: &[f64], sin: &[f64]) -> bool {
        let mut min_rho = f64::INFINITY;
        let mut max_slope: f64 = 0.0;
        for j in 0..CHECK_GRID {
            let theta = 2.0 * PI * j as f64 / CHECK_GRID as f64;
            let (rho, drho) = FourierStar::eval_radius(1.0, cos, sin, theta);
            min_rho = min_rho.min(rho);
            max_slope = max_slope.max((drho / rho).abs());
        }
        min_rho > self.min_ratio && self.max_slope.is_none_or(|cap| max_slope < cap)
    }

    /// A star about `center` with mean radius `a0`.
    pub fn star<R: Rng>(&self, rng: &mut R, center: Point, a0: f64) -> Domain {
        let (cos, sin) = self.coefficients(rng);
        let scale = |v: Vec<f64>| v.into_iter().map(|c| c * a0).collect();
        Domain::fourier_star(center, a0, scale(cos), scale(sin)).expect("sampler keeps ρ positive")
    }
}

/// Star about the origin with `a0` uniform in `[0.5, 2]`.
pub fn origin_star<R: Rng>(rng: &mut R, sampler: &StarSampler) -> Domain {
    let a0 = rng.gen_range(0.5..=2.0);
    sampler.star(rng, Complex64::new(0.0, 0.0), a0)
}

/// Polygon star-shaped about its center: 3 to 9 vertices at sorted
/// random angles with radii in `[0.5, 1.5]`.
pub fn star_polygon<R: Rng>(rng: &mut R, center: Point) -> Domain {
    loop {
        let n = rng.gen_range(3..=9);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        // gaps below π keep the center inside
        let max_gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(angles[0] + 2.0 * PI - angles[n - 1]))
            .fold(0.0, f64::max);
        if max_gap >= 0.95 * PI {
            continue;
        }
        let vertices = angles
            .iter()
            .map(|&a| center + Complex64::from_polar(rng.gen_range(0.5..=1.5), a))
            .collect();
        if let Ok(d) = Domain::polygon(vertices) {
            return d;
        }
    }
}

/// Polygon or translated star whose closure misses the origin, with
/// its center between 1.05 and 7 away from it. Samples that cover the
/// origin or pass within `1e-3` of it are redrawn.
pub fn origin_free<R: Rng>(rng: &mut R, sampler: &StarSampler) -> Domain {
    loop {
        let dist = rng.gen_range(0.05..=3.0) + rng.gen_range(1.0..=4.0);
        let center = Complex64::from_polar(dist, rng.gen_range(0.0..2.0 * PI));
        let d = if rng.gen_bool(0.5) {
            star_polygon(rng, center)
        } else {
            let a0 = rng.gen_range(0.3..=1.0);
            sampler.star(rng, center, a0)
        };
        if !d.contains(Complex64::new(0.0, 0.0)) && d.boundary_distance(Complex64::new(0.0, 0.0)) > 1e-3 {
            return d;
        }
    }
}

/// Decreasing piecewise-linear profile with `knots` interior
/// breakpoints: `η(0) ∈ [0.5, 2]`, support end in `[0.5, 2]`.
pub fn profile_breakpoints<R: Rng>(rng: &mut R, knots: usize) -> Vec<(f64, f64)> {
    let top = rng.gen_range(0.5..=2.0);
    let end = rng.gen_range(0.5..=2.0);
    let mut s: Vec<f64> = (0..knots).map(|_| rng.gen_range(0.0..end)).collect();
    s.sort_by(f64::total_cmp);
    let mut eta: Vec<f64> = (0..knots).map(|_| rng.gen_range(0.0..top)).collect();
    eta.sort_by(|a, b| b.total_cmp(a));
    let mut points = vec![(0.0, top)];
    for (si, ei) in s.into_iter().zip(eta) {
        if si > points.last().map_or(0.0, |p| p.0) {
            points.push((si, ei));
        }
    }
    points.push((end, 0.0));
    points
}
