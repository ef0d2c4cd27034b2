//! Weighted boundary and volume integrals, the isoperimetric deficit,
//! the Jensen chain for star domains and the segment comparison for
//! curves through the origin's line.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, OriginLocation, Point};
use crate::quadrature::{self, GaussLegendre};

/// Default composite order (64 panels of 16 Gauss-Legendre nodes).
pub const DEFAULT_ORDER: usize = 1024;
/// Refinement kicks in for panels closer than this times `R_eq` to the origin.
const NEAR_ORIGIN: f64 = 1e-3;
const REFINE_REL_TOL: f64 = 1e-9;
const MAX_REFINE_LEVELS: u32 = 40;

/// Exponents `p` (perimeter), `q` (volume) and `β` (Green weight).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub p: f64,
    pub q: f64,
    pub beta: f64,
}

impl WeightParams {
    pub fn new(p: f64, q: f64, beta: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && beta.is_finite()) {
            return Err(Error::Range("exponents must be finite".into()));
        }
        if p < -1.0 {
            return Err(Error::Range(format!("p = {p} must be ≥ -1")));
        }
        if q <= -2.0 {
            return Err(Error::Range(format!("q = {q} must exceed -2")));
        }
        if beta > 2.0 {
            return Err(Error::Range(format!("β = {beta} must be ≤ 2")));
        }
        Ok(WeightParams { p, q, beta })
    }
}

/// `|x|^p` is smooth everywhere only for nonnegative even integers.
fn weight_is_smooth(p: f64) -> bool {
    p >= 0.0 && p.fract() == 0.0 && (p as i64) % 2 == 0
}

/// Integrates `f(z, dz)` over the boundary, with dyadic refinement of
/// the panels that come within `1e-3 R_eq` of the origin.
fn boundary_integral<F>(domain: &Domain, order: usize, refine: bool, f: F) -> Result<f64>
where
    F: Fn(Point, Complex64) -> f64,
{
    if order < 16 {
        return Err(Error::Range(format!("quadrature order {order} must be at least 16")));
    }
    let rule = GaussLegendre::new(crate::geometry::PANEL_NODES);
    let pieces = domain.pieces();
    let near = NEAR_ORIGIN * domain.equivalent_radius();
    let mut total = 0.0;
    for panel in domain.panels(order) {
        let piece = &pieces[panel.piece];
        let g = |t: f64| {
            let (z, dz) = piece.eval(t);
            f(z, dz)
        };
        let close = refine && panel_distance_to_origin(piece, panel.t0, panel.t1, &rule) < near;
        total += if close {
            let split = closest_parameter(piece, panel.t0, panel.t1);
            let mut sum = 0.0;
            for (a, b) in [(panel.t0, split), (split, panel.t1)] {
                if b - a <= 0.0 {
                    continue;
                }
                let graded = |u: f64| {
                    let (s, ds) = smoothstep(u);
                    g(a + (b - a) * s) * (b - a) * ds
                };
                sum += quadrature::adaptive(&rule, 0.0, 1.0, &graded, REFINE_REL_TOL, 0.0, MAX_REFINE_LEVELS)?;
            }
            sum
        } else {
            rule.integrate(panel.t0, panel.t1, g)
        };
    }
    Ok(total)
}

/// Degree-7 smoothstep `s(u)` with `s'` vanishing to third order at both
/// ends, so endpoint singularities `|t|^p`, `p > -1`, become integrable
/// and smoother in `u`.
fn smoothstep(u: f64) -> (f64, f64) {
    let v = 1.0 - u;
    let s = u.powi(4) * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u.powi(3));
    (s, 140.0 * u.powi(3) * v.powi(3))
}

/// Parameter in `[t0, t1]` nearest the origin: dense sampling then
/// golden-section polishing.
fn closest_parameter(piece: &crate::geometry::Piece, t0: f64, t1: f64) -> f64 {
    const SAMPLES: usize = 64;
    let dist = |t: f64| piece.eval(t).0.norm();
    let h = (t1 - t0) / SAMPLES as f64;
    let best = (0..=SAMPLES)
        .min_by(|&i, &j| dist(t0 + i as f64 * h).total_cmp(&dist(t0 + j as f64 * h)))
        .unwrap_or(0);
    let mut lo = (t0 + (best as f64 - 1.0) * h).max(t0);
    let mut hi = (t0 + (best as f64 + 1.0) * h).min(t1);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    while hi - lo > 1e-15 * (1.0 + t0.abs().max(t1.abs())) {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if dist(m1) <= dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < f64::EPSILON * 4.0 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn panel_distance_to_origin(piece: &crate::geometry::Piece, t0: f64, t1: f64, rule: &GaussLegendre) -> f64 {
    let ends = [t0, t1];
    rule.on(t0, t1)
        .map(|(t, _)| t)
        .chain(ends)
        .map(|t| piece.eval(t).0.norm())
        .fold(f64::INFINITY, f64::min)
}

/// `∫_{∂Ω} |x|^p dσ`.
pub fn weighted_perimeter(domain: &Domain, p: f64, order: usize) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::Range("p must be finite".into()));
    }
    let origin = domain.contains_origin(domain.default_origin_tolerance());
    if origin == OriginLocation::OnBoundary && p <= -1.0 {
        return Err(Error::Divergence(format!(
            "∫|x|^p dσ diverges for p = {p} with the origin on the boundary"
        )));
    }
    boundary_integral(domain, order, !weight_is_smooth(p), |z, dz| {
        z.norm().powf(p) * dz.norm()
    })
}

/// `∫_Ω |x|^q dx`.
///
/// Star domains about the origin use `∫ ρ^{q+2}/(q+2) dθ`. Everything
/// else uses the flux form `(1/(q+2)) ∫_{∂Ω} |x|^q (x·n) dσ`, which is
/// the signed polar decomposition about the origin.
pub fn weighted_volume(domain: &Domain, q: f64, order: usize) -> Result<f64> {
    if !(q > -2.0) {
        return Err(Error::Divergence(format!("∫|x|^q dx diverges for q = {q} ≤ -2")));
    }
    if order < 16 {
        return Err(Error::Range(format!("quadrature order {order} must be at least 16")));
    }
    let mut total = 0.0;
    for comp in domain.components() {
        total += match comp.radial_about_origin() {
            Some(radial) => {
                let rule = GaussLegendre::new(crate::geometry::PANEL_NODES);
                let panels = (order / crate::geometry::PANEL_NODES).max(1);
                let h = 2.0 * PI / panels as f64;
                (0..panels)
                    .map(|j| rule.integrate(j as f64 * h, (j + 1) as f64 * h, |t| radial.radius(t).powf(q + 2.0)))
                    .sum::<f64>()
                    / (q + 2.0)
            }
            None => {
                boundary_integral(comp, order, !weight_is_smooth(q), |z, dz| {
                    // x·n dσ = Im(conj(z) dz) dt for a counterclockwise boundary
                    z.norm().powf(q) * (z.conj() * dz).im
                })? / (q + 2.0)
            }
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    OutOfHypothesis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub connected: bool,
    pub origin: OriginLocation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub p: f64,
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub quad_order: usize,
}

impl DeficitReport {
    /// The inequality is asserted for every `p ≥ 0`, and for `p ∈ [-1, 0)`
    /// only on connected domains containing the origin.
    pub fn in_hypothesis(&self) -> bool {
        self.p >= 0.0 || (self.hypothesis.connected && self.hypothesis.origin == OriginLocation::Inside)
    }
}

/// `(|Ω|/π)^{(p+1)/2}`; equals 1 at `p = -1`.
pub fn isoperimetric_lhs(area: f64, p: f64) -> f64 {
    if p == -1.0 {
        1.0
    } else {
        (area / PI).powf(0.5 * (p + 1.0))
    }
}

/// Both sides of the weighted isoperimetric inequality and the verdict.
pub fn deficit(domain: &Domain, p: f64, tol: f64, order: usize) -> Result<DeficitReport> {
    if !(p >= -1.0) {
        return Err(Error::Range(format!("p = {p} must be ≥ -1")));
    }
    let origin = domain.contains_origin(domain.default_origin_tolerance());
    let connected = domain.is_connected();
    let rhs = weighted_perimeter(domain, p, order)? / (2.0 * PI);
    let lhs = isoperimetric_lhs(domain.area(), p);
    let deficit = rhs - lhs;
    let mut report = DeficitReport {
        lhs,
        rhs,
        deficit,
        p,
        hypothesis: Hypothesis { connected, origin },
        verdict: Verdict::Holds,
        quad_order: order,
    };
    report.verdict = if !report.in_hypothesis() {
        Verdict::OutOfHypothesis
    } else if deficit >= -tol {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(report)
}

/// `(2πR^{p+1}, ∫ρ^{p+1} dθ, ∫ρ^p √(ρ'²+ρ²) dθ)` for a star about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenChain {
    pub disk_term: f64,
    pub polar_term: f64,
    pub perimeter_term: f64,
}

impl JensenChain {
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.disk_term <= self.polar_term + slack && self.polar_term <= self.perimeter_term + slack
    }
}

pub fn jensen_chain(domain: &Domain, p: f64) -> Result<JensenChain> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("Jensen chain needs p ≥ 1, got {p}")));
    }
    let star = match domain {
        Domain::FourierStar(s) if s.center() == Complex64::new(0.0, 0.0) => s.clone(),
        Domain::Disk(d) if d.center() == Complex64::new(0.0, 0.0) => {
            match Domain::fourier_star(d.center(), d.radius(), vec![], vec![])? {
                Domain::FourierStar(s) => s,
                _ => unreachable!(),
            }
        }
        _ => {
            return Err(Error::Precondition(
                "Jensen chain needs a star domain centered at the origin".into(),
            ))
        }
    };
    // trapezoid is spectrally accurate for trigonometric integrands
    let m = 1024.max(64 * star.order());
    let radius = domain.equivalent_radius();
    let disk_term = 2.0 * PI * radius.powf(p + 1.0);
    let polar_term = quadrature::periodic_trapezoid(m, |t| star.radius(t).0.powf(p + 1.0));
    let perimeter_term = quadrature::periodic_trapezoid(m, |t| {
        let (r, dr) = star.radius(t);
        r.powf(p) * (r * r + dr * dr).sqrt()
    });
    Ok(JensenChain {
        disk_term,
        polar_term,
        perimeter_term,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentComparison {
    pub curve: f64,
    pub segment: f64,
}

/// `∫_γ |x|^p dσ` along a sampled path from `a` to `b`, against the
/// same integral along the straight segment `[a, b]`.
///
/// The path is the piecewise cubic through consecutive samples (local
/// four-point interpolation), so sampling error is `O(h⁴)`.
pub fn segment_minimality(a: Point, b: Point, curve: &[Point], p: f64) -> Result<SegmentComparison> {
    if !(p >= 0.0) {
        return Err(Error::Precondition(format!("segment comparison needs p ≥ 0, got {p}")));
    }
    if curve.len() < 64 {
        return Err(Error::Precondition(format!(
            "curve needs at least 64 samples, got {}",
            curve.len()
        )));
    }
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return Err(Error::Precondition("segment endpoints coincide".into()));
    }
    // distance from the origin to the line through a and b
    let line_dist = (a.conj() * dir).im.abs() / len;
    if line_dist > 1e-9 * len.max(1.0) {
        return Err(Error::Precondition(format!(
            "origin is {line_dist:e} away from the line through a and b"
        )));
    }
    let rule = GaussLegendre::new(8);
    let n = curve.len();
    let mut curve_integral = 0.0;
    for i in 0..n - 1 {
        // stencil of 4 consecutive samples containing [i, i+1]
        let start = i.saturating_sub(1).min(n - 4);
        let xs: [f64; 4] = std::array::from_fn(|k| (start + k) as f64);
        let ys: [Point; 4] = std::array::from_fn(|k| curve[start + k]);
        let integrand = |u: f64| {
            let (z, dz) = lagrange4(&xs, &ys, u);
            z.norm().powf(p) * dz.norm()
        };
        // the weight has a kink where the path crosses the origin
        curve_integral += quadrature::adaptive(&rule, i as f64, (i + 1) as f64, &integrand, 1e-13, 1e-300, 60)?;
    }
    // along the line, |x| = |s - s0| with s0 the origin's projection
    let s0 = -(a.conj() * dir).re / len;
    let antiderivative = |s: f64| {
        let d = s - s0;
        d.signum() * d.abs().powf(p + 1.0) / (p + 1.0)
    };
    let segment = antiderivative(len) - antiderivative(0.0);
    Ok(SegmentComparison {
        curve: curve_integral,
        segment,
    })
}

fn lagrange4(xs: &[f64; 4], ys: &[Point; 4], u: f64) -> (Point, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for j in 0..4 {
        let mut basis = 1.0;
        let mut dbasis = 0.0;
        for m in 0..4 {
            if m == j {
                continue;
            }
            let denom = xs[j] - xs[m];
            // product rule on the fly
            dbasis = dbasis * (u - xs[m]) / denom + basis / denom;
            basis *= (u - xs[m]) / denom;
        }
        value += ys[j] * basis;
        deriv += ys[j] * dbasis;
    }
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Point {
        Complex64::new(x, y)
    }

    /// Adaptive Simpson on a closure, independent of the Gauss-Legendre path.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn weighted_perimeter_examples() {
        let v = weighted_perimeter(&Domain::ball(2.0).unwrap(), 1.0, 64).unwrap();
        assert!((v - 8.0 * PI).abs() < 1e-12);
        let sq = Domain::polygon(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]).unwrap();
        assert!((weighted_perimeter(&sq, 0.0, 64).unwrap() - 8.0).abs() < 1e-13);
        let off = Domain::disk(c(0.5, 0.0), 1.0).unwrap();
        let oracle = simpson(
            &|t| (c(0.5, 0.0) + Complex64::from_polar(1.0, t)).norm_sqr(),
            0.0,
            2.0 * PI,
            1e-13,
        );
        assert!((oracle - 2.5 * PI).abs() < 1e-10);
        assert!((weighted_perimeter(&off, 2.0, 64).unwrap() - 2.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn singular_weight_on_boundary() {
        // origin on the unit circle centered at (1,0): ∫|x|^{-1/2} dσ
        let d = Domain::disk(c(1.0, 0.0), 1.0).unwrap();
        let f = |t: f64| (c(1.0, 0.0) + Complex64::from_polar(1.0, t)).norm().powf(-0.5);
        // |1 + e^{it}| = 2|cos(t/2)|, singular at t = π; split there
        let oracle = simpson(&f, 0.0, PI - 1e-14, 1e-12) + simpson(&f, PI + 1e-14, 2.0 * PI, 1e-12);
        let v = weighted_perimeter(&d, -0.5, 256).unwrap();
        assert!((v - oracle).abs() < 1e-5 * oracle, "{v} vs {oracle}");
        assert!(matches!(weighted_perimeter(&d, -1.0, 256), Err(Error::Divergence(_))));
    }

    #[test]
    fn weighted_volume_examples() {
        let b = Domain::ball(1.0).unwrap();
        assert!((weighted_volume(&b, 0.0, 64).unwrap() - PI).abs() < 1e-13);
        assert!((weighted_volume(&b, -1.0, 64).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((weighted_volume(&b, 2.0, 64).unwrap() - PI / 2.0).abs() < 1e-13);
        assert!(matches!(weighted_volume(&b, -2.0, 64), Err(Error::Divergence(_))));
        // flux route on an off-origin disk with q = 2: ∫|x|² = πR²(R²/2 + |c|²)
        let d = Domain::disk(c(3.0, 0.0), 1.0).unwrap();
        assert!((weighted_volume(&d, 2.0, 64).unwrap() - PI * (0.5 + 9.0)).abs() < 1e-11);
        // polygon q = 0 is area
        let sq = Domain::polygon(vec![c(1.0, 1.0), c(2.0, 1.0), c(2.0, 3.0), c(1.0, 3.0)]).unwrap();
        assert!((weighted_volume(&sq, 0.0, 64).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn deficit_examples() {
        for p in [-0.5, 0.0, 1.0, 3.0] {
            let r = deficit(&Domain::ball(2.0).unwrap(), p, 1e-9, 256).unwrap();
            assert!(r.deficit.abs() < 1e-9, "p = {p}: {}", r.deficit);
            assert_eq!(r.verdict, Verdict::Holds);
        }
        let r = deficit(&Domain::disk(c(0.5, 0.0), 1.0).unwrap(), 1.0, 1e-9, 256).unwrap();
        assert!(r.deficit > 0.0);
        let u = Domain::union(vec![
            Domain::ball(1.0).unwrap(),
            Domain::disk(c(30.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        let r = deficit(&u, -0.5, 1e-9, 256).unwrap();
        assert!(r.deficit < 0.0);
        assert_eq!(r.verdict, Verdict::OutOfHypothesis);
        assert!(!r.hypothesis.connected);
        // p = -1 convention
        let r = deficit(&Domain::ball(3.0).unwrap(), -1.0, 1e-9, 256).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(r.deficit.abs() < 1e-12);
        assert!(deficit(&Domain::ball(1.0).unwrap(), -1.5, 1e-9, 256).is_err());
    }

    #[test]
    fn deficit_json_layout() {
        let r = deficit(&Domain::ball(1.0).unwrap(), 0.0, 1e-9, 64).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["hypothesis"]["origin"], "inside");
        assert_eq!(v["verdict"], "holds");
        assert_eq!(v["quad_order"], 64);
    }

    #[test]
    fn jensen_chain_examples() {
        let ch = jensen_chain(&Domain::ball(1.5).unwrap(), 2.0).unwrap();
        let exact = 2.0 * PI * 1.5f64.powi(3);
        for v in [ch.disk_term, ch.polar_term, ch.perimeter_term] {
            assert!((v - exact).abs() < 1e-12);
        }
        let star = Domain::fourier_star(c(0.0, 0.0), 1.0, vec![0.3], vec![]).unwrap();
        for p in [1.0, 2.0] {
            let ch = jensen_chain(&star, p).unwrap();
            let t2 = simpson(&|t| (1.0 + 0.3 * t.cos()).powf(p + 1.0), 0.0, 2.0 * PI, 1e-13);
            let t3 = simpson(
                &|t| {
                    let r = 1.0 + 0.3 * t.cos();
                    let dr = -0.3 * t.sin();
                    r.powf(p) * (r * r + dr * dr).sqrt()
                },
                0.0,
                2.0 * PI,
                1e-13,
            );
            assert!((ch.polar_term - t2).abs() < 1e-9);
            assert!((ch.perimeter_term - t3).abs() < 1e-9);
            assert!(ch.disk_term < ch.polar_term && ch.polar_term < ch.perimeter_term);
        }
        assert!(jensen_chain(&star, 0.5).is_err());
        assert!(jensen_chain(&star.translated(c(0.1, 0.0)), 1.0).is_err());
    }

    fn half_circle(n: usize) -> Vec<Point> {
        (0..n)
            .map(|j| Complex64::from_polar(1.0, PI - PI * j as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn segment_minimality_examples() {
        let (a, b) = (c(-1.0, 0.0), c(1.0, 0.0));
        let seg: Vec<Point> = (0..64).map(|j| a + (b - a) * (j as f64 / 63.0)).collect();
        let r = segment_minimality(a, b, &seg, 1.0).unwrap();
        assert!((r.curve - r.segment).abs() < 1e-12);
        let r = segment_minimality(a, b, &half_circle(128), 0.0).unwrap();
        assert!((r.curve - PI).abs() < 1e-6 && (r.segment - 2.0).abs() < 1e-15);
        let r = segment_minimality(a, b, &half_circle(128), 1.0).unwrap();
        assert!((r.curve - PI).abs() < 1e-6 && (r.segment - 1.0).abs() < 1e-15);
        assert!(segment_minimality(c(-1.0, 1.0), c(1.0, 1.0), &half_circle(128), 1.0).is_err());
        assert!(segment_minimality(a, b, &half_circle(10), 1.0).is_err());
    }

    #[test]
    fn segment_with_origin_outside_interval() {
        // a = (1,0), b = (3,0): ∫_1^3 x² dx = 26/3
        let (a, b) = (c(1.0, 0.0), c(3.0, 0.0));
        let seg: Vec<Point> = (0..64).map(|j| a + (b - a) * (j as f64 / 63.0)).collect();
        let r = segment_minimality(a, b, &seg, 2.0).unwrap();
        assert!((r.segment - 26.0 / 3.0).abs() < 1e-13);
        assert!((r.curve - 26.0 / 3.0).abs() < 1e-12);
    }
}
