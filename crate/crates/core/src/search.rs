//! Deficit scans over shape families: random Fourier perturbations of
//! the unit disk at fixed area, translated disks, and the separation at
//! which two disjoint balls start to violate the inequality.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::Domain;
use crate::measures::{self, DeficitReport, Verdict};
use crate::random;
use crate::report;

/// Deficit slack below which an in-hypothesis point counts as a violation.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub index: usize,
    /// Scan parameter: the offset for translations, the sample index for
    /// perturbations, the separation for two-ball scans.
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub verdict: Verdict,
}

impl ScanPoint {
    fn new(index: usize, param: f64, r: &DeficitReport) -> Self {
        ScanPoint {
            index,
            param,
            lhs: r.lhs,
            rhs: r.rhs,
            deficit: r.deficit,
            verdict: r.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub kind: String,
    /// `None` when `p` itself is the scanned parameter.
    pub p: Option<f64>,
    pub seed: Option<u64>,
    pub points: usize,
    pub min_deficit: f64,
    pub argmin: f64,
    /// Parameters where the deficit changes sign, linearly interpolated.
    pub crossings: Vec<f64>,
    /// Some in-hypothesis point has deficit below `-tol`.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub summary: ScanSummary,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    fn build(kind: &str, p: Option<f64>, seed: Option<u64>, points: Vec<ScanPoint>) -> Self {
        let (min_deficit, argmin) = points
            .iter()
            .map(|pt| (pt.deficit, pt.param))
            .fold((f64::INFINITY, f64::NAN), |acc, x| if x.0 < acc.0 { x } else { acc });
        let crossings = points
            .windows(2)
            .filter(|w| (w[0].deficit < 0.0) != (w[1].deficit < 0.0))
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                a.param + (b.param - a.param) * a.deficit / (a.deficit - b.deficit)
            })
            .collect();
        let violation = points.iter().any(|pt| pt.verdict == Verdict::Fails);
        ScanResult {
            summary: ScanSummary {
                kind: kind.to_string(),
                p,
                seed,
                points: points.len(),
                min_deficit,
                argmin,
                crossings,
                violation,
            },
            points,
        }
    }

    /// `index,param,lhs,rhs,deficit,verdict` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,param,lhs,rhs,deficit,verdict\n");
        for pt in &self.points {
            let verdict = match pt.verdict {
                Verdict::Holds => "holds",
                Verdict::Fails => "fails",
                Verdict::OutOfHypothesis => "out_of_hypothesis",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                pt.index,
                report::float(pt.param),
                report::float(pt.lhs),
                report::float(pt.rhs),
                report::float(pt.deficit),
                verdict
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub tol: f64,
    pub order: usize,
    pub exec: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tol: DEFAULT_TOL,
            order: measures::DEFAULT_ORDER,
            exec: Execution::default(),
        }
    }
}

/// Perturbation `ρ = 1 + Σ_{k≤K} c_k cos kθ + s_k sin kθ`, `c_k, s_k`
/// uniform in `±amp/k`, rescaled to area `π`.
pub fn perturbed_disk<R: Rng>(rng: &mut R, harmonics: usize, amp: f64) -> Result<Domain> {
    let mut cos = Vec::with_capacity(harmonics);
    let mut sin = Vec::with_capacity(harmonics);
    for k in 1..=harmonics {
        let bound = amp / k as f64;
        let (c, s) = if bound > 0.0 {
            (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
        } else {
            (0.0, 0.0)
        };
        cos.push(c);
        sin.push(s);
    }
    let d = Domain::fourier_star(Complex64::new(0.0, 0.0), 1.0, cos, sin)
        .map_err(|e| Error::Precondition(format!("perturbation amplitude {amp} too large: {e}")))?;
    d.scaled((PI / d.area()).sqrt())
}

pub fn perturbation_scan(
    p: f64,
    harmonics: usize,
    amp: f64,
    n: usize,
    seed: u64,
    opts: ScanOptions,
) -> Result<ScanResult> {
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(Error::Range(format!("amplitude {amp} must be finite and ≥ 0")));
    }
    let points = opts
        .exec
        .map(n, |i| {
            let mut rng = random::stream(seed, i as u64);
            let d = perturbed_disk(&mut rng, harmonics, amp)?;
            let r = measures::deficit(&d, p, opts.tol, opts.order)?;
            Ok(ScanPoint::new(i, i as f64, &r))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::build("perturbation", Some(p), Some(seed), points))
}

/// Deficit of `B_R((c, 0))` for each offset `c`.
pub fn translate_scan(radius: f64, p: f64, offsets: &[f64], opts: ScanOptions) -> Result<ScanResult> {
    for &c in offsets {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Range(format!("offset {c} must be finite and ≥ 0")));
        }
        if p < 0.0 && !(c < radius) {
            return Err(Error::Precondition(format!(
                "offset {c} puts the origin outside B_{radius} while p = {p} < 0"
            )));
        }
    }
    let points = opts
        .exec
        .map_slice(offsets, |&c| -> Result<(f64, DeficitReport)> {
            let d = Domain::disk(Complex64::new(c, 0.0), radius)?;
            Ok((c, measures::deficit(&d, p, opts.tol, opts.order)?))
        })
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map(|(c, rep)| ScanPoint::new(i, c, &rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::build("translate", Some(p), None, points))
}

/// Deficit of one domain over a list of exponents.
pub fn exponent_scan(domain: &Domain, ps: &[f64], opts: ScanOptions) -> Result<ScanResult> {
    let points = opts
        .exec
        .map_slice(ps, |&p| measures::deficit(domain, p, opts.tol, opts.order))
        .into_iter()
        .zip(ps)
        .enumerate()
        .map(|(i, (r, &p))| r.map(|rep| ScanPoint::new(i, p, &rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::build("exponent", None, None, points))
}

/// `B_r(0) ∪ B_r((s, 0))`.
pub fn two_balls(radius: f64, separation: f64) -> Result<Domain> {
    Domain::union(vec![
        Domain::ball(radius)?,
        Domain::disk(Complex64::new(separation, 0.0), radius)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub radius: f64,
    pub p: f64,
    /// Midpoint of the final bracket.
    pub separation: f64,
    pub bracket: [f64; 2],
    /// Deficits at the bracket ends (nonnegative, negative).
    pub deficits: [f64; 2],
    pub evaluations: usize,
}

const FIRST_SEPARATION: f64 = 2.5;
const MAX_SEPARATION: f64 = 1e6;
const BRACKET_WIDTH: f64 = 1e-6;

/// Bisection for the separation where the two-ball deficit turns negative.
pub fn two_ball_threshold(radius: f64, p: f64, order: usize) -> Result<Threshold> {
    if !(-1.0..0.0).contains(&p) {
        return Err(Error::Range(format!("p = {p} must lie in [-1, 0)")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Range(format!("radius {radius} must be positive")));
    }
    let mut evaluations = 0;
    let mut eval = |s: f64| -> Result<f64> {
        evaluations += 1;
        Ok(measures::deficit(&two_balls(radius, s)?, p, 0.0, order)?.deficit)
    };
    let mut lo = FIRST_SEPARATION * radius;
    let mut d_lo = eval(lo)?;
    if d_lo < 0.0 {
        return Err(Error::Precondition(format!(
            "deficit already negative at separation {lo}"
        )));
    }
    let mut hi = lo;
    let mut d_hi = d_lo;
    while d_hi >= 0.0 {
        if hi >= MAX_SEPARATION * radius {
            return Err(Error::NotFound {
                max_separation: MAX_SEPARATION * radius,
            });
        }
        lo = hi;
        d_lo = d_hi;
        hi = (2.0 * hi).min(MAX_SEPARATION * radius);
        d_hi = eval(hi)?;
    }
    while hi - lo >= BRACKET_WIDTH * radius {
        let mid = 0.5 * (lo + hi);
        let d = eval(mid)?;
        if d >= 0.0 {
            lo = mid;
            d_lo = d;
        } else {
            hi = mid;
            d_hi = d;
        }
    }
    Ok(Threshold {
        radius,
        p,
        separation: 0.5 * (lo + hi),
        bracket: [lo, hi],
        deficits: [d_lo, d_hi],
        evaluations,
    })
}

/// Deficits along a separation grid for `B_r(0) ∪ B_r((s, 0))`.
pub fn two_ball_scan(radius: f64, p: f64, separations: &[f64], opts: ScanOptions) -> Result<ScanResult> {
    let points = opts
        .exec
        .map_slice(separations, |&s| -> Result<DeficitReport> {
            measures::deficit(&two_balls(radius, s)?, p, opts.tol, opts.order)
        })
        .into_iter()
        .zip(separations)
        .enumerate()
        .map(|(i, (r, &s))| r.map(|rep| ScanPoint::new(i, s, &rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::build("two_ball", Some(p), None, points))
}
