//! Caffarelli-Kohn-Nirenberg exponents and the Hardy-Sobolev functional
//! `‖u‖_{L^r} ≤ (π^{1/r}/2π) ∫|∇u||x|^p dx`, `r = 2/(p+1)`, on gauge
//! test functions `u = η(σ(x))`.
//!
//! With `x = s ρ(θ) e^{iθ}` the gauge is `σ = s`, `dx = sρ² ds dθ` and
//! `|∇σ| = √(ρ² + ρ'²)/ρ²`, so every integral splits into a radial
//! profile factor and an angular factor of the base domain.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, RadialFunction};
use crate::measures;
use crate::quadrature::{self, GaussLegendre};
use crate::random::{self, StarSampler};

/// Tolerance for the equalities in the CKN conditions.
const EXPONENT_TOL: f64 = 1e-12;
/// Trapezoid samples for angular integrals.
const ANGULAR_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub alpha: f64,
    pub gamma: f64,
    pub r: f64,
}

impl ExponentTriple {
    pub fn new(alpha: f64, gamma: f64, r: f64) -> Self {
        ExponentTriple { alpha, gamma, r }
    }
}

/// `r > 0`, `0 ≤ α - γ ≤ 1` and `0 < 1/r + γ/2 = (α+1)/2`.
pub fn ckn_admissible(e: ExponentTriple) -> bool {
    let gap = e.alpha - e.gamma;
    let balance = 1.0 / e.r + 0.5 * e.gamma;
    e.r > 0.0
        && (-EXPONENT_TOL..=1.0 + EXPONENT_TOL).contains(&gap)
        && balance > 0.0
        && (balance - 0.5 * (e.alpha + 1.0)).abs() <= EXPONENT_TOL
}

/// `(p, q) ↦ (α, γ, r) = (p, q/r, (q+2)/(p+1))`.
pub fn exponent_map(p: f64, q: f64) -> Result<ExponentTriple> {
    if !(p > -1.0) || !(q > -2.0) {
        return Err(Error::Range(format!("need p > -1 and q > -2, got p = {p}, q = {q}")));
    }
    let r = (q + 2.0) / (p + 1.0);
    if r < 1.0 {
        return Err(Error::Range(format!("r = {r} < 1 for p = {p}, q = {q}")));
    }
    Ok(ExponentTriple::new(p, q / r, r))
}

/// `-2 < p - 1 ≤ q ≤ 2p`, with the same tolerance as [`ckn_admissible`].
pub fn isoperimetric_range(p: f64, q: f64) -> bool {
    -2.0 < p - 1.0 && p - 1.0 <= q + EXPONENT_TOL && q <= 2.0 * p + EXPONENT_TOL
}

/// Nonincreasing piecewise-linear `η` with compact support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    /// `(s, η(s))`, starting at `s = 0` and ending with `η = 0`.
    pub breakpoints: Vec<(f64, f64)>,
}

impl Profile {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidDomain(format!("profile: {m}")));
        if breakpoints.len() < 2 {
            return bad("needs at least two breakpoints");
        }
        if breakpoints.iter().any(|(s, e)| !(s.is_finite() && e.is_finite())) {
            return bad("breakpoints must be finite");
        }
        if breakpoints[0].0 != 0.0 || !(breakpoints[0].1 > 0.0) {
            return bad("must start at s = 0 with η(0) > 0");
        }
        if breakpoints.last().map(|b| b.1) != Some(0.0) {
            return bad("must end with η = 0");
        }
        for w in breakpoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("s must be strictly increasing");
            }
            if w[1].1 > w[0].1 || w[1].1 < 0.0 {
                return bad("η must be nonincreasing and nonnegative");
            }
        }
        Ok(Profile { breakpoints })
    }

    /// Tent `η(s) = max(0, 1 - s)`.
    pub fn tent() -> Self {
        Profile {
            breakpoints: vec![(0.0, 1.0), (1.0, 0.0)],
        }
    }

    /// `1` on `[0, 1-ε]`, linear down to `0` at `1`.
    pub fn ramp(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Range(format!("ramp width {eps} must lie in (0, 1)")));
        }
        Ok(Profile {
            breakpoints: vec![(0.0, 1.0), (1.0 - eps, 1.0), (1.0, 0.0)],
        })
    }

    pub fn max(&self) -> f64 {
        self.breakpoints[0].1
    }

    pub fn support(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |b| b.0)
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s >= self.support() {
            return 0.0;
        }
        let s = s.max(0.0);
        let k = self.breakpoints.partition_point(|b| b.0 <= s).saturating_sub(1);
        let (s0, e0) = self.breakpoints[k];
        let (s1, e1) = self.breakpoints[k + 1];
        e0 + (e1 - e0) * (s - s0) / (s1 - s0)
    }

    fn pieces(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.breakpoints.windows(2).map(|w| (w[0], w[1]))
    }

    /// `∫₀^∞ η(s)^r s ds`, exact per linear piece.
    pub fn moment(&self, r: f64) -> f64 {
        self.pieces()
            .map(|((s0, e0), (s1, e1))| {
                let m = (e1 - e0) / (s1 - s0);
                if m == 0.0 {
                    return e0.powf(r) * 0.5 * (s1 * s1 - s0 * s0);
                }
                // s = s0 + (η - e0)/m, ds = dη/m
                let c = s0 - e0 / m;
                let prim = |e: f64| c * e.powf(r + 1.0) / (r + 1.0) + e.powf(r + 2.0) / (m * (r + 2.0));
                (prim(e1) - prim(e0)) / m
            })
            .sum()
    }

    /// `∫₀^∞ |η'(s)| s^{p+1} ds`, exact per linear piece.
    pub fn gradient_moment(&self, p: f64) -> f64 {
        self.pieces()
            .map(|((s0, e0), (s1, e1))| {
                let slope = (e0 - e1) / (s1 - s0);
                slope * (s1.powf(p + 2.0) - s0.powf(p + 2.0)) / (p + 2.0)
            })
            .sum()
    }

    /// `s(t) = sup{s : η(s) > t}`; level sets of `u` are `s(t)·base`.
    pub fn level_scale(&self, t: f64) -> f64 {
        if t >= self.max() {
            return 0.0;
        }
        let mut out = 0.0;
        for ((s0, e0), (s1, e1)) in self.pieces() {
            if e0 > t {
                out = if e1 > t {
                    s1
                } else {
                    s0 + (s1 - s0) * (e0 - t) / (e0 - e1)
                };
            }
        }
        out
    }

    /// Distinct breakpoint values of `η` in increasing order: the
    /// `t`-panels on which `s(t)` is linear.
    fn level_panels(&self) -> Vec<(f64, f64)> {
        let mut levels: Vec<f64> = self.breakpoints.iter().map(|b| b.1).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `∫₀^M f(s(t)) dt` by Gauss-Legendre on the level panels.
    fn integrate_levels<F: Fn(f64) -> f64>(&self, levels: usize, f: F) -> f64 {
        let panels = self.level_panels();
        let per_panel = levels.div_ceil(panels.len().max(1)).max(8);
        let rule = GaussLegendre::new(per_panel);
        panels
            .iter()
            .map(|&(a, b)| rule.integrate(a, b, |t| f(self.level_scale(t))))
            .sum()
    }
}

/// `u(x) = η(σ(x))` with `σ` the gauge of a base domain star-shaped
/// about the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    base: Domain,
    radial: RadialFunction,
    profile: Profile,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestFunctionSpec {
    base: Domain,
    profile: Profile,
}

impl TestFunction {
    pub fn new(base: Domain, profile: Profile) -> Result<Self> {
        let radial = base.radial_about_origin().ok_or_else(|| {
            Error::Precondition("test function base must be a disk or centered star containing the origin".into())
        })?;
        let profile = Profile::new(profile.breakpoints)?;
        Ok(TestFunction { base, radial, profile })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TestFunctionSpec = serde_json::from_str(text)?;
        Self::new(spec.base, spec.profile)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&TestFunctionSpec {
            base: self.base.clone(),
            profile: self.profile.clone(),
        })?)
    }

    pub fn base(&self) -> &Domain {
        &self.base
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn gauge(&self, x: Point) -> f64 {
        if x.norm() == 0.0 {
            return 0.0;
        }
        x.norm() / self.radial.radius(x.arg())
    }

    pub fn value(&self, x: Point) -> f64 {
        self.profile.eval(self.gauge(x))
    }

    /// `u(x/λ)`: same profile over `λ·base`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        Self::new(self.base.scaled(factor)?, self.profile.clone())
    }

    /// `∫ρ^p √(ρ² + ρ'²) dθ`, the weighted perimeter of the base.
    fn angular_perimeter(&self, p: f64) -> f64 {
        quadrature::periodic_trapezoid(ANGULAR_SAMPLES, |th| {
            let (rho, drho) = self.radial.eval(th);
            rho.powf(p) * rho.hypot(drho)
        })
    }
}

fn check_p(p: f64) -> Result<f64> {
    if !(p > -1.0 && p <= 1.0) {
        return Err(Error::Range(format!("p = {p} must lie in (-1, 1]")));
    }
    Ok(2.0 / (p + 1.0))
}

fn best_constant(r: f64) -> f64 {
    PI.powf(1.0 / r) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsRatio {
    pub p: f64,
    /// `‖u‖_{L^r}`.
    pub lhs: f64,
    /// `(π^{1/r}/2π) ∫|∇u||x|^p dx`.
    pub rhs: f64,
    pub ratio: f64,
}

fn lr_norm(u: &TestFunction, r: f64) -> f64 {
    (2.0 * u.base.area() * u.profile.moment(r)).powf(1.0 / r)
}

fn gradient_integral(u: &TestFunction, p: f64) -> f64 {
    u.profile.gradient_moment(p) * u.angular_perimeter(p)
}

pub fn hs_ratio(u: &TestFunction, p: f64) -> Result<HsRatio> {
    let r = check_p(p)?;
    let lhs = lr_norm(u, r);
    let rhs = best_constant(r) * gradient_integral(u, p);
    Ok(HsRatio {
        p,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `‖u‖_r ≤ ∫₀^M |Ω(t)|^{1/r} dt ≤ (π^{1/r}/2π) ∫₀^M ∫_{∂Ω(t)} |x|^p dσ dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerCake {
    pub lhs: f64,
    pub minkowski: f64,
    pub perimeter: f64,
}

impl LayerCake {
    pub fn is_ordered(&self, slack: f64) -> bool {
        self.lhs <= self.minkowski + slack && self.minkowski <= self.perimeter + slack
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 64 {
        return Err(Error::Range(format!("levels = {levels} must be at least 64")));
    }
    Ok(())
}

pub fn layer_cake_check(u: &TestFunction, p: f64, levels: usize) -> Result<LayerCake> {
    let r = check_p(p)?;
    check_levels(levels)?;
    let area = u.base.area();
    let base_perimeter = measures::weighted_perimeter(&u.base, p, measures::DEFAULT_ORDER)?;
    let minkowski = u.profile.integrate_levels(levels, |s| (area * s * s).powf(1.0 / r));
    let perimeter = best_constant(r) * base_perimeter * u.profile.integrate_levels(levels, |s| s.powf(p + 1.0));
    Ok(LayerCake {
        lhs: lr_norm(u, r),
        minkowski,
        perimeter,
    })
}

/// Both sides of the coarea formula for `∫|∇u||x|^p dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coarea {
    /// `∫₀^M ∫_{u=t} |x|^p dσ dt` from scaled-boundary perimeters.
    pub levels: f64,
    /// Shell integration of `|∇u||x|^p`.
    pub shells: f64,
}

impl Coarea {
    pub fn relative_gap(&self) -> f64 {
        (self.levels - self.shells).abs() / self.shells.abs()
    }
}

pub fn coarea_check(u: &TestFunction, p: f64, levels: usize) -> Result<Coarea> {
    check_p(p)?;
    check_levels(levels)?;
    let base_perimeter = measures::weighted_perimeter(&u.base, p, measures::DEFAULT_ORDER)?;
    Ok(Coarea {
        levels: base_perimeter * u.profile.integrate_levels(levels, |s| s.powf(p + 1.0)),
        shells: gradient_integral(u, p),
    })
}

/// One CSV row of a ratio scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPoint {
    pub p: f64,
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Ramps `η_ε` over `B_R(0)` approaching `χ_{B_R}`.
pub fn extremal_sequence(radius: f64, p: f64, eps_list: &[f64]) -> Result<Vec<ExtremalPoint>> {
    let base = Domain::ball(radius)?;
    eps_list
        .iter()
        .map(|&eps| {
            let u = TestFunction::new(base.clone(), Profile::ramp(eps)?)?;
            let h = hs_ratio(&u, p)?;
            Ok(ExtremalPoint {
                p,
                eps,
                lhs: h.lhs,
                rhs: h.rhs,
                ratio: h.ratio,
            })
        })
        .collect()
}

/// Random star base about the origin with a random profile of `knots`
/// interior breakpoints.
pub fn random_test_function<R: Rng>(rng: &mut R, sampler: &StarSampler, knots: usize) -> TestFunction {
    let base = random::origin_star(rng, sampler);
    let profile = Profile::new(random::profile_breakpoints(rng, knots)).expect("sampled profile is valid");
    TestFunction::new(base, profile).expect("origin star is a valid base")
}
