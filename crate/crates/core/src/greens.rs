//! Green's functions through a conformal parametrization `h: B₁ → Ω`
//! with `h(0) = x`: `G(y) = -(1/2π) log|h⁻¹(y)|`, so `{G = t}` is the
//! image of `|w| = e^{-2πt}` and `|∇G(h(w))| = 1/(2π|w||h'(w)|)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{self, ConformalData};
use crate::error::{Error, Result};
use crate::fourier;
use crate::geometry::{Domain, OriginLocation, Point};
use crate::measures;
use crate::quadrature::GaussLegendre;

/// Trapezoid samples on circles for the disk representation.
const DISK_SAMPLES: usize = 4096;
/// Radial Gauss nodes of the energy grid in `log|w|`.
const ENERGY_RADIAL: usize = 64;
/// Minimum angular samples of the energy grid.
const ENERGY_ANGULAR: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// `h(w) = R(w + a)/(1 + āw)`, `a = x/R`.
    Disk {
        radius: f64,
        x: Point,
    },
    Conformal(Box<ConformalData>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenFunction {
    domain: Domain,
    singularity: Point,
    repr: Representation,
}

pub fn disk_green(radius: f64, x: Point) -> Result<GreenFunction> {
    let domain = Domain::ball(radius)?;
    if !(x.norm() < radius) {
        return Err(Error::Precondition(format!(
            "singularity {x} must lie inside B_{radius}(0)"
        )));
    }
    Ok(GreenFunction {
        domain,
        singularity: x,
        repr: Representation::Disk { radius, x },
    })
}

/// Singularity at the origin; `Ω` is mapped by the Theodorsen engine.
pub fn star_green(omega: &Domain, order: usize) -> Result<GreenFunction> {
    let cd = conformal::riemann_map(omega, order, conformal::DEFAULT_MAP_TOL)?;
    Ok(GreenFunction {
        domain: omega.clone(),
        singularity: Complex64::new(0.0, 0.0),
        repr: Representation::Conformal(Box::new(cd)),
    })
}

impl GreenFunction {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn singularity(&self) -> Point {
        self.singularity
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn representation_name(&self) -> &'static str {
        match self.repr {
            Representation::Disk { .. } => "disk",
            Representation::Conformal(_) => "conformal",
        }
    }

    pub fn map(&self, w: Complex64) -> Complex64 {
        match &self.repr {
            Representation::Disk { radius, x } => {
                let a = x / radius;
                radius * (w + a) / (1.0 + a.conj() * w)
            }
            Representation::Conformal(cd) => cd.map(w),
        }
    }

    fn preimage(&self, y: Complex64) -> Complex64 {
        match &self.repr {
            Representation::Disk { radius, x } => {
                let a = x / radius;
                let v = y / radius;
                (v - a) / (1.0 - a.conj() * v)
            }
            Representation::Conformal(cd) => cd.inverse(y),
        }
    }

    /// `G(y)`; `+∞` at the singularity.
    pub fn value(&self, y: Point) -> f64 {
        -self.preimage(y).norm().ln() / (2.0 * PI)
    }

    /// `(h, h')` at `m` equispaced points of `|w| = s`.
    fn circle(&self, s: f64, m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        match &self.repr {
            Representation::Disk { radius, x } => {
                let a = x / radius;
                (0..m)
                    .map(|j| {
                        let w = Complex64::from_polar(s, 2.0 * PI * j as f64 / m as f64);
                        let den = 1.0 + a.conj() * w;
                        (radius * (w + a) / den, radius * (1.0 - a.norm_sqr()) / (den * den))
                    })
                    .unzip()
            }
            Representation::Conformal(cd) => {
                let h = fourier::eval_on_circle(&cd.h_coeffs, s, m);
                let dh = fourier::eval_on_circle(&fourier::derivative(&cd.h_coeffs), s, m);
                (h, dh)
            }
        }
    }

    fn circle_samples(&self) -> usize {
        match &self.repr {
            Representation::Disk { .. } => DISK_SAMPLES,
            Representation::Conformal(cd) => cd.circle_samples(),
        }
    }

    /// `|∇G|` at the boundary points `h(e^{2πij/m})`.
    pub fn boundary_gradient(&self, m: usize) -> Vec<(Point, f64)> {
        let (h, dh) = self.circle(1.0, m);
        h.into_iter()
            .zip(dh)
            .map(|(y, d)| (y, 1.0 / (2.0 * PI * d.norm())))
            .collect()
    }

    /// `∫_{G=t} |∇G| dσ` on the preimage circle `|w| = e^{-2πt}`.
    pub fn flux(&self, t: f64) -> Result<f64> {
        check_level(t)?;
        let s = (-2.0 * PI * t).exp();
        let m = self.circle_samples();
        let (_, dh) = self.circle(s, m);
        let h = 2.0 * PI / m as f64;
        Ok(dh
            .iter()
            .map(|d| {
                let grad = 1.0 / (2.0 * PI * s * d.norm());
                grad * d.norm() * s * h
            })
            .sum())
    }

    /// `∫_{G<t} |∇G|² dy`, on a Gauss × trapezoid grid in
    /// `(log|w|, arg w)` over the annulus `e^{-2πt} < |w| < 1`.
    pub fn energy(&self, t: f64) -> Result<f64> {
        check_level(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let rule = GaussLegendre::new(ENERGY_RADIAL);
        let m = ENERGY_ANGULAR.max(self.circle_samples());
        let dphi = 2.0 * PI / m as f64;
        Ok(rule
            .on(-2.0 * PI * t, 0.0)
            .map(|(u, wu)| {
                let s = u.exp();
                let (_, dh) = self.circle(s, m);
                let ring: f64 = dh
                    .iter()
                    .map(|d| {
                        let grad = 1.0 / (2.0 * PI * s * d.norm());
                        // dy = |h'|² dw, dw = s² du dφ
                        grad * grad * d.norm_sqr() * s * s
                    })
                    .sum();
                wu * ring * dphi
            })
            .sum())
    }
}

fn check_level(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Range(format!("level t = {t} must be finite and ≥ 0")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelIdentity {
    pub t: f64,
    /// `∫_{G<t} |∇G|²`, which should equal `t`.
    pub energy: f64,
    /// `∫_{G=t} |∇G| dσ`, which should equal `1`.
    pub flux: f64,
}

pub fn level_identities(g: &GreenFunction, t_list: &[f64]) -> Result<Vec<LevelIdentity>> {
    t_list
        .iter()
        .map(|&t| {
            Ok(LevelIdentity {
                t,
                energy: g.energy(t)?,
                flux: g.flux(t)?,
            })
        })
        .collect()
}

/// `|Ω|^{1-β/2} ≤ (1/4π^{1+β/2}) ∫_{∂Ω} dσ / (|y|^β |∇G|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlucherReport {
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub x: Point,
    pub representation: String,
}

impl FlucherReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

fn check_beta(g: &GreenFunction, beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta <= 2.0) {
        return Err(Error::Range(format!("β = {beta} must be finite and ≤ 2")));
    }
    if beta > 0.0 {
        let origin = g.domain.contains_origin(g.domain.default_origin_tolerance());
        if origin != OriginLocation::Inside || !g.domain.is_connected() {
            return Err(Error::Hypothesis(format!(
                "β = {beta} > 0 needs a connected domain with the origin inside (origin is {})",
                origin.as_str()
            )));
        }
    }
    Ok(())
}

/// `∫_{∂Ω} dσ/(|y|^β|∇G|) = ∫₀^{2π} 2π|h'|²/|h|^β dt`.
fn flucher_integral(g: &GreenFunction, beta: f64) -> f64 {
    let m = g.circle_samples();
    let (h, dh) = g.circle(1.0, m);
    let sum: f64 = h
        .iter()
        .zip(&dh)
        .map(|(y, d)| 2.0 * PI * d.norm_sqr() / y.norm().powf(beta))
        .sum();
    sum * 2.0 * PI / m as f64
}

pub fn flucher_bound(g: &GreenFunction, beta: f64) -> Result<FlucherReport> {
    check_beta(g, beta)?;
    let lhs = g.domain.area().powf(1.0 - 0.5 * beta);
    let rhs = flucher_integral(g, beta) / (4.0 * PI.powf(1.0 + 0.5 * beta));
    Ok(FlucherReport {
        beta,
        lhs,
        rhs,
        x: g.singularity,
        representation: g.representation_name().to_string(),
    })
}

/// Cauchy-Schwarz step behind the bound, with `p = -β/2`:
/// `(2π R^{1+p})² ≤ (∫|y|^p dσ)² ≤ flux · ∫ dσ/(|y|^β|∇G|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderChain {
    pub isoperimetric: f64,
    pub weighted_perimeter_sq: f64,
    pub product: f64,
}

impl HolderChain {
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.isoperimetric <= self.weighted_perimeter_sq * (1.0 + slack)
            && self.weighted_perimeter_sq <= self.product * (1.0 + slack)
    }
}

pub fn holder_chain(g: &GreenFunction, beta: f64) -> Result<HolderChain> {
    check_beta(g, beta)?;
    let p = -0.5 * beta;
    let radius = g.domain.equivalent_radius();
    let perimeter = measures::weighted_perimeter(&g.domain, p, measures::DEFAULT_ORDER)?;
    Ok(HolderChain {
        isoperimetric: (2.0 * PI * radius.powf(1.0 + p)).powi(2),
        weighted_perimeter_sq: perimeter * perimeter,
        product: g.flux(0.0)? * flucher_integral(g, beta),
    })
}

/// Sampled `max |G|` over boundary quadrature nodes.
pub fn boundary_residual(g: &GreenFunction, order: usize) -> Result<f64> {
    let nodes = crate::geometry::boundary_nodes(&g.domain, order)?;
    Ok(nodes.nodes.iter().map(|n| g.value(n.point).abs()).fold(0.0, f64::max))
}

/// `∫_{∂Ω} |∇G| dσ` by boundary quadrature in the physical domain; the
/// gradient uses the closed form for disks.
pub fn disk_boundary_flux(radius: f64, x: Point, order: usize) -> Result<f64> {
    let nodes = crate::geometry::boundary_nodes(&Domain::ball(radius)?, order)?;
    Ok(nodes.integrate(|n| disk_boundary_gradient(radius, x, n.point)))
}

/// `(R² - |x|²)/(2πR|y - x|²)` for `y` on `∂B_R(0)`.
pub fn disk_boundary_gradient(radius: f64, x: Point, y: Point) -> f64 {
    (radius * radius - x.norm_sqr()) / (2.0 * PI * radius * (y - x).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn disk_gradients_match_closed_form() {
        let g0 = disk_green(2.0, c(0.0, 0.0)).unwrap();
        assert!((g0.value(c(1.0, 0.0)) - (2f64).ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((disk_boundary_gradient(1.0, c(0.5, 0.0), c(1.0, 0.0)) - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((disk_boundary_gradient(1.0, c(0.5, 0.0), c(-1.0, 0.0)) - 1.0 / (6.0 * PI)).abs() < 1e-15);
        let g = disk_green(1.0, c(0.5, 0.0)).unwrap();
        for (y, grad) in g.boundary_gradient(64) {
            assert!((grad - disk_boundary_gradient(1.0, c(0.5, 0.0), y)).abs() < 1e-12);
            assert!(g.value(y).abs() < 1e-14);
        }
        // G from the Möbius preimage against the log formula
        let y = c(0.1, -0.4);
        let log_form = ((c(1.0, 0.0) - y.conj() * c(0.5, 0.0)).norm() / (y - c(0.5, 0.0)).norm()).ln() / (2.0 * PI);
        assert!((g.value(y) - log_form).abs() < 1e-14);
        assert!((disk_boundary_flux(1.0, c(0.5, 0.0), 256).unwrap() - 1.0).abs() < 1e-12);
        assert!(disk_green(1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn disk_level_identities() {
        let g = disk_green(1.0, c(0.0, 0.0)).unwrap();
        let ids = level_identities(&g, &[0.0, 0.25]).unwrap();
        assert!((ids[0].flux - 1.0).abs() < 1e-12);
        assert!((ids[1].energy - 0.25).abs() < 1e-12);
        assert!(level_identities(&g, &[-0.1]).is_err());
    }

    #[test]
    fn flucher_disk_examples() {
        let g = disk_green(2.0, c(0.0, 0.0)).unwrap();
        let r = flucher_bound(&g, 1.0).unwrap();
        assert!((r.lhs - 2.0 * PI.sqrt()).abs() < 1e-12 && (r.rhs - 2.0 * PI.sqrt()).abs() < 1e-12);
        let off = disk_green(1.0, c(0.5, 0.0)).unwrap();
        let r = flucher_bound(&off, 0.0).unwrap();
        assert!((r.rhs - 5.0 * PI / 3.0).abs() < 1e-12);
        assert!(flucher_bound(&off, 2.5).is_err());
        let hc = holder_chain(&off, 1.0).unwrap();
        assert!(hc.is_monotone(1e-12));
    }

    #[test]
    fn star_green_boundary_and_flux() {
        let star = Domain::fourier_star(c(0.0, 0.0), 1.0, vec![0.0, 0.2], vec![]).unwrap();
        let g = star_green(&star, 256).unwrap();
        assert!(boundary_residual(&g, 128).unwrap() < 1e-8);
        for t in [0.0, 0.1, 0.5] {
            assert!((g.flux(t).unwrap() - 1.0).abs() < 1e-7);
        }
        let ball = star_green(&Domain::ball(1.5).unwrap(), 64).unwrap();
        let y = c(0.3, 0.7);
        assert!((ball.value(y) - (1.5 / y.norm()).ln() / (2.0 * PI)).abs() < 1e-12);
        let flucher = flucher_bound(&g, 1.0).unwrap();
        assert!(flucher.lhs <= flucher.rhs);
        assert_eq!(flucher.representation, "conformal");
    }
}
