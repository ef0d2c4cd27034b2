//! Planar domains: disks, star-shaped domains with a Fourier radius
//! function, simple polygons and disjoint unions of those.
//!
//! Points are complex numbers throughout; the domain file format uses
//! `[x, y]` pairs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::quadrature::GaussLegendre;

pub type Point = Complex64;

/// Grid used to certify `min ρ > 0` for Fourier stars.
const STAR_CHECK_SAMPLES: usize = 4096;
/// Nodes per Gauss-Legendre panel.
pub const PANEL_NODES: usize = 16;
/// Samples per component for the union disjointness check.
const UNION_CHECK_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Disk {
    center: Point,
    radius: f64,
}

impl Disk {
    pub fn center(&self) -> Point {
        self.center
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Star-shaped about `center`, with boundary
/// `center + ρ(θ) e^{iθ}`, `ρ(θ) = a0 + Σ c_k cos kθ + s_k sin kθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierStar {
    center: Point,
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FourierStar {
    pub fn center(&self) -> Point {
        self.center
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn cos(&self) -> &[f64] {
        &self.cos
    }
    pub fn sin(&self) -> &[f64] {
        &self.sin
    }
    pub fn order(&self) -> usize {
        self.cos.len()
    }

    /// `(ρ(θ), ρ'(θ))`.
    pub fn radius(&self, theta: f64) -> (f64, f64) {
        Self::eval_radius(self.a0, &self.cos, &self.sin, theta)
    }

    /// `(ρ(θ), ρ'(θ))` for raw coefficients; `sin` may be shorter than `cos`.
    pub fn eval_radius(a0: f64, cos: &[f64], sin: &[f64], theta: f64) -> (f64, f64) {
        let mut r = a0;
        let mut dr = 0.0;
        for k in 1..=cos.len().max(sin.len()) {
            let c = cos.get(k - 1).copied().unwrap_or(0.0);
            let s = sin.get(k - 1).copied().unwrap_or(0.0);
            let kf = k as f64;
            let (sn, cs) = (kf * theta).sin_cos();
            r += c * cs + s * sn;
            dr += kf * (s * cs - c * sn);
        }
        (r, dr)
    }

    fn min_radius_on_grid(&self, m: usize) -> f64 {
        (0..m)
            .map(|j| self.radius(2.0 * PI * j as f64 / m as f64).0)
            .fold(f64::INFINITY, f64::min)
    }

    /// `½∫ρ² dθ` by Parseval.
    pub fn area(&self) -> f64 {
        let harmonics: f64 = self.cos.iter().zip(&self.sin).map(|(c, s)| c * c + s * s).sum();
        PI * (self.a0 * self.a0 + 0.5 * harmonics)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn signed_area(vertices: &[Point]) -> f64 {
        let n = vertices.len();
        0.5 * (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Disk(Disk),
    FourierStar(FourierStar),
    Polygon(Polygon),
    Union(Vec<Domain>),
}

/// Position of the origin relative to a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginLocation {
    Inside,
    OnBoundary,
    Outside,
}

impl OriginLocation {
    pub fn as_str(self) -> &'static str {
        match self {
            OriginLocation::Inside => "inside",
            OriginLocation::OnBoundary => "on_boundary",
            OriginLocation::Outside => "outside",
        }
    }
}

/// A smooth boundary piece with its parameter interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// `center + radius e^{it}`, `t ∈ [0, 2π]`.
    Circle { center: Point, radius: f64 },
    /// `center + ρ(t) e^{it}`, `t ∈ [0, 2π]`.
    Star(FourierStar),
    /// `a + t (b - a)`, `t ∈ [0, 1]`.
    Segment { a: Point, b: Point },
}

impl Piece {
    pub fn parameter_range(&self) -> (f64, f64) {
        match self {
            Piece::Circle { .. } | Piece::Star(_) => (0.0, 2.0 * PI),
            Piece::Segment { .. } => (0.0, 1.0),
        }
    }

    /// Point and velocity at parameter `t`.
    pub fn eval(&self, t: f64) -> (Point, Complex64) {
        match self {
            Piece::Circle { center, radius } => {
                let e = Complex64::from_polar(1.0, t);
                (center + e * radius, Complex64::i() * e * radius)
            }
            Piece::Star(s) => {
                let (r, dr) = s.radius(t);
                let e = Complex64::from_polar(1.0, t);
                (s.center + e * r, e * dr + Complex64::i() * e * r)
            }
            Piece::Segment { a, b } => (a + (b - a) * t, b - a),
        }
    }
}

/// A parameter panel `[t0, t1]` of boundary piece `piece`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub piece: usize,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub point: Point,
    /// Arc-length weight.
    pub weight: f64,
    /// Outward unit normal.
    pub normal: Complex64,
    /// Index of the boundary piece sampled by this node.
    pub piece: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub nodes: Vec<BoundaryNode>,
    pub total_length: f64,
}

impl BoundaryQuadrature {
    pub fn integrate<F: Fn(&BoundaryNode) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}

/// Radius function about the origin, for domains star-shaped about it.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    /// Disk with `|center| < radius`.
    Disk {
        center: Point,
        radius: f64,
    },
    Fourier(FourierStar),
}

impl RadialFunction {
    /// `(ρ(φ), ρ'(φ))` for the boundary point `ρ(φ) e^{iφ}`.
    pub fn eval(&self, phi: f64) -> (f64, f64) {
        match self {
            RadialFunction::Disk { center, radius } => {
                let (s, c) = phi.sin_cos();
                let cu = center.re * c + center.im * s;
                let cdu = -center.re * s + center.im * c;
                let disc = (radius * radius - center.norm_sqr() + cu * cu).sqrt();
                (cu + disc, cdu + cu * cdu / disc)
            }
            RadialFunction::Fourier(s) => s.radius(phi),
        }
    }

    pub fn radius(&self, phi: f64) -> f64 {
        self.eval(phi).0
    }

    pub fn domain(&self) -> Domain {
        match self {
            RadialFunction::Disk { center, radius } => Domain::Disk(Disk {
                center: *center,
                radius: *radius,
            }),
            RadialFunction::Fourier(s) => Domain::FourierStar(s.clone()),
        }
    }
}

impl Domain {
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!("disk radius {radius} must be positive")));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidDomain("disk center must be finite".into()));
        }
        Ok(Domain::Disk(Disk { center, radius }))
    }

    /// Origin-centered disk.
    pub fn ball(radius: f64) -> Result<Self> {
        Self::disk(Complex64::new(0.0, 0.0), radius)
    }

    /// `cos` and `sin` may differ in length; the shorter one is padded
    /// with zeros.
    pub fn fourier_star(center: Point, a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let k = cos.len().max(sin.len());
        let mut cos = cos;
        let mut sin = sin;
        cos.resize(k, 0.0);
        sin.resize(k, 0.0);
        let all_finite = a0.is_finite()
            && center.re.is_finite()
            && center.im.is_finite()
            && cos.iter().chain(&sin).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidDomain("fourier_star data must be finite".into()));
        }
        let star = FourierStar { center, a0, cos, sin };
        let samples = STAR_CHECK_SAMPLES.max(16 * k);
        let min_r = star.min_radius_on_grid(samples);
        if !(min_r > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "fourier_star radius function reaches {min_r} (must stay positive)"
            )));
        }
        Ok(Domain::FourierStar(star))
    }

    /// Clockwise input is reversed to counterclockwise.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidDomain("polygon vertices must be finite".into()));
        }
        let mut vertices = vertices;
        let area = Polygon::signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::InvalidDomain("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if !polygon_is_simple(&vertices) {
            return Err(Error::InvalidDomain("polygon is not simple".into()));
        }
        Ok(Domain::Polygon(Polygon { vertices }))
    }

    /// Nested unions are flattened. Components must have disjoint closures.
    pub fn union(parts: Vec<Domain>) -> Result<Self> {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Domain::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return Err(Error::InvalidDomain("union needs at least one component".into()));
        }
        let total_area: f64 = flat.iter().map(Domain::area).sum();
        let eps = 1e-9 * (total_area / PI).sqrt();
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                check_disjoint(&flat[i], &flat[j], eps)?;
            }
        }
        Ok(Domain::Union(flat))
    }

    /// Components of a union, or the domain itself.
    pub fn components(&self) -> &[Domain] {
        match self {
            Domain::Union(parts) => parts,
            _ => std::slice::from_ref(self),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Disk(d) => PI * d.radius * d.radius,
            Domain::FourierStar(s) => s.area(),
            Domain::Polygon(p) => Polygon::signed_area(&p.vertices),
            Domain::Union(parts) => parts.iter().map(Domain::area).sum(),
        }
    }

    /// Radius of the origin-centered disk with the same area.
    pub fn equivalent_radius(&self) -> f64 {
        (self.area() / PI).sqrt()
    }

    pub fn pieces(&self) -> Vec<Piece> {
        match self {
            Domain::Disk(d) => vec![Piece::Circle {
                center: d.center,
                radius: d.radius,
            }],
            Domain::FourierStar(s) => vec![Piece::Star(s.clone())],
            Domain::Polygon(p) => p.edges().map(|(a, b)| Piece::Segment { a, b }).collect(),
            Domain::Union(parts) => parts.iter().flat_map(Domain::pieces).collect(),
        }
    }

    /// Composite panels for `order` total nodes per closed curve
    /// (`order / 16` panels of 16 nodes). Polygon edges share the panel
    /// budget in proportion to their length, one panel at least.
    pub fn panels(&self, order: usize) -> Vec<Panel> {
        let per_curve = (order / PANEL_NODES).max(1);
        let mut panels = Vec::new();
        let mut piece_offset = 0;
        for comp in self.components() {
            match comp {
                Domain::Disk(_) | Domain::FourierStar(_) => {
                    let h = 2.0 * PI / per_curve as f64;
                    for j in 0..per_curve {
                        panels.push(Panel {
                            piece: piece_offset,
                            t0: j as f64 * h,
                            t1: (j + 1) as f64 * h,
                        });
                    }
                    piece_offset += 1;
                }
                Domain::Polygon(p) => {
                    let lengths: Vec<f64> = p.edges().map(|(a, b)| (b - a).norm()).collect();
                    let perimeter: f64 = lengths.iter().sum();
                    for (e, len) in lengths.iter().enumerate() {
                        let count = ((per_curve as f64 * len / perimeter).round() as usize).max(1);
                        let h = 1.0 / count as f64;
                        for j in 0..count {
                            panels.push(Panel {
                                piece: piece_offset + e,
                                t0: j as f64 * h,
                                t1: (j + 1) as f64 * h,
                            });
                        }
                    }
                    piece_offset += lengths.len();
                }
                Domain::Union(_) => unreachable!("unions are flattened at construction"),
            }
        }
        panels
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Range(format!("scale factor {factor} must be positive")));
        }
        Ok(match self {
            Domain::Disk(d) => Domain::Disk(Disk {
                center: d.center * factor,
                radius: d.radius * factor,
            }),
            Domain::FourierStar(s) => Domain::FourierStar(FourierStar {
                center: s.center * factor,
                a0: s.a0 * factor,
                cos: s.cos.iter().map(|c| c * factor).collect(),
                sin: s.sin.iter().map(|c| c * factor).collect(),
            }),
            Domain::Polygon(p) => Domain::Polygon(Polygon {
                vertices: p.vertices.iter().map(|v| v * factor).collect(),
            }),
            Domain::Union(parts) => Domain::Union(parts.iter().map(|p| p.scaled(factor)).collect::<Result<Vec<_>>>()?),
        })
    }

    pub fn translated(&self, shift: Point) -> Self {
        match self {
            Domain::Disk(d) => Domain::Disk(Disk {
                center: d.center + shift,
                radius: d.radius,
            }),
            Domain::FourierStar(s) => Domain::FourierStar(FourierStar {
                center: s.center + shift,
                ..s.clone()
            }),
            Domain::Polygon(p) => Domain::Polygon(Polygon {
                vertices: p.vertices.iter().map(|v| v + shift).collect(),
            }),
            Domain::Union(parts) => Domain::Union(parts.iter().map(|p| p.translated(shift)).collect()),
        }
    }

    /// Rotation about the origin by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let rot = Complex64::from_polar(1.0, angle);
        match self {
            Domain::Disk(d) => Domain::Disk(Disk {
                center: d.center * rot,
                radius: d.radius,
            }),
            Domain::FourierStar(s) => {
                // ρ_new(θ) = ρ(θ - angle)
                let mut cos = Vec::with_capacity(s.cos.len());
                let mut sin = Vec::with_capacity(s.sin.len());
                for (i, (c, sn)) in s.cos.iter().zip(&s.sin).enumerate() {
                    let (sa, ca) = ((i + 1) as f64 * angle).sin_cos();
                    cos.push(c * ca - sn * sa);
                    sin.push(c * sa + sn * ca);
                }
                Domain::FourierStar(FourierStar {
                    center: s.center * rot,
                    a0: s.a0,
                    cos,
                    sin,
                })
            }
            Domain::Polygon(p) => Domain::Polygon(Polygon {
                vertices: p.vertices.iter().map(|v| v * rot).collect(),
            }),
            Domain::Union(parts) => Domain::Union(parts.iter().map(|p| p.rotated(angle)).collect()),
        }
    }

    /// Point membership (open set).
    pub fn contains(&self, z: Point) -> bool {
        match self {
            Domain::Disk(d) => (z - d.center).norm() < d.radius,
            Domain::FourierStar(s) => {
                let rel = z - s.center;
                rel.norm() < s.radius(rel.arg()).0
            }
            Domain::Polygon(p) => point_in_polygon(&p.vertices, z),
            Domain::Union(parts) => parts.iter().any(|p| p.contains(z)),
        }
    }

    /// Distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: Point) -> f64 {
        match self {
            Domain::Disk(d) => ((z - d.center).norm() - d.radius).abs(),
            Domain::FourierStar(s) => star_boundary_distance(s, z),
            Domain::Polygon(p) => p
                .edges()
                .map(|(a, b)| segment_distance(a, b, z))
                .fold(f64::INFINITY, f64::min),
            Domain::Union(parts) => parts
                .iter()
                .map(|p| p.boundary_distance(z))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Default boundary tolerance: `1e-9 ×` equivalent radius.
    pub fn default_origin_tolerance(&self) -> f64 {
        1e-9 * self.equivalent_radius()
    }

    pub fn contains_origin(&self, eps: f64) -> OriginLocation {
        let origin = Complex64::new(0.0, 0.0);
        if self.boundary_distance(origin) <= eps {
            OriginLocation::OnBoundary
        } else if self.contains(origin) {
            OriginLocation::Inside
        } else {
            OriginLocation::Outside
        }
    }

    /// Radius function about the origin when the domain is a disk with the
    /// origin strictly inside or a Fourier star centered at the origin.
    pub fn radial_about_origin(&self) -> Option<RadialFunction> {
        match self {
            Domain::Disk(d) if d.center.norm() < d.radius => Some(RadialFunction::Disk {
                center: d.center,
                radius: d.radius,
            }),
            Domain::FourierStar(s) if s.center == Complex64::new(0.0, 0.0) => Some(RadialFunction::Fourier(s.clone())),
            _ => None,
        }
    }

    /// Equispaced boundary samples per component (used for geometric checks).
    fn boundary_samples(&self, m: usize) -> Vec<Point> {
        let mut out = Vec::new();
        for piece in self.pieces() {
            let (t0, t1) = piece.parameter_range();
            let count = match piece {
                Piece::Segment { .. } => (m / 8).max(4),
                _ => m,
            };
            for j in 0..count {
                let t = t0 + (t1 - t0) * j as f64 / count as f64;
                out.push(piece.eval(t).0);
            }
        }
        out
    }
}

/// Composite Gauss-Legendre nodes on every smooth boundary piece.
pub fn boundary_nodes(domain: &Domain, order: usize) -> Result<BoundaryQuadrature> {
    if order < 16 {
        return Err(Error::Range(format!("quadrature order {order} must be at least 16")));
    }
    let rule = GaussLegendre::new(PANEL_NODES);
    let pieces = domain.pieces();
    let mut nodes = Vec::with_capacity(order * pieces.len());
    for panel in domain.panels(order) {
        let piece = &pieces[panel.piece];
        for (t, w) in rule.on(panel.t0, panel.t1) {
            let (z, dz) = piece.eval(t);
            let speed = dz.norm();
            let tangent = dz / speed;
            nodes.push(BoundaryNode {
                point: z,
                weight: w * speed,
                normal: Complex64::new(tangent.im, -tangent.re),
                piece: panel.piece,
            });
        }
    }
    let total_length = nodes.iter().map(|n| n.weight).sum();
    Ok(BoundaryQuadrature { nodes, total_length })
}

/// Options for [`invert_complement`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// Sup-norm refit tolerance relative to the mean radius of the image.
    pub tol: f64,
    /// Largest Fourier order tried before giving up.
    pub max_order: usize,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            tol: 1e-13,
            max_order: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub domain: Domain,
    /// Sup-norm mismatch between the refit radius and `1/ρ(-φ)`.
    pub residual: f64,
    pub order: usize,
}

/// `D = {1/z : z ∉ Ω̄} ∪ {0}` for a domain star-shaped about the origin.
///
/// A disk maps to a disk in closed form. For a centered Fourier star the
/// image boundary is `e^{iφ}/ρ(-φ)`; that radius function is refit by
/// FFT at `4K` samples, doubling `K` from the input order until the
/// residual is below tolerance.
pub fn invert_complement(domain: &Domain, opts: InversionOptions) -> Result<Inversion> {
    let eps = domain.default_origin_tolerance();
    match domain.contains_origin(eps) {
        OriginLocation::Inside => {}
        loc => {
            return Err(Error::Precondition(format!(
                "inversion needs the origin strictly inside (found {})",
                loc.as_str()
            )))
        }
    }
    match domain {
        Domain::Disk(d) => {
            // |z - c| = R  ↦  |w - c̄/(|c|² - R²)| = R/(R² - |c|²)
            let denom = d.center.norm_sqr() - d.radius * d.radius;
            let center = d.center.conj() / denom;
            let radius = d.radius / denom.abs();
            Ok(Inversion {
                domain: Domain::disk(center, radius)?,
                residual: 0.0,
                order: 0,
            })
        }
        Domain::FourierStar(s) if s.center == Complex64::new(0.0, 0.0) => {
            let inverted = |phi: f64| 1.0 / s.radius(-phi).0;
            let mut order = s.order().max(4);
            loop {
                let m = 4 * order;
                let samples: Vec<f64> = (0..m).map(|j| inverted(2.0 * PI * j as f64 / m as f64)).collect();
                let (a0, cos, sin) = fourier::real_coefficients(&samples, order);
                let fit = FourierStar {
                    center: Complex64::new(0.0, 0.0),
                    a0,
                    cos,
                    sin,
                };
                let check = 1024.max(8 * order);
                let residual = (0..check)
                    .map(|j| {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / check as f64;
                        (fit.radius(phi).0 - inverted(phi)).abs()
                    })
                    .fold(0.0, f64::max);
                if residual <= opts.tol * a0 {
                    let domain = Domain::fourier_star(fit.center, fit.a0, fit.cos, fit.sin)?;
                    return Ok(Inversion {
                        domain,
                        residual,
                        order,
                    });
                }
                if order * 2 > opts.max_order {
                    return Err(Error::Truncation {
                        residual,
                        tol: opts.tol * a0,
                        order,
                    });
                }
                order *= 2;
            }
        }
        _ => Err(Error::Precondition(
            "inversion supports disks and origin-centered Fourier stars".into(),
        )),
    }
}

fn check_disjoint(a: &Domain, b: &Domain, eps: f64) -> Result<()> {
    let sa = a.boundary_samples(UNION_CHECK_SAMPLES);
    let sb = b.boundary_samples(UNION_CHECK_SAMPLES);
    if sa.iter().any(|&z| b.contains(z) || b.boundary_distance(z) <= eps)
        || sb.iter().any(|&z| a.contains(z) || a.boundary_distance(z) <= eps)
    {
        return Err(Error::InvalidDomain(
            "union components must have pairwise disjoint closures".into(),
        ));
    }
    Ok(())
}

fn segment_distance(a: Point, b: Point, z: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let cross = |o: Point, a: Point, b: Point| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on_segment = |a: Point, b: Point, z: Point| {
        z.re >= a.re.min(b.re) && z.re <= a.re.max(b.re) && z.im >= a.im.min(b.im) && z.im <= a.im.max(b.im)
    };
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn polygon_is_simple(vertices: &[Point]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
        if a1 == a2 {
            return false;
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
            if adjacent {
                // adjacent edges may only share their common vertex
                let shared = if j == i + 1 { a2 } else { a1 };
                let (other_a, other_b) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                let cross = (a2 - a1).re * (b2 - b1).im - (a2 - a1).im * (b2 - b1).re;
                if cross == 0.0 {
                    // collinear neighbours must not fold back onto each other
                    let d1 = other_a - shared;
                    let d2 = other_b - shared;
                    if (d1 * d2.conj()).re > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

fn point_in_polygon(vertices: &[Point], z: Point) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.im > z.im) != (vj.im > z.im) {
            let x = vj.re + (z.im - vj.im) * (vi.re - vj.re) / (vi.im - vj.im);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn star_boundary_distance(s: &FourierStar, z: Point) -> f64 {
    let dist = |t: f64| {
        let (r, _) = s.radius(t);
        (s.center + Complex64::from_polar(r, t) - z).norm()
    };
    let m = 2048.max(32 * s.order());
    let h = 2.0 * PI / m as f64;
    let (best, _) = (0..m)
        .map(|j| (j, dist(j as f64 * h)))
        .fold((0, f64::INFINITY), |acc, (j, d)| if d < acc.1 { (j, d) } else { acc });
    // golden-section refinement on the bracketing cell pair
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1), dist(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
    }
    f1.min(f2).min(dist(best as f64 * h))
}

// ---------------------------------------------------------------------
// Domain file format
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    FourierStar {
        center: [f64; 2],
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Union {
        parts: Vec<DomainSpec>,
    },
}

fn pt(v: [f64; 2]) -> Point {
    Complex64::new(v[0], v[1])
}

fn arr(z: Point) -> [f64; 2] {
    [z.re, z.im]
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Disk { center, radius } => Domain::disk(pt(center), radius),
            DomainSpec::FourierStar { center, a0, cos, sin } => Domain::fourier_star(pt(center), a0, cos, sin),
            DomainSpec::Polygon { vertices } => Domain::polygon(vertices.into_iter().map(pt).collect()),
            DomainSpec::Union { parts } => {
                Domain::union(parts.into_iter().map(Domain::try_from).collect::<Result<Vec<_>>>()?)
            }
        }
    }
}

impl From<&Domain> for DomainSpec {
    fn from(d: &Domain) -> Self {
        match d {
            Domain::Disk(d) => DomainSpec::Disk {
                center: arr(d.center),
                radius: d.radius,
            },
            Domain::FourierStar(s) => DomainSpec::FourierStar {
                center: arr(s.center),
                a0: s.a0,
                cos: s.cos.clone(),
                sin: s.sin.clone(),
            },
            Domain::Polygon(p) => DomainSpec::Polygon {
                vertices: p.vertices.iter().copied().map(arr).collect(),
            },
            Domain::Union(parts) => DomainSpec::Union {
                parts: parts.iter().map(DomainSpec::from).collect(),
            },
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DomainSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = DomainSpec::deserialize(deserializer)?;
        Domain::try_from(spec).map_err(serde::de::Error::custom)
    }
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        Domain::try_from(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Point {
        Complex64::new(x, y)
    }

    fn square() -> Domain {
        Domain::polygon(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]).unwrap()
    }

    #[test]
    fn area_examples() {
        assert!((Domain::ball(2.0).unwrap().area() - 4.0 * PI).abs() < 1e-14);
        let unit = Domain::fourier_star(c(0.0, 0.0), 1.0, vec![], vec![]).unwrap();
        assert!((unit.area() - PI).abs() < 1e-15);
        let u = Domain::union(vec![
            Domain::ball(1.0).unwrap(),
            Domain::disk(c(100.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        assert!((u.area() - 2.0 * PI).abs() < 1e-14);
        assert!((square().area() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn equivalent_radius_examples() {
        assert!((Domain::disk(c(5.0, -2.0), 3.0).unwrap().equivalent_radius() - 3.0).abs() < 1e-14);
        let u = Domain::union(vec![
            Domain::ball(1.0).unwrap(),
            Domain::disk(c(3.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        assert!((u.equivalent_radius() - 2f64.sqrt()).abs() < 1e-14);
        let s = Domain::fourier_star(c(0.0, 0.0), 1.0, vec![0.1], vec![]).unwrap();
        assert!((s.equivalent_radius() - 1.005f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn polygon_area_matches_triangulation() {
        // L-shape
        let l = Domain::polygon(vec![
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(2.0, 1.0),
            c(1.0, 1.0),
            c(1.0, 2.0),
            c(0.0, 2.0),
        ])
        .unwrap();
        assert!((l.area() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(Domain::disk(c(0.0, 0.0), 0.0).is_err());
        assert!(Domain::fourier_star(c(0.0, 0.0), 1.0, vec![1.2], vec![]).is_err());
        assert!(Domain::polygon(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        // bow-tie
        assert!(Domain::polygon(vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]).is_err());
        // overlapping and nested unions
        assert!(Domain::union(vec![
            Domain::ball(1.0).unwrap(),
            Domain::disk(c(1.5, 0.0), 1.0).unwrap()
        ])
        .is_err());
        assert!(Domain::union(vec![Domain::ball(3.0).unwrap(), Domain::ball(1.0).unwrap()]).is_err());
        // touching closures
        assert!(Domain::union(vec![
            Domain::ball(1.0).unwrap(),
            Domain::disk(c(2.0, 0.0), 1.0).unwrap()
        ])
        .is_err());
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let cw = Domain::polygon(vec![c(-1.0, -1.0), c(-1.0, 1.0), c(1.0, 1.0), c(1.0, -1.0)]).unwrap();
        assert!((cw.area() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_weights_sum_to_perimeter() {
        let q = boundary_nodes(&Domain::ball(1.0).unwrap(), 64).unwrap();
        assert!((q.total_length - 2.0 * PI).abs() < 1e-10);
        assert!(q.nodes.iter().all(|n| n.weight > 0.0));
        for order in [16, 48, 256] {
            let q = boundary_nodes(&square(), order).unwrap();
            assert!((q.total_length - 8.0).abs() < 1e-13);
        }
        assert!(boundary_nodes(&square(), 8).is_err());
    }

    #[test]
    fn normals_point_outward() {
        let q = boundary_nodes(&Domain::disk(c(0.3, 0.1), 2.0).unwrap(), 64).unwrap();
        for n in &q.nodes {
            let radial = (n.point - c(0.3, 0.1)) / 2.0;
            assert!((n.normal - radial).norm() < 1e-12);
        }
    }

    #[test]
    fn origin_classification() {
        let eps = 1e-9;
        assert_eq!(
            Domain::disk(c(0.5, 0.0), 1.0).unwrap().contains_origin(eps),
            OriginLocation::Inside
        );
        assert_eq!(
            Domain::disk(c(1.0, 0.0), 1.0).unwrap().contains_origin(eps),
            OriginLocation::OnBoundary
        );
        assert_eq!(
            Domain::disk(c(3.0, 0.0), 1.0).unwrap().contains_origin(eps),
            OriginLocation::Outside
        );
        let sq = square().translated(c(1.0, 0.0));
        assert_eq!(sq.contains_origin(eps), OriginLocation::OnBoundary);
        let star = Domain::fourier_star(c(1.2, 0.0), 1.0, vec![0.2], vec![]).unwrap();
        // boundary point at θ = π is 1.2 - 0.8 = 0.4 from the origin
        assert_eq!(star.contains_origin(eps), OriginLocation::Outside);
        assert!((star.boundary_distance(c(0.0, 0.0)) - 0.4).abs() < 1e-9);
    }

    #[test]
    fn disk_inversion_closed_form() {
        let inv = invert_complement(&Domain::ball(1.0).unwrap(), InversionOptions::default()).unwrap();
        assert_eq!(inv.domain, Domain::ball(1.0).unwrap());
        let inv = invert_complement(&Domain::disk(c(0.5, 0.0), 1.0).unwrap(), InversionOptions::default()).unwrap();
        let Domain::Disk(d) = inv.domain else { panic!() };
        assert!((d.center - c(-2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((d.radius - 4.0 / 3.0).abs() < 1e-15);
        assert!(invert_complement(&Domain::disk(c(1.0, 0.0), 1.0).unwrap(), InversionOptions::default()).is_err());
        assert!(invert_complement(&Domain::disk(c(3.0, 0.0), 1.0).unwrap(), InversionOptions::default()).is_err());
    }

    #[test]
    fn radial_function_of_off_center_disk() {
        let r = Domain::disk(c(0.3, -0.2), 1.0).unwrap().radial_about_origin().unwrap();
        for j in 0..32 {
            let phi = 2.0 * PI * j as f64 / 32.0;
            let (rho, drho) = r.eval(phi);
            assert!((Complex64::from_polar(rho, phi) - c(0.3, -0.2)).norm() - 1.0 < 1e-14);
            let h = 1e-6;
            let fd = (r.radius(phi + h) - r.radius(phi - h)) / (2.0 * h);
            assert!((fd - drho).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_of_fourier_star() {
        let s = Domain::fourier_star(c(0.0, 0.0), 1.0, vec![0.1, 0.05], vec![0.02, -0.03]).unwrap();
        let rot = s.rotated(0.7);
        let (Domain::FourierStar(a), Domain::FourierStar(b)) = (&s, &rot) else {
            panic!()
        };
        for j in 0..16 {
            let t = j as f64 * 0.4;
            assert!((a.radius(t).0 - b.radius(t + 0.7).0).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_format() {
        let text = r#"{"kind":"union","parts":[{"kind":"disk","center":[0,0],"radius":1},
            {"kind":"fourier_star","center":[10,0],"a0":1,"cos":[0.1],"sin":[0.0]},
            {"kind":"polygon","vertices":[[20,0],[22,0],[21,1]]}]}"#;
        let d = Domain::from_json(text).unwrap();
        assert_eq!(d.components().len(), 3);
        let back = serde_json::to_string(&d).unwrap();
        assert_eq!(Domain::from_json(&back).unwrap(), d);
        assert!(Domain::from_json(r#"{"kind":"disk","center":[0,0],"radius":-1}"#).is_err());
        assert!(Domain::from_json(r#"{"kind":"blob"}"#).is_err());
    }
}
