//! Numerical Riemann maps of lattice domains onto the unit disc.
//!
//! [`uniformize`] zips the boundary of a lattice domain onto the real
//! line and closes with a Mobius map onto the disc normalized at the base
//! point. [`boundary_normalized`] then moves two marked boundary points
//! to -1 and 1. The remaining operations are the radial projection, its
//! conformal conjugate in the domain, conformal rays and a check that the
//! tail of a ray sits in a fjord.

mod mobius;
mod square;
mod zipper;

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

pub use mobius::{two_point_normalization, Mobius};
pub use square::SquareMap;
use zipper::Zipper;

use crate::curves::ParamCurve;
use crate::error::{bail, Error, Result};
use crate::lattice::{innermost_disconnecting, separates, LatticeDomain, MarkedEdge};
use crate::{geom, pt, Point};

/// Anything that can move points between a domain and the unit disc.
pub trait Uniformizer {
    /// Domain point to the disc.
    fn to_disc(&self, z: Point) -> Result<Point>;
    /// Disc point back to the domain.
    fn from_disc(&self, w: Point) -> Result<Point>;
}

impl Uniformizer for Mobius {
    fn to_disc(&self, z: Point) -> Result<Point> {
        self.apply(z)
    }

    fn from_disc(&self, w: Point) -> Result<Point> {
        self.inverse().apply(w)
    }
}

/// A sample of the boundary correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEntry {
    pub point: Point,
    /// Argument of the image on the unit circle, in `(-pi, pi]`.
    pub angle: f64,
    /// True for polygon vertices, false for points inside an edge.
    pub vertex: bool,
}

/// How the map is pinned down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `phi(u) = 0`, `phi'(u) > 0`.
    Riemann,
    /// Two boundary points go to -1 and 1 (see [`boundary_normalized`]).
    TwoPoint { a: Point, b: Point },
}

/// A conformal map of a polygonal Jordan domain onto the unit disc.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    zip: Zipper,
    /// Upper half plane onto the disc, including any later normalization.
    outer: Mobius,
    outer_inv: Mobius,
    u: Point,
    table: Vec<BoundaryEntry>,
    polygon: Vec<Point>,
    lattice_n: Option<u32>,
    points_per_edge: usize,
    normalization: Normalization,
    spacing: f64,
}

/// Points per edge tried in turn by [`uniformize`].
const REFINEMENTS: [usize; 5] = [2, 4, 8, 16, 32];

/// Riemann map of a lattice domain, normalized at its base point.
///
/// Edges are subdivided ever more finely until two successive maps agree
/// to `tol` at probe points spread over the cells; when even the finest
/// subdivision does not get there the result is a numeric failure that
/// reports the last discrepancy.
pub fn uniformize(dom: &LatticeDomain, tol: f64) -> Result<ConformalMap> {
    if !(tol > 0.0) {
        bail!(InvalidInput, "tolerance must be positive");
    }
    let poly = dom.boundary_polygon();
    let probes = probe_points(dom);
    let mut prev: Option<ConformalMap> = None;
    let mut last_gap = f64::INFINITY;
    for &k in &REFINEMENTS {
        let mut map = build(&poly, dom.u(), k)?;
        map.lattice_n = Some(dom.n());
        if let Some(p) = &prev {
            let mut gap: f64 = 0.0;
            for &z in &probes {
                let d = (map.to_disc(z)? - p.to_disc(z)?).norm();
                gap = if d.is_nan() { f64::INFINITY } else { gap.max(d) };
            }
            last_gap = gap;
            if gap <= tol {
                return Ok(map);
            }
        }
        prev = Some(map);
    }
    Err(Error::NumericFailure {
        step: REFINEMENTS[REFINEMENTS.len() - 1],
        detail: format!("maps at the two finest edge subdivisions still differ by {last_gap:.3e} > {tol:.1e}"),
    })
}

/// Riemann map of a simple polygon with `points_per_edge` boundary points
/// per side (at least 1). The polygon may be given in either orientation.
pub fn uniformize_polygon(polygon: &[Point], u: Point, points_per_edge: usize) -> Result<ConformalMap> {
    if polygon.len() < 3 {
        bail!(InvalidInput, "polygon needs at least 3 vertices");
    }
    if !geom::polygon_is_simple(polygon) {
        bail!(InvalidInput, "polygon is not simple");
    }
    let mut poly = polygon.to_vec();
    if geom::signed_area(&poly) < 0.0 {
        poly.reverse();
    }
    if geom::winding_number(u, &poly) == 0 || geom::dist_point_polygon(u, &poly) == 0.0 {
        bail!(InvalidInput, "base point {u} is not inside the polygon");
    }
    build(&poly, u, points_per_edge.max(1))
}

/// Cell centres spread over the domain, at most about 40 of them.
fn probe_points(dom: &LatticeDomain) -> Vec<Point> {
    let cells = dom.cells();
    let step = (cells.len() / 40).max(1);
    let mut out: Vec<Point> = cells.iter().step_by(step).map(|c| c.center(dom.n())).collect();
    out.push(dom.u());
    out
}

fn build(poly: &[Point], u: Point, per_edge: usize) -> Result<ConformalMap> {
    let m = poly.len();
    let mut points = Vec::with_capacity(m * per_edge);
    let mut vertex = Vec::with_capacity(m * per_edge);
    let mut spacing: f64 = 0.0;
    for k in 0..m {
        let (a, b) = (poly[k], poly[(k + 1) % m]);
        spacing = spacing.max((b - a).norm() / per_edge as f64);
        for s in 0..per_edge {
            points.push(a + (b - a) * (s as f64 / per_edge as f64));
            vertex.push(s == 0);
        }
    }
    let (zip, real) = Zipper::build(&points)?;
    let (w_u, _) = zip.forward_with_derivative(u);
    if !(w_u.im > 0.0) {
        return Err(Error::NumericFailure { step: zip.len(), detail: format!("base point image {w_u} left the half plane") });
    }
    let outer0 = Mobius::half_plane_to_disc(w_u, 0.0)?;
    let (_, dz) = zip.forward_with_derivative(u);
    let theta = -(outer0.derivative(w_u) * dz).arg();
    let outer = Mobius::rotation(theta).compose(&outer0);
    let table = points
        .iter()
        .zip(&real)
        .zip(&vertex)
        .map(|((&p, &x), &v)| {
            let img = outer.apply_ext(x).unwrap_or(pt(1.0, 0.0));
            BoundaryEntry { point: p, angle: img.arg(), vertex: v }
        })
        .collect();
    Ok(ConformalMap {
        zip,
        outer,
        outer_inv: outer.inverse(),
        u,
        table,
        polygon: poly.to_vec(),
        lattice_n: None,
        points_per_edge: per_edge,
        normalization: Normalization::Riemann,
        spacing,
    })
}

impl ConformalMap {
    pub fn base_point(&self) -> Point {
        self.u
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn points_per_edge(&self) -> usize {
        self.points_per_edge
    }

    /// Boundary correspondence at the zipper points, in boundary order.
    pub fn boundary_table(&self) -> &[BoundaryEntry] {
        &self.table
    }

    /// The boundary polygon the map was built from (counter-clockwise).
    pub fn polygon(&self) -> &[Point] {
        &self.polygon
    }

    fn scale(&self) -> f64 {
        geom::diameter(&self.polygon).max(1e-300)
    }

    fn on_boundary(&self, z: Point) -> bool {
        geom::dist_point_polygon(z, &self.polygon) <= 1e-12 * self.scale()
    }

    fn inside_closed(&self, z: Point) -> bool {
        geom::winding_number(z, &self.polygon) != 0 || self.on_boundary(z)
    }

    /// Table angle of a boundary point that is one of the zipper points.
    pub fn table_angle(&self, z: Point) -> Option<f64> {
        let tol = 1e-12 * self.scale();
        self.table.iter().find(|e| (e.point - z).norm() <= tol).map(|e| e.angle)
    }

    /// Image of a boundary point: the table value, or else the limit of
    /// the map along the inward normal, extrapolated from a geometric
    /// sequence of offsets.
    pub fn boundary_value(&self, z: Point) -> Result<Point> {
        if let Some(t) = self.table_angle(z) {
            return Ok(Point::from_polar(1.0, t));
        }
        if !self.on_boundary(z) {
            bail!(InvalidInput, "{z} is not on the boundary");
        }
        let m = self.polygon.len();
        let k = (0..m)
            .min_by(|&i, &j| {
                let di = geom::dist_point_segment(z, self.polygon[i], self.polygon[(i + 1) % m]);
                let dj = geom::dist_point_segment(z, self.polygon[j], self.polygon[(j + 1) % m]);
                di.partial_cmp(&dj).unwrap()
            })
            .unwrap();
        let e = self.polygon[(k + 1) % m] - self.polygon[k];
        let normal = Point::i() * e / e.norm();
        let mut angles = Vec::new();
        let mut t = 0.25 * self.spacing;
        for _ in 0..8 {
            angles.push(self.eval_interior(z + normal * t).arg());
            t *= 0.5;
        }
        // Angle differences unwrapped against the first value.
        let base = angles[0];
        let rel: Vec<f64> = angles.iter().map(|a| geom::wrap_angle(a - base + core::f64::consts::PI) - core::f64::consts::PI).collect();
        let extrap: Vec<f64> = rel.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
        let n = extrap.len();
        let jump = (extrap[n - 1] - extrap[n - 2]).abs();
        if !(jump <= 1e-6) {
            bail!(NoRadialLimit, "map values along the normal at {z} do not settle (last change {jump:.2e})");
        }
        Ok(Point::from_polar(1.0, base + extrap[n - 1]))
    }

    fn eval_interior(&self, z: Point) -> Point {
        self.outer.apply(self.zip.forward(z)).unwrap_or(pt(1.0, 0.0))
    }

    /// Derivative of the map at an interior point.
    pub fn derivative(&self, z: Point) -> Result<Point> {
        if !self.inside_closed(z) || self.on_boundary(z) {
            bail!(InvalidInput, "{z} is not an interior point");
        }
        let (w, d) = self.zip.forward_with_derivative(z);
        Ok(self.outer.derivative(w) * d)
    }
}

impl Uniformizer for ConformalMap {
    fn to_disc(&self, z: Point) -> Result<Point> {
        if !self.inside_closed(z) {
            bail!(InvalidInput, "{z} is outside the domain");
        }
        if self.on_boundary(z) {
            return self.boundary_value(z);
        }
        Ok(self.eval_interior(z))
    }

    fn from_disc(&self, w: Point) -> Result<Point> {
        if !(w.norm() <= 1.0 + 1e-12) {
            bail!(InvalidInput, "{w} is outside the closed unit disc");
        }
        let v = self.outer_inv.apply(w)?;
        Ok(self.zip.inverse(pt(v.re, v.im.max(0.0))))
    }
}

/// Composes the Riemann map with the disc automorphism sending the marked
/// edges `a` and `b` (by their midpoints) to -1 and 1. The remaining
/// freedom is fixed by sending the point of the hyperbolic geodesic
/// between the two images nearest 0 to 0.
pub fn boundary_normalized(map: &ConformalMap, a: MarkedEdge, b: MarkedEdge) -> Result<ConformalMap> {
    if a == b {
        bail!(InvalidInput, "marked edges coincide");
    }
    let Some(n) = map.lattice_n else {
        bail!(InvalidInput, "map was not built from a lattice domain; use boundary_normalized_at");
    };
    boundary_normalized_at(map, a.midpoint(n), b.midpoint(n))
}

/// [`boundary_normalized`] for arbitrary boundary points.
pub fn boundary_normalized_at(map: &ConformalMap, a: Point, b: Point) -> Result<ConformalMap> {
    if (a - b).norm() == 0.0 {
        bail!(InvalidInput, "boundary points coincide");
    }
    let (alpha, beta) = (map.boundary_value(a)?, map.boundary_value(b)?);
    let m = two_point_normalization(alpha, beta)?;
    let mut out = map.clone();
    out.outer = m.compose(&map.outer);
    out.outer_inv = out.outer.inverse();
    for e in out.table.iter_mut() {
        e.angle = m.apply(Point::from_polar(1.0, e.angle)).map(|w| w.arg()).unwrap_or(0.0);
    }
    out.normalization = Normalization::TwoPoint { a, b };
    Ok(out)
}

/// `P_eps(z) = z / |z| * min(1 - eps, |z|)`.
pub fn radial_projection(z: Point, eps: f64) -> Result<Point> {
    if !(eps > 0.0 && eps < 1.0) {
        bail!(InvalidInput, "eps = {eps} is not in (0, 1)");
    }
    let r = z.norm();
    if !(r <= 1.0 + 1e-12) {
        bail!(InvalidInput, "{z} is outside the closed unit disc");
    }
    if r == 0.0 {
        return Ok(z);
    }
    Ok(z * ((1.0 - eps).min(r) / r))
}

/// `phi^{-1}(P_eps(phi(z)))`. Points already inside `phi^{-1}(B(0, 1 - eps))`
/// come back unchanged.
pub fn domain_projection<U: Uniformizer + ?Sized>(map: &U, z: Point, eps: f64) -> Result<Point> {
    let w = map.to_disc(z)?;
    let p = radial_projection(w, eps)?;
    if p == w {
        return Ok(z);
    }
    map.from_disc(p)
}

/// Samples of `phi^{-1}({t e^{i theta} : p <= t <= q})`, parametrized by
/// `(t - p) / (q - p)`.
pub fn conformal_ray<U: Uniformizer + ?Sized>(map: &U, theta: f64, p: f64, q: f64, npts: usize) -> Result<ParamCurve> {
    if !(0.0 <= p && p < q && q < 1.0) {
        bail!(InvalidInput, "ray radii must satisfy 0 <= p < q < 1, got p = {p}, q = {q}");
    }
    if npts < 2 {
        bail!(InvalidInput, "a ray needs at least 2 samples");
    }
    let dir = Point::from_polar(1.0, theta);
    let mut samples = Vec::with_capacity(npts);
    for k in 0..npts {
        let s = k as f64 / (npts - 1) as f64;
        let t = p + (q - p) * s;
        samples.push((s, map.from_disc(dir * t)?));
    }
    ParamCurve::new(samples)
}

/// Largest distance between the two inverse maps over the points of a
/// `grid x grid` lattice that fall in the closed disc of the given radius.
pub fn caratheodory_sup_error<A, B>(map_n: &A, map_limit: &B, radius: f64, grid: usize) -> Result<f64>
where
    A: Uniformizer + ?Sized,
    B: Uniformizer + ?Sized,
{
    if !(radius > 0.0 && radius < 1.0) {
        bail!(InvalidInput, "radius must be in (0, 1)");
    }
    if grid < 2 {
        bail!(InvalidInput, "grid must have at least 2 points per side");
    }
    let mut worst: f64 = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let x = -radius + 2.0 * radius * i as f64 / (grid - 1) as f64;
            let y = -radius + 2.0 * radius * j as f64 / (grid - 1) as f64;
            let w = pt(x, y);
            if w.norm() > radius * (1.0 + 1e-12) {
                continue;
            }
            worst = worst.max((map_n.from_disc(w)? - map_limit.from_disc(w)?).norm());
        }
    }
    Ok(worst)
}

/// Whether the tail `phi^{-1}({t e^{i theta} : 1 - eps <= t < 1})` of a
/// conformal ray is cut off from the base point by the innermost
/// component of `S(z, C delta)` around its start `z`.
///
/// The start must be within `delta` of the boundary; otherwise the check
/// cannot say anything at this resolution and an error is returned. A
/// `false` answer means the constant `C` was too small for this ray.
pub fn verify_ray_in_fjord(map: &ConformalMap, dom: &LatticeDomain, theta: f64, eps: f64, delta: f64, c: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0) || !(c > 0.0) {
        bail!(InvalidInput, "need 0 < eps < 1, delta > 0 and C > 0");
    }
    let dir = Point::from_polar(1.0, theta);
    let z = map.from_disc(dir * (1.0 - eps))?;
    let dz = dom.boundary_distance(z);
    if !(dz < delta) {
        bail!(ResolutionTooCoarse, "ray start {z} is {dz:.3e} from the boundary, not within delta = {delta:.3e}");
    }
    let u = dom.u();
    let cut = match innermost_disconnecting(dom, z, c * delta, u) {
        Ok(cut) => cut,
        Err(Error::NotFound(_)) | Err(Error::InvalidInput(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let k = 64;
    for j in 0..=k {
        let t = 1.0 - eps * (1.0 - j as f64 / k as f64);
        let t = t.min(1.0 - 1e-9);
        let p = map.from_disc(dir * t)?;
        if cut.distance_to(p) < 1e-12 {
            continue;
        }
        if !separates(dom, &cut, p, u) {
            return Ok(false);
        }
    }
    Ok(true)
}
