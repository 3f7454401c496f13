//! Brownian exit points by walk on spheres.
//!
//! From a point at distance `d` from the boundary, Brownian motion first
//! leaves the disc `B(p, d)` at a uniform point of its circle, so the walk
//! jumps there directly. Once within `step` of the boundary the walk is
//! absorbed and snapped to the nearest boundary point.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MCEstimate;
use crate::error::{bail, Error, Result};
use crate::lattice::{Cell, LatticeDomain, MarkedEdge};
use crate::{geom, Point};

/// Jumps after which a walk is declared stuck.
const MAX_JUMPS: usize = 100_000;

/// A domain seen through its boundary distance.
pub trait ExitGeometry {
    /// A lower bound on the distance from `p` to the boundary, exact once
    /// it falls below `exact_below`. Non-positive outside the domain.
    fn distance(&self, p: Point, exact_below: f64) -> f64;
    /// The boundary point nearest to `p`.
    fn snap(&self, p: Point) -> Point;
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One walk from `z`, returning its snapped exit point.
fn exit_point<G: ExitGeometry + ?Sized>(g: &G, z: Point, step: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
    let mut p = z;
    for _ in 0..MAX_JUMPS {
        let d = g.distance(p, 4.0 * step);
        if d < step {
            return Ok(g.snap(p));
        }
        let t = 2.0 * core::f64::consts::PI * uniform(rng);
        p += Point::from_polar(d, t);
    }
    Err(Error::NumericFailure { step: MAX_JUMPS, detail: alloc::format!("walk from {z} did not reach the boundary") })
}

/// Fraction of `walks` Brownian paths from `z` whose exit point satisfies
/// `hit`, with absorption at distance `step`.
pub fn exit_estimate<G, F>(g: &G, z: Point, walks: usize, step: f64, seed: u64, mut hit: F) -> Result<MCEstimate>
where
    G: ExitGeometry + ?Sized,
    F: FnMut(Point) -> bool,
{
    if walks == 0 {
        bail!(InvalidInput, "need at least one walk");
    }
    if !(step > 0.0) {
        bail!(InvalidInput, "absorption distance must be positive");
    }
    if !(g.distance(z, f64::INFINITY) > 0.0) {
        bail!(InvalidInput, "start {z} is not an interior point");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..walks {
        if hit(exit_point(g, z, step, &mut rng)?) {
            hits += 1;
        }
    }
    MCEstimate::from_hits(hits, walks, seed)
}

/// A lattice domain with boundary distances cached at cell centres.
pub struct LatticeExit<'a> {
    dom: &'a LatticeDomain,
    polygon: Vec<Point>,
    centre_dist: BTreeMap<Cell, f64>,
}

impl<'a> LatticeExit<'a> {
    pub fn new(dom: &'a LatticeDomain) -> LatticeExit<'a> {
        let polygon = dom.boundary_polygon();
        let centre_dist =
            dom.cells().iter().map(|&c| (c, geom::dist_point_polygon(c.center(dom.n()), &polygon))).collect();
        LatticeExit { dom, polygon, centre_dist }
    }

    /// The boundary edge an exit point belongs to.
    pub fn edge_of(&self, p: Point) -> MarkedEdge {
        self.dom.nearest_boundary_edge(p)
    }
}

impl ExitGeometry for LatticeExit<'_> {
    fn distance(&self, p: Point, exact_below: f64) -> f64 {
        let c = self.dom.cell_of(p);
        let Some(&dc) = self.centre_dist.get(&c) else {
            return if self.dom.contains_closed(p) { 0.0 } else { -1.0 };
        };
        // The distance function is 1-Lipschitz.
        let lower = dc - (p - c.center(self.dom.n())).norm();
        if lower >= exact_below {
            return lower;
        }
        geom::dist_point_polygon(p, &self.polygon)
    }

    fn snap(&self, p: Point) -> Point {
        geom::closest_on_polygon(p, &self.polygon).0
    }
}

/// The disc `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscExit {
    pub center: Point,
    pub radius: f64,
}

impl ExitGeometry for DiscExit {
    fn distance(&self, p: Point, _: f64) -> f64 {
        self.radius - (p - self.center).norm()
    }

    fn snap(&self, p: Point) -> Point {
        let v = p - self.center;
        let r = v.norm();
        if r == 0.0 {
            return self.center + self.radius;
        }
        self.center + v * (self.radius / r)
    }
}

/// The disc `B(center, radius)` with a polyline obstacle removed.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitDiscExit {
    pub disc: DiscExit,
    pub obstacle: Vec<Point>,
}

impl SlitDiscExit {
    /// True when the exit point is on the circle rather than the obstacle.
    pub fn on_circle(&self, p: Point) -> bool {
        (self.disc.radius - (p - self.disc.center).norm()).abs() < geom::dist_point_polyline(p, &self.obstacle)
    }
}

impl ExitGeometry for SlitDiscExit {
    fn distance(&self, p: Point, _: f64) -> f64 {
        self.disc.distance(p, 0.0).min(geom::dist_point_polyline(p, &self.obstacle))
    }

    fn snap(&self, p: Point) -> Point {
        let dc = self.disc.distance(p, 0.0);
        let (mut best, mut bd) = (self.disc.snap(p), dc);
        for w in self.obstacle.windows(2) {
            let (q, _) = geom::closest_on_segment(p, w[0], w[1]);
            let d = (q - p).norm();
            if d < bd {
                best = q;
                bd = d;
            }
        }
        best
    }
}

/// Harmonic measure from `z` of the boundary edges in `target`.
pub fn harmonic_measure_mc(
    dom: &LatticeDomain,
    z: Point,
    target: &[MarkedEdge],
    walks: usize,
    step: f64,
    seed: u64,
) -> Result<MCEstimate> {
    if target.is_empty() {
        bail!(InvalidInput, "target arc has no edges");
    }
    if let Some(e) = target.iter().find(|e| dom.edge_index(**e).is_none()) {
        bail!(InvalidInput, "{e:?} is not a boundary edge");
    }
    if !dom.contains(z) {
        bail!(InvalidInput, "start {z} is not inside the domain");
    }
    let g = LatticeExit::new(dom);
    let mut set: Vec<MarkedEdge> = target.to_vec();
    set.sort_unstable();
    exit_estimate(&g, z, walks, step, seed, |p| set.binary_search(&g.edge_of(p)).is_ok())
}

/// Outcome of [`beurling_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeurlingReport {
    /// Probability of reaching `|w - z| = R` before the obstacle.
    pub estimate: MCEstimate,
    /// `dist(z, K)`.
    pub r: f64,
    /// `(4 / pi) sqrt(r / R)`.
    pub bound: f64,
    /// Whether `estimate <= bound + 3 stderr`.
    pub passes: bool,
}

/// Monte-Carlo check of the Beurling estimate for a connected polyline
/// obstacle `k` reaching from near `z` out to the circle `|w - z| = R`.
/// The absorption distance is `1e-4 * r`.
pub fn beurling_check(z: Point, k: &[Point], big_r: f64, walks: usize, seed: u64) -> Result<BeurlingReport> {
    if k.is_empty() {
        bail!(InvalidConfiguration, "obstacle is empty");
    }
    if !(big_r > 0.0) {
        bail!(InvalidConfiguration, "radius must be positive");
    }
    let reach = k.iter().map(|p| (p - z).norm()).fold(0.0, f64::max);
    if reach < big_r * (1.0 - 1e-12) {
        bail!(InvalidConfiguration, "obstacle stays inside |w - z| < {big_r} (reaches {reach})");
    }
    let r = if k.len() == 1 { (k[0] - z).norm() } else { geom::dist_point_polyline(z, k) };
    if !(r > 0.0) {
        bail!(InvalidConfiguration, "obstacle passes through z");
    }
    if r > big_r * (1.0 + 1e-12) {
        bail!(InvalidConfiguration, "dist(z, K) = {r} exceeds R = {big_r}");
    }
    let bound = 4.0 / core::f64::consts::PI * (r / big_r).min(1.0).sqrt();
    let g = SlitDiscExit { disc: DiscExit { center: z, radius: big_r }, obstacle: k.to_vec() };
    let estimate = if r >= big_r * (1.0 - 1e-12) {
        // The start is on the obstacle's circle; the bound exceeds 1.
        MCEstimate::from_hits(0, walks.max(1), seed)?
    } else {
        exit_estimate(&g, z, walks, 1e-4 * r, seed, |p| g.on_circle(p))?
    };
    let passes = estimate.mean <= bound + 3.0 * estimate.stderr;
    Ok(BeurlingReport { estimate, r, bound, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{approximate_domain, Side};
    use crate::pt;
    use core::f64::consts::PI;

    #[test]
    fn disc_arcs_have_their_angle_fraction() {
        let g = DiscExit { center: pt(0.0, 0.0), radius: 1.0 };
        for alpha in [PI / 6.0, PI / 2.0, PI] {
            let e = exit_estimate(&g, pt(0.0, 0.0), 20_000, 1e-4, 11, |p| {
                let t = p.arg();
                t >= 0.0 && t < alpha
            })
            .unwrap();
            assert!(e.agrees_with(alpha / (2.0 * PI), 3.0), "{alpha}: {e:?}");
        }
    }

    #[test]
    fn off_centre_start_follows_the_poisson_kernel() {
        // Oracle: midpoint quadrature of the Poisson kernel over the upper
        // half circle.
        let z = pt(0.5, 0.0);
        let m = 20_000;
        let want: f64 = (0..m)
            .map(|k| {
                let t = PI * (k as f64 + 0.5) / m as f64;
                let w = Point::from_polar(1.0, t);
                (1.0 - z.norm_sqr()) / (w - z).norm_sqr() / (2.0 * PI) * (PI / m as f64)
            })
            .sum();
        let g = DiscExit { center: pt(0.0, 0.0), radius: 1.0 };
        let e = exit_estimate(&g, z, 20_000, 1e-4, 5, |p| p.im > 0.0).unwrap();
        assert!(e.agrees_with(want, 3.0), "{want} {e:?}");
    }

    #[test]
    fn lattice_partition_sums_to_one() {
        let dom = LatticeDomain::full_square(8);
        let edges = dom.boundary_edges().to_vec();
        let (left, right) = edges.split_at(edges.len() / 3);
        let a = harmonic_measure_mc(&dom, dom.u(), left, 4000, 1e-3, 3).unwrap();
        let b = harmonic_measure_mc(&dom, dom.u(), right, 4000, 1e-3, 3).unwrap();
        // Same seed, same walks: complementary targets count every walk once.
        assert!((a.mean + b.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_sides_get_a_quarter_each() {
        let dom = LatticeDomain::full_square(8);
        let west: Vec<MarkedEdge> = (0..8).map(|j| MarkedEdge::new(0, j, Side::W)).collect();
        let e = harmonic_measure_mc(&dom, pt(0.5, 0.5), &west, 20_000, 1e-3, 9).unwrap();
        assert!(e.agrees_with(0.25, 3.0), "{e:?}");
    }

    #[test]
    fn lattice_disc_agrees_with_the_disc() {
        let c = pt(0.5, 0.5);
        let poly: Vec<Point> = (0..256).map(|k| c + Point::from_polar(0.4, 2.0 * PI * k as f64 / 256.0)).collect();
        let dom = approximate_domain(&poly, c, 64).unwrap();
        let half: Vec<MarkedEdge> =
            dom.boundary_edges().iter().copied().filter(|e| e.midpoint(64).im > 0.5).collect();
        let e = harmonic_measure_mc(&dom, c, &half, 10_000, 1.0 / 512.0, 1).unwrap();
        assert!(e.agrees_with(0.5, 3.0), "{e:?}");
    }

    #[test]
    fn walks_zero_and_bad_targets_are_rejected() {
        let dom = LatticeDomain::full_square(4);
        let e = dom.boundary_edges()[0];
        assert!(harmonic_measure_mc(&dom, dom.u(), &[e], 0, 1e-3, 0).is_err());
        assert!(harmonic_measure_mc(&dom, dom.u(), &[MarkedEdge::new(1, 1, Side::N)], 10, 1e-3, 0).is_err());
        assert!(harmonic_measure_mc(&dom, pt(2.0, 2.0), &[e], 10, 1e-3, 0).is_err());
    }

    #[test]
    fn beurling_slit() {
        for ratio in [1e-2, 1e-3] {
            let k = [pt(ratio, 0.0), pt(1.0, 0.0)];
            let rep = beurling_check(pt(0.0, 0.0), &k, 1.0, 5000, 4).unwrap();
            assert!(rep.passes, "{ratio}: {rep:?}");
            assert!((rep.bound - 4.0 / PI * ratio.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn beurling_trend_and_configuration() {
        let est = |r: f64| beurling_check(pt(0.0, 0.0), &[pt(r, 0.0), pt(1.0, 0.0)], 1.0, 4000, 8).unwrap().estimate.mean;
        assert!(est(0.05) < est(0.1));
        assert!(est(0.1) < est(0.2));
        let touching = beurling_check(pt(0.0, 0.0), &[pt(1.0, 0.0), pt(1.0, 0.5)], 1.0, 10, 0).unwrap();
        assert!(touching.passes && touching.bound > 1.0);
        let short = beurling_check(pt(0.0, 0.0), &[pt(0.1, 0.0), pt(0.5, 0.0)], 1.0, 10, 0);
        assert!(matches!(short, Err(Error::InvalidConfiguration(_))));
    }
}
