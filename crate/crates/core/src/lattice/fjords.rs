//! A finite family of disjoint fjords cut off by a coarse grid loop.
//!
//! The loop lives on the grid `Cδ Z^2` inside the component `G` of the
//! `(C+1)δ`-interior containing `u`. Squares just outside the loop are
//! walled off along their sides until the walls leave `G`, and from
//! there by straight segments to the nearest boundary point. What is left
//! outside the loop splits into the fjords.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::approx::BoolGrid;
use super::raster::Raster;
use super::{Cell, CrossCut, LatticeDomain};
use crate::error::{bail, Result};
use crate::{geom, pt, Point};

/// What a fjord is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FjordReference {
    /// The component not containing the base point `u`.
    BasePoint,
    /// The component not adjacent to either marked edge.
    MarkedEdges,
}

/// A set of raster pixels, stored by global pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelRegion {
    n: u32,
    k: u32,
    pixels: Vec<(i64, i64)>,
}

impl PixelRegion {
    fn new(n: u32, k: u32, mut pixels: Vec<(i64, i64)>) -> PixelRegion {
        pixels.sort_unstable();
        pixels.dedup();
        PixelRegion { n, k, pixels }
    }

    pub fn pixel_size(&self) -> f64 {
        1.0 / (self.n as f64 * self.k as f64)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        let s = self.n as f64 * self.k as f64;
        let key = ((p.re * s).floor() as i64, (p.im * s).floor() as i64);
        self.pixels.binary_search(&key).is_ok()
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        let hp = self.pixel_size();
        self.pixels.iter().map(move |&(x, y)| pt((x as f64 + 0.5) * hp, (y as f64 + 0.5) * hp))
    }

    /// Lattice cells meeting the region.
    pub fn cells(&self) -> Vec<Cell> {
        let k = self.k as i64;
        let mut out: Vec<Cell> = self.pixels.iter().map(|&(x, y)| Cell::new(x.div_euclid(k) as i32, y.div_euclid(k) as i32)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fjord {
    pub mouth: CrossCut,
    pub reference: FjordReference,
    /// Largest interior distance from a point of the fjord to its mouth.
    pub depth: f64,
    /// Diameter of the mouth pixel set.
    pub mouth_diameter: f64,
    /// A point realising the depth.
    pub deepest: Point,
    pub region: PixelRegion,
}

impl Fjord {
    pub fn contains(&self, p: Point) -> bool {
        self.region.contains(p)
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.region.cells()
    }

    /// The same fjord regarded relative to the marked edges, if neither
    /// marked edge is adjacent to it.
    pub fn relative_to_marks(&self, dom: &LatticeDomain) -> Option<Fjord> {
        let hp = self.region.pixel_size();
        let touches = |e: super::MarkedEdge| {
            let (p, q) = e.endpoints(dom.n());
            let inward = (q - p) * Point::i() / (q - p).norm();
            (0..=8).any(|t| self.contains(p + (q - p) * (t as f64 / 8.0) + inward * (0.5 * hp)))
        };
        if touches(dom.a()) || touches(dom.b()) {
            return None;
        }
        let mut f = self.clone();
        f.reference = FjordReference::MarkedEdges;
        Some(f)
    }
}

/// All fjords together with the region enclosed by the loop.
#[derive(Debug, Clone)]
pub struct FjordPartition {
    pub fjords: Vec<Fjord>,
    pub interior: PixelRegion,
    /// Side of the coarse squares, `Cδ`.
    pub square: f64,
}

/// Builds the fjords of `dom` with respect to `u` for the scale `delta`
/// and constant `c`.
pub fn build_fjords(dom: &LatticeDomain, u: Point, delta: f64, c: f64) -> Result<Vec<Fjord>> {
    Ok(build_fjord_partition(dom, u, delta, c)?.fjords)
}

pub fn build_fjord_partition(dom: &LatticeDomain, u: Point, delta: f64, c: f64) -> Result<FjordPartition> {
    if !(delta > 0.0) || !(c > 0.0) {
        bail!(InvalidInput, "delta and C must be positive");
    }
    if !dom.contains(u) {
        bail!(InvalidInput, "u is not inside the domain");
    }
    let n = dom.n();
    let s = c * delta;
    let k = (8.0 / (n as f64 * s)).ceil().clamp(4.0, 64.0) as u32;
    let raster = Raster::new(dom, k);
    let hp = raster.pixel();
    let dist = raster.boundary_distance_field();
    let margin = (c + 1.0) * delta;
    let deep: Vec<bool> = (0..raster.len()).map(|p| raster.inside(p) && dist[p] >= margin).collect();
    let Some(up) = raster.pixel_of(u) else {
        bail!(DeltaTooLarge, "u is off the raster");
    };
    if !deep[up] {
        bail!(DeltaTooLarge, "u is within (C+1)δ = {margin} of the boundary");
    }
    let g = raster.flood(&[up], &deep);

    // Coarse squares of side s fully inside G, judged by pixel centres.
    let (lo, hi) = dom.bbox();
    let m0 = (lo.re / s).floor() as i64;
    let m1 = (lo.im / s).floor() as i64;
    let w = ((hi.re / s).ceil() as i64 - m0).max(1) as usize;
    let h = ((hi.im / s).ceil() as i64 - m1).max(1) as usize;
    let mut bad = BoolGrid::new(w, h);
    let mut seen_any = BoolGrid::new(w, h);
    let sq_of = |p: Point| -> Option<(usize, usize)> {
        let x = (p.re / s).floor() as i64 - m0;
        let y = (p.im / s).floor() as i64 - m1;
        (x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h).then_some((x as usize, y as usize))
    };
    for p in 0..raster.len() {
        if let Some((x, y)) = sq_of(raster.center(p)) {
            seen_any.set(x, y, true);
            if !g[p] {
                bad.set(x, y, true);
            }
        }
    }
    let mut squares = BoolGrid::new(w, h);
    for i in 0..w * h {
        squares.bits[i] = seen_any.bits[i] && !bad.bits[i];
    }
    let Some(useed) = sq_of(u) else {
        bail!(DeltaTooLarge, "u is off the coarse grid");
    };
    if !squares.get(useed.0 as isize, useed.1 as isize) {
        bail!(DeltaTooLarge, "the coarse square around u is not inside G (Cδ = {s})");
    }
    squares.remove_pinches(&[useed]);
    squares.fill_holes();

    let in_loop = |p: Point| sq_of(p).is_some_and(|(x, y)| squares.get(x as isize, y as isize));
    let interior: Vec<bool> = (0..raster.len()).map(|p| raster.inside(p) && in_loop(raster.center(p))).collect();

    // Walls around the squares adjacent to the loop.
    let poly = dom.boundary_polygon();
    let corner = |x: i64, y: i64| pt((x + m0) as f64 * s, (y + m1) as f64 * s);
    let in_g = |p: Point| raster.pixel_of(p).is_some_and(|q| g[q]);
    let mut wall = vec![false; raster.len()];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if squares.get(x as isize, y as isize) {
                continue;
            }
            // Perimeter of Q counterclockwise from its lower-left corner.
            let per = [corner(x, y), corner(x + 1, y), corner(x + 1, y + 1), corner(x, y + 1)];
            let nb = [(x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)];
            for side in 0..4 {
                let (nx, ny) = nb[side];
                if !squares.get(nx as isize, ny as isize) {
                    continue;
                }
                // Side `side` runs per[side] -> per[side + 1] and lies on the loop.
                for (start, dir) in [(side, -1i64), ((side + 1) % 4, 1)] {
                    let path = walk_perimeter(&per, start, dir, s, hp, &in_g);
                    let mut pts = path.points;
                    if let Some(hit) = path.exit {
                        let (foot, _) = geom::closest_on_polygon(hit, &poly);
                        pts.push(foot);
                    }
                    for q in raster.rasterize_polyline(&pts, false) {
                        if raster.inside(q) && !interior[q] {
                            wall[q] = true;
                        }
                    }
                }
            }
        }
    }

    let free: Vec<bool> = (0..raster.len()).map(|p| raster.inside(p) && !interior[p] && !wall[p]).collect();
    let (mut labels, count) = raster.label(&free);

    // Mouth pixels per component: non-free inside pixels next to it.
    let mut mouths: Vec<Vec<usize>> = vec![Vec::new(); count];
    for p in 0..raster.len() {
        if !raster.inside(p) || free[p] {
            continue;
        }
        let mut ls: Vec<usize> = raster.neighbors4(p).filter(|&q| free[q]).map(|q| labels[q]).collect();
        ls.sort_unstable();
        ls.dedup();
        for l in ls {
            mouths[l].push(p);
        }
    }

    // Hand wall pixels to the nearest component so the fjords cover
    // everything outside the loop.
    let mut queue: VecDeque<usize> = (0..raster.len()).filter(|&p| free[p]).collect();
    while let Some(p) = queue.pop_front() {
        for q in raster.neighbors4(p) {
            if wall[q] && labels[q] == usize::MAX {
                labels[q] = labels[p];
                queue.push_back(q);
            }
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for p in 0..raster.len() {
        if labels[p] != usize::MAX && raster.inside(p) && !interior[p] {
            members[labels[p]].push(p);
        }
    }

    let mut fjords = Vec::with_capacity(count);
    for l in 0..count {
        let mouth_px = &mouths[l];
        if mouth_px.is_empty() {
            continue;
        }
        let centers: Vec<Point> = mouth_px.iter().map(|&p| raster.center(p)).collect();
        let mouth_diameter = geom::diameter(&centers);
        let polyline = mouth_polyline(&raster, mouth_px);
        let mouth = CrossCut::open(polyline);
        // Geodesics from the fjord to its mouth stay in the fjord.
        let mut open = vec![false; raster.len()];
        for &p in members[l].iter().chain(mouth_px.iter()) {
            open[p] = true;
        }
        let sources: Vec<(usize, f64)> = mouth_px.iter().map(|&p| (p, 0.0)).collect();
        let d = raster.dijkstra(&sources, &open);
        let (deep_px, depth) = members[l]
            .iter()
            .map(|&p| (p, d[p]))
            .filter(|x| x.1.is_finite())
            .fold((members[l][0], 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
        fjords.push(Fjord {
            mouth,
            reference: FjordReference::BasePoint,
            depth,
            mouth_diameter,
            deepest: raster.center(deep_px),
            region: PixelRegion::new(n, k, members[l].iter().map(|&p| raster.global(p)).collect()),
        });
    }
    let interior = PixelRegion::new(n, k, (0..raster.len()).filter(|&p| interior[p]).map(|p| raster.global(p)).collect());
    Ok(FjordPartition { fjords, interior, square: s })
}

struct PerimeterWalk {
    points: Vec<Point>,
    exit: Option<Point>,
}

/// Walks the square perimeter from corner `start` in direction `dir`
/// (+1 counterclockwise) sampling every half pixel until a sample leaves
/// `G` or the whole perimeter has been covered.
fn walk_perimeter(per: &[Point; 4], start: usize, dir: i64, s: f64, hp: f64, in_g: &impl Fn(Point) -> bool) -> PerimeterWalk {
    let steps_per_side = ((s / (0.5 * hp)).ceil() as usize).max(1);
    let mut points = vec![per[start]];
    let mut corner = start;
    for _ in 0..4 {
        let next = (corner as i64 + dir).rem_euclid(4) as usize;
        let (a, b) = (per[corner], per[next]);
        for t in 1..=steps_per_side {
            let q = a + (b - a) * (t as f64 / steps_per_side as f64);
            if !in_g(q) {
                points.push(q);
                return PerimeterWalk { points, exit: Some(q) };
            }
        }
        points.push(b);
        corner = next;
    }
    PerimeterWalk { points, exit: None }
}

/// A pixel path through the mouth set between its two extreme pixels that
/// touch the outside of the domain (or simply its two extreme pixels).
fn mouth_polyline(raster: &Raster, mouth: &[usize]) -> Vec<Point> {
    let touches_outside = |p: usize| raster.neighbors8(p).any(|q| !raster.inside(q));
    let ends: Vec<usize> = {
        let e: Vec<usize> = mouth.iter().copied().filter(|&p| touches_outside(p)).collect();
        if e.len() >= 2 {
            e
        } else {
            mouth.to_vec()
        }
    };
    let (mut best, mut bd) = ((ends[0], ends[0]), -1.0);
    for i in 0..ends.len() {
        for j in (i + 1)..ends.len() {
            let d = (raster.center(ends[i]) - raster.center(ends[j])).norm();
            if d > bd {
                bd = d;
                best = (ends[i], ends[j]);
            }
        }
    }
    let mut in_mouth = vec![false; raster.len()];
    for &p in mouth {
        in_mouth[p] = true;
    }
    // Breadth-first over 8-neighbours inside the mouth set.
    let mut prev = vec![usize::MAX; raster.len()];
    let mut q = VecDeque::new();
    prev[best.0] = best.0;
    q.push_back(best.0);
    while let Some(p) = q.pop_front() {
        if p == best.1 {
            break;
        }
        for r in raster.neighbors8(p) {
            if in_mouth[r] && prev[r] == usize::MAX {
                prev[r] = p;
                q.push_back(r);
            }
        }
    }
    if prev[best.1] == usize::MAX {
        return vec![raster.center(best.0), raster.center(best.1)];
    }
    let mut path = vec![raster.center(best.1)];
    let mut c = best.1;
    while prev[c] != c {
        c = prev[c];
        path.push(raster.center(c));
    }
    path.reverse();
    path
}
