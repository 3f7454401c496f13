//! Lattice approximation of a polygonal domain from inside.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Cell, LatticeDomain};
use crate::error::{bail, Error, Result};
use crate::{geom, pt, Point};

/// Dense boolean grid with a fixed origin, used for cell sets at any scale.
#[derive(Debug, Clone)]
pub(crate) struct BoolGrid {
    pub w: usize,
    pub h: usize,
    pub bits: Vec<bool>,
}

impl BoolGrid {
    pub fn new(w: usize, h: usize) -> BoolGrid {
        BoolGrid { w, h, bits: vec![false; w * h] }
    }

    pub fn get(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h && self.bits[x as usize + self.w * y as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[x + self.w * y] = v;
    }

    /// Cells 4-connected to the seeds (all seeds must be set).
    pub fn component(&self, seeds: &[(usize, usize)]) -> BoolGrid {
        let mut out = BoolGrid::new(self.w, self.h);
        let mut stack = Vec::new();
        for &(x, y) in seeds {
            if self.get(x as isize, y as isize) && !out.get(x as isize, y as isize) {
                out.set(x, y, true);
                stack.push((x, y));
            }
        }
        while let Some((x, y)) = stack.pop() {
            for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if self.get(nx, ny) && !out.get(nx, ny) {
                    out.set(nx as usize, ny as usize, true);
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// First 2x2 block whose set cells are exactly one diagonal pair.
    fn find_pinch(&self) -> Option<((usize, usize), (usize, usize))> {
        for y in 0..self.h.saturating_sub(1) {
            for x in 0..self.w.saturating_sub(1) {
                let (xi, yi) = (x as isize, y as isize);
                let ll = self.get(xi, yi);
                let lr = self.get(xi + 1, yi);
                let ul = self.get(xi, yi + 1);
                let ur = self.get(xi + 1, yi + 1);
                if ll && ur && !lr && !ul {
                    return Some(((x, y), (x + 1, y + 1)));
                }
                if lr && ul && !ll && !ur {
                    return Some(((x + 1, y), (x, y + 1)));
                }
            }
        }
        None
    }

    /// Resolves corner contacts by deleting one of the two touching cells,
    /// keeping whichever choice leaves the larger component around the
    /// seeds, until none remain. Seeds are never deleted.
    pub fn remove_pinches(&mut self, seeds: &[(usize, usize)]) {
        *self = self.component(seeds);
        while let Some((c1, c2)) = self.find_pinch() {
            let mut best: Option<BoolGrid> = None;
            for c in [c2, c1] {
                if seeds.contains(&c) {
                    continue;
                }
                let mut g = self.clone();
                g.set(c.0, c.1, false);
                let g = g.component(seeds);
                if best.as_ref().is_none_or(|b| g.count() > b.count()) {
                    best = Some(g);
                }
            }
            match best {
                Some(g) => *self = g,
                // Both cells are seeds, which only happens if the seeds
                // themselves pinch; drop the later one.
                None => {
                    self.set(c2.0, c2.1, false);
                    *self = self.component(seeds);
                }
            }
        }
    }

    /// Fills every unset cell not 4-connected to the grid border.
    pub fn fill_holes(&mut self) {
        let mut outside = BoolGrid::new(self.w, self.h);
        let mut stack = Vec::new();
        for x in 0..self.w {
            for y in [0, self.h - 1] {
                if !self.get(x as isize, y as isize) && !outside.get(x as isize, y as isize) {
                    outside.set(x, y, true);
                    stack.push((x, y));
                }
            }
        }
        for y in 0..self.h {
            for x in [0, self.w - 1] {
                if !self.get(x as isize, y as isize) && !outside.get(x as isize, y as isize) {
                    outside.set(x, y, true);
                    stack.push((x, y));
                }
            }
        }
        while let Some((x, y)) = stack.pop() {
            for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx >= 0 && ny >= 0 && (nx as usize) < self.w && (ny as usize) < self.h && !self.get(nx, ny) && !outside.get(nx, ny) {
                    outside.set(nx as usize, ny as usize, true);
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
        for i in 0..self.bits.len() {
            if !outside.bits[i] {
                self.bits[i] = true;
            }
        }
    }
}

/// Parameter interval of the segment `a + s (b - a)` inside the closed box.
fn clip_segment(a: Point, b: Point, lo: Point, hi: Point) -> Option<(f64, f64)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-d.re, a.re - lo.re),
        (d.re, hi.re - a.re),
        (-d.im, a.im - lo.im),
        (d.im, hi.im - a.im),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

fn inside_closed(p: Point, poly: &[Point]) -> bool {
    geom::winding_number(p, poly) != 0 || geom::dist_point_polygon(p, poly) <= 1e-12
}

/// A cell is admissible when the open cell lies inside the polygon.
fn admissible(c: Cell, n: u32, poly: &[Point]) -> bool {
    let h = 1.0 / n as f64;
    let lo = pt(c.i as f64 * h, c.j as f64 * h);
    let hi = pt(lo.re + h, lo.im + h);
    let corners = [lo, pt(hi.re, lo.im), hi, pt(lo.re, hi.im)];
    if !corners.iter().all(|&q| inside_closed(q, poly)) {
        return false;
    }
    let m = poly.len();
    for k in 0..m {
        let (a, b) = (poly[k], poly[(k + 1) % m]);
        if let Some((t0, t1)) = clip_segment(a, b, lo, hi) {
            let mid = a + (b - a) * (0.5 * (t0 + t1));
            if mid.re > lo.re && mid.re < hi.re && mid.im > lo.im && mid.im < hi.im {
                return false;
            }
        }
    }
    true
}

/// Cells whose closure contains `p`.
pub(crate) fn cells_around(p: Point, n: u32) -> Vec<Cell> {
    let s = n as f64;
    let (x, y) = (p.re * s, p.im * s);
    let (fx, fy) = (x.floor() as i32, y.floor() as i32);
    let xs = if x == x.floor() { vec![fx - 1, fx] } else { vec![fx] };
    let ys = if y == y.floor() { vec![fy - 1, fy] } else { vec![fy] };
    xs.iter().flat_map(|&i| ys.iter().map(move |&j| Cell::new(i, j))).collect()
}

/// Approximates a simple polygon from inside by the largest simply
/// connected union of grid cells of side `1/n` whose boundary loop
/// encloses `u`. Marks default to the first boundary edge and the one
/// half way round; see [`approximate_domain_marked`].
pub fn approximate_domain(polygon: &[Point], u: Point, n: u32) -> Result<LatticeDomain> {
    if n == 0 {
        bail!(InvalidInput, "grid resolution must be positive");
    }
    if !geom::polygon_is_simple(polygon) {
        bail!(InvalidInput, "polygon is not simple");
    }
    if geom::winding_number(u, polygon) == 0 || geom::dist_point_polygon(u, polygon) == 0.0 {
        bail!(InvalidInput, "base point is not strictly inside the polygon");
    }
    let s = n as f64;
    let i0 = polygon.iter().map(|p| (p.re * s).floor() as i32).min().unwrap();
    let i1 = polygon.iter().map(|p| (p.re * s).ceil() as i32).max().unwrap();
    let j0 = polygon.iter().map(|p| (p.im * s).floor() as i32).min().unwrap();
    let j1 = polygon.iter().map(|p| (p.im * s).ceil() as i32).max().unwrap();
    let w = (i1 - i0).max(1) as usize;
    let h = (j1 - j0).max(1) as usize;
    let mut grid = BoolGrid::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let c = Cell::new(i0 + x as i32, j0 + y as i32);
            grid.set(x, y, admissible(c, n, polygon));
        }
    }
    let mut seeds = Vec::new();
    for c in cells_around(u, n) {
        let (x, y) = ((c.i - i0) as isize, (c.j - j0) as isize);
        if !grid.get(x, y) {
            bail!(ResolutionTooCoarse, "no admissible cell around the base point at n = {n}");
        }
        seeds.push((x as usize, y as usize));
    }
    grid.remove_pinches(&seeds);
    let mut cells = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if grid.get(x as isize, y as isize) {
                cells.push(Cell::new(i0 + x as i32, j0 + y as i32));
            }
        }
    }
    LatticeDomain::unmarked(n, cells, u).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::ResolutionTooCoarse(msg),
        other => other,
    })
}

/// As [`approximate_domain`], marking the boundary edges nearest to the
/// given points.
pub fn approximate_domain_marked(polygon: &[Point], u: Point, n: u32, a: Point, b: Point) -> Result<LatticeDomain> {
    let dom = approximate_domain(polygon, u, n)?;
    let ea = dom.nearest_boundary_edge(a);
    let eb = dom.nearest_boundary_edge(b);
    if ea == eb {
        bail!(ResolutionTooCoarse, "both marked points snap to the same boundary edge at n = {n}");
    }
    dom.with_marks(ea, eb)
}
