//! Refined pixel rasters of lattice domains.
//!
//! Each cell is split into `k x k` pixels of side `1/(nk)`. A pixel is
//! inside when its cell is. The raster carries a one pixel margin of
//! outside pixels so that neighbour lookups never fall off the grid.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Cell, LatticeDomain};
use crate::{pt, Point};

#[derive(Debug, Clone)]
pub struct Raster {
    n: u32,
    k: u32,
    /// Global pixel coordinates of pixel 0.
    p0: i64,
    q0: i64,
    w: usize,
    h: usize,
    inside: Vec<bool>,
}

impl Raster {
    pub fn new(dom: &LatticeDomain, k: u32) -> Raster {
        let k = k.max(1);
        let ki = k as i64;
        let i0 = dom.cells().iter().map(|c| c.i).min().unwrap() as i64;
        let i1 = dom.cells().iter().map(|c| c.i).max().unwrap() as i64;
        let j0 = dom.cells().iter().map(|c| c.j).min().unwrap() as i64;
        let j1 = dom.cells().iter().map(|c| c.j).max().unwrap() as i64;
        let p0 = i0 * ki - 1;
        let q0 = j0 * ki - 1;
        let w = ((i1 - i0 + 1) * ki + 2) as usize;
        let h = ((j1 - j0 + 1) * ki + 2) as usize;
        let mut inside = vec![false; w * h];
        for c in dom.cells() {
            let bx = (c.i as i64 * ki - p0) as usize;
            let by = (c.j as i64 * ki - q0) as usize;
            for dy in 0..k as usize {
                let row = (by + dy) * w;
                for dx in 0..k as usize {
                    inside[row + bx + dx] = true;
                }
            }
        }
        Raster { n: dom.n(), k, p0, q0, w, h, inside }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn height(&self) -> usize {
        self.h
    }

    /// Pixel side length.
    pub fn pixel(&self) -> f64 {
        1.0 / (self.n as f64 * self.k as f64)
    }

    pub fn inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn inside_mask(&self) -> &[bool] {
        &self.inside
    }

    pub fn xy(&self, idx: usize) -> (usize, usize) {
        (idx % self.w, idx / self.w)
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x + self.w * y
    }

    pub fn center(&self, idx: usize) -> Point {
        let (x, y) = self.xy(idx);
        let hp = self.pixel();
        pt(((self.p0 + x as i64) as f64 + 0.5) * hp, ((self.q0 + y as i64) as f64 + 0.5) * hp)
    }

    /// Global pixel coordinates (pixel `(x, y)` covers `[x, x+1] * pixel()`
    /// by `[y, y+1] * pixel()`).
    pub fn global(&self, idx: usize) -> (i64, i64) {
        let (x, y) = self.xy(idx);
        (self.p0 + x as i64, self.q0 + y as i64)
    }

    /// Pixel containing `p`, if it is on the raster.
    pub fn pixel_of(&self, p: Point) -> Option<usize> {
        let s = self.n as f64 * self.k as f64;
        let (gx, gy) = ((p.re * s).floor(), (p.im * s).floor());
        if !gx.is_finite() || !gy.is_finite() {
            return None;
        }
        let x = gx as i64 - self.p0;
        let y = gy as i64 - self.q0;
        if x < 0 || y < 0 || x as usize >= self.w || y as usize >= self.h {
            return None;
        }
        Some(self.index(x as usize, y as usize))
    }

    /// Inside pixel nearest to `p`: the pixel containing it when inside,
    /// otherwise the closest inside pixel among its 8 neighbours.
    pub fn inside_pixel_near(&self, p: Point) -> Option<usize> {
        let c = self.pixel_of(p)?;
        if self.inside[c] {
            return Some(c);
        }
        self.neighbors8(c)
            .filter(|&q| self.inside[q])
            .min_by(|&a, &b| (self.center(a) - p).norm().partial_cmp(&(self.center(b) - p).norm()).unwrap())
    }

    /// Cell containing the pixel.
    pub fn cell_of(&self, idx: usize) -> Cell {
        let (x, y) = self.xy(idx);
        let k = self.k as i64;
        Cell::new((self.p0 + x as i64).div_euclid(k) as i32, (self.q0 + y as i64).div_euclid(k) as i32)
    }

    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.xy(idx);
        let w = self.w;
        let h = self.h;
        [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)]
            .into_iter()
            .filter(move |&(a, b)| a < w && b < h)
            .map(move |(a, b)| a + w * b)
    }

    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.xy(idx);
        let w = self.w;
        let h = self.h;
        (0..9usize)
            .filter(|&m| m != 4)
            .map(move |m| (x.wrapping_add(m % 3).wrapping_sub(1), y.wrapping_add(m / 3).wrapping_sub(1)))
            .filter(move |&(a, b)| a < w && b < h)
            .map(move |(a, b)| a + w * b)
    }

    /// Pixels touched by the polyline, sampled every quarter pixel.
    pub fn rasterize_polyline(&self, pts: &[Point], closed: bool) -> Vec<usize> {
        let mut out = Vec::new();
        let step = 0.25 * self.pixel();
        let mut push = |p: Point| {
            if let Some(i) = self.pixel_of(p) {
                out.push(i);
            }
        };
        let m = pts.len();
        if m == 1 {
            push(pts[0]);
        }
        let segs = if closed && m > 2 { m } else { m.saturating_sub(1) };
        for s in 0..segs {
            let a = pts[s];
            let b = pts[(s + 1) % m];
            let steps = ((b - a).norm() / step).ceil().max(1.0) as usize;
            for t in 0..=steps {
                push(a + (b - a) * (t as f64 / steps as f64));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Flood fill over 4-neighbours through pixels where `open` holds.
    pub fn flood(&self, seeds: &[usize], open: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if open[s] && !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(p) = stack.pop() {
            for q in self.neighbors4(p) {
                if open[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen
    }

    /// Labels 4-connected components of `mask`; `usize::MAX` marks pixels
    /// outside the mask. Returns labels and the component count.
    pub fn label(&self, mask: &[bool]) -> (Vec<usize>, usize) {
        let mut lab = vec![usize::MAX; self.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.len() {
            if !mask[s] || lab[s] != usize::MAX {
                continue;
            }
            lab[s] = count;
            stack.push(s);
            while let Some(p) = stack.pop() {
                for q in self.neighbors4(p) {
                    if mask[q] && lab[q] == usize::MAX {
                        lab[q] = count;
                        stack.push(q);
                    }
                }
            }
            count += 1;
        }
        (lab, count)
    }

    /// Breadth-first pixel path through `open` from any source to any
    /// target (4-neighbours). Returns the path from source to target.
    pub fn bfs_path(&self, sources: &[usize], is_target: impl Fn(usize) -> bool, open: &[bool]) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if open[s] && prev[s] == usize::MAX {
                prev[s] = s;
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            if is_target(p) {
                let mut path = vec![p];
                let mut c = p;
                while prev[c] != c {
                    c = prev[c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for q in self.neighbors4(p) {
                if open[q] && prev[q] == usize::MAX {
                    prev[q] = p;
                    queue.push_back(q);
                }
            }
        }
        None
    }

    /// Shortest path lengths through `open` from the sources (each with an
    /// initial offset), using 8-neighbour steps that never cut a corner
    /// of a closed pixel.
    pub fn dijkstra(&self, sources: &[(usize, f64)], open: &[bool]) -> Vec<f64> {
        let hp = self.pixel();
        let diag = hp * core::f64::consts::SQRT_2;
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        for &(s, d0) in sources {
            if open[s] && d0 < dist[s] {
                dist[s] = d0;
                heap.push(Entry(d0, s));
            }
        }
        let w = self.w as isize;
        while let Some(Entry(d, p)) = heap.pop() {
            if d > dist[p] {
                continue;
            }
            let (x, y) = self.xy(p);
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = x as isize + dx;
                    let ny = y as isize + dy;
                    if nx < 0 || ny < 0 || nx >= w || ny >= self.h as isize {
                        continue;
                    }
                    let q = (nx + w * ny) as usize;
                    if !open[q] {
                        continue;
                    }
                    let step = if dx != 0 && dy != 0 {
                        let a = (nx + w * y as isize) as usize;
                        let b = (x as isize + w * ny) as usize;
                        if !open[a] || !open[b] {
                            continue;
                        }
                        diag
                    } else {
                        hp
                    };
                    let nd = d + step;
                    if nd < dist[q] {
                        dist[q] = nd;
                        heap.push(Entry(nd, q));
                    }
                }
            }
        }
        dist
    }

    /// Approximate distance from each inside pixel centre to the domain
    /// boundary: Euclidean distance to the nearest outside pixel centre,
    /// less half a pixel. Outside pixels get 0.
    pub fn boundary_distance_field(&self) -> Vec<f64> {
        let sq = edt_squared(&self.inside, self.w, self.h);
        let hp = self.pixel();
        sq.iter()
            .zip(&self.inside)
            .map(|(&d2, &ins)| if ins { (d2.sqrt() - 0.5) * hp } else { 0.0 })
            .collect()
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(other.1.cmp(&self.1))
    }
}

/// Squared Euclidean distance transform (in pixel units) to the nearest
/// pixel where `inside` is false, separable lower-envelope algorithm.
fn edt_squared(inside: &[bool], w: usize, h: usize) -> Vec<f64> {
    let big = 1e20;
    let mut grid: Vec<f64> = inside.iter().map(|&i| if i { big } else { 0.0 }).collect();
    let mut buf = vec![0.0; w.max(h)];
    let mut out = vec![0.0; w.max(h)];
    for x in 0..w {
        for y in 0..h {
            buf[y] = grid[x + w * y];
        }
        envelope(&buf[..h], &mut out[..h]);
        for y in 0..h {
            grid[x + w * y] = out[y];
        }
    }
    for y in 0..h {
        buf[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        envelope(&buf[..w], &mut out[..w]);
        grid[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
    }
    grid
}

fn envelope(f: &[f64], d: &mut [f64]) {
    let m = f.len();
    let mut v = vec![0usize; m];
    let mut z = vec![0.0f64; m + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sect = |q: usize, p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
    for q in 1..m {
        // z[0] is -inf, so this never walks below the first parabola.
        let mut s = sect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = sect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}
