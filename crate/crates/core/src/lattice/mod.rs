//! Lattice domains: simply connected unions of closed grid cells of side
//! `1/n`, with an interior base point and two marked boundary edges.
//!
//! Everything geometric that needs connectivity (separation, interior
//! distance, fjords, crossings) runs on a refined pixel raster of the
//! domain, see [`raster`].

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::geom;
use crate::{pt, Point};

mod approx;
mod circles;
mod close;
mod crossings;
mod distance;
mod fjords;
mod modulus;
pub mod raster;

pub use approx::{approximate_domain, approximate_domain_marked};
pub use circles::{circle_components, innermost_disconnecting, separates};
pub use close::is_close_approximation;
pub use crossings::{
    detect_unforced_crossings, AnnulusAnalysis, AnnulusQuery, Crossing, CrossingQuery, CrossingReport, QuadQuery,
};
pub use distance::{interior_distance, interior_distance_with};
pub use fjords::{build_fjord_partition, build_fjords, Fjord, FjordPartition, FjordReference, PixelRegion};
pub use modulus::quad_modulus;

/// Integer coordinates of the cell `[i/n, (i+1)/n] x [j/n, (j+1)/n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub i: i32,
    pub j: i32,
}

impl Cell {
    pub const fn new(i: i32, j: i32) -> Cell {
        Cell { i, j }
    }

    pub fn step(self, side: Side) -> Cell {
        let (di, dj) = side.delta();
        Cell::new(self.i + di, self.j + dj)
    }

    pub fn center(self, n: u32) -> Point {
        let h = 1.0 / n as f64;
        pt((self.i as f64 + 0.5) * h, (self.j as f64 + 0.5) * h)
    }
}

/// A side of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::S, Side::E, Side::N, Side::W];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Side::N => (0, 1),
            Side::E => (1, 0),
            Side::S => (0, -1),
            Side::W => (-1, 0),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::N => 'N',
            Side::E => 'E',
            Side::S => 'S',
            Side::W => 'W',
        }
    }

    pub fn from_letter(c: &str) -> Option<Side> {
        match c {
            "N" => Some(Side::N),
            "E" => Some(Side::E),
            "S" => Some(Side::S),
            "W" => Some(Side::W),
            _ => None,
        }
    }
}

/// A boundary edge, named by the cell it bounds and the side it lies on.
/// Its direction is the counterclockwise one (domain on the left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedEdge {
    pub cell: Cell,
    pub side: Side,
}

impl MarkedEdge {
    pub const fn new(i: i32, j: i32, side: Side) -> MarkedEdge {
        MarkedEdge { cell: Cell::new(i, j), side }
    }

    /// Lattice end points, oriented so that the cell is on the left.
    pub fn lattice_endpoints(self) -> ((i32, i32), (i32, i32)) {
        let (i, j) = (self.cell.i, self.cell.j);
        match self.side {
            Side::S => ((i, j), (i + 1, j)),
            Side::E => ((i + 1, j), (i + 1, j + 1)),
            Side::N => ((i + 1, j + 1), (i, j + 1)),
            Side::W => ((i, j + 1), (i, j)),
        }
    }

    pub fn endpoints(self, n: u32) -> (Point, Point) {
        let h = 1.0 / n as f64;
        let ((a0, a1), (b0, b1)) = self.lattice_endpoints();
        (pt(a0 as f64 * h, a1 as f64 * h), pt(b0 as f64 * h, b1 as f64 * h))
    }

    pub fn midpoint(self, n: u32) -> Point {
        let (a, b) = self.endpoints(n);
        (a + b) * 0.5
    }
}

/// Membership bitmap for cells over a bounding box.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CellSet {
    i0: i32,
    j0: i32,
    w: usize,
    h: usize,
    bits: Vec<bool>,
}

impl CellSet {
    pub(crate) fn from_cells(cells: &[Cell]) -> CellSet {
        let i0 = cells.iter().map(|c| c.i).min().unwrap_or(0);
        let i1 = cells.iter().map(|c| c.i).max().unwrap_or(-1);
        let j0 = cells.iter().map(|c| c.j).min().unwrap_or(0);
        let j1 = cells.iter().map(|c| c.j).max().unwrap_or(-1);
        let w = (i1 - i0 + 1).max(0) as usize;
        let h = (j1 - j0 + 1).max(0) as usize;
        let mut bits = vec![false; w * h];
        for c in cells {
            bits[(c.i - i0) as usize + w * (c.j - j0) as usize] = true;
        }
        CellSet { i0, j0, w, h, bits }
    }

    pub(crate) fn contains(&self, c: Cell) -> bool {
        let (di, dj) = (c.i - self.i0, c.j - self.j0);
        if di < 0 || dj < 0 || di as usize >= self.w || dj as usize >= self.h {
            return false;
        }
        self.bits[di as usize + self.w * dj as usize]
    }
}

/// A simply connected union of closed lattice cells with base point `u`
/// and marked boundary edges `a`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDomain {
    n: u32,
    cells: Vec<Cell>,
    u: Point,
    a: MarkedEdge,
    b: MarkedEdge,
    set: CellSet,
    /// Counterclockwise boundary loop; edge `k` runs from vertex `k` to `k + 1`.
    loop_vertices: Vec<(i32, i32)>,
    loop_edges: Vec<MarkedEdge>,
}

impl LatticeDomain {
    /// Validates and builds a domain.
    pub fn new(n: u32, cells: impl IntoIterator<Item = Cell>, u: Point, a: MarkedEdge, b: MarkedEdge) -> Result<Self> {
        let mut dom = Self::unmarked(n, cells, u)?;
        dom.set_marks(a, b)?;
        Ok(dom)
    }

    /// Builds a domain with default marks: `a` is the first edge of the
    /// boundary loop and `b` the edge half way round.
    pub fn unmarked(n: u32, cells: impl IntoIterator<Item = Cell>, u: Point) -> Result<Self> {
        if n == 0 {
            bail!(InvalidInput, "grid resolution must be positive");
        }
        let set: BTreeSet<Cell> = cells.into_iter().collect();
        if set.is_empty() {
            bail!(InvalidInput, "domain has no cells");
        }
        let cells: Vec<Cell> = set.into_iter().collect();
        let cs = CellSet::from_cells(&cells);
        check_connected(&cells, &cs)?;
        check_no_pinch(&cells, &cs)?;
        check_no_holes(&cs)?;
        let (loop_vertices, loop_edges) = trace_boundary(&cells, &cs)?;
        let m = loop_edges.len();
        let mut dom = LatticeDomain {
            n,
            cells,
            u,
            a: loop_edges[0],
            b: loop_edges[m / 2],
            set: cs,
            loop_vertices,
            loop_edges,
        };
        if !dom.contains(u) {
            bail!(InvalidInput, "base point {u} is not strictly inside the domain");
        }
        dom.u = u;
        Ok(dom)
    }

    /// Replaces the marked edges.
    pub fn with_marks(mut self, a: MarkedEdge, b: MarkedEdge) -> Result<Self> {
        self.set_marks(a, b)?;
        Ok(self)
    }

    fn set_marks(&mut self, a: MarkedEdge, b: MarkedEdge) -> Result<()> {
        if a == b {
            bail!(InvalidInput, "marked edges coincide");
        }
        for e in [a, b] {
            if self.edge_index(e).is_none() {
                bail!(InvalidInput, "marked edge {:?} is not on the boundary", e);
            }
        }
        self.a = a;
        self.b = b;
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Cell side length `1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn u(&self) -> Point {
        self.u
    }

    pub fn a(&self) -> MarkedEdge {
        self.a
    }

    pub fn b(&self) -> MarkedEdge {
        self.b
    }

    pub fn has_cell(&self, c: Cell) -> bool {
        self.set.contains(c)
    }

    /// Boundary edges in counterclockwise order.
    pub fn boundary_edges(&self) -> &[MarkedEdge] {
        &self.loop_edges
    }

    /// Boundary vertices in lattice units, counterclockwise, not repeated.
    pub fn boundary_lattice_vertices(&self) -> &[(i32, i32)] {
        &self.loop_vertices
    }

    /// Boundary polygon in plane coordinates.
    pub fn boundary_polygon(&self) -> Vec<Point> {
        let h = self.h();
        self.loop_vertices.iter().map(|&(x, y)| pt(x as f64 * h, y as f64 * h)).collect()
    }

    pub fn edge_index(&self, e: MarkedEdge) -> Option<usize> {
        self.loop_edges.iter().position(|&x| x == e)
    }

    /// Cell containing `p` (lower-left convention on grid lines).
    pub fn cell_of(&self, p: Point) -> Cell {
        let n = self.n as f64;
        Cell::new((p.re * n).floor() as i32, (p.im * n).floor() as i32)
    }

    /// True if `p` is in the open interior of the union of cells.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.n as f64;
        let (x, y) = (p.re * n, p.im * n);
        if !x.is_finite() || !y.is_finite() {
            return false;
        }
        let (fx, fy) = (x.floor() as i32, y.floor() as i32);
        let lo_x = if x == x.floor() { fx - 1 } else { fx };
        let lo_y = if y == y.floor() { fy - 1 } else { fy };
        (lo_x..=fx).all(|i| (lo_y..=fy).all(|j| self.set.contains(Cell::new(i, j))))
    }

    /// True if `p` lies in the closed union of cells.
    pub fn contains_closed(&self, p: Point) -> bool {
        let n = self.n as f64;
        let (x, y) = (p.re * n, p.im * n);
        if !x.is_finite() || !y.is_finite() {
            return false;
        }
        let (fx, fy) = (x.floor() as i32, y.floor() as i32);
        let on_x = x == x.floor();
        let on_y = y == y.floor();
        for di in 0..=(on_x as i32) {
            for dj in 0..=(on_y as i32) {
                if self.set.contains(Cell::new(fx - di, fy - dj)) {
                    return true;
                }
            }
        }
        false
    }

    /// Euclidean distance from `p` to the boundary polygon.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        geom::dist_point_polygon(p, &self.boundary_polygon())
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        let h = self.h();
        let i0 = self.cells.iter().map(|c| c.i).min().unwrap();
        let i1 = self.cells.iter().map(|c| c.i).max().unwrap() + 1;
        let j0 = self.cells.iter().map(|c| c.j).min().unwrap();
        let j1 = self.cells.iter().map(|c| c.j).max().unwrap() + 1;
        (pt(i0 as f64 * h, j0 as f64 * h), pt(i1 as f64 * h, j1 as f64 * h))
    }

    pub fn diameter_bound(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// The boundary edge closest to `p`.
    pub fn nearest_boundary_edge(&self, p: Point) -> MarkedEdge {
        let n = self.n;
        *self
            .loop_edges
            .iter()
            .min_by(|x, y| {
                let (a, b) = x.endpoints(n);
                let (c, d) = y.endpoints(n);
                geom::dist_point_segment(p, a, b).partial_cmp(&geom::dist_point_segment(p, c, d)).unwrap()
            })
            .unwrap()
    }

    /// The unit square as an `n x n` block of cells, with `u` just off the
    /// centre so it never sits on a grid line.
    pub fn full_square(n: u32) -> LatticeDomain {
        let m = n as i32;
        let cells = (0..m).flat_map(|i| (0..m).map(move |j| Cell::new(i, j)));
        LatticeDomain::unmarked(n, cells, pt(0.5, 0.5 + 0.25 / n as f64)).unwrap()
    }
}

fn check_connected(cells: &[Cell], cs: &CellSet) -> Result<()> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![cells[0]];
    seen.insert(cells[0]);
    while let Some(c) = stack.pop() {
        for s in Side::ALL {
            let d = c.step(s);
            if cs.contains(d) && seen.insert(d) {
                stack.push(d);
            }
        }
    }
    if seen.len() != cells.len() {
        bail!(InvalidInput, "cells are not edge-connected");
    }
    Ok(())
}

fn check_no_pinch(cells: &[Cell], cs: &CellSet) -> Result<()> {
    for c in cells {
        // Vertex at the upper-right corner of c and at its upper-left corner.
        for (dx, other) in [(1, Cell::new(c.i + 1, c.j + 1)), (-1, Cell::new(c.i - 1, c.j + 1))] {
            if cs.contains(other) && !cs.contains(Cell::new(c.i + dx, c.j)) && !cs.contains(Cell::new(c.i, c.j + 1)) {
                bail!(InvalidInput, "cells touch only at a corner near {:?}", c);
            }
        }
    }
    Ok(())
}

fn check_no_holes(cs: &CellSet) -> Result<()> {
    // Flood the complement inside the bounding box grown by one cell.
    let w = cs.w + 2;
    let h = cs.h + 2;
    let mut seen = vec![false; w * h];
    let inside = |x: usize, y: usize| cs.contains(Cell::new(cs.i0 - 1 + x as i32, cs.j0 - 1 + y as i32));
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    while let Some((x, y)) = stack.pop() {
        let nb = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
        for (nx, ny) in nb {
            if nx < w && ny < h && !seen[nx + w * ny] && !inside(nx, ny) {
                seen[nx + w * ny] = true;
                stack.push((nx, ny));
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if !seen[x + w * y] && !inside(x, y) {
                bail!(InvalidInput, "domain is not simply connected (hole near cell ({}, {}))", cs.i0 - 1 + x as i32, cs.j0 - 1 + y as i32);
            }
        }
    }
    Ok(())
}

type BoundaryLoop = (Vec<(i32, i32)>, Vec<MarkedEdge>);

fn trace_boundary(cells: &[Cell], cs: &CellSet) -> Result<BoundaryLoop> {
    let mut out: alloc::collections::BTreeMap<(i32, i32), MarkedEdge> = alloc::collections::BTreeMap::new();
    let mut count = 0;
    for &c in cells {
        for s in Side::ALL {
            if !cs.contains(c.step(s)) {
                let e = MarkedEdge { cell: c, side: s };
                let (from, _) = e.lattice_endpoints();
                if out.insert(from, e).is_some() {
                    bail!(InvalidInput, "boundary is not a simple loop at vertex {:?}", from);
                }
                count += 1;
            }
        }
    }
    let (&start, _) = out.iter().next().unwrap();
    let mut verts = Vec::with_capacity(count);
    let mut edges = Vec::with_capacity(count);
    let mut v = start;
    loop {
        let e = out[&v];
        verts.push(v);
        edges.push(e);
        v = e.lattice_endpoints().1;
        if v == start {
            break;
        }
        if edges.len() > count {
            bail!(InvalidInput, "boundary tracing did not close");
        }
    }
    if edges.len() != count {
        bail!(InvalidInput, "boundary has more than one component");
    }
    Ok((verts, edges))
}

/// A cross cut: a polyline inside the domain whose end points lie on the
/// boundary. A closed circle that misses the boundary is stored with
/// `closed = true`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCut {
    pub polyline: Vec<Point>,
    pub closed: bool,
}

impl CrossCut {
    pub fn open(polyline: Vec<Point>) -> CrossCut {
        CrossCut { polyline, closed: false }
    }

    pub fn diameter(&self) -> f64 {
        geom::diameter(&self.polyline)
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        if self.closed && self.polyline.len() > 1 {
            let mut v = self.polyline.clone();
            v.push(v[0]);
            geom::dist_point_polyline(p, &v)
        } else {
            geom::dist_point_polyline(p, &self.polyline)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rect(n: u32, w: i32, h: i32) -> LatticeDomain {
        let cells = (0..w).flat_map(|i| (0..h).map(move |j| Cell::new(i, j)));
        let u = pt(w as f64 / (2.0 * n as f64) + 0.1 / n as f64, h as f64 / (2.0 * n as f64) + 0.1 / n as f64);
        LatticeDomain::unmarked(n, cells, u).unwrap()
    }

    #[test]
    fn square_boundary_loop() {
        let d = rect(4, 4, 4);
        assert_eq!(d.boundary_edges().len(), 16);
        assert!(geom::signed_area(&d.boundary_polygon()) > 0.0);
        assert!((geom::signed_area(&d.boundary_polygon()) - 1.0).abs() < 1e-15);
        assert!(d.contains(pt(0.5, 0.5)));
        assert!(d.contains(pt(0.25, 0.25)));
        assert!(!d.contains(pt(0.0, 0.5)));
        assert!(d.contains_closed(pt(0.0, 0.5)));
        assert!(!d.contains_closed(pt(1.01, 0.5)));
    }

    #[test]
    fn rejects_bad_domains() {
        let u = pt(0.5, 0.5);
        // Corner contact only.
        let pinch = [Cell::new(0, 0), Cell::new(1, 1)];
        assert!(LatticeDomain::unmarked(2, pinch, pt(0.25, 0.25)).is_err());
        // Ring with a hole.
        let ring: Vec<Cell> = (0..3).flat_map(|i| (0..3).map(move |j| Cell::new(i, j))).filter(|c| *c != Cell::new(1, 1)).collect();
        assert!(LatticeDomain::unmarked(3, ring, pt(0.1, 0.1)).is_err());
        // Disconnected.
        assert!(LatticeDomain::unmarked(4, [Cell::new(0, 0), Cell::new(2, 0)], pt(0.1, 0.1)).is_err());
        // Base point on the boundary.
        let sq: Vec<Cell> = (0..2).flat_map(|i| (0..2).map(move |j| Cell::new(i, j))).collect();
        assert!(LatticeDomain::unmarked(2, sq.clone(), pt(0.0, 0.5)).is_err());
        assert!(LatticeDomain::unmarked(2, sq.clone(), u).is_ok());
        // Marks must be distinct boundary edges.
        let a = MarkedEdge::new(0, 0, Side::W);
        assert!(LatticeDomain::new(2, sq.clone(), u, a, a).is_err());
        assert!(LatticeDomain::new(2, sq.clone(), u, a, MarkedEdge::new(0, 0, Side::E)).is_err());
        assert!(LatticeDomain::new(2, sq, u, a, MarkedEdge::new(1, 1, Side::E)).is_ok());
    }

    #[test]
    fn marked_edge_geometry() {
        let e = MarkedEdge::new(2, 3, Side::N);
        let (p, q) = e.endpoints(4);
        assert_eq!(p, pt(0.75, 1.0));
        assert_eq!(q, pt(0.5, 1.0));
        assert_eq!(e.midpoint(4), pt(0.625, 1.0));
    }
}
