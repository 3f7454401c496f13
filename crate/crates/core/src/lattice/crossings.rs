//! Crossings of annuli and quadrilaterals by a curve, and whether the
//! curve was forced to make them.
//!
//! A component `C` of `A ∩ Λ` is forced when removing it separates small
//! neighbourhoods of the two marked edges: every curve from `a` to `b`
//! must then cross it. When a marked edge itself lies inside `C` the
//! component is counted as forced, since every neighbourhood of that edge
//! small enough meets nothing outside `C`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::raster::Raster;
use super::{CellSet, LatticeDomain, MarkedEdge};
use crate::curves::CurveClass;
use crate::error::{bail, Result};
use crate::{geom, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusQuery {
    pub z: Point,
    pub r: f64,
    pub big_r: f64,
}

impl AnnulusQuery {
    pub fn new(z: Point, r: f64, big_r: f64) -> AnnulusQuery {
        AnnulusQuery { z, r, big_r }
    }

    pub fn contains(&self, p: Point) -> bool {
        let d = (p - self.z).norm();
        d > self.r && d < self.big_r
    }
}

/// A topological quadrilateral made of lattice cells, with its four sides
/// as polylines listed counterclockwise. `S1` and `S3` lie on the domain
/// boundary; `S0` and `S2` cross the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadQuery {
    pub cells: Vec<super::Cell>,
    pub sides: [Vec<Point>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossingQuery {
    Annulus(AnnulusQuery),
    Quad(QuadQuery),
}

/// One crossing: the curve runs through the component between the
/// polyline positions `start` and `end` (vertex index plus fraction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub start: f64,
    pub end: f64,
    pub component: usize,
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossingReport {
    pub total_crossings: usize,
    pub unforced_crossings: usize,
    pub crossings: Vec<Crossing>,
}

impl CrossingReport {
    fn push(&mut self, c: Crossing) {
        self.total_crossings += 1;
        if !c.forced {
            self.unforced_crossings += 1;
        }
        self.crossings.push(c);
    }
}

/// Raster of the domain with an optional initial curve segment removed,
/// and the pixel neighbourhoods standing in for the marked edges.
struct Ends {
    raster: Raster,
    open: Vec<bool>,
    near_a: Vec<usize>,
    near_b: Vec<usize>,
}

fn edge_pixels(raster: &Raster, e: MarkedEdge, n: u32) -> Vec<usize> {
    let (p, q) = e.endpoints(n);
    let hp = raster.pixel();
    let inward = (q - p) * Point::i() / (q - p).norm();
    let m = raster.k() as usize;
    let mut out: Vec<usize> = (0..m)
        .filter_map(|t| raster.pixel_of(p + (q - p) * ((t as f64 + 0.5) / m as f64) + inward * (0.5 * hp)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl Ends {
    fn new(dom: &LatticeDomain, k: u32, removed: Option<&[Point]>) -> Ends {
        let raster = Raster::new(dom, k);
        let mut open = raster.inside_mask().to_vec();
        let near_b = edge_pixels(&raster, dom.b(), dom.n());
        let near_a = match removed {
            Some(seg) if seg.len() >= 2 => {
                for p in raster.rasterize_polyline(seg, false) {
                    open[p] = false;
                }
                let tip = seg[seg.len() - 1];
                match raster.pixel_of(tip) {
                    Some(t) => raster.neighbors8(t).filter(|&q| open[q]).collect(),
                    None => Vec::new(),
                }
            }
            _ => edge_pixels(&raster, dom.a(), dom.n()),
        };
        Ends { raster, open, near_a, near_b }
    }

    /// Whether removing `region` separates the neighbourhood of `a` from
    /// that of `b`.
    fn disconnects(&self, region: &[bool]) -> bool {
        let open: Vec<bool> = self.open.iter().zip(region).map(|(&o, &r)| o && !r).collect();
        let seeds: Vec<usize> = self.near_a.iter().copied().filter(|&p| open[p]).collect();
        let targets: Vec<usize> = self.near_b.iter().copied().filter(|&p| open[p]).collect();
        if seeds.is_empty() || targets.is_empty() {
            return true;
        }
        let seen = self.raster.flood(&seeds, &open);
        !targets.iter().any(|&t| seen[t])
    }
}

fn refinement(n: u32, scale: f64) -> u32 {
    let n = n as f64;
    let k = (8.0 / (n * scale)).ceil().max(4.0);
    k.min(64.0).min((2048.0 / n).floor().max(4.0)) as u32
}

/// The components of `A ∩ Λ` for one annulus, labelled once and reused
/// for many curves.
pub struct AnnulusAnalysis {
    query: AnnulusQuery,
    ends: Ends,
    labels: Vec<usize>,
    forced: Vec<bool>,
}

impl AnnulusAnalysis {
    pub fn new(dom: &LatticeDomain, query: &AnnulusQuery, removed: Option<&[Point]>) -> Result<AnnulusAnalysis> {
        let AnnulusQuery { z, r, big_r } = *query;
        if !(r > 0.0) || !(big_r > r) || !z.re.is_finite() || !z.im.is_finite() {
            bail!(InvalidQuery, "annulus needs 0 < r < R");
        }
        let mut dist = dom.boundary_distance(z);
        if let Some(seg) = removed {
            dist = dist.min(geom::dist_point_polyline(z, seg));
        }
        if !(dist < r) {
            bail!(InvalidQuery, "annulus is not on the boundary: d(z, ∂Λ) = {dist} ≥ r = {r}");
        }
        let ends = Ends::new(dom, refinement(dom.n(), r.min(big_r - r)), removed);
        let raster = &ends.raster;
        let mask: Vec<bool> = (0..raster.len()).map(|p| ends.open[p] && query.contains(raster.center(p))).collect();
        let (labels, count) = raster.label(&mask);
        let mut forced = vec![false; count];
        let mut region = vec![false; raster.len()];
        for (c, f) in forced.iter_mut().enumerate() {
            for p in 0..raster.len() {
                region[p] = labels[p] == c;
            }
            *f = ends.disconnects(&region);
        }
        Ok(AnnulusAnalysis { query: *query, ends, labels, forced })
    }

    pub fn component_count(&self) -> usize {
        self.forced.len()
    }

    pub fn forced(&self) -> &[bool] {
        &self.forced
    }

    /// Component label at `p`, looking a couple of pixels around when the
    /// pixel itself was not labelled.
    fn component_at(&self, p: Point) -> Option<usize> {
        let r = &self.ends.raster;
        let c = r.pixel_of(p)?;
        if self.labels[c] != usize::MAX {
            return Some(self.labels[c]);
        }
        let mut best: Option<(f64, usize)> = None;
        for q in r.neighbors8(c) {
            for q2 in core::iter::once(q).chain(r.neighbors8(q)) {
                let l = self.labels[q2];
                if l != usize::MAX {
                    let d = (r.center(q2) - p).norm();
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, l));
                    }
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Crossings of the annulus by the polyline.
    pub fn crossings(&self, pts: &[Point]) -> CrossingReport {
        let q = self.query;
        // Region codes: 0 inner disc, 1 annulus, 2 outside.
        let code = |p: Point| {
            let d = (p - q.z).norm();
            if d <= q.r {
                0u8
            } else if d >= q.big_r {
                2
            } else {
                1
            }
        };
        // Pieces between consecutive circle crossings, as (position, code).
        let mut pieces: Vec<(f64, f64, u8, Point)> = Vec::new();
        for (i, w) in pts.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let mut cuts: Vec<f64> = geom::segment_circle_params(a, b, q.z, q.r);
            cuts.extend(geom::segment_circle_params(a, b, q.z, q.big_r));
            cuts.push(0.0);
            cuts.push(1.0);
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            cuts.dedup();
            for c in cuts.windows(2) {
                if c[1] - c[0] <= 0.0 {
                    continue;
                }
                let mid = a + (b - a) * (0.5 * (c[0] + c[1]));
                let k = code(mid);
                let (s0, s1) = (i as f64 + c[0], i as f64 + c[1]);
                match pieces.last_mut() {
                    Some(last) if last.2 == k => {
                        // Keep the midpoint of the longest stretch seen so far.
                        if s1 - s0 > last.1 - last.0 {
                            last.3 = mid;
                        }
                        last.1 = s1;
                    }
                    _ => pieces.push((s0, s1, k, mid)),
                }
            }
        }
        let mut report = CrossingReport::default();
        for w in pieces.windows(3) {
            let (before, run, after) = (&w[0], &w[1], &w[2]);
            if run.2 != 1 || before.2 == after.2 {
                continue;
            }
            let Some(component) = self.component_at(run.3) else {
                continue;
            };
            report.push(Crossing { start: run.0, end: run.1, component, forced: self.forced[component] });
        }
        report
    }
}

fn check_quad(dom: &LatticeDomain, quad: &QuadQuery, removed: Option<&[Point]>) -> Result<()> {
    if quad.cells.is_empty() {
        bail!(InvalidQuery, "quadrilateral has no cells");
    }
    if quad.cells.iter().any(|c| !dom.has_cell(*c)) {
        bail!(InvalidQuery, "quadrilateral leaves the domain");
    }
    let poly = dom.boundary_polygon();
    let tol = 1e-9 * dom.h();
    let on_boundary = |p: Point| {
        geom::dist_point_polygon(p, &poly) <= tol || removed.is_some_and(|s| geom::dist_point_polyline(p, s) <= tol)
    };
    for s in [1, 3] {
        if quad.sides[s].is_empty() || !quad.sides[s].iter().all(|&p| on_boundary(p)) {
            bail!(InvalidQuery, "side S{s} is not on the domain boundary");
        }
    }
    for s in [0, 2] {
        let side = &quad.sides[s];
        if side.len() < 2 {
            bail!(InvalidQuery, "side S{s} is degenerate");
        }
        if !on_boundary(side[0]) || !on_boundary(side[side.len() - 1]) {
            bail!(InvalidQuery, "side S{s} does not end on the domain boundary");
        }
        let inner_ok = side.windows(2).all(|w| {
            let mid = (w[0] + w[1]) * 0.5;
            dom.contains(mid) && !on_boundary(mid)
        });
        if !inner_ok {
            bail!(InvalidQuery, "side S{s} is not inside the domain");
        }
    }
    Ok(())
}

fn quad_crossings(dom: &LatticeDomain, quad: &QuadQuery, pts: &[Point], removed: Option<&[Point]>) -> CrossingReport {
    let ends = Ends::new(dom, 4, removed);
    let raster = &ends.raster;
    let set = CellSet::from_cells(&quad.cells);
    let region: Vec<bool> = (0..raster.len()).map(|p| raster.inside(p) && set.contains(raster.cell_of(p))).collect();
    let forced = ends.disconnects(&region);
    // Inside the open union of the quad cells.
    let n = dom.n() as f64;
    let inside_q = |p: Point| {
        let (x, y) = (p.re * n, p.im * n);
        let (fx, fy) = (x.floor() as i32, y.floor() as i32);
        let lo_x = if x == x.floor() { fx - 1 } else { fx };
        let lo_y = if y == y.floor() { fy - 1 } else { fy };
        (lo_x..=fx).all(|i| (lo_y..=fy).all(|j| set.contains(super::Cell::new(i, j))))
    };
    let nearest_side = |p: Point| {
        (0..4)
            .min_by(|&a, &b| {
                geom::dist_point_polyline(p, &quad.sides[a]).partial_cmp(&geom::dist_point_polyline(p, &quad.sides[b])).unwrap()
            })
            .unwrap()
    };
    let step = 0.25 * raster.pixel();
    // Dense walk: (position, point, inside).
    let mut samples: Vec<(f64, Point, bool)> = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        let m = (((w[1] - w[0]).norm() / step).ceil() as usize).max(1);
        for t in 0..m {
            let s = t as f64 / m as f64;
            let p = w[0] + (w[1] - w[0]) * s;
            samples.push((i as f64 + s, p, inside_q(p)));
        }
    }
    if let Some(&last) = pts.last() {
        samples.push(((pts.len() - 1) as f64, last, inside_q(last)));
    }
    let mut report = CrossingReport::default();
    let mut k = 0;
    while k < samples.len() {
        if !samples[k].2 {
            k += 1;
            continue;
        }
        let start = k;
        while k < samples.len() && samples[k].2 {
            k += 1;
        }
        // A run touching either end of the curve has no entry or exit.
        if start == 0 || k == samples.len() {
            continue;
        }
        let entry = (samples[start - 1].1 + samples[start].1) * 0.5;
        let exit = (samples[k - 1].1 + samples[k].1) * 0.5;
        let (se, sx) = (nearest_side(entry), nearest_side(exit));
        if (se == 0 && sx == 2) || (se == 2 && sx == 0) {
            report.push(Crossing { start: samples[start - 1].0, end: samples[k].0, component: 0, forced });
        }
    }
    report
}

/// Counts crossings of the query by the curve, splitting them into forced
/// and unforced. `removed` is an optional initial piece of the curve that
/// is cut out of the domain first; the marked point `a` then moves to its
/// tip.
pub fn detect_unforced_crossings(
    dom: &LatticeDomain,
    curve: &CurveClass,
    query: &CrossingQuery,
    removed: Option<&[Point]>,
) -> Result<CrossingReport> {
    match query {
        CrossingQuery::Annulus(a) => Ok(AnnulusAnalysis::new(dom, a, removed)?.crossings(curve.vertices())),
        CrossingQuery::Quad(q) => {
            check_quad(dom, q, removed)?;
            Ok(quad_crossings(dom, q, curve.vertices(), removed))
        }
    }
}
