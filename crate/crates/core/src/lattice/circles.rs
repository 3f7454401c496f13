//! Components of circles inside a domain and the innermost one that
//! separates a point from the base point.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{CrossCut, LatticeDomain};
use crate::error::{bail, Result};
use crate::{geom, Point};

const TAU: f64 = 2.0 * core::f64::consts::PI;

fn arc_points(z: Point, r: f64, t0: f64, t1: f64, spacing: f64) -> Vec<Point> {
    let m = ((r * (t1 - t0) / spacing).ceil() as usize).clamp(8, 8192);
    (0..=m)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / m as f64;
            z + Point::from_polar(r, t)
        })
        .collect()
}

/// Connected components of `S(z, r)` inside the open domain, as polylines
/// sampled finely relative to the grid. A circle that never meets the
/// boundary and lies inside comes back as one closed component.
pub fn circle_components(dom: &LatticeDomain, z: Point, r: f64) -> Vec<CrossCut> {
    if !(r > 0.0) || !r.is_finite() {
        return Vec::new();
    }
    let poly = dom.boundary_polygon();
    let m = poly.len();
    let mut angles = Vec::new();
    for k in 0..m {
        let (a, b) = (poly[k], poly[(k + 1) % m]);
        for s in geom::segment_circle_params(a, b, z, r) {
            angles.push(geom::wrap_angle((a + (b - a) * s - z).arg()));
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if angles.len() > 1 && angles[0] + TAU - angles[angles.len() - 1] < 1e-12 {
        angles.pop();
    }
    let spacing = dom.h() / 8.0;
    if angles.is_empty() {
        if dom.contains(z + r) {
            let mut pts = arc_points(z, r, 0.0, TAU, spacing);
            pts.pop();
            return vec![CrossCut { polyline: pts, closed: true }];
        }
        return Vec::new();
    }
    let mut out = Vec::new();
    let q = angles.len();
    for k in 0..q {
        let t0 = angles[k];
        let t1 = if k + 1 < q { angles[k + 1] } else { angles[0] + TAU };
        if t1 - t0 < 1e-12 {
            continue;
        }
        let mid = z + Point::from_polar(r, 0.5 * (t0 + t1));
        if dom.contains(mid) {
            out.push(CrossCut::open(arc_points(z, r, t0, t1, spacing)));
        }
    }
    out
}

/// Position of `p` on the boundary loop as `(edge index, fraction)`.
fn boundary_param(poly: &[Point], p: Point) -> (usize, f64) {
    let m = poly.len();
    let mut best = (0, 0.0, f64::INFINITY);
    for k in 0..m {
        let (q, t) = geom::closest_on_segment(p, poly[k], poly[(k + 1) % m]);
        let d = (q - p).norm();
        if d < best.2 {
            best = (k, t, d);
        }
    }
    (best.0, best.1)
}

/// One side of a cross-cut, as a closed polygon: the cut followed by the
/// boundary from its end back to its start. Lattice domains are Jordan
/// domains, so this loop bounds exactly one of the two pieces.
fn side_loop(poly: &[Point], cut: &CrossCut) -> Vec<Point> {
    let pts = &cut.polyline;
    let mut out = pts.clone();
    if cut.closed || pts.len() < 2 {
        return out;
    }
    let m = poly.len();
    let (e1, f1) = boundary_param(poly, pts[pts.len() - 1]);
    let (e0, f0) = boundary_param(poly, pts[0]);
    if e1 == e0 && f1 <= f0 {
        return out;
    }
    let mut k = e1;
    loop {
        k = (k + 1) % m;
        out.push(poly[k]);
        if k == e0 {
            break;
        }
    }
    out
}

/// Which piece of the domain minus the cut holds `p`; `None` when `p`
/// is on the cut itself.
fn side_of(side: &[Point], cut: &CrossCut, p: Point, tol: f64) -> Option<bool> {
    if cut.distance_to(p) <= tol {
        return None;
    }
    Some(geom::winding_number(p, side) != 0)
}

/// A point of the open domain next to `p`, which may sit on the boundary.
fn interior_near(dom: &LatticeDomain, p: Point, eps: f64) -> Option<Point> {
    if dom.contains(p) {
        return Some(p);
    }
    (0..64).map(|k| p + Point::from_polar(eps, TAU * (k as f64 + 0.5) / 64.0)).find(|&q| dom.contains(q))
}

/// True if removing the cut disconnects `p` from `q` in the domain. A
/// point lying on the cut counts as cut off. Points on the boundary stand
/// for the part of the domain right next to them.
pub fn separates(dom: &LatticeDomain, cut: &CrossCut, p: Point, q: Point) -> bool {
    let poly = dom.boundary_polygon();
    let eps = 1e-9 * dom.h();
    let (Some(p), Some(q)) = (interior_near(dom, p, eps), interior_near(dom, q, eps)) else {
        return true;
    };
    let side = side_loop(&poly, cut);
    match (side_of(&side, cut, p, 0.1 * eps), side_of(&side, cut, q, 0.1 * eps)) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    }
}

/// The innermost component of `S(z, r)` in the domain that separates `z`
/// from `u`: it separates every other separating component from `z`.
pub fn innermost_disconnecting(dom: &LatticeDomain, z: Point, r: f64, u: Point) -> Result<CrossCut> {
    if !dom.contains_closed(z) || !dom.contains(u) {
        bail!(InvalidInput, "points must lie in the domain");
    }
    if !(r > 0.0) {
        bail!(InvalidInput, "radius must be positive");
    }
    if r >= (z - u).norm() {
        bail!(InvalidInput, "radius {r} is not below |z - u| = {}", (z - u).norm());
    }
    let comps = circle_components(dom, z, r);
    let separating: Vec<usize> = (0..comps.len()).filter(|&i| separates(dom, &comps[i], z, u)).collect();
    if separating.is_empty() {
        bail!(NotFound, "no component of S(z, {r}) separates z from u");
    }
    // Separating components are nested along any path from z to u, so
    // exactly one of them cuts all the others off from z.
    let probe = |c: &CrossCut| c.polyline[c.polyline.len() / 2];
    let best = separating
        .iter()
        .copied()
        .max_by_key(|&i| separating.iter().filter(|&&j| j != i && separates(dom, &comps[i], z, probe(&comps[j]))).count())
        .unwrap();
    Ok(comps[best].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::raster::Raster;
    use crate::lattice::tests::rect;
    use crate::lattice::{Cell, LatticeDomain};
    use crate::{pt, Error};
    use proptest::prelude::*;

    /// 16x16 square with a one-cell-wide slot cut down from the top edge.
    fn slotted(n: u32) -> LatticeDomain {
        let m = n as i32;
        let cells = (0..m).flat_map(|i| (0..m).map(move |j| Cell::new(i, j))).filter(|c| !(c.i == m / 2 && c.j >= m / 2));
        LatticeDomain::unmarked(n, cells, pt(0.5 + 0.3 / n as f64, 0.2)).unwrap()
    }

    /// Square holding `u`, with a one-cell corridor that leaves its top,
    /// runs right, climbs, and turns back left above itself. A circle
    /// around the far end can cut the corridor in two places.
    fn fjord_domain() -> LatticeDomain {
        let n = 16;
        let mut cells = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                cells.push(Cell::new(i, j));
            }
        }
        cells.extend([Cell::new(5, 6), Cell::new(5, 7)]);
        cells.extend((5..15).map(|i| Cell::new(i, 8)));
        cells.extend((9..12).map(|j| Cell::new(14, j)));
        cells.extend((10..15).map(|i| Cell::new(i, 12)));
        LatticeDomain::unmarked(n, cells, pt(0.2, 0.2)).unwrap()
    }

    fn fjord_tip() -> Point {
        pt(10.5 / 16.0, 12.5 / 16.0)
    }

    #[test]
    fn inner_circle_is_one_closed_component() {
        let d = rect(8, 8, 8);
        let c = circle_components(&d, pt(0.5, 0.5), 0.3);
        assert_eq!(c.len(), 1);
        assert!(c[0].closed);
        assert!(circle_components(&d, pt(0.5, 0.5), 3.0).is_empty());
    }

    #[test]
    fn slot_splits_the_circle() {
        let d = slotted(16);
        // Circle around the slot bottom crossing both slot walls and the
        // outer top edge.
        let c = circle_components(&d, pt(0.53, 0.75), 0.2);
        assert!(c.len() >= 2, "{}", c.len());
        for cut in &c {
            assert!(!cut.closed);
            let inner = &cut.polyline[1..cut.polyline.len() - 1];
            assert!(inner.iter().all(|&p| d.contains(p)));
        }
    }

    #[test]
    fn innermost_in_convex_domain_is_the_full_circle() {
        let d = rect(8, 8, 8);
        let s = innermost_disconnecting(&d, pt(0.3, 0.3), 0.1, pt(0.7, 0.7)).unwrap();
        assert!(s.closed);
        assert!(matches!(innermost_disconnecting(&d, pt(0.3, 0.3), 0.9, pt(0.7, 0.7)), Err(Error::InvalidInput(_))));
    }

    /// Exhaustive oracle: separation of z from u tested per component by a
    /// fresh flood fill on a finer raster, then the innermost picked as the
    /// one cutting off every other.
    fn oracle_innermost(d: &LatticeDomain, z: Point, r: f64, u: Point) -> Option<usize> {
        let comps = circle_components(d, z, r);
        let raster = Raster::new(d, 32);
        let block = |c: &CrossCut| {
            let mut open = raster.inside_mask().to_vec();
            for p in raster.rasterize_polyline(&c.polyline, c.closed) {
                open[p] = false;
            }
            raster.flood(&[raster.inside_pixel_near(z).unwrap()], &open)
        };
        let sep: Vec<usize> = (0..comps.len())
            .filter(|&i| !block(&comps[i])[raster.inside_pixel_near(u).unwrap()])
            .collect();
        sep.iter().copied().find(|&i| {
            let seen = block(&comps[i]);
            sep.iter().filter(|&&j| j != i).all(|&j| comps[j].polyline.iter().all(|&p| match raster.pixel_of(p) {
                Some(q) => !seen[q],
                None => true,
            }))
        })
    }

    #[test]
    fn nested_arcs_pick_the_one_nearest_z() {
        let d = fjord_domain();
        // The circle cuts the climb, then the lower run twice.
        let z = fjord_tip();
        let u = d.u();
        let r = 0.3;
        let comps = circle_components(&d, z, r);
        let got = innermost_disconnecting(&d, z, r, u).unwrap();
        let want = oracle_innermost(&d, z, r, u).expect("oracle finds an innermost arc");
        assert_eq!(got, comps[want]);
        let separating = comps.iter().filter(|c| separates(&d, c, z, u)).count();
        assert!(separating >= 3, "fixture should have nested arcs, got {separating}");
    }

    #[test]
    fn wall_hugging_circle_gives_its_arc() {
        let d = rect(8, 8, 8);
        // The circle leaves through the left edge; the arc left inside
        // still fences z off against the wall.
        let s = innermost_disconnecting(&d, pt(0.05, 0.5), 0.2, pt(0.95, 0.5)).unwrap();
        assert!(!s.closed);
        assert!(s.polyline[0].re.abs() < 1e-12 && s.polyline[s.polyline.len() - 1].re.abs() < 1e-12);
    }

    #[test]
    fn boundary_point_uses_the_side_next_to_it() {
        let d = rect(8, 8, 8);
        let cut = CrossCut::open(alloc::vec![pt(0.5, 0.0), pt(0.5, 1.0)]);
        assert!(separates(&d, &cut, pt(0.0, 0.3), pt(1.0, 0.3)));
        assert!(!separates(&d, &cut, pt(0.0, 0.3), pt(0.2, 0.9)));
        assert!(separates(&d, &cut, pt(0.5, 0.4), pt(0.2, 0.9)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn smaller_arc_separates_larger(r1 in 0.1f64..0.3, gap in 0.03f64..0.1) {
            let d = fjord_domain();
            let z = fjord_tip();
            let u = d.u();
            let r2 = r1 + gap;
            let s1 = innermost_disconnecting(&d, z, r1, u).unwrap();
            let s2 = innermost_disconnecting(&d, z, r2, u).unwrap();
            let raster = Raster::new(&d, 32);
            let mut open = raster.inside_mask().to_vec();
            for p in raster.rasterize_polyline(&s1.polyline, s1.closed) {
                open[p] = false;
            }
            let seen = raster.flood(&[raster.inside_pixel_near(z).unwrap()], &open);
            let hit = s2.polyline.iter().filter_map(|&p| raster.pixel_of(p)).any(|q| seen[q]);
            prop_assert!(!hit);
        }
    }
}
