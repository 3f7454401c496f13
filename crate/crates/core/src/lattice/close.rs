//! Close approximation of a boundary point by marked edges.

#[allow(unused_imports)]
use num_traits::Float;

use super::raster::Raster;
use super::{LatticeDomain, MarkedEdge};
use crate::error::{bail, Result};
use crate::{geom, Point};

/// True when the marked edge `a_n` is joined to `w_r` by a path inside
/// `dom_n ∩ B(a, r)`. Here `w_r` is a reference point on the innermost
/// arc of `S(a, r)` in the limit domain; when it is not inside `dom_n`
/// the answer is `false`.
pub fn is_close_approximation(
    dom_n: &LatticeDomain,
    a_n: MarkedEdge,
    limit_dom: &[Point],
    a: Point,
    r: f64,
    w_r: Point,
) -> Result<bool> {
    if !(r > 0.0) {
        bail!(InvalidInput, "radius must be positive");
    }
    if ((w_r - a).norm() - r).abs() > 1e-9 * r.max(1.0) {
        bail!(InvalidInput, "w_r is not on the circle S(a, r)");
    }
    if limit_dom.len() >= 3 && geom::winding_number(w_r, limit_dom) == 0 && geom::dist_point_polygon(w_r, limit_dom) > 1e-12 {
        bail!(InvalidInput, "w_r is outside the limit domain");
    }
    if dom_n.edge_index(a_n).is_none() {
        bail!(InvalidInput, "a_n is not a boundary edge");
    }
    if !dom_n.contains(w_r) {
        return Ok(false);
    }
    let mid = a_n.midpoint(dom_n.n());
    if (mid - a).norm() >= r {
        return Ok(false);
    }
    let n = dom_n.n() as f64;
    let k = ((16.0 / (r * n)).ceil().max(4.0)).min(64.0).min((2048.0 / n).floor().max(4.0)) as u32;
    let raster = Raster::new(dom_n, k);
    let hp = raster.pixel();
    let mut open: alloc::vec::Vec<bool> =
        (0..raster.len()).map(|p| raster.inside(p) && (raster.center(p) - a).norm() < r).collect();
    // Start inside the cell of a_n, half a pixel in from the edge middle.
    let (p, q) = a_n.endpoints(dom_n.n());
    let inward = (q - p) * Point::i() / (q - p).norm();
    let Some(start) = raster.pixel_of(mid + inward * (0.5 * hp)) else {
        return Ok(false);
    };
    open[start] = true;
    let seen = raster.flood(&[start], &open);
    Ok((0..raster.len()).any(|p| seen[p] && (raster.center(p) - w_r).norm() <= 1.5 * hp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Cell, Side};
    use crate::pt;
    use alloc::vec::Vec;

    /// 16x16 square with a one-cell slot from the top edge down to y = 1/2.
    fn slotted() -> LatticeDomain {
        let cells = (0..16).flat_map(|i| (0..16).map(move |j| Cell::new(i, j))).filter(|c| !(c.i == 8 && c.j >= 8));
        LatticeDomain::unmarked(16, cells, pt(0.5 + 0.01, 0.25)).unwrap()
    }

    fn polygon(d: &LatticeDomain) -> Vec<Point> {
        d.boundary_polygon()
    }

    /// Connectivity in `dom ∩ B(a, r)` on a fine lattice of sample points.
    fn flood_oracle(d: &LatticeDomain, from: Point, to: Point, a: Point, r: f64) -> bool {
        let step = d.h() / 10.0;
        let ok = |p: Point| d.contains(p) && (p - a).norm() < r;
        let m = (1.0 / step).round() as i64 + 2;
        let idx = |p: Point| ((p.re / step).round() as i64, (p.im / step).round() as i64);
        let pt_of = |(x, y): (i64, i64)| pt(x as f64 * step, y as f64 * step);
        let mut seen = alloc::collections::BTreeSet::new();
        let s = idx(from);
        let t = idx(to);
        let mut stack = alloc::vec![s];
        seen.insert(s);
        while let Some((x, y)) = stack.pop() {
            if (x - t.0).abs() <= 1 && (y - t.1).abs() <= 1 {
                return true;
            }
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let c = (x + dx, y + dy);
                if c.0 < -1 || c.1 < -1 || c.0 > m || c.1 > m {
                    continue;
                }
                if ok(pt_of(c)) && seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        false
    }

    #[test]
    fn same_domain_and_point_is_close() {
        let d = slotted();
        let a_edge = MarkedEdge::new(7, 12, Side::E);
        let a = a_edge.midpoint(16);
        for r in [0.05, 0.1, 0.2] {
            let w = a - r;
            assert!(is_close_approximation(&d, a_edge, &polygon(&d), a, r, w).unwrap());
        }
    }

    #[test]
    fn across_a_thin_wall_is_not_close() {
        let d = slotted();
        // a on the left wall of the slot, a_n on the right wall.
        let a = pt(0.5, 0.75);
        let r = 3.0 / 16.0;
        let w = pt(0.5 - r, 0.75);
        let a_n = MarkedEdge::new(9, 12, Side::W);
        let mid = a_n.midpoint(16);
        assert!(!flood_oracle(&d, mid + pt(0.001, 0.0), w, a, r));
        assert!(!is_close_approximation(&d, a_n, &polygon(&d), a, r, w).unwrap());
    }

    #[test]
    fn neighbouring_edge_on_the_same_arc_is_close() {
        let d = slotted();
        let a = pt(0.5, 0.75);
        let r = 3.0 / 16.0;
        let w = pt(0.5 - r, 0.75);
        let a_n = MarkedEdge::new(7, 13, Side::E);
        let mid = a_n.midpoint(16);
        assert!(flood_oracle(&d, mid - pt(0.001, 0.0), w, a, r));
        assert!(is_close_approximation(&d, a_n, &polygon(&d), a, r, w).unwrap());
    }

    #[test]
    fn w_outside_dom_n_gives_false() {
        let d = slotted();
        let a = pt(0.5, 0.75);
        let r = 0.02;
        let w = pt(0.52, 0.75);
        let poly = alloc::vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        assert!(!is_close_approximation(&d, MarkedEdge::new(7, 12, Side::E), &poly, a, r, w).unwrap());
    }
}
