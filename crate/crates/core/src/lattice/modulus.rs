//! Conformal modulus of a quadrilateral as the effective resistance of a
//! refined grid network.

use alloc::vec;
use alloc::vec::Vec;

use super::crossings::QuadQuery;
use super::{Cell, CellSet, LatticeDomain, Side};
use crate::error::{bail, Error, Result};
use crate::linalg::{conjugate_gradient, Csr};
use crate::{geom, pt, Point};

/// Discrete extremal distance between sides `S0` and `S2` of the quad.
///
/// Every cell is cut into `refinement^2` unit-conductance subcells;
/// subcell edges on `S0` are tied to potential 0 and those on `S2` to
/// potential 1 through half links. The modulus is the reciprocal of the
/// current, so an `L x 1` rectangle gives exactly `L`.
pub fn quad_modulus(dom: &LatticeDomain, quad: &QuadQuery, refinement: u32) -> Result<f64> {
    if refinement == 0 {
        bail!(InvalidInput, "refinement must be positive");
    }
    if quad.cells.is_empty() {
        bail!(InvalidQuery, "quadrilateral has no cells");
    }
    if let Some(c) = quad.cells.iter().find(|c| !dom.has_cell(**c)) {
        bail!(InvalidQuery, "quadrilateral cell {:?} is not in the domain", c);
    }
    let k = refinement as i64;
    let n = dom.n();
    let set = CellSet::from_cells(&quad.cells);
    let hs = 1.0 / (n as f64 * k as f64);
    // Subcells indexed densely.
    let mut subs: Vec<(i64, i64)> = Vec::new();
    for c in &quad.cells {
        for dx in 0..k {
            for dy in 0..k {
                subs.push((c.i as i64 * k + dx, c.j as i64 * k + dy));
            }
        }
    }
    subs.sort_unstable();
    let index = |x: i64, y: i64| -> Option<usize> {
        let c = Cell::new(x.div_euclid(k) as i32, y.div_euclid(k) as i32);
        if !set.contains(c) {
            return None;
        }
        subs.binary_search(&(x, y)).ok()
    };
    let tol = 1e-9 * hs;
    let on_side = |p: Point, side: &[Point]| side.len() >= 2 && geom::dist_point_polyline(p, side) <= tol;
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; subs.len()];
    let (mut edges0, mut edges2) = (Vec::new(), Vec::new());
    for (id, &(x, y)) in subs.iter().enumerate() {
        for s in Side::ALL {
            let (dx, dy) = s.delta();
            match index(x + dx as i64, y + dy as i64) {
                Some(j) => {
                    if j > id {
                        trip.push((id, id, 1.0));
                        trip.push((j, j, 1.0));
                        trip.push((id, j, -1.0));
                        trip.push((j, id, -1.0));
                    }
                }
                None => {
                    let cx = (x as f64 + 0.5) * hs;
                    let cy = (y as f64 + 0.5) * hs;
                    let mid = pt(cx + 0.5 * hs * dx as f64, cy + 0.5 * hs * dy as f64);
                    if on_side(mid, &quad.sides[0]) {
                        trip.push((id, id, 2.0));
                        edges0.push(id);
                    } else if on_side(mid, &quad.sides[2]) {
                        trip.push((id, id, 2.0));
                        rhs[id] += 2.0;
                        edges2.push(id);
                    }
                }
            }
        }
    }
    if edges0.is_empty() || edges2.is_empty() {
        bail!(InvalidQuery, "side S0 or S2 has no edge on the quadrilateral boundary");
    }
    let a = Csr::from_triplets(subs.len(), trip);
    let sol = conjugate_gradient(&a, &rhs, 1e-10, 20 * subs.len() + 100)?;
    let current: f64 = edges0.iter().map(|&i| 2.0 * sol.x[i]).sum();
    if !(current > 0.0) {
        return Err(Error::NumericFailure { step: 0, detail: "no current flows between S0 and S2".into() });
    }
    Ok(1.0 / current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tests::rect;

    /// Sides of the rectangle `[0, w/n] x [0, h/n]`, S0 on the left.
    fn rect_quad(n: u32, w: i32, h: i32) -> QuadQuery {
        let (x, y) = (w as f64 / n as f64, h as f64 / n as f64);
        let cells = (0..w).flat_map(|i| (0..h).map(move |j| Cell::new(i, j))).collect();
        QuadQuery {
            cells,
            sides: [
                vec![pt(0.0, y), pt(0.0, 0.0)],
                vec![pt(0.0, 0.0), pt(x, 0.0)],
                vec![pt(x, 0.0), pt(x, y)],
                vec![pt(x, y), pt(0.0, y)],
            ],
        }
    }

    #[test]
    fn two_cell_network_is_two() {
        // Half link, one unit link, half link: 1/2 + 1 + 1/2.
        let d = rect(2, 2, 1);
        let m = quad_modulus(&d, &rect_quad(2, 2, 1), 1).unwrap();
        assert!((m - 2.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn rectangles_give_their_aspect_ratio() {
        for (w, h) in [(1, 1), (3, 1), (4, 2), (2, 3)] {
            let d = rect(4, w, h);
            let m = quad_modulus(&d, &rect_quad(4, w, h), 3).unwrap();
            let want = w as f64 / h as f64;
            assert!((m - want).abs() < 1e-8 * want, "{w}x{h}: {m}");
        }
    }

    #[test]
    fn swapping_sides_inverts() {
        // An L-shaped quad: reciprocity holds up to discretisation.
        let n = 4;
        let cells: Vec<Cell> = [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)].iter().map(|&(i, j)| Cell::new(i, j)).collect();
        let d = LatticeDomain::unmarked(n, cells.clone(), pt(0.1, 0.1)).unwrap();
        let h = 0.25;
        // S0 the top of the vertical arm, S2 the right end of the horizontal arm.
        let s0 = vec![pt(h, 3.0 * h), pt(0.0, 3.0 * h)];
        let s1 = vec![pt(0.0, 3.0 * h), pt(0.0, 0.0), pt(3.0 * h, 0.0)];
        let s2 = vec![pt(3.0 * h, 0.0), pt(3.0 * h, h)];
        let s3 = vec![pt(3.0 * h, h), pt(h, h), pt(h, 3.0 * h)];
        let q = QuadQuery { cells: cells.clone(), sides: [s0.clone(), s1.clone(), s2.clone(), s3.clone()] };
        let qs = QuadQuery { cells, sides: [s1, s2, s3, s0] };
        let k = 16;
        let m = quad_modulus(&d, &q, k).unwrap();
        let ms = quad_modulus(&d, &qs, k).unwrap();
        assert!((m * ms - 1.0).abs() < 0.03, "{m} * {ms}");
    }

    #[test]
    fn degenerate_sides_are_rejected() {
        let d = rect(2, 2, 1);
        let mut q = rect_quad(2, 2, 1);
        q.sides[2] = vec![pt(5.0, 5.0), pt(6.0, 5.0)];
        assert!(matches!(quad_modulus(&d, &q, 2), Err(crate::Error::InvalidQuery(_))));
    }
}
