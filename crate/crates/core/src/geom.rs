//! Small planar geometry helpers shared by the other modules.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::Point;

/// Closest point to `p` on the segment `[a, b]` together with its segment
/// parameter in `[0, 1]`.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (a, 0.0);
    }
    let s = ((p - a) * d.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (a + d * s, s)
}

pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    (closest_on_segment(p, a, b).0 - p).norm()
}

/// Distance from `p` to an open or closed polyline.
pub fn dist_point_polyline(p: Point, pts: &[Point]) -> f64 {
    match pts.len() {
        0 => f64::INFINITY,
        1 => (pts[0] - p).norm(),
        _ => pts
            .windows(2)
            .map(|w| dist_point_segment(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Closest point on a closed polygon boundary (edges include the closing one).
pub fn closest_on_polygon(p: Point, poly: &[Point]) -> (Point, f64) {
    let m = poly.len();
    let mut best = (poly[0], f64::INFINITY);
    for k in 0..m {
        let (q, _) = closest_on_segment(p, poly[k], poly[(k + 1) % m]);
        let d = (q - p).norm();
        if d < best.1 {
            best = (q, d);
        }
    }
    best
}

/// Winding number of the closed polygon around `p` (non-zero means inside).
/// Points on the boundary give an unspecified answer; use
/// [`dist_point_polygon`] first when that matters.
pub fn winding_number(p: Point, poly: &[Point]) -> i32 {
    let m = poly.len();
    let mut w = 0;
    for k in 0..m {
        let a = poly[k];
        let b = poly[(k + 1) % m];
        let cross = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && cross > 0.0 {
                w += 1;
            }
        } else if b.im <= p.im && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn dist_point_polygon(p: Point, poly: &[Point]) -> f64 {
    closest_on_polygon(p, poly).1
}

/// Signed area, positive for counterclockwise polygons.
pub fn signed_area(poly: &[Point]) -> f64 {
    let m = poly.len();
    let mut s = 0.0;
    for k in 0..m {
        let a = poly[k];
        let b = poly[(k + 1) % m];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Quadratic check that a closed polygon has no self-intersections.
pub fn polygon_is_simple(poly: &[Point]) -> bool {
    let m = poly.len();
    if m < 3 {
        return false;
    }
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        if a == b {
            return false;
        }
        for j in (i + 1)..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(a, b, poly[j], poly[(j + 1) % m]) {
                return false;
            }
        }
    }
    true
}

/// Parameters `s` in `[0, 1]` where the segment `[a, b]` meets the circle
/// `|w - z| = r`, in increasing order.
pub fn segment_circle_params(a: Point, b: Point, z: Point, r: f64) -> Vec<f64> {
    let d = b - a;
    let f = a - z;
    let qa = d.norm_sqr();
    let qb = 2.0 * (f * d.conj()).re;
    let qc = f.norm_sqr() - r * r;
    let mut out = Vec::new();
    if qa == 0.0 {
        return out;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return out;
    }
    let sq = disc.sqrt();
    // Numerically stable pair of roots.
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = if q != 0.0 { [q / qa, qc / q] } else { [0.0, 0.0] };
    if roots[0] > roots[1] {
        roots.swap(0, 1);
    }
    for (k, s) in roots.iter().enumerate() {
        if (0.0..=1.0).contains(s) && (k == 0 || disc > 0.0) {
            out.push(*s);
        }
    }
    out
}

/// Largest pairwise distance in a point set (quadratic, meant for short lists).
pub fn diameter(pts: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

/// Total length of a polyline.
pub fn polyline_length(pts: &[Point]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let r = t % two_pi;
    if r < 0.0 {
        r + two_pi
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn segment_distance_cases() {
        let a = pt(0.0, 0.0);
        let b = pt(2.0, 0.0);
        assert_eq!(dist_point_segment(pt(1.0, 1.0), a, b), 1.0);
        assert_eq!(dist_point_segment(pt(3.0, 0.0), a, b), 1.0);
        assert_eq!(dist_point_segment(pt(5.0, 4.0), a, a), 41f64.sqrt());
    }

    #[test]
    fn winding_of_square() {
        let sq = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        assert_eq!(winding_number(pt(0.5, 0.5), &sq), 1);
        assert_eq!(winding_number(pt(1.5, 0.5), &sq), 0);
        assert!(signed_area(&sq) > 0.0);
        assert!(polygon_is_simple(&sq));
        let bow = [pt(0.0, 0.0), pt(1.0, 1.0), pt(1.0, 0.0), pt(0.0, 1.0)];
        assert!(!polygon_is_simple(&bow));
    }

    #[test]
    fn circle_hits() {
        let s = segment_circle_params(pt(-2.0, 0.0), pt(2.0, 0.0), pt(0.0, 0.0), 1.0);
        assert_eq!(s.len(), 2);
        assert!((s[0] - 0.25).abs() < 1e-15 && (s[1] - 0.75).abs() < 1e-15);
        let s = segment_circle_params(pt(0.0, 0.0), pt(2.0, 0.0), pt(0.0, 0.0), 1.0);
        assert_eq!(s, alloc::vec![0.5]);
    }
}
