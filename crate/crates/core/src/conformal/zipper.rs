//! Geodesic zipper: a Jordan domain given by boundary points onto the
//! upper half plane.
//!
//! The first map `i sqrt((z - z1)/(z - z0))` opens the boundary at the
//! segment `[z0, z1]`. Each later boundary point `zeta`, already moved
//! into the closed half plane, is zipped down to 0 by the real Mobius map
//! `z / (1 - a z)` (which straightens the circle through 0 and `zeta`
//! orthogonal to the axis into a vertical segment) followed by
//! `sqrt(w^2 + d^2)`. A final map folds the last arc from the last point
//! back to `z0`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::{pt, Point};

const I: Point = pt(0.0, 1.0);

/// Square root in the closed upper half plane; on the real axis the sign
/// follows `side`.
#[inline]
fn root_upper(q: Point, side: f64) -> Point {
    let mut s = q.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re * side < 0.0) {
        s = -s;
    }
    s
}

/// One zipping step: `w = z / (d (1 - a z))`, then `sqrt(w^2 + 1)`.
///
/// Dividing by the slit height `d` keeps every stage at unit scale;
/// without it the images of a boundary with many corners drift off by a
/// constant factor per point and overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GeoStep {
    a: f64,
    d: f64,
}

impl GeoStep {
    fn for_point(zeta: Point) -> GeoStep {
        let r2 = zeta.norm_sqr();
        GeoStep { a: zeta.re / r2, d: r2 / zeta.im }
    }

    #[inline]
    fn forward(&self, z: Point) -> Point {
        let w = z / ((1.0 - self.a * z) * self.d);
        root_upper(w * w + 1.0, w.re)
    }

    #[inline]
    fn derivative(&self, z: Point) -> Point {
        let den = 1.0 - self.a * z;
        let w = z / (den * self.d);
        let g = root_upper(w * w + 1.0, w.re);
        w / g / (den * den * self.d)
    }

    #[inline]
    fn inverse(&self, v: Point) -> Point {
        let w = root_upper(v * v - 1.0, v.re) * self.d;
        w / (1.0 + self.a * w)
    }

    /// Image of a point of the extended real line. Zero is the base of
    /// the slit seen from the already zipped (left) side.
    fn forward_real(&self, x: Option<f64>) -> Option<f64> {
        let w = match x {
            None if self.a == 0.0 => return None,
            None => -1.0 / (self.a * self.d),
            Some(x) => {
                let den = 1.0 - self.a * x;
                if den == 0.0 {
                    return None;
                }
                x / (den * self.d)
            }
        };
        let s = (w * w + 1.0).sqrt();
        Some(if w > 0.0 { s } else { -s })
    }
}

/// The closing map `-(z / (1 - z / x0))^2` for the last arc, which runs
/// from 0 back to the image `x0` of the first point (`None` for infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Fold {
    inv_x0: f64,
}

impl Fold {
    #[inline]
    fn forward(&self, z: Point) -> Point {
        let t = z / (1.0 - z * self.inv_x0);
        -(t * t)
    }

    #[inline]
    fn derivative(&self, z: Point) -> Point {
        let den = 1.0 - z * self.inv_x0;
        let t = z / den;
        -2.0 * t / (den * den)
    }

    #[inline]
    fn inverse(&self, v: Point) -> Point {
        // The branch landing in the closed second quadrant.
        let mut s = v.sqrt();
        if s.re < 0.0 {
            s = -s;
        }
        let t = I * s;
        t / (1.0 + t * self.inv_x0)
    }

    fn forward_real(&self, x: Option<f64>) -> Option<f64> {
        let x = x?;
        let den = 1.0 - x * self.inv_x0;
        if den == 0.0 {
            return None;
        }
        let t = x / den;
        Some(-(t * t))
    }
}

/// The composed map from the domain onto the upper half plane.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Zipper {
    z0: Point,
    z1: Point,
    steps: Vec<GeoStep>,
    fold: Fold,
}

impl Zipper {
    /// Zips the counter-clockwise boundary points. Returns the map and
    /// the image of every boundary point on the extended real line.
    pub(crate) fn build(points: &[Point]) -> Result<(Zipper, Vec<Option<f64>>)> {
        let m = points.len();
        if m < 3 {
            return Err(Error::InvalidInput(alloc::format!("zipper needs at least 3 boundary points, got {m}")));
        }
        let (z0, z1) = (points[0], points[1]);
        let open = |z: Point| I * ((z - z1) / (z - z0)).sqrt();
        // Unzipped points live in the upper half plane; zipped ones on the
        // extended real line.
        let mut free: Vec<Point> = points.iter().map(|&z| open(z)).collect();
        let mut real: Vec<Option<f64>> = Vec::with_capacity(m);
        real.push(None);
        real.push(Some(0.0));
        let mut steps = Vec::with_capacity(m.saturating_sub(2));
        for k in 2..m {
            let zeta = free[k];
            let scale = zeta.norm().max(1e-300);
            if !(zeta.im > 1e-14 * scale) || !zeta.re.is_finite() {
                return Err(Error::NumericFailure {
                    step: k,
                    detail: alloc::format!("boundary point {k} collapsed onto the real axis (image {zeta})"),
                });
            }
            let step = GeoStep::for_point(zeta);
            for x in real.iter_mut() {
                *x = step.forward_real(*x);
            }
            real.push(Some(0.0));
            for w in free[k + 1..].iter_mut() {
                *w = step.forward(*w);
            }
            steps.push(step);
        }
        let x0 = real[0];
        let fold = Fold { inv_x0: x0.map_or(0.0, |x| 1.0 / x) };
        for x in real.iter_mut() {
            *x = fold.forward_real(*x);
        }
        // The first point folds to infinity.
        real[0] = None;
        Ok((Zipper { z0, z1, steps, fold }, real))
    }

    pub(crate) fn forward(&self, z: Point) -> Point {
        let w = I * ((z - self.z1) / (z - self.z0)).sqrt();
        let w = self.steps.iter().fold(w, |w, s| s.forward(w));
        self.fold.forward(w)
    }

    /// Image and derivative together.
    pub(crate) fn forward_with_derivative(&self, z: Point) -> (Point, Point) {
        let q = (z - self.z1) / (z - self.z0);
        let s = q.sqrt();
        let mut w = I * s;
        let dq = (self.z1 - self.z0) / ((z - self.z0) * (z - self.z0));
        let mut der = I * dq / (2.0 * s);
        for st in &self.steps {
            der *= st.derivative(w);
            w = st.forward(w);
        }
        der *= self.fold.derivative(w);
        (self.fold.forward(w), der)
    }

    pub(crate) fn inverse(&self, v: Point) -> Point {
        let w = self.fold.inverse(v);
        let w = self.steps.iter().rev().fold(w, |w, s| s.inverse(w));
        let s = -I * w;
        let q = s * s;
        (self.z1 - q * self.z0) / (1.0 - q)
    }

    pub(crate) fn len(&self) -> usize {
        self.steps.len() + 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn circle(m: usize, r: f64) -> Vec<Point> {
        (0..m).map(|k| Point::from_polar(r, core::f64::consts::TAU * k as f64 / m as f64)).collect()
    }

    #[test]
    fn step_inverts() {
        let s = GeoStep::for_point(pt(0.3, 0.8));
        for z in [pt(0.1, 0.5), pt(-2.0, 0.01), pt(5.0, 3.0)] {
            let back = s.inverse(s.forward(z));
            assert!((back - z).norm() < 1e-12, "{z} -> {back}");
        }
        assert!(s.forward(pt(0.3, 0.8)).norm() < 1e-7);
        let f = Fold { inv_x0: -1.0 / 3.0 };
        for z in [pt(-1.0, 0.5), pt(-2.5, 0.2)] {
            let back = f.inverse(f.forward(z));
            assert!((back - z).norm() < 1e-12, "{z} -> {back}");
        }
    }

    #[test]
    fn boundary_images_increase_along_the_loop() {
        let pts = circle(64, 1.0);
        let (_, real) = Zipper::build(&pts).unwrap();
        assert_eq!(real[0], None);
        let xs: Vec<f64> = real[1..].iter().map(|x| x.unwrap()).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]), "{xs:?}");
    }

    #[test]
    fn interior_round_trip_and_upper_half_plane() {
        let pts = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(1.0, 1.0), pt(1.0, 2.0), pt(0.0, 2.0), pt(0.0, 1.0)];
        let (zip, _) = Zipper::build(&pts).unwrap();
        for z in [pt(0.5, 0.5), pt(1.5, 0.5), pt(0.5, 1.5), pt(0.01, 1.99)] {
            let w = zip.forward(z);
            assert!(w.im > 0.0, "{z} -> {w}");
            assert!((zip.inverse(w) - z).norm() < 1e-10);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let pts = circle(40, 1.0);
        let (zip, _) = Zipper::build(&pts).unwrap();
        let z = pt(0.2, -0.3);
        let (_, d) = zip.forward_with_derivative(z);
        let h = 1e-6;
        let fd = (zip.forward(z + h) - zip.forward(z - h)) / (2.0 * h);
        assert!((d - fd).norm() < 1e-6 * d.norm(), "{d} vs {fd}");
    }
}
