//! Linear fractional maps.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::{pt, Point};

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub d: Point,
}

impl Mobius {
    pub fn new(a: Point, b: Point, c: Point, d: Point) -> Result<Mobius> {
        let m = Mobius { a, b, c, d };
        if !(m.det().norm() > 0.0) {
            bail!(InvalidInput, "Mobius coefficients have zero determinant");
        }
        Ok(m)
    }

    pub fn identity() -> Mobius {
        Mobius { a: pt(1.0, 0.0), b: pt(0.0, 0.0), c: pt(0.0, 0.0), d: pt(1.0, 0.0) }
    }

    /// `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Mobius {
        Mobius { a: Point::from_polar(1.0, theta), ..Mobius::identity() }
    }

    /// `z -> e^{i theta} (z - p) / (1 - conj(p) z)`, an automorphism of the
    /// unit disc sending `p` to 0.
    pub fn disc_automorphism(p: Point, theta: f64) -> Result<Mobius> {
        if !(p.norm() < 1.0) {
            bail!(InvalidInput, "disc automorphism centre {p} is not inside the unit disc");
        }
        let r = Point::from_polar(1.0, theta);
        Ok(Mobius { a: r, b: -r * p, c: -p.conj(), d: pt(1.0, 0.0) })
    }

    /// `z -> e^{i theta} (z - w) / (z - conj(w))`, the upper half plane onto
    /// the disc with `w` going to 0.
    pub fn half_plane_to_disc(w: Point, theta: f64) -> Result<Mobius> {
        if !(w.im > 0.0) {
            bail!(InvalidInput, "half plane point {w} is not in the open upper half plane");
        }
        let r = Point::from_polar(1.0, theta);
        Ok(Mobius { a: r, b: -r * w, c: pt(1.0, 0.0), d: -w.conj() })
    }

    pub fn det(&self) -> Point {
        self.a * self.d - self.b * self.c
    }

    /// Image of `z`; a pole gives an error.
    pub fn apply(&self, z: Point) -> Result<Point> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            bail!(Pole, "Mobius map has a pole at {z}");
        }
        Ok((self.a * z + self.b) / den)
    }

    /// Image of the point at infinity, `None` when it is infinity again.
    pub fn at_infinity(&self) -> Option<Point> {
        if self.c.norm() == 0.0 {
            None
        } else {
            Some(self.a / self.c)
        }
    }

    /// Image of a point of the extended real line (`None` is infinity).
    pub fn apply_ext(&self, x: Option<f64>) -> Option<Point> {
        match x {
            None => self.at_infinity(),
            Some(x) => self.apply(pt(x, 0.0)).ok(),
        }
    }

    pub fn derivative(&self, z: Point) -> Point {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        Mobius {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }
}

/// The automorphism of the disc sending `alpha` to -1 and `beta` to 1
/// (both on the unit circle), fixed by asking that the point of the
/// hyperbolic geodesic from `alpha` to `beta` nearest 0 goes to 0.
pub fn two_point_normalization(alpha: Point, beta: Point) -> Result<Mobius> {
    let (alpha, beta) = (alpha / alpha.norm(), beta / beta.norm());
    if (alpha - beta).norm() < 1e-12 {
        bail!(InvalidInput, "the two boundary points coincide");
    }
    let mid = alpha + beta;
    // Nearest point of the geodesic to 0: on the bisector, at distance
    // (1 - sin h) / cos h where 2h is the angle between the points.
    let p = if mid.norm() < 1e-15 {
        pt(0.0, 0.0)
    } else {
        let cos_h = mid.norm() / 2.0;
        let sin_h = (1.0 - cos_h * cos_h).max(0.0).sqrt();
        mid / mid.norm() * ((1.0 - sin_h) / cos_h)
    };
    let m = Mobius::disc_automorphism(p, 0.0)?;
    let turn = -m.apply(beta)?.arg();
    Ok(Mobius::rotation(turn).compose(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compose_and_inverse() {
        let m = Mobius::new(pt(1.0, 2.0), pt(0.5, -1.0), pt(0.2, 0.1), pt(3.0, 0.0)).unwrap();
        let z = pt(0.3, -0.7);
        let back = m.inverse().apply(m.apply(z).unwrap()).unwrap();
        assert_relative_eq!((back - z).norm(), 0.0, epsilon = 1e-14);
        let n = Mobius::rotation(0.4);
        let want = n.apply(m.apply(z).unwrap()).unwrap();
        assert_relative_eq!((n.compose(&m).apply(z).unwrap() - want).norm(), 0.0, epsilon = 1e-14);
        assert!(Mobius::new(pt(1.0, 0.0), pt(2.0, 0.0), pt(2.0, 0.0), pt(4.0, 0.0)).is_err());
    }

    #[test]
    fn half_plane_map_matches_the_standard_one() {
        // theta = 0 and w = i is (z - i)/(z + i).
        let m = Mobius::half_plane_to_disc(pt(0.0, 1.0), 0.0).unwrap();
        for z in [pt(0.3, 0.2), pt(-2.0, 5.0), pt(1.0, 0.0)] {
            let want = crate::loewner::mobius_h_to_d(z).unwrap();
            assert_relative_eq!((m.apply(z).unwrap() - want).norm(), 0.0, epsilon = 1e-14);
        }
        assert_eq!(m.at_infinity(), Some(pt(1.0, 0.0)));
    }

    #[test]
    fn two_point_normalization_sends_marks_to_minus_one_and_one() {
        for (ta, tb) in [(2.0, 0.3), (-1.0, 1.7), (3.0, -3.0), (0.1, 0.2)] {
            let (a, b) = (Point::from_polar(1.0, ta), Point::from_polar(1.0, tb));
            let m = two_point_normalization(a, b).unwrap();
            assert_relative_eq!((m.apply(a).unwrap() + 1.0).norm(), 0.0, epsilon = 1e-10);
            assert_relative_eq!((m.apply(b).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-10);
            // 0 lands on the perpendicular through the origin.
            assert!(m.apply(pt(0.0, 0.0)).unwrap().re.abs() < 1e-10);
        }
    }

    #[test]
    fn antipodal_marks_give_a_rotation() {
        let t = 0.7;
        let m = two_point_normalization(Point::from_polar(1.0, t + core::f64::consts::PI), Point::from_polar(1.0, t)).unwrap();
        let rot = Mobius::rotation(-t);
        for z in [pt(0.1, 0.2), pt(-0.5, 0.3), pt(0.0, 0.0)] {
            assert_relative_eq!((m.apply(z).unwrap() - rot.apply(z).unwrap()).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn already_normalized_is_identity() {
        let m = two_point_normalization(pt(-1.0, 0.0), pt(1.0, 0.0)).unwrap();
        for z in [pt(0.1, 0.2), pt(-0.5, 0.3)] {
            assert_relative_eq!((m.apply(z).unwrap() - z).norm(), 0.0, epsilon = 1e-14);
        }
    }
}
