//! The exact Riemann map of the disc onto a square.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::Uniformizer;
use crate::error::{bail, Error, Result};
use crate::Point;

/// `∫_0^1 dt / sqrt(1 - t^4)`, half the lemniscate constant.
const HALF_LEMNISCATE: f64 = 1.311_028_777_146_059_9;

/// Conformal map of the unit disc onto the square with centre `center`,
/// vertices at `center + half_diagonal * {1, i, -1, -i}` (a diamond), with
/// 0 going to the centre and positive derivative there.
///
/// The inverse is the Schwarz-Christoffel integral
/// `K ∫_0^w dz / sqrt(1 - z^4)`, summed as a power series.
#[derive(Debug, Clone)]
pub struct SquareMap {
    center: Point,
    scale: f64,
    coeffs: Vec<f64>,
}

impl SquareMap {
    pub fn new(center: Point, half_diagonal: f64) -> Result<SquareMap> {
        if !(half_diagonal > 0.0) {
            bail!(InvalidInput, "square size must be positive");
        }
        // binom(2k, k) / 4^k / (4k + 1), enough terms for |w| <= 0.999.
        let mut coeffs = Vec::new();
        let mut c = 1.0;
        for k in 0..6000 {
            coeffs.push(c / (4 * k + 1) as f64);
            c *= (2 * k + 1) as f64 / (2 * k + 2) as f64;
        }
        Ok(SquareMap { center, scale: half_diagonal / HALF_LEMNISCATE, coeffs })
    }

    fn series(&self, w: Point) -> (Point, Point) {
        let w4 = w * w * w * w;
        let tiny = 1e-18;
        let mut power = Point::new(1.0, 0.0);
        let (mut s, mut ds) = (Point::new(0.0, 0.0), Point::new(0.0, 0.0));
        for (k, &c) in self.coeffs.iter().enumerate() {
            s += power * c;
            ds += power * (c * (4 * k + 1) as f64);
            power *= w4;
            if power.norm() < tiny {
                break;
            }
        }
        (w * s, ds)
    }
}

impl Uniformizer for SquareMap {
    fn from_disc(&self, w: Point) -> Result<Point> {
        if !(w.norm() <= 0.999 * (1.0 + 1e-12)) {
            bail!(InvalidInput, "square map series is only summed on |w| <= 0.999, got {w}");
        }
        Ok(self.center + self.series(w).0 * self.scale)
    }

    fn to_disc(&self, z: Point) -> Result<Point> {
        let target = (z - self.center) / self.scale;
        let mut w = target * (1.0 / HALF_LEMNISCATE);
        for it in 0..100 {
            let (f, df) = self.series(w);
            let step = (f - target) / df;
            let mut next = w - step;
            if next.norm() > 0.999 {
                next = next * (0.999 / next.norm());
            }
            w = next;
            if step.norm() < 1e-15 {
                return Ok(w);
            }
            if it == 99 {
                break;
            }
        }
        Err(Error::NumericFailure { step: 100, detail: alloc::format!("Newton inversion of the square map did not settle at {z}") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn vertices_and_centre() {
        let s = SquareMap::new(pt(0.0, 0.0), 1.0).unwrap();
        assert_eq!(s.from_disc(pt(0.0, 0.0)).unwrap(), pt(0.0, 0.0));
        // Partial sums at w = 0.999 stay below the vertex 1 and approach it.
        let v = s.from_disc(pt(0.999, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-15 && v.re < 1.0 && v.re > 0.97, "{v}");
    }

    #[test]
    fn boundary_of_disc_goes_near_the_square_edges() {
        let s = SquareMap::new(pt(0.0, 0.0), 1.0).unwrap();
        for k in 0..16 {
            let w = Point::from_polar(0.999, 0.1 + k as f64 * 0.4);
            let z = s.from_disc(w).unwrap();
            // The diamond |x| + |y| = 1.
            assert!((z.re.abs() + z.im.abs() - 1.0).abs() < 0.02, "{z}");
        }
    }

    #[test]
    fn newton_inverts() {
        let s = SquareMap::new(pt(0.2, -0.1), 0.7).unwrap();
        for w in [pt(0.3, 0.4), pt(-0.8, 0.1), pt(0.0, -0.95)] {
            let back = s.to_disc(s.from_disc(w).unwrap()).unwrap();
            assert!((back - w).norm() < 1e-12, "{w} -> {back}");
        }
    }
}
