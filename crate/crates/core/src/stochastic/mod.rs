//! Monte-Carlo harmonic measure, the Beurling estimate, the disc Green's
//! function, loop-erased random walk and crossing-probability tables.

mod condition;
mod lerw;
mod walk;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

pub use condition::{annulus_catalog, estimate_condition_g, ConditionGRow, StoppingRule};
pub use lerw::{sample_lerw, LerwSampler};
pub use walk::{
    beurling_check, exit_estimate, harmonic_measure_mc, BeurlingReport, DiscExit, ExitGeometry, LatticeExit, SlitDiscExit,
};

use crate::error::{bail, Result};
use crate::Point;

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// Estimate from per-sample values.
    pub fn from_samples(values: &[f64], seed: u64) -> Result<MCEstimate> {
        let n = values.len();
        if n == 0 {
            bail!(InvalidInput, "no samples");
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Ok(MCEstimate { mean, stderr: (var / n as f64).sqrt(), n_samples: n, seed })
    }

    /// Estimate of a probability from a hit count.
    pub fn from_hits(hits: usize, n: usize, seed: u64) -> Result<MCEstimate> {
        if n == 0 {
            bail!(InvalidInput, "no samples");
        }
        if hits > n {
            bail!(InvalidInput, "{hits} hits out of {n} samples");
        }
        let p = hits as f64 / n as f64;
        let var = if n > 1 { p * (1.0 - p) * n as f64 / (n - 1) as f64 } else { 0.0 };
        Ok(MCEstimate { mean: p, stderr: (var / n as f64).sqrt(), n_samples: n, seed })
    }

    /// True when `|mean - value| <= k * stderr`.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Independent child seed number `stream` of `seed` (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Green's function of the unit disc,
/// `G(z, w) = -(1 / 2 pi) log |(1 - z conj(w)) / (z - w)|`.
pub fn greens_disc(z: Point, w: Point) -> Result<f64> {
    if !(z.norm() < 1.0) || !(w.norm() < 1.0) {
        bail!(InvalidInput, "both points must lie in the open unit disc");
    }
    if z == w {
        bail!(Singularity, "Green's function is singular at z = w = {z}");
    }
    let q = (1.0 - z * w.conj()) / (z - w);
    Ok(-q.norm().ln() / (2.0 * core::f64::consts::PI))
}

/// Per-sample seeds for `samples` draws from one master seed.
pub fn sample_seeds(seed: u64, samples: usize) -> Vec<u64> {
    (0..samples as u64).map(|s| derive_seed(seed, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn green_at_the_centre() {
        let g = greens_disc(pt(0.0, 0.0), pt(0.5, 0.0)).unwrap();
        assert!((g + 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(greens_disc(pt(0.1, 0.0), pt(0.1, 0.0)), Err(crate::Error::Singularity(_))));
    }

    #[test]
    fn green_vanishes_at_the_circle() {
        let mut last = f64::NEG_INFINITY;
        for r in [0.9, 0.99, 0.999, 0.9999] {
            let g = greens_disc(pt(0.0, 0.0), pt(r, 0.0)).unwrap();
            // log r / 2 pi is the closed form at z = 0.
            assert!((g - (r as f64).ln() / (2.0 * PI)).abs() < 1e-14);
            assert!(g > last);
            last = g;
        }
        assert!(last.abs() < 2e-5);
    }

    #[test]
    fn estimates_from_hits() {
        let e = MCEstimate::from_hits(25, 100, 7).unwrap();
        assert_eq!(e.mean, 0.25);
        // Sample standard deviation of 25 ones and 75 zeros.
        let vals: Vec<f64> = (0..100).map(|k| if k < 25 { 1.0 } else { 0.0 }).collect();
        let f = MCEstimate::from_samples(&vals, 7).unwrap();
        assert!((e.stderr - f.stderr).abs() < 1e-15);
        assert!(MCEstimate::from_hits(0, 0, 1).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s = sample_seeds(42, 1000);
        let mut t = s.clone();
        t.sort_unstable();
        t.dedup();
        assert_eq!(t.len(), 1000);
        assert_eq!(derive_seed(42, 3), s[3]);
    }

    proptest! {
        #[test]
        fn green_is_symmetric(a in 0.0f64..0.95, t in 0.0f64..6.3, b in 0.0f64..0.95, s in 0.0f64..6.3) {
            let z = Point::from_polar(a, t);
            let w = Point::from_polar(b, s);
            prop_assume!((z - w).norm() > 1e-6);
            let g1 = greens_disc(z, w).unwrap();
            let g2 = greens_disc(w, z).unwrap();
            prop_assert!((g1 - g2).abs() <= 1e-12 * (1.0 + g1.abs()));
            prop_assert!(g1 < 0.0);
        }
    }
}
