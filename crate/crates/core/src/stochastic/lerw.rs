//! Loop-erased random walk between two marked edges.
//!
//! The walk on cells is conditioned to leave the domain through `b` by a
//! Doob transform: with `h(x)` the probability that simple random walk
//! from `x` first exits through `b`, the step `x -> y` is taken with
//! probability `h(y) / (4 h(x))` and the exit through `b` with `1 / (4 h(x))`.
//! This samples exactly the conditioned walk without any rejection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::CurveClass;
use crate::error::{bail, Error, Result};
use crate::lattice::{Cell, LatticeDomain, MarkedEdge, Side};
use crate::linalg::{conjugate_gradient, Csr};

/// Precomputed harmonic function for repeated sampling between `a` and `b`.
#[derive(Debug, Clone)]
pub struct LerwSampler {
    n: u32,
    a: MarkedEdge,
    b: MarkedEdge,
    cells: Vec<Cell>,
    index: BTreeMap<Cell, usize>,
    /// Interior neighbours of every cell.
    nbrs: Vec<Vec<usize>>,
    h: Vec<f64>,
    max_steps: usize,
}

impl LerwSampler {
    pub fn new(dom: &LatticeDomain, a: MarkedEdge, b: MarkedEdge) -> Result<LerwSampler> {
        if a == b {
            bail!(InvalidInput, "marked edges coincide");
        }
        for e in [a, b] {
            if dom.edge_index(e).is_none() {
                bail!(InvalidInput, "{e:?} is not a boundary edge");
            }
        }
        let cells = dom.cells().to_vec();
        let index: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let nbrs: Vec<Vec<usize>> = cells
            .iter()
            .map(|c| Side::ALL.iter().filter_map(|&s| index.get(&c.step(s)).copied()).collect())
            .collect();
        let m = cells.len();
        let mut trip = Vec::with_capacity(5 * m);
        for (k, ns) in nbrs.iter().enumerate() {
            trip.push((k, k, 4.0));
            for &j in ns {
                trip.push((k, j, -1.0));
            }
        }
        let mut rhs = alloc::vec![0.0; m];
        rhs[index[&b.cell]] = 1.0;
        let sol = conjugate_gradient(&Csr::from_triplets(m, trip), &rhs, 1e-13, 50 * m + 200)?;
        let h: Vec<f64> = sol.x.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect();
        Ok(LerwSampler { n: dom.n(), a, b, cells, index, nbrs, h, max_steps: 10_000 * m + 100_000 })
    }

    /// Probability that simple random walk from the cell first exits
    /// through `b`.
    pub fn exit_probability(&self, c: Cell) -> Option<f64> {
        self.index.get(&c).map(|&k| self.h[k])
    }

    /// One loop-erased path from the midpoint of `a` through cell centres
    /// to the midpoint of `b`.
    pub fn sample(&self, seed: u64) -> Result<CurveClass> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bk = self.index[&self.b.cell];
        let mut x = self.index[&self.a.cell];
        let mut path: Vec<usize> = alloc::vec![x];
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        pos.insert(x, 0);
        for _ in 0..self.max_steps {
            let exit_w = if x == bk { 1.0 } else { 0.0 };
            let total: f64 = exit_w + self.nbrs[x].iter().map(|&y| self.h[y]).sum::<f64>();
            let mut u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * total;
            let mut next = None;
            for &y in &self.nbrs[x] {
                if u < self.h[y] {
                    next = Some(y);
                    break;
                }
                u -= self.h[y];
            }
            let Some(y) = next else {
                if exit_w > 0.0 {
                    return self.to_curve(&path);
                }
                // Rounding left `u` past the last weight; take the last neighbour.
                let y = *self.nbrs[x].last().ok_or_else(|| Error::SamplingFailure("isolated cell".into()))?;
                x = self.advance(&mut path, &mut pos, y);
                continue;
            };
            x = self.advance(&mut path, &mut pos, y);
        }
        Err(Error::SamplingFailure(alloc::format!("walk did not reach b within {} steps", self.max_steps)))
    }

    /// Appends `y`, erasing the loop it closes.
    fn advance(&self, path: &mut Vec<usize>, pos: &mut BTreeMap<usize, usize>, y: usize) -> usize {
        if let Some(&k) = pos.get(&y) {
            for z in path.drain(k + 1..) {
                pos.remove(&z);
            }
        } else {
            pos.insert(y, path.len());
            path.push(y);
        }
        y
    }

    fn to_curve(&self, path: &[usize]) -> Result<CurveClass> {
        let mut v = Vec::with_capacity(path.len() + 2);
        v.push(self.a.midpoint(self.n));
        v.extend(path.iter().map(|&k| self.cells[k].center(self.n)));
        v.push(self.b.midpoint(self.n));
        CurveClass::new(v)
    }
}

/// One loop-erased random walk from `a` to `b` in `dom`.
pub fn sample_lerw(dom: &LatticeDomain, a: MarkedEdge, b: MarkedEdge, seed: u64) -> Result<CurveClass> {
    LerwSampler::new(dom, a, b)?.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use proptest::prelude::*;

    fn square(n: i32) -> (LatticeDomain, MarkedEdge, MarkedEdge) {
        let cells = (0..n).flat_map(|i| (0..n).map(move |j| Cell::new(i, j)));
        let a = MarkedEdge::new(0, n / 2, Side::W);
        let b = MarkedEdge::new(n - 1, n / 2, Side::E);
        (LatticeDomain::new(n as u32, cells, pt(0.5, 0.5 + 0.1 / n as f64), a, b).unwrap(), a, b)
    }

    #[test]
    fn exit_probability_matches_a_direct_solve() {
        // Two cells side by side, b on the east side of the right one:
        // h0 = h1 / 4, h1 = (h0 + 1) / 4, so h1 = 4/15 and h0 = 1/15.
        let cells = [Cell::new(0, 0), Cell::new(1, 0)];
        let dom = LatticeDomain::unmarked(2, cells, pt(0.5, 0.25)).unwrap();
        let s = LerwSampler::new(&dom, MarkedEdge::new(0, 0, Side::W), MarkedEdge::new(1, 0, Side::E)).unwrap();
        assert!((s.exit_probability(Cell::new(0, 0)).unwrap() - 1.0 / 15.0).abs() < 1e-12);
        assert!((s.exit_probability(Cell::new(1, 0)).unwrap() - 4.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn coinciding_marks_are_rejected() {
        let (d, a, _) = square(4);
        assert!(sample_lerw(&d, a, a, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn path_is_simple_and_joins_the_marks(seed in any::<u64>()) {
            let (d, a, b) = square(8);
            let c = sample_lerw(&d, a, b, seed).unwrap();
            let v = c.vertices();
            prop_assert_eq!(v[0], a.midpoint(8));
            prop_assert_eq!(*v.last().unwrap(), b.midpoint(8));
            let mut cells: Vec<Cell> = v[1..v.len() - 1].iter().map(|p| d.cell_of(*p)).collect();
            for w in cells.windows(2) {
                prop_assert_eq!((w[0].i - w[1].i).abs() + (w[0].j - w[1].j).abs(), 1);
            }
            let len = cells.len();
            cells.sort_unstable();
            cells.dedup();
            prop_assert_eq!(cells.len(), len);
            prop_assert_eq!(c.clone(), sample_lerw(&d, a, b, seed).unwrap());
        }
    }
}
