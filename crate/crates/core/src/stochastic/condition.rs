//! Empirical unforced-crossing probabilities over a catalog of boundary
//! annuli.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{derive_seed, MCEstimate};
use crate::curves::CurveClass;
use crate::error::{bail, Result};
use crate::lattice::{AnnulusAnalysis, AnnulusQuery, LatticeDomain};
use crate::{geom, pt, Point};

/// Most annuli per inner radius.
const MAX_ANNULI: usize = 64;

/// When the crossing count starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule {
    /// At time 0, on the whole curve.
    Start,
    /// At the first exit of the curve from `B(a, radius)`; the part before
    /// it is cut out of the domain and only the rest is counted. Samples
    /// that never leave the disc are left out.
    LeaveDisc { radius: f64 },
}

/// One row of the table: `M, annuli_tested, crossings, unforced, p_hat, stderr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionGRow {
    pub m: f64,
    pub annuli_tested: usize,
    /// Crossings of all tested annuli by all used samples.
    pub crossings: usize,
    pub unforced: usize,
    /// Mean over samples of the fraction of tested annuli crossed in an
    /// unforced way; `None` when no annulus fits at this `M`.
    pub p_hat: Option<f64>,
    pub stderr: Option<f64>,
    /// Samples that entered the estimate.
    pub samples: usize,
}

/// Boundary annuli `A(z, r, M r)`: centres on boundary lattice vertices
/// about `r` apart, `r = 2^-k` at least two cells wide and `M r` at most
/// half the diameter of the bounding box.
pub fn annulus_catalog(dom: &LatticeDomain, m: f64) -> Vec<AnnulusQuery> {
    let mut out = Vec::new();
    if !(m > 1.0) {
        return out;
    }
    let n = dom.n() as f64;
    let h = dom.h();
    let limit = 0.5 * dom.diameter_bound();
    let verts = dom.boundary_lattice_vertices();
    let mut k = 0;
    loop {
        let r = 0.5f64.powi(k);
        k += 1;
        if r < 2.0 * h {
            break;
        }
        let big_r = m * r;
        if big_r > limit {
            continue;
        }
        let stride = ((r * n).round() as usize).max(1).max(verts.len().div_ceil(MAX_ANNULI));
        for v in verts.iter().step_by(stride) {
            out.push(AnnulusQuery::new(pt(v.0 as f64 * h, v.1 as f64 * h), r, big_r));
        }
    }
    out
}

/// Splits the curve at its first exit from `B(c, radius)`.
fn split_at_exit(v: &[Point], c: Point, radius: f64) -> Option<(Vec<Point>, Vec<Point>)> {
    for (i, w) in v.windows(2).enumerate() {
        if (w[1] - c).norm() < radius {
            continue;
        }
        let t = geom::segment_circle_params(w[0], w[1], c, radius).into_iter().fold(1.0, f64::min);
        let p = w[0] + (w[1] - w[0]) * t;
        let mut head: Vec<Point> = v[..=i].to_vec();
        if (p - w[0]).norm() > 0.0 {
            head.push(p);
        }
        let mut tail = alloc::vec![p];
        tail.extend_from_slice(&v[i + 1..]);
        if tail.len() >= 2 && (tail[1] - p).norm() == 0.0 {
            tail.remove(0);
        }
        return Some((head, tail));
    }
    None
}

/// Unforced-crossing table for curves drawn by `sampler` (called with one
/// derived seed per sample) from the marked edge `a` to `b` of `dom`.
pub fn estimate_condition_g<F>(
    mut sampler: F,
    dom: &LatticeDomain,
    m_values: &[f64],
    samples: usize,
    seed: u64,
    rule: StoppingRule,
) -> Result<Vec<ConditionGRow>>
where
    F: FnMut(u64) -> Result<CurveClass>,
{
    if samples == 0 {
        bail!(InvalidInput, "need at least one sample");
    }
    if let Some(m) = m_values.iter().find(|m| !(**m > 1.0)) {
        bail!(InvalidInput, "annulus ratio M = {m} must exceed 1");
    }
    if let StoppingRule::LeaveDisc { radius } = rule {
        if !(radius > 0.0) {
            bail!(InvalidInput, "stopping radius must be positive");
        }
    }
    let curves: Vec<CurveClass> = (0..samples as u64).map(|s| sampler(derive_seed(seed, s))).collect::<Result<_>>()?;
    let a = dom.a().midpoint(dom.n());
    let mut rows = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let catalog = annulus_catalog(dom, m);
        let mut row =
            ConditionGRow { m, annuli_tested: catalog.len(), crossings: 0, unforced: 0, p_hat: None, stderr: None, samples: 0 };
        if catalog.is_empty() {
            rows.push(row);
            continue;
        }
        let fixed: Option<Vec<AnnulusAnalysis>> = match rule {
            StoppingRule::Start => Some(catalog.iter().map(|q| AnnulusAnalysis::new(dom, q, None)).collect::<Result<_>>()?),
            StoppingRule::LeaveDisc { .. } => None,
        };
        let mut fractions = Vec::with_capacity(samples);
        for c in &curves {
            let mut hit = 0;
            match (&fixed, rule) {
                (Some(analyses), _) => {
                    for an in analyses {
                        let rep = an.crossings(c.vertices());
                        row.crossings += rep.total_crossings;
                        row.unforced += rep.unforced_crossings;
                        hit += usize::from(rep.unforced_crossings > 0);
                    }
                }
                (None, StoppingRule::LeaveDisc { radius }) => {
                    let Some((head, tail)) = split_at_exit(c.vertices(), a, radius) else {
                        continue;
                    };
                    for q in &catalog {
                        let rep = AnnulusAnalysis::new(dom, q, Some(&head))?.crossings(&tail);
                        row.crossings += rep.total_crossings;
                        row.unforced += rep.unforced_crossings;
                        hit += usize::from(rep.unforced_crossings > 0);
                    }
                }
                (None, StoppingRule::Start) => unreachable!(),
            }
            fractions.push(hit as f64 / catalog.len() as f64);
        }
        row.samples = fractions.len();
        if !fractions.is_empty() {
            let e = MCEstimate::from_samples(&fractions, seed)?;
            row.p_hat = Some(e.mean);
            row.stderr = Some(e.stderr);
        }
        rows.push(row);
    }
    Ok(rows)
}
