//! Sampled planar curves, the Fréchet distance between unparametrized
//! polylines, and the metric on driving functions.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{bail, Result};
use crate::Point;

/// A curve `[0, 1] -> C` given by samples and linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCurve {
    samples: Vec<(f64, Point)>,
}

impl ParamCurve {
    /// Builds a curve from `(t, p)` samples.
    ///
    /// Times must increase strictly from 0 to 1. A single sample is accepted
    /// as a constant curve if its time is 0.
    pub fn new(samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.is_empty() {
            bail!(InvalidInput, "curve has no samples");
        }
        for (k, (t, p)) in samples.iter().enumerate() {
            if !t.is_finite() || !p.re.is_finite() || !p.im.is_finite() {
                bail!(InvalidInput, "non-finite sample at index {k}");
            }
            if k > 0 && *t <= samples[k - 1].0 {
                bail!(InvalidInput, "times not strictly increasing at index {k}");
            }
        }
        if samples[0].0 != 0.0 {
            bail!(InvalidInput, "first time is {}, expected 0", samples[0].0);
        }
        if samples.len() > 1 && samples[samples.len() - 1].0 != 1.0 {
            bail!(InvalidInput, "last time is {}, expected 1", samples[samples.len() - 1].0);
        }
        Ok(ParamCurve { samples })
    }

    /// Uniformly parametrized curve through the given points.
    pub fn uniform(points: &[Point]) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            bail!(InvalidInput, "curve has no samples");
        }
        if m == 1 {
            return ParamCurve::new(vec![(0.0, points[0])]);
        }
        let last = (m - 1) as f64;
        let samples = points
            .iter()
            .enumerate()
            .map(|(k, &p)| (if k == m - 1 { 1.0 } else { k as f64 / last }, p))
            .collect();
        ParamCurve::new(samples)
    }

    pub fn samples(&self) -> &[(f64, Point)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn start(&self) -> Point {
        self.samples[0].1
    }

    pub fn end(&self) -> Point {
        self.samples[self.samples.len() - 1].1
    }

    /// Linear interpolation at parameter `t` (clamped to `[0, 1]`).
    pub fn eval(&self, t: f64) -> Point {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        let k = s.partition_point(|x| x.0 <= t);
        if k >= s.len() {
            return s[s.len() - 1].1;
        }
        let (t0, p0) = s[k - 1];
        let (t1, p1) = s[k];
        p0 + (p1 - p0) * ((t - t0) / (t1 - t0))
    }

    /// Applies `f` pointwise, keeping the parametrization.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Result<Point>) -> Result<ParamCurve> {
        let samples = self
            .samples
            .iter()
            .map(|&(t, p)| f(p).map(|q| (t, q)))
            .collect::<Result<Vec<_>>>()?;
        ParamCurve::new(samples)
    }

    pub fn to_class(&self) -> CurveClass {
        CurveClass { vertices: self.points().collect() }
    }
}

/// A polyline with its parametrization forgotten.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveClass {
    vertices: Vec<Point>,
}

impl CurveClass {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            bail!(InvalidInput, "curve has no vertices");
        }
        if let Some(k) = vertices.iter().position(|p| !p.re.is_finite() || !p.im.is_finite()) {
            bail!(InvalidInput, "non-finite vertex at index {k}");
        }
        Ok(CurveClass { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn reversed(&self) -> CurveClass {
        let mut v = self.vertices.clone();
        v.reverse();
        CurveClass { vertices: v }
    }
}

/// A real function on `[0, T]` sampled at strictly increasing times from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingFunction {
    samples: Vec<(f64, f64)>,
}

impl DrivingFunction {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            bail!(InvalidInput, "driving function has no samples");
        }
        if samples[0].0 != 0.0 {
            bail!(InvalidInput, "driving function must start at t = 0");
        }
        for (k, (t, w)) in samples.iter().enumerate() {
            if !t.is_finite() || !w.is_finite() {
                bail!(InvalidInput, "non-finite driving sample at index {k}");
            }
            if k > 0 && *t <= samples[k - 1].0 {
                bail!(InvalidInput, "driving times not strictly increasing at index {k}");
            }
        }
        Ok(DrivingFunction { samples })
    }

    /// Samples `f` on the grid `0, dt, 2 dt, ..., T` (the last step may be short).
    pub fn from_fn(horizon: f64, dt: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(dt > 0.0) || !(horizon >= 0.0) {
            bail!(InvalidInput, "need dt > 0 and T >= 0");
        }
        let steps = step_count(horizon, dt);
        let mut s = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = if k == steps { horizon } else { k as f64 * dt };
            s.push((t, f(t)));
        }
        if steps == 0 {
            s.truncate(1);
        }
        DrivingFunction::new(s)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn horizon(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Linear interpolation, extended constantly outside `[0, T]`.
    pub fn eval(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        let k = s.partition_point(|x| x.0 <= t);
        if k >= s.len() {
            return s[s.len() - 1].1;
        }
        let (t0, w0) = s[k - 1];
        let (t1, w1) = s[k];
        w0 + (w1 - w0) * ((t - t0) / (t1 - t0))
    }
}

/// Number of steps of size `dt` needed to reach `horizon`, tolerant to the
/// rounding in expressions like `0.5 / 1e-4`.
pub(crate) fn step_count(horizon: f64, dt: f64) -> usize {
    let r = horizon / dt;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * n.max(1.0) {
        n as usize
    } else {
        r.ceil() as usize
    }
}

/// Drops the parametrization and collapses consecutive repeated points.
pub fn canonicalize(c: &ParamCurve) -> CurveClass {
    let mut v: Vec<Point> = Vec::with_capacity(c.len());
    for p in c.points() {
        if v.last() != Some(&p) {
            v.push(p);
        }
    }
    CurveClass { vertices: v }
}

/// Points `s` of `[a, b]` (as segment parameters) within `eps` of `p`.
pub(crate) fn free_interval(p: Point, a: Point, b: Point, eps: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return if (a - p).norm() <= eps { Some((0.0, 1.0)) } else { None };
    }
    // Foot of the perpendicular and distance to the carrying line, both
    // computed without cancellation so that tiny `eps` behaves.
    let rel = p - a;
    let s0 = (rel * d.conj()).re / len2;
    let h = (d.re * rel.im - d.im * rel.re).abs() / len2.sqrt();
    if h > eps {
        return None;
    }
    let half = (eps - h).sqrt() * (eps + h).sqrt() / len2.sqrt();
    let lo = (s0 - half).max(0.0);
    let hi = (s0 + half).min(1.0);
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Decides whether the Fréchet distance of two polylines is at most `eps`.
///
/// Free-space reachability over the cells of the parameter rectangle,
/// scanned column by column. Cells that cannot be reached are skipped, so on
/// curves that follow each other closely only a band near the diagonal is
/// examined.
pub fn frechet_decide(p: &[Point], q: &[Point], eps: f64) -> bool {
    if (p[0] - q[0]).norm() > eps || (p[p.len() - 1] - q[q.len() - 1]).norm() > eps {
        return false;
    }
    if p.len() == 1 {
        return q.iter().all(|&x| (x - p[0]).norm() <= eps);
    }
    if q.len() == 1 {
        return p.iter().all(|&x| (x - q[0]).norm() <= eps);
    }
    let np = p.len() - 1;
    let nq = q.len() - 1;

    // Reachable parts of the vertical edges x = i (one per Q segment).
    let mut left: Vec<Option<(f64, f64)>> = vec![None; nq];
    for j in 0..nq {
        match free_interval(p[0], q[j], q[j + 1], eps) {
            Some((lo, hi)) if lo == 0.0 => {
                left[j] = Some((0.0, hi));
                if hi < 1.0 {
                    break;
                }
            }
            _ => break,
        }
    }
    let mut right: Vec<Option<(f64, f64)>> = vec![None; nq];
    // Reachability along the bottom edge y = 0.
    let mut bottom_open = true;

    for i in 0..np {
        let bottom0 = if bottom_open {
            match free_interval(q[0], p[i], p[i + 1], eps) {
                Some((lo, hi)) if lo == 0.0 => {
                    bottom_open = hi >= 1.0;
                    Some((0.0, hi))
                }
                _ => {
                    bottom_open = false;
                    None
                }
            }
        } else {
            None
        };
        let first = left.iter().position(|x| x.is_some());
        let last = left.iter().rposition(|x| x.is_some());
        let start = if bottom0.is_some() { 0 } else { first.unwrap_or(nq) };
        right.iter_mut().for_each(|x| *x = None);
        let mut below = if start == 0 { bottom0 } else { None };
        for j in start..nq {
            let l = left[j];
            if l.is_none() && below.is_none() {
                if last.is_none_or(|e| j > e) {
                    break;
                }
                continue;
            }
            // Right edge of cell (i, j).
            right[j] = match (below, l) {
                (Some(_), _) => free_interval(p[i + 1], q[j], q[j + 1], eps),
                (None, Some((lo, _))) => free_interval(p[i + 1], q[j], q[j + 1], eps)
                    .and_then(|(a, b)| if b >= lo { Some((a.max(lo), b)) } else { None }),
                (None, None) => None,
            };
            // Top edge of cell (i, j).
            below = match (l, below) {
                (Some(_), _) => free_interval(q[j + 1], p[i], p[i + 1], eps),
                (None, Some((lo, _))) => free_interval(q[j + 1], p[i], p[i + 1], eps)
                    .and_then(|(a, b)| if b >= lo { Some((a.max(lo), b)) } else { None }),
                (None, None) => None,
            };
            if j + 1 == nq && i + 1 == np {
                let top_hits = below.is_some_and(|(_, hi)| hi >= 1.0);
                let right_hits = right[j].is_some_and(|(_, hi)| hi >= 1.0);
                return top_hits || right_hits;
            }
        }
        core::mem::swap(&mut left, &mut right);
        if left.iter().all(|x| x.is_none()) && !bottom_open {
            return false;
        }
    }
    false
}

/// Discrete Fréchet distance of the vertex sequences, an upper bound for the
/// continuous distance.
pub fn discrete_frechet(p: &[Point], q: &[Point]) -> f64 {
    let m = q.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (i, &pi) in p.iter().enumerate() {
        for j in 0..m {
            let d = (pi - q[j]).norm();
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Continuous Fréchet distance between two polylines, to within `tol`.
pub fn frechet_distance(c1: &CurveClass, c2: &CurveClass, tol: f64) -> Result<f64> {
    if c1.is_empty() || c2.is_empty() {
        bail!(InvalidInput, "empty curve");
    }
    if !(tol > 0.0) {
        bail!(InvalidInput, "tolerance must be positive");
    }
    let (p, q) = (c1.vertices(), c2.vertices());
    let mut lo = (p[0] - q[0]).norm().max((p[p.len() - 1] - q[q.len() - 1]).norm());
    let mut hi = discrete_frechet(p, q);
    if p.len() == q.len() {
        let along = p.iter().zip(q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        hi = hi.min(along);
    }
    if frechet_decide(p, q, lo) {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if frechet_decide(p, q, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The metric `sum_{n >= 1} 2^{-n} min(1, sup_{[0, n]} |w1 - w2|)` on driving
/// functions, both extended constantly past their horizons.
pub fn function_metric(w1: &DrivingFunction, w2: &DrivingFunction) -> f64 {
    // The difference is piecewise linear on the merged grid, so its running
    // supremum only needs the breakpoints (plus the integers n themselves).
    let horizon = w1.horizon().max(w2.horizon());
    let last_n = (horizon.ceil() as usize).max(1);
    let mut times: Vec<f64> = w1
        .samples()
        .iter()
        .map(|s| s.0)
        .chain(w2.samples().iter().map(|s| s.0))
        .chain((1..=last_n).map(|n| n as f64))
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();

    let mut total = 0.0;
    let mut sup = 0.0f64;
    let mut idx = 0;
    let mut weight = 0.5;
    let mut n = 1usize;
    while weight > f64::EPSILON * 1e-3 {
        let limit = n as f64;
        while idx < times.len() && times[idx] <= limit {
            let t = times[idx];
            sup = sup.max((w1.eval(t) - w2.eval(t)).abs());
            idx += 1;
        }
        total += weight * sup.min(1.0);
        weight *= 0.5;
        n += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use proptest::prelude::*;

    fn class(v: &[(f64, f64)]) -> CurveClass {
        CurveClass::new(v.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap()
    }

    /// Discrete Fréchet of densely refined polylines; converges to the
    /// continuous distance from above.
    fn refined_discrete(c1: &CurveClass, c2: &CurveClass, per_seg: usize) -> f64 {
        let refine = |c: &CurveClass| {
            let v = c.vertices();
            let mut out = vec![v[0]];
            for w in v.windows(2) {
                for k in 1..=per_seg {
                    out.push(w[0] + (w[1] - w[0]) * (k as f64 / per_seg as f64));
                }
            }
            out
        };
        discrete_frechet(&refine(c1), &refine(c2))
    }

    #[test]
    fn identical_segments() {
        let c = class(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(frechet_distance(&c, &c, 1e-9).unwrap() < 1e-9);
    }

    #[test]
    fn shifted_segment() {
        let a = class(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = class(&[(0.0, 0.3), (1.0, 0.3)]);
        assert!((frechet_distance(&a, &b, 1e-9).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn tent_against_segment_matches_refined_discrete() {
        let a = class(&[(0.0, 0.0), (2.0, 0.0)]);
        let b = class(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.0)]);
        let d = frechet_distance(&a, &b, 1e-9).unwrap();
        let oracle = refined_discrete(&a, &b, 400);
        assert!((d - 0.5).abs() < 1e-8, "{d}");
        assert!((oracle - d).abs() < 5e-3 && oracle >= d - 1e-12);
    }

    #[test]
    fn empty_and_bad_tolerance() {
        assert!(CurveClass::new(vec![]).is_err());
        let a = class(&[(0.0, 0.0)]);
        assert!(frechet_distance(&a, &a, 0.0).is_err());
    }

    #[test]
    fn point_curves() {
        let a = class(&[(0.0, 0.0)]);
        let b = class(&[(0.0, 1.0), (2.0, 1.0)]);
        let d = frechet_distance(&a, &b, 1e-10).unwrap();
        assert!((d - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn backtracking_costs_distance() {
        // Going 0 -> 2 -> 1 -> 3 against the straight segment: the backtrack
        // of length 1 forces distance 0.5.
        let a = class(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let b = class(&[(0.0, 0.0), (3.0, 0.0)]);
        let d = frechet_distance(&a, &b, 1e-10).unwrap();
        assert!((d - 0.5).abs() < 1e-9, "{d}");
    }

    #[test]
    fn canonicalize_collapses_duplicates() {
        let c = ParamCurve::new(vec![(0.0, pt(0.0, 0.0)), (0.5, pt(0.0, 0.0)), (1.0, pt(1.0, 0.0))]).unwrap();
        assert_eq!(canonicalize(&c).vertices(), &[pt(0.0, 0.0), pt(1.0, 0.0)]);
        let c = ParamCurve::uniform(&[pt(0.0, 0.0), pt(1.0, 2.0), pt(3.0, 1.0)]).unwrap();
        assert_eq!(canonicalize(&c).vertices(), c.to_class().vertices());
    }

    #[test]
    fn param_curve_validation() {
        assert!(ParamCurve::new(vec![(0.0, pt(0.0, 0.0)), (0.0, pt(1.0, 0.0))]).is_err());
        assert!(ParamCurve::new(vec![(0.0, pt(0.0, 0.0)), (0.5, pt(1.0, 0.0))]).is_err());
        assert!(ParamCurve::new(vec![(0.1, pt(0.0, 0.0)), (1.0, pt(1.0, 0.0))]).is_err());
        assert!(ParamCurve::new(vec![]).is_err());
        let c = ParamCurve::uniform(&[pt(0.0, 0.0), pt(2.0, 0.0)]).unwrap();
        assert_eq!(c.eval(0.25), pt(0.5, 0.0));
    }

    #[test]
    fn function_metric_examples() {
        let zero = DrivingFunction::from_fn(10.0, 0.5, |_| 0.0).unwrap();
        let half = DrivingFunction::from_fn(10.0, 0.5, |_| 0.5).unwrap();
        let ramp = DrivingFunction::from_fn(10.0, 0.5, |t| t).unwrap();
        assert_eq!(function_metric(&zero, &zero), 0.0);
        assert!((function_metric(&zero, &half) - 0.5).abs() < 1e-15);
        assert!((function_metric(&zero, &ramp) - 1.0).abs() < 1e-15);
        // Supremum on [0, 1] of a ramp is 1 already, so nothing below 1 shows.
        let small = DrivingFunction::from_fn(10.0, 0.5, |t| 0.1 * t).unwrap();
        // sup_[0,n] = 0.1 n, saturating at n = 10.
        let expect: f64 = (1..200).map(|n| 0.5f64.powi(n) * (0.1 * n as f64).min(1.0)).sum();
        assert!((function_metric(&zero, &small) - expect).abs() < 1e-14);
    }

    #[test]
    fn function_metric_constant_extension() {
        let short = DrivingFunction::new(vec![(0.0, 0.0), (1.0, 0.2)]).unwrap();
        let long = DrivingFunction::new(vec![(0.0, 0.0), (1.0, 0.2), (5.0, 0.2)]).unwrap();
        assert!(function_metric(&short, &long) < 1e-15);
    }

    fn arb_poly(max: usize) -> impl Strategy<Value = CurveClass> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=max)
            .prop_map(|v| CurveClass::new(v.into_iter().map(|(x, y)| pt(x, y)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn symmetric(a in arb_poly(6), b in arb_poly(6)) {
            let tol = 1e-7;
            let d1 = frechet_distance(&a, &b, tol).unwrap();
            let d2 = frechet_distance(&b, &a, tol).unwrap();
            prop_assert!((d1 - d2).abs() <= tol);
        }

        #[test]
        fn triangle(a in arb_poly(5), b in arb_poly(5), c in arb_poly(5)) {
            let tol = 1e-7;
            let ab = frechet_distance(&a, &b, tol).unwrap();
            let bc = frechet_distance(&b, &c, tol).unwrap();
            let ac = frechet_distance(&a, &c, tol).unwrap();
            prop_assert!(ac <= ab + bc + 3.0 * tol);
        }

        #[test]
        fn reparametrization_is_free(a in arb_poly(6), inserts in prop::collection::vec((0usize..6, 0.0f64..1.0), 0..4)) {
            // Insert extra vertices on existing segments and repeat some.
            let mut v = a.vertices().to_vec();
            for (k, s) in inserts {
                if v.len() >= 2 {
                    let i = k % (v.len() - 1);
                    let p = v[i] + (v[i + 1] - v[i]) * s;
                    v.insert(i + 1, p);
                } else {
                    v.push(v[0]);
                }
            }
            let b = CurveClass::new(v).unwrap();
            prop_assert!(frechet_distance(&a, &b, 1e-8).unwrap() <= 1e-8);
        }

        #[test]
        fn translation_bound(a in arb_poly(6), vx in -1.0f64..1.0, vy in -1.0f64..1.0) {
            let v = pt(vx, vy);
            let b = CurveClass::new(a.vertices().iter().map(|&p| p + v).collect()).unwrap();
            let d = frechet_distance(&a, &b, 1e-8).unwrap();
            prop_assert!(d <= v.norm() + 1e-8);
            // Endpoints move by exactly |v|, so for a translate it is attained.
            prop_assert!(d >= v.norm() - 1e-8);
        }

        #[test]
        fn below_discrete_upper_bound(a in arb_poly(6), b in arb_poly(6)) {
            let d = frechet_distance(&a, &b, 1e-8).unwrap();
            prop_assert!(d <= discrete_frechet(a.vertices(), b.vertices()) + 1e-8);
            prop_assert!(d <= refined_discrete(&a, &b, 8) + 1e-8);
        }

        #[test]
        fn function_metric_bounded_and_monotone(vals in prop::collection::vec(-3.0f64..3.0, 2..20), scale in 0.0f64..1.0) {
            let n = vals.len();
            let w1 = DrivingFunction::new((0..n).map(|k| (k as f64 * 0.7, vals[k])).collect()).unwrap();
            let zero = DrivingFunction::new(vec![(0.0, 0.0)]).unwrap();
            let w2 = DrivingFunction::new((0..n).map(|k| (k as f64 * 0.7, scale * vals[k])).collect()).unwrap();
            let d1 = function_metric(&zero, &w1);
            let d2 = function_metric(&zero, &w2);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&d1));
            prop_assert!(d2 <= d1 + 1e-15);
        }
    }
}
