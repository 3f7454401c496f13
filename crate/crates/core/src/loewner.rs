//! Chordal Loewner evolution with piecewise constant driving.
//!
//! Over a step of length `dt` with constant driving value `c`, the Loewner
//! flow `dg/dt = 2 / (g - c)` has the explicit solution
//! `G(z) = c + sqrt((z - c)^2 + 4 dt)`, which maps the half plane minus the
//! vertical slit `[c, c + 2i sqrt(dt)]` onto the half plane. Composing these
//! maps gives the mapping-out function; composing their inverses gives the
//! trace. Unzipping a trace point by point inverts the construction.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curves::{step_count, DrivingFunction, ParamCurve};
use crate::error::{bail, Error, Result};
use crate::{pt, Point};

const I: Point = pt(0.0, 1.0);

/// `z -> i (z + 1) / (1 - z)`, the disc onto the upper half plane.
pub fn mobius_d_to_h(z: Point) -> Result<Point> {
    let den = 1.0 - z;
    if den.norm() == 0.0 {
        bail!(Pole, "mobius_d_to_h is singular at z = 1");
    }
    Ok(I * (z + 1.0) / den)
}

/// `z -> (z - i) / (z + i)`, the upper half plane onto the disc.
pub fn mobius_h_to_d(z: Point) -> Result<Point> {
    let den = z + I;
    if den.norm() == 0.0 {
        bail!(Pole, "mobius_h_to_d is singular at z = -i");
    }
    Ok((z - I) / den)
}

/// Square root of `q` in the closed upper half plane. On the real axis the
/// sign follows `hint`, which should be the real part of the point the
/// root is taken for (the side of the slit it lives on).
#[inline]
pub(crate) fn sqrt_upper(q: Point, hint: f64) -> Point {
    let mut s = q.sqrt();
    if s.im < 0.0 {
        s = -s;
    }
    if s.im == 0.0 && hint < 0.0 && s.re > 0.0 {
        s = -s;
    }
    if s.im == 0.0 {
        s.im = 0.0;
    }
    s
}

/// One vertical-slit step: constant driving value `c` for capacity time `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitStep {
    pub c: f64,
    pub dt: f64,
}

impl SlitStep {
    /// The conformal map removing the slit `[c, c + 2i sqrt(dt)]`.
    #[inline]
    pub fn forward(&self, z: Point) -> Point {
        let w = z - self.c;
        self.c + sqrt_upper(w * w + 4.0 * self.dt, w.re)
    }

    /// The inverse map, sending `[c - 2 sqrt(dt), c + 2 sqrt(dt)]` onto the slit.
    #[inline]
    pub fn inverse(&self, w: Point) -> Point {
        let v = w - self.c;
        self.c + sqrt_upper(v * v - 4.0 * self.dt, v.re)
    }

    /// Image of the slit tip, in the coordinates before this step.
    pub fn tip(&self) -> Point {
        pt(self.c, 2.0 * self.dt.sqrt())
    }
}

/// The mapping-out function `g_t` as a composition of slit steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MappingOut {
    steps: Vec<SlitStep>,
    capacity: f64,
}

impl MappingOut {
    pub fn new(steps: Vec<SlitStep>) -> Self {
        let capacity = steps.iter().map(|s| s.dt).sum();
        MappingOut { steps, capacity }
    }

    pub fn steps(&self) -> &[SlitStep] {
        &self.steps
    }

    /// Total half-plane capacity (the sum of the step durations).
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Appends the steps of `other` (mapping out `other`'s hull after this one).
    pub fn then(&self, other: &MappingOut) -> MappingOut {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        MappingOut::new(steps)
    }

    /// `g_t(z)` for `z` in the closed upper half plane off the hull.
    pub fn eval(&self, z: Point) -> Point {
        self.steps.iter().fold(z, |z, s| s.forward(z))
    }

    /// `g_t^{-1}(w)` for `w` in the closed upper half plane.
    pub fn eval_inverse(&self, w: Point) -> Point {
        self.steps.iter().rev().fold(w, |w, s| s.inverse(w))
    }

    /// Capacity read off the expansion `g(z) = z + 2t/z + O(1/z^2)`.
    ///
    /// `f(R) = Re(z (g(z) - z) / 2)` at `z = iR` equals `t` up to terms in
    /// `1/R` and `1/R^2`; two Richardson steps over `R, 2R, 4R` remove both.
    pub fn capacity_from_expansion(&self) -> f64 {
        let size = self
            .steps
            .iter()
            .map(|s| s.c.abs() + 2.0 * s.dt.sqrt())
            .fold(self.capacity.sqrt(), f64::max);
        let r = 256.0 * (1.0 + size);
        let f = |r: f64| {
            let z = pt(0.0, r);
            (z * (self.eval(z) - z) / 2.0).re
        };
        let (f1, f2, f4) = (f(r), f(2.0 * r), f(4.0 * r));
        let a = 2.0 * f2 - f1;
        let b = 2.0 * f4 - f2;
        (4.0 * b - a) / 3.0
    }
}

/// A grown hull: its trace, the driving function that produced it, and the
/// mapping-out function at the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct HullTrace {
    /// Tip positions, parametrized by `s / T` with `s` the capacity time.
    pub trace: ParamCurve,
    /// Driving values at the same capacity times as the trace samples.
    pub driving: DrivingFunction,
    pub mapping: MappingOut,
}

impl HullTrace {
    /// Capacity times of the trace samples.
    pub fn capacity_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.driving.samples().iter().map(|s| s.0)
    }

    pub fn horizon(&self) -> f64 {
        self.driving.horizon()
    }
}

/// Tips of the hull after each step: `G_1^{-1} ... G_k^{-1}(tip of step k)`.
fn tips_from_steps(start: f64, steps: &[SlitStep]) -> Result<Vec<Point>> {
    let mut tips = Vec::with_capacity(steps.len() + 1);
    tips.push(pt(start, 0.0));
    for k in 0..steps.len() {
        let mut z = steps[k].tip();
        for s in steps[..k].iter().rev() {
            z = s.inverse(z);
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NumericFailure {
                step: k + 1,
                detail: "trace tip is not finite".into(),
            });
        }
        tips.push(z);
    }
    Ok(tips)
}

/// Solves the Loewner equation for the driving function `w` on its whole
/// horizon with steps of length `dt`. On each step the driving value is
/// frozen at the step's right end point.
pub fn forward_evolve(w: &DrivingFunction, dt: f64) -> Result<HullTrace> {
    if !(dt > 0.0) || !dt.is_finite() {
        bail!(InvalidInput, "dt must be positive, got {dt}");
    }
    let horizon = w.horizon();
    let n = step_count(horizon, dt);
    let mut steps = Vec::with_capacity(n);
    let mut times = Vec::with_capacity(n + 1);
    times.push(0.0);
    let mut prev = 0.0;
    for k in 1..=n {
        let t = if k == n { horizon } else { k as f64 * dt };
        steps.push(SlitStep { c: w.eval(t), dt: t - prev });
        times.push(t);
        prev = t;
    }
    let w0 = w.eval(0.0);
    let tips = tips_from_steps(w0, &steps)?;
    let trace = if n == 0 {
        ParamCurve::new(alloc::vec![(0.0, tips[0])])?
    } else {
        ParamCurve::new(
            times
                .iter()
                .zip(&tips)
                .enumerate()
                .map(|(k, (&t, &p))| (if k == n { 1.0 } else { t / horizon }, p))
                .collect(),
        )?
    };
    let mut dsamples = Vec::with_capacity(n + 1);
    dsamples.push((0.0, w0));
    dsamples.extend(steps.iter().zip(&times[1..]).map(|(s, &t)| (t, s.c)));
    Ok(HullTrace { trace, driving: DrivingFunction::new(dsamples)?, mapping: MappingOut::new(steps) })
}

/// `B` sampled on the grid of step `dt` up to `horizon` with exact Gaussian
/// increments, from a ChaCha stream seeded by `seed`.
pub fn brownian_path(horizon: f64, dt: f64, seed: u64) -> Result<DrivingFunction> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        bail!(InvalidInput, "need dt > 0 and T >= 0");
    }
    let n = step_count(horizon, dt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Vec::with_capacity(n + 1);
    s.push((0.0, 0.0));
    let mut b = 0.0;
    let mut prev = 0.0;
    for k in 1..=n {
        let t = if k == n { horizon } else { k as f64 * dt };
        let g: f64 = StandardNormal.sample(&mut rng);
        b += g * (t - prev).sqrt();
        s.push((t, b));
        prev = t;
    }
    DrivingFunction::new(s)
}

/// `sqrt(kappa) B` for the Brownian path of [`brownian_path`].
pub fn sle_driving(kappa: f64, horizon: f64, dt: f64, seed: u64) -> Result<DrivingFunction> {
    if !(kappa >= 0.0) {
        bail!(InvalidInput, "kappa must be non-negative");
    }
    scale_driving(&brownian_path(horizon, dt, seed)?, kappa.sqrt())
}

pub fn scale_driving(w: &DrivingFunction, factor: f64) -> Result<DrivingFunction> {
    DrivingFunction::new(w.samples().iter().map(|&(t, x)| (t, factor * x)).collect())
}

/// A discretized SLE(kappa) hull up to capacity `horizon`.
pub fn sample_sle(kappa: f64, horizon: f64, dt: f64, seed: u64) -> Result<HullTrace> {
    forward_evolve(&sle_driving(kappa, horizon, dt, seed)?, dt)
}

fn subsample(points: &[Point], npts: usize) -> Vec<Point> {
    let m = points.len();
    if npts >= m || npts < 2 {
        return points.to_vec();
    }
    let mut out: Vec<Point> = Vec::with_capacity(npts);
    let mut last = usize::MAX;
    for k in 0..npts {
        let idx = ((k as f64) * (m - 1) as f64 / (npts - 1) as f64).round() as usize;
        if idx != last {
            out.push(points[idx]);
            last = idx;
        }
    }
    out
}

/// Unzips a trace: every point, once the earlier part of the curve has been
/// mapped out, sits at `c + i y` and is removed by the slit step
/// `(c, y^2 / 4)`. Returns the starting point on the real line and the steps.
fn unzip(points: &[Point]) -> Result<(f64, Vec<SlitStep>)> {
    let p0 = points[0];
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    if p0.im.abs() > 1e-12 * scale {
        bail!(InvalidInput, "trace must start on the real line (start {p0})");
    }
    let start = p0.re;
    let mut rest: Vec<Point> = points[1..].to_vec();
    let mut steps = Vec::with_capacity(rest.len());
    for k in 0..rest.len() {
        let z = rest[k];
        if !z.re.is_finite() || !z.im.is_finite() {
            bail!(InvalidInput, "trace point {} is not finite", k + 1);
        }
        if !(z.im > 0.0) {
            bail!(NotSimple, "trace point {} lands on the real line after unzipping", k + 1);
        }
        let step = SlitStep { c: z.re, dt: 0.25 * z.im * z.im };
        for p in rest[k + 1..].iter_mut() {
            *p = step.forward(*p);
        }
        steps.push(step);
    }
    Ok((start, steps))
}

/// Driving function of a trace together with how well it reproduces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub driving: DrivingFunction,
    /// Largest distance between an input sample and the re-evolved trace.
    pub residual: f64,
}

fn driving_from_steps(start: f64, steps: &[SlitStep]) -> Result<DrivingFunction> {
    let mut s = Vec::with_capacity(steps.len() + 1);
    s.push((0.0, start));
    let mut t = 0.0;
    for (k, st) in steps.iter().enumerate() {
        t += st.dt;
        if t <= s[s.len() - 1].0 {
            bail!(NotSimple, "zero capacity increment at trace point {}", k + 1);
        }
        s.push((t, st.c));
    }
    DrivingFunction::new(s)
}

/// Driving function of a simple trace in the upper half plane, in capacity
/// time. `npts` caps the number of trace samples used (evenly spaced in
/// index); pass `usize::MAX` to use them all.
pub fn extract_driving(trace: &ParamCurve, npts: usize) -> Result<DrivingFunction> {
    let pts = subsample(&trace.points().collect::<Vec<_>>(), npts);
    if pts.len() < 3 {
        bail!(InvalidInput, "need at least three trace samples, got {}", pts.len());
    }
    let (start, steps) = unzip(&pts)?;
    driving_from_steps(start, &steps)
}

/// [`extract_driving`] plus the re-evolution residual.
pub fn extract_driving_checked(trace: &ParamCurve, npts: usize) -> Result<Extraction> {
    let pts = subsample(&trace.points().collect::<Vec<_>>(), npts);
    if pts.len() < 3 {
        bail!(InvalidInput, "need at least three trace samples, got {}", pts.len());
    }
    let (start, steps) = unzip(&pts)?;
    let tips = tips_from_steps(start, &steps)?;
    let residual = tips.iter().zip(&pts).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(Extraction { driving: driving_from_steps(start, &steps)?, residual })
}

/// Half-plane capacity of the hull generated by a trace attached to the
/// real line. The trace is treated as the polyline through its samples with
/// each segment replaced by a hyperbolic geodesic in the current uniformized
/// picture, which is exact for vertical segments.
pub fn hcap(trace: &ParamCurve) -> Result<f64> {
    let pts: Vec<Point> = trace.points().collect();
    if let Some(p) = pts.iter().find(|p| !p.re.is_finite() || !p.im.is_finite()) {
        bail!(InvalidInput, "unbounded trace (sample {p})");
    }
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let (_, steps) = unzip(&pts)?;
    Ok(steps.iter().map(|s| s.dt).sum())
}

/// Moves a hull trace to the disc with the clock `t = s / (1 + s)`; the last
/// sample (capacity `T`) is placed at `t = 1`.
pub fn trace_in_disc(hull: &HullTrace) -> Result<ParamCurve> {
    let caps: Vec<f64> = hull.capacity_times().collect();
    let pts: Vec<Point> = hull.trace.points().collect();
    let m = pts.len();
    let mut samples = Vec::with_capacity(m);
    for (k, (&s, &p)) in caps.iter().zip(&pts).enumerate() {
        let t = if k == m - 1 && m > 1 { 1.0 } else { s / (1.0 + s) };
        samples.push((t, mobius_h_to_d(p)?));
    }
    ParamCurve::new(samples)
}

/// Reparametrizes a curve in the closed disc (starting on the circle, in
/// practice at -1) so that the hull of its first part, sent to the half
/// plane, has capacity `t / (1 - t)`. A final sample at the pole `1` is kept
/// at `t = 1`; otherwise the last sample is also placed at `t = 1`.
pub fn reparametrize_by_capacity(c: &ParamCurve) -> Result<ParamCurve> {
    let pts: Vec<Point> = c.points().collect();
    let m = pts.len();
    if m < 2 {
        return Ok(c.clone());
    }
    let ends_at_pole = (pts[m - 1] - 1.0).norm() < 1e-14;
    let usable = if ends_at_pole { m - 1 } else { m };
    let mut hpts = Vec::with_capacity(usable);
    for p in &pts[..usable] {
        hpts.push(mobius_d_to_h(*p)?);
    }
    let (_, steps) = unzip(&hpts).map_err(|e| match e {
        Error::NotSimple(msg) => Error::InvalidInput(alloc::format!("capacity non-monotone: {msg}")),
        other => other,
    })?;
    let mut samples = Vec::with_capacity(m);
    samples.push((0.0, pts[0]));
    let mut cap = 0.0;
    for (k, st) in steps.iter().enumerate() {
        cap += st.dt;
        let t = if k + 2 == m { 1.0 } else { cap / (1.0 + cap) };
        if t <= samples[samples.len() - 1].0 {
            bail!(InvalidInput, "capacity non-monotone at sample {}", k + 1);
        }
        samples.push((t, pts[k + 1]));
    }
    if ends_at_pole {
        samples.push((1.0, pts[m - 1]));
    }
    ParamCurve::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn mobius_values() {
        assert!(close(mobius_d_to_h(pt(0.0, 0.0)).unwrap(), I, 1e-15));
        assert!(close(mobius_d_to_h(pt(-1.0, 0.0)).unwrap(), pt(0.0, 0.0), 1e-15));
        assert!(close(mobius_h_to_d(I).unwrap(), pt(0.0, 0.0), 1e-15));
        assert!(matches!(mobius_d_to_h(pt(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(mobius_h_to_d(-I), Err(Error::Pole(_))));
        for i in -4..=4 {
            for j in -4..=4 {
                let z = pt(i as f64 * 0.2, j as f64 * 0.2);
                if z.norm() < 1.0 {
                    let back = mobius_h_to_d(mobius_d_to_h(z).unwrap()).unwrap();
                    assert!(close(back, z, 1e-13));
                }
            }
        }
    }

    #[test]
    fn slit_step_round_trip() {
        let s = SlitStep { c: 0.3, dt: 0.01 };
        for z in [pt(0.1, 0.5), pt(-2.0, 0.01), pt(5.0, 3.0), pt(0.31, 1e-3)] {
            assert!(close(s.inverse(s.forward(z)), z, 1e-12));
        }
        // The tip goes to c, the two sides of the slit to either side of c.
        assert!(close(s.forward(s.tip()), pt(0.3, 0.0), 1e-7));
        assert!(s.forward(pt(0.3 - 1e-12, 0.1)).re < 0.3);
        assert!(s.forward(pt(0.3 + 1e-12, 0.1)).re > 0.3);
    }

    #[test]
    fn zero_driving_gives_vertical_slit() {
        let w = DrivingFunction::from_fn(1.0, 1e-3, |_| 0.0).unwrap();
        let hull = forward_evolve(&w, 1e-3).unwrap();
        for (&(t, p), s) in hull.trace.samples().iter().zip(hull.capacity_times()) {
            assert!(close(p, pt(0.0, 2.0 * s.sqrt()), 1e-9), "t={t} p={p}");
        }
        // g_1(z) = sqrt(z^2 + 4) with the branch in the upper half plane.
        for z in [pt(0.5, 0.5), pt(-1.0, 2.0), pt(3.0, 0.1), pt(0.0, 3.0)] {
            let want = sqrt_upper(z * z + 4.0, z.re);
            assert!(close(hull.mapping.eval(z), want, 1e-9));
        }
        assert!(hull.mapping.eval(pt(0.0, 2.0)).norm() < 1e-3);
        let cap = hull.mapping.capacity_from_expansion();
        assert!((cap - 1.0).abs() < 1e-6, "{cap}");
    }

    #[test]
    fn constant_driving_translates() {
        let c = -0.7;
        let w = DrivingFunction::from_fn(0.5, 1e-3, |_| c).unwrap();
        let hull = forward_evolve(&w, 1e-3).unwrap();
        for (&(_, p), s) in hull.trace.samples().iter().zip(hull.capacity_times()) {
            assert!(close(p, pt(c, 2.0 * s.sqrt()), 1e-9));
        }
    }

    #[test]
    fn capacity_is_additive_over_time_splits() {
        let w = sle_driving(3.0, 0.4, 1e-3, 9).unwrap();
        let full = forward_evolve(&w, 1e-3).unwrap().mapping;
        let head: Vec<_> = full.steps()[..150].to_vec();
        let tail: Vec<_> = full.steps()[150..].to_vec();
        let joined = MappingOut::new(head).then(&MappingOut::new(tail));
        for z in [pt(0.2, 0.4), pt(-1.0, 0.05), pt(2.0, 2.0)] {
            assert!(close(joined.eval(z), full.eval(z), 1e-12));
        }
        assert!((joined.capacity() - full.capacity()).abs() < 1e-14);
        assert!((full.capacity_from_expansion() - 0.4).abs() < 1e-5);
    }

    #[test]
    fn extraction_of_vertical_slit() {
        let c = 0.25;
        let pts: Vec<Point> = (0..=200).map(|k| pt(c, 2.0 * (k as f64 / 200.0).sqrt())).collect();
        let trace = ParamCurve::uniform(&pts).unwrap();
        let ex = extract_driving_checked(&trace, usize::MAX).unwrap();
        for &(_, w) in ex.driving.samples() {
            assert!((w - c).abs() < 1e-12);
        }
        assert!((ex.driving.horizon() - 1.0).abs() < 1e-12);
        assert!(ex.residual < 1e-10);
    }

    #[test]
    fn extraction_round_trip_for_sle() {
        let hull = sample_sle(2.0, 0.2, 1e-3, 4).unwrap();
        let w2 = extract_driving(&hull.trace, usize::MAX).unwrap();
        let d = crate::curves::function_metric(&hull.driving, &w2);
        assert!(d < 1e-8, "{d}");
        // A coarse extraction still roughly tracks the driving function.
        let w3 = extract_driving(&hull.trace, 50).unwrap();
        assert!(crate::curves::function_metric(&hull.driving, &w3) < 0.25);
    }

    #[test]
    fn extraction_rejects_bad_traces() {
        let two = ParamCurve::uniform(&[pt(0.0, 0.0), pt(0.0, 1.0)]).unwrap();
        assert!(extract_driving(&two, usize::MAX).is_err());
        // Comes back down to the real line.
        let bad = ParamCurve::uniform(&[pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0), pt(1.0, 0.0)]).unwrap();
        assert!(matches!(extract_driving(&bad, usize::MAX), Err(Error::NotSimple(_))));
        let off = ParamCurve::uniform(&[pt(0.0, 0.5), pt(0.0, 1.0), pt(0.0, 2.0)]).unwrap();
        assert!(matches!(extract_driving(&off, usize::MAX), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn hcap_examples() {
        let point = ParamCurve::new(alloc::vec![(0.0, pt(0.4, 0.0))]).unwrap();
        assert_eq!(hcap(&point).unwrap(), 0.0);
        let h = 1.7;
        let slit = ParamCurve::uniform(&[pt(0.0, 0.0), pt(0.0, 0.5), pt(0.0, h)]).unwrap();
        assert!((hcap(&slit).unwrap() - h * h / 4.0).abs() < 1e-12);
        let inf = ParamCurve::uniform(&[pt(0.0, 0.0), pt(0.0, f64::INFINITY)]);
        assert!(inf.is_err() || hcap(&inf.unwrap()).is_err());
    }

    #[test]
    fn sle_zero_kappa_is_slit_and_seeded() {
        let a = sample_sle(0.0, 0.3, 1e-3, 1).unwrap();
        for (p, s) in a.trace.points().zip(a.capacity_times()) {
            assert!(close(p, pt(0.0, 2.0 * s.sqrt()), 1e-9));
        }
        let b1 = sample_sle(2.5, 0.1, 1e-3, 77).unwrap();
        let b2 = sample_sle(2.5, 0.1, 1e-3, 77).unwrap();
        assert_eq!(b1, b2);
        let b3 = sample_sle(2.5, 0.1, 1e-3, 78).unwrap();
        assert_ne!(b1.trace, b3.trace);
    }

    #[test]
    fn brownian_variance() {
        let kappa = 2.0;
        let t = 1.0;
        let n = 10_000;
        let vals: Vec<f64> = (0..n).map(|s| sle_driving(kappa, t, 0.05, s).unwrap().eval(t)).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        let var = sq.iter().sum::<f64>() / n as f64;
        let var_of_sq = sq.iter().map(|s| (s - var) * (s - var)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var_of_sq / n as f64).sqrt();
        assert!((var - kappa * t).abs() <= 3.0 * se, "var {var} se {se}");
        assert!(mean.abs() < 4.0 * (kappa * t / n as f64).sqrt());
    }

    #[test]
    fn disc_trace_of_zero_driving() {
        let hull = sample_sle(0.0, 2.0, 1e-2, 0).unwrap();
        let disc = trace_in_disc(&hull).unwrap();
        assert_eq!(disc.start(), pt(-1.0, 0.0));
        let caps: Vec<f64> = hull.capacity_times().collect();
        for (k, &(t, p)) in disc.samples().iter().enumerate() {
            let s = caps[k];
            let r = 2.0 * s.sqrt();
            assert!(close(p, pt((r - 1.0) / (r + 1.0), 0.0), 1e-9));
            if k + 1 < caps.len() {
                assert!((t - s / (1.0 + s)).abs() < 1e-15);
            } else {
                assert_eq!(t, 1.0);
            }
        }
    }

    #[test]
    fn capacity_parametrization_of_diameter() {
        let hull = sample_sle(0.0, 3.0, 1e-2, 0).unwrap();
        let disc = trace_in_disc(&hull).unwrap();
        let re = reparametrize_by_capacity(&disc).unwrap();
        // Unchanged: the disc trace is already capacity parametrized.
        for (a, b) in re.samples().iter().zip(disc.samples()) {
            assert!((a.0 - b.0).abs() < 1e-9 && a.1 == b.1);
        }
        // hcap of the image of [0, t] is t / (1 - t), checked independently
        // through the closed-form slit capacity (height^2 / 4).
        for &(t, p) in re.samples().iter().take(re.len() - 1).skip(1) {
            let h = mobius_d_to_h(p).unwrap().im;
            assert!((h * h / 4.0 - t / (1.0 - t)).abs() < 1e-9);
        }
        assert_eq!(re.samples()[0].0, 0.0);
    }

    #[test]
    fn reparametrize_rejects_backtracking() {
        let c = ParamCurve::uniform(&[pt(-1.0, 0.0), pt(-0.5, 0.0), pt(-0.5, 0.0), pt(0.0, 0.0)]).unwrap();
        assert!(matches!(reparametrize_by_capacity(&c), Err(Error::InvalidInput(_))));
    }

    fn arb_trace() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-0.3f64..0.3, 0.05f64..0.4), 2..12).prop_map(|steps| {
            let mut p = pt(0.0, 0.0);
            let mut v = alloc::vec![p];
            for (dx, dy) in steps {
                p += pt(dx, dy);
                v.push(p);
            }
            v
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hcap_scales_quadratically(pts in arb_trace(), lambda in 0.2f64..5.0) {
            let a = hcap(&ParamCurve::uniform(&pts).unwrap()).unwrap();
            let scaled: Vec<Point> = pts.iter().map(|p| p * lambda).collect();
            let b = hcap(&ParamCurve::uniform(&scaled).unwrap()).unwrap();
            prop_assert!((b - lambda * lambda * a).abs() <= 1e-10 * b.max(1.0));
        }

        #[test]
        fn hcap_translation_invariant_and_extraction_covariant(pts in arb_trace(), c in -2.0f64..2.0) {
            let tr = ParamCurve::uniform(&pts).unwrap();
            let shifted: Vec<Point> = pts.iter().map(|p| p + c).collect();
            let tr2 = ParamCurve::uniform(&shifted).unwrap();
            let (a, b) = (hcap(&tr).unwrap(), hcap(&tr2).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
            let w = extract_driving(&tr, usize::MAX).unwrap();
            let w2 = extract_driving(&tr2, usize::MAX).unwrap();
            for (x, y) in w.samples().iter().zip(w2.samples()) {
                prop_assert!((y.1 - x.1 - c).abs() < 1e-9);
            }
        }

        #[test]
        fn evolution_translation_covariant(seed in 0u64..1000, c in -2.0f64..2.0) {
            let w = sle_driving(2.0, 0.05, 2e-3, seed).unwrap();
            let ws = DrivingFunction::new(w.samples().iter().map(|&(t, x)| (t, x + c)).collect()).unwrap();
            let a = forward_evolve(&w, 2e-3).unwrap();
            let b = forward_evolve(&ws, 2e-3).unwrap();
            for (p, q) in a.trace.points().zip(b.trace.points()) {
                prop_assert!((q - p - c).norm() < 1e-9);
            }
        }

        #[test]
        fn tips_stay_in_closed_upper_half_plane(seed in 0u64..1000) {
            let h = sample_sle(3.0, 0.05, 1e-3, seed).unwrap();
            for p in h.trace.points().skip(1) {
                prop_assert!(p.im > 0.0);
            }
        }
    }
}
