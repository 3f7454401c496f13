//! The three experiments: projection commutation on lattice
//! approximations, the twist-map warning example, and SLE stability under
//! a change of kappa on a shared Brownian path.

use rayon::prelude::*;

use conflimit_core::conformal::{boundary_normalized, radial_projection, two_point_normalization, uniformize, ConformalMap, Mobius, Uniformizer};
use conflimit_core::curves::{frechet_distance, function_metric, CurveClass, DrivingFunction, ParamCurve};
use conflimit_core::lattice::{approximate_domain_marked, LatticeDomain};
use conflimit_core::loewner::{brownian_path, extract_driving, forward_evolve, mobius_d_to_h, scale_driving, trace_in_disc};
use conflimit_core::stochastic::{derive_seed, sample_lerw, MCEstimate};
use conflimit_core::{Point, Result};

use crate::config::{DomainSpec, ExperimentConfig, Model};
use crate::error::{CoreContext, LabResult};
use crate::report::{ExperimentReport, Plot, Table, Value};

/// Accuracy of every Fréchet distance computed here.
pub const FRECHET_TOL: f64 = 1e-5;
/// Curves are thinned to at most this many vertices before a Fréchet
/// distance is taken.
pub const TRACE_POINTS: usize = 400;

/// Evenly spaced (in index) subsequence keeping both end points.
pub fn thin<T: Copy>(v: &[T], max: usize) -> Vec<T> {
    let m = v.len();
    if m <= max || max < 2 {
        return v.to_vec();
    }
    (0..max).map(|k| v[k * (m - 1) / (max - 1)]).collect()
}

/// Nearest-rank quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// One lattice approximation with its two uniformizing maps.
pub struct Level {
    pub dom: LatticeDomain,
    /// Normalized at the base point.
    pub phi: ConformalMap,
    /// Normalized so that the marked edges go to -1 and 1.
    pub psi: ConformalMap,
    /// `psi = to_psi o phi`.
    pub to_psi: Mobius,
    pub to_phi: Mobius,
}

impl Level {
    pub fn build(spec: &DomainSpec, n: u32, tol: f64) -> Result<Level> {
        let dom = approximate_domain_marked(&spec.polygon, spec.u, n, spec.a, spec.b)?;
        let phi = uniformize(&dom, tol)?;
        let psi = boundary_normalized(&phi, dom.a(), dom.b())?;
        let alpha = phi.to_disc(dom.a().midpoint(n))?;
        let beta = phi.to_disc(dom.b().midpoint(n))?;
        let to_psi = two_point_normalization(alpha, beta)?;
        Ok(Level { dom, phi, psi, to_phi: to_psi.inverse(), to_psi })
    }
}

/// A curve in the domain together with its image in the disc under the
/// Riemann map.
struct Mapped {
    domain: Vec<Point>,
    disc: Vec<Point>,
}

impl Mapped {
    /// From disc points in the two-point normalization: the domain curve is
    /// `psi^{-1}`, evaluated as `phi^{-1} o to_phi`, and the disc picture is
    /// recomputed from the domain points through the forward map. The start
    /// keeps its exact image.
    fn from_psi_disc(level: &Level, w: &[Point]) -> Result<Mapped> {
        let start = level.to_phi.apply(w[0])?;
        let domain: Vec<Point> = w.iter().map(|&p| level.phi.from_disc(level.to_phi.apply(p)?)).collect::<Result<_>>()?;
        let mut disc = Vec::with_capacity(domain.len());
        disc.push(start);
        for &z in &domain[1..] {
            disc.push(level.phi.to_disc(z)?);
        }
        Ok(Mapped { domain, disc })
    }

    fn from_domain(level: &Level, z: &[Point]) -> Result<Mapped> {
        let disc = z.iter().map(|&p| level.phi.to_disc(p)).collect::<Result<_>>()?;
        Ok(Mapped { domain: z.to_vec(), disc })
    }

    /// `d(gamma, P_eps(gamma))` with the projection taken through the
    /// Riemann map, on at most [`TRACE_POINTS`] vertices of the curve.
    fn projection_distance(&self, level: &Level, eps: f64) -> Result<f64> {
        let idx: Vec<usize> = thin(&(0..self.domain.len()).collect::<Vec<_>>(), TRACE_POINTS);
        let mut curve = Vec::with_capacity(idx.len());
        let mut proj = Vec::with_capacity(idx.len());
        for k in idx {
            let (z, v) = (self.domain[k], self.disc[k]);
            let p = radial_projection(v, eps)?;
            curve.push(z);
            proj.push(if p == v { z } else { level.phi.from_disc(p)? });
        }
        frechet_distance(&CurveClass::new(curve)?, &CurveClass::new(proj)?, FRECHET_TOL)
    }

    /// Driving function of the curve seen from the two-point normalized
    /// disc, cut where it first comes within `0.05` of the target `1`.
    fn driving(&self, level: &Level) -> Result<DrivingFunction> {
        let mut h = vec![Point::new(0.0, 0.0)];
        for &v in &self.disc[1..] {
            let w = level.to_psi.apply(v)?;
            if (w - 1.0).norm() < 0.05 {
                break;
            }
            h.push(mobius_d_to_h(w)?);
        }
        extract_driving(&ParamCurve::uniform(&h)?, usize::MAX)
    }
}

/// Statistics of one `(n, eps)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationRow {
    pub n: u32,
    pub eps: f64,
    pub seed: u64,
    pub samples: usize,
    pub ell: f64,
    /// Fraction of samples with `d(gamma, P_eps(gamma)) > ell`.
    pub exceedance: MCEstimate,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub max: f64,
    /// Mean driving-function distance to the input driving (SLE only).
    pub driving_vs_input: Option<f64>,
    /// Mean driving-function distance to the same sample at the previous
    /// resolution.
    pub driving_vs_prev: Option<f64>,
    /// Samples whose driving function could be extracted.
    pub driving_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    pub rows: Vec<CommutationRow>,
    /// `(n, eps, sample index, sample seed, distance)`.
    pub distances: Vec<(u32, f64, usize, u64, f64)>,
}

struct SampleOutcome {
    distances: Vec<f64>,
    driving: Option<DrivingFunction>,
    vs_input: Option<f64>,
}

fn commutation_sample(cfg: &ExperimentConfig, level: &Level, seed: u64) -> Result<SampleOutcome> {
    let (mapped, input) = match cfg.model {
        Model::Sle { kappa } => {
            let w = scale_driving(&brownian_path(cfg.horizon, cfg.dt, seed)?, kappa.sqrt())?;
            let disc: Vec<Point> = trace_in_disc(&forward_evolve(&w, cfg.dt)?)?.points().collect();
            (Mapped::from_psi_disc(level, &disc)?, Some(w))
        }
        Model::Lerw => {
            let path = sample_lerw(&level.dom, level.dom.a(), level.dom.b(), seed)?;
            (Mapped::from_domain(level, path.vertices())?, None)
        }
    };
    let distances = cfg.eps_values.iter().map(|&e| mapped.projection_distance(level, e)).collect::<Result<_>>()?;
    let driving = mapped.driving(level).ok();
    let vs_input = match (&driving, &input) {
        (Some(d), Some(w)) => Some(function_metric(d, w)),
        _ => None,
    };
    Ok(SampleOutcome { distances, driving, vs_input })
}

fn mean_of(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, k) = v.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| s / k as f64)
}

/// For each resolution and each `eps`, the law of the distance between a
/// sampled curve and its conformal radial projection.
pub fn run_commutation_experiment(cfg: &ExperimentConfig) -> LabResult<CommutationReport> {
    let seeds: Vec<u64> = (0..cfg.samples as u64).map(|k| derive_seed(cfg.seed, k)).collect();
    let mut rows = Vec::new();
    let mut distances = Vec::new();
    let mut prev: Option<Vec<Option<DrivingFunction>>> = None;
    for &n in &cfg.n_values {
        let level = Level::build(&cfg.domain, n, cfg.tol).context(|| format!("n = {n}: building the lattice maps"))?;
        let outcomes: Vec<SampleOutcome> = seeds
            .par_iter()
            .enumerate()
            .map(|(k, &s)| commutation_sample(cfg, &level, s).context(|| format!("n = {n}, sample {k} (seed {s})")))
            .collect::<LabResult<_>>()?;
        let drivings: Vec<Option<DrivingFunction>> = outcomes.iter().map(|o| o.driving.clone()).collect();
        let driving_vs_prev = prev.as_ref().and_then(|p| {
            mean_of(p.iter().zip(&drivings).filter_map(|(a, b)| Some(function_metric(a.as_ref()?, b.as_ref()?))))
        });
        let driving_vs_input = mean_of(outcomes.iter().filter_map(|o| o.vs_input));
        let driving_samples = drivings.iter().filter(|d| d.is_some()).count();
        for (j, &eps) in cfg.eps_values.iter().enumerate() {
            let d: Vec<f64> = outcomes.iter().map(|o| o.distances[j]).collect();
            for (k, &v) in d.iter().enumerate() {
                distances.push((n, eps, k, seeds[k], v));
            }
            let hits = d.iter().filter(|&&v| v > cfg.ell).count();
            let s = sorted(&d);
            rows.push(CommutationRow {
                n,
                eps,
                seed: cfg.seed,
                samples: d.len(),
                ell: cfg.ell,
                exceedance: MCEstimate::from_hits(hits, d.len(), cfg.seed)?,
                mean: mean_of(d.iter().copied()).unwrap_or(f64::NAN),
                q50: quantile(&s, 0.5),
                q90: quantile(&s, 0.9),
                max: s.last().copied().unwrap_or(f64::NAN),
                driving_vs_input,
                driving_vs_prev,
                driving_samples,
            });
        }
        prev = Some(drivings);
    }
    Ok(CommutationReport { rows, distances })
}

impl CommutationReport {
    pub fn rows_for(&self, n: u32) -> impl Iterator<Item = &CommutationRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut t = Table::new(
            "commutation",
            &[
                "n", "eps", "seed", "samples", "ell", "exceedance", "exceedance_stderr", "distance_mean", "distance_q50",
                "distance_q90", "distance_max", "driving_metric_vs_input", "driving_metric_vs_prev_n", "driving_samples",
            ],
        );
        for r in &self.rows {
            t.push(vec![
                r.n.into(),
                r.eps.into(),
                r.seed.into(),
                r.samples.into(),
                r.ell.into(),
                r.exceedance.mean.into(),
                r.exceedance.stderr.into(),
                r.mean.into(),
                r.q50.into(),
                r.q90.into(),
                r.max.into(),
                r.driving_vs_input.into(),
                r.driving_vs_prev.into(),
                r.driving_samples.into(),
            ]);
        }
        let mut d = Table::new("commutation_samples", &["n", "eps", "sample", "seed", "distance"]);
        for &(n, eps, k, s, v) in &self.distances {
            d.push(vec![n.into(), eps.into(), k.into(), s.into(), v.into()]);
        }
        let mut ns: Vec<u32> = self.rows.iter().map(|r| r.n).collect();
        ns.dedup();
        let series = ns
            .iter()
            .map(|&n| (format!("n = {n}"), self.rows_for(n).map(|r| (r.eps, r.exceedance.mean)).collect()))
            .collect();
        let plot = Plot {
            name: "commutation".into(),
            title: "Exceedance of d(gamma, P_eps gamma) over ell".into(),
            x_label: "eps".into(),
            y_label: "exceedance fraction".into(),
            series,
        };
        let summary = self
            .rows
            .iter()
            .map(|r| (format!("exceedance n={} eps={}", r.n, r.eps), format!("{} +- {}", r.exceedance.mean, r.exceedance.stderr)))
            .collect();
        ExperimentReport { experiment: "commute".into(), tables: vec![t, d], plots: vec![plot], summary }
    }
}

/// Twist angle at radius `r`: zero up to `1 - 1/n`, rising linearly to
/// `alpha` at `1 - 1/(2n)` and falling back to zero at `1`.
pub fn twist_angle(r: f64, n: u32, alpha: f64) -> f64 {
    let h = 1.0 / n as f64;
    let (r0, r1) = (1.0 - h, 1.0 - 0.5 * h);
    if r <= r0 || r >= 1.0 {
        0.0
    } else if r <= r1 {
        alpha * (r - r0) / (r1 - r0)
    } else {
        alpha * (1.0 - r) / (1.0 - r1)
    }
}

/// The homeomorphism `T_n(z) = z e^{i beta(|z|)}` of the closed disc.
pub fn twist(z: Point, n: u32, alpha: f64) -> Point {
    let b = twist_angle(z.norm(), n, alpha);
    if b == 0.0 {
        z
    } else {
        z * Point::from_polar(1.0, b)
    }
}

pub fn twist_inverse(z: Point, n: u32, alpha: f64) -> Point {
    let b = twist_angle(z.norm(), n, alpha);
    if b == 0.0 {
        z
    } else {
        z * Point::from_polar(1.0, -b)
    }
}

/// Samples of the diameter `[-1, 1]`: its end points, the two points at
/// radius `1 - 1/n`, and `per_end` points across each twisting band.
pub fn diameter_samples(n: u32, per_end: usize) -> Vec<f64> {
    let r0 = 1.0 - 1.0 / n as f64;
    let band: Vec<f64> = (0..=per_end).map(|k| r0 + (1.0 - r0) * k as f64 / per_end as f64).collect();
    let mut xs: Vec<f64> = band.iter().rev().map(|r| -r).collect();
    xs.extend(band.iter().copied());
    xs
}

/// `T_n([-1, 1])` as a polyline.
pub fn twisted_diameter(n: u32, alpha: f64, per_end: usize) -> Vec<Point> {
    diameter_samples(n, per_end).into_iter().map(|x| twist(Point::new(x, 0.0), n, alpha)).collect()
}

/// The limit of `T_n([-1, 1])` in the curve metric: an out-and-back arc of
/// angle `alpha` on the unit circle at each end of the diameter.
pub fn twisted_limit(alpha: f64, per_arc: usize) -> Vec<Point> {
    let arc = |centre: f64| -> Vec<Point> {
        let up = (0..=per_arc).map(move |k| Point::from_polar(1.0, alpha * k as f64 / per_arc as f64) * centre);
        let down = (0..per_arc).rev().map(move |k| Point::from_polar(1.0, alpha * k as f64 / per_arc as f64) * centre);
        up.chain(down).collect()
    };
    let mut v = arc(-1.0);
    v.extend(arc(1.0));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarningRow {
    pub n: u32,
    pub alpha: f64,
    /// `d(gamma^(n), gamma_D)`.
    pub gap: f64,
    /// `d(gamma^(n), gamma)` for the limit curve `gamma`.
    pub to_limit: f64,
    /// `d(T_n^{-1}(gamma^(n)), gamma_D)`.
    pub pulled_back: f64,
    /// Largest displacement of the diameter samples inside `B(0, 1 - 1/n)`.
    pub identity_region: f64,
}

/// `d(T_n^{-1}(gamma^(n)), gamma_D)`. The sup distance along the shared
/// parameter bounds the Fréchet distance from above and is exact when the
/// pull-back reproduces the diameter samples, which the bisection alone
/// would only resolve to `FRECHET_TOL`.
fn pulled_back(xs: &[f64], back: &[Point], diameter: &CurveClass) -> Result<f64> {
    let along = xs.iter().zip(back).map(|(&x, z)| (z - Point::new(x, 0.0)).norm()).fold(0.0, f64::max);
    Ok(frechet_distance(&CurveClass::new(back.to_vec())?, diameter, FRECHET_TOL)?.min(along))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarningReport {
    pub rows: Vec<WarningRow>,
    pub alpha: f64,
    /// `d(gamma, gamma_D)` for the limit curve.
    pub limit_gap: f64,
}

/// Twisted diameters: the curves converge, but not to the diameter the
/// (non-conformal) uniformizing maps pull them back to.
pub fn run_warning_example(n_values: &[u32], alpha: f64) -> LabResult<WarningReport> {
    const PER_END: usize = 512;
    let diameter = CurveClass::new(vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)])?;
    let limit = CurveClass::new(twisted_limit(alpha, PER_END))?;
    let rows = n_values
        .iter()
        .map(|&n| {
            let xs = diameter_samples(n, PER_END);
            let curve: Vec<Point> = xs.iter().map(|&x| twist(Point::new(x, 0.0), n, alpha)).collect();
            let back: Vec<Point> = curve.iter().map(|&z| twist_inverse(z, n, alpha)).collect();
            let r0 = 1.0 - 1.0 / n as f64;
            let identity_region = xs
                .iter()
                .zip(&curve)
                .filter(|(x, _)| x.abs() <= r0)
                .map(|(&x, z)| (z - Point::new(x, 0.0)).norm())
                .fold(0.0, f64::max);
            let c = CurveClass::new(curve)?;
            Ok(WarningRow {
                n,
                alpha,
                gap: frechet_distance(&c, &diameter, FRECHET_TOL).context(|| format!("n = {n}"))?,
                to_limit: frechet_distance(&c, &limit, FRECHET_TOL).context(|| format!("n = {n}"))?,
                pulled_back: pulled_back(&xs, &back, &diameter).context(|| format!("n = {n}"))?,
                identity_region,
            })
        })
        .collect::<LabResult<_>>()?;
    let limit_gap = frechet_distance(&limit, &diameter, FRECHET_TOL)?;
    Ok(WarningReport { rows, alpha, limit_gap })
}

impl WarningReport {
    pub fn to_report(&self) -> ExperimentReport {
        let mut t = Table::new(
            "warning",
            &["n", "eps", "seed", "samples", "alpha", "gap_to_diameter", "distance_to_limit", "pulled_back_gap", "identity_region_error"],
        );
        for r in &self.rows {
            t.push(vec![
                r.n.into(),
                Value::Missing,
                0u64.into(),
                1usize.into(),
                r.alpha.into(),
                r.gap.into(),
                r.to_limit.into(),
                r.pulled_back.into(),
                r.identity_region.into(),
            ]);
        }
        let plot = Plot {
            name: "warning".into(),
            title: format!("Twisted diameters, alpha = {}", self.alpha),
            x_label: "log2 n".into(),
            y_label: "Frechet distance".into(),
            series: vec![
                ("to the diameter".into(), self.rows.iter().map(|r| ((r.n as f64).log2(), r.gap)).collect()),
                ("to the limit curve".into(), self.rows.iter().map(|r| ((r.n as f64).log2(), r.to_limit)).collect()),
            ],
        };
        let summary = vec![("alpha".into(), self.alpha.to_string()), ("limit_gap".into(), self.limit_gap.to_string())];
        ExperimentReport { experiment: "warning".into(), tables: vec![t], plots: vec![plot], summary }
    }
}

/// Disc-trace distances for one seed and one `kappa_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub seed: u64,
    pub sample: usize,
    pub kappa: f64,
    pub kappa_m: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    pub kappa: f64,
    /// Offsets, largest first.
    pub offsets: Vec<f64>,
    /// Seeds whose distance shrinks strictly with the offset on both sides.
    pub monotone: usize,
    pub samples: usize,
}

impl StabilityReport {
    pub fn monotone_fraction(&self) -> f64 {
        self.monotone as f64 / self.samples as f64
    }
}

fn disc_trace(b: &DrivingFunction, kappa: f64, dt: f64) -> Result<Vec<Point>> {
    let w = scale_driving(b, kappa.sqrt())?;
    Ok(thin(&trace_in_disc(&forward_evolve(&w, dt)?)?.points().collect::<Vec<_>>(), TRACE_POINTS))
}

/// For every seed, SLE traces for `kappa` and `kappa +- offset` driven by
/// the same Brownian path, and their Fréchet distances in the disc.
pub fn run_stability_experiment(kappa: f64, offsets: &[f64], horizon: f64, dt: f64, samples: usize, seed: u64) -> LabResult<StabilityReport> {
    let mut offsets = offsets.to_vec();
    offsets.sort_by(|a, b| b.total_cmp(a));
    if let Some(o) = offsets.iter().find(|&&o| !(o >= 0.0) || !(kappa - o >= 0.0) || !(kappa + o < 8.0)) {
        return Err(crate::LabError::Config(format!("offset {o} takes kappa = {kappa} outside [0, 8)")));
    }
    let per_seed: Vec<Vec<StabilityRow>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, k as u64);
            let ctx = || format!("sample {k} (seed {s})");
            let b = brownian_path(horizon, dt, s).context(ctx)?;
            let base = CurveClass::new(disc_trace(&b, kappa, dt).context(ctx)?)?;
            let mut rows = Vec::new();
            for &o in &offsets {
                for km in [kappa - o, kappa + o] {
                    let c = CurveClass::new(disc_trace(&b, km, dt).context(ctx)?)?;
                    let distance = frechet_distance(&base, &c, FRECHET_TOL).context(ctx)?;
                    rows.push(StabilityRow { seed: s, sample: k, kappa, kappa_m: km, distance });
                    if o == 0.0 {
                        break;
                    }
                }
            }
            Ok(rows)
        })
        .collect::<LabResult<_>>()?;
    let monotone = per_seed
        .iter()
        .filter(|rows| {
            [-1.0, 1.0].iter().all(|&sign| {
                let d: Vec<f64> = rows.iter().filter(|r| (r.kappa_m - kappa) * sign >= 0.0).map(|r| r.distance).collect();
                d.windows(2).all(|w| w[1] < w[0] || w[0] == 0.0)
            })
        })
        .count();
    Ok(StabilityReport { rows: per_seed.into_iter().flatten().collect(), kappa, offsets, monotone, samples })
}

impl StabilityReport {
    pub fn to_report(&self) -> ExperimentReport {
        let mut t = Table::new("stability", &["n", "eps", "seed", "samples", "sample", "kappa", "kappa_m", "distance"]);
        for r in &self.rows {
            t.push(vec![
                Value::Missing,
                Value::Missing,
                r.seed.into(),
                self.samples.into(),
                r.sample.into(),
                r.kappa.into(),
                r.kappa_m.into(),
                r.distance.into(),
            ]);
        }
        let series = [-1.0, 1.0]
            .iter()
            .map(|&sign| {
                let label = if sign < 0.0 { "kappa_m < kappa" } else { "kappa_m > kappa" };
                let pts = self
                    .offsets
                    .iter()
                    .map(|&o| {
                        let km = self.kappa + sign * o;
                        let d = mean_of(self.rows.iter().filter(|r| r.kappa_m == km).map(|r| r.distance)).unwrap_or(f64::NAN);
                        (o, d)
                    })
                    .collect();
                (label.to_string(), pts)
            })
            .collect();
        let plot = Plot {
            name: "stability".into(),
            title: format!("Coupled SLE traces around kappa = {}", self.kappa),
            x_label: "|kappa_m - kappa|".into(),
            y_label: "mean Frechet distance in the disc".into(),
            series,
        };
        let summary = vec![
            ("kappa".into(), self.kappa.to_string()),
            ("monotone_seeds".into(), format!("{} of {}", self.monotone, self.samples)),
        ];
        ExperimentReport { experiment: "stability".into(), tables: vec![t], plots: vec![plot], summary }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KeyValues;
    use proptest::prelude::*;

    #[test]
    fn thin_keeps_ends_and_order() {
        let v: Vec<usize> = (0..1000).collect();
        let t = thin(&v, 7);
        assert_eq!(t.len(), 7);
        assert_eq!((t[0], t[6]), (0, 999));
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(thin(&v[..5], 7), v[..5]);
    }

    #[test]
    fn quantiles_by_nearest_rank() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert_eq!(quantile(&s, 0.5), 5.0);
        assert_eq!(quantile(&s, 0.9), 9.0);
        assert_eq!(quantile(&s, 1.0), 10.0);
        assert_eq!(quantile(&s, 0.0), 1.0);
    }

    #[test]
    fn zero_twist_is_the_identity() {
        let r = run_warning_example(&[8, 16], 0.0).unwrap();
        for row in &r.rows {
            assert_eq!(row.gap, 0.0);
            assert_eq!(row.pulled_back, 0.0);
        }
        assert_eq!(r.limit_gap, 0.0);
    }

    #[test]
    fn twist_leaves_the_inner_disc_alone() {
        let n = 16;
        for x in diameter_samples(n, 64) {
            let z = twist(Point::new(x, 0.0), n, 1.0);
            if x.abs() <= 1.0 - 1.0 / n as f64 || x.abs() == 1.0 {
                assert_eq!(z, Point::new(x, 0.0));
            }
        }
    }

    #[test]
    fn right_angle_twist_keeps_a_gap() {
        // Lower bound: the peak of the band, at angle pi/2 and radius
        // r1 = 1 - 1/(2n), is r1 from the real axis. Upper bound: match the
        // curve up to the peak with 0, then each later point with its
        // projection to the axis.
        let alpha = std::f64::consts::FRAC_PI_2;
        let r = run_warning_example(&[8, 32, 128], alpha).unwrap();
        for row in &r.rows {
            let r1 = 1.0 - 0.5 / row.n as f64;
            let upper = (0..=10_000)
                .map(|k| r1 + (1.0 - r1) * k as f64 / 10_000.0)
                .map(|rho| rho * twist_angle(rho, row.n, alpha).sin())
                .fold(r1, f64::max);
            assert!(row.gap >= r1 - 2.0 * FRECHET_TOL && row.gap <= upper + 2.0 * FRECHET_TOL, "n = {}: {} not in [{r1}, {upper}]", row.n, row.gap);
        }
        assert!((r.limit_gap - 1.0).abs() < 2.0 * FRECHET_TOL);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn twist_is_a_norm_preserving_bijection(r in 0.0f64..1.0, th in -3.1f64..3.1, n in 2u32..300, alpha in 0.0f64..3.1) {
            let z = Point::from_polar(r, th);
            let w = twist(z, n, alpha);
            prop_assert!((w.norm() - z.norm()).abs() < 1e-14);
            prop_assert!((twist_inverse(w, n, alpha) - z).norm() < 1e-14);
        }

        #[test]
        fn twist_angle_stays_in_range(r in 0.0f64..1.5, n in 1u32..100, alpha in 0.0f64..3.1) {
            let b = twist_angle(r, n, alpha);
            prop_assert!((0.0..=alpha).contains(&b));
        }
    }

    #[test]
    fn deterministic_kappa_zero_stays_on_the_centre_line() {
        // kappa = 0 is the hyperbolic geodesic from a to b, which in the
        // square is the horizontal midline; projecting moves it by at most
        // the projection of its ends.
        let kv = KeyValues::parse("seed = 5\nkappa = 0\nn = 8\nsamples = 2\neps = 0.2, 0.05\nhorizon = 4\ndt = 0.01\nell = 0.2\n").unwrap();
        let cfg = ExperimentConfig::from_key_values(&kv).unwrap();
        let r = run_commutation_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        for row in &r.rows {
            assert_eq!(row.exceedance.mean, 0.0);
            assert!(row.max < 0.2 * 0.75, "{row:?}");
        }
        assert!(r.rows[1].max <= r.rows[0].max);
    }

    #[test]
    fn stability_at_zero_offset_is_exact() {
        let r = run_stability_experiment(2.0, &[0.5, 0.0], 0.5, 0.01, 3, 11).unwrap();
        let zero: Vec<&StabilityRow> = r.rows.iter().filter(|row| row.kappa_m == 2.0).collect();
        assert_eq!(zero.len(), 3);
        assert!(zero.iter().all(|row| row.distance == 0.0));
    }
}
