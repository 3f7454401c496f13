//! `key = value` configuration files and the experiment configuration
//! built from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use conflimit_core::{pt, Point};

use crate::error::{LabError, LabResult};
use crate::formats::parse_point;

/// Raw key/value pairs in key order. Later assignments override earlier
/// ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> LabResult<KeyValues> {
        let mut map = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(LabError::Parse { what: "config".into(), line: k + 1, msg: format!("expected `key = value`, found `{line}`") });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(LabError::Parse { what: "config".into(), line: k + 1, msg: "empty key".into() });
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Canonical text: one `key = value` per line, sorted by key.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str) -> LabResult<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| LabError::Config(format!("`{key}`: cannot parse `{v}`"))))
            .transpose()
    }

    pub fn real(&self, key: &str) -> LabResult<Option<f64>> {
        self.parse_as(key)
    }

    pub fn count(&self, key: &str) -> LabResult<Option<usize>> {
        self.parse_as(key)
    }

    pub fn integer(&self, key: &str) -> LabResult<Option<u64>> {
        self.parse_as(key)
    }

    /// Comma-separated reals.
    pub fn reals(&self, key: &str) -> LabResult<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| LabError::Config(format!("`{key}`: cannot parse `{s}`"))))
                    .collect()
            })
            .transpose()
    }

    pub fn point(&self, key: &str) -> LabResult<Option<Point>> {
        self.get(key)
            .map(|v| parse_point(&v.replace(' ', ",")).ok_or_else(|| LabError::Config(format!("`{key}`: cannot parse point `{v}`"))))
            .transpose()
    }

    /// Semicolon-separated points `x y; x y; ...`.
    pub fn points(&self, key: &str) -> LabResult<Option<Vec<Point>>> {
        self.get(key)
            .map(|v| {
                v.split(';')
                    .map(|s| {
                        let f: Vec<&str> = s.split_whitespace().collect();
                        match f.as_slice() {
                            [x, y] => match (x.parse(), y.parse()) {
                                (Ok(x), Ok(y)) => Ok(pt(x, y)),
                                _ => Err(LabError::Config(format!("`{key}`: cannot parse `{s}`"))),
                            },
                            _ => Err(LabError::Config(format!("`{key}`: expected `x y`, found `{s}`"))),
                        }
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Which random curves feed an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// SLE(kappa) in the disc from -1 to 1, moved into the domain.
    Sle { kappa: f64 },
    /// Loop-erased random walk directly on the lattice domain.
    Lerw,
}

/// The continuous domain an experiment approximates on each lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub polygon: Vec<Point>,
    pub u: Point,
    pub a: Point,
    pub b: Point,
}

impl DomainSpec {
    pub fn unit_square() -> DomainSpec {
        DomainSpec {
            polygon: vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)],
            u: pt(0.5 + 1e-3, 0.5 + 2e-3),
            a: pt(0.0, 0.5),
            b: pt(1.0, 0.5),
        }
    }

    /// A 128-gon inscribed in the circle of radius 0.45 about (1/2, 1/2).
    pub fn disc() -> DomainSpec {
        let c = pt(0.5, 0.5);
        let polygon = (0..128).map(|k| c + Point::from_polar(0.45, 2.0 * std::f64::consts::PI * k as f64 / 128.0)).collect();
        DomainSpec { polygon, u: c + pt(1e-3, 2e-3), a: c - 0.45, b: c + 0.45 }
    }
}

/// Everything an experiment run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub domain: DomainSpec,
    pub model: Model,
    /// Capacity horizon and time step of SLE traces.
    pub horizon: f64,
    pub dt: f64,
    pub n_values: Vec<u32>,
    pub eps_values: Vec<f64>,
    pub ell: f64,
    pub delta: f64,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Uniformizer tolerance.
    pub tol: f64,
    /// Twist angle of the warning example.
    pub alpha: f64,
    /// Offsets `kappa_m - kappa` of the stability experiment, largest first.
    pub offsets: Vec<f64>,
    /// The full key/value echo, including defaults.
    pub echo: KeyValues,
}

const KNOWN: [&str; 21] = [
    "experiment", "domain", "polygon", "u", "a", "b", "model", "kappa", "horizon", "dt", "n", "eps", "ell", "delta", "C",
    "samples", "seed", "out", "tol", "alpha", "offsets",
];

impl ExperimentConfig {
    /// Builds and validates a configuration. `seed` is mandatory.
    pub fn from_key_values(kv: &KeyValues) -> LabResult<ExperimentConfig> {
        if let Some(k) = kv.keys().find(|k| !KNOWN.contains(k) && !k.starts_with("x_")) {
            return Err(LabError::Config(format!("unknown key `{k}`")));
        }
        let mut echo = kv.clone();
        let mut domain = match kv.get("domain").unwrap_or("square") {
            "square" => DomainSpec::unit_square(),
            "disc" => DomainSpec::disc(),
            "polygon" => {
                let polygon = kv.points("polygon")?.ok_or_else(|| LabError::Config("`domain = polygon` needs `polygon`".into()))?;
                let first = polygon.first().copied().unwrap_or_default();
                DomainSpec { polygon, u: first, a: first, b: first }
            }
            other => return Err(LabError::Config(format!("unknown domain `{other}`"))),
        };
        if let Some(u) = kv.point("u")? {
            domain.u = u;
        }
        if let Some(a) = kv.point("a")? {
            domain.a = a;
        }
        if let Some(b) = kv.point("b")? {
            domain.b = b;
        }
        let model = match kv.get("model").unwrap_or("sle") {
            "sle" => Model::Sle { kappa: kv.real("kappa")?.unwrap_or(3.0) },
            "lerw" => Model::Lerw,
            other => return Err(LabError::Config(format!("unknown model `{other}`"))),
        };
        let seed = kv.integer("seed")?.ok_or_else(|| LabError::Config("`seed` is required".into()))?;
        let n_values: Vec<u32> = match kv.reals("n")? {
            Some(v) => v.iter().map(|&x| x as u32).collect(),
            None => vec![32],
        };
        let cfg = ExperimentConfig {
            experiment: kv.get("experiment").unwrap_or("commute").to_string(),
            domain,
            model,
            horizon: kv.real("horizon")?.unwrap_or(8.0),
            dt: kv.real("dt")?.unwrap_or(4e-3),
            n_values,
            eps_values: kv.reals("eps")?.unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]),
            ell: kv.real("ell")?.unwrap_or(0.2),
            delta: kv.real("delta")?.unwrap_or(0.01),
            c: kv.real("C")?.unwrap_or(4.0),
            samples: kv.count("samples")?.unwrap_or(200),
            seed,
            out: PathBuf::from(kv.get("out").unwrap_or("out")),
            tol: kv.real("tol")?.unwrap_or(2e-3),
            alpha: kv.real("alpha")?.unwrap_or(1.0),
            offsets: kv.reals("offsets")?.unwrap_or_else(|| vec![0.1, 0.01]),
            echo: KeyValues::default(),
        };
        cfg.validate()?;
        for (k, v) in cfg.defaults() {
            if echo.get(k).is_none() {
                echo.set(k, v);
            }
        }
        Ok(ExperimentConfig { echo, ..cfg })
    }

    fn defaults(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut d = vec![
            ("experiment", self.experiment.clone()),
            ("horizon", self.horizon.to_string()),
            ("dt", self.dt.to_string()),
            ("n", self.n_values.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
            ("eps", join(&self.eps_values)),
            ("ell", self.ell.to_string()),
            ("delta", self.delta.to_string()),
            ("C", self.c.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("out", self.out.display().to_string()),
            ("tol", self.tol.to_string()),
            ("alpha", self.alpha.to_string()),
            ("offsets", join(&self.offsets)),
        ];
        match self.model {
            Model::Sle { kappa } => {
                d.push(("model", "sle".into()));
                d.push(("kappa", kappa.to_string()));
            }
            Model::Lerw => d.push(("model", "lerw".into())),
        }
        d
    }

    fn validate(&self) -> LabResult<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.domain.polygon.len() < 3 {
            return bad("domain polygon needs at least 3 vertices".into());
        }
        if let Model::Sle { kappa } = self.model {
            if !(0.0..8.0).contains(&kappa) {
                return bad(format!("kappa = {kappa} must lie in [0, 8)"));
            }
        }
        if !(self.horizon > 0.0) || !(self.dt > 0.0) || self.dt > self.horizon {
            return bad("need 0 < dt <= horizon".into());
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return bad("resolutions `n` must be at least 2".into());
        }
        if self.eps_values.is_empty() || self.eps_values.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("every `eps` must lie in (0, 1)".into());
        }
        if !(self.ell > 0.0) || !(self.delta > 0.0) || !(self.c > 0.0) || !(self.tol > 0.0) {
            return bad("`ell`, `delta`, `C` and `tol` must be positive".into());
        }
        if !(0.0..std::f64::consts::PI).contains(&self.alpha) {
            return bad(format!("alpha = {} must lie in [0, pi)", self.alpha));
        }
        if self.samples == 0 {
            return bad("`samples` must be positive".into());
        }
        Ok(())
    }
}
