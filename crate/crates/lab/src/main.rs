use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use conflimit_core::conformal::{boundary_normalized, domain_projection, uniformize, Uniformizer};
use conflimit_core::curves::frechet_distance;
use conflimit_core::lattice::{
    build_fjords, detect_unforced_crossings, quad_modulus, AnnulusQuery, CrossingQuery, LatticeDomain, MarkedEdge, Side,
};
use conflimit_core::loewner::{extract_driving, forward_evolve, mobius_d_to_h, sle_driving, trace_in_disc};
use conflimit_core::stochastic::harmonic_measure_mc;
use conflimit_core::Point;

use conflimit_lab::config::{ExperimentConfig, KeyValues};
use conflimit_lab::experiments::{run_commutation_experiment, run_stability_experiment, run_warning_example};
use conflimit_lab::formats::{format_curve, format_driving, parse_curve, parse_domain, parse_point, parse_quad, read_text, write_text};
use conflimit_lab::report::{write_report, ExperimentReport, Table, Value};
use conflimit_lab::{LabError, LabResult};

#[derive(Parser)]
#[command(name = "conflimit", version, about = "Loewner traces, lattice domains and conformal-limit experiments")]
struct Cli {
    /// Plain-text `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn point(s: &str) -> Result<Point, String> {
    parse_point(s).ok_or_else(|| format!("cannot parse point `{s}`"))
}

fn edge(s: &str) -> Result<MarkedEdge, String> {
    let f: Vec<&str> = s.split([',', ' ']).filter(|x| !x.is_empty()).collect();
    match f.as_slice() {
        [i, j, d] => {
            let side = Side::from_letter(d).ok_or_else(|| format!("bad side `{d}`"))?;
            Ok(MarkedEdge::new(i.parse().map_err(|_| format!("bad i `{i}`"))?, j.parse().map_err(|_| format!("bad j `{j}`"))?, side))
        }
        _ => Err(format!("expected `i,j,SIDE`, found `{s}`")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grow an SLE(kappa) hull and write its trace.
    Sle {
        #[arg(long)]
        kappa: f64,
        /// Capacity horizon.
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long)]
        dt: f64,
        /// Write the trace in the disc (from -1 towards 1) instead of the
        /// upper half plane.
        #[arg(long)]
        disc: bool,
        /// Also write the driving function here.
        #[arg(long)]
        driving_out: Option<PathBuf>,
    },
    /// Driving function of a trace in the upper half plane.
    Extract {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1000)]
        npts: usize,
        /// The curve lies in the disc and starts at -1.
        #[arg(long)]
        disc: bool,
    },
    /// Evaluate the uniformizing map of a lattice domain.
    Map {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = point, allow_hyphen_values = true, required = true)]
        probe: Vec<Point>,
        /// Map disc points back into the domain.
        #[arg(long)]
        inverse: bool,
        /// Normalize by the marked edges instead of the base point.
        #[arg(long)]
        marked: bool,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Conformal radial projection of a curve.
    Project {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Fjords of a lattice domain.
    Fjords {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Forced and unforced crossings of an annulus or a quadrilateral.
    Crossings {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        /// Annulus `x,y,r,R`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "quad")]
        annulus: Option<String>,
        #[arg(long)]
        quad: Option<PathBuf>,
        /// Initial piece of the curve already drawn (a curve file).
        #[arg(long)]
        removed: Option<PathBuf>,
    },
    /// Discrete modulus of a quadrilateral.
    Modulus {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        quad: PathBuf,
        #[arg(long, default_value_t = 8)]
        refinement: u32,
    },
    /// Harmonic measure of a boundary arc by walk on spheres.
    Hm {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        z: Point,
        /// First edge of the arc, `i,j,SIDE`.
        #[arg(long, value_parser = edge)]
        from: MarkedEdge,
        /// Last edge of the arc, counterclockwise from `--from`.
        #[arg(long, value_parser = edge)]
        to: MarkedEdge,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Distance between sampled curves and their conformal projections.
    Commute {
        #[arg(long)]
        kappa: Option<f64>,
        /// `sle` or `lerw`.
        #[arg(long)]
        model: Option<String>,
        /// Resolutions, comma separated.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Twisted diameters that converge to the wrong curve.
    Warning {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<String>,
    },
    /// Coupled SLE traces for nearby kappa.
    Stability {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        offsets: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn need_seed(seed: Option<u64>) -> LabResult<u64> {
    seed.ok_or_else(|| LabError::Config("`--seed` is required".into()))
}

fn domain(path: &Path) -> LabResult<LatticeDomain> {
    parse_domain(&read_text(path)?)
}

/// Writes `text` to `out` if given, else prints it.
fn emit(out: Option<&Path>, text: &str) -> LabResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> LabResult<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Sle { kappa, horizon, dt, disc, driving_out } => {
            if !(0.0..8.0).contains(&kappa) {
                return Err(LabError::Config(format!("kappa = {kappa} must lie in [0, 8)")));
            }
            let w = sle_driving(kappa, horizon, dt, need_seed(cli.seed)?)?;
            let hull = forward_evolve(&w, dt)?;
            let trace = if disc { trace_in_disc(&hull)? } else { hull.trace.clone() };
            emit(out, &format_curve(&trace))?;
            if let Some(p) = driving_out {
                write_text(&p, &format_driving(&hull.driving))?;
            }
        }
        Command::Extract { curve, npts, disc } => {
            let c = parse_curve(&read_text(&curve)?)?;
            let c = if disc { c.map_points(mobius_d_to_h)? } else { c };
            emit(out, &format_driving(&extract_driving(&c, npts)?))?;
        }
        Command::Map { domain: d, probe, inverse, marked, tol } => {
            let dom = domain(&d)?;
            let mut map = uniformize(&dom, tol)?;
            if marked {
                map = boundary_normalized(&map, dom.a(), dom.b())?;
            }
            let mut t = Table::new("map", &["x", "y", "re", "im"]);
            for p in probe {
                let v = if inverse { map.from_disc(p)? } else { map.to_disc(p)? };
                t.push(vec![p.re.into(), p.im.into(), v.re.into(), v.im.into()]);
            }
            emit(out, &t.to_csv())?;
        }
        Command::Project { domain: d, curve, eps, tol } => {
            let dom = domain(&d)?;
            let map = uniformize(&dom, tol)?;
            let c = parse_curve(&read_text(&curve)?)?;
            let p = c.map_points(|z| domain_projection(&map, z, eps))?;
            let dist = frechet_distance(&c.to_class(), &p.to_class(), 1e-6)?;
            eprintln!("frechet distance to the input: {dist}");
            emit(out, &format_curve(&p))?;
        }
        Command::Fjords { domain: d, delta, c } => {
            let dom = domain(&d)?;
            let fj = build_fjords(&dom, dom.u(), delta, c)?;
            let mut t = Table::new("fjords", &["index", "reference", "depth", "mouth_diameter", "deepest_x", "deepest_y", "cells"]);
            for (k, f) in fj.iter().enumerate() {
                t.push(vec![
                    k.into(),
                    Value::Text(format!("{:?}", f.reference)),
                    f.depth.into(),
                    f.mouth_diameter.into(),
                    f.deepest.re.into(),
                    f.deepest.im.into(),
                    f.cells().len().into(),
                ]);
            }
            emit(out, &t.to_csv())?;
        }
        Command::Crossings { domain: d, curve, annulus, quad, removed } => {
            let dom = domain(&d)?;
            let c = parse_curve(&read_text(&curve)?)?.to_class();
            let query = match (annulus, quad) {
                (Some(a), None) => {
                    let v: Vec<f64> = a.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| LabError::Config(format!("bad annulus `{a}`")))?;
                    let [x, y, r, big_r] = v[..] else {
                        return Err(LabError::Config("annulus is `x,y,r,R`".into()));
                    };
                    CrossingQuery::Annulus(AnnulusQuery::new(Point::new(x, y), r, big_r))
                }
                (None, Some(q)) => CrossingQuery::Quad(parse_quad(&read_text(&q)?)?),
                _ => return Err(LabError::Config("give exactly one of `--annulus` and `--quad`".into())),
            };
            let removed: Option<Vec<Point>> = match removed {
                Some(p) => Some(parse_curve(&read_text(&p)?)?.points().collect()),
                None => None,
            };
            let rep = detect_unforced_crossings(&dom, &c, &query, removed.as_deref())?;
            let mut t = Table::new("crossings", &["start", "end", "component", "forced"]);
            for x in &rep.crossings {
                t.push(vec![x.start.into(), x.end.into(), x.component.into(), Value::Text(x.forced.to_string())]);
            }
            emit(out, &t.to_csv())?;
            eprintln!("{} crossings, {} unforced", rep.total_crossings, rep.unforced_crossings);
        }
        Command::Modulus { domain: d, quad, refinement } => {
            let dom = domain(&d)?;
            let m = quad_modulus(&dom, &parse_quad(&read_text(&quad)?)?, refinement)?;
            emit(out, &format!("{m}\n"))?;
        }
        Command::Hm { domain: d, z, from, to, walks, step } => {
            let dom = domain(&d)?;
            let edges = dom.boundary_edges();
            let (Some(i), Some(j)) = (dom.edge_index(from), dom.edge_index(to)) else {
                return Err(LabError::Config("`--from` and `--to` must be boundary edges".into()));
            };
            let len = (j + edges.len() - i) % edges.len() + 1;
            let arc: Vec<MarkedEdge> = (0..len).map(|k| edges[(i + k) % edges.len()]).collect();
            let seed = need_seed(cli.seed)?;
            let step = step.unwrap_or(1e-3 * dom.h());
            let e = harmonic_measure_mc(&dom, z, &arc, walks, step, seed)?;
            let mut t = Table::new("hm", &["x", "y", "edges", "walks", "seed", "estimate", "stderr"]);
            t.push(vec![z.re.into(), z.im.into(), arc.len().into(), walks.into(), seed.into(), e.mean.into(), e.stderr.into()]);
            emit(out, &t.to_csv())?;
        }
        Command::Commute { kappa, model, n, eps, ell, samples } => {
            let mut kv = base_config(cli.config.as_deref(), "commute", cli.seed, out)?;
            set_opt(&mut kv, "kappa", kappa);
            set_opt(&mut kv, "model", model);
            set_opt(&mut kv, "n", n);
            set_opt(&mut kv, "eps", eps);
            set_opt(&mut kv, "ell", ell);
            set_opt(&mut kv, "samples", samples);
            let cfg = ExperimentConfig::from_key_values(&kv)?;
            finish(&cfg, &run_commutation_experiment(&cfg)?.to_report())?;
        }
        Command::Warning { alpha, n } => {
            let mut kv = base_config(cli.config.as_deref(), "warning", cli.seed.or(Some(0)), out)?;
            set_opt(&mut kv, "alpha", alpha);
            set_opt(&mut kv, "n", n);
            if kv.get("n").is_none() {
                kv.set("n", "16, 32, 64, 128, 256");
            }
            let cfg = ExperimentConfig::from_key_values(&kv)?;
            finish(&cfg, &run_warning_example(&cfg.n_values, cfg.alpha)?.to_report())?;
        }
        Command::Stability { kappa, offsets, samples } => {
            let mut kv = base_config(cli.config.as_deref(), "stability", cli.seed, out)?;
            set_opt(&mut kv, "kappa", kappa);
            set_opt(&mut kv, "offsets", offsets);
            set_opt(&mut kv, "samples", samples);
            let cfg = ExperimentConfig::from_key_values(&kv)?;
            let kappa = match cfg.model {
                conflimit_lab::config::Model::Sle { kappa } => kappa,
                conflimit_lab::config::Model::Lerw => return Err(LabError::Config("stability needs `model = sle`".into())),
            };
            let r = run_stability_experiment(kappa, &cfg.offsets, cfg.horizon, cfg.dt, cfg.samples, cfg.seed)?;
            finish(&cfg, &r.to_report())?;
        }
    }
    Ok(())
}

fn base_config(path: Option<&Path>, experiment: &str, seed: Option<u64>, out: Option<&Path>) -> LabResult<KeyValues> {
    let mut kv = match path {
        Some(p) => KeyValues::parse(&read_text(p)?)?,
        None => KeyValues::default(),
    };
    kv.set("experiment", experiment);
    set_opt(&mut kv, "seed", seed);
    set_opt(&mut kv, "out", out.map(|p| p.display().to_string()));
    Ok(kv)
}

fn set_opt<T: ToString>(kv: &mut KeyValues, key: &str, v: Option<T>) {
    if let Some(v) = v {
        kv.set(key, v.to_string());
    }
}

fn finish(cfg: &ExperimentConfig, report: &ExperimentReport) -> LabResult<()> {
    let written = write_report(&cfg.out, &cfg.echo, report)?;
    for (k, v) in &report.summary {
        println!("{k}: {v}");
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
