//! Plain-text file formats: `curve v1`, `driving v1`, `domain v1` and
//! `quad v1`.
//!
//! Every format starts with its header line. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use conflimit_core::curves::{DrivingFunction, ParamCurve};
use conflimit_core::lattice::{Cell, LatticeDomain, MarkedEdge, QuadQuery, Side};
use conflimit_core::{pt, Point};

use crate::error::{LabError, LabResult};

fn parse_err(what: &str, line: usize, msg: impl Into<String>) -> LabError {
    LabError::Parse { what: what.to_string(), line, msg: msg.into() }
}

/// Content lines with their 1-based line numbers, after checking the header.
fn body<'a>(text: &'a str, header: &str) -> LabResult<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((k, h)) => return Err(parse_err(header, k, format!("expected header `{header}`, found `{h}`"))),
        None => return Err(parse_err(header, 0, "empty file")),
    }
    Ok(lines.map(|(k, l)| (k, l.split_whitespace().collect())).collect())
}

fn num<T: std::str::FromStr>(what: &str, line: usize, s: &str) -> LabResult<T> {
    s.parse().map_err(|_| parse_err(what, line, format!("cannot parse `{s}`")))
}

fn fields<const N: usize>(what: &str, line: usize, f: &[&str]) -> LabResult<[f64; N]> {
    if f.len() != N {
        return Err(parse_err(what, line, format!("expected {N} numbers, found {}", f.len())));
    }
    let mut out = [0.0; N];
    for (o, s) in out.iter_mut().zip(f) {
        *o = num(what, line, s)?;
    }
    Ok(out)
}

pub fn read_text(path: &Path) -> LabResult<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> LabResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn parse_curve(text: &str) -> LabResult<ParamCurve> {
    let mut samples = Vec::new();
    for (line, f) in body(text, "curve v1")? {
        let [t, x, y] = fields::<3>("curve v1", line, &f)?;
        samples.push((t, pt(x, y)));
    }
    Ok(ParamCurve::new(samples)?)
}

pub fn format_curve(c: &ParamCurve) -> String {
    let mut s = String::from("curve v1\n");
    for (t, p) in c.samples() {
        let _ = writeln!(s, "{t} {} {}", p.re, p.im);
    }
    s
}

pub fn parse_driving(text: &str) -> LabResult<DrivingFunction> {
    let mut samples = Vec::new();
    for (line, f) in body(text, "driving v1")? {
        let [t, w] = fields::<2>("driving v1", line, &f)?;
        samples.push((t, w));
    }
    Ok(DrivingFunction::new(samples)?)
}

pub fn format_driving(w: &DrivingFunction) -> String {
    let mut s = String::from("driving v1\n");
    for (t, v) in w.samples() {
        let _ = writeln!(s, "{t} {v}");
    }
    s
}

fn parse_mark(what: &str, line: usize, f: &[&str]) -> LabResult<MarkedEdge> {
    let i = num(what, line, f[2])?;
    let j = num(what, line, f[3])?;
    let side = Side::from_letter(f[4]).ok_or_else(|| parse_err(what, line, format!("unknown direction `{}`", f[4])))?;
    Ok(MarkedEdge::new(i, j, side))
}

/// A `domain v1` file. Marks are optional as a pair; without them the
/// domain is unmarked.
pub fn parse_domain(text: &str) -> LabResult<LatticeDomain> {
    const W: &str = "domain v1";
    let (mut n, mut u, mut a, mut b) = (None, None, None, None);
    let mut cells = Vec::new();
    for (line, f) in body(text, W)? {
        match (f[0], f.len()) {
            ("n", 2) => n = Some(num::<u32>(W, line, f[1])?),
            ("u", 3) => u = Some(pt(num(W, line, f[1])?, num(W, line, f[2])?)),
            ("cell", 3) => cells.push(Cell::new(num(W, line, f[1])?, num(W, line, f[2])?)),
            ("mark", 5) if f[1] == "a" => a = Some(parse_mark(W, line, &f)?),
            ("mark", 5) if f[1] == "b" => b = Some(parse_mark(W, line, &f)?),
            _ => return Err(parse_err(W, line, format!("unrecognised line `{}`", f.join(" ")))),
        }
    }
    let n = n.ok_or_else(|| parse_err(W, 0, "missing `n` line"))?;
    let u = u.ok_or_else(|| parse_err(W, 0, "missing `u` line"))?;
    Ok(match (a, b) {
        (Some(a), Some(b)) => LatticeDomain::new(n, cells, u, a, b)?,
        (None, None) => LatticeDomain::unmarked(n, cells, u)?,
        _ => return Err(parse_err(W, 0, "give both marks or neither")),
    })
}

pub fn format_domain(d: &LatticeDomain, marked: bool) -> String {
    let mut s = format!("domain v1\nn {}\nu {} {}\n", d.n(), d.u().re, d.u().im);
    for c in d.cells() {
        let _ = writeln!(s, "cell {} {}", c.i, c.j);
    }
    if marked {
        for (name, e) in [("a", d.a()), ("b", d.b())] {
            let _ = writeln!(s, "mark {name} {} {} {}", e.cell.i, e.cell.j, e.side.letter());
        }
    }
    s
}

/// A `quad v1` file: `cell i j` lines and `side k x y` lines giving the
/// vertices of side `k` in order.
pub fn parse_quad(text: &str) -> LabResult<QuadQuery> {
    const W: &str = "quad v1";
    let mut cells = Vec::new();
    let mut sides: [Vec<Point>; 4] = Default::default();
    for (line, f) in body(text, W)? {
        match (f[0], f.len()) {
            ("cell", 3) => cells.push(Cell::new(num(W, line, f[1])?, num(W, line, f[2])?)),
            ("side", 4) => {
                let k: usize = num(W, line, f[1])?;
                if k > 3 {
                    return Err(parse_err(W, line, "side index must be 0..=3"));
                }
                sides[k].push(pt(num(W, line, f[2])?, num(W, line, f[3])?));
            }
            _ => return Err(parse_err(W, line, format!("unrecognised line `{}`", f.join(" ")))),
        }
    }
    Ok(QuadQuery { cells, sides })
}

pub fn format_quad(q: &QuadQuery) -> String {
    let mut s = String::from("quad v1\n");
    for c in &q.cells {
        let _ = writeln!(s, "cell {} {}", c.i, c.j);
    }
    for (k, side) in q.sides.iter().enumerate() {
        for p in side {
            let _ = writeln!(s, "side {k} {} {}", p.re, p.im);
        }
    }
    s
}

/// Parses `x+yi`, `x-yi`, `x`, `yi` or `x,y`.
pub fn parse_point(s: &str) -> Option<Point> {
    let s = s.trim().replace(' ', "");
    if let Some((x, y)) = s.split_once(',') {
        return Some(pt(x.parse().ok()?, y.parse().ok()?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Some(pt(s.parse().ok()?, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().ok()?,
    };
    Some(pt(re.parse().ok()?, im))
}
