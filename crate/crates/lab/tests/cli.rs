use std::path::Path;
use std::process::{Command, Output};

use conflimit_core::lattice::{Cell, LatticeDomain};
use conflimit_core::pt;
use conflimit_lab::formats::{format_domain, parse_curve};

fn conflimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conflimit")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn deterministic_slit_matches_its_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slit.curve");
    let o = conflimit(&["sle", "--kappa", "0", "--T", "1", "--dt", "1e-4", "--seed", "1", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = parse_curve(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c.len(), 10_001);
    // With T = 1 the curve parameter is the capacity time.
    for &(t, p) in c.samples() {
        assert!((p - pt(0.0, 2.0 * t.sqrt())).norm() < 5e-3);
    }
}

#[test]
fn extract_inverts_sle() {
    let dir = tempfile::tempdir().unwrap();
    let (curve, w_in, w_out) = (dir.path().join("c.curve"), dir.path().join("in.driving"), dir.path().join("out.driving"));
    let o = conflimit(&[
        "sle", "--kappa", "2", "--T", "0.2", "--dt", "1e-3", "--seed", "9", "--out", path(&curve), "--driving-out", path(&w_in),
    ]);
    assert!(o.status.success());
    let o = conflimit(&["extract", "--curve", path(&curve), "--out", path(&w_out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let read = |p: &Path| conflimit_lab::formats::parse_driving(&std::fs::read_to_string(p).unwrap()).unwrap();
    let d = conflimit_core::curves::function_metric(&read(&w_in), &read(&w_out));
    assert!(d < 1e-8, "{d}");
}

/// Cells of side 1/16 whose centres lie in the unit disc.
fn unit_lattice_disc() -> LatticeDomain {
    let n = 16;
    let cells = (-16..16).flat_map(|i| (-16..16).map(move |j| Cell::new(i, j))).filter(|c| c.center(n).norm() < 1.0);
    LatticeDomain::unmarked(n, cells, pt(1e-3, 2e-3)).unwrap()
}

#[test]
fn map_on_a_lattice_disc_is_nearly_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("disc.domain");
    std::fs::write(&dom, format_domain(&unit_lattice_disc(), false)).unwrap();
    let o = conflimit(&["map", "--domain", path(&dom), "--probe", "0.1+0.1i", "--probe", "-0.4-0.2i"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,re,im"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((pt(v[2], v[3]) - pt(v[0], v[1])).norm() < 0.05, "{line}");
    }
}

#[test]
fn warning_reports_a_positive_gap() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w");
    let o = conflimit(&["warning", "--alpha", "1.0", "--n", "64", "--out", path(&w)]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(w.join("warning.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "64");
    let gap: f64 = row[5].parse().unwrap();
    assert!(gap > 0.8, "{gap}");
    let manifest = std::fs::read_to_string(w.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config_sha256 = ") && manifest.contains("alpha = 1"));
    assert!(w.join("warning.svg").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let o = conflimit(&["warning", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = conflimit(&["sle", "--kappa", "9", "--T", "1", "--dt", "0.1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = conflimit(&["sle", "--kappa", "1", "--T", "1", "--dt", "0.1"]);
    assert_eq!(o.status.code(), Some(2), "missing seed");
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("six.domain");
    std::fs::write(&dom, format_domain(&conflimit_lab::fixtures::six(), true)).unwrap();
    let o = conflimit(&["map", "--domain", path(&dom), "--probe", "3+3i"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&dom, "domain v1\nn 4\n").unwrap();
    let o = conflimit(&["map", "--domain", path(&dom), "--probe", "0.5+0.5i"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nseed = 4\nn = 8\nsamples = 3\neps = 0.1\nkappa = 2\nhorizon = 1\ndt = 0.01\n").unwrap();
    let out = dir.path().join("o");
    let o = conflimit(&["commute", "--config", path(&cfg), "--samples", "2", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("commutation.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], ["8", "0.1", "4", "2"]);
    let samples = std::fs::read_to_string(out.join("commutation_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 3);
}

#[test]
fn crossings_command_labels_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (dom, curve) = (dir.path().join("six.domain"), dir.path().join("dip.curve"));
    std::fs::write(&dom, format_domain(&conflimit_lab::fixtures::six(), true)).unwrap();
    std::fs::write(&curve, "curve v1\n0 0 0.4166666666666667\n0.25 0.5 0.45\n0.5 0.5 0.05\n0.75 0.55 0.45\n1 1 0.5833333333333334\n").unwrap();
    let o = conflimit(&["crossings", "--domain", path(&dom), "--curve", path(&curve), "--annulus", "0.5,0,0.15,0.3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let forced: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(forced, ["false", "false"]);
}
