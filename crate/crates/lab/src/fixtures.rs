//! Hand-built domains and curves with known answers, shared by the
//! acceptance run and the integration tests.

use conflimit_core::curves::CurveClass;
use conflimit_core::lattice::{AnnulusQuery, Cell, CrossingQuery, LatticeDomain, MarkedEdge, QuadQuery, Side};
use conflimit_core::{pt, Point};

/// The 6x6 unit square with `a` on the left side (midpoint `(0, 5/12)`) and
/// `b` on the right side (midpoint `(1, 7/12)`).
pub fn six() -> LatticeDomain {
    let cells = (0..6).flat_map(|i| (0..6).map(move |j| Cell::new(i, j)));
    LatticeDomain::new(6, cells, pt(0.5, 0.55), MarkedEdge::new(0, 2, Side::W), MarkedEdge::new(5, 3, Side::E))
        .expect("fixture domain is valid")
}

fn class(pts: &[(f64, f64)]) -> CurveClass {
    CurveClass::new(pts.iter().map(|&(x, y)| pt(x, y)).collect()).expect("fixture curve is valid")
}

fn ann(z: (f64, f64), r: f64, big_r: f64) -> CrossingQuery {
    CrossingQuery::Annulus(AnnulusQuery::new(pt(z.0, z.1), r, big_r))
}

/// Straight-ish curve from `a` through the centre to `b`.
pub fn diameter_curve() -> CurveClass {
    class(&[(0.0, 5.0 / 12.0), (0.5, 0.5), (1.0, 7.0 / 12.0)])
}

/// A crossing query on [`six`] with its hand-enumerated forced flags.
#[derive(Debug, Clone)]
pub struct CrossingCase {
    pub name: &'static str,
    pub curve: CurveClass,
    pub query: CrossingQuery,
    pub removed: Option<Vec<Point>>,
    pub expected: Vec<bool>,
}

fn rect_quad(cells: Vec<Cell>, corners: [(f64, f64); 4]) -> QuadQuery {
    let p: Vec<Point> = corners.iter().map(|&(x, y)| pt(x, y)).collect();
    QuadQuery { cells, sides: [vec![p[0], p[1]], vec![p[1], p[2]], vec![p[2], p[3]], vec![p[3], p[0]]] }
}

/// The middle vertical strip `1/3 <= x <= 2/3`, S0 on its left.
pub fn middle_strip() -> QuadQuery {
    let (l, r) = (2.0 / 6.0, 4.0 / 6.0);
    rect_quad((2..4).flat_map(|i| (0..6).map(move |j| Cell::new(i, j))).collect(), [(l, 1.0), (l, 0.0), (r, 0.0), (r, 1.0)])
}

/// Every crossing fixture. Each crossing is listed in curve order.
pub fn crossing_cases() -> Vec<CrossingCase> {
    let case = |name, curve, query, expected: &[bool]| CrossingCase { name, curve, query, removed: None, expected: expected.to_vec() };
    let band = ann((-1.0, 0.5), 1.3, 1.7);
    let (lo, hi) = (4.0 / 6.0, 5.0 / 6.0);
    let row4 = rect_quad((0..6).map(|i| Cell::new(i, 4)).collect(), [(0.0, lo), (1.0, lo), (1.0, hi), (0.0, hi)]);
    vec![
        case("untouched corner", diameter_curve(), ann((1.0, 1.0), 0.1, 0.2), &[]),
        case(
            "dip into bottom half ring",
            class(&[(0.0, 5.0 / 12.0), (0.5, 0.45), (0.5, 0.05), (0.55, 0.45), (1.0, 7.0 / 12.0)]),
            ann((0.5, 0.0), 0.15, 0.3),
            &[false, false],
        ),
        case("ring around a", diameter_curve(), ann((0.0, 5.0 / 12.0), 0.1, 0.3), &[true]),
        case("band, diameter", diameter_curve(), band.clone(), &[true]),
        case(
            "band, zigzag",
            class(&[(0.0, 5.0 / 12.0), (0.9, 0.2), (0.1, 0.6), (0.9, 0.8), (1.0, 7.0 / 12.0)]),
            band.clone(),
            &[true, true, true],
        ),
        case(
            "band, in and back",
            class(&[(0.0, 5.0 / 12.0), (0.2, 0.5), (0.45, 0.5), (0.15, 0.7), (0.95, 0.9), (1.0, 7.0 / 12.0)]),
            band,
            &[true],
        ),
        CrossingCase {
            name: "removed segment splits the ring",
            curve: class(&[(0.5, 0.05), (0.2, 0.2), (0.45, 0.02), (0.55, 0.02), (0.8, 0.3), (1.0, 7.0 / 12.0)]),
            query: ann((0.5, 0.0), 0.1, 0.3),
            removed: Some(vec![pt(0.0, 5.0 / 12.0), pt(0.5, 5.0 / 12.0), pt(0.5, 0.05)]),
            expected: vec![false, false, true],
        },
        case("middle strip", diameter_curve(), CrossingQuery::Quad(middle_strip()), &[true]),
        case(
            "middle strip, in and out first",
            class(&[(0.0, 5.0 / 12.0), (0.45, 0.4), (0.2, 0.6), (1.0, 7.0 / 12.0)]),
            CrossingQuery::Quad(middle_strip()),
            &[true],
        ),
        case(
            "strip above both marks",
            class(&[(0.0, 5.0 / 12.0), (0.3, 0.95), (0.7, 0.95), (1.0, 7.0 / 12.0)]),
            CrossingQuery::Quad(row4),
            &[false, false],
        ),
    ]
}

/// Resolution, fjord parameters and base point of [`square_with_slot`].
pub const SLOT_N: u32 = 64;
pub const SLOT_DELTA: f64 = 0.002;
pub const SLOT_C: f64 = 16.0;

/// The unit square at `n = 64` with a one-cell-wide slot of length 1
/// rising from the middle of its top side.
pub fn square_with_slot() -> LatticeDomain {
    let mut cells: Vec<Cell> = (0..64).flat_map(|i| (0..64).map(move |j| Cell::new(i, j))).collect();
    cells.extend((64..128).map(|j| Cell::new(32, j)));
    LatticeDomain::unmarked(SLOT_N, cells, pt(0.5, 0.5)).expect("fixture domain is valid")
}

/// Points along the axis of the slot.
pub fn slot_axis() -> Vec<Point> {
    (0..40).map(|t| pt(32.5 / 64.0, 1.0 + (t as f64 + 0.5) / 40.0)).collect()
}

/// Centre of the top cell of the slot.
pub fn slot_tip() -> Point {
    pt(32.5 / 64.0, 2.0 - 0.5 / 64.0)
}

/// Centre and radius of the disc behind [`lattice_disc`].
pub const DISC_CENTRE: Point = pt(0.5, 0.5);
pub const DISC_RADIUS: f64 = 0.4;

/// A 256-gon inscribed in the circle `|z - DISC_CENTRE| = DISC_RADIUS`.
pub fn disc_polygon() -> Vec<Point> {
    (0..256).map(|k| DISC_CENTRE + Point::from_polar(DISC_RADIUS, 2.0 * std::f64::consts::PI * k as f64 / 256.0)).collect()
}

/// The largest lattice domain at resolution `n` inside [`disc_polygon`],
/// based at the centre.
pub fn lattice_disc(n: u32) -> conflimit_core::Result<LatticeDomain> {
    conflimit_core::lattice::approximate_domain(&disc_polygon(), DISC_CENTRE, n)
}
