//! Interior (geodesic) distance inside a lattice domain.

use alloc::vec::Vec;

use super::raster::Raster;
use super::{CrossCut, LatticeDomain};
use crate::error::{bail, Result};
use crate::Point;

/// Default pixel refinement per cell.
pub const DEFAULT_REFINEMENT: u32 = 4;

/// Length of the shortest path from `z` to the cut inside the domain,
/// measured on the 8-neighbour pixel graph refined `k = 4` times.
pub fn interior_distance(dom: &LatticeDomain, z: Point, target: &CrossCut) -> Result<f64> {
    interior_distance_with(dom, z, target, DEFAULT_REFINEMENT)
}

/// [`interior_distance`] with an explicit refinement.
pub fn interior_distance_with(dom: &LatticeDomain, z: Point, target: &CrossCut, k: u32) -> Result<f64> {
    if !dom.contains_closed(z) {
        bail!(InvalidInput, "point {z} is outside the domain");
    }
    if target.polyline.is_empty() {
        bail!(InvalidInput, "empty target cut");
    }
    let raster = Raster::new(dom, k);
    let field = distance_field(&raster, target)?;
    Ok(read_distance(&raster, &field, z, target))
}

/// Geodesic distance from the cut to every pixel centre.
pub(crate) fn distance_field(raster: &Raster, target: &CrossCut) -> Result<Vec<f64>> {
    // Every inside pixel the cut passes close to, on both sides of it.
    let reach = 0.5 * core::f64::consts::SQRT_2 * raster.pixel();
    let mut near: Vec<usize> = raster.rasterize_polyline(&target.polyline, target.closed);
    let touched = near.clone();
    near.extend(touched.iter().flat_map(|&p| raster.neighbors8(p)));
    near.sort_unstable();
    near.dedup();
    let sources: Vec<(usize, f64)> = near
        .into_iter()
        .filter(|&p| raster.inside(p))
        .map(|p| (p, target.distance_to(raster.center(p))))
        .filter(|&(_, d)| d <= reach)
        .collect();
    if sources.is_empty() {
        bail!(InvalidInput, "target cut does not meet the domain");
    }
    Ok(raster.dijkstra(&sources, raster.inside_mask()))
}

pub(crate) fn read_distance(raster: &Raster, field: &[f64], z: Point, target: &CrossCut) -> f64 {
    let euclid = target.distance_to(z);
    let Some(p) = raster.inside_pixel_near(z) else {
        return f64::INFINITY;
    };
    let c = raster.center(p);
    let src = target.distance_to(c);
    // Pixels on the cut: the straight segment is the geodesic.
    let d = if (field[p] - src).abs() < 1e-15 && src <= raster.pixel() {
        euclid
    } else {
        field[p] + (z - c).norm()
    };
    d.max(euclid)
}
