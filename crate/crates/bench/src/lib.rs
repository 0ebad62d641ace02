//! Shared fixtures for the benchmarks.

use squeeze_core::design::{GammaSpec, ThetaDesign};
use squeeze_core::mathieu::{MathieuParams, ScanGrid, DEFAULT_INTERVAL};

pub fn squeezing_point() -> MathieuParams {
    MathieuParams::new(1.217, 0.844)
}

pub fn solid_design() -> ThetaDesign {
    ThetaDesign::solve(2.0, -3.0, 0.0, GammaSpec::Sin2).expect("reference design solves")
}

/// A coarse raster around the squeezing point.
pub fn small_grid(n: usize) -> ScanGrid {
    ScanGrid::new((1.1, 1.4), (0.7, 1.0), n, n, DEFAULT_INTERVAL).expect("valid grid")
}
