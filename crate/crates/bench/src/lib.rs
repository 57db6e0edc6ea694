//! Shared fixtures for the benchmarks.

use ellipton_core::{c64, MajoranaQuartic, WeierstrassModel};

/// A generic multiplet with no special symmetry.
pub fn multiplet() -> MajoranaQuartic {
    MajoranaQuartic::from_roots(1.8, c64(0.4, -0.3), c64(-0.9, 1.2)).expect("valid roots")
}

pub fn lattice() -> WeierstrassModel {
    WeierstrassModel::from_invariants(3.0, 1.0).expect("positive discriminant")
}
