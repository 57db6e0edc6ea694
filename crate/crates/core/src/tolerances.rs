//! Default tolerances shared by the library and the CLI.

/// Incidence of points and lines, on-conic residuals.
pub const INCIDENCE: f64 = 1e-10;
/// Closure verdicts (Poncelet chains, lattice conditions).
pub const CLOSURE: f64 = 1e-8;
/// Acceptance of a point as lying on a Weierstrass cubic.
pub const ON_CURVE: f64 = 1e-8;
/// Below this a modulus is treated as its trigonometric/hyperbolic limit.
pub const DEGENERATE_MODULUS: f64 = 1e-8;
/// Distance below which a point counts as a lattice point (a pole).
pub const POLE: f64 = 1e-12;
/// Two polynomial roots closer than this are considered a collision.
pub const ROOT_COLLISION: f64 = 1e-8;
