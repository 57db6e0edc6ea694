//! Elliptic special functions and the projective geometry built on them.
//!
//! The crate is layered bottom-up:
//!
//! * [`special_functions`]: complete/incomplete Legendre integrals of the
//!   first kind and the Jacobi functions `sn`, `cn`, `dn`, real and complex.
//! * [`weierstrass`]: rectangular Weierstrass lattices, `℘`, `ζ`, `σ`, the
//!   Abel–Jacobi map and the `π_i` third-kind periods.
//! * [`coherent_sphere`]: spin-1/2 coherent-state overlaps on the Riemann
//!   sphere, spherical polygon phases and the Legendre addition check.
//! * [`o4_curve`]: O(4) multiplets, their Weierstrass models, Cayley matrices
//!   and the Jacobian coordinates of sphere points.
//! * [`conic_pencil`]: plane conics, pencils, Poncelet steps and the
//!   geometric/algebraic closure tests.
//! * [`o4_integrals`]: the contour integrals `I_m` in closed form.
//! * [`dn_ale`]: deformed spectral roots, the lattice closure constraint and
//!   the Newton solver for the two Legendre relations.
//!
//! Cubic conventions: curves are written `Y² = X³ − g2·X − g3`, so that
//! `X = ℘(u)` and `2Y = ℘'(u)` for the standard `℘` with invariants
//! `(4·g2, 4·g3)`. All public functions speak this convention.

pub mod coherent_sphere;
pub mod conic_pencil;
pub mod dn_ale;
pub mod error;
pub mod o4_curve;
pub mod o4_integrals;
pub mod poly;
pub mod quadrature;
pub mod special_functions;
pub mod tolerances;
pub mod weierstrass;

pub use num_complex::Complex64;

pub use coherent_sphere::SpherePoint;
pub use conic_pencil::{Conic, IncidencePoint, Pencil, ProjLine, ProjPoint};
pub use dn_ale::{MonopoleConfig, O2Multiplet};
pub use error::{Error, Result};
pub use o4_curve::{CayleyPair, MajoranaQuartic};
pub use special_functions::{Amplitude, EllipticModulus};
pub use weierstrass::{JacobianPoint, Lattice, WeierstrassModel};

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
