//! Spin-1/2 coherent states on the Riemann sphere and spherical trigonometry.
//!
//! `|ζ⟩ = (|↓⟩ + ζ|↑⟩)/√(1 + |ζ|²)`, so that
//! `⟨α|β⟩ = (1 + ᾱβ)/√((1 + |α|²)(1 + |β|²))`. The state at `ζ = ∞` is
//! `|↑⟩`, the limit along the positive real axis.
//!
//! The embedding into the unit sphere is
//! `ζ ↦ (2 Re ζ, 2 Im ζ, 1 − |ζ|²)/(1 + |ζ|²)`: `ζ = 0` is the north pole,
//! `ζ = ∞` the south pole, and `ζ ↦ −1/ζ̄` is `n ↦ −n`. With this choice the
//! phase of a cyclic product of overlaps is half the area of the polygon,
//! counted positive when the vertices run counter-clockwise seen from outside.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_functions::{complete_k, incomplete_f, Amplitude, EllipticModulus};

/// A point of `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn new(zeta: Complex64) -> Self {
        SpherePoint::Finite(zeta)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// `−1/ζ̄`.
    pub fn antipode(&self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) if z.norm() == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(-Complex64::new(1.0, 0.0) / z.conj()),
        }
    }

    /// Normalised state components `(c↓, c↑)`.
    pub fn state(&self) -> (Complex64, Complex64) {
        match self {
            SpherePoint::Infinity => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            SpherePoint::Finite(z) => {
                let n = (1.0 + z.norm_sqr()).sqrt();
                (Complex64::new(1.0 / n, 0.0), z / n)
            }
        }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        match self {
            SpherePoint::Infinity => [0.0, 0.0, -1.0],
            SpherePoint::Finite(z) => {
                let r2 = z.norm_sqr();
                let d = 1.0 + r2;
                [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - r2) / d]
            }
        }
    }

    pub fn from_unit_vector(n: [f64; 3]) -> Self {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let (x, y, z) = (n[0] / norm, n[1] / norm, n[2] / norm);
        if z <= -1.0 + 1e-300 && x == 0.0 && y == 0.0 {
            return SpherePoint::Infinity;
        }
        // inverse stereographic projection from the south pole
        SpherePoint::Finite(Complex64::new(x, y) / (1.0 + z))
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

/// `⟨a|b⟩`.
pub fn overlap(a: &SpherePoint, b: &SpherePoint) -> Complex64 {
    let (a0, a1) = a.state();
    let (b0, b1) = b.state();
    a0.conj() * b0 + a1.conj() * b1
}

/// `(k, k')` with `k = |⟨a|b⟩|` and `k' = |⟨−1/ā|b⟩|`, normalised so that
/// `k² + k'² = 1`.
pub fn chordal(a: &SpherePoint, b: &SpherePoint) -> (f64, f64) {
    let k = overlap(a, b).norm();
    let kp = overlap(&a.antipode(), b).norm();
    let r = k.hypot(kp);
    (k / r, kp / r)
}

/// Fubini–Study (great-circle) distance `δ = 2·atan2(k', k)`.
pub fn distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    let (k, kp) = chordal(a, b);
    2.0 * kp.atan2(k)
}

/// Cross-ratio `[z1, z2, z3, z4] = (z1 − z3)(z2 − z4)/((z1 − z4)(z2 − z3))`.
pub fn cross_ratio(z: [Complex64; 4]) -> Complex64 {
    (z[0] - z[2]) * (z[1] - z[3]) / ((z[0] - z[3]) * (z[1] - z[2]))
}

/// The same cross-ratio written with coherent-state overlaps.
pub fn cross_ratio_coherent(z: [SpherePoint; 4]) -> Complex64 {
    let a1 = z[0].antipode();
    let a2 = z[1].antipode();
    overlap(&a1, &z[2]) * overlap(&a2, &z[3]) / (overlap(&a1, &z[3]) * overlap(&a2, &z[2]))
}

/// Product of the moduli of consecutive overlaps and the polygon area in
/// `[0, 4π)`, from the phase of the cyclic overlap product.
pub fn polygon_area_phase(points: &[SpherePoint]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Contract("a polygon needs at least three vertices".into()));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..points.len() {
        let o = overlap(&points[i], &points[(i + 1) % points.len()]);
        if o.norm() < 1e-12 {
            return Err(Error::Degenerate(format!(
                "consecutive vertices {} and {} are antipodal",
                i,
                (i + 1) % points.len()
            )));
        }
        prod *= o;
    }
    Ok((prod.norm(), (2.0 * prod.arg()).rem_euclid(4.0 * PI)))
}

/// The lune phase `φ` of `⟨−1/ᾱ|β⟩⟨β|α⟩ = k'k·e^{iφ}`, with the modulus.
///
/// Geometrically `φ` is the signed angle at `α` from the meridian through
/// `ζ = 0` to the geodesic toward `β`.
pub fn lune_phase(alpha: &SpherePoint, beta: &SpherePoint) -> Result<(f64, f64)> {
    let p = overlap(&alpha.antipode(), beta) * overlap(beta, alpha);
    let (k, kp) = chordal(alpha, beta);
    if k < 1e-12 || kp < 1e-12 {
        return Err(Error::Degenerate("lune of coincident or antipodal points".into()));
    }
    Ok((p.arg(), p.norm()))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn tangent(at: [f64; 3], toward: [f64; 3]) -> [f64; 3] {
    let d = dot(at, toward);
    [toward[0] - d * at[0], toward[1] - d * at[1], toward[2] - d * at[2]]
}

/// Signed angle at `vertex` from the geodesic toward `p` to the geodesic
/// toward `q`, positive counter-clockwise seen from outside.
pub fn vertex_angle(vertex: &SpherePoint, p: &SpherePoint, q: &SpherePoint) -> f64 {
    let n = vertex.unit_vector();
    let tp = tangent(n, p.unit_vector());
    let tq = tangent(n, q.unit_vector());
    dot(n, cross(tp, tq)).atan2(dot(tp, tq))
}

/// A convex spherical triangle: side `a` is opposite vertex `A`, etc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalTriangle {
    pub vertices: Option<[SpherePoint; 3]>,
    pub sides: [f64; 3],
    pub angles: [f64; 3],
}

impl SphericalTriangle {
    /// Sides and angles of the triangle with the given vertices.
    pub fn from_vertices(v: [SpherePoint; 3]) -> Result<Self> {
        let sides = [distance(&v[1], &v[2]), distance(&v[2], &v[0]), distance(&v[0], &v[1])];
        let angles = [
            vertex_angle(&v[0], &v[1], &v[2]).abs(),
            vertex_angle(&v[1], &v[2], &v[0]).abs(),
            vertex_angle(&v[2], &v[0], &v[1]).abs(),
        ];
        let t = Self {
            vertices: Some(v),
            sides,
            angles,
        };
        t.validate()?;
        Ok(t)
    }

    /// Triangle given by its six elements, which must be mutually consistent.
    pub fn from_elements(sides: [f64; 3], angles: [f64; 3]) -> Result<Self> {
        let t = Self {
            vertices: None,
            sides,
            angles,
        };
        t.validate()?;
        Ok(t)
    }

    /// Complete a triangle from two sides and the included angle (the angle
    /// at the vertex where `a` and `b` meet is `C`).
    pub fn from_sas(a: f64, b: f64, big_c: f64) -> Result<Self> {
        let cos_c = a.cos() * b.cos() + a.sin() * b.sin() * big_c.cos();
        let c = cos_c.clamp(-1.0, 1.0).acos();
        let angle = |opp: f64, s1: f64, s2: f64| {
            ((opp.cos() - s1.cos() * s2.cos()) / (s1.sin() * s2.sin()))
                .clamp(-1.0, 1.0)
                .acos()
        };
        Self::from_elements([a, b, c], [angle(a, b, c), angle(b, c, a), big_c])
    }

    fn validate(&self) -> Result<()> {
        let all = self.sides.iter().chain(self.angles.iter());
        if all.clone().any(|x| !(0.0..=PI).contains(x)) {
            return Err(Error::Geometric("sides and angles must lie in [0, π]".into()));
        }
        let [a, b, c] = self.sides;
        if a + b < c - 1e-12 || b + c < a - 1e-12 || c + a < b - 1e-12 || a + b + c > 2.0 * PI + 1e-12 {
            return Err(Error::Geometric("triangle inequalities violated".into()));
        }
        Ok(())
    }

    /// The three ratios `sin a / sin A`, `sin b / sin B`, `sin c / sin C`.
    pub fn sine_ratios(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.sides[i].sin() / self.angles[i].sin())
    }

    /// Spherical excess `A + B + C − π`.
    pub fn excess(&self) -> f64 {
        self.angles.iter().sum::<f64>() - PI
    }
}

/// Outcome of [`legendre_addition_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendreCheck {
    pub k: f64,
    pub lhs: f64,
    pub two_k: f64,
    pub residual: f64,
}

/// `|F(A, k) + F(B, k) + F(C, k) − 2K(k)|` with `k = sin a / sin A`.
///
/// The amplitudes are the angles themselves, so obtuse angles use the
/// periodic extension of `F`.
pub fn legendre_addition_check(t: &SphericalTriangle) -> Result<LegendreCheck> {
    let r = t.sine_ratios();
    let k = r[0];
    let spread = (r[0] - r[1]).abs().max((r[1] - r[2]).abs());
    if !k.is_finite() || spread > 1e-10 * k.max(1.0) {
        return Err(Error::Geometric(format!(
            "inconsistent sine ratios {:?}: malformed triangle",
            r
        )));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus k = {k} outside (0, 1)")));
    }
    // dn F(A) = cos a must stay non-negative for real amplitudes
    if let Some(a) = t.sides.iter().find(|&&a| a >= FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "side {a} ≥ π/2: needs dn < 0, not a real amplitude sum"
        )));
    }
    let m = EllipticModulus::new(k)?;
    let mut lhs = 0.0;
    for &a in &t.angles {
        lhs += incomplete_f(&Amplitude::from_phi(a), &m)?;
    }
    let two_k = 2.0 * complete_k(&m)?;
    Ok(LegendreCheck {
        k,
        lhs,
        two_k,
        residual: (lhs - two_k).abs(),
    })
}
