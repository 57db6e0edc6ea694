//! O(4) multiplets and their elliptic curves.
//!
//! A multiplet is the quartic
//!
//! ```text
//! P(ζ) = ζ²η(ζ) = z̄ + v̄ζ + xζ² − vζ³ + zζ⁴
//!      = ρ (ζ − α)(ᾱζ + 1)(ζ − β)(β̄ζ + 1) / ((1 + |α|²)(1 + |β|²))
//! ```
//!
//! with `x` real and `ρ > 0`. The curve `η² = P(ζ)` is mapped to the
//! Weierstrass cubic by `(X − e3)/ρ = [ζ, −1/ᾱ, α, β]`, under which
//! `dζ/2√P = dX/2Y`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent_sphere::{chordal, distance, SpherePoint};
use crate::error::{Error, Result};
use crate::poly;
use crate::special_functions::{incomplete_f, Amplitude, EllipticModulus};
use crate::tolerances::ROOT_COLLISION;
use crate::weierstrass::{JacobianPoint, WeierstrassModel};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An O(4) multiplet in coefficient and root form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajoranaQuartic {
    pub z: Complex64,
    pub v: Complex64,
    pub x: f64,
    pub rho: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

/// `k`, `k'` of the root pair and their Fubini–Study distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordalInvariants {
    pub modulus: EllipticModulus,
    pub delta_ab: f64,
}

/// The real pencil data attached to a multiplet: `Y² = det(A + X·I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CayleyPair {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
    pub x_plus: f64,
    pub x_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
}

impl CayleyPair {
    /// The four curve points `(x∓, ±v∓(x+ − x−)/2)`, `(x+, ±i v+(x+ − x−)/2)`.
    pub fn four_points(&self) -> [(Complex64, Complex64); 4] {
        let d = self.x_plus - self.x_minus;
        [
            (c(self.x_minus, 0.0), c(self.v_minus * d / 2.0, 0.0)),
            (c(self.x_minus, 0.0), c(-self.v_minus * d / 2.0, 0.0)),
            (c(self.x_plus, 0.0), c(0.0, self.v_plus * d / 2.0)),
            (c(self.x_plus, 0.0), c(0.0, -self.v_plus * d / 2.0)),
        ]
    }

    /// Coefficients `[c0, c1, c2, c3]` of `det(A + X·B)`, ascending.
    pub fn det_polynomial(&self) -> [f64; 4] {
        det_pencil_polynomial(&self.a, &self.b)
    }
}

/// Ascending coefficients of `det(A + X·B)` for real 3×3 matrices, by
/// interpolation at four nodes.
pub fn det_pencil_polynomial(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [f64; 4] {
    let det = |t: f64| {
        let m = |i: usize, j: usize| a[i][j] + t * b[i][j];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    };
    // exact for cubics: values at −1, 0, 1, 2
    let (fm, f0, f1, f2) = (det(-1.0), det(0.0), det(1.0), det(2.0));
    let c3 = (f2 - 3.0 * f1 + 3.0 * f0 - fm) / 6.0;
    let c2 = (f1 + fm - 2.0 * f0) / 2.0;
    let c1 = (f1 - fm) / 2.0 - c3;
    [f0, c1, c2, c3]
}

/// Jacobian images of a sphere point and of its antipode, related by
/// `ū_ζ + u_{−1/ζ̄} = ω2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCoordinate {
    pub u: JacobianPoint,
    pub u_antipode: JacobianPoint,
    /// `ζ` is a root of the quartic, i.e. a branch point of the curve.
    pub at_branch_point: bool,
}

impl JacobianCoordinate {
    /// `u⁻ = u_ζ − u_{−1/ζ̄}`.
    pub fn u_minus(&self) -> JacobianPoint {
        self.u - self.u_antipode
    }

    /// `u⁺ = u_ζ + u_{−1/ζ̄}`.
    pub fn u_plus(&self) -> JacobianPoint {
        self.u + self.u_antipode
    }
}

fn product_coefficients(alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    // (ζ − α)(ᾱζ + 1) = −α + (1 − |α|²)ζ + ᾱζ²
    let f1 = [-alpha, c(1.0 - alpha.norm_sqr(), 0.0), alpha.conj()];
    let f2 = [-beta, c(1.0 - beta.norm_sqr(), 0.0), beta.conj()];
    let mut out = vec![c(0.0, 0.0); 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += f1[i] * f2[j];
        }
    }
    out
}

impl MajoranaQuartic {
    /// Multiplet with roots `α`, `β` (and their antipodes) and scale `ρ`.
    pub fn from_roots(rho: f64, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("rho = {rho} must be positive")));
        }
        let (k, kp) = chordal(&alpha.into(), &beta.into());
        if kp < ROOT_COLLISION {
            return Err(Error::Degenerate("coincident roots α = β".into()));
        }
        if k < ROOT_COLLISION {
            return Err(Error::Degenerate("antipodal roots β = −1/ᾱ".into()));
        }
        let n = rho / ((1.0 + alpha.norm_sqr()) * (1.0 + beta.norm_sqr()));
        let p = product_coefficients(alpha, beta);
        Ok(Self {
            z: p[4] * n,
            v: -p[3] * n,
            x: p[2].re * n,
            rho,
            alpha,
            beta,
        })
    }

    /// Multiplet from its coefficients; the roots are extracted numerically
    /// and paired antipodally.
    pub fn from_coefficients(z: Complex64, v: Complex64, x: f64) -> Result<Self> {
        let coeffs = [z.conj(), v.conj(), c(x, 0.0), -v, z];
        let scale = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Degenerate("zero multiplet".into()));
        }
        let mut roots: Vec<SpherePoint> = poly::roots(&coeffs)?.into_iter().map(SpherePoint::Finite).collect();
        while roots.len() < 4 {
            roots.push(SpherePoint::Infinity);
        }
        let pairs = pair_antipodal(&roots)?;
        // finite representatives inside the closed unit disc
        let rep = |p: (SpherePoint, SpherePoint)| -> Complex64 {
            match (p.0.finite(), p.1.finite()) {
                (Some(a), Some(b)) => {
                    if a.norm() <= b.norm() {
                        a
                    } else {
                        b
                    }
                }
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => unreachable!("two roots at infinity are never antipodal"),
            }
        };
        let mut reps = [rep(pairs[0]), rep(pairs[1])];
        reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let (alpha, mut beta) = (reps[0], reps[1]);
        let (k, kp) = chordal(&alpha.into(), &beta.into());
        if kp < ROOT_COLLISION || k < ROOT_COLLISION {
            return Err(Error::Degenerate("double root of the quartic".into()));
        }
        let p = product_coefficients(alpha, beta);
        let num: f64 = coeffs.iter().zip(&p).map(|(q, r)| (r.conj() * q).re).sum();
        let den: f64 = p.iter().map(|r| r.norm_sqr()).sum();
        let mut n = num / den;
        if n < 0.0 {
            // replacing one root by its antipode flips the sign of ρ
            beta = -c(1.0, 0.0) / beta.conj();
            let p = product_coefficients(alpha, beta);
            let num: f64 = coeffs.iter().zip(&p).map(|(q, r)| (r.conj() * q).re).sum();
            let den: f64 = p.iter().map(|r| r.norm_sqr()).sum();
            n = num / den;
        }
        let rho = n * (1.0 + alpha.norm_sqr()) * (1.0 + beta.norm_sqr());
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Degenerate("could not normalise the root form".into()));
        }
        Ok(Self {
            z,
            v,
            x,
            rho,
            alpha,
            beta,
        })
    }

    /// Ascending coefficients of `P(ζ) = ζ²η(ζ)`.
    pub fn coefficients(&self) -> [Complex64; 5] {
        [self.z.conj(), self.v.conj(), c(self.x, 0.0), -self.v, self.z]
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        poly::eval(&self.coefficients(), zeta)
    }

    /// The four roots `α, −1/ᾱ, β, −1/β̄`.
    pub fn roots(&self) -> [SpherePoint; 4] {
        let a = SpherePoint::new(self.alpha);
        let b = SpherePoint::new(self.beta);
        [a, a.antipode(), b, b.antipode()]
    }

    pub fn chordal_invariants(&self) -> ChordalInvariants {
        let (k, kp) = chordal(&self.alpha.into(), &self.beta.into());
        ChordalInvariants {
            modulus: EllipticModulus::from_pair(k, kp).expect("non-degenerate multiplet"),
            delta_ab: 2.0 * kp.atan2(k),
        }
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.chordal_invariants().modulus
    }

    pub fn weierstrass(&self) -> Result<WeierstrassModel> {
        WeierstrassModel::from_rho_k(self.rho, self.modulus())
    }

    /// `(g2, g3)` from the coefficients directly.
    pub fn g2_g3(&self) -> (f64, f64) {
        let z2 = self.z.norm_sqr();
        let v2 = self.v.norm_sqr();
        let x = self.x;
        let g2 = 4.0 * z2 + v2 + x * x / 3.0;
        let g3 = 8.0 / 3.0 * z2 * x
            - v2 * x / 3.0
            - 2.0 / 27.0 * x * x * x
            - 2.0 * (self.z * self.v.conj() * self.v.conj()).re;
        (g2, g3)
    }

    /// `c = (1 + ᾱβ)/(1 + |α|²)`, the value of the cross-ratio at `ζ = ∞`.
    fn nu_infinity(&self) -> Complex64 {
        (c(1.0, 0.0) + self.alpha.conj() * self.beta) / (1.0 + self.alpha.norm_sqr())
    }

    fn e3(&self) -> f64 {
        let k2 = self.modulus().k().powi(2);
        -self.rho / 3.0 * (k2 + 1.0)
    }

    /// `X_ζ = e3 + ρ·[ζ, −1/ᾱ, α, β]`; `ζ = β` goes to `X = ∞`.
    pub fn zeta_to_x(&self, zeta: SpherePoint) -> SpherePoint {
        let cc = self.nu_infinity();
        let e3 = self.e3();
        match zeta {
            SpherePoint::Infinity => SpherePoint::Finite(cc * self.rho + e3),
            SpherePoint::Finite(z) => {
                let d = z - self.beta;
                if d.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(cc * (z - self.alpha) / d * self.rho + e3)
                }
            }
        }
    }

    /// Inverse of [`zeta_to_x`](Self::zeta_to_x).
    pub fn x_to_zeta(&self, x: SpherePoint) -> SpherePoint {
        let cc = self.nu_infinity();
        match x {
            SpherePoint::Infinity => SpherePoint::Finite(self.beta),
            SpherePoint::Finite(x) => {
                let nu = (x - self.e3()) / self.rho;
                let d = nu - cc;
                if d.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((nu * self.beta - cc * self.alpha) / d)
                }
            }
        }
    }

    /// `X∞ = x/3 − βv + 2β²z`.
    pub fn x_infinity_from_coefficients(&self) -> Complex64 {
        c(self.x / 3.0, 0.0) - self.beta * self.v + self.beta * self.beta * self.z * 2.0
    }

    /// The curve point `(X, Y)` over `ζ` on the sheet of the principal
    /// `√P(ζ)` (`sheet = 1`) or its negative (`sheet = −1`). At `ζ = ∞` the
    /// principal root is `√z·ζ²`.
    pub fn curve_point(&self, zeta: SpherePoint, sheet: f64) -> Result<(Complex64, Complex64)> {
        let cc = self.nu_infinity();
        let dxdz_num = cc * (self.alpha - self.beta) * self.rho;
        match zeta {
            SpherePoint::Infinity => {
                let x = self.zeta_to_x(zeta).finite().expect("β is finite");
                Ok((x, self.z.sqrt() * dxdz_num * sheet))
            }
            SpherePoint::Finite(z) => {
                let d = z - self.beta;
                if d.norm() < 1e-14 * (1.0 + z.norm()) {
                    return Err(Error::Pole { re: z.re, im: z.im });
                }
                let x = self.zeta_to_x(zeta).finite().expect("ζ ≠ β");
                let eta = self.eval(z).sqrt() * sheet;
                Ok((x, eta * dxdz_num / (d * d)))
            }
        }
    }

    /// Jacobian images `u_ζ`, `u_{−1/ζ̄}`.
    ///
    /// The pair is tied by `ū_ζ + u_{−1/ζ̄} = ω2`; the remaining overall sign
    /// is chosen so that `u⁻ − ω'` has the sign of `π − δ_αζ − δ_βζ`, which
    /// makes `u⁻` agree with [`u_minus_via_f`](Self::u_minus_via_f).
    pub fn jacobian_coordinate(&self, zeta: SpherePoint) -> Result<JacobianCoordinate> {
        let w = self.weierstrass()?;
        let at_branch_point = self.roots().iter().any(|r| distance(r, &zeta) < ROOT_COLLISION);
        let u0 = self.raw_u(&w, zeta)?;
        let half = w.half_periods();
        let target = PI - distance(&self.alpha.into(), &zeta) - distance(&self.beta.into(), &zeta);
        let lat = w.lattice();
        let pick = |u: Complex64| {
            let partner = half[1] - u.conj();
            let um = lat.reduce(u - partner - w.omega_prime()).0;
            (u, partner, um.re)
        };
        let (u, partner, r1) = pick(u0);
        let (u, partner) = if r1 * target < 0.0 {
            let (u2, p2, _) = pick(-u0);
            (u2, p2)
        } else {
            (u, partner)
        };
        Ok(JacobianCoordinate {
            u: w.point(u),
            u_antipode: w.point(partner),
            at_branch_point,
        })
    }

    fn raw_u(&self, w: &WeierstrassModel, zeta: SpherePoint) -> Result<Complex64> {
        if let SpherePoint::Finite(z) = zeta {
            if (z - self.beta).norm() < 1e-12 * (1.0 + z.norm()) {
                // X = ∞ is the origin of the Jacobian
                return Ok(c(0.0, 0.0));
            }
        }
        let (x, y) = self.curve_point(zeta, 1.0)?;
        Ok(w.abel_jacobi(x, y)?.u())
    }

    /// `sin D_ζ = sin((π − δ_αζ − δ_βζ)/2)/k`.
    pub fn sin_d(&self, zeta: SpherePoint) -> f64 {
        let daz = distance(&self.alpha.into(), &zeta);
        let dbz = distance(&self.beta.into(), &zeta);
        ((PI - daz - dbz) / 2.0).sin() / self.modulus().k()
    }

    /// `u⁻_ζ = F(sin D_ζ, k)/√ρ + ω'`.
    pub fn u_minus_via_f(&self, zeta: SpherePoint) -> Result<JacobianPoint> {
        let w = self.weierstrass()?;
        Ok(w.point(self.u_minus_raw(zeta)?))
    }

    /// Unreduced `F(sin D_ζ, k)/√ρ + ω'`.
    pub fn u_minus_raw(&self, zeta: SpherePoint) -> Result<Complex64> {
        let s = self.sin_d(zeta);
        // rounding at the ends of the admissible range
        let s = if s.abs() > 1.0 && s.abs() < 1.0 + 1e-12 {
            s.signum()
        } else {
            s
        };
        if s.abs() > 1.0 {
            return Err(Error::Geometric(format!(
                "sin D = {s} outside [-1, 1]: triangle inequality violated"
            )));
        }
        let f = incomplete_f(&Amplitude::from_sin(s)?, &self.modulus())?;
        Ok(c(f / self.rho.sqrt(), complete_k_prime(self)? / self.rho.sqrt()))
    }

    /// `x± = (x ± 6|z|)/3`, `v+ = Im(v/√z)`, `v− = Re(v/√z)` and the matrix `A`.
    pub fn cayley_pair(&self) -> Result<CayleyPair> {
        let az = self.z.norm();
        if az < 1e-14 * (1.0 + self.v.norm() + self.x.abs()) {
            return Err(Error::Degenerate("z = 0: the Cayley form is undefined".into()));
        }
        let x_plus = (self.x + 6.0 * az) / 3.0;
        let x_minus = (self.x - 6.0 * az) / 3.0;
        let w = self.v / self.z.sqrt();
        let (v_plus, v_minus) = (w.im, w.re);
        let s = az.sqrt();
        let a = [
            [-x_plus, s * v_plus, 0.0],
            [s * v_plus, x_plus + x_minus, s * v_minus],
            [0.0, s * v_minus, -x_minus],
        ];
        let mut b = [[0.0; 3]; 3];
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Ok(CayleyPair {
            a,
            b,
            x_plus,
            x_minus,
            v_plus,
            v_minus,
        })
    }

    /// `u∞` and `u∞± = u∞ ± u0`.
    pub fn infinity_points(&self) -> Result<(JacobianPoint, JacobianPoint, JacobianPoint)> {
        let jc = self.jacobian_coordinate(SpherePoint::Infinity)?;
        Ok((jc.u, jc.u_plus(), jc.u_minus()))
    }

    /// The multiplet rotated by the SU(2) element `(a, b)`, `|a|² + |b|² = 1`:
    /// `P'(ζ) = (b̄ζ + a)⁴ P((āζ − b)/(b̄ζ + a))`.
    pub fn rotated(&self, a: Complex64, b: Complex64) -> Result<Self> {
        let p = self.coefficients();
        let num = [-b, a.conj()];
        let den = [a, b.conj()];
        let mul = |x: &[Complex64], y: &[Complex64]| {
            let mut out = vec![c(0.0, 0.0); x.len() + y.len() - 1];
            for (i, &xi) in x.iter().enumerate() {
                for (j, &yj) in y.iter().enumerate() {
                    out[i + j] += xi * yj;
                }
            }
            out
        };
        let mut total = [c(0.0, 0.0); 5];
        for (j, &pj) in p.iter().enumerate() {
            let mut term = vec![pj];
            for _ in 0..j {
                term = mul(&term, &num);
            }
            for _ in j..4 {
                term = mul(&term, &den);
            }
            for (t, v) in total.iter_mut().zip(term) {
                *t += v;
            }
        }
        Self::from_coefficients(total[4], -total[3], total[2].re)
    }
}

fn complete_k_prime(m: &MajoranaQuartic) -> Result<f64> {
    crate::special_functions::complete_k(&m.modulus().complement())
}

/// Group four sphere points into two antipodal pairs `{r, −1/r̄}`.
pub fn pair_antipodal(roots: &[SpherePoint]) -> Result<[(SpherePoint, SpherePoint); 2]> {
    assert_eq!(roots.len(), 4);
    // the three ways to split four points into two pairs
    let splits = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mismatch = |i: usize, j: usize| distance(&roots[i].antipode(), &roots[j]);
    let best = splits
        .iter()
        .map(|s| (s, mismatch(s[0].0, s[0].1).max(mismatch(s[1].0, s[1].1))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three candidates");
    if best.1 > 1e-6 {
        return Err(Error::Contract(format!(
            "roots do not form antipodal pairs (mismatch {:e})",
            best.1
        )));
    }
    let s = best.0;
    Ok([(roots[s[0].0], roots[s[0].1]), (roots[s[1].0], roots[s[1].1])])
}
