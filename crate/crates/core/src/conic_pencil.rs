//! Plane conics, the pencil `C_X = A + X·B` and Poncelet chains.
//!
//! Points and lines of the projective plane are homogeneous triples; all
//! incidence and conic equations use the bilinear pairing `Σ x_i y_i`, so
//! everything works over ℂ. Realness is reported, never assumed.
//!
//! The Jacobian picture: fix a base point `p0 ∈ A ∩ B`. A point `P ∈ B` has
//! the parameter `X(P)` of the unique conic `C_X` tangent to the line `p0P`
//! at `p0`. With `X = ℘(u) + shift` on the normalised Cayley cubic
//! `Y² = det(A + X·B)`, a state `(P, L)` with `L` tangent to `C_{X0}` is
//! labelled by the `u` for which the second point of `L` on `B` is
//! `P_{℘(u0 − u)}`, and one Poncelet step is `u ↦ u + u0`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::tolerances::INCIDENCE;
use crate::weierstrass::WeierstrassModel;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn cross(a: &[C; 3], b: &[C; 3]) -> [C; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &[C; 3]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn pair(a: &[C; 3], b: &[C; 3]) -> C {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalise(v: [C; 3]) -> Option<[C; 3]> {
    let n = norm3(&v);
    if !(n > 0.0 && n.is_finite()) {
        return None;
    }
    let lead = v.iter().find(|x| x.norm() > 1e-12 * n).copied()?;
    if (n - 1.0).abs() < 4.0 * f64::EPSILON && lead.im == 0.0 && lead.re > 0.0 {
        return Some(v);
    }
    let phase = lead.conj() / lead.norm() / n;
    Some([v[0] * phase, v[1] * phase, v[2] * phase])
}

macro_rules! homogeneous {
    ($name:ident, $what:literal) => {
        #[doc = concat!("A ", $what, " of the projective plane, unit norm with first nonzero entry real-positive.")]
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        pub struct $name {
            coords: [C; 3],
        }

        impl $name {
            pub fn new(coords: [C; 3]) -> Result<Self> {
                normalise(coords)
                    .map(|coords| Self { coords })
                    .ok_or_else(|| Error::Degenerate(concat!("zero ", $what).into()))
            }

            pub fn real(x: f64, y: f64, z: f64) -> Result<Self> {
                Self::new([c(x, 0.0), c(y, 0.0), c(z, 0.0)])
            }

            pub fn coords(&self) -> [C; 3] {
                self.coords
            }

            /// Sine of the angle between the representatives; zero iff equal.
            pub fn distance(&self, other: &Self) -> f64 {
                norm3(&cross(&self.coords, &other.coords))
            }

            /// Largest imaginary part of the normalised coordinates.
            pub fn imaginary_size(&self) -> f64 {
                self.coords.iter().map(|x| x.im.abs()).fold(0.0, f64::max)
            }

            pub fn is_real(&self) -> bool {
                self.imaginary_size() < 1e-9
            }
        }
    };
}

homogeneous!(ProjPoint, "point");
homogeneous!(ProjLine, "line");

impl ProjPoint {
    pub fn from_affine(x: f64, y: f64) -> Self {
        Self::real(x, y, 1.0).expect("nonzero")
    }

    /// Affine chart `z = 1`; `None` on the line at infinity.
    pub fn to_affine(&self) -> Option<(C, C)> {
        let z = self.coords[2];
        if z.norm() < 1e-14 {
            None
        } else {
            Some((self.coords[0] / z, self.coords[1] / z))
        }
    }

    /// The line through two distinct points.
    pub fn join(&self, other: &Self) -> Result<ProjLine> {
        ProjLine::new(cross(&self.coords, &other.coords))
    }
}

impl ProjLine {
    /// The common point of two distinct lines.
    pub fn meet(&self, other: &Self) -> Result<ProjPoint> {
        ProjPoint::new(cross(&self.coords, &other.coords))
    }

    /// Scale-free incidence `|(L, P)|` of unit representatives.
    pub fn incidence(&self, p: &ProjPoint) -> f64 {
        pair(&self.coords, &p.coords).norm()
    }

    /// Two independent points spanning the line.
    fn span(&self) -> ([C; 3], [C; 3]) {
        let e = |i: usize| {
            let mut v = [c(0.0, 0.0); 3];
            v[i] = c(1.0, 0.0);
            v
        };
        let mut cands: Vec<[C; 3]> = (0..3).map(|i| cross(&self.coords, &e(i))).collect();
        cands.sort_by(|a, b| norm3(b).total_cmp(&norm3(a)));
        let a = cands[0];
        // a second point orthogonal to a within the line
        let b = cross(&self.coords.map(|x| x.conj()), &a.map(|x| x.conj()));
        let b = b.map(|x| x.conj());
        (a, b)
    }
}

/// A conic `(x, Qx) = 0` with `Q` symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    q: Matrix3<C>,
    det: C,
}

impl Conic {
    pub fn new(q: Matrix3<C>) -> Result<Self> {
        if q != q.transpose() {
            return Err(Error::Contract("conic matrix is not symmetric".into()));
        }
        Ok(Self {
            q,
            det: q.determinant(),
        })
    }

    pub fn from_real(q: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_fn(|i, j| c(q[i][j], 0.0)))
    }

    /// `(x − cx)² + (y − cy)² = r²`.
    pub fn circle(cx: f64, cy: f64, r: f64) -> Self {
        Self::from_real([[1.0, 0.0, -cx], [0.0, 1.0, -cy], [-cx, -cy, cx * cx + cy * cy - r * r]]).expect("symmetric")
    }

    pub fn matrix(&self) -> Matrix3<C> {
        self.q
    }

    pub fn det(&self) -> C {
        self.det
    }

    fn scale(&self) -> f64 {
        self.q.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_smooth(&self) -> bool {
        self.det.norm() > 1e-12 * self.scale().powi(3)
    }

    fn require_smooth(&self) -> Result<()> {
        if self.is_smooth() {
            Ok(())
        } else {
            Err(Error::Degenerate("singular conic".into()))
        }
    }

    pub fn form(&self, x: &[C; 3], y: &[C; 3]) -> C {
        let v = self.q * Vector3::new(y[0], y[1], y[2]);
        x[0] * v[0] + x[1] * v[1] + x[2] * v[2]
    }

    /// Scale-free residual `|(P, QP)|` for a unit `P`.
    pub fn residual(&self, p: &ProjPoint) -> f64 {
        let k = p.coords();
        self.form(&k, &k).norm() / self.scale()
    }

    pub fn polar(&self, p: &ProjPoint) -> Result<ProjLine> {
        let v = self.q * Vector3::from(p.coords());
        ProjLine::new([v[0], v[1], v[2]])
    }

    /// The dual conic, with matrix `adj Q ∝ Q⁻¹`.
    pub fn dual(&self) -> Result<Conic> {
        self.require_smooth()?;
        let inv = self
            .q
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular conic".into()))?;
        let sym = (inv + inv.transpose()) * c(0.5, 0.0);
        Conic::new(sym)
    }

    /// Residual of a line on the dual conic, `|(L, Q⁻¹ L)|`.
    pub fn dual_residual(&self, l: &ProjLine) -> Result<f64> {
        let d = self.dual()?;
        let k = l.coords();
        Ok(d.form(&k, &k).norm() / d.scale())
    }
}

/// Both intersections of a line with a conic, over ℂ.
pub fn line_conic_intersections(l: &ProjLine, q: &Conic) -> Result<[ProjPoint; 2]> {
    let (a, b) = l.span();
    let (qaa, qab, qbb) = (q.form(&a, &a), q.form(&a, &b), q.form(&b, &b));
    // s·a + t·b with qaa s² + 2 qab s t + qbb t² = 0
    let disc = (qab * qab - qaa * qbb).sqrt();
    let mk = |s: C, t: C| ProjPoint::new([a[0] * s + b[0] * t, a[1] * s + b[1] * t, a[2] * s + b[2] * t]);
    let scale = q.scale();
    if qaa.norm() < 1e-14 * scale && qab.norm() < 1e-14 * scale && qbb.norm() < 1e-14 * scale {
        return Err(Error::Degenerate("line lies in the conic".into()));
    }
    if qbb.norm() >= qaa.norm() {
        // t/s roots, choosing the numerically stable pairing
        let sgn = if (qab.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
        let big = -qab - disc * sgn;
        if big.norm() == 0.0 {
            let p = mk(c(1.0, 0.0), c(0.0, 0.0))?;
            return Ok([p, p]);
        }
        Ok([mk(qbb, big)?, mk(big, qaa)?])
    } else {
        let sgn = if (qab.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
        let big = -qab - disc * sgn;
        if big.norm() == 0.0 {
            let p = mk(c(0.0, 0.0), c(1.0, 0.0))?;
            return Ok([p, p]);
        }
        Ok([mk(big, qaa)?, mk(qbb, big)?])
    }
}

/// Tangent lines from `P` to a smooth conic, and whether they coincide
/// (`P` on the conic).
pub fn tangents_from(p: &ProjPoint, conic: &Conic) -> Result<(ProjLine, ProjLine, bool)> {
    conic.require_smooth()?;
    if conic.residual(p) < INCIDENCE {
        let t = conic.polar(p)?;
        return Ok((t, t, true));
    }
    let polar = conic.polar(p)?;
    let [t1, t2] = line_conic_intersections(&polar, conic)?;
    let l1 = p.join(&t1)?;
    let l2 = p.join(&t2)?;
    let double = l1.distance(&l2) < 1e-8;
    Ok((l1, l2, double))
}

/// The second intersection of `L` with the conic, given one intersection
/// `P`; the flag is set when `L` is tangent at `P`.
pub fn second_intersection(l: &ProjLine, conic: &Conic, p: &ProjPoint) -> Result<(ProjPoint, bool)> {
    if l.incidence(p) > INCIDENCE || conic.residual(p) > INCIDENCE {
        return Err(Error::Contract(format!(
            "point is not on line ∩ conic (line {:e}, conic {:e})",
            l.incidence(p),
            conic.residual(p)
        )));
    }
    let pc = p.coords();
    let (a, b) = l.span();
    // a direction on L away from P
    let d = if norm3(&cross(&a, &pc)) >= norm3(&cross(&b, &pc)) {
        a
    } else {
        b
    };
    let pqd = conic.form(&pc, &d);
    let dqd = conic.form(&d, &d);
    let v = [
        pc[0] * dqd - d[0] * pqd * 2.0,
        pc[1] * dqd - d[1] * pqd * 2.0,
        pc[2] * dqd - d[2] * pqd * 2.0,
    ];
    let out = ProjPoint::new(v).map_err(|_| Error::Degenerate("line lies in the conic".into()))?;
    let double = out.distance(p) < 1e-8;
    Ok((if double { *p } else { out }, double))
}

/// The pencil `A + X·B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pencil {
    pub a: Conic,
    pub b: Conic,
    singular_params: [C; 3],
}

impl Pencil {
    /// Requires `B` smooth; a repeated singular parameter (tangent conics)
    /// is allowed and reported by [`is_transversal`](Self::is_transversal).
    pub fn new(a: Conic, b: Conic) -> Result<Self> {
        if !b.is_smooth() {
            return Err(Error::Degenerate("B must be a smooth conic".into()));
        }
        let coeffs = det_polynomial(&a, &b);
        let mut r = poly::roots(&coeffs)?;
        if r.len() != 3 {
            return Err(Error::Degenerate("det(A + X·B) is not cubic".into()));
        }
        r.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        Ok(Self {
            a,
            b,
            singular_params: [r[0], r[1], r[2]],
        })
    }

    pub fn from_real(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Conic::from_real(a)?, Conic::from_real(b)?)
    }

    pub fn singular_params(&self) -> [C; 3] {
        self.singular_params
    }

    pub fn member(&self, x: C) -> Conic {
        Conic::new(self.a.matrix() + self.b.matrix() * x).expect("sum of symmetric matrices")
    }

    /// Ascending coefficients of `det(A + X·B)`.
    pub fn det_polynomial(&self) -> [C; 4] {
        det_polynomial(&self.a, &self.b)
    }

    pub fn is_transversal(&self) -> bool {
        let r = self.singular_params;
        let scale = 1.0 + r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        (0..3).all(|i| (0..i).all(|j| (r[i] - r[j]).norm() > 1e-6 * scale))
    }

    /// The four points of `A ∩ B`, sorted lexicographically by their
    /// normalised coordinates (real parts first, then imaginary parts).
    pub fn base_points(&self) -> Result<Vec<ProjPoint>> {
        let b = &self.b;
        // one point of B, from a line through the origin of the chart
        let probe = ProjLine::real(0.3719, -0.9283, 0.2113)?;
        let p0 = line_conic_intersections(&probe, b)?[0];
        let p0c = p0.coords();
        // x(t) = (q,Bq) p0 − 2 (p0,Bq) q  with q = q0 + t q1 on a line missing p0
        let (q0, q1) = {
            let l = ProjLine::new(p0c.map(|x| x.conj()))?;
            l.span()
        };
        let point = |t: C| -> [C; 3] {
            let q = [q0[0] + q1[0] * t, q0[1] + q1[1] * t, q0[2] + q1[2] * t];
            let qbq = b.form(&q, &q);
            let pbq = b.form(&p0c, &q);
            [
                p0c[0] * qbq - q[0] * pbq * 2.0,
                p0c[1] * qbq - q[1] * pbq * 2.0,
                p0c[2] * qbq - q[2] * pbq * 2.0,
            ]
        };
        // A(x(t)) is a quartic in t; recover its coefficients by interpolation
        let nodes: Vec<C> = (0..5).map(|j| C::from_polar(1.0, 2.0 * PI * j as f64 / 5.0)).collect();
        let vals: Vec<C> = nodes
            .iter()
            .map(|&t| {
                let x = point(t);
                self.a.form(&x, &x)
            })
            .collect();
        let coeffs: Vec<C> = (0..5)
            .map(|k| nodes.iter().zip(&vals).map(|(t, v)| v * t.powi(-k)).sum::<C>() / 5.0)
            .collect();
        let ts = poly::roots(&coeffs)?;
        let mut pts: Vec<ProjPoint> = ts.iter().map(|&t| ProjPoint::new(point(t))).collect::<Result<_>>()?;
        // roots at t = ∞ (degree drop) sit at the image of q1
        while pts.len() < 4 {
            let qbq = b.form(&q1, &q1);
            let pbq = b.form(&p0c, &q1);
            pts.push(ProjPoint::new([
                p0c[0] * qbq - q1[0] * pbq * 2.0,
                p0c[1] * qbq - q1[1] * pbq * 2.0,
                p0c[2] * qbq - q1[2] * pbq * 2.0,
            ])?);
        }
        pts.sort_by(|x, y| {
            let (a, b) = (x.coords(), y.coords());
            let key = |v: [C; 3]| [v[0].re, v[1].re, v[2].re, v[0].im, v[1].im, v[2].im];
            let (ka, kb) = (key(a), key(b));
            ka.iter()
                .zip(&kb)
                .map(|(p, q)| quantise(*p).total_cmp(&quantise(*q)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(pts)
    }
}

// sort keys are rounded so that rounding noise cannot reorder ties
fn quantise(x: f64) -> f64 {
    (x * 1e8).round() / 1e8
}

fn det_polynomial(a: &Conic, b: &Conic) -> [C; 4] {
    let (am, bm) = (a.matrix(), b.matrix());
    let det = |t: f64| (am + bm * c(t, 0.0)).determinant();
    let (fm, f0, f1, f2) = (det(-1.0), det(0.0), det(1.0), det(2.0));
    let c3 = (f2 - f1 * 3.0 + f0 * 3.0 - fm) / 6.0;
    let c2 = (f1 + fm - f0 * 2.0) / 2.0;
    let c1 = (f1 - fm) / 2.0 - c3;
    [f0, c1, c2, c3]
}

/// Group structure of the Cayley cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicGroup {
    /// Three distinct real roots: `X = ℘(u) + shift`.
    Elliptic(WeierstrassModel),
    /// A double root `a` and a simple root `b`: the nonsingular points form
    /// `ℂ*` through `λ = (w − s)/(w + s)`, `w² = X − b`, `s² = a − b`.
    Nodal { double: f64, simple: f64 },
}

/// `det(A + X·B) = det B · (X'³ − g2 X' − g3)` with `X = X' + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleyCubic {
    /// Ascending coefficients of `det(A + X·B)`.
    pub coefficients: [C; 4],
    pub roots: [C; 3],
    pub shift: f64,
    pub g2: f64,
    pub g3: f64,
    pub group: CubicGroup,
}

impl CayleyCubic {
    pub fn model(&self) -> Option<&WeierstrassModel> {
        match &self.group {
            CubicGroup::Elliptic(w) => Some(w),
            CubicGroup::Nodal { .. } => None,
        }
    }

    fn require_model(&self) -> Result<&WeierstrassModel> {
        self.model()
            .ok_or_else(|| Error::Unsupported("the Cayley cubic is nodal; no elliptic Jacobian".into()))
    }

    /// A `u` with `℘(u) + shift = X`, on either sheet.
    pub fn u_of_parameter(&self, x: C) -> Result<C> {
        let w = self.require_model()?;
        let xw = x - self.shift;
        let y = w.cubic(xw).sqrt();
        Ok(w.abel_jacobi(xw, y)?.u())
    }

    pub fn parameter_of_u(&self, u: C) -> Result<Option<C>> {
        let w = self.require_model()?;
        if w.lattice().distance_to_lattice(u) < 1e-12 * w.omega() {
            return Ok(None);
        }
        Ok(Some(w.wp(u)?.0 + self.shift))
    }
}

pub fn cayley_cubic(pencil: &Pencil) -> Result<CayleyCubic> {
    let coefficients = pencil.det_polynomial();
    let lead = coefficients[3];
    if lead.norm() < 1e-14 {
        return Err(Error::Degenerate("B is singular".into()));
    }
    let m: Vec<C> = coefficients.iter().map(|x| x / lead).collect();
    let scale = 1.0 + m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m.iter().any(|x| x.im.abs() > 1e-10 * scale) {
        return Err(Error::Unsupported(
            "det(A + X·B) is not a real multiple of a real cubic".into(),
        ));
    }
    let (c0, c1, c2) = (m[0].re, m[1].re, m[2].re);
    let shift = -c2 / 3.0;
    // X³ + c2X² + c1X + c0 at X = X' + shift
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let (g2, g3) = (-p, -q);
    let disc = 4.0 * g2 * g2 * g2 - 27.0 * g3 * g3;
    let size = g2.abs().powf(1.5).max(g3.abs()).max(1e-300);
    let group = if disc > 1e-9 * size * size {
        CubicGroup::Elliptic(WeierstrassModel::from_invariants(g2, g3)?)
    } else if disc.abs() <= 1e-9 * size * size && g2.abs() > 1e-12 {
        // double root at −3g3/(2g2), simple root at 3g3/g2
        CubicGroup::Nodal {
            double: -1.5 * g3 / g2 + shift,
            simple: 3.0 * g3 / g2 + shift,
        }
    } else {
        return Err(Error::Unsupported(
            "Cayley cubic with complex roots or a triple root".into(),
        ));
    };
    Ok(CayleyCubic {
        coefficients,
        roots: pencil.singular_params,
        shift,
        g2,
        g3,
        group,
    })
}

/// Algebraic closure verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureVerdict {
    pub closes: bool,
    /// Scale-free distance of `n·u0` to the period lattice.
    pub residual: f64,
}

/// `n·u0 ∈ Λ` with `℘(u0) = X0` on the Cayley cubic.
pub fn closure_algebraic(pencil: &Pencil, x0: C, n: u32, tol: f64) -> Result<ClosureVerdict> {
    let cubic = cayley_cubic(pencil)?;
    check_smooth_member(pencil, x0)?;
    let residual = match cubic.group {
        CubicGroup::Elliptic(w) => {
            let u0 = cubic.u_of_parameter(x0)?;
            w.lattice().relative_distance_to_lattice(u0 * n as f64)
        }
        CubicGroup::Nodal { double, simple } => {
            let s = c(double - simple, 0.0).sqrt();
            let wv = (x0 - simple).sqrt();
            let lambda = (wv - s) / (wv + s);
            // the lattice of log ℂ* is 2πi·ℤ
            let t = lambda.ln() * n as f64 / (2.0 * PI);
            (c(t.re, t.im - t.im.round())).norm()
        }
    };
    Ok(ClosureVerdict {
        closes: residual < tol,
        residual,
    })
}

/// Generalised closure `Σ u_i ∈ Λ`.
pub fn closure_algebraic_chain(pencil: &Pencil, us: &[C], tol: f64) -> Result<ClosureVerdict> {
    let cubic = cayley_cubic(pencil)?;
    let w = cubic.require_model()?;
    let sum: C = us.iter().sum();
    let residual = w.lattice().relative_distance_to_lattice(sum);
    Ok(ClosureVerdict {
        closes: residual < tol,
        residual,
    })
}

fn check_smooth_member(pencil: &Pencil, x0: C) -> Result<()> {
    if !pencil.member(x0).is_smooth() {
        return Err(Error::Degenerate(format!(
            "X0 = {x0} is a singular parameter of the pencil"
        )));
    }
    Ok(())
}

/// A point of `B` together with a line through it tangent to `C_{X0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidencePoint {
    pub p: ProjPoint,
    pub l: ProjLine,
    pub x0: C,
}

impl IncidencePoint {
    pub fn new(pencil: &Pencil, x0: C, p: ProjPoint, l: ProjLine) -> Result<Self> {
        let s = Self { p, l, x0 };
        s.validate(pencil)?;
        Ok(s)
    }

    /// Start at `P ∈ B` on the first (`which = 0`) or second tangent.
    pub fn start(pencil: &Pencil, x0: C, p: ProjPoint, which: usize) -> Result<Self> {
        let conic = pencil.member(x0);
        let (l1, l2, _) = tangents_from(&p, &conic)?;
        Self::new(pencil, x0, p, if which == 0 { l1 } else { l2 })
    }

    pub fn validate(&self, pencil: &Pencil) -> Result<()> {
        let conic = pencil.member(self.x0);
        let on_b = pencil.b.residual(&self.p);
        let inc = self.l.incidence(&self.p);
        let tan = conic.dual_residual(&self.l)?;
        if on_b > INCIDENCE || inc > INCIDENCE || tan > INCIDENCE {
            return Err(Error::Contract(format!(
                "invalid incidence state (on B {on_b:e}, P ∈ L {inc:e}, tangency {tan:e})"
            )));
        }
        Ok(())
    }

    /// Distance to another state, max over point and line.
    pub fn distance(&self, other: &Self) -> f64 {
        self.p.distance(&other.p).max(self.l.distance(&other.l))
    }

    pub fn is_real(&self) -> bool {
        self.p.is_real() && self.l.is_real()
    }
}

/// One step `j = i₁ ∘ i₂` and whether it passed through a branch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: IncidencePoint,
    pub branch: bool,
}

/// The other tangent from `P`, then its second point on `B`.
pub fn poncelet_step(pencil: &Pencil, s: &IncidencePoint) -> Result<Step> {
    let conic = pencil.member(s.x0);
    let (l1, l2, double) = tangents_from(&s.p, &conic)?;
    let l_new = if l1.distance(&s.l) >= l2.distance(&s.l) { l1 } else { l2 };
    let (p_new, tangent) = second_intersection(&l_new, &pencil.b, &s.p)?;
    Ok(Step {
        state: IncidencePoint {
            p: p_new,
            l: l_new,
            x0: s.x0,
        },
        branch: double || tangent,
    })
}

/// `i₂`: same point, other tangent.
pub fn involution_i2(pencil: &Pencil, s: &IncidencePoint) -> Result<IncidencePoint> {
    let conic = pencil.member(s.x0);
    let (l1, l2, _) = tangents_from(&s.p, &conic)?;
    let l = if l1.distance(&s.l) >= l2.distance(&s.l) { l1 } else { l2 };
    Ok(IncidencePoint { l, ..*s })
}

/// `i₁`: same line, other point of `B`.
pub fn involution_i1(pencil: &Pencil, s: &IncidencePoint) -> Result<IncidencePoint> {
    let (p, _) = second_intersection(&s.l, &pencil.b, &s.p)?;
    Ok(IncidencePoint { p, ..*s })
}

/// A geometric Poncelet chain on a single conic.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub states: Vec<IncidencePoint>,
    pub branch_points: usize,
    /// Distance between the last and first states.
    pub residual: f64,
    pub real: bool,
}

pub fn run_chain(pencil: &Pencil, start: IncidencePoint, n: usize) -> Result<Chain> {
    let mut states = vec![start];
    let mut branch_points = 0;
    for _ in 0..n {
        let step = poncelet_step(pencil, states.last().expect("non-empty"))?;
        branch_points += step.branch as usize;
        states.push(step.state);
    }
    let residual = states.last().expect("non-empty").distance(&start);
    let real = states.iter().all(|s| s.is_real());
    Ok(Chain {
        states,
        branch_points,
        residual,
        real,
    })
}

/// The pencil with its rational parametrisation of `B` and Cayley cubic.
#[derive(Debug, Clone)]
pub struct PonceletSystem {
    pub pencil: Pencil,
    pub cubic: CayleyCubic,
    /// The distinguished base point `P_{e0}`, parameter `X = ∞`.
    pub p0: ProjPoint,
}

impl PonceletSystem {
    pub fn new(pencil: Pencil) -> Result<Self> {
        if !pencil.is_transversal() {
            return Err(Error::Degenerate("the conics A and B are not transversal".into()));
        }
        let cubic = cayley_cubic(&pencil)?;
        cubic.require_model()?;
        let p0 = pencil.base_points()?[0];
        Ok(Self { pencil, cubic, p0 })
    }

    pub fn model(&self) -> &WeierstrassModel {
        self.cubic.model().expect("checked in new")
    }

    /// `X(P) = −(p0, A P)/(p0, B P)`; `None` means `X = ∞`.
    pub fn parameter_of(&self, p: &ProjPoint) -> Option<C> {
        let (p0, pc) = (self.p0.coords(), p.coords());
        let num = self.pencil.a.form(&p0, &pc);
        let den = self.pencil.b.form(&p0, &pc);
        if p.distance(&self.p0) < 1e-12 || den.norm() < 1e-14 * num.norm() {
            None
        } else {
            Some(-num / den)
        }
    }

    /// `P_X`: the tangent to `C_X` at `p0` meets `B` again here.
    pub fn point_at(&self, x: Option<C>) -> Result<ProjPoint> {
        let Some(x) = x else { return Ok(self.p0) };
        let tangent = self.pencil.member(x).polar(&self.p0)?;
        Ok(second_intersection(&tangent, &self.pencil.b, &self.p0)?.0)
    }

    pub fn point_of_u(&self, u: C) -> Result<ProjPoint> {
        self.point_at(self.cubic.parameter_of_u(u)?)
    }

    /// `u0` with `℘(u0) + shift = X0`.
    pub fn u0(&self, x0: C) -> Result<C> {
        check_smooth_member(&self.pencil, x0)?;
        self.cubic.u_of_parameter(x0)
    }

    /// The label `u` of a state relative to `u0`, and the mismatch of the
    /// rejected alternative's test (for diagnostics).
    pub fn u_of_state(&self, s: &IncidencePoint, u0: C) -> Result<C> {
        let u = match self.parameter_of(&s.p) {
            None => c(0.0, 0.0),
            Some(x) => self.cubic.u_of_parameter(x)?,
        };
        let (p2, _) = second_intersection(&s.l, &self.pencil.b, &s.p)?;
        let plus = self.point_of_u(u0 - u)?.distance(&p2);
        let minus = self.point_of_u(u0 + u)?.distance(&p2);
        if plus.min(minus) > 1e-6 {
            return Err(Error::NonConvergence {
                iterations: 0,
                residual: plus.min(minus),
                trace: vec![plus, minus],
            });
        }
        Ok(if plus <= minus { u } else { -u })
    }

    /// Generalised chain through the conics `C_{℘(u_i)}`; from `P_w` the
    /// tangent leading to `P_{℘(w + u_i)}` is followed.
    pub fn run_generalised(&self, start: &ProjPoint, us: &[C]) -> Result<GeneralisedChain> {
        let mut w = match self.parameter_of(start) {
            None => c(0.0, 0.0),
            Some(x) => self.cubic.u_of_parameter(x)?,
        };
        let mut points = vec![*start];
        let mut lines = Vec::with_capacity(us.len());
        for &ui in us {
            let x = self
                .cubic
                .parameter_of_u(ui)?
                .ok_or_else(|| Error::Degenerate("u_i is a lattice point: C_∞ = B".into()))?;
            let conic = self.pencil.member(x);
            let p = *points.last().expect("non-empty");
            let (l1, l2, _) = tangents_from(&p, &conic)?;
            let target = self.point_of_u(w + ui)?;
            let (q1, _) = second_intersection(&l1, &self.pencil.b, &p)?;
            let (q2, _) = second_intersection(&l2, &self.pencil.b, &p)?;
            let (l, q) = if q1.distance(&target) <= q2.distance(&target) {
                (l1, q1)
            } else {
                (l2, q2)
            };
            lines.push(l);
            points.push(q);
            w += ui;
        }
        let residual = points.last().expect("non-empty").distance(start);
        Ok(GeneralisedChain {
            points,
            lines,
            residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralisedChain {
    pub points: Vec<ProjPoint>,
    pub lines: Vec<ProjLine>,
    pub residual: f64,
}

/// Pencil spanned by `B` (outer) and the concentric circle `C_1` of radius `r`:
/// `A = C_r − B`, so `C_{X0 = 1}` is the inner circle.
pub fn concentric_pencil(outer: f64, inner: f64) -> Result<Pencil> {
    let b = Conic::circle(0.0, 0.0, outer);
    let cr = Conic::circle(0.0, 0.0, inner);
    Pencil::new(Conic::new(cr.matrix() - b.matrix())?, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_circle() -> Conic {
        Conic::circle(0.0, 0.0, 1.0)
    }

    /// Pencil through four points of the unit circle at the given angles.
    pub(crate) fn pencil_through(angles: [f64; 4], shift: f64) -> Pencil {
        let p: Vec<ProjPoint> = angles
            .iter()
            .map(|t| ProjPoint::from_affine(t.cos(), t.sin()))
            .collect();
        let l1 = p[0].join(&p[1]).unwrap().coords();
        let l2 = p[2].join(&p[3]).unwrap().coords();
        let m = Matrix3::from_fn(|i, j| (l1[i] * l2[j] + l1[j] * l2[i]) * 0.5);
        let b = unit_circle();
        Pencil::new(Conic::new(m + b.matrix() * c(shift, 0.0)).unwrap(), b).unwrap()
    }

    #[test]
    fn tangents_from_outside_point() {
        let p = ProjPoint::from_affine(2.0, 0.0);
        let (l1, l2, double) = tangents_from(&p, &unit_circle()).unwrap();
        assert!(!double);
        for l in [l1, l2] {
            assert!(l.incidence(&p) < 1e-14);
            assert!(unit_circle().dual_residual(&l).unwrap() < 1e-14);
            let touch = unit_circle().polar(&p).unwrap().meet(&l).unwrap();
            let (x, y) = touch.to_affine().unwrap();
            assert_abs_diff_eq!(x.re, 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(y.re.abs(), 3f64.sqrt() / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn tangents_degenerate_and_complex() {
        let on = ProjPoint::from_affine(0.6, 0.8);
        let (l1, l2, double) = tangents_from(&on, &unit_circle()).unwrap();
        assert!(double);
        assert_eq!(l1, l2);
        assert_eq!(l1, unit_circle().polar(&on).unwrap());
        let inside = ProjPoint::from_affine(0.2, 0.1);
        let (l1, l2, double) = tangents_from(&inside, &unit_circle()).unwrap();
        assert!(!double);
        assert!(!l1.is_real() && !l2.is_real());
        assert!(unit_circle().dual_residual(&l1).unwrap() < 1e-13);
        let singular = Conic::from_real([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!(tangents_from(&inside, &singular).is_err());
    }

    #[test]
    fn duality_of_tangents() {
        let q = Conic::from_real([[2.0, 0.3, -0.1], [0.3, 1.0, 0.4], [-0.1, 0.4, -1.5]]).unwrap();
        let p = ProjPoint::real(1.7, -0.4, 0.6).unwrap();
        let (l1, l2, _) = tangents_from(&p, &q).unwrap();
        // the same lines as the points of the dual conic on the line P*
        let p_as_line = ProjLine::new(p.coords()).unwrap();
        let [d1, d2] = line_conic_intersections(&p_as_line, &q.dual().unwrap()).unwrap();
        let d1 = ProjLine::new(d1.coords()).unwrap();
        let d2 = ProjLine::new(d2.coords()).unwrap();
        let m = (l1.distance(&d1).max(l2.distance(&d2))).min(l1.distance(&d2).max(l2.distance(&d1)));
        assert!(m < 1e-10, "{m}");
    }

    #[test]
    fn second_intersection_cases() {
        let x_axis = ProjLine::real(0.0, 1.0, 0.0).unwrap();
        let p = ProjPoint::from_affine(1.0, 0.0);
        let (q, double) = second_intersection(&x_axis, &unit_circle(), &p).unwrap();
        assert!(!double);
        assert!(q.distance(&ProjPoint::from_affine(-1.0, 0.0)) < 1e-15);
        let tangent = unit_circle().polar(&p).unwrap();
        let (q, double) = second_intersection(&tangent, &unit_circle(), &p).unwrap();
        assert!(double);
        assert_eq!(q, p);
        let q2 = Conic::from_real([[2.0, 0.3, -0.1], [0.3, 1.0, 0.4], [-0.1, 0.4, -1.5]]).unwrap();
        let chord = ProjLine::real(0.2, -1.0, 0.1).unwrap();
        let [a, b] = line_conic_intersections(&chord, &q2).unwrap();
        let (b2, _) = second_intersection(&chord, &q2, &a).unwrap();
        assert!(q2.residual(&a) < 1e-12 && q2.residual(&b2) < 1e-12);
        assert!(b.distance(&b2) < 1e-12);
        assert!(matches!(
            second_intersection(&chord, &q2, &ProjPoint::from_affine(3.0, 3.0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn homogeneous_normalisation() {
        let p = ProjPoint::new([c(0.0, 0.0), c(0.0, 2.0), c(0.0, -2.0)]).unwrap();
        let q = ProjPoint::new(p.coords()).unwrap();
        assert_eq!(p, q);
        assert!(p.coords()[1].im == 0.0 && p.coords()[1].re > 0.0);
        let l = ProjLine::real(1.0, 1.0, 0.0).unwrap();
        let scaled = ProjPoint::new([c(3.0, 1.0), c(-3.0, -1.0), c(5.0, 0.0)]).unwrap();
        assert!(l.incidence(&scaled) < 1e-15);
        assert!(ProjPoint::new([c(0.0, 0.0); 3]).is_err());
        assert!(Conic::new(Matrix3::from_fn(|i, j| c((i * 3 + j) as f64, 0.0))).is_err());
    }

    #[test]
    fn diagonal_cayley_cubic() {
        let p = Pencil::from_real(
            [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -4.0]],
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        )
        .unwrap();
        let d = p.det_polynomial();
        // (X + 1)(X + 2)(X − 4) = X³ − X² − 10X − 8
        for (got, want) in d.iter().zip([-8.0, -10.0, -1.0, 1.0]) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-12);
        }
        let r = p.singular_params();
        for (got, want) in r.iter().zip([-2.0, -1.0, 4.0]) {
            assert!((got - want).norm() < 1e-12);
        }
        let cubic = cayley_cubic(&p).unwrap();
        let w = cubic.model().unwrap();
        let mut e = w.roots().map(|x| x + cubic.shift);
        e.sort_by(f64::total_cmp);
        for (got, want) in e.iter().zip([-2.0, -1.0, 4.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let singular_b = Pencil::from_real(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        );
        assert!(singular_b.is_err());
    }

    #[test]
    fn singular_params_drop_rank() {
        let p = pencil_through([0.3, 1.9, 3.1, 4.4], 0.37);
        assert!(p.is_transversal());
        for e in p.singular_params() {
            let m = p.member(e).matrix();
            let sv = m.singular_values();
            assert!(sv.min() < 1e-10 * sv.max(), "{sv}");
        }
        let base = p.base_points().unwrap();
        assert_eq!(base.len(), 4);
        for q in &base {
            assert!(p.a.residual(q) < 1e-12 && p.b.residual(q) < 1e-12);
        }
    }

    #[test]
    fn chapple_and_square_close() {
        for (outer, n) in [(2.0, 3usize), (2f64.sqrt(), 4)] {
            let p = concentric_pencil(outer, 1.0).unwrap();
            assert!(!p.is_transversal());
            let start = IncidencePoint::start(
                &p,
                c(1.0, 0.0),
                ProjPoint::from_affine(outer * 0.3f64.cos(), outer * 0.3f64.sin()),
                0,
            )
            .unwrap();
            let ch = run_chain(&p, start, n).unwrap();
            assert!(ch.residual < 1e-12, "{}", ch.residual);
            assert!(ch.real);
            let short = run_chain(&p, start, n - 1).unwrap();
            assert!(short.residual > 0.1);
            assert!(closure_algebraic(&p, c(1.0, 0.0), n as u32, 1e-8).unwrap().closes);
            assert!(!closure_algebraic(&p, c(1.0, 0.0), n as u32 - 1, 1e-8).unwrap().closes);
        }
    }

    #[test]
    fn involutions_square_to_identity() {
        let p = pencil_through([0.3, 1.9, 3.1, 4.4], 0.37);
        let x0 = c(2.5, 0.0);
        let s = IncidencePoint::start(&p, x0, ProjPoint::from_affine(0.8, 0.6), 0).unwrap();
        let twice1 = involution_i1(&p, &involution_i1(&p, &s).unwrap()).unwrap();
        let twice2 = involution_i2(&p, &involution_i2(&p, &s).unwrap()).unwrap();
        assert!(twice1.distance(&s) < 1e-12);
        assert!(twice2.distance(&s) < 1e-12);
        let j = poncelet_step(&p, &s).unwrap().state;
        let via = involution_i1(&p, &involution_i2(&p, &s).unwrap()).unwrap();
        assert!(j.distance(&via) < 1e-12);
        // j⁻¹ = i₂ ∘ i₁
        let back = involution_i2(&p, &involution_i1(&p, &j).unwrap()).unwrap();
        assert!(back.distance(&s) < 1e-12);
    }

    #[test]
    fn rational_parametrisation() {
        let sys = PonceletSystem::new(pencil_through([0.3, 1.9, 3.1, 4.4], 0.37)).unwrap();
        for x in [c(0.7, 0.0), c(-3.0, 0.5), c(12.0, 0.0)] {
            let p = sys.point_at(Some(x)).unwrap();
            assert!(sys.pencil.b.residual(&p) < 1e-12);
            let back = sys.parameter_of(&p).unwrap();
            assert!((back - x).norm() < 1e-9 * (1.0 + x.norm()), "{back} vs {x}");
        }
        // the other base points sit at the singular parameters
        let base = sys.pencil.base_points().unwrap();
        let mut xs: Vec<C> = base[1..].iter().map(|q| sys.parameter_of(q).unwrap()).collect();
        xs.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (x, e) in xs.iter().zip(sys.pencil.singular_params()) {
            assert!((x - e).norm() < 1e-8, "{x} vs {e}");
        }
    }

    #[test]
    fn cayley_corollary() {
        let sys = PonceletSystem::new(pencil_through([0.3, 1.9, 3.1, 4.4], 0.37)).unwrap();
        let x0 = c(2.5, 0.0);
        let u0 = sys.u0(x0).unwrap();
        let mut s = IncidencePoint::start(&sys.pencil, x0, ProjPoint::from_affine(0.8, 0.6), 0).unwrap();
        let u = sys.u_of_state(&s, u0).unwrap();
        for k in 1..=12 {
            s = poncelet_step(&sys.pencil, &s).unwrap().state;
            let expect = sys.point_of_u(u + u0 * k as f64).unwrap();
            assert!(s.p.distance(&expect) < 1e-8, "k = {k}: {}", s.p.distance(&expect));
        }
    }

    #[test]
    fn algebraic_matches_geometric() {
        let sys = PonceletSystem::new(pencil_through([0.3, 1.9, 3.1, 4.4], 0.37)).unwrap();
        let w = *sys.model();
        for n in [3u32, 5] {
            let x0 = sys
                .cubic
                .parameter_of_u(c(2.0 * w.omega() / n as f64, 0.0))
                .unwrap()
                .unwrap();
            let v = closure_algebraic(&sys.pencil, x0, n, 1e-8).unwrap();
            assert!(v.closes && v.residual < 1e-10, "{v:?}");
            let s = IncidencePoint::start(&sys.pencil, x0, ProjPoint::from_affine(0.0, 1.0), 0).unwrap();
            assert!(run_chain(&sys.pencil, s, n as usize).unwrap().residual < 1e-9);
            let off = x0 * 1.05;
            assert!(!closure_algebraic(&sys.pencil, off, n, 1e-8).unwrap().closes);
            let s = IncidencePoint::start(&sys.pencil, off, ProjPoint::from_affine(0.0, 1.0), 0).unwrap();
            assert!(run_chain(&sys.pencil, s, n as usize).unwrap().residual > 1e-6);
        }
        assert!(closure_algebraic(&sys.pencil, sys.pencil.singular_params()[0], 3, 1e-8).is_err());
    }

    #[test]
    fn generalised_chain() {
        let sys = PonceletSystem::new(pencil_through([0.3, 1.9, 3.1, 4.4], 0.37)).unwrap();
        let w = *sys.model();
        let two_w = 2.0 * w.omega();
        let us = [c(0.21 * two_w, 0.0), c(0.33 * two_w, 0.0), c(0.46 * two_w, 0.0)];
        assert!(closure_algebraic_chain(&sys.pencil, &us, 1e-8).unwrap().closes);
        for start in [ProjPoint::from_affine(0.0, 1.0), ProjPoint::from_affine(-0.6, -0.8)] {
            let ch = sys.run_generalised(&start, &us).unwrap();
            assert!(ch.residual < 1e-9, "{}", ch.residual);
        }
        let bad = [us[0], us[1], us[2] * 1.1];
        assert!(!closure_algebraic_chain(&sys.pencil, &bad, 1e-8).unwrap().closes);
        let ch = sys.run_generalised(&ProjPoint::from_affine(0.0, 1.0), &bad).unwrap();
        assert!(ch.residual > 1e-6);
    }
}
