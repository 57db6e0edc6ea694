//! Rectangular Weierstrass lattices and their functions.
//!
//! A model is the cubic `Y² = X³ − g2·X − g3` with three real roots
//! `e3 < e2 < e1`. Writing `ρ = e1 − e3` and `k² = (e2 − e3)/ρ`,
//!
//! ```text
//! X = ℘(u) = e3 + ρ / sn²(√ρ·u, k),     2Y = ℘'(u)
//! ```
//!
//! with half-periods `ω1 = K(k)/√ρ` (real) and `ω3 = iK(k')/√ρ`, and
//! `ω2 = −ω1 − ω3`. `σ` and `ζ` are evaluated from the theta series of the
//! nome `q = exp(−πK'/K)` after reduction to the centred period cell.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with_sqrt, Contour, Ellipse, QuadOptions};
use crate::special_functions::{complete_k, inverse_sn_complex, sncndn_complex, EllipticModulus};
use crate::tolerances::{DEGENERATE_MODULUS, ON_CURVE, POLE};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The period lattice `ℤ·2ω + ℤ·2ω'` of a rectangular model, `ω' = i·omega_prime_im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub omega: f64,
    pub omega_prime_im: f64,
}

impl Lattice {
    pub fn omega_prime(&self) -> Complex64 {
        Complex64::new(0.0, self.omega_prime_im)
    }

    /// Split `u = u0 + 2mω + 2nω'` with `u0` in the centred cell
    /// `|Re u0| ≤ ω`, `|Im u0| ≤ |ω'|`.
    pub fn reduce(&self, u: Complex64) -> (Complex64, i64, i64) {
        let m = (u.re / (2.0 * self.omega)).round();
        let n = (u.im / (2.0 * self.omega_prime_im)).round();
        let u0 = Complex64::new(u.re - 2.0 * m * self.omega, u.im - 2.0 * n * self.omega_prime_im);
        (u0, m as i64, n as i64)
    }

    /// `|u mod Λ|` measured in the centred cell.
    pub fn distance_to_lattice(&self, u: Complex64) -> f64 {
        self.reduce(u).0.norm()
    }

    /// Scale-free version: the distance in units of the shorter period.
    pub fn relative_distance_to_lattice(&self, u: Complex64) -> f64 {
        self.distance_to_lattice(u) / (2.0 * self.omega.min(self.omega_prime_im))
    }

    pub fn lattice_point(&self, m: i64, n: i64) -> Complex64 {
        Complex64::new(2.0 * m as f64 * self.omega, 2.0 * n as f64 * self.omega_prime_im)
    }
}

/// A point of the Jacobian `ℂ/Λ`, stored reduced to the centred cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianPoint {
    u: Complex64,
    lattice: Lattice,
}

impl JacobianPoint {
    pub fn new(u: Complex64, lattice: Lattice) -> Self {
        Self {
            u: lattice.reduce(u).0,
            lattice,
        }
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Distance between two points of the torus.
    pub fn lattice_distance(&self, other: &JacobianPoint) -> f64 {
        self.lattice.distance_to_lattice(self.u - other.u)
    }

    pub fn scale(&self, n: i64) -> Self {
        Self::new(self.u * n as f64, self.lattice)
    }
}

impl std::ops::Add for JacobianPoint {
    type Output = JacobianPoint;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.u + rhs.u, self.lattice)
    }
}

impl std::ops::Sub for JacobianPoint {
    type Output = JacobianPoint;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.u - rhs.u, self.lattice)
    }
}

impl std::ops::Neg for JacobianPoint {
    type Output = JacobianPoint;
    fn neg(self) -> Self {
        Self::new(-self.u, self.lattice)
    }
}

/// A `π_i` value together with the Jacobian point it was computed from;
/// flipping the sheet of `Y0` negates both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdKindPeriod {
    pub value: Complex64,
    pub u0: Complex64,
}

/// `Y² = X³ − g2·X − g3` with three real roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassModel {
    g2: f64,
    g3: f64,
    e: [f64; 3],
    rho: f64,
    modulus: EllipticModulus,
    lattice: Lattice,
    nome: f64,
    eta1: f64,
    theta1_prime0: f64,
}

impl WeierstrassModel {
    /// Model with `ρ = e1 − e3` and `k² = (e2 − e3)/ρ`.
    pub fn from_rho_k(rho: f64, k: EllipticModulus) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return domain(format!("rho = {rho} must be positive"));
        }
        if k.k() < DEGENERATE_MODULUS || k.k_prime() < DEGENERATE_MODULUS {
            return Err(Error::Degenerate(format!(
                "modulus k = {} too close to 0 or 1; the cubic has a double root",
                k.k()
            )));
        }
        let k2 = k.k() * k.k();
        let e = [
            -rho / 3.0 * (k2 - 2.0),
            rho / 3.0 * (2.0 * k2 - 1.0),
            -rho / 3.0 * (k2 + 1.0),
        ];
        Ok(Self::assemble(e, rho, k))
    }

    /// Model from the cubic's coefficients; requires a positive discriminant.
    pub fn from_invariants(g2: f64, g3: f64) -> Result<Self> {
        let disc = 4.0 * g2 * g2 * g2 - 27.0 * g3 * g3;
        if !(g2 > 0.0 && disc > 0.0) {
            return Err(Error::Degenerate(format!(
                "X³ − {g2}·X − {g3} does not have three distinct real roots"
            )));
        }
        let r = 2.0 * (g2 / 3.0).sqrt();
        let arg = (1.5 * g3 / g2 * (3.0 / g2).sqrt()).clamp(-1.0, 1.0);
        let th = arg.acos() / 3.0;
        let mut e = [
            r * th.cos(),
            r * (th - 2.0 * PI / 3.0).cos(),
            r * (th + 2.0 * PI / 3.0).cos(),
        ];
        e.sort_by(|a, b| b.total_cmp(a));
        let rho = e[0] - e[2];
        let k = EllipticModulus::from_pair(((e[1] - e[2]) / rho).sqrt(), ((e[0] - e[1]) / rho).sqrt())?;
        if k.k() < DEGENERATE_MODULUS || k.k_prime() < DEGENERATE_MODULUS {
            return Err(Error::Degenerate("near-double root".into()));
        }
        Ok(Self::assemble(e, rho, k))
    }

    fn assemble(e: [f64; 3], rho: f64, k: EllipticModulus) -> Self {
        let kk = complete_k(&k).expect("k < 1");
        let kkp = complete_k(&k.complement()).expect("k > 0");
        let sr = rho.sqrt();
        let lattice = Lattice {
            omega: kk / sr,
            omega_prime_im: kkp / sr,
        };
        let nome = (-PI * kkp / kk).exp();
        let g2 = -(e[0] * e[1] + e[1] * e[2] + e[2] * e[0]);
        let g3 = e[0] * e[1] * e[2];
        let (d1, d3) = theta1_odd_derivatives(nome);
        let eta1 = -PI * PI * d3 / (12.0 * lattice.omega * d1);
        Self {
            g2,
            g3,
            e,
            rho,
            modulus: k,
            lattice,
            nome,
            eta1,
            theta1_prime0: d1,
        }
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    /// `[e1, e2, e3]`, decreasing.
    pub fn roots(&self) -> [f64; 3] {
        self.e
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.modulus
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn nome(&self) -> f64 {
        self.nome
    }

    pub fn omega(&self) -> f64 {
        self.lattice.omega
    }

    pub fn omega_prime(&self) -> Complex64 {
        self.lattice.omega_prime()
    }

    /// `[ω1, ω2, ω3]` with `ω1 = ω`, `ω3 = ω'`, `ω2 = −ω1 − ω3`.
    pub fn half_periods(&self) -> [Complex64; 3] {
        let w1 = Complex64::new(self.lattice.omega, 0.0);
        let w3 = self.omega_prime();
        [w1, -w1 - w3, w3]
    }

    /// `[η1, η2, η3]`, `η_i = ζ(ω_i)`.
    pub fn etas(&self) -> [Complex64; 3] {
        let w1 = self.lattice.omega;
        let eta1 = Complex64::new(self.eta1, 0.0);
        let eta3 = (eta1 * self.omega_prime() - I * (PI / 2.0)) / w1;
        [eta1, -eta1 - eta3, eta3]
    }

    pub fn point(&self, u: Complex64) -> JacobianPoint {
        JacobianPoint::new(u, self.lattice)
    }

    /// `X³ − g2·X − g3`.
    pub fn cubic(&self, x: Complex64) -> Complex64 {
        x * x * x - x * self.g2 - self.g3
    }

    /// Residual `|Y² − (X³ − g2X − g3)|`, relative to the size of the terms.
    pub fn on_curve_residual(&self, x: Complex64, y: Complex64) -> f64 {
        let scale = 1.0 + x.norm().powi(3) + self.g2.abs() * x.norm() + self.g3.abs();
        (y * y - self.cubic(x)).norm() / scale
    }

    /// `(X, Y) = (℘(u), ℘'(u)/2)`.
    pub fn wp(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        if !(u.re.is_finite() && u.im.is_finite()) {
            return domain("non-finite argument");
        }
        let (u0, _, _) = self.lattice.reduce(u);
        if u0.norm() < POLE * self.lattice.omega.max(1.0) {
            return Err(Error::Pole { re: u.re, im: u.im });
        }
        let sr = self.rho.sqrt();
        let (sn, cn, dn) = sncndn_complex(u0 * sr, &self.modulus);
        let x = self.e[2] + self.rho / (sn * sn);
        let y = -(cn * dn / (sn * sn * sn)) * (self.rho * sr);
        Ok((x, y))
    }

    pub fn wp_point(&self, p: &JacobianPoint) -> Result<(Complex64, Complex64)> {
        self.wp(p.u)
    }

    /// `θ1(v)` and `θ1'(v)` for the model's nome.
    fn theta1(&self, v: Complex64) -> (Complex64, Complex64) {
        let q = self.nome;
        let mut th = Complex64::new(0.0, 0.0);
        let mut dth = Complex64::new(0.0, 0.0);
        for n in 0..200 {
            let nh = n as f64 + 0.5;
            let w = q.powf(nh * nh);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = v * (2 * n + 1) as f64;
            let (s, c) = (a.sin(), a.cos());
            let ts = s * (2.0 * sign * w);
            let tc = c * (2.0 * sign * w * (2 * n + 1) as f64);
            th += ts;
            dth += tc;
            if ts.norm() <= 1e-17 * th.norm() && tc.norm() <= 1e-17 * dth.norm() && n > 1 {
                break;
            }
        }
        (th, dth)
    }

    /// `ζ(u)` for `u` already in the centred cell.
    fn zeta_cell(&self, u0: Complex64) -> Complex64 {
        let w1 = self.lattice.omega;
        let v = u0 * (PI / (2.0 * w1));
        let (th, dth) = self.theta1(v);
        u0 * (self.eta1 / w1) + dth / th * (PI / (2.0 * w1))
    }

    /// Weierstrass `ζ(u)`, quasi-periodic: `ζ(u + 2ω_i) = ζ(u) + 2η_i`.
    pub fn zeta_w(&self, u: Complex64) -> Result<Complex64> {
        if !(u.re.is_finite() && u.im.is_finite()) {
            return domain("non-finite argument");
        }
        let (u0, m, n) = self.lattice.reduce(u);
        if u0.norm() < POLE * self.lattice.omega.max(1.0) {
            return Err(Error::Pole { re: u.re, im: u.im });
        }
        let eta = self.etas();
        Ok(self.zeta_cell(u0) + eta[0] * (2 * m) as f64 + eta[2] * (2 * n) as f64)
    }

    /// `ln σ(u)` on a branch that is continuous inside each period cell; the
    /// imaginary part is determined modulo `2π`.
    pub fn ln_sigma(&self, u: Complex64) -> Result<Complex64> {
        if !(u.re.is_finite() && u.im.is_finite()) {
            return domain("non-finite argument");
        }
        let (u0, m, n) = self.lattice.reduce(u);
        if u0.norm() == 0.0 {
            return Err(Error::Pole { re: u.re, im: u.im });
        }
        let w1 = self.lattice.omega;
        let v = u0 * (PI / (2.0 * w1));
        let (th, _) = self.theta1(v);
        let base = Complex64::new((2.0 * w1 / PI).ln(), 0.0) + u0 * u0 * (self.eta1 / (2.0 * w1)) + th.ln()
            - self.theta1_prime0.ln();
        let eta = self.etas();
        let w = self.half_periods();
        let (mf, nf) = (m as f64, n as f64);
        let shift = (eta[0] * (2.0 * mf) + eta[2] * (2.0 * nf)) * (u0 + w[0] * mf + w[2] * nf);
        let parity = (m + n + m * n).rem_euclid(2) as f64;
        Ok(base + shift + I * (PI * parity))
    }

    /// Weierstrass `σ(u)`.
    pub fn sigma(&self, u: Complex64) -> Result<Complex64> {
        if self.lattice.reduce(u).0.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.ln_sigma(u)?.exp())
    }

    /// A `u` with `℘(u) = X` and `℘'(u)/2 = Y`, reduced to the centred cell.
    pub fn abel_jacobi(&self, x: Complex64, y: Complex64) -> Result<JacobianPoint> {
        Ok(self.point(self.abel_jacobi_raw(x, y)?))
    }

    pub(crate) fn abel_jacobi_raw(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        if self.on_curve_residual(x, y) > ON_CURVE {
            return Err(Error::Contract(format!(
                "({x}, {y}) is not on the cubic (residual {:e})",
                self.on_curve_residual(x, y)
            )));
        }
        let scale = self.rho;
        if (x - self.e[2]).norm() < 1e-14 * scale {
            return Ok(self.omega_prime());
        }
        let sr = self.rho.sqrt();
        let s = (Complex64::new(self.rho, 0.0) / (x - self.e[2])).sqrt();
        let mut u = inverse_sn_complex(s, &self.modulus) / sr;
        if !(u.re.is_finite() && u.im.is_finite()) || !self.wp_close(u, x) {
            u = self.grid_search(x);
        }
        u = self.newton_polish(u, x);
        let (_, yu) = self.wp(u)?;
        if (yu + y).norm() < (yu - y).norm() {
            u = -u;
        }
        Ok(self.lattice.reduce(u).0)
    }

    fn wp_close(&self, u: Complex64, x: Complex64) -> bool {
        match self.wp(u) {
            Ok((xu, _)) => (xu - x).norm() <= 1e-6 * (1.0 + x.norm()),
            Err(_) => false,
        }
    }

    fn newton_polish(&self, mut u: Complex64, x: Complex64) -> Complex64 {
        for _ in 0..8 {
            let Ok((xu, yu)) = self.wp(u) else { break };
            let f = xu - x;
            if f.norm() <= 1e-15 * (1.0 + x.norm()) || yu.norm() < 1e-8 * self.rho.powf(1.5) {
                break;
            }
            let step = f / (yu * 2.0);
            let next = u - step;
            match self.wp(next) {
                Ok((xn, _)) if (xn - x).norm() < f.norm() => u = next,
                _ => break,
            }
        }
        u
    }

    fn grid_search(&self, x: Complex64) -> Complex64 {
        let (w, wp) = (self.lattice.omega, self.lattice.omega_prime_im);
        let mut best = (f64::INFINITY, Complex64::new(w, 0.0));
        let n = 24;
        for i in 0..=n {
            for j in 0..=n {
                let u = Complex64::new(w * i as f64 / n as f64, wp * (2.0 * j as f64 / n as f64 - 1.0));
                if let Ok((xu, _)) = self.wp(u) {
                    let d = (xu - x).norm();
                    if d < best.0 {
                        best = (d, u);
                    }
                }
            }
        }
        best.1
    }

    /// `π_i(X0) = u0·ζ(ω_i) − ω_i·ζ(u0)` with `u0` the centred-cell image of
    /// `(X0, Y0)`; `i ∈ {1, 2, 3}`.
    pub fn pi_i(&self, x0: Complex64, y0: Complex64, i: usize) -> Result<ThirdKindPeriod> {
        if !(1..=3).contains(&i) {
            return domain(format!("period index {i} not in 1..=3"));
        }
        for &e in &self.e {
            if (x0 - e).norm() < 1e-12 * self.rho && y0.norm() > 1e-8 * self.rho.powf(1.5) {
                return Err(Error::Contract(format!("X0 = e = {e} with Y0 = {y0} ≠ 0")));
            }
        }
        let u0 = self.abel_jacobi_raw(x0, y0)?;
        Ok(self.pi_from_u(u0, i))
    }

    pub(crate) fn pi_from_u(&self, u0: Complex64, i: usize) -> ThirdKindPeriod {
        let w = self.half_periods()[i - 1];
        let eta = self.etas()[i - 1];
        let u0 = self.lattice.reduce(u0).0;
        let z0 = self.zeta_cell(u0);
        ThirdKindPeriod {
            value: u0 * eta - w * z0,
            u0,
        }
    }

    /// `∮_{Γ_i} f(X, Y) dX/(2Y)` by adaptive quadrature in the `X`-plane.
    ///
    /// `Γ1` encircles `[e3, e2]`, `Γ3` encircles `[e2, e1]`, and
    /// `Γ2 = −Γ1 − Γ3`. Each loop is oriented, and its sheet chosen, so that
    /// `∮ dX/2Y = 2ω_i`. The loops are thin ellipses kept clear of the points
    /// in `avoid` (poles of `f`).
    pub fn cycle_integral<F>(&self, i: usize, avoid: &[Complex64], f: F) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        match i {
            1 => self.loop_integral(1, self.half_periods()[0], avoid, &f),
            3 => self.loop_integral(3, self.half_periods()[2], avoid, &f),
            2 => {
                let h = self.half_periods();
                let a = self.loop_integral(1, h[0], avoid, &f)?;
                let b = self.loop_integral(3, h[2], avoid, &f)?;
                Ok(-a - b)
            }
            _ => domain(format!("cycle index {i} not in 1..=3")),
        }
    }

    /// The thin ellipse used for `Γ1` (`i = 1`, around `[e3, e2]`) or `Γ3`
    /// (`i = 3`, around `[e2, e1]`), kept clear of the points in `avoid`.
    pub fn cycle_ellipse(&self, i: usize, avoid: &[Complex64]) -> Result<Ellipse> {
        let (lo, hi, other) = match i {
            1 => (self.e[2], self.e[1], self.e[0]),
            3 => (self.e[1], self.e[0], self.e[2]),
            _ => return domain(format!("basic cycle index {i} not in {{1, 3}}")),
        };
        let gap = (other - lo).abs().min((other - hi).abs());
        let mut clearance = 0.3 * gap.min(hi - lo);
        let mut half_width = clearance;
        for p in avoid {
            // distance from p to the segment [lo, hi]
            let t = p.re.clamp(lo, hi);
            let d = (p - Complex64::new(t, 0.0)).norm();
            if d < 1e-9 * self.rho {
                return Err(Error::Contract(format!("pole {p} lies on the cut [{lo}, {hi}]")));
            }
            if p.re > lo && p.re < hi {
                half_width = half_width.min(0.5 * p.im.abs());
            } else {
                clearance = clearance.min(0.5 * d);
                half_width = half_width.min(0.5 * d);
            }
        }
        Ok(Ellipse::around_segment(
            Complex64::new(lo, 0.0),
            Complex64::new(hi, 0.0),
            clearance,
            half_width,
        ))
    }

    fn loop_integral<F>(&self, i: usize, half_period: Complex64, avoid: &[Complex64], f: &F) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        let ell = self.cycle_ellipse(i, avoid)?;
        let cubic = |x: Complex64| self.cubic(x);
        let opts = QuadOptions::default();
        let start = ell.point(0.0);
        let bp = [0.0, 0.25, 0.5, 0.75, 1.0];
        let y0 = cubic(start).sqrt();
        let (period, _) = integrate_with_sqrt(&ell, &bp, cubic, y0, |_, y| 0.5 / y, opts)?;
        let sign = if (period - half_period * 2.0).norm() <= (period + half_period * 2.0).norm() {
            1.0
        } else {
            -1.0
        };
        let (val, _) = integrate_with_sqrt(&ell, &bp, cubic, y0, |x, y| f(x, y) * 0.5 / y, opts)?;
        // the other sheet negates Y, which is the same as reversing the loop
        Ok(if sign > 0.0 {
            val
        } else {
            let (val2, _) = integrate_with_sqrt(&ell, &bp, cubic, -y0, |x, y| f(x, y) * 0.5 / y, opts)?;
            val2
        })
    }
}

/// `θ1'(0)` and `θ1'''(0)` as functions of the nome.
fn theta1_odd_derivatives(q: f64) -> (f64, f64) {
    let mut d1 = 0.0;
    let mut d3 = 0.0;
    for n in 0..200 {
        let nh = n as f64 + 0.5;
        let w = q.powf(nh * nh);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let m = (2 * n + 1) as f64;
        d1 += 2.0 * sign * w * m;
        d3 -= 2.0 * sign * w * m * m * m;
        if w * m * m * m < 1e-18 * d3.abs() && n > 1 {
            break;
        }
    }
    (d1, d3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(rho: f64, k: f64) -> WeierstrassModel {
        WeierstrassModel::from_rho_k(rho, EllipticModulus::new(k).unwrap()).unwrap()
    }

    /// `℘` from row sums of `csc²`, independent of the Jacobi route.
    fn wp_lattice_sum(m: &WeierstrassModel, u: Complex64) -> Complex64 {
        let w1 = m.omega();
        let tau = m.omega_prime() / w1;
        let a = PI / (2.0 * w1);
        let csc2 = |z: Complex64| {
            let s = z.sin();
            Complex64::new(1.0, 0.0) / (s * s)
        };
        let mut constant = c(1.0 / 3.0, 0.0);
        let mut sum = csc2(u * a);
        for n in 1..40 {
            let nt = tau * (PI * n as f64);
            constant += csc2(nt) * 2.0;
            sum += csc2(u * a + nt) + csc2(u * a - nt);
        }
        (sum - constant) * (a * a)
    }

    #[test]
    fn roots_from_rho_k() {
        let m = WeierstrassModel::from_rho_k(4.0, EllipticModulus::from_parameter(0.5).unwrap()).unwrap();
        let [e1, e2, e3] = m.roots();
        assert_abs_diff_eq!(e1, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e2, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e3, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.g2(), 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m.g3(), 0.0, epsilon = 1e-13);
        let m = WeierstrassModel::from_rho_k(1.0, EllipticModulus::from_parameter(0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(m.omega(), 1.854075, epsilon = 1e-5);
        assert_abs_diff_eq!(m.omega_prime().im, m.omega(), epsilon = 1e-14);
        assert!(WeierstrassModel::from_rho_k(-1.0, EllipticModulus::new(0.5).unwrap()).is_err());
        assert!(WeierstrassModel::from_rho_k(1.0, EllipticModulus::new(0.0).unwrap()).is_err());
    }

    #[test]
    fn invariants_round_trip() {
        let m = model(2.5, 0.37);
        let n = WeierstrassModel::from_invariants(m.g2(), m.g3()).unwrap();
        for (a, b) in m.roots().iter().zip(n.roots()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(n.modulus().k(), 0.37, epsilon = 1e-12);
        assert_abs_diff_eq!(m.roots().iter().sum::<f64>(), 0.0, epsilon = 1e-14);
        assert!(WeierstrassModel::from_invariants(1.0, 1.0).is_err());
    }

    #[test]
    fn branch_points() {
        let m = model(3.0, 0.6);
        let [e1, e2, e3] = m.roots();
        let w = m.half_periods();
        for (wi, ei) in w.iter().zip([e1, e2, e3]) {
            let (x, y) = m.wp(*wi).unwrap();
            assert!((x - ei).norm() < 1e-10, "{x} vs {ei}");
            assert!(y.norm() < 1e-7);
        }
        assert!(matches!(m.wp(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(m.wp(m.lattice().lattice_point(1, -2)).is_err());
    }

    #[test]
    fn wp_matches_lattice_sum_and_cubic() {
        let m = model(1.7, 0.8);
        for &u in &[c(0.3, 0.1), c(-0.9, 0.6), c(1.1, -0.4), c(0.05, 0.9)] {
            let (x, y) = m.wp(u).unwrap();
            let oracle = wp_lattice_sum(&m, u);
            assert!((x - oracle).norm() < 1e-9 * (1.0 + x.norm()), "{x} vs {oracle}");
            assert!(m.on_curve_residual(x, y) < 1e-12);
            let (xm, ym) = m.wp(-u).unwrap();
            assert!((xm - x).norm() < 1e-12 * (1.0 + x.norm()));
            assert!((ym + y).norm() < 1e-10 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn zeta_is_minus_antiderivative_of_wp() {
        let m = model(2.0, 0.45);
        let h = 1e-5;
        for &u in &[c(0.4, 0.3), c(-0.7, 0.2), c(0.9, -0.8)] {
            let d = (m.zeta_w(u + h).unwrap() - m.zeta_w(u - h).unwrap()) / (2.0 * h);
            let (x, _) = m.wp(u).unwrap();
            assert!((d + x).norm() < 1e-7 * (1.0 + x.norm()));
            let ds = (m.ln_sigma(u + h).unwrap() - m.ln_sigma(u - h).unwrap()) / (2.0 * h);
            assert!((ds - m.zeta_w(u).unwrap()).norm() < 1e-7);
        }
    }

    #[test]
    fn legendre_relation_and_sums() {
        let m = model(1.3, 0.71);
        let w = m.half_periods();
        let eta = m.etas();
        let lhs = eta[0] * w[2] - eta[2] * w[0];
        assert!((lhs - c(0.0, PI / 2.0)).norm() < 1e-10);
        assert!((w[0] + w[1] + w[2]).norm() < 1e-15);
        assert!((eta[0] + eta[1] + eta[2]).norm() < 1e-15);
        // η3 against ζ evaluated at the half-period itself
        assert!((m.zeta_w(w[2]).unwrap() - eta[2]).norm() < 1e-10);
        assert!((m.zeta_w(w[0]).unwrap() - eta[0]).norm() < 1e-10);
    }

    #[test]
    fn sigma_small_argument_and_monodromy() {
        let m = model(0.9, 0.3);
        let u = c(1e-6, 0.0);
        assert!((m.sigma(u).unwrap() / u - 1.0).norm() < 1e-10);
        let u = c(0.31, -0.27);
        assert_eq!(m.zeta_w(-u).unwrap(), -m.zeta_w(u).unwrap());
        let w = m.half_periods();
        let eta = m.etas();
        for i in 0..3 {
            // ln σ(u + 2ω_i) − ln σ(u) = iπ + 2η_i(u + ω_i)  (mod 2πi)
            let d = m.ln_sigma(u + w[i] * 2.0).unwrap() - m.ln_sigma(u).unwrap();
            let expect = c(0.0, PI) + eta[i] * 2.0 * (u + w[i]);
            let diff = d - expect;
            let k = (diff.im / (2.0 * PI)).round();
            assert!((diff - c(0.0, 2.0 * PI * k)).norm() < 1e-9, "i={i}: {diff}");
        }
    }

    #[test]
    fn abel_jacobi_round_trip() {
        let m = model(2.2, 0.55);
        let [e1, _, _] = m.roots();
        let p = m.abel_jacobi(c(e1, 0.0), c(0.0, 0.0)).unwrap();
        assert!(p.lattice_distance(&m.point(m.half_periods()[0])) < 1e-7);
        for &u in &[c(0.2, 0.1), c(-0.5, 0.7), c(0.9, -0.3), c(0.01, 0.02), c(1.0, 1.0)] {
            let (x, y) = m.wp(u).unwrap();
            let v = m.abel_jacobi(x, y).unwrap();
            assert!(v.lattice_distance(&m.point(u)) < 1e-8, "{u} -> {}", v.u());
            let vm = m.abel_jacobi(x, -y).unwrap();
            assert!(vm.lattice_distance(&-m.point(u)) < 1e-8);
        }
        assert!(matches!(
            m.abel_jacobi(c(1.0, 0.0), c(5.0, 0.0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn pi_values() {
        let m = model(1.5, 0.62);
        let w = m.half_periods();
        let (x, y) = m.wp(c(0.27, 0.33)).unwrap();
        let s: Complex64 = (1..=3).map(|i| m.pi_i(x, y, i).unwrap().value).sum();
        assert!(s.norm() < 1e-10);
        let p = m.pi_from_u(w[0], 1);
        assert!(p.value.norm() < 1e-10);
    }

    #[test]
    fn complete_integrals_by_quadrature() {
        let m = model(1.8, 0.47);
        let w = m.half_periods();
        let eta = m.etas();
        for i in 1..=3 {
            let p = m.cycle_integral(i, &[], |_, _| c(1.0, 0.0)).unwrap();
            assert!((p - w[i - 1] * 2.0).norm() < 1e-10);
            let q = -m.cycle_integral(i, &[], |x, _| x).unwrap();
            assert!(
                (q - eta[i - 1] * 2.0).norm() < 1e-9,
                "i={i}: {q} vs {}",
                eta[i - 1] * 2.0
            );
        }
    }

    #[test]
    fn third_kind_periods_by_quadrature() {
        let m = model(1.8, 0.47);
        for &u in &[c(0.3, 0.4), c(-0.8, 0.9), c(1.1, -0.2)] {
            let (x0, y0) = m.wp(u).unwrap();
            for i in 1..=3 {
                let q = -m.cycle_integral(i, &[x0], |x, _| y0 / (x - x0)).unwrap();
                let p = m.pi_i(x0, y0, i).unwrap().value * 2.0;
                assert!((q - p).norm() < 1e-9, "u={u} i={i}: {q} vs {p}");
            }
        }
    }
}
