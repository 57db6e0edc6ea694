//! The D_n ALE constraint system.
//!
//! Each monopole is an O(2) multiplet `χ(ζ) = w̄/ζ + t − wζ`. The deformed
//! quartic `ζ²(η − χ²)` is again a real O(4) multiplet, with
//!
//! ```text
//! z' = z − w²,  v' = v − 2tw,  x' = x − t² + 2|w|²
//! ```
//!
//! and roots `a, −1/ā, b, −1/b̄`. With `u⁻_ζ = F(sin D_ζ, k)/√ρ + ω'` the
//! derivatives of the generating function are
//!
//! ```text
//! ∂F/∂x = 2mω + 2m'ω' − Σ (u⁻_a + u⁻_b)
//! ∂F/∂v = (1/2√z) ln[σ-quotient] + (ζ(u∞⁺) + ζ(u∞⁻)) ∂F/∂x / 2√z
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent_sphere::{distance, vertex_angle, SpherePoint};
use crate::conic_pencil::{Pencil, PonceletSystem, ProjPoint};
use crate::error::{Error, Result};
use crate::o4_curve::MajoranaQuartic;
use crate::o4_integrals::IntegralContext;
use crate::special_functions::{complete_k, incomplete_f, Amplitude};
use crate::tolerances::CLOSURE;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `χ(ζ) = w̄/ζ + t − wζ`. The monopole sits at `σ·n(γ)` in ℝ³, where
/// `ζχ(ζ) = σ(ζ − γ)(γ̄ζ + 1)/(1 + |γ|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct O2Multiplet {
    pub t: f64,
    pub w: C,
}

impl O2Multiplet {
    pub fn new(t: f64, w: C) -> Self {
        Self { t, w }
    }

    pub fn from_coherent(sigma: f64, gamma: SpherePoint) -> Self {
        let n = gamma.unit_vector();
        Self {
            t: sigma * n[2],
            w: -c(n[0], -n[1]) * (sigma / 2.0),
        }
    }

    pub fn from_position(r: [f64; 3]) -> Self {
        Self {
            t: r[2],
            w: -c(r[0], -r[1]) / 2.0,
        }
    }

    pub fn position(&self) -> [f64; 3] {
        [-2.0 * self.w.re, 2.0 * self.w.im, self.t]
    }

    /// `(σ, γ)` with `σ ≥ 0`; `γ = 0` when `σ = 0`.
    pub fn coherent(&self) -> (f64, SpherePoint) {
        let r = self.position();
        let sigma = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if sigma == 0.0 {
            return (0.0, SpherePoint::Finite(c(0.0, 0.0)));
        }
        (sigma, SpherePoint::from_unit_vector(r))
    }

    pub fn eval(&self, zeta: C) -> C {
        self.w.conj() / zeta + self.t - self.w * zeta
    }

    /// Ascending coefficients of `ζχ(ζ)`.
    pub fn coefficients(&self) -> [C; 3] {
        [self.w.conj(), c(self.t, 0.0), -self.w]
    }
}

/// The monopole positions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MonopoleConfig {
    pub multiplets: Vec<O2Multiplet>,
}

impl MonopoleConfig {
    pub fn new(multiplets: Vec<O2Multiplet>) -> Self {
        Self { multiplets }
    }

    pub fn n(&self) -> usize {
        self.multiplets.len()
    }
}

/// Roots `a`, `b` of a deformed multiplet; `a` continues `α` and `b`
/// continues `β` as the deformation is switched off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedRoots {
    pub a: SpherePoint,
    pub b: SpherePoint,
    pub deformed: MajoranaQuartic,
}

impl DeformedRoots {
    /// `[a, −1/ā, b, −1/b̄]`.
    pub fn all(&self) -> [SpherePoint; 4] {
        [self.a, self.a.antipode(), self.b, self.b.antipode()]
    }
}

/// The winding integers `(m, m')` of `2mω + 2m'ω'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Winding {
    pub m: i64,
    pub m_prime: i64,
}

impl Winding {
    pub fn new(m: i64, m_prime: i64) -> Self {
        Self { m, m_prime }
    }

    /// `m' = n`, the choice that makes `∂F/∂x` real.
    pub fn real(m: i64, cfg: &MonopoleConfig) -> Self {
        Self::new(m, cfg.n() as i64)
    }
}

pub fn deformed_multiplet(m: &MajoranaQuartic, chi: &O2Multiplet) -> Result<MajoranaQuartic> {
    let (t, w) = (chi.t, chi.w);
    MajoranaQuartic::from_coefficients(m.z - w * w, m.v - w * (2.0 * t), m.x - t * t + 2.0 * w.norm_sqr())
        .map_err(|e| Error::Degenerate(format!("deformed quartic: {e}")))
}

pub fn deformed_roots(m: &MajoranaQuartic, chi: &O2Multiplet) -> Result<DeformedRoots> {
    let d = deformed_multiplet(m, chi)?;
    let (p, q) = (SpherePoint::new(d.alpha), SpherePoint::new(d.beta));
    let (alpha, beta) = (SpherePoint::new(m.alpha), SpherePoint::new(m.beta));
    let mut best: Option<(f64, f64, SpherePoint, SpherePoint)> = None;
    for (x, y) in [(p, q), (q, p)] {
        for a in [x, x.antipode()] {
            for b in [y, y.antipode()] {
                let cost = distance(&a, &alpha) + distance(&b, &beta);
                let arg = a.finite().map_or(PI, |z| z.arg());
                let better = match best {
                    None => true,
                    Some((bc, barg, _, _)) => cost < bc - 1e-12 || ((cost - bc).abs() <= 1e-12 && arg < barg),
                };
                if better {
                    best = Some((cost, arg, a, b));
                }
            }
        }
    }
    let (_, _, a, b) = best.expect("eight candidates");
    Ok(DeformedRoots { a, b, deformed: d })
}

/// Residuals of `ρ sin δ_αζ sin δ_βζ = σ² sin² δ_γζ` and of the bisector
/// condition `φ_γζα + φ_γζβ ∈ 2πℤ` at `ζ`.
pub fn spherical_residuals(m: &MajoranaQuartic, chi: &O2Multiplet, zeta: SpherePoint) -> (f64, f64) {
    let (sigma, gamma) = chi.coherent();
    let (alpha, beta) = (SpherePoint::new(m.alpha), SpherePoint::new(m.beta));
    let lhs = m.rho * distance(&alpha, &zeta).sin() * distance(&beta, &zeta).sin();
    let rhs = sigma * sigma * distance(&gamma, &zeta).sin().powi(2);
    let phase = vertex_angle(&zeta, &gamma, &alpha) + vertex_angle(&zeta, &gamma, &beta);
    let wrapped = phase - 2.0 * PI * (phase / (2.0 * PI)).round();
    ((lhs - rhs).abs(), wrapped.abs())
}

/// Monopole directions `γ` at scale `σ` for which `ζ` is a deformed root:
/// the bisector of the angle `αζβ` met by the circles at distance `δ_γζ`
/// from `ζ`. Antipodal pairs; empty when no such distance exists.
pub fn gamma_from_zeta(m: &MajoranaQuartic, zeta: SpherePoint, sigma: f64) -> Result<Vec<SpherePoint>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    let (alpha, beta) = (SpherePoint::new(m.alpha), SpherePoint::new(m.beta));
    let s2 = m.rho * distance(&alpha, &zeta).sin() * distance(&beta, &zeta).sin() / (sigma * sigma);
    if s2 > 1.0 {
        return Ok(Vec::new());
    }
    let delta = s2.max(0.0).sqrt().asin();
    let n = zeta.unit_vector();
    let ta = unit(tangent(n, alpha.unit_vector()));
    let tb = unit(tangent(n, beta.unit_vector()));
    let sum = [ta[0] + tb[0], ta[1] + tb[1], ta[2] + tb[2]];
    let dir = if norm(sum) > 1e-8 {
        unit(sum)
    } else {
        unit(cross(n, ta))
    };
    let at = |s: f64| {
        let (cd, sd) = (delta.cos(), s * delta.sin());
        SpherePoint::from_unit_vector([
            cd * n[0] + sd * dir[0],
            cd * n[1] + sd * dir[1],
            cd * n[2] + sd * dir[2],
        ])
    };
    let (p, q) = (at(1.0), at(-1.0));
    Ok(vec![p, p.antipode(), q, q.antipode()])
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let r = norm(a);
    [a[0] / r, a[1] / r, a[2] / r]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn tangent(at: [f64; 3], toward: [f64; 3]) -> [f64; 3] {
    let d = at[0] * toward[0] + at[1] * toward[1] + at[2] * toward[2];
    [toward[0] - d * at[0], toward[1] - d * at[1], toward[2] - d * at[2]]
}

fn all_roots(m: &MajoranaQuartic, cfg: &MonopoleConfig) -> Result<Vec<DeformedRoots>> {
    cfg.multiplets.iter().map(|chi| deformed_roots(m, chi)).collect()
}

/// `u⁻_a + u⁻_b` summed over monopoles, unreduced.
fn u_minus_sum(m: &MajoranaQuartic, roots: &[DeformedRoots]) -> Result<C> {
    let mut s = c(0.0, 0.0);
    for r in roots {
        s += m.u_minus_raw(r.a)? + m.u_minus_raw(r.b)?;
    }
    Ok(s)
}

fn lattice_vector(m: &MajoranaQuartic, winding: Winding) -> Result<C> {
    let w = m.weierstrass()?;
    Ok(w.omega_prime() * (2 * winding.m_prime) as f64 + c(w.omega() * (2 * winding.m) as f64, 0.0))
}

/// `∂F/∂x = 2mω + 2m'ω' − Σ (u⁻_a + u⁻_b)`.
pub fn df_dx(m: &MajoranaQuartic, cfg: &MonopoleConfig, winding: Winding) -> Result<C> {
    let roots = all_roots(m, cfg)?;
    Ok(lattice_vector(m, winding)? - u_minus_sum(m, &roots)?)
}

/// Distance of `S = Σ [F(sin D_a, k) + F(sin D_b, k)]` from the nearest
/// multiple of `2K(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsResidual {
    pub sum: f64,
    pub residual: f64,
    pub nearest_multiple: i64,
    pub two_k: f64,
}

pub fn es_residual(m: &MajoranaQuartic, cfg: &MonopoleConfig) -> Result<EsResidual> {
    let k = m.modulus();
    let mut sum = 0.0;
    for r in all_roots(m, cfg)? {
        for zeta in [r.a, r.b] {
            let s = m.sin_d(zeta);
            let s = if s.abs() > 1.0 && s.abs() < 1.0 + 1e-12 {
                s.signum()
            } else {
                s
            };
            if s.abs() > 1.0 {
                return Err(Error::Geometric(format!("sin D = {s} outside [-1, 1]")));
            }
            sum += incomplete_f(&Amplitude::from_sin(s)?, &k)?;
        }
    }
    let two_k = 2.0 * complete_k(&k)?;
    let nearest = (sum / two_k).round();
    Ok(EsResidual {
        sum,
        residual: (sum - nearest * two_k).abs(),
        nearest_multiple: nearest as i64,
        two_k,
    })
}

/// The right side of `e^{2u√z} = σ-quotient` as a function of `t` in place
/// of `u∞`, on the branch given by summing `ln σ` term by term.
pub fn sigma_quotient_log(m: &MajoranaQuartic, cfg: &MonopoleConfig, winding: Winding, t: C) -> Result<C> {
    let w = m.weierstrass()?;
    let l1 = c(2.0 * winding.m as f64 * w.omega(), 0.0);
    let l2 = w.omega_prime() * (2 * winding.m_prime) as f64;
    let mut s = w.ln_sigma(l1 - t)? - w.ln_sigma(l1 + t)? + w.ln_sigma(l2 - t)? - w.ln_sigma(l2 + t)?;
    for (u, ua) in representatives(m, cfg)? {
        s += w.ln_sigma(u + t)? + w.ln_sigma(ua - t)? - w.ln_sigma(u - t)? - w.ln_sigma(ua + t)?;
    }
    Ok(s)
}

/// Pairs `(u_ζ, u_{−1/ζ̄})` for `ζ = a_l, b_l`, with `u_ζ` shifted so that
/// `u_ζ − u_{−1/ζ̄}` is exactly the unreduced `u⁻_ζ` used in `∂F/∂x`.
fn representatives(m: &MajoranaQuartic, cfg: &MonopoleConfig) -> Result<Vec<(C, C)>> {
    let w = m.weierstrass()?;
    let lat = w.lattice();
    let mut out = Vec::new();
    for r in all_roots(m, cfg)? {
        for zeta in [r.a, r.b] {
            let jc = m.jacobian_coordinate(zeta)?;
            let um = m.u_minus_raw(zeta)?;
            let ua = jc.u_antipode.u();
            let (gap, _, _) = lat.reduce(jc.u.u() - ua - um);
            if gap.norm() > 1e-8 * (1.0 + w.omega()) {
                return Err(Error::NonConvergence {
                    iterations: 0,
                    residual: gap.norm(),
                    trace: Vec::new(),
                });
            }
            out.push((ua + um, ua));
        }
    }
    Ok(out)
}

/// `∂F/∂v`. The logarithm is taken on its principal branch, so the value is
/// fixed modulo `πi/√z`.
pub fn df_dv(m: &MajoranaQuartic, cfg: &MonopoleConfig, winding: Winding) -> Result<C> {
    let ctx = IntegralContext::new(m)?;
    let sqrt_z = m.z.sqrt();
    if sqrt_z.norm() < 1e-7 {
        return Err(Error::Domain("z = 0: ∂F/∂v is undefined".into()));
    }
    let log = sigma_quotient_log(m, cfg, winding, ctx.u_inf)?;
    let log = c(log.re, log.im - 2.0 * PI * (log.im / (2.0 * PI)).round());
    let fx = df_dx(m, cfg, winding)?;
    Ok((log + ctx.zeta_pm_sum()? * fx) / (sqrt_z * 2.0))
}

/// `d` reduced modulo `πi/√z`.
pub fn reduce_log_branch(d: C, sqrt_z: C) -> C {
    let unit = c(0.0, PI) / sqrt_z;
    let q = d / unit;
    d - unit * q.re.round()
}

/// Newton budget and target for [`solve_legendre_relations`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreSolution {
    pub multiplet: MajoranaQuartic,
    pub iterations: usize,
    /// `[Re, Im]` of `∂F/∂v − u` (mod `πi/√z`) and `∂F/∂x`.
    pub residuals: [f64; 3],
    pub winding: Winding,
    pub es: EsResidual,
    pub trace: Vec<f64>,
}

fn legendre_residuals(z: C, v: C, x: f64, cfg: &MonopoleConfig, u: C) -> Result<([f64; 3], Winding, MajoranaQuartic)> {
    let m = MajoranaQuartic::from_coefficients(z, v, x)?;
    let es = es_residual(&m, cfg)?;
    let winding = Winding::real(es.nearest_multiple, cfg);
    let fx = df_dx(&m, cfg, winding)?;
    let fv = reduce_log_branch(df_dv(&m, cfg, winding)? - u, z.sqrt());
    Ok(([fv.re, fv.im, fx.re], winding, m))
}

fn max_abs(r: &[f64; 3]) -> f64 {
    r.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Newton iteration over `(v, x)` at fixed `z` for `∂F/∂v = u`, `∂F/∂x = 0`,
/// with the winding `m` re-chosen as the nearest multiple at every step.
pub fn solve_legendre_relations(
    cfg: &MonopoleConfig,
    z: C,
    u: C,
    seed: &MajoranaQuartic,
    opts: SolverOptions,
) -> Result<LegendreSolution> {
    if (seed.z - z).norm() > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::Contract("seed multiplet must have the requested z".into()));
    }
    let mut p = [seed.v.re, seed.v.im, seed.x];
    let eval = |p: &[f64; 3]| legendre_residuals(z, c(p[0], p[1]), p[2], cfg, u);
    let (mut r, mut winding, mut m) = eval(&p)?;
    let mut trace = vec![max_abs(&r)];
    for it in 0..=opts.max_iterations {
        if max_abs(&r) < opts.tol {
            let es = es_residual(&m, cfg)?;
            return Ok(LegendreSolution {
                multiplet: m,
                iterations: it,
                residuals: r,
                winding,
                es,
                trace,
            });
        }
        if it == opts.max_iterations {
            break;
        }
        // forward-difference Jacobian
        let mut jac = nalgebra::Matrix3::<f64>::zeros();
        for j in 0..3 {
            let h = 1e-7 * (1.0 + p[j].abs());
            let mut q = p;
            q[j] += h;
            let (rq, _, _) = eval(&q)?;
            for i in 0..3 {
                jac[(i, j)] = (rq[i] - r[i]) / h;
            }
        }
        let rhs = nalgebra::Vector3::new(-r[0], -r[1], -r[2]);
        let step = jac.lu().solve(&rhs).ok_or_else(|| Error::NonConvergence {
            iterations: it,
            residual: max_abs(&r),
            trace: trace.clone(),
        })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let q = [
                p[0] + lambda * step[0],
                p[1] + lambda * step[1],
                p[2] + lambda * step[2],
            ];
            if let Ok((rq, wq, mq)) = eval(&q) {
                if max_abs(&rq) < max_abs(&r) {
                    (p, r, winding, m) = (q, rq, wq, mq);
                    accepted = true;
                    break;
                }
            }
            lambda /= 2.0;
        }
        trace.push(max_abs(&r));
        if !accepted {
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: trace.len() - 1,
        residual: max_abs(&r),
        trace,
    })
}

/// Closure of the chain through the conics `C_{℘(u⁻)}` of the Cayley
/// pencil, from several starting points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub es: EsResidual,
    pub steps: Vec<C>,
    pub residuals: Vec<f64>,
    pub closes: bool,
}

pub fn cayley_system(m: &MajoranaQuartic) -> Result<PonceletSystem> {
    let cp = m.cayley_pair()?;
    let sys = PonceletSystem::new(Pencil::from_real(cp.a, cp.b)?)?;
    let (w, wm) = (sys.model(), m.weierstrass()?);
    let gap = (w.omega() - wm.omega()).abs() + (w.omega_prime() - wm.omega_prime()).norm();
    if gap > 1e-9 * (1.0 + wm.omega()) {
        return Err(Error::Contract(format!(
            "pencil lattice differs from the multiplet's by {gap:e}"
        )));
    }
    Ok(sys)
}

/// Runs the chain with steps `u⁻_{a_l}, u⁻_{b_l}` from the points `P_{℘(s)}`,
/// `s ∈ starts`.
pub fn poncelet_correspondence(
    m: &MajoranaQuartic,
    cfg: &MonopoleConfig,
    starts: &[C],
) -> Result<CorrespondenceReport> {
    let es = es_residual(m, cfg)?;
    let mut steps = Vec::new();
    for r in all_roots(m, cfg)? {
        steps.push(m.u_minus_raw(r.a)?);
        steps.push(m.u_minus_raw(r.b)?);
    }
    let sys = cayley_system(m)?;
    let residuals = chain_residuals(&sys, &steps, starts)?;
    let closes = !residuals.is_empty() && residuals.iter().all(|r| *r < CLOSURE * 10.0);
    Ok(CorrespondenceReport {
        es,
        steps,
        residuals,
        closes,
    })
}

pub fn chain_residuals(sys: &PonceletSystem, steps: &[C], starts: &[C]) -> Result<Vec<f64>> {
    starts
        .iter()
        .map(|&s| {
            let p: ProjPoint = sys.point_of_u(s)?;
            Ok(sys.run_generalised(&p, steps)?.residual)
        })
        .collect()
}

/// The multiplet `(z, v, x)` with `x` in `bracket` tuned so that the
/// closure constraint holds for `cfg`: a root of `sin(πS/2K)`.
pub fn close_by_x(z: C, v: C, cfg: &MonopoleConfig, bracket: (f64, f64), samples: usize) -> Result<MajoranaQuartic> {
    let best = std::cell::Cell::new(f64::INFINITY);
    let g = |x: f64| -> Option<f64> {
        let m = MajoranaQuartic::from_coefficients(z, v, x).ok()?;
        let es = es_residual(&m, cfg).ok()?;
        best.set(best.get().min(es.residual / es.two_k));
        Some((PI * es.sum / es.two_k).sin())
    };
    let (lo, hi) = bracket;
    let n = samples.max(2);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let Some(gx) = g(x) else {
            prev = None;
            continue;
        };
        if let Some((xp, gp)) = prev {
            if gp * gx <= 0.0 {
                let (mut a, mut b, mut ga) = (xp, x, gp);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let Some(gm) = g(mid) else { break };
                    if ga * gm <= 0.0 {
                        b = mid;
                    } else {
                        (a, ga) = (mid, gm);
                    }
                    if b - a < 1e-15 * (1.0 + a.abs()) {
                        break;
                    }
                }
                // sign changes across a jump of S are not roots
                let m = MajoranaQuartic::from_coefficients(z, v, 0.5 * (a + b))?;
                let es = es_residual(&m, cfg)?;
                if es.residual < 1e-9 * es.two_k {
                    return Ok(m);
                }
            }
        }
        prev = Some((x, gx));
    }
    Err(Error::NonConvergence {
        iterations: n,
        // closest relative approach to a multiple of 2K on the scan
        residual: best.get(),
        trace: Vec::new(),
    })
}
