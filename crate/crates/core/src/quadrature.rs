//! Adaptive Gauss–Kronrod quadrature for complex integrands along
//! parametrised contours, and continuous square-root tracking along a path.
//!
//! Subdivision is depth-first, left panel before right, so that the sequence
//! of integrand evaluations (and therefore the result) is deterministic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 15-point Kronrod nodes on [-1, 1] (non-negative half) and weights; the
// 7-point Gauss rule uses every other node.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod_panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        rk += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            rg += (f1 + f2) * WG[j / 2];
        }
    }
    (rk * h, ((rk - rg) * h).norm())
}

/// Integration budget and tolerances.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_depth: 40,
        }
    }
}

/// `∫_a^b f(t) dt` for a complex-valued `f`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Complex64> {
    let (whole, _) = kronrod_panel(&mut f, a, b);
    let scale = whole.norm();
    let mut total = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    recurse(&mut f, a, b, opts, 0, scale, b - a, &mut total, &mut worst);
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonConvergence {
            iterations: opts.max_depth as usize,
            residual: worst,
            trace: Vec::new(),
        });
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    opts: QuadOptions,
    depth: u32,
    scale: f64,
    full: f64,
    total: &mut Complex64,
    worst: &mut f64,
) {
    let (val, err) = kronrod_panel(f, a, b);
    let share = (b - a) / full;
    let allowed = (opts.abs_tol + opts.rel_tol * scale.max(val.norm())) * share.max(1e-6);
    if err <= allowed || depth >= opts.max_depth {
        *total += val;
        *worst = worst.max(err);
        return;
    }
    let m = 0.5 * (a + b);
    recurse(f, a, m, opts, depth + 1, scale, full, total, worst);
    recurse(f, m, b, opts, depth + 1, scale, full, total, worst);
}

/// A parametrised contour `t ↦ γ(t)` on `[0, 1]`.
pub trait Contour {
    fn point(&self, t: f64) -> Complex64;
    fn velocity(&self, t: f64) -> Complex64;
}

/// Piecewise-linear path through the given waypoints, with equal parameter
/// length per segment.
#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<Complex64>,
}

impl Polyline {
    pub fn new(points: Vec<Complex64>) -> Self {
        assert!(points.len() >= 2, "a path needs at least two points");
        Self { points }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.points.len() - 1;
        let s = (t.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
        let j = (s.floor() as usize).min(n - 1);
        (j, s - j as f64)
    }

    /// Parameter values of the waypoints; integrating panel by panel between
    /// them avoids placing Kronrod panels across corners.
    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.points.len() - 1;
        (0..=n).map(|j| j as f64 / n as f64).collect()
    }
}

impl Contour for Polyline {
    fn point(&self, t: f64) -> Complex64 {
        let (j, s) = self.locate(t);
        self.points[j] + (self.points[j + 1] - self.points[j]) * s
    }

    fn velocity(&self, t: f64) -> Complex64 {
        let (j, _) = self.locate(t);
        (self.points[j + 1] - self.points[j]) * (self.points.len() - 1) as f64
    }
}

/// Positively oriented ellipse `c + e^{iθ}(a cos 2πt + i b sin 2πt)`.
#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub center: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub tilt: f64,
}

impl Ellipse {
    /// Thin ellipse enclosing the segment `[p, q]` with the given clearance
    /// beyond its ends and half-width.
    pub fn around_segment(p: Complex64, q: Complex64, clearance: f64, half_width: f64) -> Self {
        let d = q - p;
        Self {
            center: (p + q) * 0.5,
            semi_major: 0.5 * d.norm() + clearance,
            semi_minor: half_width,
            tilt: d.arg(),
        }
    }
}

impl Contour for Ellipse {
    fn point(&self, t: f64) -> Complex64 {
        let th = 2.0 * PI * t;
        self.center
            + Complex64::from_polar(1.0, self.tilt)
                * Complex64::new(self.semi_major * th.cos(), self.semi_minor * th.sin())
    }

    fn velocity(&self, t: f64) -> Complex64 {
        let th = 2.0 * PI * t;
        Complex64::from_polar(2.0 * PI, self.tilt)
            * Complex64::new(-self.semi_major * th.sin(), self.semi_minor * th.cos())
    }
}

/// A branch of `√g(γ(t))` continued along a contour.
///
/// The path is sampled finely enough that consecutive values of the root
/// differ by a small relative amount; later evaluations at arbitrary `t` pick
/// the sign closest to the nearest sample.
#[derive(Debug, Clone)]
pub struct TrackedSqrt {
    ts: Vec<f64>,
    roots: Vec<Complex64>,
}

impl TrackedSqrt {
    /// `start` fixes the branch at `t = 0`; only its sign relative to the
    /// principal root matters.
    pub fn build<G: Fn(f64) -> Complex64>(radicand: G, start: Complex64) -> Result<Self> {
        let mut r0 = radicand(0.0).sqrt();
        if (r0 - start).norm() > (r0 + start).norm() {
            r0 = -r0;
        }
        let mut ts = vec![0.0];
        let mut roots = vec![r0];
        let mut t = 0.0f64;
        let mut h = 1.0f64 / 256.0;
        while t < 1.0 {
            let step = h.min(1.0 - t);
            let tn = t + step;
            let prev = *roots.last().unwrap();
            let cand = radicand(tn).sqrt();
            let cand = if (cand - prev).norm() <= (cand + prev).norm() {
                cand
            } else {
                -cand
            };
            let rel = (cand - prev).norm() / prev.norm().max(cand.norm()).max(1e-300);
            if rel > 0.05 && step > 1e-12 {
                h = 0.5 * step;
                continue;
            }
            if step < 1e-12 && rel > 0.5 {
                return Err(Error::Contract("contour passes through a branch point".into()));
            }
            ts.push(tn);
            roots.push(cand);
            t = tn;
            if rel < 0.01 {
                h = (2.0 * step).min(1.0 / 64.0);
            }
        }
        Ok(Self { ts, roots })
    }

    /// The tracked root at `t`, given the radicand value there.
    pub fn at(&self, t: f64, radicand: Complex64) -> Complex64 {
        let r = radicand.sqrt();
        let j = match self.ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(j) => j,
            Err(j) => {
                if j == 0 {
                    0
                } else if j >= self.ts.len() || t - self.ts[j - 1] < self.ts[j] - t {
                    j - 1
                } else {
                    j
                }
            }
        };
        let refv = self.roots[j.min(self.roots.len() - 1)];
        if (r - refv).norm() <= (r + refv).norm() {
            r
        } else {
            -r
        }
    }

    pub fn end(&self) -> Complex64 {
        *self.roots.last().unwrap()
    }

    pub fn start(&self) -> Complex64 {
        self.roots[0]
    }

    /// The sample parameters and the root there.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.ts.iter().copied().zip(self.roots.iter().copied())
    }
}

/// `∫_γ f(x, √g(x)) dx` with the root continued from the branch nearest
/// `start_root` at `γ(0)`. Returns the integral and the root at the end.
pub fn integrate_with_sqrt<C, G, F>(
    path: &C,
    breakpoints: &[f64],
    radicand: G,
    start_root: Complex64,
    integrand: F,
    opts: QuadOptions,
) -> Result<(Complex64, Complex64)>
where
    C: Contour,
    G: Fn(Complex64) -> Complex64,
    F: Fn(Complex64, Complex64) -> Complex64,
{
    let tracker = TrackedSqrt::build(|t| radicand(path.point(t)), start_root)?;
    let mut total = Complex64::new(0.0, 0.0);
    for w in breakpoints.windows(2) {
        total += integrate(
            |t| {
                let x = path.point(t);
                let y = tracker.at(t, radicand(x));
                integrand(x, y) * path.velocity(t)
            },
            w[0],
            w[1],
            opts,
        )?;
    }
    Ok((total, tracker.end()))
}
