//! Complex polynomial roots by simultaneous (Aberth–Ehrlich) iteration.
//!
//! Coefficients are stored in ascending order, `c[0] + c[1]·x + …`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value of the polynomial and of its derivative at `x` (Horner).
pub fn eval_with_derivative(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

pub fn eval(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Drop trailing (leading-order) coefficients that vanish relative to the
/// largest one.
fn trim(c: &[Complex64]) -> &[Complex64] {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut n = c.len();
    while n > 0 && c[n - 1].norm() <= 1e-14 * scale {
        n -= 1;
    }
    &c[..n]
}

/// All roots of the polynomial, with multiplicity.
///
/// Leading coefficients that are negligible relative to the rest are dropped,
/// so the number of roots returned may be smaller than `c.len() − 1`; this is
/// how roots "at infinity" show up.
pub fn roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(c);
    if c.is_empty() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&a| a / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }
    // starting points on a circle of Fujiwara-bound radius, rotated off the axes
    let radius = (0..n)
        .map(|i| monic[i].norm().powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-8);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    let mut converged = vec![false; n];
    for _ in 0..500 {
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&b| b) {
            break;
        }
    }
    if z.iter().any(|r| !(r.re.is_finite() && r.im.is_finite())) {
        return Err(Error::NonConvergence {
            iterations: 500,
            residual: f64::NAN,
            trace: Vec::new(),
        });
    }
    // a final Newton pass on the original coefficients
    for r in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval_with_derivative(&monic, *r);
            if dp.norm() > 0.0 {
                let next = *r - p / dp;
                if eval(&monic, next).norm() < p.norm() {
                    *r = next;
                }
            }
        }
    }
    Ok(z)
}

/// Multiply out `Π (x − r_i)` in ascending order.
pub fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in rs {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn companion_eigenvalues(coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = c(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -coeffs[i] / lead;
        }
        m.schur().eigenvalues().unwrap().iter().copied().collect()
    }

    fn matched(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.iter().all(|x| {
            let best = (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()));
            match best {
                Some(j) if (b[j] - x).norm() < tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn quartic_against_companion_matrix() {
        let rs = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        let p = from_roots(&rs);
        let found = roots(&p).unwrap();
        assert!(matched(&found, &rs, 1e-12));
        let q = [c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.0), c(0.1, 0.2), c(1.5, -0.4)];
        let found = roots(&q).unwrap();
        let oracle = companion_eigenvalues(&q);
        assert!(matched(&found, &oracle, 1e-10));
        for r in &found {
            assert!(eval(&q, *r).norm() < 1e-12);
        }
    }

    #[test]
    fn degree_drops_when_leading_vanishes() {
        let p = [c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!(roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn clustered_roots() {
        let rs = [c(1.0, 0.0), c(1.0 + 1e-5, 0.0), c(-3.0, 2.0), c(0.5, -0.25)];
        let found = roots(&from_roots(&rs)).unwrap();
        assert!(matched(&found, &rs, 1e-8));
    }
}
