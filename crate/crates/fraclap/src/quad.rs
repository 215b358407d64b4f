//! Adaptive numerical quadrature.
//!
//! Used only as an independent oracle: the production weights come from the
//! closed-form primitives in [`crate::kernel`], and the property suite checks
//! them against direct integration of the defining integrals. Nothing in the
//! operator or solver path calls into this module.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]` to roughly `tol` absolute accuracy.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Domain(format!("integrate: bad interval [{a}, {b}]")));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergence(format!(
            "adaptive Simpson: depth limit on [{a}, {b}]"
        )));
    }
    let half = 0.5 * tol;
    Ok(simpson_step(f, a, fa, m, fm, lm, flm, left, half, depth - 1)?
        + simpson_step(f, m, fm, b, fb, rm, frm, right, half, depth - 1)?)
}

/// Integrates `f` over `[a, ∞)` by mapping with `y = 1/s^4`, which turns an
/// integrand decaying like `y^{-1-δ}` into `s^{4δ-1}` near the origin,
/// integrable for any δ > 0. Requires `a > 0`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::Domain("integrate_to_infinity: need a > 0".into()));
    }
    let g = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            // y = s^{-4}, dy = -4 s^{-5} ds
            let t = s * s * s * s;
            f(1.0 / t) * 4.0 / (t * s)
        }
    };
    integrate(&g, 0.0, a.recip().powf(0.25), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rel_err;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 0.0).abs() < 1e-13); // x^4/4 - x^2 at 2 is 0
    }

    #[test]
    fn oscillatory() {
        let v = integrate(&|x: f64| x.sin(), 0.0, PI, 1e-13).unwrap();
        assert!(rel_err(v, 2.0) < 1e-12);
    }

    #[test]
    fn power_law_tail() {
        // ∫_2^∞ y^{-1.5} dy = 2 / sqrt(2)
        let v = integrate_to_infinity(&|y: f64| y.powf(-1.5), 2.0, 1e-13).unwrap();
        assert!(rel_err(v, 2.0 / 2.0f64.sqrt()) < 1e-11);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate(&|x| x, 1.0, 1.0, 1e-10).is_err());
        assert!(integrate_to_infinity(&|y: f64| y.recip(), 0.0, 1e-10).is_err());
    }
}
