//! Scalar special functions: Γ and the Gauss hypergeometric function ₂F₁.
//!
//! Both are needed by the weight constant `C_{1,α}` and by the closed-form
//! exact solutions. Arguments are real; no analytic continuation beyond
//! `z ∈ [-1, 1]` is attempted for ₂F₁.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Series cap for ₂F₁.
const HYP2F1_MAX_TERMS: usize = 100_000;
/// Relative term size at which the ₂F₁ series is declared converged.
const HYP2F1_EPS: f64 = 1e-16;

// Lanczos rational approximation, g = 6.024680040776729583740234375, N = 12
// (Godfrey/Pugh constants as used by boost and musl). Relative error is a few
// ulps over the range used here. The constants are kept at their published
// precision.
#[allow(clippy::excessive_precision)]
const LANCZOS_G_MINUS_HALF: f64 = 5.524680040776729583740234375;
#[allow(clippy::excessive_precision)]
const LANCZOS_NUM: [f64; 13] = [
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671403265390,
    6039542586.3520280050642916443072979210699388420708,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
];
const LANCZOS_DEN: [f64; 13] = [
    0.0,
    39916800.0,
    120543840.0,
    150917976.0,
    105258076.0,
    45995730.0,
    13339535.0,
    2637558.0,
    357423.0,
    32670.0,
    1925.0,
    66.0,
    1.0,
];
const FACTORIALS: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
    51090942171709440000.0,
    1124000727777607680000.0,
];

fn lanczos_s(x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    // Horner in x below 8, in 1/x above, to avoid overflow of the polynomials.
    if x < 8.0 {
        for i in (0..13).rev() {
            num = num * x + LANCZOS_NUM[i];
            den = den * x + LANCZOS_DEN[i];
        }
    } else {
        for i in 0..13 {
            num = num / x + LANCZOS_NUM[i];
            den = den / x + LANCZOS_DEN[i];
        }
    }
    num / den
}

/// sin(πx) evaluated with argument reduction on x, accurate for the
/// reflection formula even at large |x|.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x * 0.5).floor(); // x mod 2, in [0, 2)
    if r <= 0.25 {
        (PI * r).sin()
    } else if r < 0.75 {
        (PI * (0.5 - r)).cos()
    } else if r <= 1.25 {
        -(PI * (r - 1.0)).sin()
    } else if r < 1.75 {
        -(PI * (1.5 - r)).cos()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// The Gamma function Γ(x) for real x, excluding the poles at
/// non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma: NaN argument".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(format!("gamma: pole at x = {x}")));
    }
    if x > 171.62 {
        return Err(Error::Domain(format!("gamma: overflow for x = {x}")));
    }
    // Exact small factorials.
    if x == x.floor() && x >= 1.0 && x <= 23.0 {
        return Ok(FACTORIALS[x as usize - 1]);
    }

    let ax = x.abs();
    // y = |x| + g - 1/2, with the rounding of the addition tracked so the
    // power below sees a compensated exponent.
    let y = ax + LANCZOS_G_MINUS_HALF;
    let dy = if ax > LANCZOS_G_MINUS_HALF {
        (y - ax) - LANCZOS_G_MINUS_HALF
    } else {
        (y - LANCZOS_G_MINUS_HALF) - ax
    };

    let mut z = ax - 0.5;
    let mut r = lanczos_s(ax) * (-y).exp();
    if x < 0.0 {
        // Reflection: Γ(x)Γ(-x) = -π / (x sin(πx)).
        r = -PI / (sin_pi(ax) * ax * r);
        if !r.is_finite() {
            return Err(Error::Domain(format!("gamma: overflow for x = {x}")));
        }
        z = -z;
        r -= dy * (LANCZOS_G_MINUS_HALF + 0.5) * r / y;
        let p = y.powf(0.5 * z);
        return Ok(r * p * p);
    }
    r += dy * (LANCZOS_G_MINUS_HALF + 0.5) * r / y;
    let p = y.powf(0.5 * z);
    Ok(r * p * p)
}

/// Gauss series Σ_k (a)_k (b)_k / ((c)_k k!) z^k with term-ratio recurrence.
/// Converges for |z| < 1, and at |z| = 1 when c - a - b > 0.
fn gauss_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..HYP2F1_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() <= HYP2F1_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "hyp2f1 series: {HYP2F1_MAX_TERMS} terms at z = {z}"
    )))
}

/// Detects parameters a, b, c for which (a)_k hits zero, making the series a
/// polynomial; the recurrence handles that case naturally, so only c poles
/// need guarding.
fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// The Gauss hypergeometric function ₂F₁(a, b; c; z) for z ∈ [-1, 1].
///
/// Direct series for moderate z; Pfaff transformation for z < -1/2;
/// near z = 1 the standard 1-z connection formula keeps convergence fast,
/// and z = 1 itself uses the Gauss summation (requires c - a - b > 0).
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_int(c) {
        return Err(Error::Pole(format!("hyp2f1: c = {c} is a non-positive integer")));
    }
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("hyp2f1: z = {z} outside [-1, 1]")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let s = c - a - b;
    if z == 1.0 {
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "hyp2f1: divergent at z = 1 (c - a - b = {s} <= 0)"
            )));
        }
        // Gauss: Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b)).
        return Ok(gamma(c)? * gamma(s)? / (gamma(c - a)? * gamma(c - b)?));
    }
    if z < -0.5 {
        // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)), argument in (1/3, 1/2].
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * gauss_series(a, c - b, c, w)?);
    }
    if z > 0.99 && s > 0.0 {
        // z -> 1 connection formula (both series run in powers of 1 - z):
        //   2F1(a,b;c;z) = Γ(c)Γ(s)/(Γ(c-a)Γ(c-b)) 2F1(a,b;1-s;1-z)
        //     + (1-z)^s Γ(c)Γ(-s)/(Γ(a)Γ(b)) 2F1(c-a,c-b;1+s;1-z).
        // Unusable when s is an integer (Γ(-s) pole) or a, b hit poles;
        // those cases fall through to the direct series.
        let usable = (s - s.round()).abs() > 1e-8
            && !is_nonpositive_int(a)
            && !is_nonpositive_int(b)
            && !is_nonpositive_int(1.0 - s);
        if usable {
            let w = 1.0 - z;
            let first =
                gamma(c)? * gamma(s)? / (gamma(c - a)? * gamma(c - b)?) * gauss_series(a, b, 1.0 - s, w)?;
            let second = w.powf(s) * gamma(c)? * gamma(-s)? / (gamma(a)? * gamma(b)?)
                * gauss_series(c - a, c - b, 1.0 + s, w)?;
            return Ok(first + second);
        }
    }
    gauss_series(a, b, c, z)
}
