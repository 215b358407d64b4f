//! Application of the discrete fractional Laplacian to grid functions.
//!
//! For a node `x_i` the operator value decomposes into
//!
//! - term (I): the truncated convolution `Σ_{|j| <= M} (u_i - u_{i-j}) w_j`
//!   with the one-sided weight at `|j| = M`, sampling `u` beyond `[-L, L]`
//!   through the far-field model;
//! - term (II): the analytic mass of the kernel beyond `L_W`, acting on
//!   `u_i` itself: `u_i · 2 C_{1,α} / (α L_W^α)`;
//! - term (III): the contribution of `u` itself beyond `L_W`, modeled by an
//!   algebraic tail and reduced to ₂F₁ closed forms.
//!
//! The full operator is (I) + (II) − (III).

use crate::grid::{FarField, Grid, GridFn, TailRule};
use crate::kernel::{c_const, InterpOrder, Kernel};
use crate::special::hyp2f1;
use crate::{Error, Result};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Default truncation index for a grid: `L_W = 2L`, bumped by one cell for
/// quadratic kernels so that M is odd (panel alignment).
pub fn default_m(grid: &Grid, order: InterpOrder) -> usize {
    let m = grid.len() - 1; // 2L/h, even
    match order {
        InterpOrder::Tent => m,
        InterpOrder::Quad => m + 1,
    }
}

fn check_match(kernel: &Kernel, u: &GridFn) -> Result<()> {
    let h = u.grid().h();
    if (kernel.h() - h).abs() > 1e-12 * h {
        return Err(Error::Mismatch(format!(
            "kernel spacing {} differs from grid spacing {}",
            kernel.h(),
            h
        )));
    }
    Ok(())
}

/// Samples of `u` on the extended range `[-L - L_W, L + L_W]`: the grid
/// values in the middle, far-field model on both flanks. Index `k`
/// corresponds to `x = -L + (k - M) h`.
fn extended_samples(kernel: &Kernel, u: &GridFn, ff: &FarField) -> Result<Vec<f64>> {
    let grid = u.grid();
    let (n, m) = (grid.len(), kernel.m());
    let (l, h) = (grid.half_width(), grid.h());
    let mut ext = vec![0.0; n + 2 * m];
    ext[m..m + n].copy_from_slice(u.values());
    match ff {
        FarField::Zero => {}
        FarField::AlgebraicTail { beta, .. } => {
            if !(*beta > 0.0) {
                return Err(Error::Domain(format!(
                    "algebraic far field: beta = {beta} must be positive"
                )));
            }
            // Amplitudes track the live endpoints of u, so iterating solvers
            // stay consistent with their current state.
            let (amp_l, amp_r) = (u.left_value(), u.right_value());
            let scale = l.powf(*beta);
            for k in 0..m {
                let x = -l - (m - k) as f64 * h;
                ext[k] = amp_l * scale * x.abs().powf(-beta);
            }
            for k in 0..m {
                let x = l + (k + 1) as f64 * h;
                ext[m + n + k] = amp_r * scale * x.powf(-beta);
            }
        }
        FarField::DirichletTable { left, right, .. } => {
            if left.len() != m || right.len() != m {
                return Err(Error::Mismatch(format!(
                    "far-field table: {} / {} samples per side, kernel needs {m}",
                    left.len(),
                    right.len()
                )));
            }
            ext[..m].copy_from_slice(left);
            ext[m + n..].copy_from_slice(right);
        }
    }
    Ok(ext)
}

fn truncated_at(kernel: &Kernel, ext: &[f64], u_i: f64, i: usize) -> f64 {
    let m = kernel.m();
    let c = i + m; // index of x_i in the extended array
    let mut acc = 0.0;
    for j in 1..=m {
        acc += kernel.weight(j) * (2.0 * u_i - ext[c - j] - ext[c + j]);
    }
    acc
}

/// Term (I): the truncated convolution at node `i`, far-field samples
/// supplied by `ff`.
pub fn apply_truncated(kernel: &Kernel, u: &GridFn, ff: &FarField, i: usize) -> Result<f64> {
    check_match(kernel, u)?;
    if i >= u.len() {
        return Err(Error::Mismatch(format!("node index {i} out of range")));
    }
    let ext = extended_samples(kernel, u, ff)?;
    Ok(truncated_at(kernel, &ext, u.values()[i], i))
}

/// Term (II): `u_i · 2 C_{1,α} / (α L_W^α)`, the kernel mass beyond the
/// truncation radius acting on the center value.
pub fn term_ii(kernel: &Kernel, u_i: f64) -> f64 {
    let alpha = kernel.alpha();
    u_i * 2.0 * kernel.c1a() / (alpha * kernel.truncation_radius().powf(alpha))
}

/// Term (III) under an algebraic tail `u(y) ≈ u(∓L) L^β |y|^{-β}`:
///
/// right tail: `C u(-L) L^β / ((α+β) L_W^{α+β}) ₂F₁(β, α+β; α+β+1;  x/L_W)`
/// left tail:  `C u( L) L^β / ((α+β) L_W^{α+β}) ₂F₁(β, α+β; α+β+1; -x/L_W)`
///
/// (the integral over `y > L_W` sees arguments `x - y < -L`, hence the left
/// amplitude, and vice versa). Requires `L_W >= 2L` so the ₂F₁ argument
/// stays within `[-1/2, 1/2]`.
pub fn term_iii_algebraic(
    kernel: &Kernel,
    beta: f64,
    u_left: f64,
    u_right: f64,
    l: f64,
    x: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "term III: beta = {beta} must be positive"
        )));
    }
    let lw = kernel.truncation_radius();
    if lw < 2.0 * l * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "term III: L_W = {lw} < 2L = {} violates the tail contract",
            2.0 * l
        )));
    }
    let alpha = kernel.alpha();
    let ab = alpha + beta;
    let pre = kernel.c1a() * l.powf(beta) / (ab * lw.powf(ab));
    let right = u_left * hyp2f1(beta, ab, ab + 1.0, x / lw)?;
    let left = u_right * hyp2f1(beta, ab, ab + 1.0, -x / lw)?;
    Ok(pre * (right + left))
}

fn term_iii_for(kernel: &Kernel, u: &GridFn, ff: &FarField, x: f64) -> Result<f64> {
    match ff {
        FarField::Zero => Ok(0.0),
        FarField::AlgebraicTail { beta, .. } => term_iii_algebraic(
            kernel,
            *beta,
            u.left_value(),
            u.right_value(),
            u.grid().half_width(),
            x,
        ),
        FarField::DirichletTable { tail, .. } => match tail {
            TailRule::Zero => Ok(0.0),
            TailRule::Algebraic {
                beta,
                u_left,
                u_right,
            } => term_iii_algebraic(kernel, *beta, *u_left, *u_right, u.grid().half_width(), x),
        },
    }
}

/// Full operator (I) + (II) − (III) at every node, direct summation.
pub fn apply_full(kernel: &Kernel, u: &GridFn, ff: &FarField) -> Result<GridFn> {
    check_match(kernel, u)?;
    let ext = extended_samples(kernel, u, ff)?;
    let grid = u.grid();
    let vals = u.values();
    let out: Result<Vec<f64>> = (0..u.len())
        .into_par_iter()
        .map(|i| {
            let t1 = truncated_at(kernel, &ext, vals[i], i);
            let t2 = term_ii(kernel, vals[i]);
            let t3 = term_iii_for(kernel, u, ff, grid.node(i))?;
            Ok(t1 + t2 - t3)
        })
        .collect();
    GridFn::new(grid, out?)
}

/// Same as [`apply_full`], with term (I) evaluated by FFT convolution of the
/// `(2M+1)`-tap symmetric kernel against the extended samples.
pub fn apply_full_fast(kernel: &Kernel, u: &GridFn, ff: &FarField) -> Result<GridFn> {
    check_match(kernel, u)?;
    let ext = extended_samples(kernel, u, ff)?;
    let grid = u.grid();
    let (n, m) = (u.len(), kernel.m());

    // taps[t] = w_{|M - t|}, t = 0..2M, center tap zero.
    let k_len = 2 * m + 1;
    let n_fft = (ext.len() + k_len - 1).next_power_of_two();
    let mut fa: Vec<Complex<f64>> = ext.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fa.resize(n_fft, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = (0..k_len)
        .map(|t| {
            let j = (t as isize - m as isize).unsigned_abs();
            let w = if j == 0 { 0.0 } else { kernel.weight(j) };
            Complex::new(w, 0.0)
        })
        .collect();
    fb.resize(n_fft, Complex::new(0.0, 0.0));

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_fft);
    let ifft = planner.plan_fft_inverse(n_fft);
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (a, b) in fa.iter_mut().zip(fb.iter()) {
        *a *= b;
    }
    ifft.process(&mut fa);
    let scale = 1.0 / n_fft as f64;

    let vals = u.values();
    let sum_partial = kernel.sum_partial();
    let out: Result<Vec<f64>> = (0..n)
        .map(|i| {
            let conv = fa[i + 2 * m].re * scale;
            let t1 = vals[i] * sum_partial - conv;
            let t2 = term_ii(kernel, vals[i]);
            let t3 = term_iii_for(kernel, u, ff, grid.node(i))?;
            Ok(t1 + t2 - t3)
        })
        .collect();
    GridFn::new(grid, out?)
}

/// Linear interpolation of `u` at an off-grid point, zero outside `[-L, L]`.
fn interp_zero(u: &GridFn, x: f64) -> f64 {
    let grid = u.grid();
    let (l, h) = (grid.half_width(), grid.h());
    if x < -l || x > l {
        return 0.0;
    }
    let s = (x + l) / h;
    let i0 = (s.floor() as usize).min(u.len() - 1);
    let t = s - i0 as f64;
    if i0 + 1 >= u.len() {
        u.values()[i0]
    } else {
        (1.0 - t) * u.values()[i0] + t * u.values()[i0 + 1]
    }
}

/// Midpoint-sampled comparison scheme: central-difference singular zone of
/// width `ε` plus exactly integrated cell masses `∫ |y|^{-1-α} dy` against
/// midpoint samples of `u`. Sampled cells stop at the grid extent; beyond
/// it the samples are zero (the far field) and the remaining mass acts on
/// `u(x_i)` in closed form.
pub fn apply_cgm(alpha: f64, epsilon: f64, u: &GridFn) -> Result<GridFn> {
    let grid = u.grid();
    let h = grid.h();
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("cgm: alpha = {alpha} not in (0, 2)")));
    }
    if epsilon < 0.5 * h {
        return Err(Error::Domain(format!(
            "cgm: epsilon = {epsilon} below h/2 = {}",
            0.5 * h
        )));
    }
    let c = c_const(alpha)?;
    let l = grid.half_width();
    let n = u.len();
    let vals = u.values();

    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            let u_i = vals[i];
            // singular zone: -C ε^{2-α}/(2-α) u''(x), central difference,
            // neighbors outside the grid are zero.
            let up = if i + 1 < n { vals[i + 1] } else { 0.0 };
            let um = if i >= 1 { vals[i - 1] } else { 0.0 };
            let upp = (up - 2.0 * u_i + um) / (h * h);
            let mut acc = -c * epsilon.powf(2.0 - alpha) / (2.0 - alpha) * upp;

            for side in [1.0, -1.0] {
                let mut j = 0usize;
                loop {
                    let mid = epsilon + (j as f64 + 0.5) * h;
                    let p = x + side * mid;
                    if p.abs() > l {
                        break;
                    }
                    let y0 = epsilon + j as f64 * h;
                    let y1 = y0 + h;
                    let mass = (y0.powf(-alpha) - y1.powf(-alpha)) / alpha;
                    acc += c * (u_i - interp_zero(u, p)) * mass;
                    j += 1;
                }
                // cells beyond the grid: samples are zero, so the rest of
                // the kernel mass multiplies u_i exactly.
                let edge = epsilon + j as f64 * h;
                acc += c * u_i * edge.powf(-alpha) / alpha;
            }
            acc
        })
        .collect();
    GridFn::new(grid, out)
}

/// Least-squares estimate of the decay exponent β from `log|u|` against
/// `log|x|` over the outer quarter of each flank (`|x| >= 3L/4`).
pub fn estimate_beta(u: &GridFn) -> Result<f64> {
    let grid = u.grid();
    let cut = 0.75 * grid.half_width();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &v) in u.values().iter().enumerate() {
        let x = grid.node(i);
        if x.abs() >= cut && v.abs() > 1e-300 {
            xs.push(x.abs().ln());
            ys.push(v.abs().ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "beta fit: only {} usable nodes in the outer window",
            xs.len()
        )));
    }
    let nf = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "beta fit: degenerate abscissas".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(-(sxy / sxx))
}
