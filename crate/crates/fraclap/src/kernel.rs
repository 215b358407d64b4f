//! Discrete convolution weights for the fractional Laplacian.
//!
//! The operator is approximated by `Σ_j (u_i - u_{i-j}) w_j` with symmetric
//! positive weights. Inside `|y| < h` the singular integral collapses to a
//! rescaled second difference, which contributes `C_{1,α} h^{-α}/(2-α)` to
//! `w_1`. In the tail the kernel `ν^α(y) = C_{1,α}|y|^{-1-α}` is integrated
//! exactly against piecewise linear (tent, `w^T`) or piecewise quadratic
//! (`w^Q`) interpolants, which reduces every weight to combinations of the
//! primitives `F'' = G''' = ν^α` at integer arguments times `h^{-α}`.
//!
//! At the truncation index `M` (`L_W = M h`) the interpolant support is
//! clipped to `[-L_W, L_W]`, giving a distinct one-sided boundary weight.

use crate::special::gamma;
use crate::util::Kahan;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Interpolation family behind the semi-exact tail quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpOrder {
    /// Piecewise linear (degree 1), accuracy O(h^{2-α}).
    Tent,
    /// Piecewise quadratic (degree 2), accuracy O(h^{3-α}).
    Quad,
}

impl InterpOrder {
    pub fn label(self) -> &'static str {
        match self {
            InterpOrder::Tent => "tent",
            InterpOrder::Quad => "quad",
        }
    }
}

/// Parameters fixing a weight family: order α, spacing h, interpolation
/// degree and truncation index M.
#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    pub alpha: f64,
    pub h: f64,
    pub order: InterpOrder,
    pub m: usize,
}

impl KernelParams {
    pub fn new(alpha: f64, h: f64, order: InterpOrder, m: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!("kernel: alpha = {alpha} not in (0, 2)")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("kernel: h = {h} must be positive")));
        }
        match order {
            InterpOrder::Tent => {
                if m < 2 {
                    return Err(Error::Domain(format!("kernel: tent needs M >= 2, got {m}")));
                }
            }
            InterpOrder::Quad => {
                // Quadratic panels are [h,3h], [3h,5h], ...; truncation must
                // land on a panel edge or the one-sided integral double counts.
                if m < 3 || m % 2 == 0 {
                    return Err(Error::Domain(format!(
                        "kernel: quad needs odd M >= 3, got {m}"
                    )));
                }
            }
        }
        Ok(Self { alpha, h, order, m })
    }

    /// Truncation radius `L_W = M h`.
    pub fn truncation_radius(&self) -> f64 {
        self.m as f64 * self.h
    }
}

/// The constant `C_{1,α} = α 2^{α-1} Γ((α+1)/2) / (√π Γ((2-α)/2))`.
pub fn c_const(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("c_const: alpha = {alpha} not in (0, 2)")));
    }
    Ok(alpha * 2f64.powf(alpha - 1.0) * gamma((alpha + 1.0) / 2.0)?
        / (PI.sqrt() * gamma((2.0 - alpha) / 2.0)?))
}

// Primitives of ν^α with F'' = G''' = ν^α. For α = 1 the power-law branch
// degenerates and logarithms appear; second differences of the log branch
// kill its h-dependence, so integer arguments remain valid there too (the
// oracle suite checks this rather than taking it on faith).

fn f_at(t: f64, alpha: f64, c: f64) -> f64 {
    if alpha == 1.0 {
        -c * t.ln()
    } else {
        c / ((alpha - 1.0) * alpha) * t.powf(1.0 - alpha)
    }
}

fn df_at(t: f64, alpha: f64, c: f64) -> f64 {
    -c / alpha * t.powf(-alpha)
}

fn g_at(t: f64, alpha: f64, c: f64) -> f64 {
    if alpha == 1.0 {
        c * (t - t * t.ln())
    } else {
        c / ((2.0 - alpha) * (alpha - 1.0) * alpha) * t.powf(2.0 - alpha)
    }
}

fn dg_at(t: f64, alpha: f64, c: f64) -> f64 {
    // G' coincides with F for this normalization.
    f_at(t, alpha, c)
}

fn d2g_at(t: f64, alpha: f64, c: f64) -> f64 {
    df_at(t, alpha, c)
}

fn check_t(t: f64, what: &str) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("{what}: t = {t} must be positive")));
    }
    Ok(())
}

/// Primitive `F(t)` with `F'' = ν^α`.
pub fn primitive_f(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, "primitive_f")?;
    Ok(f_at(t, alpha, c_const(alpha)?))
}

/// `F'(t) = -C_{1,α} t^{-α} / α`.
pub fn primitive_f_deriv(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, "primitive_f_deriv")?;
    Ok(df_at(t, alpha, c_const(alpha)?))
}

/// Primitive `G(t)` with `G''' = ν^α`.
pub fn primitive_g(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, "primitive_g")?;
    Ok(g_at(t, alpha, c_const(alpha)?))
}

/// `G'(t)`.
pub fn primitive_g_deriv(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, "primitive_g_deriv")?;
    Ok(dg_at(t, alpha, c_const(alpha)?))
}

/// `G''(t)`.
pub fn primitive_g_deriv2(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, "primitive_g_deriv2")?;
    Ok(d2g_at(t, alpha, c_const(alpha)?))
}

/// Immutable weight table for one `(α, h, order, M)`. Only `j >= 1` is
/// stored; applications use the symmetry `w_{-j} = w_j`, and `w_0` never
/// enters the convolution.
#[derive(Debug, Clone)]
pub struct Kernel {
    params: KernelParams,
    /// Interior weights `w_1 .. w_{M-1}`.
    weights: Vec<f64>,
    /// One-sided weight at `j = ±M` (interpolant clipped at `L_W`).
    w_boundary: f64,
    /// Closed-form `Σ_{j≠0} w_j = 2^α Γ((α+1)/2) / (√π Γ(2-α/2)) h^{-α}`.
    total_sum: f64,
    /// `2 (Σ_{j=1}^{M-1} w_j + w_boundary)`, compensated summation.
    sum_partial: f64,
    c1a: f64,
}

impl Kernel {
    pub fn new(params: KernelParams) -> Result<Self> {
        let KernelParams { alpha, h, order, m } = params;
        let c = c_const(alpha)?;
        let hma = h.powf(-alpha);
        let singular = c / (2.0 - alpha);

        let mut weights = vec![0.0; m - 1];
        let w_boundary;

        match order {
            InterpOrder::Tent => {
                // Memoized F(j) and first differences D(j) = F(j+1) - F(j):
                // interior weights are D(j) - D(j-1), so shared evaluations
                // make the float accumulation telescope like the algebra.
                let fv: Vec<f64> = (0..=m).map(|j| f_at((j + 1) as f64, alpha, c)).collect();
                let d: Vec<f64> = (0..m).map(|j| fv[j + 1] - fv[j]).collect();
                // fv[j-1] = F(j), d[j-1] = F(j+1) - F(j)
                weights[0] = hma * (singular - df_at(1.0, alpha, c) + d[0]);
                for j in 2..m {
                    weights[j - 1] = hma * (d[j - 1] - d[j - 2]);
                }
                w_boundary = hma * (df_at(m as f64, alpha, c) - d[m - 2]);
            }
            InterpOrder::Quad => {
                // G and G' are only ever needed at odd integers (M is odd).
                let n_odd = m / 2 + 1; // 1, 3, ..., M
                let gv: Vec<f64> =
                    (0..n_odd).map(|k| g_at((2 * k + 1) as f64, alpha, c)).collect();
                let gp: Vec<f64> =
                    (0..n_odd).map(|k| dg_at((2 * k + 1) as f64, alpha, c)).collect();
                let at = |t: usize| (t - 1) / 2; // odd t -> index
                weights[0] = hma
                    * (singular - d2g_at(1.0, alpha, c) - 0.5 * (gp[at(3)] + 3.0 * gp[at(1)])
                        + gv[at(3)]
                        - gv[at(1)]);
                for j in 2..m {
                    weights[j - 1] = if j % 2 == 0 {
                        hma * 2.0 * (gp[at(j + 1)] + gp[at(j - 1)] - gv[at(j + 1)] + gv[at(j - 1)])
                    } else {
                        hma * (-0.5 * (gp[at(j + 2)] + 6.0 * gp[at(j)] + gp[at(j - 2)])
                            + gv[at(j + 2)]
                            - gv[at(j - 2)])
                    };
                }
                w_boundary = hma
                    * (d2g_at(m as f64, alpha, c) - 0.5 * (gp[at(m - 2)] + 3.0 * gp[at(m)])
                        + gv[at(m)]
                        - gv[at(m - 2)]);
            }
        }

        let total_sum = 2f64.powf(alpha) * gamma((alpha + 1.0) / 2.0)?
            / (PI.sqrt() * gamma(2.0 - alpha / 2.0)?)
            * hma;

        let mut acc = Kahan::new();
        for &w in &weights {
            acc.add(w);
        }
        acc.add(w_boundary);
        let sum_partial = 2.0 * acc.value();

        Ok(Self {
            params,
            weights,
            w_boundary,
            total_sum,
            sum_partial,
            c1a: c,
        })
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn h(&self) -> f64 {
        self.params.h
    }

    pub fn order(&self) -> InterpOrder {
        self.params.order
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    /// `L_W = M h`.
    pub fn truncation_radius(&self) -> f64 {
        self.params.truncation_radius()
    }

    pub fn c1a(&self) -> f64 {
        self.c1a
    }

    /// Weight at offset `|j| = j`, `1 <= j <= M`; `j = M` returns the
    /// one-sided boundary weight.
    pub fn weight(&self, j: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.params.m);
        if j == self.params.m {
            self.w_boundary
        } else {
            self.weights[j - 1]
        }
    }

    /// Interior weights `w_1 .. w_{M-1}`.
    pub fn interior_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn w_boundary(&self) -> f64 {
        self.w_boundary
    }

    /// Closed form of the full sum `Σ_{j≠0} w_j`.
    pub fn total_sum(&self) -> f64 {
        self.total_sum
    }

    /// `2 (Σ_{j=1}^{M-1} w_j + w_boundary)`: the weight mass of the
    /// truncated operator.
    pub fn sum_partial(&self) -> f64 {
        self.sum_partial
    }

    /// Weight mass lost to truncation, `total_sum - sum_partial`.
    pub fn tail_sum_estimate(&self) -> f64 {
        self.total_sum - self.sum_partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rel_err;

    #[test]
    fn c_const_spot_values() {
        // 30-digit references; C_{1,1} = 1/π.
        assert!(rel_err(c_const(1.0).unwrap(), 0.3183098861837907) < 1e-14);
        assert!(rel_err(c_const(0.5).unwrap(), 0.19947114020071634) < 1e-13);
        assert!(rel_err(c_const(0.3).unwrap(), 0.12969318904286145) < 1e-13);
        assert!(rel_err(c_const(1.5).unwrap(), 0.2992067103010745) < 1e-13);
        assert!(c_const(0.0).is_err());
        assert!(c_const(2.0).is_err());
    }

    #[test]
    fn c_const_pole_cancellation_near_two() {
        // Γ((2-α)/2) pole makes C vanish like (2-α); the ratio stays bounded.
        let alpha = 1.999;
        let v = c_const(alpha).unwrap() / (2.0 - alpha);
        assert!(v.is_finite() && v > 0.5 && v < 2.0, "got {v}");
    }

    #[test]
    fn primitive_f_is_antiderivative_squared() {
        // (F(t+ε) - 2F(t) + F(t-ε))/ε² -> ν(t) = C t^{-1-α}.
        let (t, alpha, eps) = (2.0, 0.5, 1e-4);
        let c = c_const(alpha).unwrap();
        let second = (primitive_f(t + eps, alpha).unwrap() - 2.0 * primitive_f(t, alpha).unwrap()
            + primitive_f(t - eps, alpha).unwrap())
            / (eps * eps);
        let nu = c * t.powf(-1.0 - alpha);
        assert!(rel_err(second, nu) < 1e-5);
    }

    #[test]
    fn primitive_f_spot_values() {
        assert_eq!(primitive_f(1.0, 1.0).unwrap(), 0.0); // -C ln 1
        // F(2, 0.5) = C/((α-1)α) 2^{1-α}, 30-digit reference.
        assert!(rel_err(primitive_f(2.0, 0.5).unwrap(), -1.1283791670955126) < 1e-13);
        assert!(primitive_f(0.0, 0.5).is_err());
        assert!(primitive_f(-1.0, 0.5).is_err());
    }

    #[test]
    fn primitive_g_third_derivative_is_nu() {
        // Difference G'' once more: (G''(t+ε) - G''(t-ε))/(2ε) -> ν'(t)? No:
        // G''' = ν, so a centered difference of G'' recovers ν itself.
        let (t, alpha, eps) = (3.0, 1.2, 1e-5);
        let c = c_const(alpha).unwrap();
        let third = (primitive_g_deriv2(t + eps, alpha).unwrap()
            - primitive_g_deriv2(t - eps, alpha).unwrap())
            / (2.0 * eps);
        let nu = c * t.powf(-1.0 - alpha);
        assert!(rel_err(third, nu) < 1e-5);
    }

    #[test]
    fn primitive_g_spot_values() {
        // G(1, 1) = C_{1,1} (1 - ln 1) = 1/π.
        assert!(rel_err(primitive_g(1.0, 1.0).unwrap(), 0.3183098861837907) < 1e-14);
        // dG(1, 0.5) = C/((α-1)α) = -4C√... frozen 30-digit reference.
        assert!(rel_err(primitive_g_deriv(1.0, 0.5).unwrap(), -0.7978845608028654) < 1e-13);
        // dG against centered differencing of G.
        let (t, alpha, eps) = (1.0, 0.5, 1e-6);
        let num = (primitive_g(t + eps, alpha).unwrap() - primitive_g(t - eps, alpha).unwrap())
            / (2.0 * eps);
        assert!(rel_err(primitive_g_deriv(t, alpha).unwrap(), num) < 1e-8);
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(0.5, 0.1, InterpOrder::Tent, 2).is_ok());
        assert!(KernelParams::new(0.5, 0.1, InterpOrder::Tent, 1).is_err());
        assert!(KernelParams::new(0.5, 0.1, InterpOrder::Quad, 4).is_err());
        assert!(KernelParams::new(0.5, 0.1, InterpOrder::Quad, 5).is_ok());
        assert!(KernelParams::new(2.0, 0.1, InterpOrder::Tent, 10).is_err());
        assert!(KernelParams::new(0.5, 0.0, InterpOrder::Tent, 10).is_err());
    }

    #[test]
    fn total_sum_closed_form_alpha_one() {
        // 2^1 Γ(1)/(√π Γ(1.5)) = 4/π.
        let k = Kernel::new(KernelParams::new(1.0, 1.0, InterpOrder::Tent, 100).unwrap()).unwrap();
        assert!(rel_err(k.total_sum(), 4.0 / std::f64::consts::PI) < 1e-14);
    }

    #[test]
    fn total_sum_matches_primitive_route() {
        // 2 h^{-α} [C/(2-α) - F'(1)] (tent) and with G''(1) (quad) must agree
        // with the Γ closed form.
        for &alpha in &[0.3, 0.5, 1.0, 1.5, 1.9] {
            for &h in &[1.0f64, 0.1] {
                let c = c_const(alpha).unwrap();
                let via_f =
                    2.0 * h.powf(-alpha) * (c / (2.0 - alpha) - df_at(1.0, alpha, c));
                let k = Kernel::new(KernelParams::new(alpha, h, InterpOrder::Tent, 10).unwrap())
                    .unwrap();
                assert!(rel_err(via_f, k.total_sum()) < 1e-13);
            }
        }
    }

    #[test]
    fn weights_positive_and_decaying() {
        for &order in &[InterpOrder::Tent, InterpOrder::Quad] {
            for &alpha in &[0.1, 0.5, 1.0, 1.5, 1.9] {
                let m = 101;
                let k =
                    Kernel::new(KernelParams::new(alpha, 0.1, order, m).unwrap()).unwrap();
                let c = k.c1a();
                for j in 1..=m {
                    let w = k.weight(j);
                    assert!(w > 0.0, "w_{j} <= 0 at alpha={alpha} {order:?}");
                    if j >= 2 && j < m {
                        // w_j h^α j^{1+α} approaches C_{1,α} for large j; at
                        // small j the quadratic odd-index weights sit lower,
                        // so the boundedness band is wide.
                        let r = w * 0.1f64.powf(alpha) * (j as f64).powf(1.0 + alpha);
                        assert!(
                            r > 0.05 * c && r < 20.0 * c,
                            "decay constant off at j={j}: {r} vs C={c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn scaling_in_h() {
        for &order in &[InterpOrder::Tent, InterpOrder::Quad] {
            let alpha = 0.7;
            let a = Kernel::new(KernelParams::new(alpha, 0.02, order, 11).unwrap()).unwrap();
            let b = Kernel::new(KernelParams::new(alpha, 1.0, order, 11).unwrap()).unwrap();
            for j in 1..=11 {
                let lhs = a.weight(j) * 0.02f64.powf(alpha);
                assert!(rel_err(lhs, b.weight(j)) < 1e-12, "h-scaling broke at j={j}");
            }
        }
    }

    #[test]
    fn alpha_one_branch_continuity() {
        for &order in &[InterpOrder::Tent, InterpOrder::Quad] {
            let m = 51;
            let k1 = Kernel::new(KernelParams::new(1.0, 0.1, order, m).unwrap()).unwrap();
            for &da in &[1e-6, -1e-6] {
                let k = Kernel::new(KernelParams::new(1.0 + da, 0.1, order, m).unwrap()).unwrap();
                for j in 1..=m {
                    assert!(
                        rel_err(k.weight(j), k1.weight(j)) < 1e-4,
                        "log branch discontinuous at j={j}, da={da}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_near_two_recovers_three_point_stencil() {
        let h = 0.1;
        let k = Kernel::new(KernelParams::new(1.999, h, InterpOrder::Quad, 101).unwrap()).unwrap();
        let w1h2 = k.weight(1) * h * h;
        assert!((0.99..=1.01).contains(&w1h2), "w_1 h^2 = {w1h2}");
        let rest: f64 = (2..=101).map(|j| k.weight(j)).sum::<f64>() * h * h;
        assert!(rest <= 0.01, "Σ_{{j>=2}} w_j h^2 = {rest}");
    }

    #[test]
    fn tent_partial_sum_telescopes() {
        // Interior second differences telescope to F(M)-F(M-1)-F(2)+F(1);
        // with w_1 and the boundary weight the whole partial sum collapses to
        // 2 h^{-α}[C/(2-α) - F'(1) + F'(M)].
        for &alpha in &[0.3, 1.0, 1.7] {
            let (h, m) = (0.5, 1000);
            let k = Kernel::new(KernelParams::new(alpha, h, InterpOrder::Tent, m).unwrap())
                .unwrap();
            let c = k.c1a();
            let closed = 2.0
                * h.powf(-alpha)
                * (c / (2.0 - alpha) - df_at(1.0, alpha, c) + df_at(m as f64, alpha, c));
            assert!(
                rel_err(k.sum_partial(), closed) < 1e-12,
                "telescoping off at alpha={alpha}: {} vs {closed}",
                k.sum_partial()
            );
        }
    }

    #[test]
    fn tail_estimate_nonnegative_and_bounded() {
        for &order in &[InterpOrder::Tent, InterpOrder::Quad] {
            for &alpha in &[0.5, 1.0, 1.5] {
                let m = if order == InterpOrder::Quad { 1001 } else { 1000 };
                let k = Kernel::new(KernelParams::new(alpha, 1.0, order, m).unwrap()).unwrap();
                let tail = k.tail_sum_estimate();
                assert!(tail >= 0.0);
                // j^{-1-α} tail comparison bound.
                assert!(tail / k.total_sum() <= 10.0 * (m as f64).powf(-alpha));
            }
        }
    }

    #[test]
    fn tent_tail_equals_analytic_tail_integral() {
        // The one-sided tent pieces tile [L_W, ∞), so the truncated mass is
        // exactly 2C/(α L_W^α).
        let (alpha, h, m) = (0.5, 1.0, 100_000);
        let k = Kernel::new(KernelParams::new(alpha, h, InterpOrder::Tent, m).unwrap()).unwrap();
        let lw = k.truncation_radius();
        let analytic = 2.0 * k.c1a() / (alpha * lw.powf(alpha));
        assert!(rel_err(k.tail_sum_estimate(), analytic) < 1e-9);
        assert!(k.tail_sum_estimate() / k.total_sum() <= 10.0 * (m as f64).powf(-alpha));
    }
}
