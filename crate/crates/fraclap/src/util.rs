//! Small numeric helpers shared across modules.

/// Compensated (Kahan) accumulator. The weight sums telescope analytically;
/// keeping the float accumulation compensated preserves that identity to a
/// few ulps even for M ~ 1e5 terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Relative error with an absolute fallback when the reference is zero.
pub fn rel_err(got: f64, expect: f64) -> f64 {
    if expect == 0.0 {
        got.abs()
    } else {
        (got - expect).abs() / expect.abs()
    }
}

/// Max-norm of a slice.
pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..10_000_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-9)).abs() < 1e-12);
    }

    #[test]
    fn rel_err_zero_reference() {
        assert_eq!(rel_err(1e-3, 0.0), 1e-3);
        assert_eq!(rel_err(2.0, 4.0), 0.5);
    }
}
