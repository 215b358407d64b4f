//! Randomized invariants over the parameter space.

use fraclap::io::{format_sci, parse_config, parse_table_csv};
use fraclap::kernel::{Kernel, KernelParams};
use fraclap::special::hyp2f1;
use fraclap::InterpOrder;
use proptest::prelude::*;

proptest! {
    /// Positivity, h-scaling and mass bookkeeping hold for arbitrary
    /// admissible kernel parameters.
    #[test]
    fn kernel_invariants(
        alpha in 0.05f64..1.95,
        h in 0.01f64..2.0,
        m_half in 2usize..60,
        quad in proptest::bool::ANY,
    ) {
        let (order, m) = if quad {
            (InterpOrder::Quad, 2 * m_half + 1)
        } else {
            (InterpOrder::Tent, 2 * m_half)
        };
        let k = Kernel::new(KernelParams::new(alpha, h, order, m).unwrap()).unwrap();
        for j in 1..=m {
            prop_assert!(k.weight(j) > 0.0, "w_{} <= 0", j);
        }
        prop_assert!(k.sum_partial() > 0.0);
        prop_assert!(k.sum_partial() <= k.total_sum() * (1.0 + 1e-12));
        prop_assert!(k.tail_sum_estimate() >= -1e-12 * k.total_sum());

        // h enters only through the h^{-alpha} prefactor
        let unit = Kernel::new(KernelParams::new(alpha, 1.0, order, m).unwrap()).unwrap();
        let r = (k.weight(m / 2 + 1) * h.powf(alpha) - unit.weight(m / 2 + 1)).abs()
            / unit.weight(m / 2 + 1);
        prop_assert!(r < 1e-12, "scaling gap {}", r);
    }

    /// 17-significant-digit scientific output survives a parse round trip
    /// bit-exactly.
    #[test]
    fn sci_format_roundtrip(x in proptest::num::f64::NORMAL) {
        let s = format_sci(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    /// Any generated key=value file parses back to its pairs.
    #[test]
    fn config_roundtrip(pairs in proptest::collection::vec(("[a-z][a-z-]{0,10}", "[ -~&&[^#=]]{0,12}"), 0..8)) {
        let text: String = pairs
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let parsed = parse_config(&text).unwrap();
        prop_assert_eq!(parsed.len(), pairs.len());
        for ((k, v), (pk, pv)) in pairs.iter().zip(&parsed) {
            prop_assert_eq!(k, pk);
            prop_assert_eq!(v.trim(), pv);
        }
    }

    /// Emitted tables parse back to the same samples.
    #[test]
    fn table_roundtrip(rows in proptest::collection::vec((proptest::num::f64::NORMAL, proptest::num::f64::NORMAL), 1..20)) {
        let text: String = std::iter::once("x,u\n".to_string())
            .chain(rows.iter().map(|(x, v)| format!("{},{}\n", format_sci(*x), format_sci(*v))))
            .collect();
        let parsed = parse_table_csv(&text).unwrap();
        prop_assert_eq!(parsed, rows);
    }

    /// ₂F₁ is symmetric in its first two parameters wherever both orders of
    /// evaluation converge.
    #[test]
    fn hyp2f1_symmetry(
        a in 0.05f64..2.5,
        b in 0.05f64..2.5,
        c in 0.5f64..4.0,
        z in -0.99f64..0.99,
    ) {
        let lhs = hyp2f1(a, b, c, z).unwrap();
        let rhs = hyp2f1(b, a, c, z).unwrap();
        let scale = lhs.abs().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }
}
