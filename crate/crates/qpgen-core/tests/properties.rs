use num_complex::Complex;
use proptest::prelude::*;

use qpgen_core::circuits::{cos_sin_coefficients, TransmonParams};
use qpgen_core::floquet::{build_floquet, diagonalize};
use qpgen_core::rates::{steady_state_xqp, Lifetime, RateFlags, RateRow, RateTable};
use qpgen_core::scenarios::{Numerics, TransmonModel};
use qpgen_core::specfn::{bessel_j_symmetric, s_ph_analytic, s_ph_reduced, Gap, StructureFactorKind};

use StructureFactorKind::{Minus, Plus};

fn small_model(ej: f64, ec: f64, ng: f64) -> TransmonModel {
    let n = Numerics { n_c: 8, d: 6, m_max: 8, k_max: 8, guard: 3, max_dim: 2000 };
    TransmonModel::new(TransmonParams::new(ej, ec, ng).unwrap(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn no_pair_breaking_below_threshold(f in -50.0f64..90.0, delta in 40.0f64..50.0) {
        let g = Gap::new(delta).unwrap();
        let f = f * delta / 45.0;
        prop_assert_eq!(s_ph_analytic(Plus, f, g), 0.0);
        prop_assert_eq!(s_ph_analytic(Minus, f, g), 0.0);
    }

    #[test]
    fn plus_exceeds_minus_above_threshold(z in 2.0001f64..50.0) {
        let p = s_ph_reduced(Plus, z);
        let m = s_ph_reduced(Minus, z);
        prop_assert!(m >= 0.0);
        prop_assert!(p > m);
        prop_assert!(s_ph_reduced(Plus, z * 1.01) > p);
    }

    #[test]
    fn jacobi_anger_unit_norm(x in 0.0f64..8.0) {
        let j = bessel_j_symmetric(40, x);
        let s: f64 = j.iter().map(|v| v * v).sum();
        prop_assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn drive_coefficients_resum(a in -3.2f64..3.2, b in 0.0f64..5.0, theta in 0.0f64..6.3) {
        let (c, s) = cos_sin_coefficients(a, b, 40);
        let at = |v: &[Complex<f64>]| -> f64 {
            v.iter().enumerate().map(|(i, z)| (z * Complex::from_polar(1.0, (i as f64 - 40.0) * theta)).re).sum()
        };
        prop_assert!((at(&c) - (a + b * theta.sin()).cos()).abs() < 1e-12);
        prop_assert!((at(&s) - (a + b * theta.sin()).sin()).abs() < 1e-12);
    }

    #[test]
    fn floquet_matrix_is_hermitian(ej in 1.0f64..10.0, ec in 0.02f64..0.3, ng in 0.0f64..0.99, phi in 0.0f64..0.5, w in 5.0f64..60.0) {
        let m = small_model(ej, ec, ng);
        let p = m.problem_even(phi, w).unwrap();
        prop_assert!(p.series.closure_defect() < 1e-12);
        let h = build_floquet(&p).unwrap();
        let scale = h.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        for ((i, j), z) in h.indexed_iter() {
            prop_assert!((z - h[[j, i]].conj()).norm() <= 1e-14 * scale);
        }
    }

    #[test]
    fn interior_replicas_are_translates(ej in 2.0f64..6.0, phi in 0.0f64..0.05, w in 20.0f64..60.0) {
        let m = small_model(ej, 0.056, 0.0);
        let s = diagonalize(&m.problem_even(phi, w).unwrap()).unwrap();
        for j in 0..s.dim() {
            if s.centroid(j).abs() < 0.5 {
                let (k, o) = s.replica(j, 1);
                prop_assert!(o > 0.999);
                prop_assert!((s.energies[k] - s.energies[j] - w).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn steady_state_round_trip(g in 0.0f64..1e9, ncp in 1e3f64..1e9, cr in 1e3f64..1e9) {
        let x = steady_state_xqp(g, ncp, cr).unwrap();
        prop_assert!(x >= 0.0);
        prop_assert!((x * x * ncp * cr - g).abs() <= 1e-12 * g.max(1e-300));
    }

    #[test]
    fn table_totals_are_consistent(rows in proptest::collection::vec((0usize..3, 0usize..4, 1i64..5, 1usize..3, 0.0f64..1e6), 0..40)) {
        let mut t = RateTable::default();
        t.extend(RateTable {
            rows: rows
                .iter()
                .map(|&(alpha, beta, n, junction, gamma)| RateRow { alpha, beta, n, junction, omega: 100.0, cos_elem2: 0.0, sin_elem2: 0.0, gamma, flags: RateFlags::default() })
                .collect(),
        });
        for a in 0..3 {
            let total = t.gamma_a(a);
            let by_beta: f64 = (0..4).map(|b| t.gamma_ab(a, b)).sum();
            let by_junction = t.gamma_a_junction(a, 1) + t.gamma_a_junction(a, 2);
            let by_n: f64 = (0..4).flat_map(|b| (1..5).map(move |n| (b, n))).map(|(b, n)| t.gamma_abn(a, b, n)).sum();
            let by_final: f64 = t.by_final(a).values().sum();
            for x in [by_beta, by_junction, by_n, by_final] {
                prop_assert!((x - total).abs() <= 1e-9 * total.max(1.0));
            }
            match t.lifetime(a) {
                Lifetime::Finite(s) => prop_assert!((s * total - 1.0).abs() < 1e-12),
                Lifetime::Infinite => prop_assert_eq!(total, 0.0),
            }
        }
        prop_assert!(t.rows.windows(2).all(|w| (w[0].alpha, w[0].beta, w[0].n, w[0].junction) <= (w[1].alpha, w[1].beta, w[1].n, w[1].junction)));
    }
}
