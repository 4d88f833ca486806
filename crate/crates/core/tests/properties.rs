use proptest::prelude::*;

use charsum::char_arith::{chi_tilde, kronecker, squarefree_decompose, SpfSieve};
use charsum::exact_sum::{odd_count, periodic_row_sum, Naive, Periodic, SumAlgorithm};
use charsum::harness::{read_csv, emit_csv, error_scale, Exact, ScalingFit, SumRecord};
use charsum::special_fn::{gamma, sin_pi, zeta, zeta_batch};
use charsum::weights::SmoothWeight;
use charsum::Complex;

fn odd(max: i64) -> impl Strategy<Value = i64> {
    (0..max / 2).prop_map(|k| 2 * k + 1)
}

fn sieve() -> &'static SpfSieve {
    static SIEVE: std::sync::OnceLock<SpfSieve> = std::sync::OnceLock::new();
    SIEVE.get_or_init(|| SpfSieve::new(10_000_000))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

proptest! {
    #[test]
    fn reciprocity(m in odd(2002), n in odd(2002)) {
        prop_assert_eq!(kronecker(m, n).unwrap(), chi_tilde(n, m).unwrap());
    }

    #[test]
    fn reciprocity_large(m in odd(1 << 40), n in odd(1 << 40)) {
        prop_assert_eq!(kronecker(m, n).unwrap(), chi_tilde(n, m).unwrap());
    }

    #[test]
    fn periodicity(m in -1_000_000_000i64..1_000_000_000, n in odd(1 << 30)) {
        prop_assert_eq!(kronecker(m, n).unwrap(), kronecker(m + 2 * n, n).unwrap());
    }

    #[test]
    fn multiplicativity(m1 in -3_000_000i64..3_000_000, m2 in -3_000_000i64..3_000_000, n in odd(1 << 40)) {
        let lhs = kronecker(m1 * m2, n).unwrap();
        prop_assert_eq!(lhs, kronecker(m1, n).unwrap() * kronecker(m2, n).unwrap());
    }

    #[test]
    fn squarefree_parts(m in 1i64..10_000_000) {
        let d = squarefree_decompose(m).unwrap();
        prop_assert_eq!(d.reconstruct(), m as u64);
        for p in 2..=((d.m0 as f64).sqrt() as u64 + 1) {
            prop_assert!(d.m0 % (p * p) != 0, "{} not squarefree", d.m0);
        }
        prop_assert_eq!(sieve().decompose(m).unwrap(), d);
    }

    #[test]
    fn gamma_recurrence(sigma in -3.0f64..3.0, t in 0.0f64..50.0) {
        let s = Complex::new(sigma, t);
        prop_assume!(t > 0.05 || (sigma - sigma.round()).abs() > 0.05);
        let g = gamma(s).unwrap();
        let rel = (gamma(s + 1.0).unwrap() - s * g).norm() / (s * g).norm();
        prop_assert!(rel <= 1e-11, "s = {s}: {rel:e}");
    }

    #[test]
    fn gamma_reflection(sigma in -3.0f64..3.0, t in 0.0f64..50.0) {
        let s = Complex::new(sigma, t);
        prop_assume!(t > 0.05 || (sigma - sigma.round()).abs() > 0.05);
        let v = gamma(s).unwrap() * gamma(Complex::new(1.0, 0.0) - s).unwrap() * sin_pi(s) / std::f64::consts::PI;
        prop_assert!((v - 1.0).norm() <= 1e-10, "s = {s}: {v}");
    }

    #[test]
    fn zeta_conjugate_symmetry(sigma in -2.0f64..3.0, t in 0.5f64..300.0) {
        let a = zeta(Complex::new(sigma, t)).unwrap();
        let b = zeta(Complex::new(sigma, -t)).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn zeta_batch_matches_pointwise(sigma in -0.5f64..1.5, t0 in 0.0f64..3000.0, dt in 0.01f64..2.0) {
        let batch = zeta_batch(sigma, t0, dt, 20).unwrap();
        for (k, z) in batch.iter().enumerate() {
            let one = zeta(Complex::new(sigma, t0 + dt * k as f64)).unwrap();
            prop_assert!((z - one).norm() <= 1e-10 * one.norm().max(1.0), "k = {k}: {z} vs {one}");
        }
    }

    #[test]
    fn naive_equals_periodic(x in 1.0f64..400.0, y in 1.0f64..400.0) {
        prop_assert_eq!(Naive.double_char_sum(x, y).unwrap(), Periodic.double_char_sum(x, y).unwrap());
    }

    #[test]
    fn square_rows_are_principal(k in 0u64..40, x in 1.0f64..5000.0) {
        let n = (2 * k + 1) * (2 * k + 1);
        let coprime = (1..=x.floor() as u64).step_by(2).filter(|&m| gcd(m, n) == 1).count() as i64;
        prop_assert_eq!(periodic_row_sum(x, n), coprime);
        prop_assert!(coprime as u64 <= odd_count(x));
    }

    #[test]
    fn plateau_weights(u in 4.0f64..2000.0, x in -0.5f64..1.5) {
        let w = SmoothWeight::plateau(u).unwrap();
        let v = w.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        if x >= 1.0 / u + 1e-9 && x <= 1.0 - 1.0 / u - 1e-9 {
            prop_assert_eq!(v, 1.0);
        }
        if x <= 0.0 || x >= 1.0 {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn record_consistency(x in 10.0f64..1e6, y in 10.0f64..1e6, exact in -1_000_000_000i64..1_000_000_000, main in -1e9f64..1e9) {
        let r = SumRecord::new(x, y, Exact::Int(exact), main);
        prop_assert_eq!(r.abs_err, (exact as f64 - main).abs());
        prop_assert!((r.norm_err * error_scale(x, y) - r.abs_err).abs() <= 1e-12 * r.abs_err.max(1.0));
        prop_assert_eq!(r.alpha, y / x);
    }

    #[test]
    fn least_squares_line(slope in -3.0f64..3.0, icpt in -10.0f64..10.0, n in 2usize..20) {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64 * 0.7, slope * i as f64 * 0.7 + icpt)).collect();
        let fit = ScalingFit::fit(pts, vec![]).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - icpt).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csv_round_trip_is_bit_exact(rows in prop::collection::vec(
        (1e-3f64..1e9, 1e-3f64..1e9, any::<i64>(), prop::option::of(any::<f64>()), any::<f64>()),
        0..20,
    )) {
        let records: Vec<SumRecord> = rows
            .iter()
            .map(|&(x, y, e, real, main)| {
                let exact = match real {
                    Some(v) if v.is_finite() => Exact::Real(v),
                    _ => Exact::Int(e),
                };
                SumRecord::new(x, y, exact, if main.is_finite() { main } else { 0.0 })
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_csv(&records, &path).unwrap();
        let back = read_csv(&path).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
            prop_assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            prop_assert_eq!(a.main.to_bits(), b.main.to_bits());
            prop_assert_eq!(a.abs_err.to_bits(), b.abs_err.to_bits());
            prop_assert_eq!(a.norm_err.to_bits(), b.norm_err.to_bits());
            match (a.exact, b.exact) {
                (Exact::Int(p), Exact::Int(q)) => prop_assert_eq!(p, q),
                (Exact::Real(p), Exact::Real(q)) => prop_assert_eq!(p.to_bits(), q.to_bits()),
                other => prop_assert!(false, "exact kind changed: {other:?}"),
            }
        }
    }
}
