//! The zeta shift is process wide, so it gets a test binary of its own.

use charsum::special_fn::{zeta, zeta_batch, ZetaPerturbation};
use charsum::Complex;

#[test]
fn perturbation_is_scoped() {
    let s = Complex::new(2.0, 0.0);
    let base = zeta(s).unwrap();
    let base_batch = zeta_batch(0.75, 100.0, 0.5, 3).unwrap();
    {
        let _g = ZetaPerturbation::new(1e-6);
        assert!((zeta(s).unwrap() - base - 1e-6).norm() < 1e-15);
        let shifted = zeta_batch(0.75, 100.0, 0.5, 3).unwrap();
        for (a, b) in shifted.iter().zip(&base_batch) {
            assert!((a - b - 1e-6).norm() < 1e-14);
        }
        let _inner = ZetaPerturbation::new(2e-6);
        assert!((zeta(s).unwrap() - base - 2e-6).norm() < 1e-15);
    }
    assert_eq!(zeta(s).unwrap(), base);
    assert_eq!(zeta_batch(0.75, 100.0, 0.5, 3).unwrap(), base_batch);
}
