use collapse_core::estimates::{hits_during_spread, localization_interval, spread_time, PhysicalParams};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    ((a - b) / b).abs() <= 1e-12
}

proptest! {
    #[test]
    fn interval_scales_inversely_with_rate(n in 1.0f64..1e25, lambda in 1e-20f64..1.0, k in 1e-3f64..1e3) {
        let base = localization_interval(n, lambda).unwrap();
        prop_assert!(close(localization_interval(n, k * lambda).unwrap(), base / k));
    }

    #[test]
    fn nucleon_count_scales_with_mass(mass in 1e-6f64..1e3, k in 1e-3f64..1e3) {
        let a = PhysicalParams::new(1e-16, 1e10, mass, 1e-5, 1e-1, None).unwrap();
        let b = PhysicalParams::new(1e-16, 1e10, k * mass, 1e-5, 1e-1, None).unwrap();
        prop_assert!(close(b.n_nucleons, k * a.n_nucleons));
        prop_assert!(close(spread_time(k * mass, 1e-5, 1e-1).unwrap(), k * spread_time(mass, 1e-5, 1e-1).unwrap()));
    }

    #[test]
    fn doubling_accumulates_fewer_hits(mass in 1e-6f64..1e3, sigma0 in 1e-8f64..1e-3, ratio in 2.001f64..1e6) {
        let p = PhysicalParams::new(1e-16, 1e10, mass, sigma0, sigma0 * ratio, None).unwrap();
        let doubling = p.with_target(2.0 * sigma0);
        prop_assert!(hits_during_spread(&doubling).unwrap() < hits_during_spread(&p).unwrap());
    }
}
