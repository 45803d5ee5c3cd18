use collapse_core::grw::{apply_localization, free_drift, gaussian_packet, hit_density, Grid, GridWavefunction};
use collapse_core::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::centered(0.0, 1.0 / 16.0, 1024).unwrap()
}

prop_compose! {
    fn arb_state()(
        packets in prop::collection::vec(
            (-6.0f64..6.0, 0.3f64..2.0, -1.5f64..1.5, 0.05f64..1.0, 0.0f64..std::f64::consts::TAU),
            1..4,
        )
    ) -> GridWavefunction {
        GridWavefunction::from_fn(grid(), 1.0, |x| {
            packets.iter().fold(Complex64::new(0.0, 0.0), |acc, &(c, s, k, w, ph)| {
                acc + gaussian_packet(x, c, s, k) * Complex64::new(w * ph.cos(), w * ph.sin())
            })
        })
        .unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hit_density_is_complete(psi in arb_state(), alpha in 0.2f64..4.0) {
        let p = hit_density(&psi, alpha).unwrap();
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        let total: f64 = p.iter().sum::<f64>() * grid().dx;
        prop_assert!((total - 1.0).abs() <= 1e-6, "total {}", total);
    }

    #[test]
    fn drift_and_hit_keep_normalization(psi in arb_state(), x_bar in -8.0f64..8.0, dt in 0.0f64..1.0) {
        let hit = apply_localization(&psi, x_bar, 1.0).unwrap();
        prop_assert!((hit.norm_sqr() - 1.0).abs() <= 1e-8);
        // packets this close to the centre cannot reach the grid edge within dt
        match free_drift(&hit, dt) {
            Ok(moved) => prop_assert!((moved.norm_sqr() - 1.0).abs() <= 1e-8),
            Err(e) => prop_assert!(false, "drift refused: {e}"),
        }
    }
}

#[test]
fn single_hit_suppresses_unselected_packet() {
    let alpha = 1.0;
    let (a, b) = (0.48f64.sqrt(), 0.52f64.sqrt());
    for d in [10.0, 14.0, 20.0] {
        let psi = GridWavefunction::from_fn(grid(), 1.0, |x| {
            gaussian_packet(x, -0.5 * d, 0.5, 0.0) * a + gaussian_packet(x, 0.5 * d, 0.5, 0.0) * b
        })
        .unwrap();
        assert!(alpha * d * d >= 100.0);
        let bound = (-alpha * d * d / 4.0).exp() * 10.0;
        let post = apply_localization(&psi, 0.5 * d, alpha).unwrap();
        assert!(post.weight_between(f64::NEG_INFINITY, 0.0) <= bound);
        let post = apply_localization(&psi, -0.5 * d, alpha).unwrap();
        assert!(post.weight_between(0.0, f64::INFINITY) <= bound);
    }
}
