use collapse_core::semigroup::{pure_to_density, ClosedForm, PureState2, ToyParams};
use collapse_core::trajectories::{ensemble_mean, run_trajectory, EnsembleSummary};
use collapse_core::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn setup() -> (PureState2, ToyParams, Vec<f64>) {
    let psi = PureState2::split(0.48, I).unwrap();
    let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
    let grid = (0..=100).map(|i| i as f64 * 0.05).collect();
    (psi, p, grid)
}

fn max_z_score(s: &EnsembleSummary, psi: &PureState2, p: &ToyParams) -> f64 {
    let rho0 = pure_to_density(psi).unwrap();
    let cf = ClosedForm::new(p).unwrap();
    s.times
        .iter()
        .zip(s.mean_rho1.iter().zip(&s.stderr_rho1))
        .map(|(&t, (&m, &e))| {
            let d = (m - cf.at(&rho0, t).unwrap().rho1()).abs();
            if d <= 1e-12 {
                0.0
            } else {
                d / e
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn ensemble_reproduces_semigroup() {
    let (psi, p, grid) = setup();
    let s = ensemble_mean(&psi, &p, 5.0, &grid, 10_000, 2024).unwrap();
    assert!(max_z_score(&s, &psi, &p) <= 3.0);
    let late = s.stderr_rho1[50];
    assert!(late > 0.004 && late < 0.006, "stderr {late}");
}

#[test]
fn error_band_shrinks_like_inverse_root_n() {
    let (psi, p, grid) = setup();
    let small = ensemble_mean(&psi, &p, 5.0, &grid, 1_000, 5).unwrap();
    let large = ensemble_mean(&psi, &p, 5.0, &grid, 10_000, 5).unwrap();
    let mean = |v: &[f64]| v[1..].iter().sum::<f64>() / (v.len() - 1) as f64;
    let ratio = mean(&small.stderr_rho1) / mean(&large.stderr_rho1);
    let expected = 10f64.sqrt();
    assert!(ratio > expected / 1.5 && ratio < expected * 1.5, "ratio {ratio}");
}

#[test]
fn jump_counts_are_poissonian() {
    let (psi, p, grid) = setup();
    let n = 2_000;
    let s = ensemble_mean(&psi, &p, 5.0, &grid, n, 17).unwrap();
    let mean = 100.0 * 5.0;
    assert!((s.mean_jumps - mean).abs() <= 3.0 * (mean / n as f64).sqrt());
}

#[test]
fn norm_is_preserved_along_trajectories() {
    let (psi, p, grid) = setup();
    for seed in 0..20 {
        let rec = run_trajectory(&psi, &p, 5.0, &grid, seed).unwrap();
        for (_, rho) in rec.samples.iter() {
            // pure state: purity 1 ⇔ ‖ψ‖ = 1
            assert!((rho.purity() - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn ensemble_is_deterministic() {
    let (psi, p, grid) = setup();
    let a = ensemble_mean(&psi, &p, 5.0, &grid, 500, 99).unwrap();
    let b = ensemble_mean(&psi, &p, 5.0, &grid, 500, 99).unwrap();
    assert_eq!(a, b);
}
