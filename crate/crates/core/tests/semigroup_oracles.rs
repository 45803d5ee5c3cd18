use collapse_core::semigroup::{
    closed_form_solution, detect_plateau, evolve_numeric, pure_to_density, ClosedForm, DensityMatrix2, PureState2,
    ToyParams,
};
use collapse_core::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn reference() -> DensityMatrix2 {
    pure_to_density(&PureState2::split(0.48, I).unwrap()).unwrap()
}

/// Independent oracle: classical RK4 on (ρ₁, ρ₃) written directly from the
/// matrix generator, no shared code with the library.
fn rk4_oracle(rho1: f64, rho3: Complex64, omega: f64, lambda: f64, t: f64, dt: f64) -> (f64, Complex64) {
    let f = |r1: f64, r3: Complex64| -> (f64, Complex64) {
        // −i[ωσ_x, ρ] + λ(diag(ρ) − ρ)
        let comm01 = Complex64::new(1.0 - 2.0 * r1, 0.0) * omega;
        let comm00 = (r3.conj() - r3) * omega;
        ((-I * comm00).re, -I * comm01 - r3 * lambda)
    };
    let n = (t / dt).round() as usize;
    let h = t / n as f64;
    let (mut a, mut b) = (rho1, rho3);
    for _ in 0..n {
        let k1 = f(a, b);
        let k2 = f(a + 0.5 * h * k1.0, b + k1.1 * (0.5 * h));
        let k3 = f(a + 0.5 * h * k2.0, b + k2.1 * (0.5 * h));
        let k4 = f(a + h * k3.0, b + k3.1 * h);
        a += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        b += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0);
    }
    (a, b)
}

#[test]
fn closed_form_matches_rk4_oracle_at_one_second() {
    let r = reference();
    let (o1, o3) = rk4_oracle(r.rho1(), r.rho3(), 1.0, 100.0, 1.0, 1e-5);
    // frozen oracle value
    assert!((o1 - 0.490_384_564_028_478_7).abs() < 1e-12);
    let cf = closed_form_solution(&r, &ToyParams::new(1.0, 100.0).unwrap(), 1.0).unwrap();
    assert!((cf.rho1() - o1).abs() < 1e-12);
    assert!((cf.rho3() - o3).norm_sqr().sqrt() < 1e-12);
}

#[test]
fn conjugate_phase_state_is_not_a_mirror_image() {
    // (√0.48, −i√0.52) flips the sign of Im ρ₃ only; ρ₁ − ½ starts at the
    // same −0.02, so the slow mode is not reflected about ½
    let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
    let tilde = pure_to_density(&PureState2::split(0.48, -I).unwrap()).unwrap();
    let (o1, _) = rk4_oracle(tilde.rho1(), tilde.rho3(), 1.0, 100.0, 1.0, 1e-5);
    assert!((o1 - 0.471_169_082_941_797_5).abs() < 1e-12);
    let cf = closed_form_solution(&tilde, &p, 1.0).unwrap();
    assert!((cf.rho1() - o1).abs() < 1e-12);
    let mean = 0.5 * (cf.rho1() + closed_form_solution(&reference(), &p, 1.0).unwrap().rho1());
    assert!(
        (mean - closed_form_solution(&DensityMatrix2::diagonal(0.48).unwrap(), &p, 1.0).unwrap().rho1()).abs() < 1e-15
    );
}

#[test]
fn macroscopic_regime_keeps_the_born_weight() {
    let p = ToyParams::from_epsilon(1e-6, 100.0).unwrap();
    let r = reference();
    let cf = closed_form_solution(&r, &p, 1e3).unwrap();
    // 40-digit matrix exponential: 0.48000100719919847; the shift away from
    // 0.48 is the ~2ω·|Im ρ₃|/λ drift picked up during reduction
    assert!((cf.rho1() - 0.480_001_007_199_198_5).abs() < 1e-12);
    assert!((cf.rho1() - 0.48).abs() < 1.1e-6);
    // RK4 oracle over the first 2 s, then closed form from there
    let (o1, o3) = rk4_oracle(r.rho1(), r.rho3(), 1e-4, 100.0, 2.0, 1e-4);
    let mid = DensityMatrix2::new(o1, o3).unwrap();
    let cf2 = closed_form_solution(&r, &p, 2.0).unwrap();
    assert!(mid.max_abs_diff(&cf2) < 1e-12);
}

#[test]
fn numeric_matches_closed_form_on_linear_grid() {
    let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
    let grid: Vec<f64> = (0..=6000).map(|i| i as f64 * 0.01).collect();
    let num = evolve_numeric(&reference(), &p, &grid).unwrap();
    let at1 = num.values()[100];
    assert_eq!(num.times()[100], 1.0);
    let cf = closed_form_solution(&reference(), &p, 1.0).unwrap();
    assert!((at1.rho1() - cf.rho1()).abs() < 1e-9);
}

#[test]
fn numeric_reaches_asymptote_over_log_grid() {
    let p = ToyParams::from_epsilon(1e-6, 100.0).unwrap();
    let mut grid = vec![0.0];
    grid.extend((0..=280).map(|i| libm::pow(10.0, -4.0 + i as f64 * 0.05)));
    let num = evolve_numeric(&reference(), &p, &grid).unwrap();
    let last = num.values().last().unwrap();
    assert_eq!(*num.times().last().unwrap(), 1e10);
    assert!(last.rho1() > 0.499);
    let cf = closed_form_solution(&reference(), &p, 1e10).unwrap();
    assert!((last.rho1() - cf.rho1()).abs() < 1e-9);
    assert!((cf.rho1() - 0.499_633_705_523_210_2).abs() < 1e-9);
}

fn closed_vs_numeric_max_diff(epsilon: f64, grid: &[f64]) -> f64 {
    let p = ToyParams::from_epsilon(epsilon, 100.0).unwrap();
    let num = evolve_numeric(&reference(), &p, grid).unwrap();
    let cf = ClosedForm::new(&p).unwrap().series(&reference(), grid).unwrap();
    num.values().iter().zip(cf.values()).map(|(a, b)| (a.rho1() - b.rho1()).abs()).fold(0.0, f64::max)
}

#[test]
fn closed_form_and_numeric_agree_for_three_regimes() {
    // 10³ points per regime, each spanning reduction, plateau and relaxation
    let log_grid = |lo: f64, hi: f64| -> Vec<f64> {
        let mut g = vec![0.0];
        g.extend((0..999).map(|i| libm::pow(10.0, lo + (hi - lo) * i as f64 / 998.0)));
        g
    };
    for (eps, hi) in [(1e-6, 12.0), (1e-2, 3.0), (0.2, 1.0)] {
        let d = closed_vs_numeric_max_diff(eps, &log_grid(-4.0, hi));
        assert!(d <= 1e-9, "epsilon {eps}: {d:e}");
    }
}

#[test]
fn decoherence_of_real_coherence_is_exponential() {
    let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
    let rho0 = DensityMatrix2::new(0.5, Complex64::new(0.3, 0.0)).unwrap();
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.001).collect();
    let cf = ClosedForm::new(&p).unwrap().series(&rho0, &grid).unwrap();
    let num = evolve_numeric(&rho0, &p, &grid).unwrap();
    for ((t, a), b) in cf.iter().zip(num.values()) {
        let expected = 0.3 * (-100.0 * t).exp();
        assert!((a.rho3().re - expected).abs() <= 1e-15 * expected);
        assert!((b.rho3().re - expected).abs() < 1e-10);
    }
}

#[test]
fn plateau_in_competitive_regime() {
    let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
    let grid: Vec<f64> = (0..=60_000).map(|i| i as f64 * 1e-3).collect();
    let s = ClosedForm::new(&p).unwrap().series(&reference(), &grid).unwrap();
    let pl = detect_plateau(&s, 0.1, 0.0025).unwrap();
    // root of ρ₁(t) = ρ₁(0.1) + 0.0025 found with 40-digit arithmetic
    assert!((pl.value - 0.490_031_502_975_285_4).abs() < 1e-12);
    assert!((pl.duration() - 7.214_370_815_914_363).abs() < 1e-5);
}

#[test]
fn plateau_in_macroscopic_regime() {
    let p = ToyParams::from_epsilon(1e-6, 100.0).unwrap();
    let mut grid = vec![0.0];
    grid.extend((0..=320).map(|i| libm::pow(10.0, -4.0 + i as f64 * 0.05)));
    let s = ClosedForm::new(&p).unwrap().series(&reference(), &grid).unwrap();
    let pl = detect_plateau(&s, 0.1, 0.0025).unwrap();
    assert!((pl.value - 0.48).abs() < 1e-4);
    assert!(pl.duration() > 1e8);
}

fn arb_density() -> impl Strategy<Value = DensityMatrix2> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r1, frac, phase)| {
        let radius = (r1 * (1.0 - r1)).sqrt() * frac;
        DensityMatrix2::new(r1, Complex64::new(radius * phase.cos(), radius * phase.sin())).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evolution_is_linear(a in arb_density(), b in arb_density(), w in 0.0f64..=1.0, t in 0.0f64..20.0) {
        let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
        let cf = ClosedForm::new(&p).unwrap();
        let mixed = cf.at(&DensityMatrix2::mix(w, &a, &b).unwrap(), t).unwrap();
        let sep = DensityMatrix2::mix(w, &cf.at(&a, t).unwrap(), &cf.at(&b, t).unwrap()).unwrap();
        prop_assert!(mixed.max_abs_diff(&sep) <= 1e-10);
    }

    #[test]
    fn evolution_preserves_positivity(rho in arb_density(), eps in 1e-6f64..0.2, t in 0.0f64..1e3) {
        let p = ToyParams::from_epsilon(eps, 100.0).unwrap();
        let out = closed_form_solution(&rho, &p, t).unwrap();
        prop_assert!(out.is_valid(1e-10));
        prop_assert_eq!(out.trace(), 1.0);
    }

    #[test]
    fn distance_to_steady_state_is_bounded_by_modes(rho in arb_density(), t in 0.0f64..200.0) {
        let p = ToyParams::from_epsilon(1e-2, 100.0).unwrap();
        let cf = ClosedForm::new(&p).unwrap();
        let m = cf.modes(&rho).unwrap();
        let x = cf.at(&rho, t).unwrap().rho1() - 0.5;
        let bound = m.slow_amplitude.abs() * (m.slow_rate * t).exp()
            + m.fast_amplitude.abs() * (m.fast_rate * t).exp();
        prop_assert!(x.abs() <= bound + 1e-15);
    }
}
