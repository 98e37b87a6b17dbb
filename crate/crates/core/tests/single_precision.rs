use randsee::experiment::{run_study, run_study_with, StudyConfig};
use randsee::noise::{build_store, NoiseKey};
use randsee::scheme::{run_trajectory, Method, NoiseSource, Record, TrajectoryKey};

use randsee::{
    problem, CovarianceSpec32, Discretization, FemSpace32, ProblemSpec32, SchemeConfig32, SpectralSpace32,
};

#[test]
fn f32_trajectory_tracks_f64() {
    let space = FemSpace32::new(40).unwrap();
    let mild = problem::WeierstrassParams::new(0.5, 3, 2).unwrap();
    let p: ProblemSpec32 =
        problem::builtin_problem("weierstrass-sigma1").unwrap().with_drift(problem::Drift::Weierstrass(mild));
    let cov = CovarianceSpec32::cubic_decay(40).unwrap();
    let store = build_store(&cov, 1.0f32, 0.03125f32, NoiseKey::from(3)).unwrap();
    let cfg = SchemeConfig32::dyadic(1.0, 4, Method::Randomized, 40).unwrap();
    let key = TrajectoryKey { master: 3, sample: 0, run: 1 };
    let x = run_trajectory(
        &cfg,
        &space,
        &p,
        Some(NoiseSource { store: &store, cov: &cov }),
        key,
        Record::FinalOnly,
    )
    .unwrap();
    assert!(x.final_state().is_finite());

    let space64 = randsee::FemSpace64::new(40).unwrap();
    let p64 = problem::builtin_problem::<f64>("weierstrass-sigma1")
        .unwrap()
        .with_drift(problem::Drift::Weierstrass(mild));
    let cov64 = randsee::CovarianceSpec64::cubic_decay(40).unwrap();
    let store64 = build_store(&cov64, 1.0, 0.03125, NoiseKey::from(3)).unwrap();
    assert_eq!(store, store64);
    let cfg64 = randsee::SchemeConfig64::dyadic(1.0, 4, Method::Randomized, 40).unwrap();
    let y = run_trajectory(
        &cfg64,
        &space64,
        &p64,
        Some(NoiseSource { store: &store64, cov: &cov64 }),
        key,
        Record::FinalOnly,
    )
    .unwrap();
    let diff = x
        .final_state()
        .coeffs()
        .iter()
        .zip(y.final_state().coeffs())
        .fold(0.0f64, |m, (a, b)| m.max((*a as f64 - b).abs()));
    assert!(diff < 1e-4, "{diff}");
}

#[test]
fn f32_spectral_resolvent_and_study() {
    let space = SpectralSpace32::new(16).unwrap();
    let v = space.grid_function(vec![1.0; 16]).unwrap();
    let w = space.resolvent_solve(0.25, &v).unwrap();
    let expected = 1.0 / (1.0 + 0.25 * std::f32::consts::PI.powi(2));
    assert!((w.coeffs()[0] - expected).abs() < 1e-6);

    let cfg = StudyConfig {
        resolution: 16,
        truncation_m: 16,
        ref_exponent: 6,
        step_exponents: vec![2, 3],
        n_samples: 3,
        weierstrass: Some((0.5, 3, 2)),
        ..Default::default()
    };
    let a = run_study_with::<f32>(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    for (s, t) in a.series.iter().zip(&b.series) {
        for (x, y) in s.rows.iter().zip(&t.rows) {
            assert!(
                (x.rms_error - y.rms_error).abs() < 1e-3 * y.rms_error,
                "{} vs {}",
                x.rms_error,
                y.rms_error
            );
        }
    }
}
