use proptest::prelude::*;
use randsee::noise::{build_store, full_step_increment_at, BridgeKey, CovarianceSpec, NoiseKey};
use randsee::problem::{builtin_problem, sigma1, Drift, NoiseIntensity, ProblemSpec};
use randsee::scheme::{
    init_state, run_trajectory, Method, NoiseSource, Record, SchemeConfig, Stepper, TauMode, TrajectoryKey,
};
use randsee::{Discretization, Error, FemSpace, InitialCondition, SpectralSpace};

const KEY: TrajectoryKey = TrajectoryKey { master: 17, sample: 3, run: 5 };

fn heat(horizon: f64) -> ProblemSpec<f64> {
    ProblemSpec::new("heat", Drift::Zero, NoiseIntensity::Zero, InitialCondition::quadratic_bump(), horizon)
        .unwrap()
}

#[test]
fn zero_tau_reproduces_classical_bitwise() {
    let space = FemSpace::<f64>::new(100).unwrap();
    let problem = builtin_problem::<f64>("weierstrass-sigma1").unwrap();
    let cov = CovarianceSpec::cubic_decay(100).unwrap();
    let store = build_store(&cov, 1.0, 2f64.powi(-8), NoiseKey::from(9)).unwrap();
    let noise = Some(NoiseSource { store: &store, cov: &cov });
    let classical = SchemeConfig::dyadic(1.0, 5, Method::Classical, 100).unwrap();
    let randomized =
        SchemeConfig::dyadic(1.0, 5, Method::Randomized, 100).unwrap().with_tau(TauMode::Fixed(0.0));
    let a = run_trajectory(&classical, &space, &problem, noise, KEY, Record::All).unwrap();
    let b = run_trajectory(&randomized, &space, &problem, noise, KEY, Record::All).unwrap();
    assert_eq!(a.states.len(), 33);
    for ((_, x), (_, y)) in a.states.iter().zip(&b.states) {
        let bits = |v: &[f64]| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(x.coeffs()), bits(y.coeffs()));
    }
}

#[test]
fn resolvent_powers_are_exact_per_mode() {
    let space = SpectralSpace::<f64>::new(40).unwrap();
    let problem = heat(1.0);
    let x0 = space.project_initial(&problem.initial).unwrap();
    for method in [Method::Classical, Method::Randomized] {
        let cfg = SchemeConfig::new(1.0, 4, method, 1).unwrap();
        let traj = run_trajectory(&cfg, &space, &problem, None, KEY, Record::All).unwrap();
        let last = traj.final_state().coeffs();
        assert!((last[0] - 0.002_524_288_775_141_886).abs() < 1e-15);
        for (j, (&c, &c0)) in last.iter().zip(x0.coeffs()).enumerate() {
            let lambda = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
            let expected = c0 * (1.0 + 0.25 * lambda).powi(-4);
            assert!((c - expected).abs() <= 1e-12 * expected.abs(), "mode {j}: {c} vs {expected}");
        }
        let norms: Vec<f64> = traj.states.iter().map(|(_, x)| space.norm_l2(x).unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn spatial_discretizations_agree_on_a_smooth_run() {
    let problem = heat(0.05);
    let cfg = SchemeConfig::new(0.05, 50, Method::Classical, 1).unwrap();
    let spectral = SpectralSpace::<f64>::new(200).unwrap();
    let fem = FemSpace::<f64>::new(255).unwrap();
    let a = run_trajectory(&cfg, &spectral, &problem, None, KEY, Record::FinalOnly).unwrap();
    let b = run_trajectory(&cfg, &fem, &problem, None, KEY, Record::FinalOnly).unwrap();
    let at_nodes = spectral.evaluate_on_grid(a.final_state(), fem.nodes()).unwrap();
    let err = b.final_state().coeffs().iter().zip(&at_nodes).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(err < 1e-4, "{err}");
}

/// Transcribes the two-stage recursion mode by mode.
#[test]
fn randomized_step_matches_the_recursion() {
    let n_modes = 16;
    let m = 16;
    let inner = 5;
    let space = SpectralSpace::<f64>::new(n_modes).unwrap();
    let problem = builtin_problem::<f64>("linear-drift").unwrap().with_sigma(NoiseIntensity::Sigma1);
    let cov = CovarianceSpec::cubic_decay(m).unwrap();
    let store = build_store(&cov, 1.0, 2f64.powi(-6), NoiseKey::from(4)).unwrap();
    let taus = vec![0.3, 0.71, 1.0, 0.05, 0.5, 0.999, 0.2, 0.6];
    let cfg = SchemeConfig::new(1.0, 8, Method::Randomized, m)
        .unwrap()
        .with_inner_modes(inner)
        .unwrap()
        .with_tau(TauMode::Injected(taus.clone()));
    let traj = run_trajectory(
        &cfg,
        &space,
        &problem,
        Some(NoiseSource { store: &store, cov: &cov }),
        KEY,
        Record::All,
    )
    .unwrap();
    assert_eq!(traj.tau_log, taus);

    let k = 0.125;
    let r = 8;
    let mut x: Vec<f64> = init_state(&space, &problem).unwrap().current.coeffs().to_vec();
    for n in 1..=8 {
        let tau = taus[n - 1];
        let t_prev = (n - 1) as f64 * k;
        let full = full_step_increment_at(&store, &cov, (n - 1) * r, r).unwrap();
        let part = if tau < 1.0 {
            full.bridge(&cov, tau, &BridgeKey::new(KEY.master, KEY.sample, KEY.run, n as u64), inner).unwrap()
        } else {
            full.clone()
        };
        let (s_prev, s_tau) = (sigma1(t_prev).unwrap(), sigma1(t_prev + tau * k).unwrap());
        for (j, xj) in x.iter_mut().enumerate() {
            let lambda = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
            let dw1 = if j < inner { part.values()[j] } else { 0.0 };
            let y = (*xj + tau * k * *xj + s_prev * dw1) / (1.0 + tau * k * lambda);
            *xj = (*xj + k * y + s_tau * full.values()[j]) / (1.0 + k * lambda);
        }
        let got = traj.states[n].1.coeffs();
        for (j, (g, w)) in got.iter().zip(&x).enumerate() {
            assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()), "n={n} j={j}: {g} vs {w}");
        }
    }
}

#[test]
fn linear_drift_full_fraction_is_a_product_of_scalar_factors() {
    let space = SpectralSpace::<f64>::new(8).unwrap();
    let problem = builtin_problem::<f64>("linear-drift").unwrap();
    let cfg = SchemeConfig::new(1.0, 6, Method::Randomized, 1).unwrap().with_tau(TauMode::Fixed(1.0));
    let traj = run_trajectory(&cfg, &space, &problem, None, KEY, Record::FinalOnly).unwrap();
    let x0 = space.project_initial(&problem.initial).unwrap();
    let k = 1.0 / 6.0;
    for j in 0..8 {
        let lambda = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
        let stage = (1.0 + k) / (1.0 + k * lambda);
        let factor = (1.0 + k * stage) / (1.0 + k * lambda);
        let expected = x0.coeffs()[j] * factor.powi(6);
        let got = traj.final_state().coeffs()[j];
        assert!((got - expected).abs() <= 1e-12 * expected.abs() + 1e-15, "mode {j}: {got} vs {expected}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_decay_is_stable(log_k in -8.0f64..3.0, tau in 0.0f64..=1.0) {
        let k = log_k.exp();
        let space = SpectralSpace::<f64>::new(6).unwrap();
        let problem = builtin_problem::<f64>("linear-drift").unwrap().with_horizon(3.0 * k).unwrap();
        let cfg = SchemeConfig::new(3.0 * k, 3, Method::Randomized, 1).unwrap().with_tau(TauMode::Fixed(tau));
        let traj = run_trajectory(&cfg, &space, &problem, None, KEY, Record::All).unwrap();
        for w in traj.states.windows(2) {
            for (a, b) in w[0].1.coeffs().iter().zip(w[1].1.coeffs()) {
                prop_assert!(b.abs() < a.abs() || b.abs() < 1e-15);
            }
        }
    }
}

#[test]
fn runs_are_deterministic_and_keyed() {
    let space = SpectralSpace::<f64>::new(32).unwrap();
    let problem = builtin_problem::<f64>("weierstrass-sigma1").unwrap();
    let cov = CovarianceSpec::cubic_decay(32).unwrap();
    let store = build_store(&cov, 1.0, 2f64.powi(-7), NoiseKey::from(1)).unwrap();
    let noise = Some(NoiseSource { store: &store, cov: &cov });
    let cfg = SchemeConfig::dyadic(1.0, 4, Method::Randomized, 32).unwrap();
    let a = run_trajectory(&cfg, &space, &problem, noise, KEY, Record::All).unwrap();
    let b = run_trajectory(&cfg, &space, &problem, noise, KEY, Record::All).unwrap();
    assert_eq!(a, b);
    let other = TrajectoryKey { run: 6, ..KEY };
    let c = run_trajectory(&cfg, &space, &problem, noise, other, Record::All).unwrap();
    assert_ne!(a.tau_log, c.tau_log);
    assert!(a.tau_log.iter().all(|t| (0.0..1.0).contains(t)));
}

#[test]
fn zero_steps_return_the_initial_state() {
    let space = FemSpace::<f64>::new(20).unwrap();
    let problem = heat(1.0);
    let cfg = SchemeConfig::new(1.0, 0, Method::Randomized, 1).unwrap();
    let traj = run_trajectory(&cfg, &space, &problem, None, KEY, Record::All).unwrap();
    assert_eq!(traj.states.len(), 1);
    assert_eq!(traj.states[0].0, 0);
    assert_eq!(traj.states[0].1, space.project_initial(&problem.initial).unwrap());
}

#[test]
fn zero_initial_value_stays_zero_without_forcing() {
    let space = SpectralSpace::<f64>::new(10).unwrap();
    let problem =
        ProblemSpec::new("rest", Drift::Zero, NoiseIntensity::Zero, InitialCondition::zero(), 1.0).unwrap();
    let state = init_state(&space, &problem).unwrap();
    assert!(state.current.coeffs().iter().all(|&c| c == 0.0));
    let cfg = SchemeConfig::new(1.0, 5, Method::Randomized, 1).unwrap();
    let traj = run_trajectory(&cfg, &space, &problem, None, KEY, Record::FinalOnly).unwrap();
    assert!(traj.final_state().coeffs().iter().all(|&c| c == 0.0));
}

#[test]
fn recording_modes() {
    let space = SpectralSpace::<f64>::new(4).unwrap();
    let problem = heat(1.0);
    let cfg = SchemeConfig::new(1.0, 10, Method::Classical, 1).unwrap();
    let idx = |r| -> Vec<usize> {
        run_trajectory(&cfg, &space, &problem, None, KEY, r).unwrap().states.iter().map(|s| s.0).collect()
    };
    assert_eq!(idx(Record::FinalOnly), vec![10]);
    assert_eq!(idx(Record::Every(4)), vec![0, 4, 8, 10]);
    assert_eq!(idx(Record::All), (0..=10).collect::<Vec<_>>());
}

#[test]
fn invalid_setups_are_rejected() {
    let space = SpectralSpace::<f64>::new(8).unwrap();
    let problem = builtin_problem::<f64>("weierstrass-sigma1").unwrap();
    let cfg = SchemeConfig::dyadic(1.0, 3, Method::Classical, 8).unwrap();
    assert_eq!(
        run_trajectory(&cfg, &space, &problem, None, KEY, Record::All).unwrap_err(),
        Error::MissingNoise
    );

    let cov = CovarianceSpec::cubic_decay(8).unwrap();
    let store = build_store(&cov, 1.0, 0.25, NoiseKey::from(2)).unwrap();
    let noise = Some(NoiseSource { store: &store, cov: &cov });
    assert!(Stepper::new(&cfg, &space, &problem, noise, KEY).is_err(), "k finer than the store");

    let wrong_m = SchemeConfig::dyadic(1.0, 2, Method::Classical, 4).unwrap();
    assert!(Stepper::new(&wrong_m, &space, &problem, noise, KEY).is_err());

    let short =
        SchemeConfig::dyadic(1.0, 2, Method::Randomized, 8).unwrap().with_tau(TauMode::Injected(vec![0.5]));
    assert!(Stepper::new(&short, &space, &problem, noise, KEY).is_err());

    let ok = SchemeConfig::dyadic(1.0, 2, Method::Classical, 8).unwrap();
    let stepper = Stepper::new(&ok, &space, &problem, noise, KEY).unwrap();
    let mut state = init_state(&space, &problem).unwrap();
    for _ in 0..4 {
        stepper.step(&mut state).unwrap();
    }
    assert!(matches!(stepper.step(&mut state), Err(Error::NoiseExhausted { .. })));

    assert!(SchemeConfig::dyadic(1.0, 2, Method::Classical, 8).unwrap().with_inner_modes(9).is_err());
    assert!(SchemeConfig::<f64>::new(0.0, 2, Method::Classical, 8).is_err());
}
