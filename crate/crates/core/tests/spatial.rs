use proptest::prelude::*;
use randsee::experiment::regression_order;
use randsee::problem::{Drift, NoiseIntensity, ProblemSpec};
use randsee::scheme::{run_trajectory, Method, Record, SchemeConfig, TrajectoryKey};
use randsee::{Discretization, FemSpace, InitialCondition, SpectralSpace};

fn profile(fem: &FemSpace<f64>, vals: &[f64]) -> randsee::GridFunction<f64> {
    fem.grid_function(vals.to_vec()).unwrap()
}

/// Final-time FEM error against a fine spectral run with the same steps.
fn heat_error(n_dof: usize, reference: &SpectralSpace<f64>) -> f64 {
    let problem =
        ProblemSpec::new("heat", Drift::Zero, NoiseIntensity::Zero, InitialCondition::quadratic_bump(), 0.1)
            .unwrap();
    let cfg = SchemeConfig::new(0.1, 100, Method::Classical, 1).unwrap();
    let key = TrajectoryKey { master: 0, sample: 0, run: 0 };
    let fem = FemSpace::<f64>::new(n_dof).unwrap();
    let x = run_trajectory(&cfg, &fem, &problem, None, key, Record::FinalOnly).unwrap();
    let r = run_trajectory(&cfg, reference, &problem, None, key, Record::FinalOnly).unwrap();
    let r_nodal = reference.evaluate_on_grid(r.final_state(), fem.nodes()).unwrap();
    fem.norm_l2(&x.final_state().sub(&profile(&fem, &r_nodal)).unwrap()).unwrap()
}

#[test]
fn fem_heat_error_is_second_order() {
    let reference = SpectralSpace::<f64>::new(1000).unwrap();
    let errs: Vec<f64> = [63, 127, 255].iter().map(|&n| heat_error(n, &reference)).collect();
    let hs: Vec<f64> = [64.0, 128.0, 256.0].iter().map(|n| 1.0 / n).collect();
    let order = regression_order(&errs, &hs).unwrap();
    assert!(order >= 1.8, "errors {errs:?}, order {order}");
}

#[test]
fn spectral_projection_reproduces_sine_polynomials() {
    let space = SpectralSpace::<f64>::new(12).unwrap();
    let coeffs = [0.5, 0.0, -1.25, 0.0, 0.0, 2.0];
    let u = InitialCondition::new("sines", move |x: f64| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * 2f64.sqrt() * ((j + 1) as f64 * std::f64::consts::PI * x).sin())
            .sum()
    });
    let p = space.project_initial(&u).unwrap();
    for (j, c) in p.coeffs().iter().enumerate() {
        let want = coeffs.get(j).copied().unwrap_or(0.0);
        assert!((c - want).abs() < 1e-10, "mode {j}: {c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_resolvent_contracts(values in prop::collection::vec(-10.0f64..10.0, 24), log_kappa in -10.0f64..2.0) {
        let space = SpectralSpace::<f64>::new(24).unwrap();
        let v = space.grid_function(values).unwrap();
        let w = space.resolvent_solve(log_kappa.exp(), &v).unwrap();
        prop_assert!(space.norm_l2(&w).unwrap() <= space.norm_l2(&v).unwrap());
    }

    #[test]
    fn fem_resolvent_contracts_in_mass_norm(values in prop::collection::vec(-10.0f64..10.0, 30), log_kappa in -10.0f64..2.0) {
        let space = FemSpace::<f64>::new(30).unwrap();
        let v = space.grid_function(values).unwrap();
        let w = space.resolvent_solve(log_kappa.exp(), &v).unwrap();
        prop_assert!(space.norm_mass(&w).unwrap() <= space.norm_mass(&v).unwrap() * (1.0 + 1e-14));
    }
}

#[test]
fn functions_from_different_spaces_do_not_mix() {
    let a = SpectralSpace::<f64>::new(8).unwrap();
    let b = SpectralSpace::<f64>::new(8).unwrap();
    let v = b.zeros();
    assert!(a.resolvent_solve(0.1, &v).is_err());
    assert!(a.norm_l2(&v).is_err());
    assert!(a.zeros().sub(&v).is_err());
    assert!(a.grid_function(vec![0.0; 7]).is_err());
    assert!(a.grid_function(vec![f64::NAN; 8]).is_err());
    assert!(a.resolvent_solve(-1.0, &a.zeros()).is_err());
}
