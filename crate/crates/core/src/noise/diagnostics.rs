//! Statistical self-test of the noise sampler.
//!
//! Each check compares an empirical moment over `draws` independent
//! increments with its exact value and passes when the difference is within
//! five standard errors.

use crate::error::Result;
use crate::spatial::FemSpace;

use super::{build_store, full_step_increment_at, BridgeKey, CovarianceSpec, NoiseKey};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.observed - self.expected).abs() <= self.tolerance
    }
}

const SIGMAS: f64 = 5.0;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Runs the variance, cross-covariance, trace, bridge and DST checks.
pub fn run_checks(draws: usize, modes: usize, seed: u64) -> Result<Vec<Check>> {
    let ref_step = 1.0 / 64.0;
    let cov = CovarianceSpec::<f64>::cubic_decay(modes)?;
    let store = build_store(&cov, draws as f64 * ref_step, ref_step, NoiseKey { master: seed, sample: 0 })?;
    let n = draws as f64;
    let mut checks = Vec::new();

    for j in [1, modes.div_ceil(2), modes] {
        let xs: Vec<f64> = (0..draws).map(|s| store.entry(j, s)).collect();
        checks.push(Check {
            name: format!("variance of raw mode {j}"),
            observed: variance(&xs),
            expected: ref_step,
            tolerance: SIGMAS * ref_step * (2.0 / n).sqrt(),
        });
    }

    if modes >= 2 {
        let pairs = [(1, 2), (1, modes), (modes - 1, modes)];
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let prods: Vec<f64> = (0..draws).map(|s| store.entry(a, s) * store.entry(b, s)).collect();
            checks.push(Check {
                name: format!("covariance of raw modes {a},{b}"),
                observed: mean(&prods),
                expected: 0.0,
                tolerance: SIGMAS * ref_step / n.sqrt(),
            });
        }
    }

    let incs: Vec<_> =
        (0..draws).map(|s| full_step_increment_at(&store, &cov, s, 1)).collect::<Result<_>>()?;
    let sq: Vec<f64> = incs.iter().map(|i| i.values().iter().map(|v| v * v).sum()).collect();
    let mu2: f64 = cov.eigenvalues().iter().map(|m| m * m).sum();
    checks.push(Check {
        name: "mean squared increment norm".into(),
        observed: mean(&sq),
        expected: ref_step * cov.trace(),
        tolerance: SIGMAS * ref_step * (2.0 * mu2 / n).sqrt(),
    });

    let tau = 0.5;
    let bridges: Vec<_> = incs
        .iter()
        .enumerate()
        .map(|(s, inc)| inc.bridge(&cov, tau, &BridgeKey::new(seed, 0, 0, s as u64), modes))
        .collect::<Result<_>>()?;
    for j in [1, modes] {
        let mu = cov.mu(j);
        let part: Vec<f64> = bridges.iter().map(|b| b.values()[j - 1]).collect();
        let full: Vec<f64> = incs.iter().map(|i| i.values()[j - 1]).collect();
        let half = mu * ref_step * tau;
        checks.push(Check {
            name: format!("bridge variance mode {j}"),
            observed: variance(&part),
            expected: half,
            tolerance: SIGMAS * half * (2.0 / n).sqrt(),
        });
        let prods: Vec<f64> = part.iter().zip(&full).map(|(a, b)| a * b).collect();
        checks.push(Check {
            name: format!("bridge/full covariance mode {j}"),
            observed: mean(&prods),
            expected: half,
            tolerance: SIGMAS * mu * ref_step * (0.75 / n).sqrt(),
        });
    }

    let fem = FemSpace::<f64>::new(64)?;
    let modal: Vec<f64> = (0..64).map(|j| store.entry(1 + j % modes, j)).collect();
    let fast = crate::spatial::Discretization::modal_to_grid(&fem, &modal);
    let slow = fem.modal_to_nodal_direct(&modal);
    let scale = slow.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = fast.coeffs().iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    checks.push(Check {
        name: "DST vs direct summation (M = N_h = 64)".into(),
        observed: err / scale,
        expected: 0.0,
        tolerance: 1e-10,
    });
    Ok(checks)
}
