//! Monte Carlo strong-error studies.
//!
//! For every sample one noise path is built on the reference grid
//! `k_ref = T 2^-i_ref`. The reference trajectory and every coarse run read
//! their increments from that path, so the discrepancies measure the
//! discretization error on a common realization.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{build_store, CovarianceSpec, NoiseKey};
use crate::problem::{builtin_problem, Drift, NoiseIntensity, ProblemSpec, WeierstrassParams};
use crate::scalar::Scalar;
use crate::scheme::{
    reduced_inner_modes, Method, NoiseSource, Record, SchemeConfig, Stepper, Trajectory, TrajectoryKey,
};
use crate::spatial::{Discretization, FemSpace, GridFunction, SpaceKind, SpectralSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorMode {
    /// `E ||X_ref(T) - X_k(T)||^2`.
    FinalTime,
    /// `max_n E ||X_ref(t_n) - X_k(t_n)||^2` over the coarse grid.
    MaxOverGrid,
}

impl ErrorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorMode::FinalTime => "final_time",
            ErrorMode::MaxOverGrid => "max_over_grid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "final_time" | "final-time" => Some(ErrorMode::FinalTime),
            "max_over_grid" | "max-over-grid" => Some(ErrorMode::MaxOverGrid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnerModes {
    /// Stage one uses all `M` modes.
    Full,
    /// `floor(sqrt(M)) + 1` modes in stage one.
    Reduced,
    Fixed(usize),
}

impl InnerModes {
    pub fn resolve(self, truncation: usize) -> usize {
        match self {
            InnerModes::Full => truncation,
            InnerModes::Reduced => reduced_inner_modes(truncation),
            InnerModes::Fixed(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigmaChoice {
    Zero,
    Sigma1,
    Sigma2,
}

impl SigmaChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaChoice::Zero => "zero",
            SigmaChoice::Sigma1 => "sigma1",
            SigmaChoice::Sigma2 => "sigma2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(SigmaChoice::Zero),
            "sigma1" => Some(SigmaChoice::Sigma1),
            "sigma2" => Some(SigmaChoice::Sigma2),
            _ => None,
        }
    }

    fn intensity<T: Scalar>(self) -> NoiseIntensity<T> {
        match self {
            SigmaChoice::Zero => NoiseIntensity::Zero,
            SigmaChoice::Sigma1 => NoiseIntensity::Sigma1,
            SigmaChoice::Sigma2 => NoiseIntensity::Sigma2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: String,
    /// `(a, b, J)` replacing the Weierstrass parameters.
    pub weierstrass: Option<(f64, u64, u32)>,
    pub sigma: Option<SigmaChoice>,
    pub space: SpaceKind,
    /// `n_modes` for the spectral space, `N_h` for finite elements.
    pub resolution: usize,
    pub truncation_m: usize,
    pub inner_modes: InnerModes,
    pub ref_exponent: u32,
    pub step_exponents: Vec<u32>,
    pub n_samples: usize,
    /// Index of the first sample, so disjoint sample ranges can be pooled.
    pub first_sample: u64,
    pub methods: Vec<Method>,
    pub reference_method: Method,
    pub error_mode: ErrorMode,
    pub master_seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            problem: "weierstrass-sigma1".into(),
            weierstrass: None,
            sigma: None,
            space: SpaceKind::Spectral,
            resolution: 100,
            truncation_m: 100,
            inner_modes: InnerModes::Full,
            ref_exponent: 10,
            step_exponents: vec![3, 4, 5, 6, 7],
            n_samples: 20,
            first_sample: 0,
            methods: vec![Method::Classical, Method::Randomized],
            reference_method: Method::Randomized,
            error_mode: ErrorMode::FinalTime,
            master_seed: 2024,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Config(format!("`{key}`: {why}")));
        if self.step_exponents.is_empty() {
            return bad("step_exps", "at least one coarse step size is required".into());
        }
        if let Some(i) = self.step_exponents.iter().find(|&&i| i >= self.ref_exponent) {
            return bad(
                "step_exps",
                format!("coarse step 2^-{i} is not coarser than the reference 2^-{}", self.ref_exponent),
            );
        }
        let mut sorted = self.step_exponents.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.step_exponents.len() {
            return bad("step_exps", "duplicate step sizes".into());
        }
        if self.n_samples < 2 {
            return bad("samples", format!("need at least 2 samples, got {}", self.n_samples));
        }
        self.validate_model()
    }

    /// Checks everything except the step list and sample count.
    pub fn validate_model(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Config(format!("`{key}`: {why}")));
        if self.ref_exponent > 24 {
            return bad("kref_exp", format!("2^-{} is finer than supported", self.ref_exponent));
        }
        if self.methods.is_empty() {
            return bad("method", "no method selected".into());
        }
        if self.resolution == 0 {
            return bad(
                if self.space == SpaceKind::Fem { "ndof" } else { "modes" },
                "must be positive".into(),
            );
        }
        if self.truncation_m == 0 {
            return bad("M", "must be positive".into());
        }
        let inner = self.inner_modes.resolve(self.truncation_m);
        if inner == 0 || inner > self.truncation_m {
            return bad("inner_modes", format!("must lie in [1, {}], got {inner}", self.truncation_m));
        }
        if let Some((a, b, j)) = self.weierstrass {
            WeierstrassParams::new(a, b, j).map_err(|e| Error::Config(format!("`weierstrass`: {e}")))?;
        }
        self.build_problem::<f64>()?;
        Ok(())
    }

    /// Step exponents in increasing order (step sizes decreasing).
    pub fn sorted_exponents(&self) -> Vec<u32> {
        let mut v = self.step_exponents.clone();
        v.sort_unstable();
        v
    }

    pub fn build_problem<T: Scalar>(&self) -> Result<ProblemSpec<T>> {
        let mut p = builtin_problem::<T>(&self.problem)?;
        if let Some((a, b, j)) = self.weierstrass {
            p = p.with_drift(Drift::Weierstrass(WeierstrassParams::new(a, b, j)?));
        }
        if let Some(s) = self.sigma {
            p = p.with_sigma(s.intensity());
        }
        Ok(p)
    }
}

pub fn build_space<T: Scalar>(kind: SpaceKind, resolution: usize) -> Result<Box<dyn Discretization<T>>> {
    Ok(match kind {
        SpaceKind::Spectral => Box::new(SpectralSpace::<T>::new(resolution)?),
        SpaceKind::Fem => Box::new(FemSpace::<T>::new(resolution)?),
    })
}

/// Pairwise experimental orders `log(e_i / e_{i-1}) / log(k_i / k_{i-1})`.
pub fn compute_eoc(errors: &[f64], ks: &[f64]) -> Result<Vec<f64>> {
    check_series(errors, ks)?;
    Ok(errors
        .windows(2)
        .zip(ks.windows(2))
        .map(|(e, k)| (e[1].ln() - e[0].ln()) / (k[1].ln() - k[0].ln()))
        .collect())
}

/// Least-squares slope of `log(error)` against `log(k)`.
pub fn regression_order(errors: &[f64], ks: &[f64]) -> Result<f64> {
    check_series(errors, ks)?;
    let xs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn check_series(errors: &[f64], ks: &[f64]) -> Result<()> {
    if errors.len() != ks.len() {
        return Err(Error::invalid("errors", "errors and step sizes differ in length"));
    }
    if errors.len() < 2 {
        return Err(Error::invalid("errors", "at least two points are required"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("errors", format!("error {e} is not positive")));
    }
    if ks.iter().any(|k| !(*k > 0.0)) || ks.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("ks", "step sizes must be positive and strictly decreasing"));
    }
    Ok(())
}

/// Squared-error sums of one `(method, k)` cell, mergeable across studies.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    pub method: Method,
    pub exponent: u32,
    pub count: usize,
    pub sum_final: f64,
    /// Per coarse grid point `t_n`; empty in final-time mode.
    pub sum_grid: Vec<f64>,
}

impl Accumulator {
    pub fn rms(&self, mode: ErrorMode) -> f64 {
        let c = self.count as f64;
        match mode {
            ErrorMode::FinalTime => (self.sum_final / c).sqrt(),
            ErrorMode::MaxOverGrid => (self.sum_grid.iter().fold(0.0f64, |m, &s| m.max(s)) / c).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleError {
    pub sample: u64,
    pub method: Method,
    pub exponent: u32,
    pub k: f64,
    /// Final-time squared error, or the largest squared error over the grid.
    pub sq_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub exponent: u32,
    pub k: f64,
    pub rms_error: f64,
    /// Order against the previous (coarser) row; `None` for the first row
    /// or when an error is zero.
    pub eoc: Option<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSeries {
    pub method: Method,
    pub rows: Vec<StepRow>,
    pub regression_slope: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub series: Vec<MethodSeries>,
    pub accumulators: Vec<Accumulator>,
    pub samples: Vec<SampleError>,
    pub failed_samples: Vec<(u64, String)>,
    pub wall_clock: Duration,
}

impl PartialEq for ConvergenceReport {
    /// Ignores the wall-clock time.
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.series == other.series
            && self.accumulators == other.accumulators
            && self.samples == other.samples
            && self.failed_samples == other.failed_samples
    }
}

impl ConvergenceReport {
    pub fn series_for(&self, method: Method) -> Option<&MethodSeries> {
        self.series.iter().find(|s| s.method == method)
    }

    pub fn rms_error(&self, method: Method, exponent: u32) -> Option<f64> {
        self.series_for(method)?.rows.iter().find(|r| r.exponent == exponent).map(|r| r.rms_error)
    }

    /// `method,k,rms_error,eoc,n_samples,error_mode`, one row per `(method, k)`.
    pub fn errors_csv(&self) -> String {
        let mut out = String::from("method,k,rms_error,eoc,n_samples,error_mode\n");
        for s in &self.series {
            for r in &s.rows {
                let eoc = r.eoc.map(|e| format!("{e:e}")).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{:e},{:e},{},{},{}",
                    s.method.as_str(),
                    r.k,
                    r.rms_error,
                    eoc,
                    r.n_samples,
                    self.config.error_mode.as_str()
                );
            }
        }
        out
    }

    /// `sample,method,k,sq_error` for auditing.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("sample,method,k,sq_error\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{:e},{:e}", s.sample, s.method.as_str(), s.k, s.sq_error);
        }
        out
    }
}

fn run_tag(method: Method, exponent: u32, reference: bool) -> u64 {
    let m = match method {
        Method::Randomized => 1u64,
        Method::Classical => 2u64,
    };
    (u64::from(reference) << 16) | (m << 8) | u64::from(exponent)
}

struct SampleOutcome {
    cells: Vec<(f64, Vec<f64>)>,
}

fn sq_distance<T: Scalar>(
    space: &dyn Discretization<T>,
    a: &GridFunction<T>,
    b: &GridFunction<T>,
) -> Result<f64> {
    let n = space.norm_l2(&a.sub(b)?)?.as_f64();
    Ok(n * n)
}

fn run_sample<T: Scalar>(
    cfg: &StudyConfig,
    space: &dyn Discretization<T>,
    problem: &ProblemSpec<T>,
    cov: &CovarianceSpec<T>,
    sample: u64,
) -> Result<SampleOutcome> {
    let horizon = problem.horizon;
    let ref_steps = 1usize << cfg.ref_exponent;
    let k_ref = horizon / T::of_usize(ref_steps);
    let store = build_store(cov, horizon, k_ref, NoiseKey { master: cfg.master_seed, sample })?;
    let noise = Some(NoiseSource { store: &store, cov });
    let inner = cfg.inner_modes.resolve(cfg.truncation_m);
    let exps = cfg.sorted_exponents();
    let finest = *exps.last().unwrap();
    let grid_mode = cfg.error_mode == ErrorMode::MaxOverGrid;

    let scheme = |method: Method, exponent: u32| -> Result<SchemeConfig<T>> {
        SchemeConfig::dyadic(horizon, exponent, method, cfg.truncation_m)?.with_inner_modes(inner)
    };
    let key = |method, exponent, reference| TrajectoryKey {
        master: cfg.master_seed,
        sample,
        run: run_tag(method, exponent, reference),
    };

    let ref_cfg = scheme(cfg.reference_method, cfg.ref_exponent)?;
    let record = if grid_mode { Record::Every(1 << (cfg.ref_exponent - finest)) } else { Record::FinalOnly };
    let reference: Trajectory<T> =
        Stepper::new(&ref_cfg, space, problem, noise, key(cfg.reference_method, cfg.ref_exponent, true))?
            .run(record)?;
    let ref_at = |n_ref: usize| -> &GridFunction<T> {
        let idx = reference.states.binary_search_by_key(&n_ref, |(n, _)| *n).expect("recorded state");
        &reference.states[idx].1
    };

    let mut cells = Vec::new();
    for &method in &cfg.methods {
        for &exponent in &exps {
            let c = scheme(method, exponent)?;
            let traj = Stepper::new(&c, space, problem, noise, key(method, exponent, false))?
                .run(if grid_mode { Record::All } else { Record::FinalOnly })?;
            let final_sq = sq_distance(space, reference.final_state(), traj.final_state())?;
            let grid = if grid_mode {
                let stride = 1usize << (cfg.ref_exponent - exponent);
                traj.states
                    .iter()
                    .map(|(n, x)| sq_distance(space, ref_at(n * stride), x))
                    .collect::<Result<Vec<f64>>>()?
            } else {
                Vec::new()
            };
            cells.push((final_sq, grid));
        }
    }
    Ok(SampleOutcome { cells })
}

fn is_sample_failure(e: &Error) -> bool {
    matches!(e, Error::Diverged { .. } | Error::NonFinite { .. })
}

/// Runs the study in `f64`.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    run_study_with::<f64>(cfg)
}

/// Runs the study in precision `T`. Samples run in parallel and are merged
/// by sample index, so the result does not depend on the thread count.
pub fn run_study_with<T: Scalar>(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let started = Instant::now();
    let problem = cfg.build_problem::<T>()?;
    let space = build_space::<T>(cfg.space, cfg.resolution)?;
    let cov = CovarianceSpec::<T>::cubic_decay(cfg.truncation_m)?;
    let exps = cfg.sorted_exponents();

    let outcomes: Vec<(u64, Result<SampleOutcome>)> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = cfg.first_sample + i;
            (s, run_sample(cfg, space.as_ref(), &problem, &cov, s))
        })
        .collect();

    let mut accumulators: Vec<Accumulator> = cfg
        .methods
        .iter()
        .flat_map(|&method| {
            exps.iter().map(move |&exponent| Accumulator {
                method,
                exponent,
                count: 0,
                sum_final: 0.0,
                sum_grid: Vec::new(),
            })
        })
        .collect();
    let mut samples = Vec::new();
    let mut failed = Vec::new();
    let horizon = problem.horizon.as_f64();
    for (s, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                for (acc, (final_sq, grid)) in accumulators.iter_mut().zip(o.cells) {
                    acc.count += 1;
                    acc.sum_final += final_sq;
                    if acc.sum_grid.is_empty() {
                        acc.sum_grid = vec![0.0; grid.len()];
                    }
                    for (a, g) in acc.sum_grid.iter_mut().zip(&grid) {
                        *a += g;
                    }
                    let sq_error = match cfg.error_mode {
                        ErrorMode::FinalTime => final_sq,
                        ErrorMode::MaxOverGrid => grid.iter().fold(0.0f64, |m, &g| m.max(g)),
                    };
                    samples.push(SampleError {
                        sample: s,
                        method: acc.method,
                        exponent: acc.exponent,
                        k: horizon / (1u64 << acc.exponent) as f64,
                        sq_error,
                    });
                }
            }
            Err(e) if is_sample_failure(&e) => failed.push((s, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if failed.len() * 10 > cfg.n_samples {
        return Err(Error::TooManyFailures { failed: failed.len(), total: cfg.n_samples });
    }
    let series = summarize(cfg, &accumulators, horizon);
    Ok(ConvergenceReport {
        config: cfg.clone(),
        series,
        accumulators,
        samples,
        failed_samples: failed,
        wall_clock: started.elapsed(),
    })
}

/// Error table and orders from merged accumulators.
pub fn summarize(cfg: &StudyConfig, accumulators: &[Accumulator], horizon: f64) -> Vec<MethodSeries> {
    cfg.methods
        .iter()
        .map(|&method| {
            let mut cells: Vec<&Accumulator> = accumulators.iter().filter(|a| a.method == method).collect();
            cells.sort_by_key(|a| a.exponent);
            let mut rows: Vec<StepRow> = cells
                .iter()
                .map(|a| StepRow {
                    exponent: a.exponent,
                    k: horizon / (1u64 << a.exponent) as f64,
                    rms_error: a.rms(cfg.error_mode),
                    eoc: None,
                    n_samples: a.count,
                })
                .collect();
            for i in 1..rows.len() {
                let errs = [rows[i - 1].rms_error, rows[i].rms_error];
                let ks = [rows[i - 1].k, rows[i].k];
                rows[i].eoc = compute_eoc(&errs, &ks).ok().map(|v| v[0]);
            }
            let errs: Vec<f64> = rows.iter().map(|r| r.rms_error).collect();
            let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
            MethodSeries { method, regression_slope: regression_order(&errs, &ks).ok(), rows }
        })
        .collect()
}

/// Merges studies that differ only in their sample ranges.
pub fn pool(reports: &[ConvergenceReport]) -> Result<ConvergenceReport> {
    let first = reports.first().ok_or_else(|| Error::invalid("reports", "nothing to pool"))?;
    let strip = |c: &StudyConfig| StudyConfig { n_samples: 0, first_sample: 0, ..c.clone() };
    if reports.iter().any(|r| strip(&r.config) != strip(&first.config)) {
        return Err(Error::invalid("reports", "studies differ in more than their sample range"));
    }
    let mut accumulators = first.accumulators.clone();
    let mut samples = first.samples.clone();
    let mut failed = first.failed_samples.clone();
    let mut wall = first.wall_clock;
    for r in &reports[1..] {
        for (a, b) in accumulators.iter_mut().zip(&r.accumulators) {
            a.count += b.count;
            a.sum_final += b.sum_final;
            for (x, y) in a.sum_grid.iter_mut().zip(&b.sum_grid) {
                *x += y;
            }
        }
        samples.extend(r.samples.iter().cloned());
        failed.extend(r.failed_samples.iter().cloned());
        wall += r.wall_clock;
    }
    let mut config = first.config.clone();
    config.n_samples = reports.iter().map(|r| r.config.n_samples).sum();
    config.first_sample = reports.iter().map(|r| r.config.first_sample).min().unwrap_or(0);
    let horizon = config.build_problem::<f64>()?.horizon;
    let series = summarize(&config, &accumulators, horizon);
    Ok(ConvergenceReport { config, series, accumulators, samples, failed_samples: failed, wall_clock: wall })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_examples() {
        let e = compute_eoc(&[0.1688, 0.1023], &[2f64.powi(-5), 2f64.powi(-6)]).unwrap();
        assert!((e[0] - 0.72).abs() < 0.005);
        let e = compute_eoc(&[0.4, 0.2, 0.1], &[0.5, 0.25, 0.125]).unwrap();
        assert_eq!(e, vec![1.0, 1.0]);
        let e = compute_eoc(&[0.3, 0.3], &[0.5, 0.25]).unwrap();
        assert_eq!(e, vec![0.0]);
        assert!(compute_eoc(&[0.3, 0.0], &[0.5, 0.25]).is_err());
        assert!(compute_eoc(&[0.3, -1.0], &[0.5, 0.25]).is_err());
        assert!(compute_eoc(&[0.3, 0.1], &[0.25, 0.5]).is_err());
        assert!(compute_eoc(&[0.3], &[0.25]).is_err());
    }

    #[test]
    fn regression_examples() {
        let ks: Vec<f64> = (4..10).map(|i| 2f64.powi(-i)).collect();
        let errs: Vec<f64> = ks.iter().map(|k| 1.7 * k.powf(0.84)).collect();
        assert!((regression_order(&errs, &ks).unwrap() - 0.84).abs() < 1e-10);
        let two = regression_order(&errs[..2], &ks[..2]).unwrap();
        let eoc = compute_eoc(&errs[..2], &ks[..2]).unwrap()[0];
        assert!((two - eoc).abs() < 1e-12);
        assert!(regression_order(&errs[..1], &ks[..1]).is_err());
    }

    #[test]
    fn zero_errors_leave_orders_undefined() {
        let cfg = StudyConfig {
            methods: vec![Method::Classical],
            step_exponents: vec![2, 3],
            ..Default::default()
        };
        let acc = |e| Accumulator {
            method: Method::Classical,
            exponent: e,
            count: 4,
            sum_final: 0.0,
            sum_grid: vec![],
        };
        let series = summarize(&cfg, &[acc(2), acc(3)], 1.0);
        assert_eq!(series[0].rows[1].rms_error, 0.0);
        assert_eq!(series[0].rows[1].eoc, None);
        assert_eq!(series[0].regression_slope, None);
    }

    #[test]
    fn config_validation() {
        assert!(StudyConfig::default().validate().is_ok());
        let bad = StudyConfig { ref_exponent: 5, step_exponents: vec![6], ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(m)) if m.contains("step_exps")));
        let bad = StudyConfig { n_samples: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = StudyConfig { step_exponents: vec![], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = StudyConfig { inner_modes: InnerModes::Fixed(101), ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = StudyConfig { problem: "nope".into(), ..Default::default() };
        assert!(bad.validate().is_err());
        assert_eq!(InnerModes::Reduced.resolve(1000), 32);
    }
}
