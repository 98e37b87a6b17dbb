//! Command-line front end.
//!
//! Settings are layered as defaults, then the config file, then the
//! `RANDSEE_SEED` environment variable, then command-line flags. Config files
//! hold one `key = value` pair per line; `#` starts a comment.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{
    build_space, run_study, ConvergenceReport, ErrorMode, InnerModes, SigmaChoice, StudyConfig,
};
use crate::noise::{build_store, diagnostics, CovarianceSpec, NoiseKey};
use crate::problem::BUILTIN_PROBLEMS;
use crate::scheme::{Method, NoiseSource, Record, SchemeConfig, Stepper, TrajectoryKey};
use crate::spatial::SpaceKind;

pub const SEED_ENV: &str = "RANDSEE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "randsee",
    version,
    about = "Randomized Galerkin schemes for semilinear stochastic heat equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo strong-error study over several step sizes.
    Study(StudyArgs),
    /// Single trajectory; writes the final state and the norm history.
    Solve(SolveArgs),
    /// Statistical self-test of the noise generator.
    ValidateNoise(NoiseArgs),
    /// Names of the built-in problems.
    ListProblems,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StudyFlags {
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// `randomized`, `classical`, or a comma-separated list.
    #[arg(long)]
    pub method: Option<String>,
    /// `spectral` or `fem`.
    #[arg(long)]
    pub space: Option<String>,
    /// Number of sine modes for the spectral space.
    #[arg(long)]
    pub modes: Option<String>,
    /// Interior nodes for the finite element space.
    #[arg(long)]
    pub ndof: Option<String>,
    /// Noise truncation `M`.
    #[arg(long = "M")]
    pub truncation: Option<String>,
    /// `full`, `sqrt`, or a mode count for the first stage.
    #[arg(long = "inner-modes")]
    pub inner_modes: Option<String>,
    /// Reference step `2^-i`.
    #[arg(long = "kref-exp")]
    pub kref_exp: Option<String>,
    /// Coarse steps as a comma-separated exponent list.
    #[arg(long = "step-exps")]
    pub step_exps: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// `final_time` or `max_over_grid`.
    #[arg(long = "error-mode")]
    pub error_mode: Option<String>,
}

impl StudyFlags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 12] = [
            ("problem", &self.problem),
            ("method", &self.method),
            ("space", &self.space),
            ("modes", &self.modes),
            ("ndof", &self.ndof),
            ("M", &self.truncation),
            ("inner_modes", &self.inner_modes),
            ("kref_exp", &self.kref_exp),
            ("step_exps", &self.step_exps),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("error_mode", &self.error_mode),
        ];
        fields.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub flags: StudyFlags,
    /// Output directory for `errors.csv`, `samples.csv` and `config.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub flags: StudyFlags,
    /// Step size `2^-i`; defaults to the reference step.
    #[arg(long = "exp")]
    pub exponent: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub sample: u64,
    /// Output directory for `solution.csv` and `trajectory.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

/// Every key accepted in config files.
pub const CONFIG_KEYS: [&str; 18] = [
    "problem",
    "method",
    "reference_method",
    "space",
    "modes",
    "ndof",
    "M",
    "inner_modes",
    "kref_exp",
    "step_exps",
    "samples",
    "first_sample",
    "seed",
    "error_mode",
    "sigma",
    "weierstrass_a",
    "weierstrass_b",
    "weierstrass_terms",
];

#[derive(Debug, Clone)]
struct Settings {
    cfg: StudyConfig,
    modes: usize,
    ndof: usize,
    weierstrass: [Option<String>; 3],
}

impl Settings {
    fn new() -> Self {
        let cfg = StudyConfig::default();
        Self { modes: cfg.resolution, ndof: 100, cfg, weierstrass: [None, None, None] }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let c = &mut self.cfg;
        match key {
            "problem" => {
                if !BUILTIN_PROBLEMS.contains(&value) {
                    return Err(bad(key, value, &format!("one of {}", BUILTIN_PROBLEMS.join(", "))));
                }
                c.problem = value.to_string();
            }
            "method" => c.methods = parse_methods(key, value)?,
            "reference_method" => {
                c.reference_method =
                    Method::parse(value).ok_or_else(|| bad(key, value, "randomized or classical"))?
            }
            "space" => {
                c.space = match value {
                    "spectral" => SpaceKind::Spectral,
                    "fem" => SpaceKind::Fem,
                    _ => return Err(bad(key, value, "spectral or fem")),
                }
            }
            "modes" => self.modes = parse_num(key, value)?,
            "ndof" => self.ndof = parse_num(key, value)?,
            "M" => c.truncation_m = parse_num(key, value)?,
            "inner_modes" => {
                c.inner_modes = match value {
                    "full" => InnerModes::Full,
                    "sqrt" => InnerModes::Reduced,
                    _ => InnerModes::Fixed(parse_num(key, value)?),
                }
            }
            "kref_exp" => c.ref_exponent = parse_num(key, value)?,
            "step_exps" => {
                c.step_exponents =
                    value.split(',').map(|s| parse_num(key, s.trim())).collect::<Result<Vec<u32>>>()?
            }
            "samples" => c.n_samples = parse_num(key, value)?,
            "first_sample" => c.first_sample = parse_num(key, value)?,
            "seed" => c.master_seed = parse_num(key, value)?,
            "error_mode" => {
                c.error_mode =
                    ErrorMode::parse(value).ok_or_else(|| bad(key, value, "final_time or max_over_grid"))?
            }
            "sigma" => {
                c.sigma =
                    Some(SigmaChoice::parse(value).ok_or_else(|| bad(key, value, "zero, sigma1 or sigma2"))?)
            }
            "weierstrass_a" => {
                parse_num::<f64>(key, value)?;
                self.weierstrass[0] = Some(value.to_string());
            }
            "weierstrass_b" => {
                parse_num::<u64>(key, value)?;
                self.weierstrass[1] = Some(value.to_string());
            }
            "weierstrass_terms" => {
                parse_num::<u32>(key, value)?;
                self.weierstrass[2] = Some(value.to_string());
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<StudyConfig> {
        let cfg = self.assemble()?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn assemble(mut self) -> Result<StudyConfig> {
        self.cfg.resolution = match self.cfg.space {
            SpaceKind::Spectral => self.modes,
            SpaceKind::Fem => self.ndof,
        };
        if self.weierstrass.iter().any(Option::is_some) {
            let d = crate::problem::WeierstrassParams::default();
            let [a, b, j] = &self.weierstrass;
            self.cfg.weierstrass = Some((
                a.as_deref().map_or(Ok(d.a()), |v| parse_num("weierstrass_a", v))?,
                b.as_deref().map_or(Ok(d.b()), |v| parse_num("weierstrass_b", v))?,
                j.as_deref().map_or(Ok(d.terms()), |v| parse_num("weierstrass_terms", v))?,
            ));
        }
        Ok(self.cfg)
    }
}

fn bad(key: &str, value: &str, expected: &str) -> Error {
    Error::Config(format!("`{key}`: cannot parse `{value}`, expected {expected}"))
}

fn parse_num<N: std::str::FromStr>(key: &str, value: &str) -> Result<N> {
    value.parse().map_err(|_| bad(key, value, "a number"))
}

fn parse_methods(key: &str, value: &str) -> Result<Vec<Method>> {
    if value == "both" || value == "all" {
        return Ok(vec![Method::Classical, Method::Randomized]);
    }
    let mut out = Vec::new();
    for part in value.split(',') {
        let m = Method::parse(part.trim()).ok_or_else(|| bad(key, part, "randomized or classical"))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Splits config text into `(line, key, value)` triples.
pub fn parse_config_text(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Merges defaults, config text, the seed override and flags, then validates.
pub fn parse_config(
    flags: &StudyFlags,
    file_text: Option<&str>,
    env_seed: Option<&str>,
) -> Result<StudyConfig> {
    merge(flags, file_text, env_seed)?.finish()
}

fn merge(flags: &StudyFlags, file_text: Option<&str>, env_seed: Option<&str>) -> Result<Settings> {
    let mut s = Settings::new();
    if let Some(text) = file_text {
        for (line, k, v) in parse_config_text(text)? {
            s.set(&k, &v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {line}: {m}")),
                e => e,
            })?;
        }
    }
    if let Some(seed) = env_seed {
        s.set("seed", seed).map_err(|_| bad(SEED_ENV, seed, "an unsigned integer"))?;
    }
    for (k, v) in flags.pairs() {
        s.set(k, v)?;
    }
    Ok(s)
}

/// Config text that [`parse_config`] maps back to `cfg`.
pub fn format_config(cfg: &StudyConfig) -> String {
    let mut out = String::new();
    let join = |v: Vec<String>| v.join(",");
    let _ = writeln!(out, "problem = {}", cfg.problem);
    let _ = writeln!(out, "method = {}", join(cfg.methods.iter().map(|m| m.as_str().to_string()).collect()));
    let _ = writeln!(out, "reference_method = {}", cfg.reference_method.as_str());
    let _ = writeln!(out, "space = {}", cfg.space.as_str());
    let res_key = if cfg.space == SpaceKind::Fem { "ndof" } else { "modes" };
    let _ = writeln!(out, "{res_key} = {}", cfg.resolution);
    let _ = writeln!(out, "M = {}", cfg.truncation_m);
    let inner = match cfg.inner_modes {
        InnerModes::Full => "full".to_string(),
        InnerModes::Reduced => "sqrt".to_string(),
        InnerModes::Fixed(m) => m.to_string(),
    };
    let _ = writeln!(out, "inner_modes = {inner}");
    let _ = writeln!(out, "kref_exp = {}", cfg.ref_exponent);
    let _ = writeln!(out, "step_exps = {}", join(cfg.step_exponents.iter().map(u32::to_string).collect()));
    let _ = writeln!(out, "samples = {}", cfg.n_samples);
    let _ = writeln!(out, "first_sample = {}", cfg.first_sample);
    let _ = writeln!(out, "seed = {}", cfg.master_seed);
    let _ = writeln!(out, "error_mode = {}", cfg.error_mode.as_str());
    if let Some(s) = cfg.sigma {
        let _ = writeln!(out, "sigma = {}", s.as_str());
    }
    if let Some((a, b, j)) = cfg.weierstrass {
        let _ = writeln!(out, "weierstrass_a = {a:?}");
        let _ = writeln!(out, "weierstrass_b = {b}");
        let _ = writeln!(out, "weierstrass_terms = {j}");
    }
    out
}

/// Fixed-width error table with one order footer per method.
pub fn format_table(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>12} {:>12} {:>8}", "method", "k", "error", "EOC");
    for s in &report.series {
        for r in &s.rows {
            let eoc = r.eoc.map_or_else(|| "-".to_string(), |e| format!("{e:.2}"));
            let _ =
                writeln!(out, "{:<12} {:>12.6} {:>12.4e} {:>8}", s.method.as_str(), r.k, r.rms_error, eoc);
        }
    }
    for s in &report.series {
        let slope = s.regression_slope.map_or_else(|| "undefined".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(out, "order({}) = {slope}", s.method.as_str());
    }
    out
}

/// Writes `errors.csv`, `samples.csv` and `config.txt` into `out` when
/// given, and prints the table.
pub fn emit_report(report: &ConvergenceReport, out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("errors.csv"), report.errors_csv())?;
        fs::write(dir.join("samples.csv"), report.samples_csv())?;
        fs::write(dir.join("config.txt"), format_config(&report.config))?;
    }
    print!("{}", format_table(report));
    if !report.failed_samples.is_empty() {
        println!("failed samples: {}", report.failed_samples.len());
    }
    println!("wall clock: {:.2}s", report.wall_clock.as_secs_f64());
    Ok(())
}

fn load_settings(flags: &StudyFlags) -> Result<Settings> {
    let text = match &flags.config {
        Some(p) => Some(
            fs::read_to_string(p).map_err(|e| Error::Config(format!("`config`: {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let env = std::env::var(SEED_ENV).ok();
    merge(flags, text.as_deref(), env.as_deref())
}

fn load_config(flags: &StudyFlags) -> Result<StudyConfig> {
    load_settings(flags)?.finish()
}

fn solve(args: &SolveArgs) -> std::result::Result<(), (i32, Error)> {
    let usage = |e| (EXIT_USAGE, e);
    let runtime = |e| (EXIT_RUNTIME, e);
    let cfg = load_settings(&args.flags).and_then(Settings::assemble).map_err(usage)?;
    cfg.validate_model().map_err(usage)?;
    let exponent = args.exponent.unwrap_or(cfg.ref_exponent);
    if exponent > cfg.ref_exponent {
        return Err(usage(Error::Config(format!(
            "`exp`: step 2^-{exponent} is finer than the noise grid 2^-{}",
            cfg.ref_exponent
        ))));
    }
    let method = cfg.methods[0];
    let problem = cfg.build_problem::<f64>().map_err(usage)?;
    for w in problem.warnings() {
        eprintln!("warning: {w}");
    }
    let space = build_space::<f64>(cfg.space, cfg.resolution).map_err(usage)?;
    let cov = CovarianceSpec::<f64>::cubic_decay(cfg.truncation_m).map_err(usage)?;
    let k_ref = problem.horizon / (1u64 << cfg.ref_exponent) as f64;
    let store =
        build_store(&cov, problem.horizon, k_ref, NoiseKey { master: cfg.master_seed, sample: args.sample })
            .map_err(runtime)?;
    let scheme = SchemeConfig::dyadic(problem.horizon, exponent, method, cfg.truncation_m)
        .and_then(|c| c.with_inner_modes(cfg.inner_modes.resolve(cfg.truncation_m)))
        .map_err(usage)?;
    let key = TrajectoryKey { master: cfg.master_seed, sample: args.sample, run: u64::from(exponent) };
    let traj =
        Stepper::new(&scheme, space.as_ref(), &problem, Some(NoiseSource { store: &store, cov: &cov }), key)
            .and_then(|s| s.run(Record::All))
            .map_err(runtime)?;
    let k = scheme.step_k();
    let mut history = String::from("t,l2_norm\n");
    for (n, x) in &traj.states {
        let norm = space.norm_l2(x).map_err(runtime)?;
        let _ = writeln!(history, "{:e},{:e}", *n as f64 * k, norm);
    }
    let mut solution = String::from("index,value\n");
    for (i, v) in traj.final_state().coeffs().iter().enumerate() {
        let _ = writeln!(solution, "{i},{v:e}");
    }
    if let Some(dir) = &args.out {
        let io = |e: std::io::Error| runtime(e.into());
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("trajectory.csv"), &history).map_err(io)?;
        fs::write(dir.join("solution.csv"), &solution).map_err(io)?;
        fs::write(dir.join("config.txt"), format_config(&cfg)).map_err(io)?;
    }
    let final_norm = space.norm_l2(traj.final_state()).map_err(runtime)?;
    println!(
        "{} {} dim={} k={k} steps={} |X(T)| = {final_norm:.6e}",
        method.as_str(),
        cfg.space,
        space.dim(),
        scheme.n_steps()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::ListProblems => {
            for p in BUILTIN_PROBLEMS {
                println!("{p}");
            }
            Ok(())
        }
        Command::ValidateNoise(a) => match diagnostics::run_checks(a.draws, a.modes, a.seed) {
            Ok(checks) => {
                let mut all = true;
                for c in &checks {
                    all &= c.passed();
                    println!(
                        "{} {:<36} observed {:>12.5e} expected {:>12.5e} tol {:>10.3e}",
                        if c.passed() { "PASS" } else { "FAIL" },
                        c.name,
                        c.observed,
                        c.expected,
                        c.tolerance
                    );
                }
                if all {
                    Ok(())
                } else {
                    Err((EXIT_RUNTIME, Error::Format("noise checks failed".into())))
                }
            }
            Err(e @ Error::InvalidParameter { .. }) => Err((EXIT_USAGE, e)),
            Err(e) => Err((EXIT_RUNTIME, e)),
        },
        Command::Study(a) => match load_config(&a.flags) {
            Err(e) => Err((EXIT_USAGE, e)),
            Ok(cfg) => {
                if let Ok(p) = cfg.build_problem::<f64>() {
                    for w in p.warnings() {
                        eprintln!("warning: {w}");
                    }
                }
                run_study(&cfg)
                    .and_then(|r| {
                        for (s, why) in &r.failed_samples {
                            eprintln!("sample {s} failed: {why}");
                        }
                        emit_report(&r, a.out.as_deref())
                    })
                    .map_err(|e| (EXIT_RUNTIME, e))
            }
        },
        Command::Solve(a) => solve(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err((code, e)) => {
            eprintln!("error: {e}");
            code
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> StudyFlags {
        StudyFlags::default()
    }

    #[test]
    fn defaults_with_problem_only() {
        let f = StudyFlags { problem: Some("weierstrass-sigma1".into()), ..flags() };
        let c = parse_config(&f, None, None).unwrap();
        assert_eq!(c.space, SpaceKind::Spectral);
        assert_eq!(c.resolution, 100);
        assert_eq!(c.truncation_m, 100);
        assert_eq!(c.ref_exponent, 10);
        assert_eq!(c.step_exponents, vec![3, 4, 5, 6, 7]);
        assert_eq!(c.n_samples, 20);
    }

    #[test]
    fn step_list_and_invariant() {
        let f = StudyFlags { step_exps: Some("4,5,6".into()), ..flags() };
        assert_eq!(parse_config(&f, None, None).unwrap().step_exponents, vec![4, 5, 6]);
        let f = StudyFlags { kref_exp: Some("5".into()), step_exps: Some("6".into()), ..flags() };
        let e = parse_config(&f, None, None).unwrap_err().to_string();
        assert!(e.contains("step_exps"), "{e}");
    }

    #[test]
    fn layering_and_errors_name_keys() {
        let file = "# study\nsamples = 7\nspace = fem\nndof = 31 # mesh\nseed = 5\n";
        let c = parse_config(&flags(), Some(file), None).unwrap();
        assert_eq!((c.n_samples, c.space, c.resolution, c.master_seed), (7, SpaceKind::Fem, 31, 5));
        let c = parse_config(&flags(), Some(file), Some("9")).unwrap();
        assert_eq!(c.master_seed, 9);
        let f = StudyFlags { seed: Some("11".into()), samples: Some("3".into()), ..flags() };
        let c = parse_config(&f, Some(file), Some("9")).unwrap();
        assert_eq!((c.master_seed, c.n_samples), (11, 3));

        let e = parse_config(&flags(), Some("colour = red\n"), None).unwrap_err().to_string();
        assert!(e.contains("colour") && e.contains("line 1"), "{e}");
        let e = parse_config(&flags(), Some("samples = many\n"), None).unwrap_err().to_string();
        assert!(e.contains("samples"), "{e}");
        let e = parse_config(&flags(), Some("samples\n"), None).unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let e = parse_config(&flags(), None, Some("x")).unwrap_err().to_string();
        assert!(e.contains(SEED_ENV), "{e}");
    }

    #[test]
    fn config_round_trip() {
        let f = StudyFlags {
            method: Some("randomized".into()),
            space: Some("fem".into()),
            ndof: Some("50".into()),
            inner_modes: Some("sqrt".into()),
            error_mode: Some("max_over_grid".into()),
            ..flags()
        };
        let file = "weierstrass_a = 0.8\nsigma = sigma2\nreference_method = classical\nfirst_sample = 40\n";
        let c = parse_config(&f, Some(file), None).unwrap();
        assert_eq!(c.weierstrass, Some((0.8, 7, 5)));
        let again = parse_config(&flags(), Some(&format_config(&c)), None).unwrap();
        assert_eq!(again, c);
        let d = StudyConfig::default();
        assert_eq!(parse_config(&flags(), Some(&format_config(&d)), None).unwrap(), d);
    }

    #[test]
    fn every_documented_key_is_accepted() {
        for k in CONFIG_KEYS {
            let mut s = Settings::new();
            let e = s.set(k, "?").unwrap_err().to_string();
            assert!(!e.contains("unknown key"), "{k}: {e}");
        }
    }
}
