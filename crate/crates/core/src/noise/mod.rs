//! Truncated Q-Wiener noise `W^M(t) = sum_{j<=M} sqrt(mu_j) beta_j(t) e_j`.
//!
//! A [`BrownianStore`] holds the increments of the `M` independent standard
//! Brownian motions `beta_j` on a fixed reference grid of step `k_ref`.
//! Every coarser step size that is a multiple of `k_ref` reads its
//! increments from the same table, which couples runs at different step
//! sizes to one noise path.
//!
//! Raw increments are kept as integers in units of `2^-36`. Sums and
//! differences of stored values are therefore exact, and the telescoping
//! identities between step sizes hold bit for bit. Covariance scaling by
//! `sqrt(mu_j)` is applied when an increment is read.

pub mod diagnostics;

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rng::{Domain, KeyedStreams};
use crate::scalar::Scalar;
use crate::spatial::{Discretization, GridFunction};

/// Size of one lattice unit of the raw increment table.
pub const LATTICE_UNIT: f64 = 1.0 / (1u64 << 36) as f64;

const DUMP_MAGIC: [u8; 4] = *b"RSBS";
const DUMP_VERSION: u32 = 1;

#[inline]
fn to_lattice(x: f64) -> i64 {
    (x / LATTICE_UNIT).round() as i64
}

#[inline]
fn from_lattice(units: i64) -> f64 {
    units as f64 * LATTICE_UNIT
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenvalueLaw {
    /// `mu_j = j^(-exponent)`.
    Power { exponent: f64 },
    /// `mu_j = values[j - 1]`.
    Explicit(Vec<f64>),
}

/// Eigenvalues `mu_j` of the covariance operator `Q`, truncated at `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSpec<T> {
    law: EigenvalueLaw,
    truncation: usize,
    decay_alpha: Option<f64>,
    mu: Vec<f64>,
    sqrt_mu: Vec<T>,
}

impl<T: Scalar> CovarianceSpec<T> {
    pub fn new(law: EigenvalueLaw, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::invalid("truncation_M", "at least one noise mode is required"));
        }
        let mu: Vec<f64> = match &law {
            EigenvalueLaw::Power { exponent } => {
                (1..=truncation).map(|j| (j as f64).powf(-exponent)).collect()
            }
            EigenvalueLaw::Explicit(values) => {
                if values.len() < truncation {
                    return Err(Error::invalid(
                        "eigenvalue_law",
                        format!("{} eigenvalues given for M = {truncation}", values.len()),
                    ));
                }
                values[..truncation].to_vec()
            }
        };
        if let Some(bad) = mu.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::invalid("eigenvalue_law", format!("eigenvalue {bad} is not >= 0")));
        }
        let sqrt_mu = mu.iter().map(|m| T::of(m.sqrt())).collect();
        Ok(Self { law, truncation, decay_alpha: None, mu, sqrt_mu })
    }

    /// `mu_j = j^-3`.
    pub fn cubic_decay(truncation: usize) -> Result<Self> {
        Self::new(EigenvalueLaw::Power { exponent: 3.0 }, truncation)
    }

    pub fn with_decay_alpha(mut self, alpha: f64) -> Self {
        self.decay_alpha = Some(alpha);
        self
    }

    /// Same spectrum multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let values = self.mu.iter().map(|m| m * factor).collect();
        Self::new(EigenvalueLaw::Explicit(values), self.truncation)
    }

    pub fn law(&self) -> &EigenvalueLaw {
        &self.law
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn decay_alpha(&self) -> Option<f64> {
        self.decay_alpha
    }

    /// `mu_j` for `1 <= j <= M`.
    pub fn mu(&self, j: usize) -> f64 {
        self.mu[j - 1]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    pub fn sqrt_mu(&self) -> &[T] {
        &self.sqrt_mu
    }

    /// `sum_{j<=M} mu_j`.
    pub fn trace(&self) -> f64 {
        self.mu.iter().sum()
    }
}

/// Seed material identifying one noise path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseKey {
    pub master: u64,
    pub sample: u64,
}

impl From<u64> for NoiseKey {
    fn from(master: u64) -> Self {
        NoiseKey { master, sample: 0 }
    }
}

/// Per-mode Brownian increments on the reference grid `n k_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianStore {
    ref_step: f64,
    n_ref_steps: usize,
    n_modes: usize,
    key: NoiseKey,
    // mode-major: raw[j * n_ref_steps + n]
    raw: Vec<i64>,
}

/// Fills the increment table from keyed streams: the entry of mode `j` at
/// reference step `n` depends only on `(key, j, n)`.
pub fn build_store<T: Scalar>(
    cov: &CovarianceSpec<T>,
    horizon: T,
    ref_step: T,
    key: impl Into<NoiseKey>,
) -> Result<BrownianStore> {
    let key = key.into();
    let (horizon, ref_step) = (horizon.as_f64(), ref_step.as_f64());
    if !(ref_step > 0.0 && horizon > 0.0) {
        return Err(Error::invalid("k_ref", "horizon and reference step must be positive"));
    }
    let n_ref_steps = integral_ratio(horizon, ref_step).ok_or_else(|| {
        Error::invalid("k_ref", format!("T / k_ref = {} is not an integer", horizon / ref_step))
    })?;
    let n_modes = cov.truncation();
    let streams = KeyedStreams::new(Domain::Brownian, key.master, key.sample, 0);
    let sd = ref_step.sqrt();
    let mut raw = Vec::with_capacity(n_modes * n_ref_steps);
    for j in 0..n_modes {
        let mut reader = streams.reader(j as u64, 0);
        raw.extend((0..n_ref_steps).map(|_| to_lattice(sd * reader.normal())));
    }
    Ok(BrownianStore { ref_step, n_ref_steps, n_modes, key, raw })
}

/// Returns `Some(n)` when `a / b` is within rounding of the integer `n`.
pub(crate) fn integral_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() <= 1e-9 * r.abs().max(1.0) && n >= 0.0).then_some(n as usize)
}

impl BrownianStore {
    pub fn ref_step(&self) -> f64 {
        self.ref_step
    }

    pub fn n_ref_steps(&self) -> usize {
        self.n_ref_steps
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn horizon(&self) -> f64 {
        self.ref_step * self.n_ref_steps as f64
    }

    pub fn key(&self) -> NoiseKey {
        self.key
    }

    /// Stored raw entry of mode `j` (1-based) at reference step `n` (0-based), in lattice units.
    pub fn raw_entry(&self, j: usize, n: usize) -> i64 {
        self.raw[(j - 1) * self.n_ref_steps + n]
    }

    /// Same entry as a real number, an unscaled `N(0, k_ref)` draw.
    pub fn entry(&self, j: usize, n: usize) -> f64 {
        from_lattice(self.raw_entry(j, n))
    }

    /// Index of `t` on the reference grid.
    pub fn grid_index(&self, t: f64) -> Result<usize> {
        integral_ratio(t, self.ref_step).ok_or(Error::OffGrid { time: t, ref_step: self.ref_step })
    }

    /// Raw increments of all modes over reference steps `[start, start + len)`,
    /// summed left to right.
    pub fn raw_sum(&self, start: usize, len: usize) -> Result<Vec<i64>> {
        if start + len > self.n_ref_steps {
            return Err(Error::NoiseExhausted {
                start: start as f64 * self.ref_step,
                end: (start + len) as f64 * self.ref_step,
                horizon: self.horizon(),
            });
        }
        Ok((0..self.n_modes)
            .map(|j| {
                let row = &self.raw[j * self.n_ref_steps..(j + 1) * self.n_ref_steps];
                row[start..start + len].iter().sum()
            })
            .collect())
    }

    /// Binary dump: a 16-byte header (magic, version, M, steps as u32 LE),
    /// then `k_ref` as f64, the key words, and the raw table as i64 LE.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut header = [0u8; 16];
        header[..4].copy_from_slice(&DUMP_MAGIC);
        header[4..8].copy_from_slice(&DUMP_VERSION.to_le_bytes());
        header[8..12].copy_from_slice(&u32_len(self.n_modes)?.to_le_bytes());
        header[12..16].copy_from_slice(&u32_len(self.n_ref_steps)?.to_le_bytes());
        w.write_all(&header)?;
        w.write_all(&self.ref_step.to_le_bytes())?;
        w.write_all(&self.key.master.to_le_bytes())?;
        w.write_all(&self.key.sample.to_le_bytes())?;
        let mut body = Vec::with_capacity(8 * self.raw.len());
        for v in &self.raw {
            body.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&body)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[..4] != DUMP_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        if word(4) != DUMP_VERSION {
            return Err(Error::Format(format!("unsupported version {}", word(4))));
        }
        let n_modes = word(8) as usize;
        let n_ref_steps = word(12) as usize;
        let mut eight = [0u8; 8];
        r.read_exact(&mut eight)?;
        let ref_step = f64::from_le_bytes(eight);
        r.read_exact(&mut eight)?;
        let master = u64::from_le_bytes(eight);
        r.read_exact(&mut eight)?;
        let sample = u64::from_le_bytes(eight);
        let mut body = vec![0u8; 8 * n_modes * n_ref_steps];
        r.read_exact(&mut body)?;
        let raw = body.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().unwrap())).collect();
        if !(ref_step > 0.0) || n_modes == 0 {
            return Err(Error::Format("invalid header values".into()));
        }
        Ok(Self { ref_step, n_ref_steps, n_modes, key: NoiseKey { master, sample }, raw })
    }
}

fn u32_len(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("dimension {n} exceeds u32")))
}

/// Increment of `W^M` over `[start, start + length]`, one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerIncrement<T> {
    raw: Vec<i64>,
    values: Vec<T>,
    start: f64,
    length: f64,
}

impl<T: Scalar> WienerIncrement<T> {
    fn from_raw(raw: Vec<i64>, cov: &CovarianceSpec<T>, start: f64, length: f64) -> Self {
        let values = raw.iter().zip(cov.sqrt_mu()).map(|(&r, &s)| s * T::of(from_lattice(r))).collect();
        Self { raw, values, start, length }
    }

    /// Scaled increments `sqrt(mu_j) (beta_j(t + kappa) - beta_j(t))`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Unscaled increments in lattice units of [`LATTICE_UNIT`].
    pub fn raw(&self) -> &[i64] {
        &self.raw
    }

    pub fn n_modes(&self) -> usize {
        self.raw.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.start, self.start + self.length)
    }

    /// `self - part`, the increment over the remainder of the interval.
    pub fn complement(&self, part: &Self, cov: &CovarianceSpec<T>) -> Self {
        let raw = self.raw.iter().zip(&part.raw).map(|(&a, &b)| a - b).collect();
        let (_, end) = part.interval();
        Self::from_raw(raw, cov, end, self.start + self.length - end)
    }

    /// Brownian bridge sample of the increment over `[start, start + tau length]`,
    /// conditioned on `self`.
    ///
    /// The raw partial increment of mode `j` is
    /// `tau dB_j + sqrt(tau (1 - tau) length) Z_j` with `Z_j` read from draw `j`
    /// of `key`. Only the first `modes` modes are sampled; the rest are zero.
    pub fn bridge(&self, cov: &CovarianceSpec<T>, tau: f64, key: &BridgeKey, modes: usize) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::invalid("tau", format!("bridge fraction must lie in (0, 1), got {tau}")));
        }
        if modes > self.n_modes() {
            return Err(Error::invalid(
                "inner_modes",
                format!("{modes} modes requested from an increment with {}", self.n_modes()),
            ));
        }
        let spread = (tau * (1.0 - tau) * self.length).sqrt();
        let mut reader = key.streams.reader(key.stream, 0);
        let mut raw = vec![0i64; self.n_modes()];
        for (out, &full) in raw.iter_mut().zip(&self.raw).take(modes) {
            let z = reader.normal();
            *out = to_lattice(tau * from_lattice(full) + spread * z);
        }
        Ok(Self::from_raw(raw, cov, self.start, tau * self.length))
    }
}

/// Identifies the standard normals used by one bridge sample.
#[derive(Debug, Clone)]
pub struct BridgeKey {
    streams: KeyedStreams,
    stream: u64,
}

impl BridgeKey {
    /// `run` names the trajectory (sample and step size), `step` the time step.
    pub fn new(master: u64, sample: u64, run: u64, step: u64) -> Self {
        Self { streams: KeyedStreams::new(Domain::Bridge, master, sample, run), stream: step }
    }
}

/// `Delta_k W^M(t_start)` summed from the reference increments.
pub fn full_step_increment<T: Scalar>(
    store: &BrownianStore,
    cov: &CovarianceSpec<T>,
    t_start: T,
    k: T,
) -> Result<WienerIncrement<T>> {
    let start = store.grid_index(t_start.as_f64())?;
    let len = store.grid_index(k.as_f64())?;
    full_step_increment_at(store, cov, start, len)
}

/// Index form of [`full_step_increment`]: reference steps `[start, start + len)`.
pub fn full_step_increment_at<T: Scalar>(
    store: &BrownianStore,
    cov: &CovarianceSpec<T>,
    start: usize,
    len: usize,
) -> Result<WienerIncrement<T>> {
    check_cov(store, cov)?;
    let raw = store.raw_sum(start, len)?;
    let h = store.ref_step();
    Ok(WienerIncrement::from_raw(raw, cov, start as f64 * h, len as f64 * h))
}

/// `W^M(t_start + tau k) - W^M(t_start)` conditioned on the stored full step.
pub fn bridge_increment<T: Scalar>(
    store: &BrownianStore,
    cov: &CovarianceSpec<T>,
    t_start: T,
    k: T,
    tau: T,
    key: &BridgeKey,
) -> Result<WienerIncrement<T>> {
    let full = full_step_increment(store, cov, t_start, k)?;
    full.bridge(cov, tau.as_f64(), key, full.n_modes())
}

/// Evaluates an increment as an element of `V_h`, keeping the first
/// `inner_modes` modes when given.
pub fn increment_to_gridfunction<T: Scalar, D: Discretization<T> + ?Sized>(
    inc: &WienerIncrement<T>,
    space: &D,
    inner_modes: Option<usize>,
) -> Result<GridFunction<T>> {
    let m = inner_modes.unwrap_or(inc.n_modes());
    if m > inc.n_modes() {
        return Err(Error::invalid(
            "inner_modes",
            format!("{m} exceeds the truncation level {}", inc.n_modes()),
        ));
    }
    Ok(space.modal_to_grid(&inc.values()[..m]))
}

fn check_cov<T: Scalar>(store: &BrownianStore, cov: &CovarianceSpec<T>) -> Result<()> {
    if cov.truncation() != store.n_modes() {
        return Err(Error::invalid(
            "truncation_M",
            format!("covariance has {} modes, store has {}", cov.truncation(), store.n_modes()),
        ));
    }
    Ok(())
}
