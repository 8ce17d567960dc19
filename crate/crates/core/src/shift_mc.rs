//! Monte Carlo sampling of Gaussian shift trajectories through the gate schedules.
//!
//! Each sample draws an explicit shift vector from the standard initial error matrix,
//! pushes it through the teleportation steps with fresh `p̂` noise, and performs the
//! two rounds of GKP correction with noisy ancillas. The estimate is independent of
//! the symbolic propagation in [`crate::cluster_gates`]: the phase-space updates are
//! written out directly on the sampled coordinates.
//!
//! # Reproducibility
//!
//! Samples are processed in chunks of [`CHUNK_SIZE`]. Chunk `c` draws from a
//! `ChaCha8Rng` seeded with `seed` and switched to stream `c`, and normal deviates come
//! from the ziggurat sampler of `rand_distr::StandardNormal`. Chunk statistics are
//! reduced in chunk order, so the result is bit-identical for any thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster_gates::{Gate, Rail, CORRECTION_STEPS};
use crate::error::{Error, Result};

/// Samples per RNG stream.
pub const CHUNK_SIZE: u64 = 1 << 14;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

/// How a measured shift is turned into a logical-error verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountConvention {
    /// Any correction by a nonzero lattice multiple (the measured shift left
    /// `[−√π/2, √π/2)`) is a logical error. This is the analytic model.
    #[default]
    HalfCell,
    /// Only corrections by an odd multiple of `√π` flip the logical state; even
    /// multiples are stabilizer shifts.
    ExactModular,
}

impl CountConvention {
    pub fn name(self) -> &'static str {
        match self {
            CountConvention::HalfCell => "half_cell",
            CountConvention::ExactModular => "exact_modular",
        }
    }
}

impl std::str::FromStr for CountConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_cell" | "half-cell" => Ok(CountConvention::HalfCell),
            "exact_modular" | "exact-modular" => Ok(CountConvention::ExactModular),
            other => Err(Error::invalid("convention", format!("unknown count convention `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub gate: Gate,
    /// `δ = ε = σ²`.
    pub sigma2: f64,
    pub samples: u64,
    pub seed: u64,
    pub count_convention: CountConvention,
}

impl MCConfig {
    pub fn new(gate: Gate, sigma2: f64, samples: u64) -> Self {
        Self { gate, sigma2, samples, seed: DEFAULT_SEED, count_convention: CountConvention::HalfCell }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_convention(mut self, convention: CountConvention) -> Self {
        self.count_convention = convention;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample"));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::invalid("sigma2", format!("variance must be finite and > 0, got {}", self.sigma2)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFailRate {
    pub step: usize,
    pub rail: Rail,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub samples: u64,
    pub failures: u64,
    pub p_err_hat: f64,
    /// `sqrt(p̂(1 − p̂) / samples)`.
    pub std_err: f64,
    /// Second moments `E[y yᵀ]` of the residual shift after the final correction,
    /// in `(q…, p…)` order. The shift has zero mean by symmetry, so these are the
    /// covariance entries.
    pub empirical_eta: Vec<Vec<f64>>,
    /// Standard error of each entry of `empirical_eta`.
    pub eta_std_err: Vec<Vec<f64>>,
    pub per_step_fail_rates: Vec<StepFailRate>,
}

/// Returns the multiple of `spacing` closest to `x`; exact half-way ties go to the
/// even multiple.
///
/// # Panics
///
/// If `spacing` is not a positive finite number.
pub fn nearest_multiple(x: f64, spacing: f64) -> f64 {
    assert!(spacing.is_finite() && spacing > 0.0, "spacing must be positive, got {spacing}");
    (x / spacing).round_ties_even() * spacing
}

#[derive(Clone)]
struct ChunkStats {
    failures: u64,
    per_correction: Vec<u64>,
    m2: [[f64; 4]; 4],
    m4: [[f64; 4]; 4],
}

impl ChunkStats {
    fn new(corrections: usize) -> Self {
        Self { failures: 0, per_correction: vec![0; corrections], m2: [[0.0; 4]; 4], m4: [[0.0; 4]; 4] }
    }

    fn merge(&mut self, other: &ChunkStats) {
        self.failures += other.failures;
        for (a, b) in self.per_correction.iter_mut().zip(&other.per_correction) {
            *a += b;
        }
        for i in 0..4 {
            for j in 0..4 {
                self.m2[i][j] += other.m2[i][j];
                self.m4[i][j] += other.m4[i][j];
            }
        }
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    sd: f64,
}

impl Sampler {
    fn normal(&mut self, scale: f64) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        z * scale * self.sd
    }
}

/// Corrects the `q` shift on one rail. Returns the lattice multiple `k` that was
/// applied; the residual `q` is the ancilla error alone.
fn correct(q: &mut f64, p: &mut f64, s: &mut Sampler) -> i64 {
    let sqrt_pi = PI.sqrt();
    let ancilla = s.normal(1.0);
    let measured = *q + ancilla;
    // measured − k√π ∈ [−√π/2, √π/2)
    let k = (measured / sqrt_pi + 0.5).floor() as i64;
    *q = -ancilla;
    *p += s.normal(1.0);
    k
}

fn failed(k: i64, convention: CountConvention) -> bool {
    match convention {
        CountConvention::HalfCell => k != 0,
        CountConvention::ExactModular => k.rem_euclid(2) == 1,
    }
}

fn run_chunk(cfg: &MCConfig, schedule: &[i64], chunk: u64, len: u64) -> ChunkStats {
    let modes = cfg.gate.modes();
    let dim = 2 * modes;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chunk);
    let mut s = Sampler { rng, sd: cfg.sigma2.sqrt() };
    let mut stats = ChunkStats::new(modes * CORRECTION_STEPS.len());
    // initial p variance 2δ+ε = 3σ²
    let p0_scale = 3f64.sqrt();

    for _ in 0..len {
        // y = (q₁, [q₂], p₁, [p₂]) stored as q[rail], p[rail]
        let mut q = [0.0f64; 2];
        let mut p = [0.0f64; 2];
        for r in 0..modes {
            q[r] = s.normal(1.0);
            p[r] = s.normal(p0_scale);
        }
        if modes == 2 {
            // C_Z[−1] then p noise on both modes
            let (q1, q2) = (q[0], q[1]);
            p[0] += -q2 + s.normal(1.0);
            p[1] += -q1 + s.normal(1.0);
        }

        let mut any_fail = false;
        let mut corr = 0;
        for (idx, &m) in schedule.iter().enumerate() {
            let step = idx + 1;
            for r in 0..modes {
                // measure p + m q, teleport: (q, p) -> (−m q − p, q) plus ε noise on p
                let (qq, pp) = (q[r], p[r]);
                q[r] = -(m as f64) * qq - pp;
                p[r] = qq + s.normal(1.0);
            }
            if CORRECTION_STEPS.contains(&step) {
                for r in 0..modes {
                    let k = correct(&mut q[r], &mut p[r], &mut s);
                    if failed(k, cfg.count_convention) {
                        stats.per_correction[corr] += 1;
                        any_fail = true;
                    }
                    corr += 1;
                }
            }
        }
        if any_fail {
            stats.failures += 1;
        }

        let mut y = [0.0f64; 4];
        y[..modes].copy_from_slice(&q[..modes]);
        y[modes..dim].copy_from_slice(&p[..modes]);
        for i in 0..dim {
            for j in 0..dim {
                let v = y[i] * y[j];
                stats.m2[i][j] += v;
                stats.m4[i][j] += v * v;
            }
        }
    }
    stats
}

/// Runs the Monte Carlo estimate described by `cfg`.
pub fn simulate(cfg: &MCConfig) -> Result<MCResult> {
    cfg.validate()?;
    let schedule = crate::cluster_gates::GateSchedule::new(cfg.gate).measurement_vector;
    let modes = cfg.gate.modes();
    let dim = 2 * modes;
    let chunks = cfg.samples.div_ceil(CHUNK_SIZE);

    let parts: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(cfg.samples - c * CHUNK_SIZE);
            run_chunk(cfg, &schedule, c, len)
        })
        .collect();
    let mut total = ChunkStats::new(modes * CORRECTION_STEPS.len());
    for part in &parts {
        total.merge(part);
    }

    let n = cfg.samples as f64;
    let p_hat = total.failures as f64 / n;
    let mut eta = vec![vec![0.0; dim]; dim];
    let mut eta_se = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mean = total.m2[i][j] / n;
            let var = (total.m4[i][j] / n - mean * mean).max(0.0);
            eta[i][j] = mean;
            eta_se[i][j] = (var / n).sqrt();
        }
    }

    let rails: Vec<Rail> = match modes {
        1 => vec![Rail::Single],
        _ => vec![Rail::Top, Rail::Bottom],
    };
    let per_step_fail_rates = CORRECTION_STEPS
        .iter()
        .flat_map(|&step| rails.iter().map(move |&rail| (step, rail)))
        .zip(&total.per_correction)
        .map(|((step, rail), &count)| StepFailRate { step, rail, rate: count as f64 / n })
        .collect();

    Ok(MCResult {
        samples: cfg.samples,
        failures: total.failures,
        p_err_hat: p_hat,
        std_err: (p_hat * (1.0 - p_hat) / n).sqrt(),
        empirical_eta: eta,
        eta_std_err: eta_se,
        per_step_fail_rates,
    })
}
