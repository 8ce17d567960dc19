//! Measurement schedules for the single-mode and two-rail clusters.
//!
//! A single-mode Gaussian gate is four teleportation steps, each measuring
//! `p̂ + m q̂` on one node, with GKP error correction after steps 3 and 4. The
//! two-rail controlled-Z first applies the noisy `C_Z[−1]` from the vertical link
//! and then runs four all-`p̂` steps on both rails.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_core::{correct_map, cz_inject, single_mode_step, two_mode_step, NoiseForm, SymbolicCovariance};

/// Steps after which an encoded ancilla performs GKP correction.
pub const CORRECTION_STEPS: [usize; 2] = [3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gate {
    I,
    P,
    F,
    CZ,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::I, Gate::P, Gate::F, Gate::CZ];

    pub fn modes(self) -> usize {
        match self {
            Gate::CZ => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::I => "i",
            Gate::P => "p",
            Gate::F => "f",
            Gate::CZ => "cz",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "identity" => Ok(Gate::I),
            "p" | "phase" => Ok(Gate::P),
            "f" | "fourier" => Ok(Gate::F),
            "cz" => Ok(Gate::CZ),
            other => Err(Error::invalid("gate", format!("unknown gate `{other}` (expected i, p, f or cz)"))),
        }
    }
}

/// A gate together with the measurement pattern that implements it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSchedule {
    pub gate: Gate,
    /// Shear parameters `m_j` of the measured quadratures `p̂ + m_j q̂`.
    pub measurement_vector: Vec<i64>,
    pub correction_steps: [usize; 2],
}

impl GateSchedule {
    pub fn new(gate: Gate) -> Self {
        let measurement_vector = match gate {
            Gate::I => vec![0, 0, 0, 0],
            Gate::F => vec![1, 1, 1, 0],
            Gate::P => vec![1, 0, 0, 0],
            Gate::CZ => vec![0, 0, 0, 0],
        };
        Self { gate, measurement_vector, correction_steps: CORRECTION_STEPS }
    }

    fn validate(&self) -> Result<()> {
        if self.measurement_vector.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "four measurements",
                found: self.measurement_vector.len(),
            });
        }
        if self.gate == Gate::CZ && self.measurement_vector.iter().any(|&m| m != 0) {
            return Err(Error::invalid("measurement_vector", "the two-rail cluster is driven by p measurements only"));
        }
        Ok(())
    }
}

impl From<Gate> for GateSchedule {
    fn from(gate: Gate) -> Self {
        GateSchedule::new(gate)
    }
}

/// Row label within a propagation trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepLabel {
    Initial,
    AfterCz,
    Step(usize),
    Corrected(usize),
}

impl StepLabel {
    /// ASCII label (`eta0`, `eta0'`, `eta3`, `eta3c`).
    pub fn ascii(&self) -> String {
        match self {
            StepLabel::Initial => "eta0".into(),
            StepLabel::AfterCz => "eta0'".into(),
            StepLabel::Step(j) => format!("eta{j}"),
            StepLabel::Corrected(j) => format!("eta{j}c"),
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SUB: [&str; 5] = ["₀", "₁", "₂", "₃", "₄"];
        match self {
            StepLabel::Initial => f.write_str("η₀"),
            StepLabel::AfterCz => f.write_str("η₀′"),
            StepLabel::Step(j) => write!(f, "η{}", SUB.get(*j).copied().unwrap_or("?")),
            StepLabel::Corrected(j) => write!(f, "η{},c", SUB.get(*j).copied().unwrap_or("?")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rail {
    Single,
    Top,
    Bottom,
}

impl Rail {
    pub fn name(self) -> &'static str {
        match self {
            Rail::Single => "single",
            Rail::Top => "top",
            Rail::Bottom => "bottom",
        }
    }

    fn for_mode(modes: usize, k: usize) -> Rail {
        match (modes, k) {
            (1, _) => Rail::Single,
            (_, 0) => Rail::Top,
            _ => Rail::Bottom,
        }
    }
}

/// Total variance `η_{j,qq} + δ` seen by the correction on one rail at step `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ErrVar {
    pub step: usize,
    pub rail: Rail,
    pub variance: NoiseForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationTrace {
    pub gate: Gate,
    pub rows: Vec<(StepLabel, SymbolicCovariance)>,
    pub err_vars: Vec<ErrVar>,
}

impl PropagationTrace {
    pub fn row(&self, label: StepLabel) -> Option<&SymbolicCovariance> {
        self.rows.iter().find(|(l, _)| *l == label).map(|(_, m)| m)
    }

    pub fn initial(&self) -> &SymbolicCovariance {
        &self.rows[0].1
    }

    pub fn last(&self) -> &SymbolicCovariance {
        &self.rows[self.rows.len() - 1].1
    }
}

/// The error matrix every gate starts (and, after correction, ends) with:
/// `diag(δ, 2δ+ε)` per mode.
pub fn standard_eta0(gate: Gate) -> SymbolicCovariance {
    let q = NoiseForm::new(1, 0);
    let p = NoiseForm::new(2, 1);
    match gate.modes() {
        1 => SymbolicCovariance::diagonal(&[q, p]),
        _ => SymbolicCovariance::diagonal(&[q, q, p, p]),
    }
}

/// Propagates the standard initial error matrix through the gate's schedule.
pub fn propagate(schedule: &GateSchedule) -> Result<PropagationTrace> {
    propagate_from(schedule, standard_eta0(schedule.gate))
}

/// Propagates an arbitrary initial error matrix through the gate's schedule.
pub fn propagate_from(schedule: &GateSchedule, eta0: SymbolicCovariance) -> Result<PropagationTrace> {
    schedule.validate()?;
    let modes = schedule.gate.modes();
    if eta0.dim() != 2 * modes {
        return Err(Error::DimensionMismatch {
            expected: "error matrix matching the gate's mode count",
            found: eta0.dim(),
        });
    }

    let mut rows = vec![(StepLabel::Initial, eta0.clone())];
    let mut err_vars = Vec::new();
    let mut eta = eta0;
    if schedule.gate == Gate::CZ {
        eta = cz_inject(&eta)?;
        rows.push((StepLabel::AfterCz, eta.clone()));
    }

    for (idx, &m) in schedule.measurement_vector.iter().enumerate() {
        let step = idx + 1;
        eta = match modes {
            1 => single_mode_step(&eta, m)?,
            _ => two_mode_step(&eta)?,
        };
        rows.push((StepLabel::Step(step), eta.clone()));

        if schedule.correction_steps.contains(&step) {
            for k in 0..modes {
                err_vars.push(ErrVar {
                    step,
                    rail: Rail::for_mode(modes, k),
                    variance: eta.get(k, k) + NoiseForm::delta(),
                });
            }
            eta = correct_map(&eta)?;
            rows.push((StepLabel::Corrected(step), eta.clone()));
        }
    }

    Ok(PropagationTrace { gate: schedule.gate, rows, err_vars })
}

/// Correction variances as integer multiples `n_j` of `σ²` under `δ = ε = σ²`,
/// in trace order (step 3 before step 4, top rail before bottom).
pub fn error_multipliers(schedule: &GateSchedule) -> Result<Vec<u32>> {
    let trace = propagate(schedule)?;
    trace
        .err_vars
        .iter()
        .map(|ev| {
            let n = ev.variance.sigma2_multiplier();
            n.is_integer()
                .then(|| n.to_integer().to_u32())
                .flatten()
                .ok_or_else(|| Error::Numerical(format!("non-integer multiplier {n} at step {}", ev.step)))
        })
        .collect()
}

/// True iff the fully corrected output matrix equals the standard input matrix.
pub fn fixed_point_check(schedule: &GateSchedule) -> Result<bool> {
    let trace = propagate(schedule)?;
    Ok(trace.last() == trace.initial())
}
