//! Logical error probabilities and the squeezing threshold.
//!
//! A GKP correction at step `j` fails when the combined shift (data plus ancilla)
//! falls outside `[−√π/2, √π/2)`. With total variance `n_j σ²` the success
//! probability is `erf(√π / (2 √(2 n_j) σ))`, and a gate errs when any of its
//! corrections fails.
//!
//! Gate failure probabilities are evaluated as `−expm1(Σ_j ln(1 − erfc_j))`,
//! which is algebraically `1 − Π_j p_succ,j` but keeps full relative precision
//! when the failure probability is far below machine epsilon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cluster_gates::{error_multipliers, Gate, GateSchedule};
use crate::error::{Error, Result};

/// Vacuum quadrature variance.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Relative tolerance on `σ²` for [`sigma2_for_threshold`].
pub const ROOT_REL_TOL: f64 = 1e-9;

/// Default bisection bracket for `σ²`.
pub const SIGMA2_BRACKET: (f64, f64) = (1e-6, 1.0);

/// Experimental squeezing milestones marked on the error-rate plot (dB).
/// Annotations only.
pub const SQUEEZING_MILESTONES_DB: [f64; 2] = [12.7, 5.0];

/// Fault-tolerance thresholds tabulated by default.
pub const DEFAULT_THRESHOLDS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub p_ft: f64,
    pub sigma2: f64,
    pub squeezing_db: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub squeezing_db: f64,
    pub p_err: f64,
}

/// `s = −10 log₁₀(σ² / (1/2))`.
pub fn squeezing_db(sigma2: f64) -> f64 {
    -10.0 * (sigma2 / VACUUM_VARIANCE).log10()
}

/// Inverse of [`squeezing_db`].
pub fn sigma2_from_db(db: f64) -> f64 {
    VACUUM_VARIANCE * 10f64.powf(-db / 10.0)
}

fn erf_argument(n: u32, sigma: f64) -> f64 {
    PI.sqrt() / (2.0 * (2.0 * f64::from(n)).sqrt() * sigma)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("sigma", format!("standard deviation must be finite and >= 0, got {sigma}")))
    }
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if sigma2.is_finite() && sigma2 > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("sigma2", format!("variance must be finite and > 0, got {sigma2}")))
    }
}

/// Probability that one correction with total variance `n σ²` succeeds.
///
/// `sigma = 0` is the noiseless limit and returns exactly 1.
pub fn p_succ(n: u32, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "multiplier must be >= 1"));
    }
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(1.0);
    }
    Ok(libm::erf(erf_argument(n, sigma)))
}

/// `ln p_succ` computed from `erfc` so that it stays accurate when `p_succ → 1`.
fn ln_p_succ(n: u32, sigma: f64) -> f64 {
    (-libm::erfc(erf_argument(n, sigma))).ln_1p()
}

/// Failure probability for a set of corrections with multipliers `n_j`.
pub fn p_err_from_multipliers(multipliers: &[u32], sigma2: f64) -> Result<f64> {
    check_sigma2(sigma2)?;
    if multipliers.contains(&0) {
        return Err(Error::invalid("n", "multiplier must be >= 1"));
    }
    let sigma = sigma2.sqrt();
    let ln_all_succeed: f64 = multipliers.iter().map(|&n| ln_p_succ(n, sigma)).sum();
    Ok(-ln_all_succeed.exp_m1())
}

/// Logical error probability of one gate at `δ = ε = σ²`.
pub fn p_err_gate(gate: Gate, sigma2: f64) -> Result<f64> {
    let multipliers = error_multipliers(&GateSchedule::new(gate))?;
    p_err_from_multipliers(&multipliers, sigma2)
}

/// Multipliers of the controlled-Z gate, cached.
fn cz_multipliers() -> &'static [u32] {
    static CZ: std::sync::OnceLock<Vec<u32>> = std::sync::OnceLock::new();
    CZ.get_or_init(|| error_multipliers(&GateSchedule::new(Gate::CZ)).expect("cz schedule is valid"))
}

fn p_err_cz(sigma2: f64) -> Result<f64> {
    p_err_from_multipliers(cz_multipliers(), sigma2)
}

/// Largest `σ²` at which the controlled-Z error probability equals `p_ft`.
///
/// Bisection in `ln σ²`. The bracket starts at [`SIGMA2_BRACKET`] and is widened by
/// decades until it brackets the root.
pub fn sigma2_for_threshold(p_ft: f64) -> Result<ThresholdRow> {
    if !(p_ft > 0.0 && p_ft < 1.0) {
        return Err(Error::invalid("p_ft", format!("threshold must lie in (0, 1), got {p_ft}")));
    }
    let f = |ln_s2: f64| p_err_cz(ln_s2.exp()).map(|p| p - p_ft);

    let (mut lo, mut hi) = (SIGMA2_BRACKET.0.ln(), SIGMA2_BRACKET.1.ln());
    let decade = 10f64.ln();
    let mut expansions = 0;
    while f(lo)? > 0.0 {
        lo -= decade;
        expansions += 1;
        if expansions > 300 {
            return Err(Error::Numerical(format!("could not bracket p_ft = {p_ft} from below")));
        }
    }
    while f(hi)? < 0.0 {
        hi += decade;
        expansions += 1;
        if expansions > 300 {
            return Err(Error::Numerical(format!("could not bracket p_ft = {p_ft} from above")));
        }
    }

    // |Δ ln σ²| < tol implies relative error < tol on σ².
    let tol = ROOT_REL_TOL * 0.1;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma2 = (0.5 * (lo + hi)).exp();
    Ok(ThresholdRow { p_ft, sigma2, squeezing_db: squeezing_db(sigma2) })
}

/// Controlled-Z error probability at a given squeezing level.
pub fn curve_point(db: f64) -> Result<CurvePoint> {
    if !db.is_finite() {
        return Err(Error::invalid("db", "squeezing must be finite"));
    }
    Ok(CurvePoint { squeezing_db: db, p_err: p_err_cz(sigma2_from_db(db))? })
}

/// Controlled-Z error probability on an even grid of squeezing levels.
pub fn curve(db_min: f64, db_max: f64, points: usize) -> Result<Vec<CurvePoint>> {
    if !(db_min.is_finite() && db_max.is_finite() && db_min < db_max) {
        return Err(Error::invalid("db_min", format!("need finite db_min < db_max, got [{db_min}, {db_max}]")));
    }
    if points < 2 {
        return Err(Error::invalid("points", format!("need at least 2 points, got {points}")));
    }
    let step = (db_max - db_min) / (points - 1) as f64;
    let curve = (0..points)
        .map(|k| {
            let db = if k == points - 1 { db_max } else { db_min + step * k as f64 };
            curve_point(db)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = curve.windows(2).find(|w| w[1].p_err >= w[0].p_err) {
        return Err(Error::Numerical(format!("error curve not strictly decreasing at {} dB", w[1].squeezing_db)));
    }
    Ok(curve)
}
