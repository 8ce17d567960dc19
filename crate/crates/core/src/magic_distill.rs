//! Photon-counting preparation of GKP Hadamard eigenstates.
//!
//! Counting photons modulo 4 on one half of a noisy encoded Bell pair heralds a
//! Hadamard eigenstate: an even count is kept, an odd one discarded. The noisy state
//! is modelled in the Wigner picture as the ideal lattice of weighted delta spikes,
//! multiplied by an isotropic Gaussian envelope and blurred by an isotropic Gaussian.
//! Blurring is moved onto the measurement operators, whose Wigner functions have
//! closed forms, so every probability reduces to a sum over lattice points
//! `(√π t/2, √π s/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Envelope exponent at the truncation radius; terms beyond it are below `e^{-30}`
/// of the peak.
pub const TAIL_EXPONENT: f64 = 30.0;

/// Blur-to-envelope variance product of the default protocol (`3σ² · 1/(4σ²)`).
pub const DEFAULT_PRODUCT: f64 = 0.75;

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner function of the number-state projector `|n⟩⟨n|` at radius `r`.
pub fn wigner_number(n: u32, r: f64) -> f64 {
    let r2 = r * r;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * laguerre(n, 2.0 * r2) * (-r2).exp() / PI
}

/// Normalized isotropic 2-D Gaussian of variance `tau2` per quadrature, at `|r|² = r2`.
pub fn gaussian_2d(tau2: f64, r2: f64) -> f64 {
    (-r2 / (2.0 * tau2)).exp() / (2.0 * PI * tau2)
}

/// Wigner function of a photon-number-mod-4 projector, split into its smooth part
/// and the coefficient of the `δ²(r⃗)` point mass at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModFourWigner {
    pub smooth: f64,
    pub delta_coefficient: f64,
}

/// Unblurred Wigner function of `Π_a` for any `a ∈ Z₄`.
pub fn wigner_pi(a: u8, r: f64) -> Result<ModFourWigner> {
    let (d, s, c) = match a {
        0 => (1.0, 1.0, 1.0),
        1 => (-1.0, 1.0, -1.0),
        2 => (1.0, -1.0, -1.0),
        3 => (-1.0, -1.0, 1.0),
        _ => return Err(Error::invalid("a", format!("outcome must be in 0..4, got {a}"))),
    };
    let r2 = r * r;
    Ok(ModFourWigner {
        smooth: (1.0 + 2.0 * s * r2.sin() + 2.0 * c * r2.cos()) / (8.0 * PI),
        delta_coefficient: d / 8.0,
    })
}

/// Gaussian-blurred Wigner function of `Π_a` for an even outcome `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlurredWigner {
    /// `(1/8π)·[1 ± oscillatory term]`.
    pub smooth: f64,
    /// `π·G_{τ²}(r)`: the blurred image of the origin point mass, inside the
    /// `1/8π` bracket.
    pub delta_weight: f64,
}

impl BlurredWigner {
    pub fn total(&self) -> f64 {
        self.smooth + self.delta_weight / (8.0 * PI)
    }
}

/// `[W_{Π_a} * G_{τ²}](r)` for `a ∈ {0, 2}`.
pub fn wigner_pi_blurred(a: u8, r: f64, tau2: f64) -> Result<BlurredWigner> {
    let sign = match a {
        0 => 1.0,
        2 => -1.0,
        _ => return Err(Error::invalid("a", format!("only even outcomes 0 and 2 are evaluated, got {a}"))),
    };
    if !(tau2.is_finite() && tau2 > 0.0) {
        return Err(Error::invalid("tau2", format!("blur variance must be > 0, got {tau2}")));
    }
    Ok(blurred_at(sign, r * r, tau2))
}

fn blurred_at(sign: f64, r2: f64, tau2: f64) -> BlurredWigner {
    let denom = 4.0 * tau2 * tau2 + 1.0;
    let phase = r2 / denom;
    let osc = 2.0 * (-2.0 * r2 * tau2 / denom).exp() / denom
        * ((1.0 - 2.0 * tau2) * phase.sin() + (2.0 * tau2 + 1.0) * phase.cos());
    BlurredWigner { smooth: (1.0 + sign * osc) / (8.0 * PI), delta_weight: PI * gaussian_2d(tau2, r2) }
}

/// Weight of the Hadamard-eigenstate Wigner function at lattice point
/// `(q, p) = (√π t/2, √π s/2)`; `j = 0` for `π₊`, `j = 1` for `π₋`.
pub fn hadamard_indicator(j: u8, t: i64, s: i64) -> f64 {
    let even = |v: i64| v.rem_euclid(2) == 0;
    let sign = |e: i64| if (e + i64::from(j)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match (even(t), even(s)) {
        (true, false) => FRAC_1_SQRT_2 * sign(t / 2),
        (false, true) => FRAC_1_SQRT_2 * sign(s / 2),
        (true, true) => 1.0,
        (false, false) => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillationConfig {
    /// `δ = ε = σ²`.
    pub sigma2: f64,
    /// Variance of the isotropic Wigner-picture blur (default `3σ²`).
    pub blur_variance: f64,
    /// Variance of the Wigner-picture envelope (default `1/(4σ²)`).
    pub envelope_variance: f64,
    /// Lattice bound `|s|, |t| ≤ S_max`; `None` uses [`required_truncation`].
    pub truncation: Option<u32>,
    /// Blur × envelope product, when overridden.
    pub product_override: Option<f64>,
}

impl DistillationConfig {
    pub fn new(sigma2: f64) -> Self {
        Self {
            sigma2,
            blur_variance: 3.0 * sigma2,
            envelope_variance: 1.0 / (4.0 * sigma2),
            truncation: None,
            product_override: None,
        }
    }

    /// Sets the blur × envelope product to `product`.
    ///
    /// The envelope stays at `1/(4σ²)`; only the blur moves, to
    /// `3σ² · product / (3/4)`.
    pub fn with_product(mut self, product: f64) -> Self {
        self.blur_variance = 3.0 * self.sigma2 * (product / DEFAULT_PRODUCT);
        self.envelope_variance = 1.0 / (4.0 * self.sigma2);
        self.product_override = Some(product);
        self
    }

    pub fn with_truncation(mut self, s_max: u32) -> Self {
        self.truncation = Some(s_max);
        self
    }

    pub fn with_variances(mut self, blur_variance: f64, envelope_variance: f64) -> Self {
        self.blur_variance = blur_variance;
        self.envelope_variance = envelope_variance;
        self.product_override = None;
        self
    }

    pub fn product(&self) -> f64 {
        self.blur_variance * self.envelope_variance
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma2", self.sigma2),
            ("blur_variance", self.blur_variance),
            ("envelope_variance", self.envelope_variance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("variance must be finite and > 0, got {v}")));
            }
        }
        if let Some(v) = self.product_override {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("product_override", format!("product must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Lattice bound actually used: the configured one, raised to the tail bound if
    /// it falls short.
    pub fn effective_truncation(&self) -> u32 {
        let needed = required_truncation(self.envelope_variance);
        match self.truncation {
            Some(s) if s >= needed => s,
            Some(s) => {
                warn!("truncation {s} misses the envelope tail bound; using {needed}");
                needed
            }
            None => needed,
        }
    }
}

/// Smallest `S_max` with `(π S_max²/4) / (2·envelope_variance) ≥ 30`.
pub fn required_truncation(envelope_variance: f64) -> u32 {
    let s = (8.0 * envelope_variance * TAIL_EXPONENT / PI).sqrt().ceil();
    // guard against the ceil landing a hair short
    let mut s = s.max(0.0) as u32;
    while PI * f64::from(s).powi(2) / 4.0 / (2.0 * envelope_variance) < TAIL_EXPONENT {
        s += 1;
    }
    s
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `A[·|±]`, `A[0|±]` and `A[2|±]` for one Hadamard eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSums {
    pub a_norm: f64,
    pub a0: f64,
    pub a2: f64,
    pub truncation: u32,
}

/// Lattice sums for eigenstate `j` (0 for `+`, 1 for `−`).
///
/// Points are visited in shells of increasing `|s| + |t|` and accumulated with
/// compensated summation.
pub fn lattice_sums(cfg: &DistillationConfig, j: u8) -> Result<LatticeSums> {
    cfg.validate()?;
    if j > 1 {
        return Err(Error::invalid("j", format!("eigenstate index must be 0 or 1, got {j}")));
    }
    let s_max = i64::from(cfg.effective_truncation());
    let env = cfg.envelope_variance;
    let tau2 = cfg.blur_variance;
    let cell = PI / 4.0;

    let mut norm = CompensatedSum::default();
    let mut acc0 = CompensatedSum::default();
    let mut acc2 = CompensatedSum::default();
    for shell in 0..=2 * s_max {
        for t in -shell.min(s_max)..=shell.min(s_max) {
            let rest = shell - t.abs();
            if rest > s_max {
                continue;
            }
            let s_values: &[i64] = if rest == 0 { &[0] } else { &[-rest, rest] };
            for &s in s_values {
                let lambda = hadamard_indicator(j, t, s);
                if lambda == 0.0 {
                    continue;
                }
                let r2 = cell * ((s * s + t * t) as f64);
                let weight = gaussian_2d(env, r2) * lambda;
                norm.add(weight);
                let w0 = blurred_at(1.0, r2, tau2).total();
                let w2 = blurred_at(-1.0, r2, tau2).total();
                acc0.add(2.0 * PI * weight * w0);
                acc2.add(2.0 * PI * weight * w2);
            }
        }
    }
    Ok(LatticeSums { a_norm: norm.value(), a0: acc0.value(), a2: acc2.value(), truncation: s_max as u32 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillationResult {
    pub a_norm_plus: f64,
    pub a_norm_minus: f64,
    pub a0_plus: f64,
    pub a2_plus: f64,
    pub a0_minus: f64,
    pub a2_minus: f64,
    pub p0_plus: f64,
    pub p2_plus: f64,
    pub p0_minus: f64,
    pub p2_minus: f64,
    /// Probability that an even count heralds the wrong eigenstate.
    pub epsilon: f64,
    /// Probability of an even count.
    pub p_even: f64,
    pub truncation: u32,
}

/// Error and success probabilities of the photon-counting preparation.
pub fn distill_stats(cfg: &DistillationConfig) -> Result<DistillationResult> {
    let plus = lattice_sums(cfg, 0)?;
    let minus = lattice_sums(cfg, 1)?;
    for (label, sums) in [("+", &plus), ("-", &minus)] {
        if sums.a_norm.is_nan() || sums.a_norm <= 0.0 {
            return Err(Error::Numerical(format!("A[.|{label}] = {} is not positive", sums.a_norm)));
        }
    }
    let p0_plus = plus.a0 / plus.a_norm;
    let p2_plus = plus.a2 / plus.a_norm;
    let p0_minus = minus.a0 / minus.a_norm;
    let p2_minus = minus.a2 / minus.a_norm;
    let even_total = p0_plus + p2_plus + p0_minus + p2_minus;
    Ok(DistillationResult {
        a_norm_plus: plus.a_norm,
        a_norm_minus: minus.a_norm,
        a0_plus: plus.a0,
        a2_plus: plus.a2,
        a0_minus: minus.a0,
        a2_minus: minus.a2,
        p0_plus,
        p2_plus,
        p0_minus,
        p2_minus,
        epsilon: (p2_plus + p0_minus) / even_total,
        p_even: 0.5 * even_total,
        truncation: plus.truncation,
    })
}

/// Distillation threshold on the preparation error of a Hadamard eigenstate.
pub const DISTILLATION_THRESHOLD: f64 = 0.146;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 3.3), 1.0);
        assert_eq!(laguerre(1, 2.0), -1.0);
        // L₂(x) = (x² − 4x + 2)/2
        assert!((laguerre(2, 1.5) - (2.25 - 6.0 + 2.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn number_state_wigner_at_origin() {
        assert!((wigner_number(0, 0.0) - 1.0 / PI).abs() < 1e-15);
        assert!((wigner_number(1, 0.0) + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn blurred_limit_at_sqrt_pi() {
        let w = wigner_pi_blurred(0, PI.sqrt(), 1e-12).unwrap();
        assert!((w.smooth + 1.0 / (8.0 * PI)).abs() < 1e-10, "{}", w.smooth);
    }

    #[test]
    fn even_pair_sums_to_constant() {
        for &(r, tau2) in &[(0.3, 0.01), (1.7, 0.2), (2.5, 0.0133)] {
            let w0 = wigner_pi_blurred(0, r, tau2).unwrap();
            let w2 = wigner_pi_blurred(2, r, tau2).unwrap();
            let want = (1.0 + PI * gaussian_2d(tau2, r * r)) / (4.0 * PI);
            assert!((w0.total() + w2.total() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_outcomes_rejected() {
        assert!(wigner_pi_blurred(1, 1.0, 0.1).is_err());
        assert!(wigner_pi_blurred(3, 1.0, 0.1).is_err());
        assert!(wigner_pi_blurred(0, 1.0, 0.0).is_err());
        assert!(wigner_pi(4, 1.0).is_err());
    }

    #[test]
    fn indicator_cases() {
        assert_eq!(hadamard_indicator(0, 0, 0), 1.0);
        assert_eq!(hadamard_indicator(0, 0, 1), FRAC_1_SQRT_2);
        assert_eq!(hadamard_indicator(1, 2, 1), FRAC_1_SQRT_2);
        assert_eq!(hadamard_indicator(1, 0, 1), -FRAC_1_SQRT_2);
        assert_eq!(hadamard_indicator(0, 1, 1), 0.0);
        assert_eq!(hadamard_indicator(0, -2, 3), -FRAC_1_SQRT_2);
    }

    #[test]
    fn truncation_rule() {
        let env = 1.0 / (4.0 * 4.44e-3);
        let s = required_truncation(env);
        let exponent = |s: u32| PI * f64::from(s).powi(2) / 4.0 / (2.0 * env);
        assert!(exponent(s) >= TAIL_EXPONENT);
        assert!(exponent(s - 1) < TAIL_EXPONENT);
    }

    #[test]
    fn short_truncation_is_enlarged() {
        let cfg = DistillationConfig::new(0.01).with_truncation(3);
        assert_eq!(cfg.effective_truncation(), required_truncation(cfg.envelope_variance));
        let cfg = cfg.with_truncation(500);
        assert_eq!(cfg.effective_truncation(), 500);
    }

    #[test]
    fn single_point_limit() {
        let cfg = DistillationConfig::new(0.01).with_variances(0.03, 1e-3);
        for j in [0, 1] {
            let sums = lattice_sums(&cfg, j).unwrap();
            assert!((sums.a_norm / gaussian_2d(1e-3, 0.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_protocol_at_threshold_squeezing() {
        let r = distill_stats(&DistillationConfig::new(4.44e-3)).unwrap();
        assert!(r.epsilon > 0.124 && r.epsilon < 0.127, "{}", r.epsilon);
        assert!((r.p_even - 2.0 / 3.0).abs() < 0.01, "{}", r.p_even);
        assert!(r.epsilon < DISTILLATION_THRESHOLD);
    }

    #[test]
    fn product_override() {
        let half = distill_stats(&DistillationConfig::new(4.44e-3).with_product(0.5)).unwrap();
        assert!((half.epsilon - 0.056).abs() < 0.002, "{}", half.epsilon);
        assert!((half.p_even - 0.75).abs() < 0.01);
        let quarter = distill_stats(&DistillationConfig::new(4.44e-3).with_product(0.25)).unwrap();
        assert!(quarter.epsilon < 0.005, "{}", quarter.epsilon);
    }

    #[test]
    fn invalid_config() {
        assert!(distill_stats(&DistillationConfig::new(0.0)).is_err());
        assert!(distill_stats(&DistillationConfig::new(0.01).with_product(-1.0)).is_err());
        assert!(lattice_sums(&DistillationConfig::new(0.01), 2).is_err());
    }
}
