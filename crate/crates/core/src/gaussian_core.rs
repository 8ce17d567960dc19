//! Error matrices and symplectic maps.
//!
//! An error matrix is the covariance of the classical Gaussian shift riding on an
//! otherwise ideal GKP codeword. Everything here is stored with exact rational
//! coefficients of the two noise symbols: `δ` (ancilla spike variance) and `ε`
//! (variance of the momentum-squeezed states that build the cluster). Numeric
//! matrices are only produced on demand through [`SymbolicCovariance::evaluate`].
//!
//! All phase-space vectors use the ordering `(q₁, …, q_N, p₁, …, p_N)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for float comparisons of O(1) combinations of δ and ε.
pub const FLOAT_TOL: f64 = 1e-12;

/// Numeric values of the two noise variances.
///
/// Variances are in quadrature units where the vacuum variance is `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    delta: f64,
    epsilon: f64,
}

impl NoiseModel {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        check_variance("delta", delta)?;
        check_variance("epsilon", epsilon)?;
        Ok(Self { delta, epsilon })
    }

    /// The `δ = ε = σ²` convention used for every threshold number.
    pub fn symmetric(sigma2: f64) -> Result<Self> {
        check_variance("sigma2", sigma2)?;
        Ok(Self { delta: sigma2, epsilon: sigma2 })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `Some(σ²)` when `δ = ε`.
    pub fn sigma2(&self) -> Option<f64> {
        (self.delta == self.epsilon).then_some(self.delta)
    }
}

fn check_variance(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("variance must be finite and > 0, got {v}")))
    }
}

/// A linear form `a·δ + b·ε` with exact rational coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct NoiseForm {
    pub delta: Rational64,
    pub epsilon: Rational64,
}

impl NoiseForm {
    pub const ZERO: NoiseForm = NoiseForm { delta: Rational64::new_raw(0, 1), epsilon: Rational64::new_raw(0, 1) };

    /// `a·δ + b·ε` with integer coefficients.
    pub fn new(delta: i64, epsilon: i64) -> Self {
        Self { delta: Rational64::from_integer(delta), epsilon: Rational64::from_integer(epsilon) }
    }

    pub fn delta() -> Self {
        Self::new(1, 0)
    }

    pub fn epsilon() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.delta.is_zero() && self.epsilon.is_zero()
    }

    pub fn eval(&self, noise: &NoiseModel) -> f64 {
        ratio_to_f64(self.delta) * noise.delta + ratio_to_f64(self.epsilon) * noise.epsilon
    }

    /// Collapses the form under `δ = ε = σ²`, returning the multiplier of `σ²`.
    pub fn sigma2_multiplier(&self) -> Rational64 {
        self.delta + self.epsilon
    }
}

impl Add for NoiseForm {
    type Output = NoiseForm;
    fn add(self, rhs: NoiseForm) -> NoiseForm {
        NoiseForm { delta: self.delta + rhs.delta, epsilon: self.epsilon + rhs.epsilon }
    }
}

impl Sub for NoiseForm {
    type Output = NoiseForm;
    fn sub(self, rhs: NoiseForm) -> NoiseForm {
        NoiseForm { delta: self.delta - rhs.delta, epsilon: self.epsilon - rhs.epsilon }
    }
}

impl Neg for NoiseForm {
    type Output = NoiseForm;
    fn neg(self) -> NoiseForm {
        NoiseForm { delta: -self.delta, epsilon: -self.epsilon }
    }
}

impl Mul<Rational64> for NoiseForm {
    type Output = NoiseForm;
    fn mul(self, rhs: Rational64) -> NoiseForm {
        NoiseForm { delta: self.delta * rhs, epsilon: self.epsilon * rhs }
    }
}

impl fmt::Display for NoiseForm {
    /// Renders as e.g. `3δ+2ε`, `-δ`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (c, sym) in [(self.delta, "δ"), (self.epsilon, "ε")] {
            if c.is_zero() {
                continue;
            }
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(sym);
        }
        f.write_str(&out)
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Symmetric error matrix whose entries are exact linear forms in `δ` and `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicCovariance {
    dim: usize,
    coeff_delta: Vec<Rational64>,
    coeff_epsilon: Vec<Rational64>,
}

impl SymbolicCovariance {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coeff_delta: vec![Rational64::zero(); dim * dim],
            coeff_epsilon: vec![Rational64::zero(); dim * dim],
        }
    }

    pub fn diagonal(diag: &[NoiseForm]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (i, form) in diag.iter().enumerate() {
            out.set(i, i, *form);
        }
        out
    }

    /// Builds a matrix from row-major entries; fails unless square and symmetric.
    pub fn from_rows(rows: &[&[NoiseForm]]) -> Result<Self> {
        let dim = rows.len();
        let mut out = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: "square matrix", found: row.len() });
            }
            for (j, form) in row.iter().enumerate() {
                out.set(i, j, *form);
            }
        }
        if !out.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(out)
    }

    /// Builds a matrix from its separate `δ` and `ε` coefficient matrices (row-major).
    pub fn from_coefficients(dim: usize, coeff_delta: Vec<Rational64>, coeff_epsilon: Vec<Rational64>) -> Result<Self> {
        if coeff_delta.len() != dim * dim || coeff_epsilon.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: "dim×dim coefficient matrices",
                found: coeff_delta.len(),
            });
        }
        let out = Self { dim, coeff_delta, coeff_epsilon };
        if !out.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of modes (`dim / 2`).
    pub fn modes(&self) -> usize {
        self.dim / 2
    }

    pub fn coeff_delta(&self) -> &[Rational64] {
        &self.coeff_delta
    }

    pub fn coeff_epsilon(&self) -> &[Rational64] {
        &self.coeff_epsilon
    }

    pub fn get(&self, i: usize, j: usize) -> NoiseForm {
        let k = i * self.dim + j;
        NoiseForm { delta: self.coeff_delta[k], epsilon: self.coeff_epsilon[k] }
    }

    fn set(&mut self, i: usize, j: usize, form: NoiseForm) {
        let k = i * self.dim + j;
        self.coeff_delta[k] = form.delta;
        self.coeff_epsilon[k] = form.epsilon;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `S η Sᵀ`, exactly.
    pub fn conjugate(&self, map: &SymplecticMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: "map and matrix of equal dimension", found: map.dim() });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = NoiseForm::ZERO;
                for k in 0..n {
                    let sik = map.get(i, k);
                    if sik.is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        let sjl = map.get(j, l);
                        if sjl.is_zero() {
                            continue;
                        }
                        acc = acc + self.get(k, l) * (sik * sjl);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Adds `form` to every momentum diagonal entry.
    pub fn add_p_noise(&self, form: NoiseForm) -> Self {
        let mut out = self.clone();
        let m = self.modes();
        for i in m..self.dim {
            out.set(i, i, self.get(i, i) + form);
        }
        out
    }

    /// Numeric instantiation at the given noise values.
    pub fn evaluate(&self, noise: &NoiseModel) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).eval(noise))
    }

    /// Smallest eigenvalue of the numeric instantiation.
    pub fn min_eigenvalue(&self, noise: &NoiseModel) -> f64 {
        SymmetricEigen::new(self.evaluate(noise)).eigenvalues.min()
    }

    pub fn is_psd_at(&self, noise: &NoiseModel) -> bool {
        self.min_eigenvalue(noise) >= -FLOAT_TOL
    }
}

impl fmt::Display for SymbolicCovariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Linear phase-space action of a Gaussian unitary.
///
/// Every map used by the cluster schedules has integer entries, so the entries are
/// kept as exact rationals; [`SymplecticMap::to_matrix`] gives the real matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMap {
    dim: usize,
    entries: Vec<Rational64>,
}

impl SymplecticMap {
    /// Validates `S Ω Sᵀ = Ω` exactly before accepting the matrix.
    pub fn new(dim: usize, entries: Vec<Rational64>) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: "even dim with dim×dim entries", found: entries.len() });
        }
        let map = Self { dim, entries };
        if !map.is_symplectic_exact() {
            return Err(Error::NotSymplectic(map.symplectic_defect()));
        }
        Ok(map)
    }

    fn from_ints(dim: usize, rows: &[i64]) -> Self {
        Self::new(dim, rows.iter().map(|&v| Rational64::from_integer(v)).collect())
            .expect("built-in maps are symplectic")
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Rational64::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Rational64::one();
        }
        Self { dim, entries }
    }

    /// Single-mode Fourier transform `F = [[0,-1],[1,0]]`.
    pub fn fourier() -> Self {
        Self::from_ints(2, &[0, -1, 1, 0])
    }

    /// Single-mode shear `P(m) = [[1,0],[m,1]]`.
    pub fn shear(m: i64) -> Self {
        Self::from_ints(2, &[1, 0, m, 1])
    }

    /// Teleportation step after measuring `p̂ + m q̂`: `F·P(m) = [[-m,-1],[1,0]]`.
    pub fn measurement_step(m: i64) -> Self {
        Self::fourier().compose(&Self::shear(m))
    }

    /// Fourier transform on both modes of a two-mode system.
    pub fn two_mode_fourier() -> Self {
        #[rustfmt::skip]
        let f = [
            0, 0, -1, 0,
            0, 0, 0, -1,
            1, 0, 0, 0,
            0, 1, 0, 0,
        ];
        Self::from_ints(4, &f)
    }

    /// Controlled-Z of the given weight: `p₁ += w q₂`, `p₂ += w q₁`.
    pub fn controlled_z(weight: i64) -> Self {
        #[rustfmt::skip]
        let cz = [
            1, 0, 0, 0,
            0, 1, 0, 0,
            0, weight, 1, 0,
            weight, 0, 0, 1,
        ];
        Self::from_ints(4, &cz)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Rational64 {
        self.entries[i * self.dim + j]
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &SymplecticMap) -> SymplecticMap {
        assert_eq!(self.dim, rhs.dim, "composing maps of different dimension");
        let n = self.dim;
        let mut entries = vec![Rational64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum();
            }
        }
        SymplecticMap { dim: n, entries }
    }

    pub fn transpose(&self) -> SymplecticMap {
        let n = self.dim;
        let mut entries = vec![Rational64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j);
            }
        }
        SymplecticMap { dim: n, entries }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| ratio_to_f64(self.get(i, j)))
    }

    fn is_symplectic_exact(&self) -> bool {
        let omega = omega_exact(self.dim / 2);
        let lhs = self.compose(&omega).compose(&self.transpose());
        lhs == omega
    }

    /// `max |S Ω Sᵀ − Ω|` evaluated in floating point.
    pub fn symplectic_defect(&self) -> f64 {
        let s = self.to_matrix();
        let omega = symplectic_form(self.dim / 2);
        (&s * &omega * s.transpose() - omega).abs().max()
    }
}

fn omega_exact(modes: usize) -> SymplecticMap {
    let n = 2 * modes;
    let mut entries = vec![Rational64::zero(); n * n];
    for i in 0..modes {
        entries[i * n + modes + i] = Rational64::one();
        entries[(modes + i) * n + i] = -Rational64::one();
    }
    SymplecticMap { dim: n, entries }
}

/// The standard symplectic form `Ω = [[0, I], [−I, 0]]` in `(q…, p…)` ordering.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    omega_exact(modes).to_matrix()
}

fn expect_dim(eta: &SymbolicCovariance, dims: &[usize], expected: &'static str) -> Result<()> {
    if dims.contains(&eta.dim()) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found: eta.dim() })
    }
}

/// One teleportation step along a single-mode rail: `S η Sᵀ + diag(0, ε)` with `S = F·P(m)`.
pub fn single_mode_step(eta: &SymbolicCovariance, m: i64) -> Result<SymbolicCovariance> {
    expect_dim(eta, &[2], "2×2 error matrix")?;
    Ok(eta.conjugate(&SymplecticMap::measurement_step(m))?.add_p_noise(NoiseForm::epsilon()))
}

/// GKP correction with pure ancillas: the `q` noise is replaced by fresh noise `δ`
/// (and its correlations dropped) while `δ` is added to every `p` quadrature.
pub fn correct_map(eta: &SymbolicCovariance) -> Result<SymbolicCovariance> {
    expect_dim(eta, &[2, 4], "2×2 or 4×4 error matrix")?;
    let n = eta.dim();
    let m = eta.modes();
    let mut out = SymbolicCovariance::zeros(n);
    for i in m..n {
        for j in m..n {
            out.set(i, j, eta.get(i, j));
        }
    }
    for i in 0..n {
        out.set(i, i, out.get(i, i) + NoiseForm::delta());
    }
    Ok(out)
}

/// One step along both rails of the two-mode cluster: `F̄ η F̄ᵀ + diag(0, 0, ε, ε)`.
pub fn two_mode_step(eta: &SymbolicCovariance) -> Result<SymbolicCovariance> {
    expect_dim(eta, &[4], "4×4 error matrix")?;
    Ok(eta.conjugate(&SymplecticMap::two_mode_fourier())?.add_p_noise(NoiseForm::epsilon()))
}

/// Weight used for the vertical link of the two-rail cluster.
pub const CZ_WEIGHT: i64 = -1;

/// Noisy entangling step: `C_Z[−1] η C_Z[−1]ᵀ + diag(0, 0, ε, ε)`.
pub fn cz_inject(eta: &SymbolicCovariance) -> Result<SymbolicCovariance> {
    cz_inject_weighted(eta, CZ_WEIGHT)
}

/// [`cz_inject`] with an explicit controlled-Z weight.
pub fn cz_inject_weighted(eta: &SymbolicCovariance, weight: i64) -> Result<SymbolicCovariance> {
    expect_dim(eta, &[4], "4×4 error matrix")?;
    Ok(eta.conjugate(&SymplecticMap::controlled_z(weight))?.add_p_noise(NoiseForm::epsilon()))
}
