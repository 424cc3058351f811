//! Singular-value spectra and the scalar aggregates every measure is built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on squared singular values below which two nodes are
/// treated as exactly degenerate when evaluating the information gain.
pub const DEGENERACY_TOL: f64 = 1e-7;

/// The `d` singular values of one measurement operator.
///
/// Invariants: `d >= 2`, every value in `[0, 1]`, at least one value positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSpectrum(format!(
                "dimension must be at least 2, got {}",
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSpectrum(format!(
                    "singular value #{} = {v} is outside [0, 1]",
                    i + 1
                )));
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidSpectrum(
                "all singular values are zero (the zero operator is not a measurement operator)"
                    .into(),
            ));
        }
        Ok(Self { values })
    }

    /// Spectrum of `k` ones, `l` copies of `lambda` and `d - k - l` zeros, unchecked
    /// beyond the usual invariants.
    pub(crate) fn from_blocks(d: usize, k: usize, l: usize, lambda: f64) -> Result<Self> {
        let mut v = Vec::with_capacity(d);
        v.extend(std::iter::repeat_n(1.0, k));
        v.extend(std::iter::repeat_n(lambda, l));
        v.extend(std::iter::repeat_n(0.0, d.saturating_sub(k + l)));
        Self::new(v)
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multiplies every singular value by `c` in `(0, 1]`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::Domain(format!(
                "rescaling factor {c} is outside (0, 1]"
            )));
        }
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn aux(&self) -> AuxiliaryScalars {
        AuxiliaryScalars::of(&self.values)
    }
}

impl TryFrom<Vec<f64>> for SingularSpectrum {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SingularSpectrum> for Vec<f64> {
    fn from(s: SingularSpectrum) -> Self {
        s.values
    }
}

/// `σ² = Σλ²`, `τ = Σλ`, extreme values and the harmonic number `η(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryScalars {
    pub sigma_sq: f64,
    pub tau: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub eta_d: f64,
}

impl AuxiliaryScalars {
    pub(crate) fn of(values: &[f64]) -> Self {
        let mut sigma_sq = 0.0;
        let mut tau = 0.0;
        let mut lambda_max = f64::NEG_INFINITY;
        let mut lambda_min = f64::INFINITY;
        for &v in values {
            sigma_sq += v * v;
            tau += v;
            lambda_max = lambda_max.max(v);
            lambda_min = lambda_min.min(v);
        }
        Self {
            sigma_sq,
            tau,
            lambda_max,
            lambda_min,
            eta_d: harmonic(values.len()),
        }
    }
}

/// `η(n) = Σ_{k=1..n} 1/k`, summed in ascending `k`.
pub fn harmonic_eta(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("harmonic number requires n >= 1".into()));
    }
    Ok(harmonic(n))
}

/// Harmonic number with `η(0) = 0`.
pub(crate) fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Sorts descending and rescales so that `σ² = 1`.
pub fn canonicalize(s: &SingularSpectrum) -> SingularSpectrum {
    let mut values = s.values.clone();
    values.sort_by(|a, b| b.total_cmp(a));
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut values {
        *v /= norm;
    }
    // σ² = 1 keeps every entry in [0, 1].
    SingularSpectrum { values }
}
