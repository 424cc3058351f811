//! Per-outcome information and disturbance measures.
//!
//! With `x_i = λ_i²` and `σ² = Σ x_i`,
//!
//! ```text
//! I(m) = log2 d − (η(d) − 1)/ln 2 − log2 σ² + g[x_1..x_d] / σ²,   g(x) = x^d log2 x
//! G(m) = (σ² + λ_max²) / ((d+1) σ²)
//! F(m) = (σ² + τ²)     / ((d+1) σ²)
//! R(m) = d λ_min² / σ²
//! p(m) = σ² / d
//! ```

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::divdiff;
use crate::error::{Error, Result};
use crate::spectrum::{harmonic, AuxiliaryScalars, SingularSpectrum, DEGENERACY_TOL};

/// The four measures of one outcome and its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    /// Bits.
    pub info_gain: f64,
    pub estimation_fidelity: f64,
    pub operation_fidelity: f64,
    pub reversibility: f64,
    pub outcome_probability: f64,
}

pub fn info_gain(s: &SingularSpectrum) -> f64 {
    info_gain_raw(s.values())
}

pub fn estimation_fidelity(s: &SingularSpectrum) -> f64 {
    let a = s.aux();
    (a.sigma_sq + a.lambda_max * a.lambda_max) / ((s.d() + 1) as f64 * a.sigma_sq)
}

pub fn operation_fidelity(s: &SingularSpectrum) -> f64 {
    operation_fidelity_raw(s.values())
}

pub fn reversibility(s: &SingularSpectrum) -> f64 {
    let a = s.aux();
    s.d() as f64 * a.lambda_min * a.lambda_min / a.sigma_sq
}

/// `σ²/d`. Depends on the overall scale of the operator, unlike the four measures.
pub fn outcome_probability(s: &SingularSpectrum) -> f64 {
    s.aux().sigma_sq / s.d() as f64
}

/// Information gained per unit of fidelity lost, `I / (1 − F)`.
pub fn efficiency(s: &SingularSpectrum) -> Result<f64> {
    let loss = 1.0 - operation_fidelity(s);
    if loss <= 1e-15 {
        return Err(Error::UndefinedEfficiency);
    }
    Ok(info_gain(s) / loss)
}

pub fn measures(s: &SingularSpectrum) -> MeasureVector {
    MeasureVector {
        info_gain: info_gain(s),
        estimation_fidelity: estimation_fidelity(s),
        operation_fidelity: operation_fidelity(s),
        reversibility: reversibility(s),
        outcome_probability: outcome_probability(s),
    }
}

/// The constant `log2 d − (η(d) − 1)/ln 2`, which is also the largest possible `I(m)`.
pub fn info_gain_ceiling(d: usize) -> f64 {
    (d as f64).log2() - (harmonic(d) - 1.0) / LN_2
}

/// `I(m)` for any non-negative vector with a positive entry; no range checks.
pub(crate) fn info_gain_raw(values: &[f64]) -> f64 {
    let d = values.len();
    let (x, sigma_sq) = normalized_squares(values);
    let dd = divdiff::xpow_ln(d, &x, DEGENERACY_TOL) / LN_2;
    clamp_info_gain(d, info_gain_ceiling(d) - sigma_sq.log2() + dd / sigma_sq)
}

/// Cancellation near the identity can leave a few ulps below zero.
fn clamp_info_gain(d: usize, value: f64) -> f64 {
    value.clamp(0.0, info_gain_ceiling(d))
}

pub(crate) fn operation_fidelity_raw(values: &[f64]) -> f64 {
    let a = AuxiliaryScalars::of(values);
    (a.sigma_sq + a.tau * a.tau) / ((values.len() + 1) as f64 * a.sigma_sq)
}

/// `λ_i² / λ_max²` and their sum.
fn normalized_squares(values: &[f64]) -> (Vec<f64>, f64) {
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    let x: Vec<f64> = values.iter().map(|v| (v / top) * (v / top)).collect();
    let sigma_sq = x.iter().sum();
    (x, sigma_sq)
}

/// Analytic `∂I/∂λ_i`, from `∂g[x..]/∂x_i = g[x.., x_i]`.
///
/// Components at `λ_i = 0` are exactly zero because `I` depends on `λ_i²`.
pub fn info_gain_gradient(values: &[f64]) -> Vec<f64> {
    let d = values.len();
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    let (x, sigma_sq) = normalized_squares(values);
    let dd = divdiff::xpow_ln(d, &x, DEGENERACY_TOL);
    let mut nodes = x.clone();
    nodes.push(0.0);
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0.0 {
                return 0.0;
            }
            nodes[d] = x[i];
            let ddi = divdiff::xpow_ln(d, &nodes, DEGENERACY_TOL);
            let di_dx = (-1.0 + ddi - dd / sigma_sq) / (LN_2 * sigma_sq);
            // x_i = (λ_i / top)²; the top-value dependence cancels by scale invariance.
            2.0 * (v / top) * di_dx / top
        })
        .collect()
}
