//! Numerical first-order optimality checks for the boundary families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyKL;
use crate::measures::{info_gain_raw, operation_fidelity_raw};
use crate::spectrum::SingularSpectrum;

/// Measures that can be differentiated numerically.
///
/// `Reversibility` keeps the minimum pinned to the last entry, `d λ_d² / σ²`, so it is
/// smooth where `λ_d` ties other entries; pass spectra sorted in descending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    InfoGain,
    OperationFidelity,
    Reversibility,
}

impl Measure {
    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Measure::InfoGain => info_gain_raw(v),
            Measure::OperationFidelity => operation_fidelity_raw(v),
            Measure::Reversibility => {
                let last = v[v.len() - 1];
                v.len() as f64 * last * last / v.iter().map(|x| x * x).sum::<f64>()
            }
        }
    }
}

/// Finite-difference gradient. Central differences for positive entries, and the
/// second-order forward formula for entries at zero.
pub fn numeric_gradient(measure: Measure, s: &SingularSpectrum, h: f64) -> Result<Vec<f64>> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "difference step {h} must be positive"
        )));
    }
    Ok(gradient(measure, s.values(), h))
}

fn gradient(measure: Measure, values: &[f64], h: f64) -> Vec<f64> {
    let mut v = values.to_vec();
    (0..values.len())
        .map(|i| {
            let x = values[i];
            let mut at = |t: f64| {
                v[i] = t;
                let f = measure.eval(&v);
                v[i] = x;
                f
            };
            if x >= h {
                (at(x + h) - at(x - h)) / (2.0 * h)
            } else {
                (-3.0 * at(x) + 4.0 * at(x + h) - at(x + 2.0 * h)) / (2.0 * h)
            }
        })
        .collect()
}

/// Step-halving Richardson extrapolation of [`gradient`].
fn richardson_gradient(measure: Measure, values: &[f64], h: f64) -> Vec<f64> {
    let coarse = gradient(measure, values, h);
    let fine = gradient(measure, values, h / 2.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// `|Σ λ_i ∂I/∂λ_i|`, which vanishes because `I` is scale invariant.
pub fn euler_residual(s: &SingularSpectrum) -> f64 {
    let g = gradient(Measure::InfoGain, s.values(), DEFAULT_STEP);
    s.values()
        .iter()
        .zip(&g)
        .map(|(l, d)| l * d)
        .sum::<f64>()
        .abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    /// Maximize `I` at fixed `F`, on `(1, d−1)`.
    FidelityMax,
    /// Minimize `I` at fixed `F` with `λ_i ≥ 0`, on `(k, 1)`.
    FidelityMin,
    /// Maximize `I` at fixed `R` with `λ_i ≥ λ_d`, on `(1, d−1)`.
    ReversibilityMax,
    /// Minimize `I` at fixed `R`, on `(d−1, 1)`.
    ReversibilityMin,
}

impl Problem {
    pub const ALL: [Problem; 4] = [
        Problem::FidelityMax,
        Problem::FidelityMin,
        Problem::ReversibilityMax,
        Problem::ReversibilityMin,
    ];

    fn constraint(&self) -> Measure {
        match self {
            Problem::FidelityMax | Problem::FidelityMin => Measure::OperationFidelity,
            Problem::ReversibilityMax | Problem::ReversibilityMin => Measure::Reversibility,
        }
    }

    fn accepts(&self, f: &FamilyKL) -> bool {
        match self {
            Problem::FidelityMax | Problem::ReversibilityMax => f.k == 1 && f.l == f.d - 1,
            Problem::FidelityMin => f.l == 1,
            Problem::ReversibilityMin => f.k == f.d - 1 && f.l == 1,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::FidelityMax => "F-max",
            Problem::FidelityMin => "F-min",
            Problem::ReversibilityMax => "R-max",
            Problem::ReversibilityMin => "R-min",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f-max" | "fmax" => Ok(Problem::FidelityMax),
            "f-min" | "fmin" => Ok(Problem::FidelityMin),
            "r-max" | "rmax" => Ok(Problem::ReversibilityMax),
            "r-min" | "rmin" => Ok(Problem::ReversibilityMin),
            _ => Err(Error::Domain(format!("unknown problem {s:?}"))),
        }
    }
}

pub const DEFAULT_STEP: f64 = 1e-5;
pub const STATIONARITY_TOL: f64 = 1e-5;
/// Tolerance on multiplier signs and complementary slackness products.
pub const MULTIPLIER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KKTReport {
    pub family: FamilyKL,
    pub problem: Problem,
    pub objective: Measure,
    pub constraint: Measure,
    /// Largest `|∂L/∂λ_i|` once the multipliers are fixed.
    pub stationarity_residual: f64,
    pub alpha: f64,
    /// `β_i` for `F-min`, `γ_i` for `R-max`, empty otherwise. Indexed over all `d` entries.
    pub inequality_multipliers: Vec<f64>,
    pub signs_ok: bool,
    pub slackness_ok: bool,
    /// Whether the Richardson-extrapolated gradients were needed.
    pub extrapolated: bool,
}

impl KKTReport {
    pub fn passed(&self) -> bool {
        self.stationarity_residual <= STATIONARITY_TOL && self.signs_ok && self.slackness_ok
    }
}

/// Checks the first-order conditions of `problem` at `M_{k,l}(λ)`.
pub fn kkt_report(
    d: usize,
    k: usize,
    l: usize,
    lambda: f64,
    problem: Problem,
) -> Result<KKTReport> {
    let family = FamilyKL::new(d, k, l, lambda)?;
    kkt_check(&family, family.spectrum().values(), problem)
}

/// Same checks at arbitrary `values`, using the block layout of `family` to decide
/// which equations fix the multipliers. Used for off-family controls.
pub fn kkt_check(family: &FamilyKL, values: &[f64], problem: Problem) -> Result<KKTReport> {
    if !problem.accepts(family) {
        return Err(Error::Domain(format!(
            "problem {problem} is not posed on family ({}, {}) for d={}",
            family.k, family.l, family.d
        )));
    }
    if values.len() != family.d {
        return Err(Error::Domain(format!(
            "{} values given for a family of dimension {}",
            values.len(),
            family.d
        )));
    }
    let first = evaluate(family, values, problem, false);
    if first.passed() {
        return Ok(first);
    }
    Ok(evaluate(family, values, problem, true))
}

fn evaluate(family: &FamilyKL, values: &[f64], problem: Problem, extrapolate: bool) -> KKTReport {
    let grad = |m| {
        if extrapolate {
            richardson_gradient(m, values, DEFAULT_STEP)
        } else {
            gradient(m, values, DEFAULT_STEP)
        }
    };
    let di = grad(Measure::InfoGain);
    let dc = grad(problem.constraint());
    let d = family.d;
    let (alpha, residual, multipliers) = match problem {
        // L = −I − α (F − F0): every component must vanish.
        Problem::FidelityMax => {
            let alpha = -di[0] / dc[0];
            let res = (0..d)
                .map(|i| (-di[i] - alpha * dc[i]).abs())
                .fold(0.0, f64::max);
            (alpha, res, Vec::new())
        }
        // L = I − α (F − F0) − Σ β_i λ_i: β vanishes on the first k+1 entries.
        Problem::FidelityMin => {
            let alpha = di[0] / dc[0];
            let active = family.k + family.l;
            let beta: Vec<f64> = (0..d)
                .map(|i| {
                    if i < active {
                        0.0
                    } else {
                        di[i] - alpha * dc[i]
                    }
                })
                .collect();
            let res = (0..active)
                .map(|i| (di[i] - alpha * dc[i]).abs())
                .fold(0.0, f64::max);
            (alpha, res, beta)
        }
        // L = −I − α (R − R0) − Σ_{i<d} γ_i (λ_i − λ_d): γ_1 = 0 fixes α, the middle
        // equations give γ_i, and the last equation is the residual.
        Problem::ReversibilityMax => {
            let alpha = -di[0] / dc[0];
            let mut gamma = vec![0.0; d];
            for i in 1..d - 1 {
                gamma[i] = -di[i] - alpha * dc[i];
            }
            let last = -di[d - 1] - alpha * dc[d - 1] + gamma.iter().sum::<f64>();
            let res = (-di[0] - alpha * dc[0]).abs().max(last.abs());
            (alpha, res, gamma)
        }
        // L = I − α (R − R0).
        Problem::ReversibilityMin => {
            let alpha = di[0] / dc[0];
            let res = (0..d)
                .map(|i| (di[i] - alpha * dc[i]).abs())
                .fold(0.0, f64::max);
            (alpha, res, Vec::new())
        }
    };
    let signs_ok = multipliers.iter().all(|&m| m >= -MULTIPLIER_TOL);
    let slackness_ok = match problem {
        Problem::FidelityMin => multipliers
            .iter()
            .zip(values)
            .all(|(b, l)| (b * l).abs() <= MULTIPLIER_TOL),
        Problem::ReversibilityMax => multipliers
            .iter()
            .zip(values)
            .all(|(g, l)| (g * (l - values[d - 1])).abs() <= MULTIPLIER_TOL),
        _ => true,
    };
    KKTReport {
        family: *family,
        problem,
        objective: Measure::InfoGain,
        constraint: problem.constraint(),
        stationarity_residual: residual,
        alpha,
        inequality_multipliers: multipliers,
        signs_ok,
        slackness_ok,
        extrapolated: extrapolate,
    }
}

/// Every admissible family/problem pairing for `d`, at the given `λ` values.
pub fn kkt_cases(d: usize, lambdas: &[f64]) -> Vec<(usize, usize, f64, Problem)> {
    let mut out = Vec::new();
    for &lambda in lambdas {
        out.push((1, d - 1, lambda, Problem::FidelityMax));
        for k in 1..d {
            out.push((k, 1, lambda, Problem::FidelityMin));
        }
        out.push((1, d - 1, lambda, Problem::ReversibilityMax));
        out.push((d - 1, 1, lambda, Problem::ReversibilityMin));
    }
    out
}
