//! Independent estimates of the measures: Monte-Carlo over uniformly random pure
//! states, and quadrature of the information gain for qubits.
//!
//! For a state with squared amplitudes `t` (uniform on the simplex) and
//! `q(t) = Σ λ_i² t_i`, `q̄ = σ²/d`, the estimators are `G = E[q t_max] / q̄` and
//! `F = E[(Σ λ_i t_i)²] / q̄`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::SingularSpectrum;

/// Squared amplitudes of one random pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSample {
    pub t: Vec<f64>,
}

/// A flat Dirichlet draw, as normalized exponential variates.
pub fn sample_simplex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SimplexSample {
    let mut t: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = t.iter().sum();
    t.iter_mut().for_each(|v| *v /= total);
    SimplexSample { t }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMeasures {
    pub estimation_fidelity: OracleEstimate,
    pub operation_fidelity: OracleEstimate,
    /// Exact; carries zero standard error.
    pub reversibility: OracleEstimate,
}

pub const MIN_SAMPLES: u64 = 10_000;

/// Independent ChaCha streams per chunk; fixed so results do not depend on threads.
const CHUNKS: u64 = 64;

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    fn estimate(&self, seed: u64) -> OracleEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        OracleEstimate {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n_samples: self.n,
            seed,
        }
    }
}

/// Monte-Carlo estimates of `G` and `F`, plus the exact `R`.
pub fn mc_measures(s: &SingularSpectrum, n: u64, seed: u64) -> Result<OracleMeasures> {
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    let lambda = s.values();
    let d = lambda.len();
    let aux = s.aux();
    let q_bar = aux.sigma_sq / d as f64;
    // Lowest index among the maximal singular values.
    let imax = lambda
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > lambda[best] { i } else { best });

    let per_chunk: Vec<u64> = (0..CHUNKS)
        .map(|c| n / CHUNKS + u64::from(c < n % CHUNKS))
        .collect();
    let parts: Vec<(Moments, Moments)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut e = vec![0.0; d];
            let (mut g, mut f) = (Moments::default(), Moments::default());
            for _ in 0..per_chunk[c as usize] {
                e.iter_mut().for_each(|v| *v = rng.sample::<f64, _>(Exp1));
                // Unnormalized amplitudes: ratios are exact when the integrand is constant.
                let total: f64 = e.iter().sum();
                let (mut q, mut amp) = (0.0, 0.0);
                for (l, x) in lambda.iter().zip(&e) {
                    q += l * l * x;
                    amp += l * x;
                }
                let norm = total * total * q_bar;
                g.push(q * e[imax] / norm);
                f.push(amp * amp / norm);
            }
            (g, f)
        })
        .collect();
    let (g, f) = parts.into_iter().fold(
        (Moments::default(), Moments::default()),
        |(ga, fa), (gb, fb)| (ga.merge(gb), fa.merge(fb)),
    );
    let r = d as f64 * aux.lambda_min * aux.lambda_min / aux.sigma_sq;
    Ok(OracleMeasures {
        estimation_fidelity: g.estimate(seed),
        operation_fidelity: f.estimate(seed),
        reversibility: OracleEstimate {
            mean: r,
            std_error: 0.0,
            n_samples: n,
            seed,
        },
    })
}

/// `I = ∫₀¹ (q/q̄) log₂(q/q̄) dt` for a qubit, `q(t) = λ₁² t + λ₂² (1 − t)`.
pub fn quad_info_gain_d2(s: &SingularSpectrum) -> Result<f64> {
    if s.d() != 2 {
        return Err(Error::Domain(format!(
            "quadrature oracle needs d = 2, got {}",
            s.d()
        )));
    }
    let (a, b) = (s.values()[0].powi(2), s.values()[1].powi(2));
    let q_bar = 0.5 * (a + b);
    let integrand = |t: f64| {
        let r = (a * t + b * (1.0 - t)) / q_bar;
        if r <= 0.0 {
            0.0
        } else {
            r * r.log2()
        }
    };
    Ok(quadrature::double_exponential::integrate(integrand, 0.0, 1.0, 1e-12).integral)
}
