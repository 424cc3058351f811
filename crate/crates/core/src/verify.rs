//! Batch verification suites: first-order optimality of the boundary families,
//! agreement with the independent oracles, and the measure invariants.
//!
//! Each suite returns a [`SuiteReport`] of named checks so callers can print or
//! serialize the outcome without re-running anything.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::families::FamilyKL;
use crate::kkt::{self, kkt_cases, kkt_check, kkt_report, Problem};
use crate::measures::{info_gain, info_gain_ceiling, measures, MeasureVector};
use crate::oracle::{mc_measures, quad_info_gain_d2};
use crate::spectrum::SingularSpectrum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    /// Largest deviation seen, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(name: impl Into<String>, cases: u64, failures: u64, worst: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: failures == 0,
            cases,
            failures,
            worst,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckResult>) -> Self {
        Self {
            suite: suite.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// `λ ∈ {0.1, 0.2, …, 0.9}`.
pub fn lambda_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Off-family shift used by the negative control.
pub const CONTROL_SHIFT: f64 = 0.05;
/// Smallest stationarity residual the perturbed point must show.
pub const CONTROL_MIN_RESIDUAL: f64 = 1e-3;

/// Every admissible problem for `d ∈ 3..=8` and `λ ∈ {0.1, …, 0.9}`, plus the
/// off-family negative control.
pub fn kkt_suite() -> Result<SuiteReport> {
    let cases: Vec<(usize, usize, usize, f64, Problem)> = (3..=8)
        .flat_map(|d| {
            kkt_cases(d, &lambda_grid())
                .into_iter()
                .map(move |(k, l, lam, p)| (d, k, l, lam, p))
        })
        .collect();
    let reports: Vec<kkt::KKTReport> = cases
        .par_iter()
        .map(|&(d, k, l, lambda, problem)| kkt_report(d, k, l, lambda, problem))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for problem in Problem::ALL {
        let of: Vec<&kkt::KKTReport> = reports.iter().filter(|r| r.problem == problem).collect();
        let failures = of.iter().filter(|r| !r.passed()).count() as u64;
        let worst = of
            .iter()
            .map(|r| r.stationarity_residual)
            .fold(0.0, f64::max);
        checks.push(CheckResult::new(
            format!("{problem} stationarity, signs, slackness"),
            of.len() as u64,
            failures,
            worst,
            kkt::STATIONARITY_TOL,
        ));
    }
    let residual = negative_control_residual()?;
    checks.push(CheckResult {
        name: "off-family control fails stationarity".into(),
        passed: residual >= CONTROL_MIN_RESIDUAL,
        cases: 1,
        failures: u64::from(residual < CONTROL_MIN_RESIDUAL),
        worst: residual,
        tolerance: CONTROL_MIN_RESIDUAL,
    });
    Ok(SuiteReport::new("kkt", checks))
}

/// Stationarity residual of the `F-max` conditions at `M^(4)_{1,3}(0.5)` with its
/// second singular value moved off the family by [`CONTROL_SHIFT`].
pub fn negative_control_residual() -> Result<f64> {
    let family = FamilyKL::new(4, 1, 3, 0.5)?;
    let mut values = family.spectrum().values().to_vec();
    values[1] += CONTROL_SHIFT;
    Ok(kkt_check(&family, &values, Problem::FidelityMax)?.stationarity_residual)
}

/// Uniform spectrum on `(0, 1]^d`.
pub fn random_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SingularSpectrum {
    let values = (0..d).map(|_| 1.0 - rng.gen::<f64>()).collect();
    SingularSpectrum::new(values).expect("entries lie in (0, 1]")
}

/// Random spectrum that often carries ties, zeros or a unit entry.
pub fn random_structured_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SingularSpectrum {
    let mut values: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    match rng.gen_range(0..4) {
        0 => {}
        1 => {
            let v = values[0];
            let count = rng.gen_range(2..=d);
            values[..count].iter_mut().for_each(|x| *x = v);
        }
        2 => {
            let zeros = rng.gen_range(1..d);
            values[..zeros].iter_mut().for_each(|x| *x = 0.0);
        }
        _ => values[0] = 1.0,
    }
    if values.iter().all(|&v| v == 0.0) {
        values[0] = 1.0;
    }
    SingularSpectrum::new(values).expect("entries lie in [0, 1]")
}

/// The minimum fraction of spectra whose Monte-Carlo estimate sits within
/// [`ORACLE_SIGMAS`] standard errors of the closed form.
pub const ORACLE_PASS_FRACTION: f64 = 0.99;
pub const ORACLE_SIGMAS: f64 = 3.0;
pub const ORACLE_SPECTRA_PER_D: usize = 100;
pub const QUADRATURE_TOL: f64 = 1e-6;

/// Monte-Carlo `G` and `F` against the closed forms for `d ∈ 2..=6`, the exact
/// oracle `R`, and the qubit quadrature of `I` on a 100-point grid.
pub fn oracle_suite(n: u64, seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 2..=6 {
        let spectra: Vec<SingularSpectrum> = (0..ORACLE_SPECTRA_PER_D)
            .map(|_| random_spectrum(d, &mut rng))
            .collect();
        let mut misses = [0u64; 2];
        let mut worst = [0.0f64; 2];
        let mut worst_r = 0.0f64;
        for (i, s) in spectra.iter().enumerate() {
            let est = mc_measures(s, n, seed.wrapping_add((d * 1000 + i) as u64))?;
            let exact = measures(s);
            let pairs = [
                (est.estimation_fidelity, exact.estimation_fidelity),
                (est.operation_fidelity, exact.operation_fidelity),
            ];
            for (j, (e, value)) in pairs.into_iter().enumerate() {
                let z = (e.mean - value).abs() / e.std_error.max(f64::MIN_POSITIVE);
                worst[j] = worst[j].max(z);
                misses[j] += u64::from(z > ORACLE_SIGMAS);
            }
            worst_r = worst_r.max((est.reversibility.mean - exact.reversibility).abs());
        }
        let allowed = ((1.0 - ORACLE_PASS_FRACTION) * ORACLE_SPECTRA_PER_D as f64).round() as u64;
        for (j, name) in ["G", "F"].iter().enumerate() {
            checks.push(CheckResult {
                name: format!("Monte-Carlo {name} within {ORACLE_SIGMAS} standard errors, d={d}"),
                passed: misses[j] <= allowed,
                cases: ORACLE_SPECTRA_PER_D as u64,
                failures: misses[j],
                worst: worst[j],
                tolerance: ORACLE_SIGMAS,
            });
        }
        checks.push(CheckResult::new(
            format!("oracle R exact, d={d}"),
            ORACLE_SPECTRA_PER_D as u64,
            u64::from(worst_r > 1e-12),
            worst_r,
            1e-12,
        ));
    }
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..100 {
        let s = SingularSpectrum::new(vec![1.0, i as f64 / 99.0])?;
        let diff = (quad_info_gain_d2(&s)? - info_gain(&s)).abs();
        worst = worst.max(diff);
        failures += u64::from(diff > QUADRATURE_TOL);
    }
    checks.push(CheckResult::new(
        "qubit quadrature of I",
        100,
        failures,
        worst,
        QUADRATURE_TOL,
    ));
    Ok(SuiteReport::new("oracle", checks))
}

pub const BOX_SPECTRA_PER_D: usize = 100_000;
pub const INVARIANCE_CASES: usize = 10_000;
pub const INVARIANCE_TOL: f64 = 1e-12;
pub const FAMILY_CASES: usize = 1_000;
pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const CLUSTER_SPREAD: f64 = 1e-5;
pub const CLUSTER_TOL: f64 = 1e-6;
pub const EULER_TOL: f64 = 1e-6;

/// Whether `m` lies in the stated range of every measure, compared without slack.
pub fn in_box(d: usize, m: &MeasureVector) -> bool {
    let df = d as f64;
    (0.0..=info_gain_ceiling(d)).contains(&m.info_gain)
        && (1.0 / df..=2.0 / (df + 1.0)).contains(&m.estimation_fidelity)
        && (2.0 / (df + 1.0)..=1.0).contains(&m.operation_fidelity)
        && (0.0..=1.0).contains(&m.reversibility)
        && m.outcome_probability > 0.0
        && m.outcome_probability <= 1.0
}

fn max_abs_diff(a: &MeasureVector, b: &MeasureVector) -> f64 {
    [
        a.info_gain - b.info_gain,
        a.estimation_fidelity - b.estimation_fidelity,
        a.operation_fidelity - b.operation_fidelity,
        a.reversibility - b.reversibility,
    ]
    .iter()
    .fold(0.0, |w, v| w.max(v.abs()))
}

/// Range bounds on uniform random spectra for every `d ∈ 2..=8`.
pub fn box_check(seed: u64, per_d: usize) -> CheckResult {
    let results: Vec<u64> = (2..=8usize)
        .into_par_iter()
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(d as u64);
            (0..per_d)
                .filter(|_| !in_box(d, &measures(&random_spectrum(d, &mut rng))))
                .count() as u64
        })
        .collect();
    CheckResult::new(
        "range bounds",
        7 * per_d as u64,
        results.iter().sum(),
        0.0,
        0.0,
    )
}

/// Interchange and rescaling invariance and quadratic scaling of `p(m)`.
pub fn invariance_checks(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (mut perm_worst, mut scale_worst, mut prob_worst) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let d = rng.gen_range(2..=8);
        let s = random_structured_spectrum(d, &mut rng);
        let base = measures(&s);
        let mut permuted = s.values().to_vec();
        for i in (1..d).rev() {
            permuted.swap(i, rng.gen_range(0..=i));
        }
        let p =
            measures(&SingularSpectrum::new(permuted).expect("permutation of a valid spectrum"));
        perm_worst = perm_worst.max(max_abs_diff(&base, &p));
        perm_worst = perm_worst.max((base.outcome_probability - p.outcome_probability).abs());
        let c = 1.0 - rng.gen::<f64>();
        let scaled = measures(&s.scaled(c).expect("c in (0, 1]"));
        scale_worst = scale_worst.max(max_abs_diff(&base, &scaled));
        let prob = (scaled.outcome_probability - c * c * base.outcome_probability).abs();
        prob_worst = prob_worst.max(prob / base.outcome_probability);
    }
    let n = cases as u64;
    vec![
        CheckResult::new(
            "interchange invariance",
            n,
            u64::from(perm_worst > INVARIANCE_TOL),
            perm_worst,
            INVARIANCE_TOL,
        ),
        CheckResult::new(
            "rescaling invariance",
            n,
            u64::from(scale_worst > INVARIANCE_TOL),
            scale_worst,
            INVARIANCE_TOL,
        ),
        CheckResult::new(
            "p(m) scales as c^2 (relative)",
            n,
            u64::from(prob_worst > INVARIANCE_TOL),
            prob_worst,
            INVARIANCE_TOL,
        ),
    ]
}

/// Random `(k,1)`, `(1,l)` and projector family points.
fn random_closed_form_family<R: Rng + ?Sized>(rng: &mut R) -> FamilyKL {
    let d = rng.gen_range(2..=8);
    let lambda = match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen::<f64>(),
    };
    let (k, l) = if rng.gen_bool(0.5) {
        (rng.gen_range(1..d), 1)
    } else {
        (1, rng.gen_range(1..d))
    };
    FamilyKL::new(d, k, l, lambda).expect("admissible by construction")
}

/// The general evaluator against the closed forms, exactly on the family and
/// with the `λ` block spread by up to [`CLUSTER_SPREAD`].
pub fn degenerate_limit_checks(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa11);
    let (mut exact_worst, mut spread_worst) = (0.0f64, 0.0f64);
    let mut spread_cases = 0u64;
    for _ in 0..cases {
        let f = random_closed_form_family(&mut rng);
        let closed = f.closed_form_info_gain().expect("family has a closed form");
        exact_worst = exact_worst.max((info_gain(&f.spectrum()) - closed).abs());
        if f.l < 2 || f.lambda < 2.0 * CLUSTER_SPREAD || f.lambda > 1.0 - 2.0 * CLUSTER_SPREAD {
            continue;
        }
        // Zero-mean spread of the l-fold block, so the first-order change cancels.
        let mut values = f.spectrum().values().to_vec();
        let offsets: Vec<f64> = (0..f.l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = offsets.iter().sum::<f64>() / f.l as f64;
        let width = offsets
            .iter()
            .map(|o| (o - mean).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for (v, o) in values[f.k..f.k + f.l].iter_mut().zip(&offsets) {
            *v += CLUSTER_SPREAD * (o - mean) / width;
        }
        let s = SingularSpectrum::new(values).expect("spread stays inside (0, 1)");
        spread_worst = spread_worst.max((info_gain(&s) - closed).abs());
        spread_cases += 1;
    }
    vec![
        CheckResult::new(
            "general I matches closed forms",
            cases as u64,
            u64::from(exact_worst > CLOSED_FORM_TOL),
            exact_worst,
            CLOSED_FORM_TOL,
        ),
        CheckResult::new(
            "general I under cluster spread 1e-5",
            spread_cases,
            u64::from(spread_worst > CLUSTER_TOL),
            spread_worst,
            CLUSTER_TOL,
        ),
    ]
}

/// Euler's identity `Σ λ_i ∂I/∂λ_i = 0` at interior random spectra.
pub fn euler_check(seed: u64, cases: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe1e1);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let d = rng.gen_range(2..=8);
        let values = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s = SingularSpectrum::new(values).expect("interior spectrum");
        worst = worst.max(kkt::euler_residual(&s));
    }
    CheckResult::new(
        "Euler identity",
        cases as u64,
        u64::from(worst > EULER_TOL),
        worst,
        EULER_TOL,
    )
}

/// Range bounds, invariances, degenerate limits and Euler's identity.
pub fn invariants_suite(seed: u64) -> SuiteReport {
    let mut checks = vec![box_check(seed, BOX_SPECTRA_PER_D)];
    checks.extend(invariance_checks(seed, INVARIANCE_CASES));
    checks.extend(degenerate_limit_checks(seed, FAMILY_CASES));
    checks.push(euler_check(seed, 1_000));
    SuiteReport::new("invariants", checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_fails_stationarity() {
        assert!(negative_control_residual().unwrap() >= CONTROL_MIN_RESIDUAL);
    }

    #[test]
    fn small_invariant_runs_pass() {
        assert!(box_check(1, 2_000).passed);
        assert!(invariance_checks(1, 500).iter().all(|c| c.passed));
        let limits = degenerate_limit_checks(1, 300);
        assert!(limits.iter().all(|c| c.passed), "{limits:?}");
        assert!(euler_check(1, 100).passed);
    }

    #[test]
    fn box_rejects_out_of_range() {
        let mut m = measures(&SingularSpectrum::new(vec![1.0, 0.5]).unwrap());
        assert!(in_box(2, &m));
        m.operation_fidelity = 1.0 + 1e-15;
        assert!(!in_box(2, &m));
    }
}
