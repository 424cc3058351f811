//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use infodist::region::{check_dominance, curvature, tangent_point};
use infodist::verify::{
    box_check, degenerate_limit_checks, invariance_checks, kkt_suite, negative_control_residual,
    oracle_suite, random_spectrum, CheckResult, SuiteReport, BOX_SPECTRA_PER_D,
    CONTROL_MIN_RESIDUAL, FAMILY_CASES, INVARIANCE_CASES,
};
use infodist::{
    average_measures, center_of_mass, classify_optimality, construct_measurement,
    info_gain_projective, isotropic_measurement, optimal_if, optimal_ir, Condition, Particle,
    ParticleSet, SingularSpectrum,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;
const DOMINANCE_TOL: f64 = 1e-6;
const CHORD_TOL: f64 = 1e-9;
const COMPLETENESS_TOL: f64 = 1e-12;

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn summarize(checks: &[CheckResult]) -> Outcome {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "{} ({} of {} failed, worst {:.3e})",
                c.name, c.failures, c.cases, c.worst
            )
        })
        .collect();
    let cases: u64 = checks.iter().map(|c| c.cases).sum();
    if failed.is_empty() {
        let worst = checks
            .iter()
            .map(|c| format!("{} worst {:.3e}/{:.0e}", c.name, c.worst, c.tolerance))
            .collect::<Vec<_>>()
            .join("; ");
        Outcome::new(
            true,
            format!("{} checks over {cases} cases; {worst}", checks.len()),
        )
    } else {
        Outcome::new(false, failed.join("; "))
    }
}

fn tangent_landmark(
    d: usize,
    lambda_range: (f64, f64),
    gap_range: (f64, f64),
    limit: Duration,
) -> Outcome {
    let start = Instant::now();
    let t = match tangent_point(d) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let inside = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
    Outcome::new(
        inside(t.lambda_t, lambda_range) && inside(t.max_gap, gap_range) && elapsed < limit,
        format!(
            "d={d}: lambda_T = {:.4} in [{}, {}], max gap = {:.4e} in [{:.1e}, {:.1e}], {:.2?} < {limit:?}",
            t.lambda_t, lambda_range.0, lambda_range.1, t.max_gap, gap_range.0, gap_range.1, elapsed
        ),
    )
}

fn dominance_sweep() -> Outcome {
    let start = Instant::now();
    let runs = (2..=6).map(|d| (d, 0.01)).chain([(7, 0.02), (8, 0.02)]);
    let mut points = 0u64;
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    for (d, step) in runs {
        match check_dominance(d, step, DOMINANCE_TOL) {
            Ok(report) => {
                points += report.points;
                for p in &report.planes {
                    worst = worst.max(p.max_upper_excess).max(p.max_lower_excess);
                    if p.upper_violations + p.lower_violations > 0 {
                        problems.push(format!(
                            "d={d} {}: {} above, {} below",
                            p.plane, p.upper_violations, p.lower_violations
                        ));
                    }
                }
            }
            Err(e) => problems.push(format!("d={d}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(600);
    if elapsed >= limit {
        problems.push(format!("took {elapsed:.1?}, limit {limit:?}"));
    }
    let detail = format!(
        "{points} points on 4 planes, largest excess {worst:.3e} (tolerance {DOMINANCE_TOL:.0e}), {elapsed:.1?}"
    );
    if problems.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{detail}; {}", problems.join("; ")))
    }
}

fn suite(report: infodist::Result<SuiteReport>) -> Outcome {
    match report {
        Ok(r) => summarize(&r.checks),
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn kkt() -> Outcome {
    let mut out = suite(kkt_suite());
    match negative_control_residual() {
        Ok(r) => {
            out.passed &= r >= CONTROL_MIN_RESIDUAL;
            out.detail = format!("{}; control residual {r:.3e}", out.detail);
        }
        Err(e) => {
            out.passed = false;
            out.detail = format!("{}; control: {e}", out.detail);
        }
    }
    out
}

fn random_particles(rng: &mut ChaCha8Rng, d: usize) -> ParticleSet {
    let count = rng.gen_range(1..=3);
    let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let particles = weights
        .iter()
        .map(|w| Particle::new(&random_spectrum(d, rng), w / total).expect("valid particle"))
        .collect();
    ParticleSet::new(particles).expect("masses sum to one")
}

fn construction() -> infodist::Result<Outcome> {
    let mut problems = Vec::new();

    // Two half-mass particles at P_1 and P_4.
    let half = 0.5f64.sqrt();
    let set = ParticleSet::new(vec![
        Particle::new(&SingularSpectrum::new(vec![1.0, 0.0, 0.0, 0.0])?, 0.5)?,
        Particle::new(&SingularSpectrum::new(vec![1.0; 4])?, 0.5)?,
    ])?;
    let five = construct_measurement(&set);
    let mut diags: Vec<Vec<f64>> = five.operators().iter().map(|o| o.diag.clone()).collect();
    diags.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut expected: Vec<Vec<f64>> = (0..4)
        .map(|m| (0..4).map(|i| if i == m { half } else { 0.0 }).collect())
        .chain([vec![half; 4]])
        .collect();
    expected.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let five_ok = diags.len() == 5
        && diags
            .iter()
            .zip(&expected)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-15));
    if !five_ok {
        problems.push(format!("five-outcome example gave {diags:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_residual = five.completeness_residual();
    let mut worst_average = 0.0f64;
    for case in 0..600 {
        let d = 2 + case % 7;
        let set = random_particles(&mut rng, d);
        let m = construct_measurement(&set);
        worst_residual = worst_residual.max(m.completeness_residual());
        if m.operators().len() > set.particles().len() * d {
            problems.push(format!(
                "{} operators for {} particles",
                m.operators().len(),
                set.particles().len()
            ));
        }
        let (a, c) = (average_measures(&m)?, center_of_mass(&set));
        worst_average = worst_average
            .max((a.info_gain - c.info_gain).abs())
            .max((a.estimation_fidelity - c.estimation_fidelity).abs())
            .max((a.operation_fidelity - c.operation_fidelity).abs())
            .max((a.reversibility - c.reversibility).abs());
    }
    if worst_residual > COMPLETENESS_TOL {
        problems.push(format!("completeness residual {worst_residual:.3e}"));
    }
    if worst_average > 1e-10 {
        problems.push(format!(
            "averages differ from center of mass by {worst_average:.3e}"
        ));
    }

    let mut worst_chord = 0.0f64;
    for d in 3..=8 {
        let t = tangent_point(d)?;
        let ip1 = info_gain_projective(d, 1)?;
        for step in 0..=10 {
            let q = step as f64 / 10.0;
            let target_f = 1.0 - q * (1.0 - t.fidelity_t);
            let m = optimal_if(d, target_f)?;
            worst_residual = worst_residual.max(m.completeness_residual());
            let a = average_measures(&m)?;
            let chord = t.info_t * (1.0 - a.operation_fidelity) / (1.0 - t.fidelity_t);
            worst_chord = worst_chord
                .max((a.info_gain - chord).abs())
                .max((a.operation_fidelity - target_f).abs());

            let m = optimal_ir(d, 1.0 - q)?;
            worst_residual = worst_residual.max(m.completeness_residual());
            let a = average_measures(&m)?;
            worst_chord = worst_chord
                .max((a.info_gain - (1.0 - a.reversibility) * ip1).abs())
                .max((a.reversibility - (1.0 - q)).abs());
        }
    }
    if worst_residual > COMPLETENESS_TOL {
        problems.push(format!("optimal measurement residual {worst_residual:.3e}"));
    }
    if worst_chord > CHORD_TOL {
        problems.push(format!("chord deviation {worst_chord:.3e}"));
    }
    let detail = format!(
        "five-outcome example {}, worst residual {worst_residual:.1e}, center-of-mass gap {worst_average:.1e}, chord gap {worst_chord:.1e} over q grids d=3..8",
        if five_ok { "reproduced" } else { "wrong" }
    );
    Ok(if problems.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{detail}; {}", problems.join("; ")))
    })
}

fn curvature_signs() -> Outcome {
    let lambdas = [0.9, 0.95, 0.99];
    let mut problems = Vec::new();
    for d in 2..=8 {
        for &lambda in &lambdas {
            match curvature(d, lambda) {
                Ok(k) if (k > 0.0) == (d >= 3) => {}
                Ok(k) => problems.push(format!("d={d} lambda={lambda}: {k:.3e}")),
                Err(e) => problems.push(format!("d={d} lambda={lambda}: {e}")),
            }
        }
    }
    Outcome::new(
        problems.is_empty(),
        if problems.is_empty() {
            format!("d2F/dI2 > 0 for d=3..8 and < 0 for d=2 at lambda in {lambdas:?}")
        } else {
            problems.join("; ")
        },
    )
}

fn classification() -> infodist::Result<Outcome> {
    use Condition::*;
    let set_of = |c: &[Condition]| c.iter().copied().collect::<BTreeSet<_>>();
    let all = set_of(&[GF, GR, IF, IR]);
    let mut cases = Vec::new();
    for d in [3, 4, 8] {
        let t = tangent_point(d)?;
        cases.push((
            format!("isotropic d={d} below T"),
            isotropic_measurement(d, 0.5 * t.lambda_t)?,
            set_of(&[GF, GR, IF]),
        ));
        cases.push((
            format!("isotropic d={d} above T"),
            isotropic_measurement(d, 0.5 * (1.0 + t.lambda_t))?,
            set_of(&[GF, GR]),
        ));
        cases.push((
            format!("optimal IR d={d}"),
            optimal_ir(d, 0.5)?,
            set_of(&[GR, IR]),
        ));
        cases.push((
            format!("optimal IF d={d}"),
            optimal_if(d, 0.5 * (1.0 + t.fidelity_t))?,
            set_of(&[GR, IF]),
        ));
        cases.push((format!("strongest d={d}"), optimal_ir(d, 0.0)?, all.clone()));
        cases.push((format!("weakest d={d}"), optimal_ir(d, 1.0)?, all.clone()));
    }
    let total = cases.len();
    let mut wrong = Vec::new();
    for (name, m, expected) in cases {
        let got = classify_optimality(&m)?;
        if got != expected {
            wrong.push(format!("{name}: {got:?}, expected {expected:?}"));
        }
    }
    Ok(if wrong.is_empty() {
        Outcome::new(true, format!("{total} measurements classified as expected"))
    } else {
        Outcome::new(false, wrong.join("; "))
    })
}

fn flatten(r: infodist::Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| Outcome::new(false, e.to_string()))
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--quiet`; listing is the only one that matters.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: Vec<Criterion> = vec![
        (
            "tangent landmark d=4",
            Box::new(|| {
                tangent_landmark(4, (0.294, 0.304), (3.0e-3, 4.0e-3), Duration::from_secs(5))
            }),
        ),
        (
            "tangent landmark d=8",
            Box::new(|| {
                tangent_landmark(8, (0.115, 0.125), (2.3e-2, 2.9e-2), Duration::from_secs(10))
            }),
        ),
        ("boundary dominance sweep", Box::new(dominance_sweep)),
        (
            "analytic range bounds",
            Box::new(|| summarize(&[box_check(SEED, BOX_SPECTRA_PER_D)])),
        ),
        (
            "invariance",
            Box::new(|| summarize(&invariance_checks(SEED, INVARIANCE_CASES))),
        ),
        (
            "degenerate limits",
            Box::new(|| summarize(&degenerate_limit_checks(SEED, FAMILY_CASES))),
        ),
        (
            "oracle equivalence",
            Box::new(|| suite(oracle_suite(1_000_000, SEED))),
        ),
        ("first-order optimality", Box::new(kkt)),
        ("construction", Box::new(|| flatten(construction()))),
        ("curvature signs", Box::new(curvature_signs)),
        (
            "optimality classification",
            Box::new(|| flatten(classification())),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        failures += usize::from(!outcome.passed);
        println!(
            "{verdict} criterion {}: {name}: {} [{:.1?}]",
            i + 1,
            outcome.detail,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
