//! Outcome averages, the optimal measurements on the averaged upper boundaries, and
//! classification against the four optimality conditions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{info_gain_projective, isotropic_operators, FamilyKL};
use crate::measurement::{DiagonalOperator, Measurement, ParticleSet};
use crate::measures::{measures, MeasureVector};
use crate::region::{boundary_polyline, tangent_point, PlaneKind, RegionPoint};

/// Probability-weighted means of the four measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedMeasures {
    pub info_gain: f64,
    pub estimation_fidelity: f64,
    pub operation_fidelity: f64,
    pub reversibility: f64,
}

impl AveragedMeasures {
    fn weighted(items: impl Iterator<Item = (f64, MeasureVector)>) -> Self {
        let mut acc = Self {
            info_gain: 0.0,
            estimation_fidelity: 0.0,
            operation_fidelity: 0.0,
            reversibility: 0.0,
        };
        for (w, m) in items {
            acc.info_gain += w * m.info_gain;
            acc.estimation_fidelity += w * m.estimation_fidelity;
            acc.operation_fidelity += w * m.operation_fidelity;
            acc.reversibility += w * m.reversibility;
        }
        acc
    }

    /// `(x, y)` on `plane`.
    pub fn point(&self, plane: PlaneKind) -> (f64, f64) {
        plane.project(&MeasureVector {
            info_gain: self.info_gain,
            estimation_fidelity: self.estimation_fidelity,
            operation_fidelity: self.operation_fidelity,
            reversibility: self.reversibility,
            outcome_probability: 1.0,
        })
    }
}

/// Mass-weighted mean of the particles' measures.
pub fn center_of_mass(set: &ParticleSet) -> AveragedMeasures {
    AveragedMeasures::weighted(
        set.particles()
            .iter()
            .map(|p| (p.mass, measures(&p.spectrum))),
    )
}

/// `Σ_m p(m) X(m)` for each measure `X`; the measurement must be complete.
pub fn average_measures(m: &Measurement) -> Result<AveragedMeasures> {
    m.require_complete()?;
    Ok(AveragedMeasures::weighted(m.operators().iter().map(|op| {
        (op.probability(), measures(&op.spectrum().expect("valid")))
    })))
}

fn identity_operator(d: usize, weight: f64) -> DiagonalOperator {
    DiagonalOperator {
        diag: vec![weight.sqrt(); d],
        shift: 0,
    }
}

fn check_dimension(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::Domain(format!(
            "dimension must be at least {min}, got {d}"
        )));
    }
    Ok(())
}

fn fidelity_on_curve(d: usize, lambda: f64) -> f64 {
    let n = (d - 1) as f64;
    let sigma_sq = 1.0 + n * lambda * lambda;
    let tau = 1.0 + n * lambda;
    (sigma_sq + tau * tau) / ((d + 1) as f64 * sigma_sq)
}

/// `λ` in `[0, 1]` with `F(M_{1,d−1}(λ)) = target`, by bisection; `F` increases with `λ`.
fn lambda_for_fidelity(d: usize, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fidelity_on_curve(d, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Measurement maximizing the average information gain at average operation
/// fidelity `target`.
///
/// Below `F_T` this is the isotropic measurement reaching `target`; above it the
/// isotropic measurement at `λ_T` is mixed with the identity.
pub fn optimal_if(d: usize, target: f64) -> Result<Measurement> {
    check_dimension(d, 3)?;
    let f_min = 2.0 / (d + 1) as f64;
    if !(target >= f_min && target <= 1.0) {
        return Err(Error::Domain(format!(
            "target fidelity {target} is outside [{f_min}, 1] for d={d}"
        )));
    }
    let t = tangent_point(d)?;
    let operators = if target <= t.fidelity_t {
        isotropic_operators(d, lambda_for_fidelity(d, target), 1.0)
    } else {
        let q = (1.0 - target) / (1.0 - t.fidelity_t);
        let mut ops = if q > 0.0 {
            isotropic_operators(d, t.lambda_t, q)
        } else {
            Vec::new()
        };
        if q < 1.0 {
            ops.push(identity_operator(d, 1.0 - q));
        }
        ops
    };
    Measurement::new(d, operators)
}

/// Measurement maximizing the average information gain at average reversibility
/// `target`: the rank-one projectors mixed with the identity, `q = 1 − target`.
pub fn optimal_ir(d: usize, target: f64) -> Result<Measurement> {
    check_dimension(d, 2)?;
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Domain(format!(
            "target reversibility {target} is outside [0, 1]"
        )));
    }
    let q = 1.0 - target;
    let mut ops = Vec::new();
    if q > 0.0 {
        ops.extend(isotropic_operators(d, 0.0, q));
    }
    if q < 1.0 {
        ops.push(identity_operator(d, 1.0 - q));
    }
    Measurement::new(d, ops)
}

/// Largest average information gain at average operation fidelity `f`: the
/// `(1, d−1)` curve up to `F_T`, then the chord from `T` to `P_d`.
pub fn max_average_info_at_fidelity(d: usize, f: f64) -> Result<f64> {
    check_dimension(d, 3)?;
    let t = tangent_point(d)?;
    if f <= t.fidelity_t {
        let lambda = lambda_for_fidelity(d, f);
        Ok(crate::families::info_gain_1l(d, d - 1, lambda)?)
    } else {
        Ok(t.info_t * (1.0 - f) / (1.0 - t.fidelity_t))
    }
}

/// Largest average information gain at average reversibility `r`: the chord from
/// `P_1` to `P_d`.
pub fn max_average_info_at_reversibility(d: usize, r: f64) -> Result<f64> {
    Ok((1.0 - r) * info_gain_projective(d, 1)?)
}

/// The four optimality conditions: information (`G` or `I`) against disturbance
/// (`F` or `R`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    GF,
    GR,
    IF,
    IR,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::GF => "GF",
            Condition::GR => "GR",
            Condition::IF => "IF",
            Condition::IR => "IR",
        };
        f.write_str(s)
    }
}

/// Distance in plane coordinates below which a point counts as on a curve.
pub const CURVE_TOL: f64 = 1e-6;
const CURVE_SAMPLES: usize = 10_000;
const SAME_POINT_TOL: f64 = 1e-9;

fn distance_to_polyline(p: (f64, f64), line: &[RegionPoint]) -> f64 {
    line.windows(2)
        .map(|w| {
            let (ax, ay, bx, by) = (w[0].x, w[0].y, w[1].x, w[1].y);
            let (dx, dy) = (bx - ax, by - ay);
            let len_sq = dx * dx + dy * dy;
            let t = if len_sq == 0.0 {
                0.0
            } else {
                (((p.0 - ax) * dx + (p.1 - ay) * dy) / len_sq).clamp(0.0, 1.0)
            };
            (p.0 - ax - t * dx).hypot(p.1 - ay - t * dy)
        })
        .fold(f64::INFINITY, f64::min)
}

fn same_point(a: &MeasureVector, b: &MeasureVector, tol: f64) -> bool {
    (a.info_gain - b.info_gain).abs() <= tol
        && (a.estimation_fidelity - b.estimation_fidelity).abs() <= tol
        && (a.operation_fidelity - b.operation_fidelity).abs() <= tol
        && (a.reversibility - b.reversibility).abs() <= tol
}

/// Which of the four sufficient optimality conditions the measurement meets.
///
/// * `GR`: every outcome lies on the `(1, d−1)` curve.
/// * `GF`: additionally all outcomes sit at one point.
/// * `IF`: all outcomes at one point of the curve with `λ ≤ λ_T`, or every outcome at
///   `P_d` or `T`; for `d = 2` the same as `GF`.
/// * `IR`: every outcome at `P_1` or `P_d`.
pub fn classify_optimality(m: &Measurement) -> Result<BTreeSet<Condition>> {
    m.require_complete()?;
    let d = m.d();
    let outcomes = m.outcome_measures();
    let curves: Vec<(PlaneKind, Vec<RegionPoint>)> = PlaneKind::ALL
        .iter()
        .map(|&plane| {
            let line = boundary_polyline(d, plane, 1, d - 1, CURVE_SAMPLES)
                .expect("(1, d-1) is admissible")
                .points;
            (plane, line)
        })
        .collect();
    let on_curve = |v: &MeasureVector| {
        curves
            .iter()
            .all(|(plane, line)| distance_to_polyline(plane.project(v), line) <= CURVE_TOL)
    };
    let family_point = |lambda: f64| {
        measures(
            &FamilyKL::new(d, 1, d - 1, lambda)
                .expect("admissible")
                .spectrum(),
        )
    };
    let p1 = family_point(0.0);
    let pd = family_point(1.0);

    let all_on_curve = outcomes.iter().all(on_curve);
    let identical = outcomes
        .iter()
        .all(|v| same_point(v, &outcomes[0], SAME_POINT_TOL));

    let mut out = BTreeSet::new();
    if all_on_curve {
        out.insert(Condition::GR);
        if identical {
            out.insert(Condition::GF);
        }
    }
    let meets_if = if d == 2 {
        all_on_curve && identical
    } else {
        let t = tangent_point(d)?;
        let tp = family_point(t.lambda_t);
        let lambda = lambda_for_fidelity(d, outcomes[0].operation_fidelity);
        let single = all_on_curve && identical && lambda <= t.lambda_t + 1e-9;
        let split = outcomes
            .iter()
            .all(|v| same_point(v, &pd, CURVE_TOL) || same_point(v, &tp, CURVE_TOL));
        single || split
    };
    if meets_if {
        out.insert(Condition::IF);
    }
    if outcomes
        .iter()
        .all(|v| same_point(v, &p1, CURVE_TOL) || same_point(v, &pd, CURVE_TOL))
    {
        out.insert(Condition::IR);
    }
    Ok(out)
}
