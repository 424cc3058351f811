use serde::{Deserialize, Serialize};

use super::{DisturbanceAxis, InfoAxis, PlaneKind, Polyline, RegionPoint};
use crate::error::{Error, Result};
use crate::families::{info_gain_1l, info_gain_k1, FamilyKL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Upper,
    Lower,
}

/// `(k, l)` families whose curves form the declared boundary, ordered by increasing `x`.
pub(crate) fn boundary_families(d: usize, plane: PlaneKind, bound: Bound) -> Vec<(usize, usize)> {
    match (bound, plane.disturbance) {
        (Bound::Upper, _) => vec![(1, d - 1)],
        (Bound::Lower, DisturbanceAxis::OperationFidelity) => (1..d).map(|k| (k, 1)).collect(),
        (Bound::Lower, DisturbanceAxis::Reversibility) => vec![(d - 1, 1)],
    }
}

/// Samples `M_{k,l}(λ)` at `n_samples` equally spaced `λ` in `[0, 1]`.
pub fn boundary_polyline(
    d: usize,
    plane: PlaneKind,
    k: usize,
    l: usize,
    n_samples: usize,
) -> Result<Polyline> {
    FamilyKL::new(d, k, l, 0.0)?;
    if n_samples < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    let points = (0..n_samples)
        .map(|i| {
            let lambda = i as f64 / (n_samples - 1) as f64;
            let f = FamilyKL::new(d, k, l, lambda).expect("checked above");
            RegionPoint::of(plane, f.spectrum())
        })
        .collect();
    Ok(Polyline {
        label: format!("({k},{l})"),
        points,
    })
}

/// The upper curve followed by the lower chain, each labelled with its bound.
pub fn declared_boundaries(d: usize, plane: PlaneKind, n_samples: usize) -> Result<Vec<Polyline>> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let mut out = Vec::new();
    for (bound, name) in [(Bound::Upper, "upper"), (Bound::Lower, "lower")] {
        for (k, l) in boundary_families(d, plane, bound) {
            let mut p = boundary_polyline(d, plane, k, l, n_samples)?;
            p.label = format!("{name} {}", p.label);
            out.push(p);
        }
    }
    Ok(out)
}

/// Plane coordinates of `M_{k,l}(λ)` from the family's closed forms.
pub(crate) fn family_point(
    d: usize,
    k: usize,
    l: usize,
    lambda: f64,
    plane: PlaneKind,
) -> (f64, f64) {
    let (kf, lf) = (k as f64, l as f64);
    let sigma_sq = kf + lf * lambda * lambda;
    let tau = kf + lf * lambda;
    let x = match plane.disturbance {
        DisturbanceAxis::OperationFidelity => (sigma_sq + tau * tau) / ((d + 1) as f64 * sigma_sq),
        DisturbanceAxis::Reversibility if k + l == d => d as f64 * lambda * lambda / sigma_sq,
        DisturbanceAxis::Reversibility => 0.0,
    };
    let y = match plane.info {
        InfoAxis::EstimationFidelity => (sigma_sq + 1.0) / ((d + 1) as f64 * sigma_sq),
        InfoAxis::InfoGain => family_info_gain(d, k, l, lambda),
    };
    (x, y)
}

pub(crate) fn family_info_gain(d: usize, k: usize, l: usize, lambda: f64) -> f64 {
    if l == 1 {
        info_gain_k1(d, k, lambda).expect("admissible family")
    } else if k == 1 {
        info_gain_1l(d, l, lambda).expect("admissible family")
    } else {
        crate::measures::info_gain(
            &FamilyKL::new(d, k, l, lambda)
                .expect("admissible")
                .spectrum(),
        )
    }
}

/// The `λ` at which `M_{k,l}(λ)` reaches disturbance `x`, clamped to `[0, 1]`.
pub(crate) fn family_lambda(d: usize, k: usize, l: usize, x: f64, axis: DisturbanceAxis) -> f64 {
    let (kf, lf) = (k as f64, l as f64);
    let lambda = match axis {
        DisturbanceAxis::OperationFidelity => {
            // (d+1)F − 1 = τ²/σ² = A, a quadratic in λ; the root in [0, 1] in a stable form.
            let a = ((d + 1) as f64 * x - 1.0).clamp(kf, kf + lf);
            (kf * (a - kf)) / (kf * lf + (kf * lf * a * (kf + lf - a)).max(0.0).sqrt())
        }
        DisturbanceAxis::Reversibility => {
            let r = x.clamp(0.0, 1.0);
            (kf * r / (d as f64 - lf * r)).sqrt()
        }
    };
    lambda.clamp(0.0, 1.0)
}

/// Which family of the declared boundary covers disturbance `x`.
pub(crate) fn covering_family(d: usize, plane: PlaneKind, bound: Bound, x: f64) -> (usize, usize) {
    match (bound, plane.disturbance) {
        (Bound::Lower, DisturbanceAxis::OperationFidelity) => {
            let a = (d + 1) as f64 * x - 1.0;
            ((a.floor() as i64).clamp(1, d as i64 - 1) as usize, 1)
        }
        _ => boundary_families(d, plane, bound)[0],
    }
}

pub(crate) fn boundary_at(d: usize, plane: PlaneKind, bound: Bound, x: f64) -> f64 {
    let (k, l) = covering_family(d, plane, bound, x);
    let lambda = family_lambda(d, k, l, x, plane.disturbance);
    family_point(d, k, l, lambda, plane).1
}

/// Height of the declared upper boundary at disturbance `x`.
pub fn upper_boundary_at(d: usize, plane: PlaneKind, x: f64) -> f64 {
    boundary_at(d, plane, Bound::Upper, x)
}

/// Height of the declared lower boundary at disturbance `x`.
pub fn lower_boundary_at(d: usize, plane: PlaneKind, x: f64) -> f64 {
    boundary_at(d, plane, Bound::Lower, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Projector;
    use crate::measures::measures;

    fn projector_point(d: usize, r: usize, plane: PlaneKind) -> (f64, f64) {
        plane.project(&measures(&Projector::new(d, r).unwrap().spectrum()))
    }

    #[test]
    fn gr_upper_is_straight() {
        let p = boundary_polyline(4, PlaneKind::GR, 1, 3, 201).unwrap();
        let first = &p.points[0];
        let last = p.points.last().unwrap();
        assert!((first.x - 0.0).abs() < 1e-12 && (first.y - 0.4).abs() < 1e-12);
        assert!((last.x - 1.0).abs() < 1e-12 && (last.y - 0.25).abs() < 1e-12);
        for q in &p.points {
            let chord = first.y + (last.y - first.y) * (q.x - first.x) / (last.x - first.x);
            assert!((q.y - chord).abs() <= 1e-9);
        }
    }

    #[test]
    fn lower_chain_connects_projectors() {
        for plane in PlaneKind::ALL {
            for k in 1..4 {
                let p = boundary_polyline(4, plane, k, 1, 11).unwrap();
                let (a, b) = (
                    projector_point(4, k, plane),
                    projector_point(4, k + 1, plane),
                );
                let first = &p.points[0];
                let last = p.points.last().unwrap();
                assert!((first.x - a.0).abs() < 1e-9 && (first.y - a.1).abs() < 1e-9);
                assert!((last.x - b.0).abs() < 1e-9 && (last.y - b.1).abs() < 1e-9);
            }
        }
        let d2 = boundary_polyline(2, PlaneKind::GF, 1, 1, 3).unwrap();
        assert!((d2.points[0].x - 2.0 / 3.0).abs() < 1e-15);
        assert!((d2.points[2].x - 1.0).abs() < 1e-15);
        assert!(boundary_polyline(4, PlaneKind::GF, 2, 3, 5).is_err());
        assert!(boundary_polyline(4, PlaneKind::GF, 1, 3, 1).is_err());
    }

    #[test]
    fn inversion_recovers_lambda() {
        for plane in PlaneKind::ALL {
            for &(k, l) in &[(1usize, 5usize), (5, 1), (2, 1), (3, 2)] {
                if plane.disturbance == DisturbanceAxis::Reversibility && k + l != 6 {
                    continue;
                }
                for i in 0..=20 {
                    let lambda = i as f64 / 20.0;
                    let (x, _) = family_point(6, k, l, lambda, plane);
                    let back = family_lambda(6, k, l, x, plane.disturbance);
                    assert!(
                        (back - lambda).abs() < 1e-7,
                        "{plane} ({k},{l}) {lambda} {back}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_points_match_general_measures() {
        for plane in PlaneKind::ALL {
            for lambda in [0.0, 0.3, 0.77, 1.0] {
                let f = FamilyKL::new(5, 1, 4, lambda).unwrap();
                let (x, y) = plane.project(&measures(&f.spectrum()));
                let (cx, cy) = family_point(5, 1, 4, lambda, plane);
                assert!((x - cx).abs() < 1e-13 && (y - cy).abs() < 1e-11);
            }
        }
    }
}
