//! Geometry of the `(1, d−1)` curve on the information vs operation-fidelity plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::info_gain_1l;
use crate::measures::info_gain_gradient;

/// `(I, F)` and their `λ`-derivatives along `M_{1,d−1}(λ)`.
#[derive(Debug, Clone, Copy)]
struct CurvePoint {
    info: f64,
    fidelity: f64,
    /// `1 − F` without the cancellation near `λ = 1`.
    infidelity: f64,
    d_info: f64,
    d_fidelity: f64,
}

fn curve_point(d: usize, lambda: f64) -> CurvePoint {
    let n = (d - 1) as f64;
    let sigma_sq = 1.0 + n * lambda * lambda;
    let tau = 1.0 + n * lambda;
    let fidelity = (sigma_sq + tau * tau) / ((d + 1) as f64 * sigma_sq);
    // dσ² − τ² = n(1 − λ)².
    let infidelity = n * (1.0 - lambda).powi(2) / ((d + 1) as f64 * sigma_sq);
    // d(τ²/σ²)/dλ = 2nτ(σ² − λτ)/σ⁴ and σ² − λτ = 1 − λ.
    let d_fidelity = 2.0 * n * tau * (1.0 - lambda) / ((d + 1) as f64 * sigma_sq * sigma_sq);
    let mut values = vec![lambda; d];
    values[0] = 1.0;
    let d_info = info_gain_gradient(&values)[1..].iter().sum();
    CurvePoint {
        info: info_gain_1l(d, d - 1, lambda).expect("lambda in [0, 1]"),
        fidelity,
        infidelity,
        d_info,
        d_fidelity,
    }
}

/// Slope `dF/dI` of the curve minus the slope of the chord from `P_d = (0, 1)`.
fn slope_mismatch(d: usize, lambda: f64) -> (f64, f64, f64) {
    let p = curve_point(d, lambda);
    let tangent = p.d_fidelity / p.d_info;
    let chord = -p.infidelity / p.info;
    (tangent - chord, tangent, chord)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    pub d: usize,
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    #[serde(rename = "I_T")]
    pub info_t: f64,
    #[serde(rename = "F_T")]
    pub fidelity_t: f64,
    /// Largest amount by which the chord from `P_d` through `T` exceeds the curve in `F`
    /// at equal `I`, over `λ ≥ λ_T`.
    pub max_gap: f64,
    /// Curve slope `dF/dI` at `T`.
    pub tangent_slope: f64,
    /// Slope of the chord from `P_d` to `T`.
    pub chord_slope: f64,
}

const SCAN: usize = 100;

/// Locates the point `T` where the chord from `P_d` touches the `(1, d−1)` curve.
pub fn tangent_point(d: usize) -> Result<TangentReport> {
    if d < 3 {
        return Err(Error::NoTangentPoint(d));
    }
    let h = |lambda: f64| slope_mismatch(d, lambda).0;
    let grid: Vec<f64> = (1..SCAN).map(|i| i as f64 / SCAN as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&l| h(l)).collect();
    let brackets: Vec<usize> = (0..grid.len() - 1)
        .filter(|&i| values[i].signum() != values[i + 1].signum())
        .collect();
    let (mut lo, mut hi) = match brackets.as_slice() {
        [] => return Err(Error::NoTangentPoint(d)),
        [i] => (grid[*i], grid[*i + 1]),
        many => return Err(Error::AmbiguousTangent(many.len())),
    };
    let lo_sign = h(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_t = 0.5 * (lo + hi);
    let t = curve_point(d, lambda_t);
    let (_, tangent_slope, chord_slope) = slope_mismatch(d, lambda_t);
    // F of the chord at the curve's I, minus the curve's F.
    let gap = |lambda: f64| {
        let p = curve_point(d, lambda);
        p.infidelity - p.info * t.infidelity / t.info
    };
    let max_gap = maximize(gap, lambda_t, 1.0, 2000).1;
    Ok(TangentReport {
        d,
        lambda_t,
        info_t: t.info,
        fidelity_t: t.fidelity,
        max_gap,
        tangent_slope,
        chord_slope,
    })
}

/// `λ` maximizing the efficiency `I/(1 − F)` along the `(1, d−1)` curve, found
/// independently of the tangent construction.
pub fn efficiency_argmax(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let eff = |lambda: f64| {
        let p = curve_point(d, lambda);
        p.info / p.infidelity
    };
    // Near λ = 1 both I and 1 − F vanish quadratically while I carries absolute
    // roundoff, so the ratio is only trusted away from that end.
    Ok(maximize(eff, 0.0, 0.999, 1000).0)
}

/// Dense scan followed by golden-section refinement of the best bracket.
fn maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> (f64, f64) {
    let at = |i: usize| a + (b - a) * i as f64 / samples as f64;
    let best = (0..=samples)
        .max_by(|&i, &j| f(at(i)).total_cmp(&f(at(j))))
        .expect("non-empty scan");
    let (mut lo, mut hi) = (at(best.saturating_sub(1)), at((best + 1).min(samples)));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let candidates = [(x, f(x)), (at(best), f(at(best)))];
    candidates
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("two candidates")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureSign {
    Positive,
    Negative,
}

fn curvature_with_step(d: usize, lambda: f64, h: f64) -> f64 {
    let p = curve_point(d, lambda);
    let up = curve_point(d, lambda + h);
    let down = curve_point(d, lambda - h);
    let dd_fidelity = (up.d_fidelity - down.d_fidelity) / (2.0 * h);
    let dd_info = (up.d_info - down.d_info) / (2.0 * h);
    (dd_fidelity * p.d_info - p.d_fidelity * dd_info) / p.d_info.powi(3)
}

/// `d²F/dI²` along the `(1, d−1)` curve at `λ`, from central differences of the
/// parametric derivatives.
pub fn curvature(d: usize, lambda: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    if !(lambda > 1e-3 && lambda < 1.0 - 1e-3) {
        return Err(Error::Unreliable(format!(
            "lambda = {lambda} is too close to an end of the curve for differencing"
        )));
    }
    let h = 1e-4f64.min(lambda / 4.0).min((1.0 - lambda) / 4.0);
    let coarse = curvature_with_step(d, lambda, h);
    let fine = curvature_with_step(d, lambda, h / 2.0);
    if coarse.signum() != fine.signum() || fine == 0.0 {
        return Err(Error::Unreliable(format!(
            "curvature estimates {coarse:e} and {fine:e} disagree in sign at lambda = {lambda}"
        )));
    }
    Ok(fine)
}

pub fn curvature_sign(d: usize, lambda: f64) -> Result<CurvatureSign> {
    Ok(if curvature(d, lambda)? > 0.0 {
        CurvatureSign::Positive
    } else {
        CurvatureSign::Negative
    })
}
