//! Exhaustive sweeps over descending grids of singular values.
//!
//! Grid spectra are enumerated depth-first as integer levels `a_1 ≥ a_2 ≥ … ≥ a_d`
//! with `λ_i = a_i / N`. Every measure is scale invariant, so the information gain is
//! evaluated on the integer nodes `X_i = a_i²`, extending a Newton table of
//! `f(X) = X^d ln X` by one column per level. Equal levels are adjacent in a descending
//! sequence, so confluent entries come straight from the Taylor coefficients of `f`.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{boundary_at, Bound};
use super::{DisturbanceAxis, PlaneKind, RegionPoint};
use crate::dd::{Dd, Factor};
use crate::error::{Error, Result};
use crate::measures::{info_gain_ceiling, MeasureVector};
use crate::spectrum::SingularSpectrum;

/// Grid steps used when none is given: 0.01 up to `d = 6`, 0.02 beyond.
pub fn default_step(d: usize) -> f64 {
    if d <= 6 {
        0.01
    } else {
        0.02
    }
}

/// Number of grid levels `N = 1/step`; the step must divide one.
fn levels(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::Domain(format!(
            "grid step {step} is outside (0, 0.1]"
        )));
    }
    let n = (1.0 / step).round();
    if ((n * step) - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("grid step {step} does not divide 1")));
    }
    Ok(n as usize)
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// Number of distinct descending grid spectra, excluding the zero spectrum.
pub fn grid_size(d: usize, step: f64) -> Result<u128> {
    check_dimension(d)?;
    let n = levels(step)? as u128;
    let d = d as u128;
    let mut c: u128 = 1;
    for i in 0..d {
        c = c * (n + d - i) / (i + 1);
    }
    Ok(c - 1)
}

/// One enumerated grid spectrum.
#[derive(Debug, Clone, Copy)]
pub struct GridPoint<'a> {
    /// Descending integer levels; `λ_i = levels[i] / n`.
    pub levels: &'a [usize],
    pub n: usize,
    pub measures: MeasureVector,
}

impl GridPoint<'_> {
    pub fn values(&self) -> Vec<f64> {
        self.levels
            .iter()
            .map(|&a| a as f64 / self.n as f64)
            .collect()
    }

    pub fn spectrum(&self) -> SingularSpectrum {
        SingularSpectrum::new(self.values()).expect("grid spectra are valid")
    }
}

/// Lookup tables shared by every leaf of one sweep.
///
/// The table entries are double-double: adjacent grid levels near the top are only a
/// few percent apart, and the plain Newton recurrence loses too many digits there.
struct Tables {
    d: usize,
    n: usize,
    /// `f(a²)`.
    f: Vec<Dd>,
    /// `f^{(m)}(a²)/m!` at `[a * d + m]`.
    confluent: Vec<Dd>,
    /// `1/(a² − b²)` at `[b * (n+1) + a]`.
    recip: Vec<Factor>,
    log2_sum: Vec<f64>,
    ceiling: f64,
}

impl Tables {
    fn new(d: usize, n: usize) -> Self {
        let mut harmonic_dd = vec![Dd::ZERO; d + 1];
        for k in 1..=d {
            harmonic_dd[k] = harmonic_dd[k - 1] + Dd::recip(k as f64);
        }
        let pow = |x: f64, e: usize| (0..e).fold(Dd::from(1.0), |acc, _| acc * Dd::from(x));
        let mut f = vec![Dd::ZERO; n + 1];
        let mut confluent = vec![Dd::ZERO; (n + 1) * d];
        for a in 1..=n {
            let x = (a * a) as f64;
            let ln_x = Dd::ln_int(a as u64) * Dd::from(2.0);
            f[a] = pow(x, d) * ln_x;
            let mut binom = 1.0;
            for m in 0..d {
                let shift = harmonic_dd[d] - harmonic_dd[d - m];
                confluent[a * d + m] = Dd::from(binom) * pow(x, d - m) * (ln_x + shift);
                binom = binom * (d - m) as f64 / (m + 1) as f64;
            }
        }
        let mut recip = vec![Factor::default(); (n + 1) * (n + 1)];
        for b in 0..=n {
            for a in 0..=n {
                if a != b {
                    recip[b * (n + 1) + a] = Dd::recip((a * a) as f64 - (b * b) as f64).into();
                }
            }
        }
        let log2_sum = (0..=d * n * n).map(|s| (s as f64).log2()).collect();
        Self {
            d,
            n,
            f,
            confluent,
            recip,
            log2_sum,
            ceiling: info_gain_ceiling(d),
        }
    }

    /// Fills column `j` of the Newton table from column `j - 1`.
    #[inline(always)]
    fn column(&self, idx: &[usize], prev: &[Dd], out: &mut [Dd], j: usize) {
        let a = idx[j];
        let stride = self.n + 1;
        out[j] = self.f[a];
        for i in (0..j).rev() {
            let b = idx[i];
            out[i] = if b == a {
                self.confluent[a * self.d + (j - i)]
            } else {
                out[i + 1]
                    .sub_loose(prev[i])
                    .mul_factor(&self.recip[b * stride + a])
            };
        }
    }
}

/// Depth-first walk of all descending sequences starting with `top`.
fn walk_top(t: &Tables, top: usize, visit: &mut impl FnMut(&GridPoint)) {
    let d = t.d;
    let mut idx = vec![0usize; d];
    let mut cols = vec![Dd::ZERO; d * d];
    let mut sums = vec![(0usize, 0usize); d];
    idx[0] = top;
    cols[0] = t.f[top];
    sums[0] = (top * top, top);
    descend(t, 1, &mut idx, &mut cols, &mut sums, visit);
}

fn descend(
    t: &Tables,
    j: usize,
    idx: &mut [usize],
    cols: &mut [Dd],
    sums: &mut [(usize, usize)],
    visit: &mut impl FnMut(&GridPoint),
) {
    let d = t.d;
    let (s_prev, t_prev) = sums[j - 1];
    let dp1 = (d + 1) as f64;
    for a in 0..=idx[j - 1] {
        idx[j] = a;
        {
            let (prev, rest) = cols.split_at_mut(j * d);
            t.column(idx, &prev[(j - 1) * d..], &mut rest[..d], j);
        }
        let s = s_prev + a * a;
        let tau = t_prev + a;
        if j + 1 < d {
            sums[j] = (s, tau);
            descend(t, j + 1, idx, cols, sums, visit);
            continue;
        }
        let sf = s as f64;
        let top = idx[0];
        // Numerators and denominators are exact integers, so one division rounds once.
        let denom = dp1 * sf;
        let measures = MeasureVector {
            info_gain: (t.ceiling - t.log2_sum[s] + cols[j * d].hi() / (sf * LN_2))
                .clamp(0.0, t.ceiling),
            estimation_fidelity: (s + top * top) as f64 / denom,
            operation_fidelity: (s + tau * tau) as f64 / denom,
            reversibility: (d * a * a) as f64 / sf,
            outcome_probability: sf / (d * t.n * t.n) as f64,
        };
        visit(&GridPoint {
            levels: idx,
            n: t.n,
            measures,
        });
    }
}

/// Folds every grid spectrum into one accumulator per leading level, in parallel.
///
/// Accumulators are returned in ascending order of the leading level, and the points
/// reaching each accumulator arrive in a fixed order, so the result does not depend
/// on the number of worker threads.
pub fn fold_grid<A: Send>(
    d: usize,
    step: f64,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, &GridPoint) + Sync,
) -> Result<Vec<A>> {
    check_dimension(d)?;
    let n = levels(step)?;
    let tables = Tables::new(d, n);
    Ok((1..=n)
        .into_par_iter()
        .map(|top| {
            let mut acc = init();
            walk_top(&tables, top, &mut |p: &GridPoint| visit(&mut acc, p));
            acc
        })
        .collect())
}

/// Sequential walk over the same grid, in the order [`fold_grid`] uses.
pub fn for_each_grid_point(d: usize, step: f64, mut visit: impl FnMut(&GridPoint)) -> Result<()> {
    check_dimension(d)?;
    let n = levels(step)?;
    let tables = Tables::new(d, n);
    for top in 1..=n {
        walk_top(&tables, top, &mut visit);
    }
    Ok(())
}

/// All grid spectra mapped onto `plane`.
pub fn sweep_region(d: usize, plane: PlaneKind, step: f64) -> Result<Vec<RegionPoint>> {
    let chunks = fold_grid(d, step, Vec::new, |acc: &mut Vec<RegionPoint>, p| {
        let (x, y) = plane.project(&p.measures);
        acc.push(RegionPoint {
            x,
            y,
            source_spectrum: p.spectrum(),
        });
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

const TABLE_CELLS: usize = 1 << 14;

/// Both declared boundaries of one plane tabulated on a uniform grid of `x`, used to
/// settle most points without evaluating the boundaries themselves.
struct PlaneTable {
    d: usize,
    plane: PlaneKind,
    x0: f64,
    inv_dx: f64,
    /// Upper boundary at the two ends of cell `j`, then the lower one.
    cells: Vec<[f64; 4]>,
}

impl PlaneTable {
    fn new(d: usize, plane: PlaneKind) -> Result<Self> {
        let (x0, x1) = match plane.disturbance {
            DisturbanceAxis::OperationFidelity => (2.0 / (d + 1) as f64, 1.0),
            DisturbanceAxis::Reversibility => (0.0, 1.0),
        };
        let dx = (x1 - x0) / TABLE_CELLS as f64;
        let sample = |bound: Bound| -> Result<Vec<f64>> {
            let y: Vec<f64> = (0..=TABLE_CELLS)
                .map(|j| boundary_at(d, plane, bound, x0 + j as f64 * dx))
                .collect();
            // The bracketing below relies on every boundary decreasing in x.
            if let Some(j) = (0..TABLE_CELLS).find(|&j| y[j + 1] > y[j] + 1e-12) {
                return Err(Error::Domain(format!(
                    "{bound:?} boundary of {plane} for d={d} increases near x={}",
                    x0 + j as f64 * dx
                )));
            }
            Ok(y)
        };
        let (upper, lower) = (sample(Bound::Upper)?, sample(Bound::Lower)?);
        let cells = (0..TABLE_CELLS)
            .map(|j| [upper[j], upper[j + 1], lower[j], lower[j + 1]])
            .collect();
        Ok(Self {
            d,
            plane,
            x0,
            inv_dx: 1.0 / dx,
            cells,
        })
    }

    /// Distances above the upper and below the lower boundary (0 inside), and how
    /// many of the two verdicts needed an exact boundary evaluation.
    #[inline(always)]
    fn excess(&self, x: f64, y: f64, tol: f64) -> (f64, f64, u64) {
        let pos = (x - self.x0) * self.inv_dx;
        let j = (pos.max(0.0) as usize).min(TABLE_CELLS - 1);
        let [up_hi, up_lo, down_hi, down_lo] = self.cells[j];
        let mut exact = 0;
        let up = if y <= up_lo + tol {
            0.0
        } else if y > up_hi + tol {
            y - up_hi
        } else {
            exact += 1;
            (y - boundary_at(self.d, self.plane, Bound::Upper, x)).max(0.0)
        };
        let down = if y >= down_hi - tol {
            0.0
        } else if y < down_lo - tol {
            down_lo - y
        } else {
            exact += 1;
            (boundary_at(self.d, self.plane, Bound::Lower, x) - y).max(0.0)
        };
        (up, down, exact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneDominance {
    pub plane: PlaneKind,
    pub upper_violations: u64,
    pub lower_violations: u64,
    /// Largest distance above the upper boundary over all points.
    pub max_upper_excess: f64,
    /// Largest distance below the lower boundary over all points.
    pub max_lower_excess: f64,
    /// Points whose verdict needed the boundary evaluated at their own `x`.
    pub exact_checks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub d: usize,
    pub step: f64,
    pub tolerance: f64,
    pub points: u64,
    pub planes: Vec<PlaneDominance>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.planes
            .iter()
            .all(|p| p.upper_violations == 0 && p.lower_violations == 0)
    }
}

/// Checks every grid spectrum against the declared upper and lower boundaries of
/// all four planes.
pub fn check_dominance(d: usize, step: f64, tol: f64) -> Result<DominanceReport> {
    check_dimension(d)?;
    let tables = PlaneKind::ALL
        .iter()
        .map(|&plane| PlaneTable::new(d, plane))
        .collect::<Result<Vec<_>>>()?;
    let empty = || {
        (
            0u64,
            PlaneKind::ALL.map(|plane| PlaneDominance {
                plane,
                upper_violations: 0,
                lower_violations: 0,
                max_upper_excess: 0.0,
                max_lower_excess: 0.0,
                exact_checks: 0,
            }),
        )
    };
    let chunks = fold_grid(d, step, empty, |acc, p| {
        acc.0 += 1;
        for (stats, table) in acc.1.iter_mut().zip(&tables) {
            let (x, y) = stats.plane.project(&p.measures);
            let (up, down, exact) = table.excess(x, y, tol);
            stats.exact_checks += exact;
            stats.max_upper_excess = stats.max_upper_excess.max(up);
            stats.max_lower_excess = stats.max_lower_excess.max(down);
            stats.upper_violations += (up > tol) as u64;
            stats.lower_violations += (down > tol) as u64;
        }
    })?;
    let (mut points, mut planes) = empty();
    for (count, chunk) in chunks {
        points += count;
        for (total, part) in planes.iter_mut().zip(chunk) {
            total.upper_violations += part.upper_violations;
            total.lower_violations += part.lower_violations;
            total.max_upper_excess = total.max_upper_excess.max(part.max_upper_excess);
            total.max_lower_excess = total.max_lower_excess.max(part.max_lower_excess);
            total.exact_checks += part.exact_checks;
        }
    }
    Ok(DominanceReport {
        d,
        step,
        tolerance: tol,
        points,
        planes: planes.to_vec(),
    })
}
