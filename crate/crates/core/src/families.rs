//! Named spectra (`M^(d)_{k,l}(λ)`, rank-`r` projectors, the isotropic measurement)
//! and the closed-form information gains available for them.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{DiagonalOperator, Measurement};
use crate::measures::info_gain_ceiling;
use crate::spectrum::{harmonic, SingularSpectrum};

/// `k` unit singular values, `l` equal to `lambda`, and `d - k - l` zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyKL {
    pub d: usize,
    pub k: usize,
    pub l: usize,
    pub lambda: f64,
}

impl FamilyKL {
    pub fn new(d: usize, k: usize, l: usize, lambda: f64) -> Result<Self> {
        if d < 2 || k < 1 || l < 1 || k + l > d {
            return Err(Error::Domain(format!(
                "family (k={k}, l={l}) is not admissible for d={d}: need k>=1, l>=1, k+l<=d"
            )));
        }
        check_unit(lambda)?;
        Ok(Self { d, k, l, lambda })
    }

    pub fn spectrum(&self) -> SingularSpectrum {
        SingularSpectrum::from_blocks(self.d, self.k, self.l, self.lambda)
            .expect("admissible family has a valid spectrum")
    }

    /// Closed-form `I(m)` when one exists (`k = 1`, `l = 1`, or an endpoint).
    pub fn closed_form_info_gain(&self) -> Option<f64> {
        let Self { d, k, l, lambda } = *self;
        if lambda == 0.0 {
            return info_gain_projective(d, k).ok();
        }
        if lambda == 1.0 {
            return info_gain_projective(d, k + l).ok();
        }
        if l == 1 {
            info_gain_k1(d, k, lambda).ok()
        } else if k == 1 {
            info_gain_1l(d, l, lambda).ok()
        } else {
            None
        }
    }
}

/// Rank-`r` projector: `r` ones followed by `d - r` zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projector {
    pub d: usize,
    pub r: usize,
}

impl Projector {
    pub fn new(d: usize, r: usize) -> Result<Self> {
        if d < 2 || r < 1 || r > d {
            return Err(Error::Domain(format!(
                "projector rank {r} is not in 1..={d}"
            )));
        }
        Ok(Self { d, r })
    }

    pub fn spectrum(&self) -> SingularSpectrum {
        SingularSpectrum::from_blocks(self.d, self.r, 0, 0.0).expect("valid projector")
    }
}

/// `a_n^(j) = C(j,n) [η(j) − η(j−n)] / ln 2` and
/// `c_n^(j)(λ) = λ^{2(j−n)} [C(j,n) log2 λ² + a_n^(j)]`.
#[derive(Debug, Clone)]
pub struct CoefficientTables {
    a: Vec<Vec<f64>>,
}

impl CoefficientTables {
    /// Tables for `j = 0..=j_max`, `n = 0..=j`.
    pub fn new(j_max: usize) -> Self {
        let a = (0..=j_max)
            .map(|j| (0..=j).map(|n| a_coefficient(j, n)).collect())
            .collect();
        Self { a }
    }

    pub fn a(&self, j: usize, n: usize) -> f64 {
        self.a[j][n]
    }

    pub fn c(&self, j: usize, n: usize, lambda: f64) -> f64 {
        let x = lambda * lambda;
        if x == 0.0 {
            // λ^{2(j-n)} log λ² → 0 for n < j; the n = j term keeps a_j^(j).
            return if n == j { self.a[j][n] } else { 0.0 };
        }
        x.powi((j - n) as i32) * (binomial(j, n) * x.log2() + self.a[j][n])
    }
}

pub(crate) fn a_coefficient(j: usize, n: usize) -> f64 {
    binomial(j, n) * (harmonic(j) - harmonic(j - n)) / LN_2
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_unit(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// `I(m) = log2(d/r) − [η(d) − η(r)]/ln 2` for a rank-`r` projector.
pub fn info_gain_projective(d: usize, r: usize) -> Result<f64> {
    Projector::new(d, r)?;
    Ok((d as f64 / r as f64).log2() - (harmonic(d) - harmonic(r)) / LN_2)
}

/// Above this `λ²` the closed forms below switch from their literal expressions,
/// which carry a removable singularity at `λ = 1`, to the convergent expansion of
/// the same expressions about `λ² = 1`.
const SERIES_SWITCH: f64 = 0.8;

/// Closed-form `I(m)` of `M^(d)_{k,1}(λ)`.
pub fn info_gain_k1(d: usize, k: usize, lambda: f64) -> Result<f64> {
    FamilyKL::new(d, k, 1, lambda)?;
    if lambda == 1.0 {
        return info_gain_projective(d, k + 1);
    }
    let x = lambda * lambda;
    let j = k + 1;
    let bracket = if x <= SERIES_SWITCH {
        let lead = if x == 0.0 {
            0.0
        } else {
            x.powi(j as i32) * x.log2() / (x - 1.0).powi(k as i32)
        };
        let tail: f64 = (0..k)
            .map(|n| a_coefficient(j, n) / (x - 1.0).powi((k - n) as i32))
            .sum();
        lead - tail
    } else {
        // Σ_{n≥k} t_n (x−1)^{n−k} with t_n the Taylor coefficients of x^j log2 x at 1.
        taylor_remainder(|n| taylor_at_one(j, n), x - 1.0, k)
    };
    Ok(info_gain_ceiling(d) - (k as f64 + x).log2() + bracket / (k as f64 + x))
}

/// Closed-form `I(m)` of `M^(d)_{1,l}(λ)`.
pub fn info_gain_1l(d: usize, l: usize, lambda: f64) -> Result<f64> {
    FamilyKL::new(d, 1, l, lambda)?;
    if lambda == 0.0 {
        return info_gain_projective(d, 1);
    }
    if lambda == 1.0 {
        return info_gain_projective(d, l + 1);
    }
    let x = lambda * lambda;
    let j = l + 1;
    let tables = CoefficientTables::new(j);
    let sum = if x <= SERIES_SWITCH {
        -(0..l)
            .map(|n| tables.c(j, n, lambda) / (1.0 - x).powi((l - n) as i32))
            .sum::<f64>()
    } else {
        // Σ_{n≥l} c_n(λ) (1−x)^{n−l}, continuing c_n past n = j with the Taylor
        // coefficients of x^j log2 x at x.
        taylor_remainder(
            |n| {
                if n <= j {
                    tables.c(j, n, lambda)
                } else {
                    taylor_beyond_power(j, n) / x.powi((n - j) as i32)
                }
            },
            1.0 - x,
            l,
        )
    };
    Ok(info_gain_ceiling(d) - (1.0 + l as f64 * x).log2() + sum / (1.0 + l as f64 * x))
}

/// `Σ_{n≥start} coeff(n) · u^{n−start}` until the terms stop mattering.
fn taylor_remainder(coeff: impl Fn(usize) -> f64, u: f64, start: usize) -> f64 {
    let mut total = 0.0;
    let mut power = 1.0;
    let mut small = 0;
    for n in start..start + 2000 {
        let term = coeff(n) * power;
        total += term;
        if term.abs() <= 1e-18 * total.abs().max(1e-300) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        power *= u;
    }
    total
}

/// Taylor coefficient of `x^j log2 x` about `x = 1`.
fn taylor_at_one(j: usize, n: usize) -> f64 {
    if n <= j {
        a_coefficient(j, n)
    } else {
        taylor_beyond_power(j, n)
    }
}

/// `x^{n-j} f^{(n)}(x)/n!` for `f = x^j log2 x` and `n > j`.
fn taylor_beyond_power(j: usize, n: usize) -> f64 {
    let sign = if (n - j - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / (binomial(n, j) * (n - j) as f64 * LN_2)
}

/// `d` outcomes: operator `m` has `1` at position `m` and `λ` elsewhere, scaled by
/// `1/√(1 + (d−1)λ²)`.
pub fn isotropic_measurement(d: usize, lambda: f64) -> Result<Measurement> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "isotropic measurement needs 0 < lambda < 1, got {lambda}"
        )));
    }
    Ok(Measurement::new(d, isotropic_operators(d, lambda, 1.0))
        .expect("isotropic operators are well formed"))
}

/// Isotropic operators with an extra overall weight `sqrt(weight)`; `λ = 0` gives the
/// rank-one projectors.
pub(crate) fn isotropic_operators(d: usize, lambda: f64, weight: f64) -> Vec<DiagonalOperator> {
    let norm = (weight / (1.0 + (d - 1) as f64 * lambda * lambda)).sqrt();
    (0..d)
        .map(|m| DiagonalOperator {
            diag: (0..d)
                .map(|i| if i == m { norm } else { lambda * norm })
                .collect(),
            shift: m,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{info_gain, measures};

    #[test]
    fn family_spectra() {
        let f = FamilyKL::new(4, 1, 3, 0.5).unwrap();
        assert_eq!(f.spectrum().values(), &[1.0, 0.5, 0.5, 0.5]);
        let p = FamilyKL::new(4, 1, 3, 0.0).unwrap().spectrum();
        assert_eq!(p, Projector::new(4, 1).unwrap().spectrum());
        let id = FamilyKL::new(4, 1, 3, 1.0).unwrap().spectrum();
        assert_eq!(id, Projector::new(4, 4).unwrap().spectrum());
        assert!(FamilyKL::new(4, 2, 3, 0.5).is_err());
        assert!(FamilyKL::new(4, 1, 1, 1.5).is_err());
    }

    #[test]
    fn projective_values() {
        let i = info_gain_projective(2, 1).unwrap();
        assert!((i - (1.0 - 0.5 / LN_2)).abs() < 1e-15);
        assert!((i - 0.278652).abs() < 1e-6);
        for d in 2..9 {
            assert!(info_gain_projective(d, d).unwrap().abs() < 1e-15);
        }
        assert!(info_gain_projective(3, 0).is_err());
    }

    #[test]
    fn closed_forms_reach_endpoints() {
        for d in 3..8 {
            let l = d - 1;
            let near_one = info_gain_1l(d, l, 1.0 - 1e-9).unwrap();
            assert!(near_one.abs() < 1e-12, "d={d}: {near_one}");
            let near_zero = info_gain_1l(d, l, 1e-9).unwrap();
            assert!((near_zero - info_gain_projective(d, 1).unwrap()).abs() < 1e-12);
            for k in 1..d {
                let lo = info_gain_k1(d, k, 1e-9).unwrap();
                assert!((lo - info_gain_projective(d, k).unwrap()).abs() < 1e-12);
                let hi = info_gain_k1(d, k, 1.0 - 1e-9).unwrap();
                assert!((hi - info_gain_projective(d, k + 1).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_continuous_at_series_switch() {
        let lam = SERIES_SWITCH.sqrt();
        for (d, k) in [(8, 7), (6, 2), (4, 1)] {
            let a = info_gain_k1(d, k, lam * (1.0 - 1e-12)).unwrap();
            let b = info_gain_k1(d, k, lam * (1.0 + 1e-12)).unwrap();
            assert!((a - b).abs() < 1e-11, "k1 d={d} k={k}: {a} vs {b}");
            let a = info_gain_1l(d, d - k, lam * (1.0 - 1e-12)).unwrap();
            let b = info_gain_1l(d, d - k, lam * (1.0 + 1e-12)).unwrap();
            assert!((a - b).abs() < 1e-11, "1l d={d}: {a} vs {b}");
        }
    }

    #[test]
    fn closed_form_matches_general_evaluator() {
        let s = SingularSpectrum::new(vec![1.0, 0.5, 0.5, 0.5]).unwrap();
        let closed = info_gain_1l(4, 3, 0.5).unwrap();
        assert!((info_gain(&s) - closed).abs() < 1e-13);
        for eps in [1e-3, 1e-5] {
            let t = SingularSpectrum::new(vec![1.0, 0.5, 0.5 + eps, 0.5 - eps]).unwrap();
            assert!((info_gain(&t) - closed).abs() < 1e-5 * eps.sqrt().max(eps));
        }
    }

    #[test]
    fn coefficient_identities_in_rationals() {
        // a_n^(j) ln 2 is the Taylor coefficient of x^j ln x at x = 1, which is also
        // Σ_{m=1..n} C(j, n−m) (−1)^{m+1} / m by multiplying the two series.
        for j in 0..=9usize {
            for n in 0..=j {
                let lhs = Ratio::from_int(binomial_int(j, n))
                    .mul(Ratio::harmonic(j).sub(Ratio::harmonic(j - n)));
                let mut rhs = Ratio::from_int(0);
                for m in 1..=n {
                    let sign = if m % 2 == 1 { 1 } else { -1 };
                    rhs = rhs.add(Ratio::new(sign * binomial_int(j, n - m), m as i128));
                }
                assert_eq!(lhs, rhs, "j={j} n={n}");
                let float = CoefficientTables::new(9).a(j, n) * LN_2;
                assert!((float - lhs.to_f64()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn c_table_definition() {
        let t = CoefficientTables::new(5);
        let lam: f64 = 0.6;
        let x = lam * lam;
        let expect = x.powi(3) * (binomial(5, 2) * x.log2() + t.a(5, 2));
        assert!((t.c(5, 2, lam) - expect).abs() < 1e-15);
        assert_eq!(t.c(5, 2, 0.0), 0.0);
    }

    #[test]
    fn isotropic_properties() {
        let m = isotropic_measurement(4, 0.5).unwrap();
        assert_eq!(m.operators().len(), 4);
        assert!(m.completeness_residual() <= 1e-12);
        let reference = measures(&SingularSpectrum::new(vec![1.0, 0.5, 0.5, 0.5]).unwrap());
        let mut total_p = 0.0;
        for op in m.operators() {
            let v = measures(&op.spectrum().unwrap());
            assert!((v.info_gain - reference.info_gain).abs() < 1e-13);
            assert!((v.estimation_fidelity - reference.estimation_fidelity).abs() < 1e-14);
            assert!((v.operation_fidelity - reference.operation_fidelity).abs() < 1e-14);
            assert!((v.reversibility - reference.reversibility).abs() < 1e-14);
            total_p += v.outcome_probability;
        }
        assert!((total_p - 1.0).abs() < 1e-14);
        assert!(isotropic_measurement(4, 0.0).is_err());
        assert!(isotropic_measurement(4, 1.0).is_err());
    }

    fn binomial_int(n: usize, k: usize) -> i128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    struct Ratio {
        num: i128,
        den: i128,
    }

    impl Ratio {
        fn new(num: i128, den: i128) -> Self {
            fn gcd(a: i128, b: i128) -> i128 {
                if b == 0 {
                    a.abs()
                } else {
                    gcd(b, a % b)
                }
            }
            let g = gcd(num, den).max(1);
            let s = if den < 0 { -1 } else { 1 };
            Self {
                num: s * num / g,
                den: s * den / g,
            }
        }
        fn from_int(v: i128) -> Self {
            Self::new(v, 1)
        }
        fn harmonic(n: usize) -> Self {
            (1..=n).fold(Self::from_int(0), |acc, k| acc.add(Self::new(1, k as i128)))
        }
        fn add(self, o: Self) -> Self {
            Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
        }
        fn sub(self, o: Self) -> Self {
            self.add(Self::new(-o.num, o.den))
        }
        fn mul(self, o: Self) -> Self {
            Self::new(self.num * o.num, self.den * o.den)
        }
        fn to_f64(self) -> f64 {
            self.num as f64 / self.den as f64
        }
    }
}
