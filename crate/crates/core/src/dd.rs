//! Double-double arithmetic for the grid sweep's incremental divided-difference table.
//!
//! Only the operations the sweep needs: sums, products, reciprocals of integers and
//! natural logarithms of positive integers. Products use Dekker's splitting so the
//! result does not depend on hardware FMA.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

const LN_2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub(crate) const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub(crate) fn hi(self) -> f64 {
        self.hi
    }

    /// `1/x` for an exactly representable `x`.
    pub(crate) fn recip(x: f64) -> Self {
        let q1 = 1.0 / x;
        let (p, e) = two_prod(q1, x);
        // Residual 1 − q1·x is exact.
        let r = (1.0 - p) - e;
        let (hi, lo) = quick_two_sum(q1, r / x);
        Self { hi, lo }
    }

    /// `ln a` for a positive integer `a`, through `2 atanh((m−1)/(m+1))` with `m ∈ [1, 2)`.
    pub(crate) fn ln_int(a: u64) -> Self {
        assert!(a > 0, "logarithm of zero");
        let k = 63 - a.leading_zeros();
        let m = a as f64 / (1u64 << k) as f64;
        let z = Self::from(m - 1.0) * Self::recip(m + 1.0);
        let z2 = z * z;
        let mut power = z;
        let mut sum = Self::ZERO;
        for j in 0.. {
            let term = power * Self::recip((2 * j + 1) as f64);
            sum = sum + term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
            power = power * z2;
        }
        LN_2 * Self::from(k as f64) + sum * Self::from(2.0)
    }
}

impl Dd {
    /// `self − b` with one error-free sum. The error is bounded by a small multiple of
    /// `u²(|self| + |b|)` rather than relative to the result, which is what a divided
    /// difference table needs.
    #[inline(always)]
    pub(crate) fn sub_loose(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, -b.hi);
        let (hi, lo) = quick_two_sum(s, e + (self.lo - b.lo));
        Self { hi, lo }
    }

    /// `self · f` for a factor whose leading part was split ahead of time.
    #[inline(always)]
    pub(crate) fn mul_factor(self, f: &Factor) -> Self {
        let p = self.hi * f.value.hi;
        let (ah, al) = split(self.hi);
        let e = ((ah * f.hi_head - p) + ah * f.hi_tail + al * f.hi_head) + al * f.hi_tail;
        let (hi, lo) = quick_two_sum(p, e + (self.hi * f.value.lo + self.lo * f.value.hi));
        Self { hi, lo }
    }
}

/// A double-double multiplier with the Dekker split of its leading part cached.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Factor {
    value: Dd,
    hi_head: f64,
    hi_tail: f64,
}

impl From<Dd> for Factor {
    fn from(value: Dd) -> Self {
        let (hi_head, hi_tail) = split(value.hi);
        Self {
            value,
            hi_head,
            hi_tail,
        }
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Self;
    #[inline(always)]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Self;
    #[inline(always)]
    fn sub(self, b: Self) -> Self {
        self + Self {
            hi: -b.hi,
            lo: -b.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Self;
    #[inline(always)]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Self { hi, lo }
    }
}
