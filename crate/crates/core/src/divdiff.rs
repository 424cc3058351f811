//! Divided differences of `f(x) = x^p ln x` at arbitrary, possibly confluent nodes.
//!
//! The information gain of a spectrum is a divided difference of `x^d ln x` at the
//! squared singular values. Evaluating it through the Lagrange sum cancels
//! catastrophically as nodes approach each other, so this module uses:
//!
//! * exact removal of zero nodes, `f[0, x_1..] = (f(x)/x)[x_1..]` whenever `f(0) = 0`;
//! * rescaling of the remaining nodes to `max = 1`;
//! * collapse of nodes closer than the degeneracy tolerance to their mean
//!   (second-order error in the spread);
//! * a partition of the sorted nodes into clusters whose relative spread is at most
//!   [`CLUSTER_SPREAD`]. Entries of the divided-difference table whose nodes all lie in
//!   one cluster come from the Taylor expansion around the cluster centre,
//!   `f[x_i..x_j] = Σ_m f^{(j-i+m)}(c)/(j-i+m)! · h_m(x_i - c, .., x_j - c)`, with `h_m`
//!   the complete homogeneous symmetric polynomial. All other entries use the usual
//!   Newton recurrence, whose divisors are then bounded below by inter-cluster gaps.

/// Maximum relative spread `(max - min) / max` of a Taylor cluster. The expansion ratio
/// is then at most `CLUSTER_SPREAD / (2 - CLUSTER_SPREAD)`, about 0.43.
const CLUSTER_SPREAD: f64 = 0.6;

const MAX_TAYLOR_TERMS: usize = 400;

/// `f[x_1, .., x_n]` for `f(x) = x^p ln x`.
///
/// Nodes must be non-negative with at least one positive. Returns `+inf` when the
/// divided difference diverges (more zero nodes than `p` allows).
pub fn xpow_ln(p: usize, nodes: &[f64], degeneracy_tol: f64) -> f64 {
    debug_assert!(nodes.iter().all(|&x| x >= 0.0 && x.is_finite()));
    let zeros = nodes.iter().filter(|&&x| x == 0.0).count();
    if zeros > p {
        return f64::INFINITY;
    }
    let p = p - zeros;
    let mut y: Vec<f64> = nodes.iter().copied().filter(|&x| x > 0.0).collect();
    assert!(!y.is_empty(), "divided difference needs a positive node");
    let n = y.len();

    let scale = y.iter().copied().fold(0.0_f64, f64::max);
    for v in &mut y {
        *v /= scale;
    }
    y.sort_by(|a, b| b.total_cmp(a));
    snap_degenerate(&mut y, degeneracy_tol);

    let core = table(p, &y);

    // f(s·y) = s^p (y^p ln y + ln s · y^p); the divided difference of y^p over n nodes is
    // h_{p-n+1}(y).
    let shift = p as i64 - n as i64 + 1;
    let poly = if shift < 0 {
        0.0
    } else {
        complete_homogeneous(&y, shift as usize)
    };
    scale.powi(shift as i32) * (core + scale.ln() * poly)
}

/// Replaces runs of nodes within `tol` (relative to the leading node, which is 1)
/// by their mean.
fn snap_degenerate(y: &mut [f64], tol: f64) {
    let mut start = 0;
    while start < y.len() {
        let mut end = start + 1;
        while end < y.len() && y[start] - y[end] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let mean = y[start..end].iter().sum::<f64>() / (end - start) as f64;
            y[start..end].iter_mut().for_each(|v| *v = mean);
        }
        start = end;
    }
}

/// Splits descending nodes into clusters at the largest relative gaps until every
/// cluster has relative spread at most `CLUSTER_SPREAD`. Returns `[lo, hi)` ranges.
fn clusters(y: &[f64]) -> Vec<(usize, usize)> {
    fn split(y: &[f64], lo: usize, hi: usize, out: &mut Vec<(usize, usize)>) {
        if y[lo] - y[hi - 1] <= CLUSTER_SPREAD * y[lo] {
            out.push((lo, hi));
            return;
        }
        let cut = (lo..hi - 1)
            .max_by(|&a, &b| {
                let ga = (y[a] - y[a + 1]) / y[a];
                let gb = (y[b] - y[b + 1]) / y[b];
                ga.total_cmp(&gb)
            })
            .expect("cluster with spread has at least two nodes");
        split(y, lo, cut + 1, out);
        split(y, cut + 1, hi, out);
    }
    let mut out = Vec::new();
    split(y, 0, y.len(), &mut out);
    out
}

/// Full divided-difference table over descending nodes in `(0, 1]`; returns `f[y_0..y_{n-1}]`.
fn table(p: usize, y: &[f64]) -> f64 {
    let n = y.len();
    let mut dd = vec![0.0; n * n];
    let mut owner = vec![0usize; n];
    for (id, &(lo, hi)) in clusters(y).iter().enumerate() {
        owner[lo..hi].iter_mut().for_each(|o| *o = id);
        taylor_block(p, &y[lo..hi], |i, j, v| dd[(lo + i) * n + lo + j] = v);
    }
    for len in 1..n {
        for i in 0..n - len {
            let j = i + len;
            if owner[i] != owner[j] {
                dd[i * n + j] = (dd[(i + 1) * n + j] - dd[i * n + j - 1]) / (y[j] - y[i]);
            }
        }
    }
    dd[n - 1]
}

/// Fills every `f[y_i..y_j]` of one cluster through the Taylor expansion around
/// the cluster centre.
fn taylor_block(p: usize, y: &[f64], mut put: impl FnMut(usize, usize, f64)) {
    let s = y.len();
    let c = 0.5 * (y[0] + y[s - 1]);
    let ratio = 0.5 * (y[0] - y[s - 1]) / c;
    let terms = taylor_terms(ratio, s);
    // γ_k = f^{(k)}(c)/k! · c^k / c^p.
    let gamma = scaled_taylor_coefficients(p, c, s - 1 + terms);
    let delta: Vec<f64> = y.iter().map(|&v| (v - c) / c).collect();
    let mut h = vec![0.0; terms + 1];
    for i in 0..s {
        put(i, i, xpow_ln_value(p, y[i]));
        h.iter_mut().for_each(|v| *v = 0.0);
        h[0] = 1.0;
        extend_homogeneous(&mut h, delta[i]);
        for (j, &dj) in delta.iter().enumerate().skip(i + 1) {
            extend_homogeneous(&mut h, dj);
            let order = j - i;
            let sum: f64 = (0..=terms).rev().map(|m| gamma[order + m] * h[m]).sum();
            put(i, j, c.powi(p as i32 - order as i32) * sum);
        }
    }
}

/// Number of series terms so that `C(m+s-1, s-1)·ratio^m` drops below roundoff.
fn taylor_terms(ratio: f64, s: usize) -> usize {
    if ratio == 0.0 {
        return 0;
    }
    let mut bound = 1.0_f64;
    for m in 1..=MAX_TAYLOR_TERMS {
        bound *= ratio * (m + s - 1) as f64 / m as f64;
        if bound < 1e-19 {
            return m;
        }
    }
    MAX_TAYLOR_TERMS
}

/// Adds one node to the running complete homogeneous polynomials `h_0..h_M`.
fn extend_homogeneous(h: &mut [f64], x: f64) {
    for m in 1..h.len() {
        h[m] += x * h[m - 1];
    }
}

/// `γ_k = f^{(k)}(c) c^{k-p} / k!` for `k = 0..=kmax`, `f(x) = x^p ln x`.
fn scaled_taylor_coefficients(p: usize, c: f64, kmax: usize) -> Vec<f64> {
    let lnc = c.ln();
    let hp = harmonic(p);
    let mut out = Vec::with_capacity(kmax + 1);
    let mut binom_pk = 1.0; // C(p, k)
    for k in 0..=kmax.min(p) {
        out.push(binom_pk * (lnc + hp - harmonic(p - k)));
        binom_pk *= (p - k) as f64 / (k + 1) as f64;
    }
    // k > p: f^{(k)}/k! = (-1)^{k-p-1} / (C(k,p) (k-p)) · c^{p-k}.
    let mut binom_kp = (p + 1) as f64; // C(p+1, p)
    for k in p + 1..=kmax {
        let sign = if (k - p - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        out.push(sign / (binom_kp * (k - p) as f64));
        binom_kp *= (k + 1) as f64 / (k + 1 - p) as f64;
    }
    out
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// `x^p ln x` with the limit 0 at the origin.
pub(crate) fn xpow_ln_value(p: usize, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powi(p as i32) * x.ln()
    }
}

/// `h_m(y)`, by the usual one-node-at-a-time recurrence.
fn complete_homogeneous(y: &[f64], m: usize) -> f64 {
    let mut h = vec![0.0; m + 1];
    h[0] = 1.0;
    for &x in y {
        extend_homogeneous(&mut h, x);
    }
    h[m]
}
