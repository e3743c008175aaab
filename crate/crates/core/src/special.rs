//! Special functions used across the toolkit.

use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Generalized binomial coefficient `binom(s, k)` for real `s`.
pub fn binomial(s: f64, k: usize) -> f64 {
    let mut b = 1.0;
    for j in 0..k {
        b *= (s - j as f64) / (j as f64 + 1.0);
    }
    b
}

/// Coefficients `binom(s, k)` for `k = 0..len`.
pub fn binomial_series(s: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut b = 1.0;
    for k in 0..len {
        out.push(b);
        b *= (s - k as f64) / (k as f64 + 1.0);
    }
    out
}

/// Normalization of the singular-integral form of `(-Δ)^a` in dimension `n`:
/// `2^{2a} Γ(n/2 + a) / (π^{n/2} |Γ(-a)|)`.
pub fn pv_constant(n: usize, a: f64) -> f64 {
    let nf = n as f64;
    2f64.powf(2.0 * a) * gamma(nf / 2.0 + a) / (PI.powf(nf / 2.0) * gamma(-a).abs())
}

/// Value of `(-Δ)^a (1 - x²)_+^a` on `(-1, 1)`: `Γ(2a + 1)` in one dimension.
pub fn getoor_constant(a: f64) -> f64 {
    gamma(2.0 * a + 1.0)
}

const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Hurwitz zeta `Σ_{k≥0} (k + q)^{-s}` for `s > 1`, `q > 0` (Euler–Maclaurin).
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + q).powf(-s);
    }
    let z = N as f64 + q;
    sum += z.powf(1.0 - s) / (s - 1.0) + 0.5 * z.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)!
    let mut fac = s;
    let mut denom = 2.0;
    let mut zpow = z.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        sum += b / denom * fac * zpow;
        let jj = (j + 1) as f64;
        fac *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        denom *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        zpow /= z * z;
    }
    sum
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, C^∞ in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let p = (-1.0 / t).exp();
        let q = (-1.0 / (1.0 - t)).exp();
        p / (p + q)
    }
}
