//! Laguerre functions adapted to the order-reducing operators.
//!
//! `ψ_k^α(x) = k!/Γ(k+α+1) x^α L_k^{(α)}(2x) e^{-x} H(x)` has Fourier transform
//! `(iξ - 1)^k / (1 + iξ)^{k+α+1}`, so
//!
//! * `Ξ₊^t ψ_k^α = ψ_k^{α-t}` exactly, and
//! * `r⁺ Ξ₋^s e⁺` acts on `ψ^0` coefficients by the upper-triangular Toeplitz
//!   map `d_j = 2^s Σ_{k≥j} (-1)^{k-j} binom(-s, k-j) c_k`, because
//!   `1 - iξ = 2 / (1 - z^{-1})` with `z = (iξ-1)/(iξ+1)`.
//!
//! Both maps keep `span{ψ_0, …, ψ_{K-1}}` invariant, so the half-line solution
//! operator is exact on that span.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, GridFunction, HalfLineMask, Side};
use crate::special::{binomial_series, gamma};

/// Candidate expansion lengths tried by [`project`].
pub const LENGTHS: [usize; 7] = [8, 12, 16, 24, 32, 48, 64];

/// `ψ_k^α(x)` for `k = 0..len`, `x > 0`.
pub fn basis_values(alpha: f64, len: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let y = 2.0 * x;
    let pre = x.powf(alpha) * (-x).exp();
    let mut norm = 1.0 / gamma(alpha + 1.0);
    let mut l_prev = 0.0;
    let mut l = 1.0;
    for k in 0..len {
        out.push(norm * l * pre);
        let kf = k as f64;
        let next = if k == 0 {
            1.0 + alpha - y
        } else {
            ((2.0 * kf + 1.0 + alpha - y) * l - (kf + alpha) * l_prev) / (kf + 1.0)
        };
        l_prev = l;
        l = next;
        norm *= (kf + 1.0) / (kf + 1.0 + alpha);
    }
    out
}

/// `Σ_k c_k ψ_k^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaguerreExpansion {
    pub alpha: f64,
    pub coef: Vec<Complex64>,
}

impl LaguerreExpansion {
    pub fn zero(alpha: f64) -> Self {
        LaguerreExpansion { alpha, coef: vec![] }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if x < 0.0 || self.coef.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        if x == 0.0 {
            return if self.alpha == 0.0 {
                self.coef.iter().sum()
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        basis_values(self.alpha, self.coef.len(), x)
            .iter()
            .zip(&self.coef)
            .map(|(b, c)| c * b)
            .sum()
    }

    /// Samples on a grid; zero on the minus side. For `α < 0` the (infinite)
    /// value at `x = 0` is stored as zero.
    pub fn sample(&self, grid: Grid1D) -> GridFunction {
        let mut u = GridFunction::from_complex_fn(grid, |x| self.eval(x));
        u.is_real_hint = self.coef.iter().all(|c| c.im == 0.0);
        u
    }

    /// `lim_{x→0⁺} x^{-α} Σ c_k ψ_k^α(x) = Σ c_k / Γ(α+1)`.
    pub fn quotient_at_zero(&self) -> Complex64 {
        self.coef.iter().sum::<Complex64>() / gamma(self.alpha + 1.0)
    }

    /// `Ξ₊^t`: shifts the exponent.
    pub fn plus_power(&self, t: f64) -> Self {
        LaguerreExpansion {
            alpha: self.alpha - t,
            coef: self.coef.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.alpha, other.alpha);
        let n = self.coef.len().max(other.coef.len());
        let get = |v: &Vec<Complex64>, k: usize| v.get(k).copied().unwrap_or_default();
        LaguerreExpansion {
            alpha: self.alpha,
            coef: (0..n).map(|k| get(&self.coef, k) + get(&other.coef, k)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LaguerreExpansion {
            alpha: self.alpha,
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }
}

/// `r⁺ Ξ₋^s e⁺` on `ψ^0` coefficients.
pub fn minus_power(s: f64, coef: &[Complex64]) -> Vec<Complex64> {
    let k = coef.len();
    let b = binomial_series(-s, k);
    let two_s = 2f64.powf(s);
    (0..k)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in j..k {
                let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc += coef[m] * (sign * b[m - j]);
            }
            acc * two_s
        })
        .collect()
}

/// Least-squares `ψ^0` expansion of the plus-side samples of `u`, using the
/// shortest length in [`LENGTHS`] whose relative l2 residual is at most `tol`.
///
/// Data are taken to vanish past the box: the fit also matches zero on
/// `[L, 2.5 K + 20]`, where the basis functions of length `K` still live.
/// Returns the expansion and its residual; fails with [`Error::Residual`] when
/// no length reaches `tol`.
pub fn project(u: &GridFunction, tol: f64) -> Result<(LaguerreExpansion, f64)> {
    let grid = u.grid;
    let h = grid.h();
    let mask = HalfLineMask::new(Side::Plus, grid);
    let idx: Vec<usize> = mask.indices().collect();
    let f: Vec<Complex64> = idx.iter().map(|&k| u.values[k]).collect();
    let fnorm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if fnorm == 0.0 {
        return Ok((LaguerreExpansion::zero(0.0), 0.0));
    }
    let mut best = (LaguerreExpansion::zero(0.0), f64::INFINITY);
    for &len in LENGTHS.iter() {
        let reach = 2.5 * len as f64 + 20.0;
        let mut xs: Vec<f64> = idx.iter().map(|&k| grid.x(k)).collect();
        let mut x = grid.half_length();
        while x < reach {
            xs.push(x);
            x += h;
        }
        let m = xs.len();
        let mut design = DMatrix::zeros(m, len);
        for (i, &x) in xs.iter().enumerate() {
            let row = if x == 0.0 { vec![1.0; len] } else { basis_values(0.0, len, x) };
            for j in 0..len {
                design[(i, j)] = row[j];
            }
        }
        let pad = |v: Vec<f64>| {
            let mut v = v;
            v.resize(m, 0.0);
            DVector::from_vec(v)
        };
        let svd = design.clone().svd(true, true);
        let re = svd.solve(&pad(f.iter().map(|z| z.re).collect()), 1e-13).expect("SVD solve");
        let im = svd.solve(&pad(f.iter().map(|z| z.im).collect()), 1e-13).expect("SVD solve");
        let fit_re = &design * &re;
        let fit_im = &design * &im;
        let target = |i: usize| f.get(i).copied().unwrap_or_default();
        let res = (0..m)
            .map(|i| (target(i) - Complex64::new(fit_re[i], fit_im[i])).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / fnorm;
        let exp = LaguerreExpansion {
            alpha: 0.0,
            coef: (0..len).map(|j| Complex64::new(re[j], im[j])).collect(),
        };
        if res <= tol {
            return Ok((exp, res));
        }
        if res < best.1 {
            best = (exp, res);
        }
    }
    log::warn!("Laguerre projection stalled at relative residual {:.3e}", best.1);
    Err(Error::Residual {
        residual: best.1,
        tolerance: tol,
    })
}
