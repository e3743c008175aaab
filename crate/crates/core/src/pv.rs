//! Principal-value singular-integral form of `(-Δ)^a`:
//! `c_{n,a} PV ∫ (u(x) - u(x+y)) |y|^{-n-2a} dy`.
//!
//! In one dimension the symmetrized integrand `D(s) = 2u(x) - u(x+s) - u(x-s)`
//! is written as `g(s) s^2` and `g` is integrated against `s^{1-2a}` by
//! piecewise-quadratic product integration, so the weak singularity at `s = 0`
//! is handled exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier_2d, Grid1D, Grid2D, GridFunction, GridFunction2D, Norm};
use crate::quad::gauss_legendre;
use crate::special::{gamma, hurwitz_zeta, pv_constant};
use crate::symbols::{apply_multiplier_unchecked, FractionalOrder, SymbolSpec};

/// Relative edge magnitude above which an input is treated as non-decaying.
pub const TAIL_LIMIT: f64 = 1e-6;
/// Scaled second difference above which a point is treated as non-C^2.
pub const SINGULARITY_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvKernelSpec {
    pub a: FractionalOrder,
    pub n: usize,
    pub c_na: f64,
}

impl PvKernelSpec {
    /// Kernel spec with the closed-form constant (not validated; see [`calibrate_constant`]).
    pub fn new(a: FractionalOrder, n: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {n}")));
        }
        Ok(PvKernelSpec {
            a,
            n,
            c_na: pv_constant(n, a.a()),
        })
    }
}

/// How the integrand continues outside the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuation {
    /// Periodic continuation; matches the FFT multiplier on the same box.
    Periodic,
    /// Zero outside `[-L, L)`.
    Zero,
}

/// Weights `w_k` with `∫_0^{N h} g(s) s^{1-2a} ds ≈ Σ_k w_k g(k h)` for
/// piecewise-quadratic `g` on panel pairs. `big_n` must be even.
pub fn product_weights(a: f64, h: f64, big_n: usize) -> Vec<f64> {
    assert!(big_n >= 2 && big_n % 2 == 0);
    let p = 1.0 - 2.0 * a;
    let mut w = vec![0.0; big_n + 1];
    let gl = gauss_legendre(12);
    for pair in 0..big_n / 2 {
        let y0 = 2.0 * pair as f64 * h;
        let vals = if pair == 0 {
            let m: Vec<f64> = (0..3)
                .map(|k| (2.0 * h).powf(p + k as f64 + 1.0) / (p + k as f64 + 1.0))
                .collect();
            [
                (m[2] - 3.0 * h * m[1] + 2.0 * h * h * m[0]) / (2.0 * h * h),
                -(m[2] - 2.0 * h * m[1]) / (h * h),
                (m[2] - h * m[1]) / (2.0 * h * h),
            ]
        } else {
            let mut v = [0.0; 3];
            for (&t, &gw) in gl.nodes.iter().zip(&gl.weights) {
                let t = t + 1.0;
                let s = y0 + h * t;
                let k = gw * h * s.powf(p);
                v[0] += k * (t - 1.0) * (t - 2.0) / 2.0;
                v[1] -= k * t * (t - 2.0);
                v[2] += k * t * (t - 1.0) / 2.0;
            }
            v
        };
        for j in 0..3 {
            w[2 * pair + j] += vals[j];
        }
    }
    w
}

/// Zero continuation needs samples that have decayed at the box edge; periodic
/// continuation only needs the wrap-around to be as smooth as the interior.
fn check_tail(u: &GridFunction, cont: Continuation) -> Result<()> {
    let n = u.len();
    let edge = match cont {
        Continuation::Zero => {
            let peak = u.max_abs();
            if peak == 0.0 {
                return Ok(());
            }
            u.values[0].norm().max(u.values[n - 1].norm()) / peak
        }
        Continuation::Periodic => {
            let wrap = smoothness_indicator(u, 0).max(smoothness_indicator(u, n - 1));
            if wrap <= SINGULARITY_LIMIT {
                return Ok(());
            }
            wrap
        }
    };
    if edge > TAIL_LIMIT {
        return Err(Error::Tail { edge });
    }
    Ok(())
}

struct Plan1D {
    c: f64,
    w: Vec<f64>,
    s2: Vec<f64>,
    images: Option<Vec<f64>>,
    far: f64,
}

fn plan_1d(kspec: &PvKernelSpec, grid: &Grid1D, cont: Continuation) -> Plan1D {
    let a = kspec.a.a();
    let n = grid.n();
    let h = grid.h();
    let big_n = match cont {
        Continuation::Periodic => n / 2,
        Continuation::Zero => n,
    };
    let w = product_weights(a, h, big_n);
    let s2 = (0..=big_n).map(|k| (k as f64 * h).powi(2)).collect();
    let (images, far) = match cont {
        Continuation::Periodic => {
            let p = 1.0 + 2.0 * a;
            let period = 2.0 * grid.half_length();
            let scale = period.powf(-p);
            let img = (0..=big_n)
                .map(|k| {
                    let r = k as f64 * h / period;
                    let simpson = if k == 0 || k == big_n {
                        1.0
                    } else if k % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    simpson * h / 3.0 * scale * (hurwitz_zeta(p, 1.0 + r) + hurwitz_zeta(p, 1.0 - r))
                })
                .collect();
            (Some(img), 0.0)
        }
        Continuation::Zero => (None, 2.0 * (big_n as f64 * h).powf(-2.0 * a) / (2.0 * a)),
    };
    Plan1D {
        c: kspec.c_na,
        w,
        s2,
        images,
        far,
    }
}

fn eval_point(plan: &Plan1D, u: &[Complex64], k: usize, cont: Continuation, h: f64) -> Complex64 {
    let n = u.len() as i64;
    let at = |j: i64| -> Complex64 {
        match cont {
            Continuation::Periodic => u[j.rem_euclid(n) as usize],
            Continuation::Zero => {
                if (0..n).contains(&j) {
                    u[j as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    };
    let k = k as i64;
    let u0 = u[k as usize];
    let lap = (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * u0 + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h * h);
    let mut acc = -lap * plan.w[0];
    for j in 1..plan.w.len() {
        let d = 2.0 * u0 - at(k + j as i64) - at(k - j as i64);
        acc += d * (plan.w[j] / plan.s2[j]);
        if let Some(img) = &plan.images {
            acc += d * img[j];
        }
    }
    acc += u0 * plan.far;
    acc * plan.c
}

/// Scaled second difference `h² |Δ_h u| / max |u|` at sample `k`.
pub fn smoothness_indicator(u: &GridFunction, k: usize) -> f64 {
    let n = u.len();
    let peak = u.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let d2 = u.values[(k + 1) % n] - 2.0 * u.values[k] + u.values[(k + n - 1) % n];
    d2.norm() / peak
}

/// PV evaluation at the listed sample indices.
pub fn apply_pv_integral_with(
    kspec: &PvKernelSpec,
    u: &GridFunction,
    x_eval: &[usize],
    cont: Continuation,
) -> Result<Vec<Complex64>> {
    if kspec.n != 1 {
        return Err(Error::InvalidParameter("use apply_pv_integral_2d for n = 2".into()));
    }
    check_tail(u, cont)?;
    for &k in x_eval {
        if k >= u.len() {
            return Err(Error::InvalidParameter(format!("evaluation index {k} out of range")));
        }
        let indicator = smoothness_indicator(u, k);
        if indicator > SINGULARITY_LIMIT {
            return Err(Error::Singularity { index: k, indicator });
        }
    }
    let plan = plan_1d(kspec, &u.grid, cont);
    let h = u.grid.h();
    Ok(x_eval
        .iter()
        .map(|&k| eval_point(&plan, &u.values, k, cont, h))
        .collect())
}

/// PV evaluation with periodic continuation.
pub fn apply_pv_integral(kspec: &PvKernelSpec, u: &GridFunction, x_eval: &[usize]) -> Result<Vec<Complex64>> {
    apply_pv_integral_with(kspec, u, x_eval, Continuation::Periodic)
}

/// PV evaluation at every sample, as a grid function.
pub fn apply_pv_full(kspec: &PvKernelSpec, u: &GridFunction, cont: Continuation) -> Result<GridFunction> {
    let idx: Vec<usize> = (0..u.len()).collect();
    let values = apply_pv_integral_with(kspec, u, &idx, cont)?;
    GridFunction::new(u.grid, values, u.is_real_hint)
}

/// 2-D PV evaluation on a periodic square grid at the listed `(i, j)` samples.
///
/// Taylor subtraction with a Gaussian cutoff of width `ρ = 0.5` removes the
/// singular part, whose integral is added back analytically; periodic images
/// are summed over `|m|_∞ ≤ 6` plus a continuum tail.
pub fn apply_pv_integral_2d(
    kspec: &PvKernelSpec,
    u: &GridFunction2D,
    points: &[(usize, usize)],
) -> Result<Vec<Complex64>> {
    if kspec.n != 2 {
        return Err(Error::InvalidParameter("kernel spec is not two-dimensional".into()));
    }
    let a = kspec.a.a();
    let n = u.grid.n();
    let h = u.grid.h();
    let period = 2.0 * u.grid.axis.half_length();
    let s = 2.0 + 2.0 * a;
    let rho: f64 = 0.5;
    let offset = |k: usize| -> f64 {
        if k < n / 2 {
            k as f64 * h
        } else {
            (k as f64 - n as f64) * h
        }
    };
    const M: i64 = 6;
    let big_s = (M as f64 + 0.5) * period;
    let tail = {
        let rule = gauss_legendre(32).mapped(0.0, PI / 4.0);
        8.0 * rule.integrate(|th| (big_s / th.cos()).powf(2.0 - s) / (s - 2.0)) / (period * period)
    };
    let mut kern = vec![0.0; n * n];
    let mut quadform_w = vec![[0.0; 3]; n * n];
    for i in 0..n {
        for j in 0..n {
            let (y1, y2) = (offset(i), offset(j));
            let mut r = tail;
            for p in -M..=M {
                for q in -M..=M {
                    if p == 0 && q == 0 {
                        continue;
                    }
                    let z1 = y1 + period * p as f64;
                    let z2 = y2 + period * q as f64;
                    r += (z1 * z1 + z2 * z2).powf(-0.5 * s);
                }
            }
            let r2 = y1 * y1 + y2 * y2;
            let k = if r2 > 0.0 { r2.powf(-0.5 * s) } else { 0.0 };
            let chi = (-r2 / (2.0 * rho * rho)).exp();
            kern[i * n + j] = k + r;
            quadform_w[i * n + j] = [y1 * y1 * chi * k, 2.0 * y1 * y2 * chi * k, y2 * y2 * chi * k];
        }
    }
    let analytic = PI * (2.0 * rho * rho).powf(1.0 - a) * gamma(1.0 - a);
    let v = &u.values;
    let at = |i: i64, j: i64| v[(i.rem_euclid(n as i64) as usize) * n + j.rem_euclid(n as i64) as usize];
    let mut out = Vec::with_capacity(points.len());
    for &(pi, pj) in points {
        if pi >= n || pj >= n {
            return Err(Error::InvalidParameter(format!("point ({pi}, {pj}) out of range")));
        }
        let (i, j) = (pi as i64, pj as i64);
        let u0 = at(i, j);
        let d2 = |di: i64, dj: i64| {
            (-at(i + 2 * di, j + 2 * dj) + 16.0 * at(i + di, j + dj) - 30.0 * u0 + 16.0 * at(i - di, j - dj)
                - at(i - 2 * di, j - 2 * dj))
                / (12.0 * h * h)
        };
        let dxx = d2(1, 0);
        let dyy = d2(0, 1);
        let dxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
        let mut acc = Complex64::new(0.0, 0.0);
        for di in 0..n {
            for dj in 0..n {
                let idx = di * n + dj;
                let (oi, oj) = (di as i64, dj as i64);
                let d = 2.0 * u0 - at(i + oi, j + oj) - at(i - oi, j - oj);
                let qw = quadform_w[idx];
                acc += d * kern[idx] + dxx * qw[0] + dxy * qw[1] + dyy * qw[2];
            }
        }
        let total = acc * (h * h) - (dxx + dyy) * 0.5 * analytic;
        out.push(total * (0.5 * kspec.c_na));
    }
    Ok(out)
}

/// Report of a constant calibration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub a: f64,
    pub n: usize,
    pub c_na: f64,
    pub residual: f64,
    pub tolerance: f64,
}

pub const CALIBRATION_TOL_1D: f64 = 1e-3;
pub const CALIBRATION_TOL_2D: f64 = 5e-3;

/// Closed-form `c_{n,a}`, validated against the multiplier `|ξ|^{2a}` on a Gaussian.
pub fn calibrate_constant(a: FractionalOrder, n: usize) -> Result<Calibration> {
    let kspec = PvKernelSpec::new(a, n)?;
    let (residual, tolerance) = if n == 1 {
        let g = Grid1D::new(2048, 32.0)?;
        let u = GridFunction::from_fn(g, |x| (-0.5 * x * x).exp());
        let m = apply_multiplier_unchecked(&SymbolSpec::riesz(a), &u);
        let p = apply_pv_full(&kspec, &u, Continuation::Periodic)?;
        (p.rel_diff(&m, Norm::L2), CALIBRATION_TOL_1D)
    } else {
        let g = Grid2D::new(256, 12.0)?;
        let u = GridFunction2D::from_fn(g, |x, y| (-0.5 * (x * x + y * y)).exp());
        let aa = a.a();
        let m = apply_multiplier_2d(&u, |x, y| Complex64::new((x * x + y * y).powf(aa), 0.0));
        let c = g.n() / 2;
        let pts: Vec<(usize, usize)> = (0..40)
            .step_by(5)
            .flat_map(|di| (0..40).step_by(9).map(move |dj| (c + di, c + dj)))
            .collect();
        let p = apply_pv_integral_2d(&kspec, &u, &pts)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (v, &(i, j)) in p.iter().zip(&pts) {
            let r = m.at(i, j);
            num += (v - r).norm_sqr();
            den += r.norm_sqr();
        }
        ((num / den).sqrt(), CALIBRATION_TOL_2D)
    };
    if !(residual <= tolerance) {
        return Err(Error::Calibration { residual, tolerance });
    }
    Ok(Calibration {
        a: a.a(),
        n,
        c_na: kspec.c_na,
        residual,
        tolerance,
    })
}
