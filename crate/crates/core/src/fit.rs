//! Boundary fits: weighted traces `γ₀(u/d^μ)` and local exponents.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// A boundary point together with the direction pointing into the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x0: f64,
    /// `+1.0` if the domain lies at `x > x0`, `-1.0` if at `x < x0`.
    pub inward: f64,
}

impl BoundaryPoint {
    pub const HALFLINE: BoundaryPoint = BoundaryPoint { x0: 0.0, inward: 1.0 };
    pub const LEFT: BoundaryPoint = BoundaryPoint { x0: -1.0, inward: 1.0 };
    pub const RIGHT: BoundaryPoint = BoundaryPoint { x0: 1.0, inward: -1.0 };

    pub fn distance(&self, x: f64) -> f64 {
        self.inward * (x - self.x0)
    }
}

/// Distance window `[lo, hi]` used by the fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    /// `[2h, min(0.1 L, 0.5)]`.
    pub fn halfline(h: f64, half_length: f64) -> Self {
        FitWindow {
            lo: 2.0 * h - 1e-12,
            hi: (0.1 * half_length).min(0.5),
        }
    }

    /// `[2h, 0.2]` for the unit-scale interval `(-1, 1)`.
    pub fn interval(h: f64) -> Self {
        FitWindow {
            lo: 2.0 * h - 1e-12,
            hi: 0.2,
        }
    }
}

/// Degree of the polynomial model for `u/d^μ`.
pub const TRACE_MODEL_DEGREE: usize = 4;

/// Polynomial model `u/d^μ ≈ c0 + c1 d + c2 d² + …` near a boundary point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceFit {
    pub mu: f64,
    /// `c0`, the weighted trace `γ₀(u/d^μ)`.
    pub limit: Complex64,
    /// `c1`, the derivative of the quotient along the inward normal.
    pub normal_derivative: Complex64,
    pub curvature: Complex64,
    /// All model coefficients `c0, c1, …`.
    pub coefficients: Vec<Complex64>,
    /// RMS deviation of the quotient from the model over the window.
    pub residual: f64,
    /// RMS size of the quotient over the window.
    pub scale: f64,
    pub samples: usize,
}

impl TraceFit {
    /// Model value of `u/d^μ` at distance `d`.
    pub fn quotient(&self, d: f64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * d + c)
    }

    /// `d/dd` of the model `d^μ Σ c_j d^j`.
    pub fn derivative(&self, d: f64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * ((self.mu + j as f64) * d.powf(self.mu + j as f64 - 1.0)))
            .sum()
    }
}

fn window_samples(xs: &[f64], values: &[Complex64], point: BoundaryPoint, w: FitWindow) -> (Vec<f64>, Vec<Complex64>) {
    let mut d = vec![];
    let mut v = vec![];
    for (&x, &u) in xs.iter().zip(values) {
        let dist = point.distance(x);
        if dist >= w.lo && dist <= w.hi {
            d.push(dist);
            v.push(u);
        }
    }
    (d, v)
}

fn lstsq(design: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    design
        .clone()
        .svd(true, true)
        .solve(rhs, 1e-14)
        .expect("SVD least squares")
}

/// Least-squares fit of `d^μ (c0 + c1 d + …)` to samples, in the quotient.
pub fn fit_quotient(xs: &[f64], values: &[Complex64], point: BoundaryPoint, mu: f64, w: FitWindow) -> Result<TraceFit> {
    let (d, v) = window_samples(xs, values, point, w);
    if d.len() < 2 * TRACE_MODEL_DEGREE + 2 {
        return Err(Error::InvalidParameter(format!(
            "fit window [{}, {}] holds only {} samples",
            w.lo,
            w.hi,
            d.len()
        )));
    }
    let m = d.len();
    let design = DMatrix::from_fn(m, TRACE_MODEL_DEGREE + 1, |i, j| d[i].powi(j as i32));
    let q: Vec<Complex64> = d.iter().zip(&v).map(|(&d, &u)| u / d.powf(mu)).collect();
    let re = lstsq(&design, &DVector::from_iterator(m, q.iter().map(|z| z.re)));
    let im = lstsq(&design, &DVector::from_iterator(m, q.iter().map(|z| z.im)));
    let coef = |j: usize| Complex64::new(re[j], im[j]);
    let mut ss = 0.0;
    let mut qq = 0.0;
    for (i, &di) in d.iter().enumerate() {
        let model: Complex64 = (0..=TRACE_MODEL_DEGREE).map(|j| coef(j) * di.powi(j as i32)).sum();
        ss += (q[i] - model).norm_sqr();
        qq += q[i].norm_sqr();
    }
    Ok(TraceFit {
        mu,
        limit: coef(0),
        normal_derivative: coef(1),
        curvature: coef(2),
        coefficients: (0..=TRACE_MODEL_DEGREE).map(coef).collect(),
        residual: (ss / m as f64).sqrt(),
        scale: (qq / m as f64).sqrt(),
        samples: m,
    })
}

/// Relative quality threshold for accepting a weighted trace.
pub const TRACE_FIT_LIMIT: f64 = 1e-2;

/// `γ₀(u/d^μ)` at a boundary point from arbitrary samples.
///
/// Fails with [`Error::Fit`] when the model misses the quotient by
/// more than 1% of its size, i.e. when `u/d^μ` has no clean limit.
pub fn weighted_trace_samples(
    xs: &[f64],
    values: &[Complex64],
    point: BoundaryPoint,
    mu: f64,
    w: FitWindow,
) -> Result<TraceFit> {
    let fit = fit_quotient(xs, values, point, mu, w)?;
    let limit = TRACE_FIT_LIMIT * fit.limit.norm().max(fit.scale);
    if !(fit.residual <= limit) {
        return Err(Error::Fit {
            residual: fit.residual,
            limit,
        });
    }
    Ok(fit)
}

/// `γ₀(u/d^μ)` of a grid function with the default half-line window.
pub fn weighted_trace(u: &GridFunction, mu: f64, point: BoundaryPoint) -> Result<TraceFit> {
    let g = u.grid;
    weighted_trace_samples(&g.xs(), &u.values, point, mu, FitWindow::halfline(g.h(), g.half_length()))
}

/// Local boundary exponent from `log|u| ≈ μ log d + b0 + b1 d + b2 d²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub residual: f64,
    pub samples: usize,
}

pub fn fit_exponent_samples(xs: &[f64], values: &[f64], point: BoundaryPoint, w: FitWindow) -> Result<ExponentFit> {
    let mut d = vec![];
    let mut y = vec![];
    let mut sign = 0.0;
    for (&x, &u) in xs.iter().zip(values) {
        let dist = point.distance(x);
        if dist >= w.lo && dist <= w.hi {
            if u == 0.0 || (sign != 0.0 && u.signum() != sign) {
                return Err(Error::Fit {
                    residual: f64::INFINITY,
                    limit: 0.0,
                });
            }
            sign = u.signum();
            d.push(dist);
            y.push(u.abs().ln());
        }
    }
    let m = d.len();
    if m < 6 {
        return Err(Error::InvalidParameter(format!("exponent window holds only {m} samples")));
    }
    let design = DMatrix::from_fn(m, 4, |i, j| if j == 0 { d[i].ln() } else { d[i].powi(j as i32 - 1) });
    let rhs = DVector::from_vec(y.clone());
    let c = lstsq(&design, &rhs);
    let fitted = &design * &c;
    let residual = ((fitted - rhs).norm_squared() / m as f64).sqrt();
    Ok(ExponentFit {
        exponent: c[0],
        residual,
        samples: m,
    })
}

/// Local exponent of a grid function at `x = 0⁺` with the default half-line window.
pub fn fit_exponent(u: &GridFunction, point: BoundaryPoint) -> Result<ExponentFit> {
    let g = u.grid;
    fit_exponent_samples(&g.xs(), &u.re(), point, FitWindow::halfline(g.h(), g.half_length()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn profile(mu: f64) -> GridFunction {
        let g = Grid1D::new(4096, 32.0).unwrap();
        GridFunction::from_fn(g, move |x| if x > 0.0 { x.powf(mu) * (-x).exp() } else { 0.0 })
    }

    #[test]
    fn trace_examples() {
        let u = profile(0.5);
        let t = weighted_trace(&u, 0.5, BoundaryPoint::HALFLINE).unwrap();
        assert!((t.limit.re - 1.0).abs() < 1e-4);
        assert!((t.normal_derivative.re + 1.0).abs() < 1e-2);
        let t = weighted_trace(&u, -0.5, BoundaryPoint::HALFLINE).unwrap();
        assert!(t.limit.norm() < 1e-4);
        let t = weighted_trace(&profile(-0.3), -0.3, BoundaryPoint::HALFLINE).unwrap();
        assert!((t.limit.re - 1.0).abs() < 1e-4);
    }

    #[test]
    fn wrong_class_is_rejected() {
        let u = profile(0.5);
        assert!(matches!(
            weighted_trace(&u, 1.3, BoundaryPoint::HALFLINE),
            Err(Error::Fit { .. })
        ));
    }

    #[test]
    fn exponents() {
        for mu in [-0.5, 0.25, 0.75] {
            let e = fit_exponent(&profile(mu), BoundaryPoint::HALFLINE).unwrap();
            assert!((e.exponent - mu).abs() < 1e-3, "{mu}: {}", e.exponent);
        }
    }
}
