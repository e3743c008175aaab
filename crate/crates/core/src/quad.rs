//! Quadrature rules: Gauss–Legendre, Gauss–Jacobi (Golub–Welsch) and an
//! adaptive Gauss–Kronrod integrator.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

use crate::special::gamma;

/// A quadrature rule on some fixed interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Affine map of a rule on `[-1, 1]` onto `[lo, hi]` (unweighted rules only).
    pub fn mapped(&self, lo: f64, hi: f64) -> Rule {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Rule {
            nodes: self.nodes.iter().map(|t| mid + half * t).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// n-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// n-point Gauss–Jacobi rule on `[-1, 1]` for the weight `(1-t)^alpha (1+t)^beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Rule {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jm[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let off = (4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Rule on `[0, x1]` for the weight `x^mu`.
pub fn gauss_power(n: usize, mu: f64, x1: f64) -> Rule {
    let r = gauss_jacobi(n, 0.0, mu);
    let scale = (0.5 * x1).powf(mu + 1.0);
    Rule {
        nodes: r.nodes.iter().map(|t| 0.5 * (t + 1.0) * x1).collect(),
        weights: r.weights.iter().map(|w| w * scale).collect(),
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let hw = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * hw, ((k - g) * hw).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[lo, hi]`.
///
/// Returns the integral and the estimated absolute error.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_depth: u32) -> (f64, f64) {
    fn rec<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, depth: u32, whole: (f64, f64)) -> (f64, f64) {
        let (v, e) = whole;
        if e <= tol || depth == 0 {
            return (v, e);
        }
        let mid = 0.5 * (lo + hi);
        let left = gk15(f, lo, mid);
        let right = gk15(f, mid, hi);
        let (lv, le) = rec(f, lo, mid, 0.5 * tol, depth - 1, left);
        let (rv, re) = rec(f, mid, hi, 0.5 * tol, depth - 1, right);
        (lv + rv, le + re)
    }
    let whole = gk15(&f, lo, hi);
    rec(&f, lo, hi, tol, max_depth, whole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(12);
        for p in 0..24 {
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            let got = r.integrate(|x| x.powi(p));
            assert!((got - exact).abs() < 1e-14, "p={p}: {got} vs {exact}");
        }
    }

    #[test]
    fn jacobi_moments() {
        // ∫_0^1 x^mu x^k dx = 1/(mu+k+1)
        let mu = -0.4;
        let r = gauss_power(20, mu, 1.0);
        for k in 0..30 {
            let got = r.integrate(|x| x.powi(k));
            assert_relative_eq!(got, 1.0 / (mu + k as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let a = gauss_jacobi(9, 0.0, 0.0);
        let b = gauss_legendre(9);
        for i in 0..9 {
            assert!((a.nodes[i] - b.nodes[i]).abs() < 1e-13);
            assert!((a.weights[i] - b.weights[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, _) = adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10, 60);
        assert_relative_eq!(v, 2.0, max_relative = 1e-8);
        let (v, _) = adaptive(|x: f64| (10.0 * x).sin(), 0.0, 3.0, 1e-12, 40);
        assert_relative_eq!(v, (1.0 - 30f64.cos()) / 10.0, max_relative = 1e-11);
    }
}
