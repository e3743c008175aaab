//! Residual checks of the integration-by-parts (Pohozaev-type) identity and
//! the fractional Green's formula on `(-1, 1)`, and `E_μ` class detection.
//!
//! Interior integrals use the trapezoid rule on `[-1+δ, 1-δ]`, `δ = 10h`; the
//! boundary layers use the fitted `d^μ` models with Gauss–Jacobi quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_quotient, BoundaryPoint, FitWindow, TraceFit, TRACE_FIT_LIMIT};
use crate::grid::GridFunction;
use crate::halfline::DirichletSolution;
use crate::interval::{interval_trace, solve_dirichlet_interval, IntervalMesh, OperatorMatrix};
use crate::quad::gauss_power;
use crate::special::gamma;
use crate::symbols::FractionalOrder;

/// A function `u` on the interval nodes with `r⁺Pu = f + λu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityInput {
    pub a: f64,
    pub mesh: IntervalMesh,
    pub u: Vec<Complex64>,
    pub f: Vec<Complex64>,
    pub lambda: Complex64,
    pub label: String,
}

impl IdentityInput {
    /// Homogeneous solution of `r⁺Pu = f`.
    pub fn homogeneous(op: &OperatorMatrix, f: &[f64], label: &str) -> Result<Self> {
        let sol = solve_dirichlet_interval(op, f)?;
        Ok(IdentityInput {
            a: op.a.a(),
            mesh: op.mesh,
            u: sol.u,
            f: f.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            lambda: Complex64::new(0.0, 0.0),
            label: label.to_string(),
        })
    }

    /// A solution of `r⁺(P - λ)u = f`.
    pub fn from_solution(sol: &DirichletSolution, mesh: IntervalMesh, f: &[Complex64], lambda: Complex64, label: &str) -> Self {
        IdentityInput {
            a: sol.a,
            mesh,
            u: sol.u.clone(),
            f: f.to_vec(),
            lambda,
            label: label.to_string(),
        }
    }

    pub fn pu(&self) -> Vec<Complex64> {
        self.f.iter().zip(&self.u).map(|(f, u)| f + self.lambda * u).collect()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        IdentityInput {
            u: self.u.iter().map(|z| z * s).collect(),
            f: self.f.iter().map(|z| z * s).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub a: f64,
    pub m: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub inputs_summary: String,
}

impl IdentityReport {
    fn new(identity: &str, a: f64, m: usize, lhs: Complex64, rhs: Complex64, summary: String) -> Self {
        let abs_gap = (lhs - rhs).norm();
        IdentityReport {
            identity: identity.to_string(),
            a,
            m,
            lhs,
            rhs,
            abs_gap,
            rel_gap: abs_gap / lhs.norm().max(rhs.norm()).max(1e-14),
            inputs_summary: summary,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identity": self.identity,
            "a": self.a,
            "m": self.m,
            "lhs": [self.lhs.re, self.lhs.im],
            "rhs": [self.rhs.re, self.rhs.im],
            "abs_gap": self.abs_gap,
            "rel_gap": self.rel_gap,
            "inputs_summary": self.inputs_summary,
        })
    }
}

const LAYER: usize = 10;

fn check_pair(u: &IdentityInput, v: &IdentityInput) -> Result<()> {
    if u.mesh != v.mesh || u.a != v.a {
        return Err(Error::InvalidParameter("identity inputs live on different meshes or orders".into()));
    }
    let m = u.mesh.m();
    if u.u.len() != m || u.f.len() != m || v.u.len() != m || v.f.len() != m {
        return Err(Error::InvalidParameter("identity inputs do not match the mesh".into()));
    }
    if m < 4 * LAYER {
        return Err(Error::InvalidParameter("mesh too coarse for the boundary layer".into()));
    }
    Ok(())
}

/// Smooth extrapolation of nodal values towards an endpoint.
fn smooth_model(mesh: IntervalMesh, vals: &[Complex64], point: BoundaryPoint) -> Result<TraceFit> {
    let h = mesh.h();
    fit_quotient(&mesh.nodes(), vals, point, 0.0, FitWindow { lo: 0.5 * h, hi: 16.5 * h })
}

fn dirichlet_model(mesh: IntervalMesh, vals: &[Complex64], mu: f64, point: BoundaryPoint) -> Result<TraceFit> {
    interval_trace(mesh, vals, mu, point)
}

fn derivative(u: &[Complex64], i: usize, h: f64) -> Complex64 {
    (-u[i + 2] + u[i + 1] * 8.0 - u[i - 1] * 8.0 + u[i - 2]) / (12.0 * h)
}

fn trapezoid<F: Fn(usize) -> Complex64>(lo: usize, hi: usize, h: f64, f: F) -> Complex64 {
    let mut acc = (f(lo) + f(hi)) * 0.5;
    for i in lo + 1..hi {
        acc += f(i);
    }
    acc * h
}

/// `∫_0^δ g(d) d^{μ} dd` with Gauss–Jacobi nodes.
fn layer<F: Fn(f64) -> Complex64>(mu: f64, delta: f64, g: F) -> Complex64 {
    let r = gauss_power(24, mu, delta);
    r.nodes.iter().zip(&r.weights).map(|(&d, &w)| g(d) * w).sum()
}

/// `∫_Ω (Pu ∂v + ∂u Pv) dx` against `Γ(a+1)² Σ ν γ₀(u/d^a) γ₀(v/d^a)`,
/// `ν = +1` at `x = -1` and `-1` at `x = 1`.
pub fn check_pohozaev(u: &IdentityInput, v: &IdentityInput, a: FractionalOrder) -> Result<IdentityReport> {
    check_pair(u, v)?;
    let av = a.a();
    if (av - u.a).abs() > 1e-14 {
        return Err(Error::InvalidParameter("order does not match the inputs".into()));
    }
    let mesh = u.mesh;
    let m = mesh.m();
    let h = mesh.h();
    let re = |w: &[Complex64]| -> Vec<Complex64> { w.iter().map(|z| Complex64::new(z.re, 0.0)).collect() };
    let (uu, pu, vv, pv) = (re(&u.u), re(&u.pu()), re(&v.u), re(&v.pu()));

    let lo = LAYER - 1;
    let hi = m - LAYER;
    let interior = trapezoid(lo, hi, h, |i| pu[i] * derivative(&vv, i, h) + derivative(&uu, i, h) * pv[i]);
    let delta = LAYER as f64 * h;
    let mut boundary = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for (point, dx_sign, nu) in [(BoundaryPoint::LEFT, 1.0, 1.0), (BoundaryPoint::RIGHT, -1.0, -1.0)] {
        let tu = dirichlet_model(mesh, &uu, av, point)?;
        let tv = dirichlet_model(mesh, &vv, av, point)?;
        let su = smooth_model(mesh, &pu, point)?;
        let sv = smooth_model(mesh, &pv, point)?;
        // derivatives behave like d^{a-1}; integrate g(d) d^{a-1}
        boundary += layer(av - 1.0, delta, |d| {
            let w = d.powf(1.0 - av);
            (su.quotient(d) * tv.derivative(d) + tu.derivative(d) * sv.quotient(d)) * (dx_sign * w)
        });
        rhs += tu.limit * tv.limit * nu;
    }
    let ga = gamma(av + 1.0);
    Ok(IdentityReport::new(
        "pohozaev",
        av,
        m,
        interior + boundary,
        rhs * (ga * ga),
        format!("u: {}; v: {}; a = {av}; m = {m}", u.label, v.label),
    ))
}

fn green_lhs(u: &IdentityInput, v: &IdentityInput, layer_nodes: usize) -> Result<Complex64> {
    let mesh = u.mesh;
    let m = mesh.m();
    let h = mesh.h();
    let av = u.a;
    // λ_u u v̄ - u conj(λ_v v) is the only term with a d^{2a-2} singularity
    let dl = u.lambda - v.lambda.conj();
    if dl.norm() > 0.0 && av <= 0.5 {
        return Err(Error::Integrability(format!(
            "(λ_u - conj λ_v) u v̄ behaves like d^{{{}}} at the boundary",
            2.0 * av - 2.0
        )));
    }
    let lo = layer_nodes - 1;
    let hi = m - layer_nodes;
    let interior = trapezoid(lo, hi, h, |i| {
        u.f[i] * v.u[i].conj() - u.u[i] * v.f[i].conj() + dl * u.u[i] * v.u[i].conj()
    });
    let delta = layer_nodes as f64 * h;
    let mut boundary = Complex64::new(0.0, 0.0);
    for point in [BoundaryPoint::LEFT, BoundaryPoint::RIGHT] {
        let tu = dirichlet_model(mesh, &u.u, av - 1.0, point)?;
        let tv = dirichlet_model(mesh, &v.u, av - 1.0, point)?;
        let fu = smooth_model(mesh, &u.f, point)?;
        let fv = smooth_model(mesh, &v.f, point)?;
        boundary += layer(av - 1.0, delta, |d| {
            fu.quotient(d) * tv.quotient(d).conj() - tu.quotient(d) * fv.quotient(d).conj()
        });
        if dl.norm() > 0.0 {
            boundary += layer(2.0 * av - 2.0, delta, |d| dl * tu.quotient(d) * tv.quotient(d).conj());
        }
    }
    Ok(interior + boundary)
}

/// `∫_Ω (Pu v̄ - u Pv̄) dx` against
/// `Γ(a)Γ(a+1) Σ (γ₁u γ₀v̄ - γ₀u γ₁v̄)` with `γ_j` the traces of `·/d^{a-1}`.
pub fn check_green(u: &IdentityInput, v: &IdentityInput, a: FractionalOrder) -> Result<IdentityReport> {
    check_pair(u, v)?;
    let av = a.a();
    if (av - u.a).abs() > 1e-14 {
        return Err(Error::InvalidParameter("order does not match the inputs".into()));
    }
    let mesh = u.mesh;
    let lhs = green_lhs(u, v, LAYER)?;
    let coarse = green_lhs(u, v, 2 * LAYER)?;
    let scale = u.u.iter().chain(&v.u).fold(0.0f64, |m, z| m.max(z.norm()))
        * u.f.iter().chain(&v.f).fold(1.0f64, |m, z| m.max(z.norm()));
    if (lhs - coarse).norm() > 5e-2 * lhs.norm().max(1e-6 * scale) {
        return Err(Error::Integrability(format!(
            "boundary-layer width changes the integral from {coarse} to {lhs}"
        )));
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for point in [BoundaryPoint::LEFT, BoundaryPoint::RIGHT] {
        let tu = dirichlet_model(mesh, &u.u, av - 1.0, point)?;
        let tv = dirichlet_model(mesh, &v.u, av - 1.0, point)?;
        rhs += tu.normal_derivative * tv.limit.conj() - tu.limit * tv.normal_derivative.conj();
    }
    Ok(IdentityReport::new(
        "green",
        av,
        mesh.m(),
        lhs,
        rhs * (gamma(av) * gamma(av + 1.0)),
        format!("u: {}; v: {}; a = {av}; m = {}", u.label, v.label, mesh.m()),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointClass {
    pub x0: f64,
    pub mu: f64,
    /// `c0, c1, c2` of `u/d^μ`.
    pub coefficients: [Complex64; 3],
    /// `(μ, relative fit residual)` for every candidate.
    pub residuals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub endpoints: Vec<EndpointClass>,
}

fn classify_endpoint(xs: &[f64], u: &[Complex64], h: f64, point: BoundaryPoint, candidates: &[f64]) -> Result<EndpointClass> {
    let w = FitWindow::interval(h);
    let mut fits = vec![];
    for &mu in candidates {
        let f = fit_quotient(xs, u, point, mu, w)?;
        let rel = f.residual / f.limit.norm().max(f.scale).max(f64::MIN_POSITIVE);
        fits.push((mu, rel, f));
    }
    let residuals: Vec<(f64, f64)> = fits.iter().map(|f| (f.0, f.1)).collect();
    let clean = |r: f64| r <= TRACE_FIT_LIMIT;
    // μ - k fits whenever μ does (the classes are nested); keep the sharpest
    let nested = |mu: f64| {
        fits.iter().any(|g| {
            let k = g.0 - mu;
            clean(g.1) && k > 0.5 && (k - k.round()).abs() < 1e-9
        })
    };
    let mut pool: Vec<&(f64, f64, TraceFit)> = fits.iter().filter(|f| !nested(f.0)).collect();
    pool.sort_by(|p, q| p.1.total_cmp(&q.1));
    let best = pool.first().ok_or_else(|| Error::InvalidParameter("no candidate exponents".into()))?;
    if let Some(second) = pool.get(1) {
        if second.1 <= 1.1 * best.1.max(1e-10) {
            return Err(Error::AmbiguousClass {
                first: best.0,
                second: second.0,
            });
        }
    }
    Ok(EndpointClass {
        x0: point.x0,
        mu: best.0,
        coefficients: [best.2.limit, best.2.normal_derivative, best.2.curvature],
        residuals,
    })
}

/// Best `μ` from `candidates` with `u ≈ d^μ (c0 + c1 d + c2 d²)` at `x = ±1`.
pub fn classify_e_mu_samples(xs: &[f64], u: &[Complex64], h: f64, candidates: &[f64]) -> Result<ClassReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate exponents".into()));
    }
    let endpoints = [BoundaryPoint::LEFT, BoundaryPoint::RIGHT]
        .into_iter()
        .map(|p| classify_endpoint(xs, u, h, p, candidates))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassReport { endpoints })
}

pub fn classify_e_mu(u: &GridFunction, candidates: &[f64]) -> Result<ClassReport> {
    let g = u.grid;
    if g.half_length() <= 1.0 {
        return Err(Error::InvalidParameter("grid must contain [-1, 1]".into()));
    }
    classify_e_mu_samples(&g.xs(), &u.values, g.h(), candidates)
}

/// Coefficient `c0` of `u/d^{μ}` at each endpoint; zero for `u ∈ E_{μ+1}`.
pub fn leading_coefficients(xs: &[f64], u: &[Complex64], h: f64, mu: f64) -> Result<[Complex64; 2]> {
    let w = FitWindow::interval(h);
    Ok([
        fit_quotient(xs, u, BoundaryPoint::LEFT, mu, w)?.limit,
        fit_quotient(xs, u, BoundaryPoint::RIGHT, mu, w)?.limit,
    ])
}
