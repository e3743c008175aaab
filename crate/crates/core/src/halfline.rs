//! Model Dirichlet problems for `P = (1 - Δ)^a = Ξ₋^a Ξ₊^a` on the half-line.
//!
//! The homogeneous solution is `u = Ξ₊^{-a} e⁺ r⁺ Ξ₋^{-a} e⁺ f`. Data are
//! expanded in the Laguerre functions of [`crate::laguerre`], on whose span both
//! factors act exactly, so the only discretization error is the projection of
//! `f`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_exponent, weighted_trace, BoundaryPoint};
use crate::grid::{Grid1D, Grid2D, GridFunction, GridFunction2D, HalfLineMask, Norm, Side};
use crate::laguerre::{minus_power, project, LaguerreExpansion};
use crate::symbols::{FractionalOrder, SymbolKind, SymbolSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ModelProblem {
    pub a: FractionalOrder,
    pub operator: SymbolSpec,
    pub rhs: GridFunction,
    pub dirichlet_datum: Complex64,
    pub homogeneous: bool,
    pub tolerance: f64,
}

impl ModelProblem {
    pub fn homogeneous(a: FractionalOrder, rhs: GridFunction) -> Self {
        ModelProblem {
            a,
            operator: SymbolSpec::bessel(a.a()),
            rhs,
            dirichlet_datum: Complex64::new(0.0, 0.0),
            homogeneous: true,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn nonhomogeneous(a: FractionalOrder, rhs: GridFunction, phi: Complex64) -> Self {
        ModelProblem {
            dirichlet_datum: phi,
            homogeneous: false,
            ..Self::homogeneous(a, rhs)
        }
    }

    fn validate(&self) -> Result<()> {
        let op = &self.operator;
        if op.kind != SymbolKind::BesselPower || op.sigma != 1.0 || (op.order - 2.0 * self.a.a()).abs() > 1e-14 {
            return Err(Error::Factorization(format!(
                "{:?} of order {} with sigma {}; only (1 - Δ)^a factors as Ξ₋^a Ξ₊^a here",
                op.kind, op.order, op.sigma
            )));
        }
        if self.homogeneous && self.dirichlet_datum != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("homogeneous problem needs φ = 0".into()));
        }
        if !(self.dirichlet_datum.re.is_finite() && self.dirichlet_datum.im.is_finite()) {
            return Err(Error::InvalidParameter("Dirichlet datum must be finite".into()));
        }
        let minus = HalfLineMask::new(Side::Minus, self.rhs.grid);
        let peak = self.rhs.max_abs();
        if minus.indices().any(|k| self.rhs.values[k].norm() > 1e-14 * peak) {
            return Err(Error::InvalidParameter("right-hand side must vanish on the minus side".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    TransmissionA,
    TransmissionAMinus1,
}

/// A solved Dirichlet problem: samples of `u` with its boundary diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirichletSolution {
    pub a: f64,
    /// Sample positions.
    pub x: Vec<f64>,
    /// Samples of `u` (zero outside the domain).
    pub u: Vec<Complex64>,
    /// `‖r⁺Pu - f‖ / ‖f‖`.
    pub residual: f64,
    /// `γ₀(u/d^a)` (at `x = 1` for intervals).
    pub trace_a: Complex64,
    /// `γ₀(u/d^{a-1})` (at `x = 1` for intervals).
    pub trace_a_minus_1: Complex64,
    /// Local boundary exponent (NaN when `u` vanishes identically near the boundary).
    pub fitted_exponent: f64,
    pub class_tag: ClassTag,
    /// Relative l2 mass outside the domain.
    pub support_leakage: f64,
}

impl DirichletSolution {
    /// The JSON sidecar written next to the samples.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "residual": self.residual,
            "trace_a": [self.trace_a.re, self.trace_a.im],
            "trace_a_minus_1": [self.trace_a_minus_1.re, self.trace_a_minus_1.im],
            "fitted_exponent": self.fitted_exponent,
            "class_tag": self.class_tag,
        })
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.u.iter().map(|z| z.re).collect()
    }
}

/// Expansion-level solution of `r⁺Pu = f`, `supp u ⊂ [0, ∞)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalflineExpansion {
    /// `u = Σ d_k ψ_k^a`.
    pub u: LaguerreExpansion,
    /// Projection of `f` onto `ψ^0`.
    pub f: LaguerreExpansion,
    pub projection_residual: f64,
}

/// `r⁺ Ξ₋^{-a} e⁺` followed by `Ξ₊^{-a}` on a `ψ^0` expansion.
pub fn solve_expansion(a: f64, f: &LaguerreExpansion) -> LaguerreExpansion {
    LaguerreExpansion {
        alpha: 0.0,
        coef: minus_power(-a, &f.coef),
    }
    .plus_power(-a)
}

/// `r⁺ P u` for `u = Σ c_k ψ_k^a`, as a `ψ^0` expansion.
pub fn apply_model_operator(a: f64, u: &LaguerreExpansion) -> Result<LaguerreExpansion> {
    if (u.alpha - a).abs() > 1e-14 {
        return Err(Error::InvalidParameter(format!(
            "expansion has exponent {} but the operator needs {a}",
            u.alpha
        )));
    }
    Ok(LaguerreExpansion {
        alpha: 0.0,
        coef: minus_power(a, &u.coef),
    })
}

fn diagnostics(
    a: f64,
    u: GridFunction,
    residual: f64,
    class_tag: ClassTag,
) -> Result<DirichletSolution> {
    let scale = u.max_abs();
    let (trace_a, trace_a_minus_1, fitted_exponent) = if scale == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), f64::NAN)
    } else {
        let exponent = match fit_exponent(&u, BoundaryPoint::HALFLINE) {
            Ok(e) => e.exponent,
            Err(e) => {
                log::warn!("exponent fit failed: {e}");
                f64::NAN
            }
        };
        let t1 = weighted_trace(&u, a - 1.0, BoundaryPoint::HALFLINE)?.limit;
        let ta = match class_tag {
            ClassTag::TransmissionA => weighted_trace(&u, a, BoundaryPoint::HALFLINE)?.limit,
            ClassTag::TransmissionAMinus1 => Complex64::new(f64::NAN, f64::NAN),
        };
        (ta, t1, exponent)
    };
    let support_leakage = HalfLineMask::new(Side::Plus, u.grid).leakage(&u, 0);
    Ok(DirichletSolution {
        a,
        x: u.grid.xs(),
        u: u.values,
        residual,
        trace_a,
        trace_a_minus_1,
        fitted_exponent,
        class_tag,
        support_leakage,
    })
}

fn solve_core(p: &ModelProblem) -> Result<(HalflineExpansion, f64)> {
    let a = p.a.a();
    let (f, proj_res) = match project(&p.rhs, 1e-3 * p.tolerance) {
        Err(Error::Residual { .. }) => project(&p.rhs, p.tolerance)?,
        r => r?,
    };
    let u = solve_expansion(a, &f);
    // residual of the assembled solution against the sampled data
    let pu = apply_model_operator(a, &u)?.sample(p.rhs.grid);
    let mask = HalfLineMask::new(Side::Plus, p.rhs.grid);
    let diff = mask.apply(&pu.sub(&p.rhs)).norm(Norm::L2);
    let fnorm = p.rhs.norm(Norm::L2);
    let residual = if fnorm == 0.0 { diff } else { diff / fnorm };
    if residual > p.tolerance {
        return Err(Error::Residual {
            residual,
            tolerance: p.tolerance,
        });
    }
    Ok((
        HalflineExpansion {
            u,
            f,
            projection_residual: proj_res,
        },
        residual,
    ))
}

/// Homogeneous model problem `r⁺(1-Δ)^a u = f`, `supp u ⊂ [0, ∞)`.
pub fn solve_homogeneous(p: &ModelProblem) -> Result<DirichletSolution> {
    p.validate()?;
    if !p.homogeneous {
        return Err(Error::InvalidParameter("problem is not homogeneous".into()));
    }
    let (exp, residual) = solve_core(p)?;
    diagnostics(p.a.a(), exp.u.sample(p.rhs.grid), residual, ClassTag::TransmissionA)
}

/// The expansion behind [`solve_homogeneous`].
pub fn solve_homogeneous_expansion(p: &ModelProblem) -> Result<HalflineExpansion> {
    p.validate()?;
    Ok(solve_core(p)?.0)
}

/// Blow-up lifting `w = φ x^{a-1} e^{-x} H(x) = φ Γ(a) ψ_0^{a-1}`.
///
/// `Ξ₊^a w = φ δ`, hence `r⁺Pw = 0` and `γ₀(w/x^{a-1}) = φ`.
pub fn lifting(a: FractionalOrder, phi: Complex64) -> LaguerreExpansion {
    LaguerreExpansion {
        alpha: a.a() - 1.0,
        coef: vec![phi * a.gamma_a()],
    }
}

/// Nonhomogeneous problem `r⁺Pu = f`, `γ₀(u/x^{a-1}) = φ`.
pub fn solve_nonhomogeneous(p: &ModelProblem) -> Result<DirichletSolution> {
    p.validate()?;
    let (exp, residual) = solve_core(p)?;
    let grid = p.rhs.grid;
    let v = exp.u.sample(grid);
    if p.dirichlet_datum == Complex64::new(0.0, 0.0) {
        return diagnostics(p.a.a(), v, residual, ClassTag::TransmissionA);
    }
    let w = lifting(p.a, p.dirichlet_datum).sample(grid);
    diagnostics(p.a.a(), v.add(&w), residual, ClassTag::TransmissionAMinus1)
}

/// `u = Ξ₊^{-a} e⁺ g` for a smooth plus-side profile `g`.
#[derive(Debug, Clone)]
pub struct TransmissionSample {
    pub a: FractionalOrder,
    pub g: GridFunction,
    pub u: GridFunction,
    pub profile: LaguerreExpansion,
}

impl TransmissionSample {
    pub fn expansion(&self) -> LaguerreExpansion {
        self.profile.plus_power(-self.a.a())
    }

    /// `r⁺Pu` sampled on the grid (zero on the minus side).
    pub fn model_rhs(&self) -> GridFunction {
        let a = self.a.a();
        apply_model_operator(a, &self.expansion())
            .expect("exponent matches")
            .sample(self.g.grid)
    }
}

pub fn make_transmission_sample(a: FractionalOrder, g: &GridFunction) -> Result<TransmissionSample> {
    let minus = HalfLineMask::new(Side::Minus, g.grid);
    let peak = g.max_abs();
    if minus.indices().any(|k| g.values[k].norm() > 1e-14 * peak) {
        return Err(Error::InvalidParameter("profile must vanish on the minus side".into()));
    }
    let (profile, _) = project(g, 1e-9)?;
    let u = profile.plus_power(-a.a()).sample(g.grid);
    Ok(TransmissionSample {
        a,
        g: g.clone(),
        u,
        profile,
    })
}

/// Poisson operator in one dimension: `φ H(x) e^{-x}`.
pub fn poisson_k0(phi: Complex64, grid: Grid1D) -> GridFunction {
    let mut u = GridFunction::from_complex_fn(grid, |x| if x >= 0.0 { phi * (-x).exp() } else { Complex64::new(0.0, 0.0) });
    u.is_real_hint = phi.im == 0.0;
    u
}

/// Two-dimensional Poisson operator on `[-L, L)²`, with `x'` the first index
/// and `x_n` the second: `u = F⁻¹_{ξ'} e^{-⟨ξ'⟩ x_n} φ̂(ξ')` for `x_n ≥ 0`.
pub fn poisson_k0_2d(phi: &GridFunction) -> Result<GridFunction2D> {
    let axis = phi.grid;
    let grid = Grid2D { axis };
    let n = axis.n();
    let spec = crate::grid::forward_transform(phi);
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for j in axis.origin()..n {
        let xn = axis.x(j);
        let damped = crate::grid::Spectrum {
            grid: axis,
            values: spec
                .values
                .iter()
                .enumerate()
                .map(|(i, z)| z * (-(1.0 + axis.xi(i).powi(2)).sqrt() * xn).exp())
                .collect(),
        };
        let col = crate::grid::inverse_transform(&damped, phi.is_real_hint);
        for i in 0..n {
            values[grid.index(i, j)] = col.values[i];
        }
    }
    Ok(GridFunction2D { grid, values })
}

/// Relative residual of `(1 - Δ)u` on `x_n ∈ [4h, L/2]`, with `∂²_{x'}`
/// spectral and `∂²_{x_n}` by fourth-order differences.
pub fn poisson_residual_2d(u: &GridFunction2D) -> f64 {
    let axis = u.grid.axis;
    let n = axis.n();
    let h = axis.h();
    let tangential = crate::grid::apply_multiplier_2d(u, |xi1, _| Complex64::new(xi1 * xi1, 0.0));
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for j in axis.origin() + 4..n {
        if axis.x(j) > 0.5 * axis.half_length() {
            break;
        }
        for i in 0..n {
            let at = |jj: usize| u.values[u.grid.index(i, jj)];
            let dnn = (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1) - at(j - 2)) / (12.0 * h * h);
            let r = at(j) + tangential.values[u.grid.index(i, j)] - dnn;
            num = num.max(r.norm());
            den = den.max(at(j).norm());
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Boundary splitting `u = v + x^a K₀ψ / Γ(a+1)` of a transmission sample.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub v: GridFunction,
    pub w: GridFunction,
    /// `ψ = γ₀ g`, the Dirichlet value of the profile.
    pub psi: Complex64,
    /// `γ₀(u/x^a) = ψ / Γ(a+1)`.
    pub trace_a: Complex64,
    pub reconstruction_error: f64,
    pub v_exponent: f64,
}

pub fn decompose(sample: &TransmissionSample) -> Result<Decomposition> {
    let a = sample.a;
    if a.a() <= 0.5 {
        return Err(Error::Order {
            a: a.a(),
            reason: "the splitting needs 1/2 < a < 1",
        });
    }
    let grid = sample.g.grid;
    let psi: Complex64 = sample.profile.coef.iter().sum();
    let mut rest = sample.profile.clone();
    if let Some(c0) = rest.coef.first_mut() {
        *c0 -= psi;
    }
    let v = rest.plus_power(-a.a()).sample(grid);
    let w = poisson_k0(psi, grid).map(|z| z);
    let w = GridFunction::from_complex_fn(grid, |x| {
        if x >= 0.0 {
            w.values[((x + grid.half_length()) / grid.h()).round() as usize] * x.powf(a.a()) / a.gamma_a_plus_1()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let recon = v.add(&w);
    let reconstruction_error = recon.rel_diff(&sample.u, Norm::L2);
    let v_exponent = if v.max_abs() == 0.0 {
        f64::NAN
    } else {
        fit_exponent(&v, BoundaryPoint::HALFLINE).map(|e| e.exponent).unwrap_or(f64::NAN)
    };
    Ok(Decomposition {
        v,
        w,
        psi,
        trace_a: psi / a.gamma_a_plus_1(),
        reconstruction_error,
        v_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn grid() -> Grid1D {
        Grid1D::new(4096, 32.0).unwrap()
    }

    fn exp_profile(g: Grid1D) -> GridFunction {
        GridFunction::from_fn(g, |x| if x >= 0.0 { (-x).exp() } else { 0.0 })
    }

    #[test]
    fn exponential_rhs_has_closed_form_solution() {
        let g = grid();
        let a = FractionalOrder::new(0.4).unwrap();
        let sol = solve_homogeneous(&ModelProblem::homogeneous(a, exp_profile(g))).unwrap();
        let scale = 2f64.powf(-0.4) / gamma(1.4);
        for (x, u) in sol.x.iter().zip(&sol.u) {
            let exact = if *x > 0.0 { scale * x.powf(0.4) * (-x).exp() } else { 0.0 };
            assert!((u.re - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn wrong_operator_is_rejected() {
        let g = grid();
        let a = FractionalOrder::new(0.4).unwrap();
        let mut p = ModelProblem::homogeneous(a, exp_profile(g));
        p.operator = SymbolSpec::riesz(a);
        assert!(matches!(solve_homogeneous(&p), Err(Error::Factorization(_))));
    }

    #[test]
    fn minus_side_data_rejected() {
        let g = grid();
        let a = FractionalOrder::new(0.4).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x * x).exp());
        assert!(solve_homogeneous(&ModelProblem::homogeneous(a, f)).is_err());
    }
}
