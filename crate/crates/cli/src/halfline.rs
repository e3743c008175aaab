//! Half-line model problem commands.

use clap::{Args, ValueEnum};
use fraclap::fit::{fit_exponent, weighted_trace, BoundaryPoint};
use fraclap::grid::fmt17;
use fraclap::halfline::{
    decompose, make_transmission_sample, poisson_k0, poisson_k0_2d, poisson_residual_2d, solve_homogeneous,
    solve_nonhomogeneous, ClassTag, DirichletSolution, ModelProblem, DEFAULT_TOLERANCE,
};
use fraclap::special::gamma;
use fraclap::{Complex64, Grid1D, GridFunction};
use serde_json::json;

use crate::error::{invalid, CliError};
use crate::inputs::{order, GridInput, Profile};
use crate::output::{complex, grid_csv, Common, Outcome};
use crate::selftest::Checks;

/// Right-hand side of a half-line problem.
#[derive(Debug, Clone, Args)]
pub struct HalflineRhs {
    /// Grid-function CSV of f (must vanish for x < 0).
    #[arg(long, value_name = "CSV")]
    pub rhs: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long = "L", default_value_t = 32.0)]
    pub half_length: f64,
}

impl HalflineRhs {
    fn load(&self) -> Result<GridFunction, CliError> {
        GridInput {
            input: self.rhs.clone(),
            profile: self.profile,
            n: self.n,
            half_length: self.half_length,
        }
        .load(Profile::HalfExp)
    }
}

fn solution_outcome(sol: &DirichletSolution, grid: Grid1D, tol: f64) -> Result<Outcome, CliError> {
    let u = GridFunction::new(grid, sol.u.clone(), true)?;
    let mut summary = sol.summary();
    summary["support_leakage"] = json!(sol.support_leakage);
    summary["tolerance"] = json!(tol);
    Ok(Outcome::new(summary)
        .csv("u.csv", grid_csv(&u))
        .json("solution.json")
        .check("residual", sol.residual, tol))
}

/// Solve r⁺(1-Δ)^a u = f on the half-line with supp u ⊂ [0, ∞).
#[derive(Debug, Clone, Args)]
pub struct SolveHalfline {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub data: HalflineRhs,
    #[command(flatten)]
    pub common: Common,
}

impl SolveHalfline {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let f = self.data.load()?;
        let mut p = ModelProblem::homogeneous(order(self.a)?, f.clone());
        p.tolerance = self.tol;
        let sol = solve_homogeneous(&p)?;
        solution_outcome(&sol, f.grid, self.tol)
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(1024, 32.0)?;
        let sol = solve_homogeneous(&ModelProblem::homogeneous(order(0.5)?, GridFunction::zeros(g)))?;
        Ok(Checks::new("solve-halfline")
            .check("zero data gives zero", sol.u.iter().all(|z| z.norm() == 0.0))
            .finish())
    }
}

/// Solve r⁺(1-Δ)^a u = f with γ₀(u/x^{a-1}) = φ.
#[derive(Debug, Clone, Args)]
pub struct SolveHalflineNonhom {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_im: f64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub data: HalflineRhs,
    #[command(flatten)]
    pub common: Common,
}

impl SolveHalflineNonhom {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let f = self.data.load()?;
        let mut p = ModelProblem::nonhomogeneous(order(self.a)?, f.clone(), Complex64::new(self.phi, self.phi_im));
        p.tolerance = self.tol;
        let sol = solve_nonhomogeneous(&p)?;
        solution_outcome(&sol, f.grid, self.tol)
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(4096, 32.0)?;
        let f = GridFunction::from_fn(g, |x| Profile::HalfExp.eval(x));
        let a = order(0.4)?;
        let hom = solve_homogeneous(&ModelProblem::homogeneous(a, f.clone()))?;
        let non = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(a, f, Complex64::new(0.0, 0.0)))?;
        let blow = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(a, GridFunction::zeros(g), Complex64::new(1.0, 0.0)))?;
        Ok(Checks::new("solve-halfline-nonhom")
            .check("φ = 0 reduces to the homogeneous problem", hom.u == non.u)
            .check("φ ≠ 0 is tagged a - 1", blow.class_tag == ClassTag::TransmissionAMinus1)
            .finish())
    }
}

/// Build a transmission sample u = Ξ₊^{-a} e⁺ g and its data f = r⁺Pu.
#[derive(Debug, Clone, Args)]
pub struct MakeSample {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl MakeSample {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let g = self.data.load(Profile::HalfExp)?;
        let s = make_transmission_sample(order(self.a)?, &g)?;
        let trace = weighted_trace(&s.u, self.a, BoundaryPoint::HALFLINE).map(|t| t.limit).ok();
        let exponent = fit_exponent(&s.u, BoundaryPoint::HALFLINE).map(|e| e.exponent).ok();
        Ok(Outcome::new(json!({
            "a": self.a,
            "laguerre_alpha": s.profile.alpha,
            "laguerre_terms": s.profile.coef.len(),
            "trace_a": trace.map(complex),
            "fitted_exponent": exponent,
        }))
        .csv("u.csv", grid_csv(&s.u))
        .csv("f.csv", grid_csv(&s.model_rhs()))
        .json("sample.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(1024, 32.0)?;
        let s = make_transmission_sample(order(0.3)?, &GridFunction::zeros(g))?;
        let full = GridFunction::from_fn(g, |x| (-x * x).exp());
        Ok(Checks::new("make-sample")
            .check("zero profile gives zero", s.u.max_abs() == 0.0)
            .check("profile on both sides rejected", make_transmission_sample(order(0.3)?, &full).is_err())
            .finish())
    }
}

/// Split a transmission sample into v + x^a K₀ψ/Γ(a+1) (requires a > 1/2).
#[derive(Debug, Clone, Args)]
pub struct Decompose {
    #[arg(long, default_value_t = 0.75)]
    pub a: f64,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl Decompose {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let g = self.data.load(Profile::HalfExp)?;
        let s = make_transmission_sample(order(self.a)?, &g)?;
        let d = decompose(&s)?;
        Ok(Outcome::new(json!({
            "a": self.a,
            "psi": complex(d.psi),
            "trace_a": complex(d.trace_a),
            "reconstruction_error": d.reconstruction_error,
            "v_exponent": d.v_exponent,
        }))
        .csv("v.csv", grid_csv(&d.v))
        .csv("w.csv", grid_csv(&d.w))
        .json("decomposition.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(2048, 32.0)?;
        let e = GridFunction::from_fn(g, |x| Profile::HalfExp.eval(x));
        let d = decompose(&make_transmission_sample(order(0.75)?, &e)?)?;
        let low = decompose(&make_transmission_sample(order(0.5)?, &e)?);
        Ok(Checks::new("decompose")
            .check("ψ(e^{-x}) = 1", (d.psi.re - 1.0).abs() < 1e-8)
            .check("trace is ψ/Γ(a+1)", (d.trace_a.re - 1.0 / gamma(1.75)).abs() < 1e-8)
            .check("a ≤ 1/2 rejected", low.is_err())
            .finish())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointName {
    /// x = 0, domain x > 0
    Halfline,
    /// x = -1, domain x > -1
    Left,
    /// x = 1, domain x < 1
    Right,
}

impl From<PointName> for BoundaryPoint {
    fn from(p: PointName) -> Self {
        match p {
            PointName::Halfline => BoundaryPoint::HALFLINE,
            PointName::Left => BoundaryPoint::LEFT,
            PointName::Right => BoundaryPoint::RIGHT,
        }
    }
}

/// Weighted trace γ₀(u/d^μ) and the local boundary exponent.
#[derive(Debug, Clone, Args)]
pub struct Trace {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, value_enum, default_value = "halfline")]
    pub point: PointName,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl Trace {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let u = self.data.load(Profile::HalfSqrtExp)?;
        let p: BoundaryPoint = self.point.into();
        let t = weighted_trace(&u, self.mu, p)?;
        let e = fit_exponent(&u, p).ok();
        Ok(Outcome::new(json!({
            "mu": self.mu,
            "x0": p.x0,
            "limit": complex(t.limit),
            "normal_derivative": complex(t.normal_derivative),
            "curvature": complex(t.curvature),
            "residual": t.residual,
            "samples": t.samples,
            "fitted_exponent": e.map(|e| e.exponent),
        }))
        .json("trace.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(4096, 32.0)?;
        let u = GridFunction::from_fn(g, |x| Profile::HalfSqrtExp.eval(x));
        let t = weighted_trace(&u, 0.5, BoundaryPoint::HALFLINE)?;
        let e = fit_exponent(&u, BoundaryPoint::HALFLINE)?;
        Ok(Checks::new("trace")
            .check("γ₀(x^{1/2}e^{-x}/x^{1/2}) = 1", (t.limit.re - 1.0).abs() < 1e-4)
            .check("exponent 1/2", (e.exponent - 0.5).abs() < 0.02)
            .finish())
    }
}

/// Poisson operator K₀φ of the model problem.
#[derive(Debug, Clone, Args)]
pub struct Poisson {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl Poisson {
    pub fn run(&self) -> Result<Outcome, CliError> {
        match self.dim {
            1 => {
                let g = Grid1D::new(self.data.n, self.data.half_length)?;
                let u = poisson_k0(Complex64::new(self.phi, 0.0), g);
                Ok(Outcome::new(json!({"dim": 1, "phi": self.phi, "value_at_origin": complex(u.values[g.origin()])}))
                    .csv("poisson.csv", grid_csv(&u))
                    .json("poisson.json"))
            }
            2 => {
                let mut data = self.data.clone();
                if data.input.is_none() && data.n == 4096 {
                    data.n = 256;
                    data.half_length = 12.0;
                }
                let phi = data.load(Profile::Gaussian)?.scale(Complex64::new(self.phi, 0.0));
                let u = poisson_k0_2d(&phi)?;
                let residual = poisson_residual_2d(&u);
                let n = u.grid.n();
                let mut csv = String::from("x1,x2,re,im\n");
                for i in 0..n {
                    for j in 0..n {
                        let z = u.at(i, j);
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            fmt17(u.grid.axis.x(i)),
                            fmt17(u.grid.axis.x(j)),
                            fmt17(z.re),
                            fmt17(z.im)
                        ));
                    }
                }
                Ok(Outcome::new(json!({"dim": 2, "n": n, "residual": residual}))
                    .csv("poisson.csv", csv)
                    .json("poisson.json"))
            }
            d => Err(invalid(format!("dimension must be 1 or 2, got {d}"))),
        }
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(256, 16.0)?;
        let zero = poisson_k0(Complex64::new(0.0, 0.0), g);
        let one = poisson_k0(Complex64::new(2.0, 0.0), g);
        Ok(Checks::new("poisson")
            .check("φ = 0 gives zero", zero.max_abs() == 0.0)
            .check("boundary value is φ", one.values[g.origin()].re == 2.0)
            .finish())
    }
}
