//! Multiplier, principal-value and kernel commands.

use clap::{Args, ValueEnum};
use fraclap::kernel::order_reduce_kernel_check;
use fraclap::pv::{apply_pv_integral_with, calibrate_constant, Continuation, PvKernelSpec};
use fraclap::symbols::{
    apply_multiplier, compose_check, compose_check_against, support_preservation_residual_side,
};
use fraclap::{Complex64, Grid1D, GridFunction, Norm, Side, SymbolSpec};
use serde_json::json;

use crate::error::CliError;
use crate::inputs::{order, parse_list, parse_symbol, symbol, GridInput, Profile};
use crate::output::{grid_csv, Common, Outcome};
use crate::selftest::Checks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymbolName {
    Riesz,
    Bessel,
    Plus,
    Minus,
}

impl SymbolName {
    fn as_str(self) -> &'static str {
        match self {
            SymbolName::Riesz => "riesz",
            SymbolName::Bessel => "bessel",
            SymbolName::Plus => "plus",
            SymbolName::Minus => "minus",
        }
    }
}

/// Apply a Fourier multiplier: riesz |ξ|^{2a}, bessel (σ²+ξ²)^a, plus/minus (σ ± iξ)^t.
#[derive(Debug, Clone, Args)]
pub struct ApplyOp {
    #[arg(long, value_enum, default_value = "riesz")]
    pub symbol: SymbolName,
    /// Order a of riesz/bessel.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Order t of plus/minus.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl ApplyOp {
    fn spec(&self) -> Result<SymbolSpec, CliError> {
        let v = match self.symbol {
            SymbolName::Riesz | SymbolName::Bessel => self.a,
            SymbolName::Plus | SymbolName::Minus => self.t,
        };
        Ok(symbol(self.symbol.as_str(), v)?.with_sigma(self.sigma)?)
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let spec = self.spec()?;
        let u = self.data.load(Profile::Gaussian)?;
        let pu = apply_multiplier(&spec, &u)?;
        Ok(Outcome::new(json!({
            "symbol": self.symbol.as_str(),
            "kind": spec.kind,
            "order": spec.order,
            "sigma": spec.sigma,
            "n": u.grid.n(),
            "L": u.grid.half_length(),
            "max_abs": pu.max_abs(),
        }))
        .csv("Pu.csv", grid_csv(&pu)))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(256, 16.0)?;
        let zero = apply_multiplier(&self.spec()?, &GridFunction::zeros(g))?;
        let u = GridFunction::from_fn(g, |x| (-0.5 * x * x).exp());
        let id = apply_multiplier(&SymbolSpec::bessel(0.0), &u)?;
        Ok(Checks::new("apply-op")
            .check("zero input gives zero", zero.max_abs() == 0.0)
            .check("order zero is the identity", id.rel_diff(&u, Norm::L2) < 1e-12)
            .finish())
    }
}

/// Principal-value integral c_{1,a} PV∫ (u(x) - u(x+y))/|y|^{1+2a} dy at grid indices.
#[derive(Debug, Clone, Args)]
pub struct PvApply {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Comma-separated sample indices; all samples when omitted.
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long, value_enum, default_value = "periodic")]
    pub continuation: ContinuationName,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContinuationName {
    Periodic,
    Zero,
}

impl From<ContinuationName> for Continuation {
    fn from(c: ContinuationName) -> Self {
        match c {
            ContinuationName::Periodic => Continuation::Periodic,
            ContinuationName::Zero => Continuation::Zero,
        }
    }
}

impl PvApply {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let k = PvKernelSpec::new(order(self.a)?, 1)?;
        let u = self.data.load(Profile::Gaussian)?;
        let idx: Vec<usize> = match &self.points {
            Some(p) => parse_list(p)?,
            None => (0..u.len()).collect(),
        };
        let vals = apply_pv_integral_with(&k, &u, &idx, self.continuation.into())?;
        let mut csv = String::from("index,x,re,im\n");
        for (&i, z) in idx.iter().zip(&vals) {
            csv.push_str(&format!(
                "{i},{},{},{}\n",
                fraclap::grid::fmt17(u.grid.x(i)),
                fraclap::grid::fmt17(z.re),
                fraclap::grid::fmt17(z.im)
            ));
        }
        let peak = vals.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        Ok(Outcome::new(json!({
            "a": self.a,
            "c_na": k.c_na,
            "points": idx.len(),
            "max_abs": peak,
        }))
        .csv("pv.csv", csv))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let k = PvKernelSpec::new(order(0.5)?, 1)?;
        let g = Grid1D::new(256, 16.0)?;
        let z = apply_pv_integral_with(&k, &GridFunction::zeros(g), &[0, 128], Continuation::Zero)?;
        Ok(Checks::new("pv-apply")
            .check("zero input gives zero", z.iter().all(|v| v.norm() == 0.0))
            .check("c_{1,1/2} = 1/π", (k.c_na - std::f64::consts::FRAC_1_PI).abs() < 1e-14)
            .finish())
    }
}

/// Validate the closed-form constant c_{n,a} against the multiplier |ξ|^{2a}.
#[derive(Debug, Clone, Args)]
pub struct CalibrateC {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[command(flatten)]
    pub common: Common,
}

impl CalibrateC {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let c = calibrate_constant(order(self.a)?, self.dim)?;
        Ok(Outcome::new(serde_json::to_value(&c).expect("serializable")).json("calibration.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let c = calibrate_constant(order(0.5)?, 1)?;
        Ok(Checks::new("calibrate-c")
            .check("c_{1,1/2} = 1/π", (c.c_na - std::f64::consts::FRAC_1_PI).abs() < 1e-14)
            .check("residual within tolerance", c.residual <= c.tolerance)
            .finish())
    }
}

/// Check the half-line transform pairs of H e^{-σx} and H x^a e^{-σx}.
#[derive(Debug, Clone, Args)]
pub struct KernelCheck {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 8192)]
    pub n: usize,
    #[arg(long = "L", default_value_t = 64.0)]
    pub half_length: f64,
    #[command(flatten)]
    pub common: Common,
}

impl KernelCheck {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(self.n, self.half_length)?;
        let r = order_reduce_kernel_check(order(self.a)?, self.sigma, &g)?;
        let failed = !r.passed;
        Ok(Outcome::new(serde_json::to_value(&r).expect("serializable"))
            .json("kernel.json")
            .fail_if(failed, "transform pairs outside tolerance"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(4096, 32.0)?;
        let r = order_reduce_kernel_check(order(0.5)?, 1.0, &g)?;
        let small = order_reduce_kernel_check(order(0.5)?, 0.1, &g);
        Ok(Checks::new("kernel-check")
            .check("pairs hold at a = 1/2", r.passed)
            .check("slowly decaying kernel rejected", small.is_err())
            .finish())
    }
}

/// Compare Op(s1)Op(s2)u with Op(s1·s2)u (or Op(target)u).
#[derive(Debug, Clone, Args)]
pub struct ComposeCheck {
    /// kind:value[@sigma], e.g. minus:0.5
    #[arg(long, default_value = "minus:0.5", allow_hyphen_values = true)]
    pub s1: String,
    #[arg(long, default_value = "plus:0.5", allow_hyphen_values = true)]
    pub s2: String,
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl ComposeCheck {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let (s1, s2) = (parse_symbol(&self.s1)?, parse_symbol(&self.s2)?);
        let u = self.data.load(Profile::Gaussian)?;
        let r = match &self.target {
            Some(t) => compose_check_against(&s1, &s2, &parse_symbol(t)?, &u),
            None => compose_check(&s1, &s2, &u),
        };
        Ok(Outcome::new(json!({
            "s1": self.s1,
            "s2": self.s2,
            "target": self.target,
            "residual": r,
            "tolerance": self.tol,
        }))
        .json("compose.json")
        .check("composition residual", r, self.tol))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(1024, 32.0)?;
        let u = GridFunction::from_fn(g, |x| (-0.5 * x * x).exp());
        let r = compose_check_against(&SymbolSpec::plus(0.4), &SymbolSpec::plus(-0.4), &SymbolSpec::plus(0.0), &u);
        Ok(Checks::new("compose-check").check("Ξ^t Ξ^{-t} = I", r <= 1e-10).finish())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideName {
    Plus,
    Minus,
}

/// Mass that Ξ_±^t moves out of the support of u.
#[derive(Debug, Clone, Args)]
pub struct SupportCheck {
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "plus")]
    pub side: SideName,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub data: GridInput,
    #[command(flatten)]
    pub common: Common,
}

impl SupportCheck {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let side = match self.side {
            SideName::Plus => Side::Plus,
            SideName::Minus => Side::Minus,
        };
        let mut u = self.data.load(Profile::HalfSqrtExp)?;
        if side == Side::Minus && self.data.input.is_none() {
            let n = u.len();
            let vals: Vec<Complex64> = (0..n).map(|k| u.values[(n - k) % n]).collect();
            u = GridFunction::new(u.grid, vals, true)?;
        }
        let r = support_preservation_residual_side(side, self.t, &u);
        Ok(Outcome::new(json!({
            "t": self.t,
            "side": side,
            "residual": r,
            "tolerance": self.tol,
        }))
        .json("support.json")
        .check("support residual", r, self.tol))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(1024, 32.0)?;
        let u = GridFunction::from_fn(g, |x| Profile::HalfSqrtExp.eval(x));
        let r0 = support_preservation_residual_side(Side::Plus, 0.0, &u);
        let z = support_preservation_residual_side(Side::Plus, 0.5, &GridFunction::zeros(g));
        Ok(Checks::new("support-check")
            .check("t = 0 moves nothing", r0 == 0.0)
            .check("zero input moves nothing", z == 0.0 || z.is_nan())
            .finish())
    }
}
