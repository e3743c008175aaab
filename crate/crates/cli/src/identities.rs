//! Identity checks and E_μ classification.

use clap::{Args, ValueEnum};
use fraclap::identities::{check_green, check_pohozaev, classify_e_mu, IdentityInput, IdentityReport};
use fraclap::interval::{assemble, solve_nonhomogeneous_interval, EndpointData, IntervalMesh};
use fraclap::{Complex64, FractionalOrder, Grid1D, GridFunction};

use crate::error::CliError;
use crate::inputs::{order, parse_list, GridInput, Profile};
use crate::output::{Common, Outcome};
use crate::selftest::Checks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PohozaevPair {
    /// u from f = 1, v from f = x
    OneX,
    /// u = v from f = 1 (both sides vanish)
    OneOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreenPair {
    /// u with φ₊ = 1, f = 0; v from f = 1
    NonhomHom,
    /// u from f = 1, v from f = x (both sides vanish)
    HomHom,
    /// u with φ₊ = 1; v with φ₋ = 1, φ₊ = 1/2
    NonhomNonhom,
    /// u = v with φ₊ = 1 (both sides vanish)
    Same,
}

/// Trivial pairs are judged by |lhs|, |rhs| ≤ 1e-3 instead of the relative gap.
const TRIVIAL_LIMIT: f64 = 1e-3;

fn homogeneous(a: FractionalOrder, m: usize, f: impl Fn(f64) -> f64, label: &str) -> Result<IdentityInput, CliError> {
    let op = assemble(a, IntervalMesh::new(m)?);
    let fv: Vec<f64> = op.mesh.nodes().iter().map(|&x| f(x)).collect();
    Ok(IdentityInput::homogeneous(&op, &fv, label)?)
}

fn nonhomogeneous(a: FractionalOrder, m: usize, minus: f64, plus: f64, label: &str) -> Result<IdentityInput, CliError> {
    let op = assemble(a, IntervalMesh::new(m)?);
    let zero = vec![Complex64::new(0.0, 0.0); m];
    let phi = EndpointData {
        minus: Complex64::new(minus, 0.0),
        plus: Complex64::new(plus, 0.0),
    };
    let sol = solve_nonhomogeneous_interval(&op, &zero, phi, Complex64::new(0.0, 0.0))?;
    Ok(IdentityInput::from_solution(&sol, op.mesh, &zero, Complex64::new(0.0, 0.0), label))
}

fn report_outcome(r: &IdentityReport, trivial: bool, tol: f64, file: &str) -> Outcome {
    let out = Outcome::new(r.to_json()).json(file);
    if trivial {
        out.check("|lhs|", r.lhs.norm(), TRIVIAL_LIMIT).check("|rhs|", r.rhs.norm(), TRIVIAL_LIMIT)
    } else {
        out.check("rel_gap", r.rel_gap, tol)
    }
}

pub fn pohozaev_report(a: f64, m: usize, pair: PohozaevPair) -> Result<IdentityReport, CliError> {
    let fa = order(a)?;
    let u = homogeneous(fa, m, |_| 1.0, "homogeneous, f = 1")?;
    let r = match pair {
        PohozaevPair::OneX => check_pohozaev(&u, &homogeneous(fa, m, |x| x, "homogeneous, f = x")?, fa)?,
        PohozaevPair::OneOne => check_pohozaev(&u, &u, fa)?,
    };
    Ok(r)
}

pub fn green_report(a: f64, m: usize, pair: GreenPair) -> Result<IdentityReport, CliError> {
    let fa = order(a)?;
    let hom = || homogeneous(fa, m, |_| 1.0, "homogeneous, f = 1");
    let non = || nonhomogeneous(fa, m, 0.0, 1.0, "f = 0, φ₋ = 0, φ₊ = 1");
    let r = match pair {
        GreenPair::NonhomHom => check_green(&non()?, &hom()?, fa)?,
        GreenPair::HomHom => check_green(&hom()?, &homogeneous(fa, m, |x| x, "homogeneous, f = x")?, fa)?,
        GreenPair::NonhomNonhom => check_green(&non()?, &nonhomogeneous(fa, m, 1.0, 0.5, "f = 0, φ₋ = 1, φ₊ = 1/2")?, fa)?,
        GreenPair::Same => {
            let u = non()?;
            check_green(&u, &u, fa)?
        }
    };
    Ok(r)
}

/// ∫(Pu ∂v + ∂u Pv) against Γ(a+1)² Σ ν γ₀(u/d^a) γ₀(v/d^a) on (-1, 1).
#[derive(Debug, Clone, Args)]
pub struct CheckPohozaev {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1024)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "one-x")]
    pub pair: PohozaevPair,
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

impl CheckPohozaev {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let r = pohozaev_report(self.a, self.m, self.pair)?;
        Ok(report_outcome(&r, self.pair == PohozaevPair::OneOne, self.tol, "pohozaev.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let r = pohozaev_report(0.5, 128, PohozaevPair::OneOne)?;
        Ok(Checks::new("check-pohozaev")
            .check("even pair: both sides vanish", r.lhs.norm() <= TRIVIAL_LIMIT && r.rhs.norm() <= TRIVIAL_LIMIT)
            .finish())
    }
}

/// ∫(Pu v̄ - u Pv̄) against Γ(a)Γ(a+1) Σ (γ₁u γ₀v̄ - γ₀u γ₁v̄) on (-1, 1).
#[derive(Debug, Clone, Args)]
pub struct CheckGreen {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1024)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "nonhom-hom")]
    pub pair: GreenPair,
    #[arg(long, default_value_t = 3e-2)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

impl CheckGreen {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let r = green_report(self.a, self.m, self.pair)?;
        let trivial = matches!(self.pair, GreenPair::HomHom | GreenPair::Same);
        Ok(report_outcome(&r, trivial, self.tol, "green.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let same = green_report(0.5, 128, GreenPair::Same)?;
        let hom = green_report(0.5, 128, GreenPair::HomHom)?;
        Ok(Checks::new("check-green")
            .check("u = v: both sides vanish", same.lhs.norm() <= 1e-12 && same.rhs.norm() <= 1e-12)
            .check("homogeneous pair: both sides vanish", hom.lhs.norm() <= TRIVIAL_LIMIT && hom.rhs.norm() <= TRIVIAL_LIMIT)
            .finish())
    }
}

/// Best exponent μ with u ≈ d^μ (c0 + c1 d + c2 d²) at x = ±1.
#[derive(Debug, Clone, Args)]
pub struct ClassifyEmu {
    #[arg(long, default_value = "-0.5,-0.3,0.25,0.5,0.7", allow_hyphen_values = true)]
    pub candidates: String,
    #[arg(long, value_name = "CSV")]
    pub input: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long, default_value_t = 8192)]
    pub n: usize,
    #[arg(long = "L", default_value_t = 2.0)]
    pub half_length: f64,
    #[command(flatten)]
    pub common: Common,
}

impl ClassifyEmu {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let u = GridInput {
            input: self.input.clone(),
            profile: self.profile,
            n: self.n,
            half_length: self.half_length,
        }
        .load(Profile::Getoor)?;
        let c: Vec<f64> = parse_list(&self.candidates)?;
        let r = classify_e_mu(&u, &c)?;
        Ok(Outcome::new(serde_json::to_value(&r).expect("serializable")).json("class.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let g = Grid1D::new(8192, 2.0)?;
        let u = GridFunction::from_fn(g, |x| Profile::Getoor.eval(x));
        let r = classify_e_mu(&u, &[-0.5, 0.5, 0.7])?;
        let ok = r.endpoints.iter().all(|e| e.mu == 0.5 && (e.coefficients[0].re - 2f64.sqrt()).abs() < 1e-4);
        Ok(Checks::new("classify-emu")
            .check("(1-x²)^{1/2} is of class 1/2 with c0 = √2", ok)
            .check("empty candidate list rejected", classify_e_mu(&u, &[]).is_err())
            .finish())
    }
}
