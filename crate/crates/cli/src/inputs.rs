use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fraclap::{FractionalOrder, Grid1D, GridFunction, SymbolSpec};

use crate::error::{invalid, CliError};

/// Built-in sample functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// e^{-x²/2}
    Gaussian,
    /// e^{-1/(1-x²)} on (-1, 1)
    Bump,
    /// H(x) e^{-x}
    HalfExp,
    /// H(x) (1 + x) e^{-x}
    HalfLinearExp,
    /// H(x) x^{1/2} e^{-x}
    HalfSqrtExp,
    /// (1 - x²)₊^{1/2}
    Getoor,
    Zero,
}

impl Profile {
    pub fn eval(self, x: f64) -> f64 {
        let plus = |f: &dyn Fn(f64) -> f64| if x >= 0.0 { f(x) } else { 0.0 };
        match self {
            Profile::Gaussian => (-0.5 * x * x).exp(),
            Profile::Bump => {
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Profile::HalfExp => plus(&|x| (-x).exp()),
            Profile::HalfLinearExp => plus(&|x| (1.0 + x) * (-x).exp()),
            Profile::HalfSqrtExp => plus(&|x| x.sqrt() * (-x).exp()),
            Profile::Getoor => (1.0 - x * x).max(0.0).sqrt(),
            Profile::Zero => 0.0,
        }
    }
}

/// A grid function read from CSV or sampled from a built-in profile.
#[derive(Debug, Clone, Args)]
pub struct GridInput {
    /// Grid-function CSV (`# grid n=.. L=..` header, columns x,re,im).
    #[arg(long, value_name = "CSV")]
    pub input: Option<PathBuf>,
    /// Built-in profile used when no input file is given.
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Number of samples for a built-in profile.
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Half-length of the box for a built-in profile.
    #[arg(long = "L", default_value_t = 32.0)]
    pub half_length: f64,
}

impl GridInput {
    pub fn load(&self, default: Profile) -> Result<GridFunction, CliError> {
        if let Some(path) = &self.input {
            return Ok(GridFunction::read_csv(path)?);
        }
        let g = Grid1D::new(self.n, self.half_length)?;
        let p = self.profile.unwrap_or(default);
        Ok(GridFunction::from_fn(g, |x| p.eval(x)))
    }
}

pub fn order(a: f64) -> Result<FractionalOrder, CliError> {
    Ok(FractionalOrder::new(a)?)
}

/// `riesz:a`, `bessel:a`, `plus:t` or `minus:t`, optionally `@sigma`.
pub fn parse_symbol(text: &str) -> Result<SymbolSpec, CliError> {
    let (body, sigma) = match text.split_once('@') {
        Some((b, s)) => (b, Some(parse_f64(s)?)),
        None => (text, None),
    };
    let (kind, value) = body
        .split_once(':')
        .ok_or_else(|| invalid(format!("symbol {text:?}: expected kind:value")))?;
    let v = parse_f64(value)?;
    let spec = symbol(kind, v)?;
    match sigma {
        Some(s) => Ok(spec.with_sigma(s)?),
        None => Ok(spec),
    }
}

pub fn symbol(kind: &str, v: f64) -> Result<SymbolSpec, CliError> {
    Ok(match kind {
        "riesz" => SymbolSpec::riesz_order(2.0 * v),
        "bessel" => SymbolSpec::bessel(v),
        "plus" => SymbolSpec::plus(v),
        "minus" => SymbolSpec::minus(v),
        _ => return Err(invalid(format!("unknown symbol kind {kind:?} (riesz, bessel, plus, minus)"))),
    })
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| invalid(format!("not a number: {s:?}")))
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| invalid(format!("bad list entry {t:?}"))))
        .collect()
}

/// Interval right-hand side: a file of node values or polynomial coefficients.
#[derive(Debug, Clone, Args)]
pub struct IntervalRhs {
    /// File with one value per interior node (`value` or `x,value` per line).
    #[arg(long, value_name = "FILE")]
    pub rhs: Option<PathBuf>,
    /// Polynomial coefficients c0,c1,… of f(x) = Σ c_k x^k.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub f: String,
}

impl IntervalRhs {
    pub fn values(&self, xs: &[f64]) -> Result<Vec<f64>, CliError> {
        if let Some(path) = &self.rhs {
            let text = std::fs::read_to_string(path)?;
            let vals = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('x'))
                .map(|l| parse_f64(l.rsplit(',').next().unwrap_or(l)))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != xs.len() {
                return Err(invalid(format!("rhs file has {} values for {} nodes", vals.len(), xs.len())));
            }
            return Ok(vals);
        }
        let c: Vec<f64> = parse_list(&self.f)?;
        Ok(xs.iter().map(|&x| polynomial(&c, x)).collect())
    }
}

pub fn polynomial(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}
