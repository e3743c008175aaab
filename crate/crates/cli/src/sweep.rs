//! Cartesian parameter sweeps over (a, size), written as long-format CSV.

use clap::{Args, ValueEnum};
use fraclap::grid::fmt17;
use fraclap::halfline::{solve_homogeneous, ModelProblem};
use fraclap::interval::{assemble, endpoint_exponents, lowest_eigenpair, solve_dirichlet_interval, IntervalMesh};
use fraclap::special::getoor_constant;
use fraclap::{Grid1D, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{invalid, CliError};
use crate::identities::{green_report, pohozaev_report, GreenPair, PohozaevPair};
use crate::inputs::{order, parse_list, polynomial, Profile};
use crate::output::{Common, Outcome};
use crate::selftest::Checks;

pub const THREADS_ENV: &str = "FRAC_KIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// λ₁ of the interval matrix (size = m)
    Eigen,
    /// max |A(1-x²)^a - c_a| on the nodes (size = m)
    Getoor,
    /// Pohozaev rel_gap for f = 1, f = x (size = m)
    Pohozaev,
    /// Green rel_gap for the nonhomogeneous/homogeneous pair (size = m)
    Green,
    /// half-line solve of f = H e^{-x} on [-32, 32) (size = n)
    Halfline,
    /// interval solve with seeded random quadratic f (size = m)
    RandomRhs,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Eigen => "eigen",
            Target::Getoor => "getoor",
            Target::Pohozaev => "pohozaev",
            Target::Green => "green",
            Target::Halfline => "halfline",
            Target::RandomRhs => "random-rhs",
        }
    }
}

/// Cartesian sweep over orders and mesh sizes, fanned out over a worker pool.
#[derive(Debug, Clone, Args)]
pub struct Sweep {
    #[arg(long, value_enum, default_value = "eigen")]
    pub target: Target,
    /// Comma-separated orders.
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub a_values: String,
    /// Comma-separated sizes (m for interval targets, n for the half-line).
    #[arg(long, default_value = "64,128")]
    pub sizes: String,
    /// Worker threads; falls back to FRAC_KIT_THREADS, then the number of logical CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed of the random right-hand sides.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

pub fn pool_size(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| invalid(format!("{THREADS_ENV} must be a thread count, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

type Row = (String, f64);

fn job(target: Target, a: f64, size: usize, seed: u64) -> Result<Vec<Row>, CliError> {
    let q = |k: &str, v: f64| (k.to_string(), v);
    Ok(match target {
        Target::Eigen => {
            let op = assemble(order(a)?, IntervalMesh::new(size)?);
            vec![q("lambda1", lowest_eigenpair(&op)?.0)]
        }
        Target::Getoor => {
            let op = assemble(order(a)?, IntervalMesh::new(size)?);
            let u: Vec<f64> = op.mesh.nodes().iter().map(|x| (1.0 - x * x).powf(a)).collect();
            let c = getoor_constant(a);
            let err = op.apply(&u).iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
            vec![q("max_error", err)]
        }
        Target::Pohozaev => {
            let r = pohozaev_report(a, size, PohozaevPair::OneX)?;
            vec![q("lhs", r.lhs.re), q("rhs", r.rhs.re), q("rel_gap", r.rel_gap)]
        }
        Target::Green => {
            let r = green_report(a, size, GreenPair::NonhomHom)?;
            vec![q("lhs", r.lhs.re), q("rhs", r.rhs.re), q("rel_gap", r.rel_gap)]
        }
        Target::Halfline => {
            let g = Grid1D::new(size, 32.0)?;
            let f = GridFunction::from_fn(g, |x| Profile::HalfExp.eval(x));
            let sol = solve_homogeneous(&ModelProblem::homogeneous(order(a)?, f))?;
            vec![
                q("residual", sol.residual),
                q("trace_a", sol.trace_a.re),
                q("fitted_exponent", sol.fitted_exponent),
            ]
        }
        Target::RandomRhs => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..1.5)).collect();
            let op = assemble(order(a)?, IntervalMesh::new(size)?);
            let f: Vec<f64> = op.mesh.nodes().iter().map(|&x| polynomial(&c, x)).collect();
            let sol = solve_dirichlet_interval(&op, &f)?;
            let [l, r] = endpoint_exponents(op.mesh, &sol.real_values());
            vec![
                q("c0", c[0]),
                q("c1", c[1]),
                q("c2", c[2]),
                q("exponent_left", l),
                q("exponent_right", r),
            ]
        }
    })
}

/// Rows `target,a,size,quantity,value` in (a, size) order, independent of the pool size.
pub fn run_sweep(target: Target, a_values: &[f64], sizes: &[usize], seed: u64, threads: usize) -> Result<String, CliError> {
    let jobs: Vec<(usize, f64, usize)> = a_values
        .iter()
        .flat_map(|&a| sizes.iter().map(move |&s| (a, s)))
        .enumerate()
        .map(|(i, (a, s))| (i, a, s))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<Vec<Row>, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, a, s)| job(target, a, s, seed.wrapping_add(i as u64)))
            .collect()
    });
    let mut csv = String::from("target,a,size,quantity,value\n");
    for ((_, a, s), rows) in jobs.iter().zip(results) {
        for (k, v) in rows? {
            csv.push_str(&format!("{},{},{s},{k},{}\n", target.name(), fmt17(*a), fmt17(v)));
        }
    }
    Ok(csv)
}

impl Sweep {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let a: Vec<f64> = parse_list(&self.a_values)?;
        let sizes: Vec<usize> = parse_list(&self.sizes)?;
        if a.is_empty() || sizes.is_empty() {
            return Err(invalid("sweep needs at least one order and one size"));
        }
        let threads = pool_size(self.threads)?;
        let csv = run_sweep(self.target, &a, &sizes, self.seed, threads)?;
        Ok(Outcome::new(json!({
            "target": self.target.name(),
            "a_values": a,
            "sizes": sizes,
            "seed": self.seed,
            "rows": csv.lines().count() - 1,
        }))
        .csv("sweep.csv", csv)
        .json("sweep.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let one = run_sweep(Target::RandomRhs, &[0.5], &[32, 48], 7, 1)?;
        let many = run_sweep(Target::RandomRhs, &[0.5], &[32, 48], 7, 2)?;
        let other = run_sweep(Target::RandomRhs, &[0.5], &[32, 48], 8, 2)?;
        Ok(Checks::new("sweep")
            .check("output independent of the pool size", one == many)
            .check("seed changes the data", one != other)
            .finish())
    }
}
