//! Dirichlet problem on (-1, 1): assembly, solves, spectrum, resolvent, heat flow.

use clap::{Args, ValueEnum};
use fraclap::interval::{
    assemble, default_rays, eigen_richardson, endpoint_exponents, heat_evolve, heat_evolve_nonhomogeneous,
    resolvent_scan, solve_dirichlet_interval, solve_nonhomogeneous_interval, EndpointData, HeatScheme,
    HeatTrajectory, IntervalMesh, OperatorMatrix,
};
use fraclap::special::getoor_constant;
use fraclap::grid::fmt17;
use fraclap::Complex64;
use serde_json::json;

use crate::error::CliError;
use crate::inputs::{order, parse_list, polynomial, IntervalRhs};
use crate::output::{complex, interval_csv, real_interval_csv, Common, Outcome};
use crate::selftest::Checks;

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Number of interior nodes.
    #[arg(long, default_value_t = 512)]
    pub m: usize,
}

impl IntervalArgs {
    pub fn operator(&self) -> Result<OperatorMatrix, CliError> {
        Ok(assemble(order(self.a)?, IntervalMesh::new(self.m)?))
    }
}

/// Dense matrix of (-Δ)^a on (-1, 1) with zero exterior values.
#[derive(Debug, Clone, Args)]
pub struct AssembleInterval {
    #[command(flatten)]
    pub mesh: IntervalArgs,
    #[command(flatten)]
    pub common: Common,
}

impl AssembleInterval {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let op = self.mesh.operator()?;
        let getoor: Vec<f64> = op.mesh.nodes().iter().map(|x| (1.0 - x * x).powf(self.mesh.a)).collect();
        let c = getoor_constant(self.mesh.a);
        let err = op.apply(&getoor).iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        Ok(Outcome::new(json!({
            "a": self.mesh.a,
            "m": self.mesh.m,
            "h": op.mesh.h(),
            "symmetry_defect": op.symmetry_defect(),
            "getoor_max_error": err,
            "format": "u64 little-endian m, then m*m f64 little-endian, row-major",
        }))
        .binary("matrix.bin", op.to_bytes())
        .json("matrix.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let op = assemble(order(0.5)?, IntervalMesh::new(32)?);
        let bytes = op.to_bytes();
        Ok(Checks::new("assemble-interval")
            .check("symmetric", op.symmetry_defect() <= 1e-12)
            .check("header carries m", bytes[..8] == 32u64.to_le_bytes())
            .check("positive definite", op.eigenvalues()[0] > 0.0)
            .finish())
    }
}

fn interval_solution_outcome(
    op: &OperatorMatrix,
    sol: &fraclap::halfline::DirichletSolution,
    tol: f64,
) -> Outcome {
    let re: Vec<f64> = sol.u.iter().map(|z| z.re).collect();
    let mut summary = sol.summary();
    summary["m"] = json!(op.m());
    summary["endpoint_exponents"] = json!(endpoint_exponents(op.mesh, &re));
    Outcome::new(summary)
        .csv("u.csv", interval_csv(op.m(), &sol.x, &sol.u))
        .json("solution.json")
        .check("residual", sol.residual, tol)
}

/// Solve r⁺(-Δ)^a u = f on (-1, 1), u = 0 outside.
#[derive(Debug, Clone, Args)]
pub struct SolveInterval {
    #[command(flatten)]
    pub mesh: IntervalArgs,
    #[command(flatten)]
    pub rhs: IntervalRhs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

impl SolveInterval {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let op = self.mesh.operator()?;
        let f = self.rhs.values(&op.mesh.nodes())?;
        let sol = solve_dirichlet_interval(&op, &f)?;
        Ok(interval_solution_outcome(&op, &sol, self.tol))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let op = assemble(order(0.5)?, IntervalMesh::new(64)?);
        let sol = solve_dirichlet_interval(&op, &[0.0; 64])?;
        Ok(Checks::new("solve-interval")
            .check("f = 0 gives u = 0", sol.u.iter().all(|z| z.norm() == 0.0))
            .finish())
    }
}

/// Solve r⁺((-Δ)^a - λ)u = f with γ₀(u/d^{a-1}) = (φ₋, φ₊).
#[derive(Debug, Clone, Args)]
pub struct SolveIntervalNonhom {
    #[command(flatten)]
    pub mesh: IntervalArgs,
    #[command(flatten)]
    pub rhs: IntervalRhs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_minus: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub phi_plus: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda_im: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

impl SolveIntervalNonhom {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let op = self.mesh.operator()?;
        let f: Vec<Complex64> = self
            .rhs
            .values(&op.mesh.nodes())?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        let phi = EndpointData {
            minus: Complex64::new(self.phi_minus, 0.0),
            plus: Complex64::new(self.phi_plus, 0.0),
        };
        let lambda = Complex64::new(self.lambda, self.lambda_im);
        let sol = solve_nonhomogeneous_interval(&op, &f, phi, lambda)?;
        let mut out = interval_solution_outcome(&op, &sol, self.tol);
        out.summary["lambda"] = complex(lambda);
        Ok(out)
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let op = assemble(order(0.5)?, IntervalMesh::new(64)?);
        let f = vec![1.0; 64];
        let fc = vec![Complex64::new(1.0, 0.0); 64];
        let hom = solve_dirichlet_interval(&op, &f)?;
        let non = solve_nonhomogeneous_interval(&op, &fc, EndpointData::zero(), Complex64::new(0.0, 0.0))?;
        let same = hom.u.iter().zip(&non.u).all(|(p, q)| (p - q).norm() < 1e-10);
        Ok(Checks::new("solve-interval-nonhom")
            .check("φ = 0 reduces to the Dirichlet solve", same)
            .finish())
    }
}

/// Lowest eigenvalue on several meshes with Richardson extrapolation.
#[derive(Debug, Clone, Args)]
pub struct Eigen {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Comma-separated mesh sizes (at least three).
    #[arg(long, default_value = "256,512,1024")]
    pub ms: String,
    /// Number of eigenvalues listed for the finest mesh.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    #[command(flatten)]
    pub common: Common,
}

impl Eigen {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let ms: Vec<usize> = parse_list(&self.ms)?;
        let r = eigen_richardson(order(self.a)?, &ms)?;
        let mut summary = serde_json::to_value(&r).expect("serializable");
        if self.count > 0 {
            let finest = *ms.last().expect("at least three meshes");
            let eig = assemble(order(self.a)?, IntervalMesh::new(finest)?).eigenvalues();
            summary["eigenvalues"] = json!(eig.iter().take(self.count).collect::<Vec<_>>());
        }
        Ok(Outcome::new(summary).json("eigen.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let e25 = assemble(order(0.25)?, IntervalMesh::new(32)?).eigenvalues();
        let e75 = assemble(order(0.75)?, IntervalMesh::new(32)?).eigenvalues();
        Ok(Checks::new("eigen")
            .check("spectrum positive", e25[0] > 0.0)
            .check("λ₁ grows with a", e75[0] > e25[0])
            .check("too few meshes rejected", eigen_richardson(order(0.5)?, &[32, 64]).is_err())
            .finish())
    }
}

/// ⟨λ⟩‖(A - λ)⁻¹‖ along the negative real ray and the rays Im λ = ±Re λ.
#[derive(Debug, Clone, Args)]
pub struct ResolventScanCmd {
    #[command(flatten)]
    pub mesh: IntervalArgs,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[command(flatten)]
    pub common: Common,
}

impl ResolventScanCmd {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let op = self.mesh.operator()?;
        let s = resolvent_scan(&op, self.beta, &default_rays())?;
        let mut csv = String::from("re,im,norm,product\n");
        for ((l, n), p) in s.lambda_samples.iter().zip(&s.norms).zip(&s.products) {
            csv.push_str(&format!("{},{},{},{}\n", fmt17(l.re), fmt17(l.im), fmt17(*n), fmt17(*p)));
        }
        Ok(Outcome::new(json!({
            "a": self.mesh.a,
            "m": self.mesh.m,
            "beta": s.beta,
            "c3": s.c3,
            "lambda1": s.lambda1,
            "samples": s.norms.len(),
        }))
        .csv("resolvent.csv", csv)
        .json("resolvent.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let op = assemble(order(0.5)?, IntervalMesh::new(32)?);
        let s = resolvent_scan(&op, 0.5, &[Complex64::new(-1.0, 0.0)])?;
        let expect = 1.0 / (s.lambda1 + 1.0);
        Ok(Checks::new("resolvent-scan")
            .check("‖(A+1)⁻¹‖ = 1/(λ₁+1)", (s.norms[0] - expect).abs() < 1e-12)
            .check("Re λ > -β rejected", resolvent_scan(&op, 0.5, &[Complex64::new(0.0, 1.0)]).is_err())
            .finish())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    BackwardEuler,
    CrankNicolson,
}

/// u' + (-Δ)^a u = f on (-1, 1), u(0) = 0; with φ± the boundary data ramp as φ±·t.
#[derive(Debug, Clone, Args)]
pub struct HeatEvolve {
    #[command(flatten)]
    pub mesh: IntervalArgs,
    #[arg(long, default_value_t = 0.01)]
    pub tau: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "backward-euler")]
    pub scheme: SchemeName,
    /// Polynomial coefficients of the time-independent source f(x).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub f: String,
    /// Write full states every s steps (0: none).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_minus: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_plus: f64,
    #[command(flatten)]
    pub common: Common,
}

impl HeatEvolve {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let op = self.mesh.operator()?;
        let scheme = match self.scheme {
            SchemeName::BackwardEuler => HeatScheme::BackwardEuler,
            SchemeName::CrankNicolson => HeatScheme::CrankNicolson,
        };
        let c: Vec<f64> = parse_list(&self.f)?;
        let f = |x: f64, _t: f64| polynomial(&c, x);
        let traj: HeatTrajectory = if self.phi_minus == 0.0 && self.phi_plus == 0.0 {
            heat_evolve(&op, self.tau, self.steps, scheme, f)?
        } else {
            let (pm, pp) = (self.phi_minus, self.phi_plus);
            heat_evolve_nonhomogeneous(&op, self.tau, self.steps, scheme, f, |t| [pm * t, pp * t])?
        };
        let last = traj.last();
        let h = op.mesh.h();
        let mut out = Outcome::new(json!({
            "a": self.mesh.a,
            "m": self.mesh.m,
            "tau": self.tau,
            "steps": self.steps,
            "scheme": scheme,
            "final_time": traj.times.last(),
            "final_l2": (h * last.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            "final_sup": last.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }))
        .csv("norms.csv", traj.norms_csv(op.mesh))
        .csv("final.csv", real_interval_csv(op.m(), &op.mesh.nodes(), last));
        if self.snapshot_every > 0 {
            out = out.csv("snapshots.csv", traj.snapshots_csv(op.mesh, self.snapshot_every));
        }
        Ok(out.json("heat.json"))
    }

    pub fn self_test(&self) -> Result<Outcome, CliError> {
        let op = assemble(order(0.5)?, IntervalMesh::new(32)?);
        let traj = heat_evolve(&op, 0.1, 5, HeatScheme::BackwardEuler, |_, _| 0.0)?;
        Ok(Checks::new("heat-evolve")
            .check("f = 0, u₀ = 0 stays zero", traj.states.iter().all(|s| s.iter().all(|&v| v == 0.0)))
            .check("τ ≤ 0 rejected", heat_evolve(&op, 0.0, 1, HeatScheme::BackwardEuler, |_, _| 0.0).is_err())
            .finish())
    }
}
