//! Dirichlet realization of `(-Δ)^a` on `Ω = (-1, 1)`.
//!
//! The matrix is the uniform-grid Toeplitz stencil of the singular-integral
//! form (zero exterior extension), plus a diagonal boundary correction that
//! makes the half-line profile `x₊^a` exactly a-harmonic on the grid. Together
//! they resolve the `d^a` boundary layer to second order.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_exponent_samples, weighted_trace_samples, BoundaryPoint, FitWindow, TraceFit};
use crate::grid::fmt17;
use crate::halfline::{ClassTag, DirichletSolution};
use crate::pv::product_weights;
use crate::quad::{gauss_legendre, gauss_power};
use crate::special::{pv_constant, smooth_step};
use crate::symbols::FractionalOrder;

/// Interior nodes `x_i = -1 + (i+1) h`, `h = 2/(m+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalMesh {
    m: usize,
}

impl IntervalMesh {
    pub fn new(m: usize) -> Result<Self> {
        if m < 16 {
            return Err(Error::InvalidParameter(format!("need at least 16 interior nodes, got {m}")));
        }
        if m > STENCIL_CORRECTION * 16 {
            return Err(Error::InvalidParameter(format!("m = {m} exceeds the supported size")));
        }
        Ok(IntervalMesh { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        2.0 / (self.m as f64 + 1.0)
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 1.0) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }

    /// `d(x_i) = 1 - |x_i|`.
    pub fn distance(&self, i: usize) -> f64 {
        (i.min(self.m - 1 - i) as f64 + 1.0) * self.h()
    }

    pub fn refined(&self) -> IntervalMesh {
        IntervalMesh { m: 2 * self.m + 1 }
    }

    /// Trapezoid weights (the endpoints carry zero).
    pub fn weights(&self) -> Vec<f64> {
        vec![self.h(); self.m]
    }
}

const STENCIL_LENGTH: usize = 100_000;
const STENCIL_CORRECTION: usize = 1024;

/// Unit-spacing stencil `t_l` and boundary correction `δ_k` for one order.
#[derive(Debug)]
pub struct Stencil {
    pub a: f64,
    pub t: Vec<f64>,
    /// `δ_k`, `k = 1..=K`, stored at index `k`.
    pub correction: Vec<f64>,
}

impl Stencil {
    fn build(a: f64) -> Stencil {
        let c = pv_constant(1, a);
        let n = STENCIL_LENGTH;
        let w = product_weights(a, 1.0, n);
        let mut t = vec![0.0; n + 1];
        t[0] = 2.0 * w[0] + 2.0 * (n as f64).powf(-2.0 * a) / (2.0 * a);
        t[1] -= w[0];
        for l in 1..=n {
            let l2 = (l * l) as f64;
            t[0] += 2.0 * w[l] / l2;
            t[l] -= w[l] / l2;
        }
        for v in t.iter_mut() {
            *v *= c;
        }

        // δ_k makes Σ_j t_{|k-j|} j^a + δ_k k^a = 0: the profile x₊^a is
        // a-harmonic, far field by the continuum kernel past j = J.
        let big_k = STENCIL_CORRECTION;
        let big_j = n - big_k - 5;
        let s = big_j as f64 + 0.5;
        let pa: Vec<f64> = (0..=big_j).map(|j| (j as f64).powf(a)).collect();
        let tail_rule = gauss_power(24, a - 1.0, 1.0);
        let mut correction = vec![0.0; big_k + 1];
        correction[1..].par_iter_mut().enumerate().for_each(|(i, d)| {
            let k = i + 1;
            let mut r = 0.0;
            for j in 1..=big_j {
                r += t[k.abs_diff(j)] * pa[j];
            }
            let kf = k as f64;
            let tail: f64 = tail_rule
                .nodes
                .iter()
                .zip(&tail_rule.weights)
                .map(|(&u, &wt)| wt * -c * s.powf(-a) * (1.0 - kf * u / s).powf(-1.0 - 2.0 * a))
                .sum();
            *d = -(r + tail) / kf.powf(a);
        });
        t.truncate(2 * big_k * 16 + 2);
        Stencil { a, t, correction }
    }

    /// Cached stencil for order `a`.
    pub fn get(a: f64) -> Arc<Stencil> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Stencil>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(s) = cache.lock().expect("stencil cache").get(&a.to_bits()) {
            return s.clone();
        }
        let s = Arc::new(Stencil::build(a));
        cache.lock().expect("stencil cache").insert(a.to_bits(), s.clone());
        s
    }
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub a: FractionalOrder,
    pub mesh: IntervalMesh,
    pub entries: DMatrix<f64>,
    pub symmetric: bool,
}

/// Symmetry defect above which assembly is considered broken.
pub const SYMMETRY_LIMIT: f64 = 1e-10;

pub fn assemble(a: FractionalOrder, mesh: IntervalMesh) -> OperatorMatrix {
    let st = Stencil::get(a.a());
    let m = mesh.m();
    let scale = mesh.h().powf(-2.0 * a.a());
    let k_max = st.correction.len() - 1;
    let mut entries = DMatrix::from_fn(m, m, |i, j| st.t[i.abs_diff(j)] * scale);
    for i in 0..m {
        for k in [i + 1, m - i] {
            if k <= k_max {
                entries[(i, i)] += st.correction[k] * scale;
            }
        }
    }
    let defect = symmetry_defect(&entries);
    assert!(defect <= SYMMETRY_LIMIT, "assembly lost symmetry: {defect:e}");
    let sym = (&entries + entries.transpose()) * 0.5;
    OperatorMatrix {
        a,
        mesh,
        entries: sym,
        symmetric: true,
    }
}

fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    let norm = a.amax().max(f64::MIN_POSITIVE);
    (a - a.transpose()).amax() / norm
}

impl OperatorMatrix {
    pub fn m(&self) -> usize {
        self.mesh.m()
    }

    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.entries)
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    /// Row-major binary: `m` as little-endian u64, then `m²` little-endian f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.m();
        let mut out = Vec::with_capacity(8 + 8 * m * m);
        out.extend_from_slice(&(m as u64).to_le_bytes());
        for i in 0..m {
            for j in 0..m {
                out.extend_from_slice(&self.entries[(i, j)].to_le_bytes());
            }
        }
        out
    }

    pub fn write_binary<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    /// Reads a matrix written by [`OperatorMatrix::write_binary`]; returns `(m, row-major entries)`.
    pub fn read_binary<P: AsRef<Path>>(path: P) -> Result<(usize, Vec<f64>)> {
        let mut bytes = vec![];
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 8 {
            return Err(Error::Parse("matrix file shorter than its header".into()));
        }
        let m = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
        if bytes.len() != 8 + 8 * m * m {
            return Err(Error::Parse(format!("expected {} bytes for m = {m}, got {}", 8 + 8 * m * m, bytes.len())));
        }
        let vals = bytes[8..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok((m, vals))
    }

    fn cholesky(&self) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        Cholesky::new(self.entries.clone()).ok_or(Error::SingularMatrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn rel_l2(num: &[f64], den: &[f64]) -> f64 {
    let n: f64 = num.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d: f64 = den.iter().map(|v| v * v).sum::<f64>().sqrt();
    if d == 0.0 {
        n
    } else {
        n / d
    }
}

/// Weighted trace `γ₀(u/d^μ)` at an endpoint of the interval.
pub fn interval_trace(mesh: IntervalMesh, u: &[Complex64], mu: f64, point: BoundaryPoint) -> Result<TraceFit> {
    weighted_trace_samples(&mesh.nodes(), u, point, mu, FitWindow::interval(mesh.h()))
}

/// Fitted boundary exponents at `x = -1` and `x = 1`.
pub fn endpoint_exponents(mesh: IntervalMesh, u: &[f64]) -> [f64; 2] {
    let xs = mesh.nodes();
    let w = FitWindow::interval(mesh.h());
    [BoundaryPoint::LEFT, BoundaryPoint::RIGHT].map(|p| {
        fit_exponent_samples(&xs, u, p, w)
            .map(|e| e.exponent)
            .unwrap_or(f64::NAN)
    })
}

fn interval_solution(
    a: f64,
    mesh: IntervalMesh,
    u: Vec<Complex64>,
    residual: f64,
    right_class: ClassTag,
) -> DirichletSolution {
    let re: Vec<f64> = u.iter().map(|z| z.re).collect();
    let scale = re.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let (trace_a, trace_a_minus_1, fitted_exponent) = if scale == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), f64::NAN)
    } else {
        let t1 = interval_trace(mesh, &u, a - 1.0, BoundaryPoint::RIGHT).map(|t| t.limit).unwrap_or(nan);
        let ta = match right_class {
            ClassTag::TransmissionA => interval_trace(mesh, &u, a, BoundaryPoint::RIGHT).map(|t| t.limit).unwrap_or(nan),
            ClassTag::TransmissionAMinus1 => nan,
        };
        (ta, t1, endpoint_exponents(mesh, &re)[1])
    };
    DirichletSolution {
        a,
        x: mesh.nodes(),
        u,
        residual,
        trace_a,
        trace_a_minus_1,
        fitted_exponent,
        class_tag: right_class,
        support_leakage: 0.0,
    }
}

/// `u = A⁻¹ f` at the interior nodes.
pub fn solve_dirichlet_interval(op: &OperatorMatrix, f: &[f64]) -> Result<DirichletSolution> {
    if f.len() != op.m() {
        return Err(Error::InvalidParameter(format!("expected {} samples, got {}", op.m(), f.len())));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("right-hand side is not finite".into()));
    }
    let chol = op.cholesky()?;
    let u = chol.solve(&DVector::from_column_slice(f));
    let r: Vec<f64> = op.apply(u.as_slice()).iter().zip(f).map(|(p, q)| p - q).collect();
    let residual = rel_l2(&r, f);
    let u: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(interval_solution(op.a.a(), op.mesh, u, residual, ClassTag::TransmissionA))
}

/// Smallest eigenpair by inverse iteration on the Cholesky factor.
pub fn lowest_eigenpair(op: &OperatorMatrix) -> Result<(f64, Vec<f64>)> {
    let chol = op.cholesky()?;
    let m = op.m();
    let mut v = DVector::from_fn(m, |i, _| {
        let x = op.mesh.x(i);
        (1.0 - x * x).max(0.0)
    });
    v /= v.norm();
    let mut prev = 0.0;
    for _ in 0..500 {
        let w = chol.solve(&v);
        let next = 1.0 / v.dot(&w);
        v = &w / w.norm();
        if (next - prev).abs() <= 1e-15 * next {
            break;
        }
        prev = next;
    }
    let lambda = v.dot(&(&op.entries * &v));
    Ok((lambda, v.as_slice().to_vec()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenReport {
    pub a: f64,
    pub m: Vec<usize>,
    pub h: Vec<f64>,
    pub lambda1: Vec<f64>,
    /// Observed convergence order `p` in `λ(h) = λ∞ + C h^p`.
    pub order: f64,
    pub extrapolated: f64,
}

/// `λ₁` on several meshes and its Richardson limit with the order fitted
/// from the last three meshes.
pub fn eigen_richardson(a: FractionalOrder, ms: &[usize]) -> Result<EigenReport> {
    if ms.len() < 3 {
        return Err(Error::InvalidParameter("Richardson extrapolation needs three meshes".into()));
    }
    let mut h = vec![];
    let mut lam = vec![];
    for &m in ms {
        let mesh = IntervalMesh::new(m)?;
        h.push(mesh.h());
        lam.push(lowest_eigenpair(&assemble(a, mesh))?.0);
    }
    let k = lam.len();
    let (h1, h2, h3) = (h[k - 3], h[k - 2], h[k - 1]);
    let (l1, l2, l3) = (lam[k - 3], lam[k - 2], lam[k - 1]);
    // (l1 - l2)/(l2 - l3) = (h1^p - h2^p)/(h2^p - h3^p), solved for p by bisection
    let target = (l1 - l2) / (l2 - l3);
    let ratio = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p));
    let (mut lo, mut hi) = (0.05, 8.0);
    let order = if target.is_finite() && target > ratio(lo) && target < ratio(hi) {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    } else {
        log::warn!("eigenvalue sequence not in the asymptotic range; assuming order 2");
        2.0
    };
    let cst = (l2 - l3) / (h2.powf(order) - h3.powf(order));
    Ok(EigenReport {
        a: a.a(),
        m: ms.to_vec(),
        h,
        lambda1: lam.clone(),
        order,
        extrapolated: l3 - cst * h3.powf(order),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventScan {
    pub beta: f64,
    pub lambda_samples: Vec<Complex64>,
    pub norms: Vec<f64>,
    pub products: Vec<f64>,
    /// `max ⟨λ⟩ ‖(A-λ)⁻¹‖`.
    pub c3: f64,
    pub lambda1: f64,
}

/// Negative real ray and the rays `Im λ = ±Re λ`, `|λ| ∈ [1, 10⁴]`, 40 log-spaced samples each.
pub fn default_rays() -> Vec<Complex64> {
    let dirs = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(-1.0, 1.0) / 2f64.sqrt(),
        Complex64::new(-1.0, -1.0) / 2f64.sqrt(),
    ];
    let mut out = vec![];
    for d in dirs {
        for k in 0..40 {
            let r = 10f64.powf(4.0 * k as f64 / 39.0);
            out.push(d * r);
        }
    }
    out
}

/// `‖(A-λ)⁻¹‖ = 1/dist(λ, σ(A))` for the symmetric matrix `A`.
pub fn resolvent_scan(op: &OperatorMatrix, beta: f64, samples: &[Complex64]) -> Result<ResolventScan> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if let Some(l) = samples.iter().find(|l| l.re > -beta) {
        return Err(Error::InvalidParameter(format!("sample {l} has Re λ > -β")));
    }
    let eig = op.eigenvalues();
    let mut norms = vec![];
    let mut products = vec![];
    for &l in samples {
        let (dist, ev) = eig
            .iter()
            .map(|&e| ((Complex64::new(e, 0.0) - l).norm(), e))
            .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc });
        if dist <= 1e-10 {
            return Err(Error::SpectrumIntersection {
                lambda: l,
                eigenvalue: ev,
                distance: dist,
            });
        }
        let norm = 1.0 / dist;
        norms.push(norm);
        products.push((1.0 + l.norm_sqr()).sqrt() * norm);
    }
    let c3 = products.iter().fold(0.0f64, |m, &p| m.max(p));
    Ok(ResolventScan {
        beta,
        lambda_samples: samples.to_vec(),
        norms,
        products,
        c3,
        lambda1: eig[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatScheme {
    BackwardEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatTrajectory {
    pub tau: f64,
    pub scheme: HeatScheme,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Boundary data `(φ(-1), φ(1))` at each time, for the nonhomogeneous variant.
    pub boundary: Option<Vec<[f64; 2]>>,
}

impl HeatTrajectory {
    /// Zero initial state.
    pub fn new(mesh: IntervalMesh, tau: f64, scheme: HeatScheme) -> Result<Self> {
        Self::with_initial(vec![0.0; mesh.m()], tau, scheme)
    }

    pub fn with_initial(u0: Vec<f64>, tau: f64, scheme: HeatScheme) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {tau}")));
        }
        Ok(HeatTrajectory {
            tau,
            scheme,
            times: vec![0.0],
            states: vec![u0],
            boundary: None,
        })
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has a state")
    }

    /// CSV `t,l2,sup`; the l2 norm uses the mesh weights.
    pub fn norms_csv(&self, mesh: IntervalMesh) -> String {
        let h = mesh.h();
        let mut out = String::from("t,l2,sup\n");
        for (t, u) in self.times.iter().zip(&self.states) {
            let l2 = (h * u.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            out.push_str(&format!("{},{},{}\n", fmt17(*t), fmt17(l2), fmt17(sup)));
        }
        out
    }

    /// Full states every `every` steps: `t,x,u` long format.
    pub fn snapshots_csv(&self, mesh: IntervalMesh, every: usize) -> String {
        let xs = mesh.nodes();
        let mut out = String::from("t,x,u\n");
        for (k, (t, u)) in self.times.iter().zip(&self.states).enumerate() {
            if every == 0 || k % every != 0 {
                continue;
            }
            for (x, v) in xs.iter().zip(u) {
                out.push_str(&format!("{},{},{}\n", fmt17(*t), fmt17(*x), fmt17(*v)));
            }
        }
        out
    }
}

/// Pre-factored time stepper for `u' + Au = f`.
pub struct HeatStepper {
    tau: f64,
    scheme: HeatScheme,
    lhs: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    a: DMatrix<f64>,
}

impl HeatStepper {
    pub fn new(op: &OperatorMatrix, tau: f64, scheme: HeatScheme) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {tau}")));
        }
        let m = op.m();
        let theta = match scheme {
            HeatScheme::BackwardEuler => 1.0,
            HeatScheme::CrankNicolson => 0.5,
        };
        let lhs = DMatrix::identity(m, m) + &op.entries * (theta * tau);
        Ok(HeatStepper {
            tau,
            scheme,
            lhs: lhs.lu(),
            a: op.entries.clone(),
        })
    }

    /// One step from `u` with source samples at the old and new time.
    pub fn step(&self, u: &[f64], f_old: &[f64], f_new: &[f64]) -> Result<Vec<f64>> {
        let u = DVector::from_column_slice(u);
        let rhs = match self.scheme {
            HeatScheme::BackwardEuler => &u + DVector::from_column_slice(f_new) * self.tau,
            HeatScheme::CrankNicolson => {
                &u - (&self.a * &u) * (0.5 * self.tau)
                    + (DVector::from_column_slice(f_old) + DVector::from_column_slice(f_new)) * (0.5 * self.tau)
            }
        };
        Ok(self.lhs.solve(&rhs).ok_or(Error::SingularMatrix)?.as_slice().to_vec())
    }
}

/// Advance `traj` by one step with source `f(x, t)`.
pub fn heat_step<F: Fn(f64, f64) -> f64>(
    op: &OperatorMatrix,
    traj: &mut HeatTrajectory,
    stepper: &HeatStepper,
    f: F,
) -> Result<()> {
    let t0 = *traj.times.last().expect("time");
    let t1 = t0 + traj.tau;
    let xs = op.mesh.nodes();
    let f_old: Vec<f64> = xs.iter().map(|&x| f(x, t0)).collect();
    let f_new: Vec<f64> = xs.iter().map(|&x| f(x, t1)).collect();
    let next = stepper.step(traj.last(), &f_old, &f_new)?;
    traj.times.push(t1);
    traj.states.push(next);
    Ok(())
}

/// `steps` steps of `u' + Au = f`, `u(0) = 0`.
pub fn heat_evolve<F: Fn(f64, f64) -> f64>(
    op: &OperatorMatrix,
    tau: f64,
    steps: usize,
    scheme: HeatScheme,
    f: F,
) -> Result<HeatTrajectory> {
    let mut traj = HeatTrajectory::new(op.mesh, tau, scheme)?;
    let stepper = HeatStepper::new(op, tau, scheme)?;
    for _ in 0..steps {
        heat_step(op, &mut traj, &stepper, &f)?;
    }
    Ok(traj)
}

/// Nonhomogeneous heat problem: `γ₀(u/d^{a-1}) = (φ(t, -1), φ(t, 1))` with
/// `φ(0) = 0`. The lifting `w(t) = φ₋(t) W₋ + φ₊(t) W₊` is subtracted and the
/// remainder evolves with source `f - r⁺Pw - w'`.
pub fn heat_evolve_nonhomogeneous<F, B>(
    op: &OperatorMatrix,
    tau: f64,
    steps: usize,
    scheme: HeatScheme,
    f: F,
    phi: B,
) -> Result<HeatTrajectory>
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> [f64; 2],
{
    let p0 = phi(0.0);
    if p0 != [0.0, 0.0] {
        return Err(Error::InvalidParameter("boundary data must vanish at t = 0 (zero initial state)".into()));
    }
    let lift = Lifting::new(op.a, op.mesh);
    let stepper = HeatStepper::new(op, tau, scheme)?;
    let xs = op.mesh.nodes();
    let m = op.m();
    let source = |t: f64| -> Vec<f64> {
        let [pm, pp] = phi(t);
        (0..m).map(|i| f(xs[i], t) - pm * lift.p_minus[i] - pp * lift.p_plus[i]).collect()
    };
    let mut v = vec![0.0; m];
    let mut traj = HeatTrajectory::new(op.mesh, tau, scheme)?;
    let mut bnd = vec![[0.0, 0.0]];
    for k in 0..steps {
        let t0 = k as f64 * tau;
        let t1 = t0 + tau;
        let [dm, dp] = {
            let (a1, b1) = (phi(t1), phi(t0));
            [(a1[0] - b1[0]) / tau, (a1[1] - b1[1]) / tau]
        };
        let mut f_old = source(t0);
        let mut f_new = source(t1);
        for i in 0..m {
            let dw = dm * lift.w_minus[i] + dp * lift.w_plus[i];
            f_old[i] -= dw;
            f_new[i] -= dw;
        }
        v = stepper.step(&v, &f_old, &f_new)?;
        let [pm, pp] = phi(t1);
        traj.times.push(t1);
        traj.states.push((0..m).map(|i| v[i] + pm * lift.w_minus[i] + pp * lift.w_plus[i]).collect());
        bnd.push([pm, pp]);
    }
    traj.boundary = Some(bnd);
    Ok(traj)
}

/// Blow-up liftings `W₊ = (1-x)^{a-1} χ₊`, `W₋(x) = W₊(-x)` at the nodes,
/// with `r⁺PW±` computed by quadrature.
///
/// `(1-x)₊^{a-1}` is a-harmonic on `x < 1`, so `r⁺PW₊ = -r⁺P q` with the
/// smooth remainder `q = (1-x)₊^{a-1}(1-χ₊)`.
#[derive(Debug, Clone)]
pub struct Lifting {
    pub w_plus: Vec<f64>,
    pub w_minus: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
}

/// `χ₊`: 0 for `x ≤ -1/2`, 1 for `x ≥ 1/2`.
pub fn cutoff_plus(x: f64) -> f64 {
    smooth_step(x + 0.5)
}

fn remainder(a: f64, y: f64) -> f64 {
    if y >= 0.5 {
        0.0
    } else {
        (1.0 - y).powf(a - 1.0) * (1.0 - cutoff_plus(y))
    }
}

/// `(-Δ)^a q` at `x` for the smooth remainder `q`.
fn remainder_image(a: f64, x: f64) -> f64 {
    let q = |y: f64| remainder(a, y);
    let qx = q(x);
    let second = |s: f64| (2.0 * qx - q(x + s) - q(x - s)) / (s * s);
    let s0 = 0.02;
    let head = gauss_power(24, 1.0 - 2.0 * a, s0).integrate(second);
    let big_s = 3.0;
    // s = s0 e^v on [s0, S], composite Gauss–Legendre in v
    let span = (big_s / s0).ln();
    let panels = 48;
    let rule = gauss_legendre(16);
    let mut mid = 0.0;
    for p in 0..panels {
        let v0 = span * p as f64 / panels as f64;
        let v1 = span * (p + 1) as f64 / panels as f64;
        mid += rule.mapped(v0, v1).integrate(|v| {
            let s = s0 * v.exp();
            (2.0 * qx - q(x + s) - q(x - s)) * s.powf(-2.0 * a)
        });
    }
    let gl = gauss_legendre(24).mapped(0.0, 1.0);
    let far = 2.0 * qx * big_s.powf(-2.0 * a) / (2.0 * a)
        - big_s.powf(-a - 1.0)
            * gl.integrate(|u| u.powf(a) * (1.0 + (1.0 - x) * u / big_s).powf(a - 1.0));
    pv_constant(1, a) * (head + mid + far)
}

impl Lifting {
    pub fn new(a: FractionalOrder, mesh: IntervalMesh) -> Lifting {
        let av = a.a();
        let xs = mesh.nodes();
        let w_plus: Vec<f64> = xs.iter().map(|&x| (1.0 - x).powf(av - 1.0) * cutoff_plus(x)).collect();
        let p_plus: Vec<f64> = xs.par_iter().map(|&x| -remainder_image(av, x)).collect();
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<f64>>();
        Lifting {
            w_minus: rev(&w_plus),
            p_minus: rev(&p_plus),
            w_plus,
            p_plus,
        }
    }
}

/// `γ₀(u/d^{a-1})` data at the two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointData {
    /// At `x = -1`.
    pub minus: Complex64,
    /// At `x = 1`.
    pub plus: Complex64,
}

impl EndpointData {
    pub fn zero() -> Self {
        EndpointData {
            minus: Complex64::new(0.0, 0.0),
            plus: Complex64::new(0.0, 0.0),
        }
    }
}

/// Kernel-dimension threshold relative to `‖A‖`.
pub const KERNEL_TOL: f64 = 1e-8;

/// `r⁺(P - λ)u = f`, `γ₀(u/d^{a-1}) = φ` at `±1`, `supp u ⊂ [-1, 1]`.
pub fn solve_nonhomogeneous_interval(
    op: &OperatorMatrix,
    f: &[Complex64],
    phi: EndpointData,
    lambda: Complex64,
) -> Result<DirichletSolution> {
    let m = op.m();
    if f.len() != m {
        return Err(Error::InvalidParameter(format!("expected {m} samples, got {}", f.len())));
    }
    if !(phi.minus.norm().is_finite() && phi.plus.norm().is_finite() && lambda.norm().is_finite()) {
        return Err(Error::InvalidParameter("data must be finite".into()));
    }
    if lambda.im == 0.0 && lambda.re > 0.0 {
        let eig = op.eigenvalues();
        let tol = KERNEL_TOL * eig.last().copied().unwrap_or(1.0);
        let kernel_dim = eig.iter().filter(|&&e| (e - lambda.re).abs() < tol).count();
        if kernel_dim > 0 {
            return Err(Error::EigenvalueCollision { lambda, kernel_dim });
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let lift = if phi.minus != zero || phi.plus != zero {
        Some(Lifting::new(op.a, op.mesh))
    } else {
        None
    };
    let w: Vec<Complex64> = (0..m)
        .map(|i| match &lift {
            Some(l) => phi.minus * l.w_minus[i] + phi.plus * l.w_plus[i],
            None => zero,
        })
        .collect();
    let rhs: Vec<Complex64> = (0..m)
        .map(|i| {
            let pw = match &lift {
                Some(l) => phi.minus * l.p_minus[i] + phi.plus * l.p_plus[i],
                None => zero,
            };
            f[i] - (pw - lambda * w[i])
        })
        .collect();
    let shifted = DMatrix::from_fn(m, m, |i, j| {
        let d = if i == j { lambda } else { zero };
        Complex64::new(op.entries[(i, j)], 0.0) - d
    });
    let b = DVector::from_column_slice(&rhs);
    let v = shifted.clone().lu().solve(&b).ok_or(Error::SingularMatrix)?;
    let r = &shifted * &v - &b;
    let bn = b.norm();
    let residual = if bn == 0.0 { r.norm() } else { r.norm() / bn };
    let u: Vec<Complex64> = (0..m).map(|i| v[i] + w[i]).collect();
    let class = if phi.plus != zero || phi.minus != zero {
        ClassTag::TransmissionAMinus1
    } else {
        ClassTag::TransmissionA
    };
    let right = if phi.plus != zero { ClassTag::TransmissionAMinus1 } else { ClassTag::TransmissionA };
    let mut sol = interval_solution(op.a.a(), op.mesh, u, residual, right);
    sol.class_tag = class;
    Ok(sol)
}

/// Discrete `L_q` norm `(h Σ |u_i|^q)^{1/q}`.
pub fn discrete_lq(mesh: IntervalMesh, u: &[Complex64], q: f64) -> f64 {
    (mesh.h() * u.iter().map(|z| z.norm().powf(q)).sum::<f64>()).powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_validation() {
        assert!(IntervalMesh::new(15).is_err());
        let m = IntervalMesh::new(31).unwrap();
        assert!((m.h() - 1.0 / 16.0).abs() < 1e-15);
        assert!((m.x(0) + 1.0 - m.h()).abs() < 1e-15);
        assert!((m.distance(30) - m.h()).abs() < 1e-15);
        assert_eq!(m.refined().m(), 63);
    }

    #[test]
    fn binary_round_trip() {
        let op = assemble(FractionalOrder::new(0.5).unwrap(), IntervalMesh::new(16).unwrap());
        let dir = std::env::temp_dir().join(format!("fraclap-matrix-{}.bin", std::process::id()));
        op.write_binary(&dir).unwrap();
        let (m, vals) = OperatorMatrix::read_binary(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(m, 16);
        assert_eq!(vals[17], op.entries[(1, 1)]);
        assert_eq!(vals[1], op.entries[(0, 1)]);
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff_plus(-0.6), 0.0);
        assert_eq!(cutoff_plus(0.6), 1.0);
        assert_eq!(remainder(0.5, 0.7), 0.0);
    }
}
