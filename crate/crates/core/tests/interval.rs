use fraclap::fit::BoundaryPoint;
use fraclap::interval::*;
use fraclap::pv::{apply_pv_integral_with, Continuation, PvKernelSpec};
use fraclap::{Complex64, Error, FractionalOrder, Grid1D, GridFunction};

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn op(a: f64, m: usize) -> OperatorMatrix {
    assemble(order(a), IntervalMesh::new(m).unwrap())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn l2(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn mesh_validation() {
    assert!(IntervalMesh::new(15).is_err());
    let mesh = IntervalMesh::new(16).unwrap();
    assert!((mesh.h() - 2.0 / 17.0).abs() < 1e-15);
    assert!(mesh.nodes().iter().all(|x| x.abs() < 1.0));
}

#[test]
fn getoor_profile() {
    let a = op(0.5, 512);
    let mesh = a.mesh;
    let u: Vec<f64> = mesh.nodes().iter().map(|x| (1.0 - x * x).sqrt()).collect();
    let au = a.apply(&u);
    let worst = au.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-2, "{worst:e}");

    let sol = solve_dirichlet_interval(&a, &vec![1.0; 512]).unwrap();
    let peak = sol.u.iter().map(|z| z.re).fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-2, "{peak}");
    assert!((sol.trace_a.re - 2f64.sqrt()).abs() < 2e-2, "{}", sol.trace_a);
}

#[test]
fn symmetric_positive_and_monotone_in_order() {
    let mut prev: Option<Vec<f64>> = None;
    for a in [0.25, 0.5, 0.75] {
        let m = op(a, 128);
        assert!(m.symmetry_defect() <= 1e-12);
        let eig = m.eigenvalues();
        assert!(eig[0] > 0.0);
        if let Some(p) = prev {
            for k in 0..10 {
                assert!(eig[k] > p[k], "a={a} k={k}");
            }
        }
        prev = Some(eig);
    }
}

#[test]
fn first_eigenvalue_extrapolation() {
    let r = eigen_richardson(order(0.5), &[256, 512, 1024]).unwrap();
    assert!((r.extrapolated - 1.158).abs() < 1e-2, "{}", r.extrapolated);
    assert!(r.order > 0.0);
    assert!(eigen_richardson(order(0.5), &[64, 128]).is_err());
}

#[test]
fn zero_data_gives_zero() {
    let sol = solve_dirichlet_interval(&op(0.3, 64), &[0.0; 64]).unwrap();
    assert!(sol.u.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn boundary_exponent_law() {
    for a in [0.25, 0.5, 0.75] {
        let m = op(a, 512);
        let sol = solve_dirichlet_interval(&m, &vec![1.0; 512]).unwrap();
        let re: Vec<f64> = sol.u.iter().map(|z| z.re).collect();
        for e in endpoint_exponents(m.mesh, &re) {
            assert!((e - a).abs() < 0.03, "a={a}: {e}");
        }
        let phi = EndpointData { minus: c(0.5), plus: c(1.0) };
        let sol = solve_nonhomogeneous_interval(&m, &vec![c(0.0); 512], phi, c(0.0)).unwrap();
        let re: Vec<f64> = sol.u.iter().map(|z| z.re).collect();
        for e in endpoint_exponents(m.mesh, &re) {
            assert!((e - (a - 1.0)).abs() < 0.05, "a={a}: {e}");
        }
    }
}

#[test]
fn resolvent_estimates() {
    let m = op(0.5, 512);
    let s = resolvent_scan(&m, 1.0, &[c(-1.0)]).unwrap();
    assert!((s.norms[0] - 0.4634).abs() < 5e-3, "{}", s.norms[0]);

    let rays = default_rays();
    let beta = 0.5;
    let s = resolvent_scan(&m, beta, &rays).unwrap();
    assert_eq!(s.norms.len(), 120);
    let bound = 1f64.max((1.0 + beta * beta).sqrt() / s.lambda1) * 1.01;
    for (l, p) in rays.iter().zip(&s.products).take(40) {
        assert!(*p <= bound, "{l}: {p}");
    }
    assert!(s.c3 >= s.products[0]);
    assert!((s.products[39] - 1.0).abs() < 2e-2);

    assert!(resolvent_scan(&m, 1.0, &[c(0.5)]).is_err());
    assert!(resolvent_scan(&m, 0.0, &[c(-1.0)]).is_err());
}

#[test]
fn heat_eigenmode_decay() {
    let m = op(0.5, 128);
    let (lambda1, v) = lowest_eigenpair(&m).unwrap();
    let tau = 0.05;
    let stepper = HeatStepper::new(&m, tau, HeatScheme::BackwardEuler).unwrap();
    let zero = vec![0.0; 128];
    let mut u = v.clone();
    for _ in 0..5 {
        let next = stepper.step(&u, &zero, &zero).unwrap();
        let ratio = l2(&next) / l2(&u);
        assert!((ratio - 1.0 / (1.0 + tau * lambda1)).abs() < 1e-10);
        u = next;
    }
    let traj = heat_evolve(&m, tau, 4, HeatScheme::BackwardEuler, |_, _| 0.0).unwrap();
    assert!(traj.states.iter().all(|s| s.iter().all(|&v| v == 0.0)));
}

#[test]
fn heat_stationary_limit_and_stability() {
    let a = 0.5;
    let m = op(a, 128);
    let tau = 0.1;
    let traj = heat_evolve(&m, tau, 60, HeatScheme::BackwardEuler, |_, _| 1.0).unwrap();
    let stat: Vec<f64> = solve_dirichlet_interval(&m, &[1.0; 128]).unwrap().u.iter().map(|z| z.re).collect();
    let lambda1 = m.eigenvalues()[0];
    let f_norm = l2(&[1.0; 128]);
    for (k, s) in traj.states.iter().enumerate() {
        let gap: Vec<f64> = s.iter().zip(&stat).map(|(u, v)| u - v).collect();
        assert!(l2(&gap) <= (1.0 + tau * lambda1).powi(-(k as i32)) * l2(&stat) * (1.0 + 1e-12));
        if k > 0 {
            assert!(l2(s) <= l2(&traj.states[k - 1]) + tau * f_norm + 1e-12);
        }
    }
    for e in endpoint_exponents(m.mesh, traj.last()) {
        assert!((e - a).abs() < 0.03, "{e}");
    }
    let csv = traj.norms_csv(m.mesh);
    assert!(csv.starts_with("t,l2,sup\n"));
    assert_eq!(csv.lines().count(), 62);
}

#[test]
fn heat_duhamel_consistency() {
    let m = op(0.5, 128);
    let end = |tau: f64| {
        let steps = (0.5 / tau).round() as usize;
        heat_evolve(&m, tau, steps, HeatScheme::BackwardEuler, |x, t| (1.0 + x) * (2.0 * t).cos())
            .unwrap()
            .last()
            .to_vec()
    };
    let (u1, u2, u3) = (end(0.05), end(0.025), end(0.0125));
    let d = |p: &[f64], q: &[f64]| l2(&p.iter().zip(q).map(|(a, b)| a - b).collect::<Vec<_>>());
    let ratio = d(&u1, &u2) / d(&u2, &u3);
    assert!((1.7..=2.3).contains(&ratio), "{ratio}");
}

#[test]
fn crank_nicolson_is_second_order() {
    let m = op(0.5, 64);
    let end = |tau: f64| {
        let steps = (0.5 / tau).round() as usize;
        heat_evolve(&m, tau, steps, HeatScheme::CrankNicolson, |_, t| t).unwrap().last().to_vec()
    };
    let (u1, u2, u3) = (end(0.05), end(0.025), end(0.0125));
    let d = |p: &[f64], q: &[f64]| l2(&p.iter().zip(q).map(|(a, b)| a - b).collect::<Vec<_>>());
    let ratio = d(&u1, &u2) / d(&u2, &u3);
    assert!((3.4..=4.6).contains(&ratio), "{ratio}");
}

#[test]
fn matches_pv_oracle() {
    // m = 511 puts the interval nodes on the PV grid (h = 2/512, L = 4)
    let a = order(0.5);
    let m = assemble(a, IntervalMesh::new(511).unwrap());
    let bump = |x: f64| {
        let t = x / 0.8;
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    };
    let u: Vec<f64> = m.mesh.nodes().iter().map(|&x| bump(x)).collect();
    let au = m.apply(&u);
    let g = Grid1D::new(2048, 4.0).unwrap();
    let gu = GridFunction::from_fn(g, bump);
    let idx: Vec<usize> = (0..511).map(|i| g.origin() + i + 1 - 256).collect();
    let pv = apply_pv_integral_with(&PvKernelSpec::new(a, 1).unwrap(), &gu, &idx, Continuation::Zero).unwrap();
    let scale = au.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let worst = au.iter().zip(&pv).map(|(p, q)| (p - q.re).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-3 * scale, "{:e}", worst / scale);
}

#[test]
fn nonhomogeneous_solves() {
    let a = 0.5;
    let m = op(a, 256);
    let f: Vec<f64> = m.mesh.nodes().iter().map(|x| 1.0 + x).collect();
    let fc: Vec<Complex64> = f.iter().map(|&v| c(v)).collect();
    let hom = solve_dirichlet_interval(&m, &f).unwrap();
    let non = solve_nonhomogeneous_interval(&m, &fc, EndpointData::zero(), c(0.0)).unwrap();
    for (p, q) in hom.u.iter().zip(&non.u) {
        assert!((p - q).norm() < 1e-10);
    }

    let phi = EndpointData { minus: c(0.0), plus: c(1.0) };
    let sol = solve_nonhomogeneous_interval(&m, &fc, phi, c(-1.0)).unwrap();
    assert!(sol.residual <= 1e-4);
    assert!((sol.trace_a_minus_1 - 1.0).norm() < 1e-2);
    let left = interval_trace(m.mesh, &sol.u, a - 1.0, BoundaryPoint::LEFT).unwrap();
    assert!(left.limit.norm() < 1e-2);

    let lambda1 = m.eigenvalues()[0];
    match solve_nonhomogeneous_interval(&m, &fc, phi, c(lambda1)) {
        Err(Error::EigenvalueCollision { kernel_dim, .. }) => assert_eq!(kernel_dim, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn blow_up_norms() {
    let a = 0.5;
    let mut prev: Option<(f64, f64)> = None;
    for m in [128, 257, 515] {
        let o = op(a, m);
        let phi = EndpointData { minus: c(0.0), plus: c(1.0) };
        let sol = solve_nonhomogeneous_interval(&o, &vec![c(0.0); m], phi, c(0.0)).unwrap();
        let n2 = discrete_lq(o.mesh, &sol.u, 2.0);
        let n15 = discrete_lq(o.mesh, &sol.u, 1.5);
        if let Some((p2, p15)) = prev {
            // L2 grows (logarithmically), L1.5 stays bounded
            assert!(n2 > p2);
            assert!(n15 / p15 < n2 / p2);
            assert!(n15 / p15 < 1.05);
        }
        prev = Some((n2, n15));
    }
}

#[test]
fn nonhomogeneous_heat_tracks_boundary_data() {
    let a = 0.5;
    let m = op(a, 256);
    let traj = heat_evolve_nonhomogeneous(&m, 0.05, 10, HeatScheme::BackwardEuler, |_, _| 0.0, |t| [0.0, t]).unwrap();
    let u: Vec<Complex64> = traj.last().iter().map(|&v| c(v)).collect();
    let t = interval_trace(m.mesh, &u, a - 1.0, BoundaryPoint::RIGHT).unwrap();
    assert!((t.limit.re - 0.5).abs() < 1e-2, "{}", t.limit);
    assert!(heat_evolve_nonhomogeneous(&m, 0.05, 1, HeatScheme::BackwardEuler, |_, _| 0.0, |_| [0.0, 1.0]).is_err());
}

#[test]
fn binary_export_round_trip() {
    let m = op(0.4, 32);
    let path = std::env::temp_dir().join(format!("fraclap-matrix-{}.bin", std::process::id()));
    m.write_binary(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 8 + 8 * 32 * 32);
    assert_eq!(u64::from_le_bytes(bytes[..8].try_into().unwrap()), 32);
    let (n, entries) = OperatorMatrix::read_binary(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(n, 32);
    for i in 0..32 {
        for j in 0..32 {
            assert_eq!(entries[i * 32 + j], m.entries[(i, j)]);
        }
    }
}
