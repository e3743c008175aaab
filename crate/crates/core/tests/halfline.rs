use fraclap::fit::{fit_exponent, weighted_trace, BoundaryPoint};
use fraclap::halfline::*;
use fraclap::special::gamma;
use fraclap::symbols::apply_multiplier_unchecked;
use fraclap::{Complex64, FractionalOrder, Grid1D, GridFunction, HalfLineMask, Norm, Side, SymbolSpec};

fn grid() -> Grid1D {
    Grid1D::new(4096, 32.0).unwrap()
}

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn plus(g: Grid1D, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_fn(g, |x| if x >= 0.0 { f(x) } else { 0.0 })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn round_trip_through_transmission_samples() {
    let g = grid();
    for a in [0.25, 0.5, 0.75] {
        for profile in [
            plus(g, |x| (-x).exp()),
            plus(g, |x| (1.0 - x + 0.3 * x * x) * (-x).exp()),
            plus(g, |x| (-x - 0.5 * x * x).exp()),
        ] {
            let s = make_transmission_sample(order(a), &profile).unwrap();
            let p = ModelProblem::homogeneous(order(a), s.model_rhs());
            let sol = solve_homogeneous(&p).unwrap();
            let u = GridFunction::new(g, sol.u.clone(), true).unwrap();
            let err = u.rel_diff(&s.u, Norm::L2);
            assert!(err < 1e-6, "a={a}: {err:e}");
            assert!(sol.residual <= 1e-6);
            assert!(sol.support_leakage <= 1e-6);
        }
    }
}

#[test]
fn multiplier_data_round_trip() {
    // f from the grid multiplier, away from the jump at the origin
    let g = Grid1D::new(16384, 32.0).unwrap();
    let a = order(0.5);
    let u0 = plus(g, |x| x.sqrt() * (-x).exp());
    let pu = apply_multiplier_unchecked(&SymbolSpec::bessel(0.5), &u0);
    let exact = 2f64.sqrt() * gamma(1.5);
    let mask = HalfLineMask::new(Side::Plus, g);
    let worst = mask
        .indices()
        .filter(|&k| g.x(k) > 0.5 && g.x(k) < 8.0)
        .map(|k| (pu.values[k].re - exact * (-g.x(k)).exp()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst:e}");
    let f = plus(g, |x| exact * (-x).exp());
    let sol = solve_homogeneous(&ModelProblem::homogeneous(a, f)).unwrap();
    let u = GridFunction::new(g, sol.u, true).unwrap();
    assert!(u.rel_diff(&u0, Norm::L2) < 1e-6);
}

#[test]
fn zero_data_gives_zero() {
    let g = grid();
    let sol = solve_homogeneous(&ModelProblem::homogeneous(order(0.3), GridFunction::zeros(g))).unwrap();
    assert!(sol.u.iter().all(|z| z.norm() == 0.0));
    let s = make_transmission_sample(order(0.3), &GridFunction::zeros(g)).unwrap();
    assert_eq!(s.u.max_abs(), 0.0);
}

#[test]
fn small_order_boundary_exponent() {
    let g = grid();
    let sol = solve_homogeneous(&ModelProblem::homogeneous(order(0.25), plus(g, |x| (-x).exp()))).unwrap();
    assert!((sol.fitted_exponent - 0.25).abs() < 0.02, "{}", sol.fitted_exponent);
}

#[test]
fn homogeneous_traces() {
    let g = grid();
    for a in [0.3, 0.5, 0.7] {
        let f = plus(g, |x| (1.0 + x) * (-x).exp());
        let sol = solve_homogeneous(&ModelProblem::homogeneous(order(a), f)).unwrap();
        let scale = sol.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(sol.trace_a_minus_1.norm() <= 1e-4 * scale, "a={a}");
        assert!((sol.fitted_exponent - a).abs() < 0.03);
        assert_eq!(sol.class_tag, ClassTag::TransmissionA);
    }
}

#[test]
fn transmission_trace_matches_gamma_factor() {
    let g = grid();
    let s = make_transmission_sample(order(0.5), &plus(g, |x| (-x).exp())).unwrap();
    let t = weighted_trace(&s.u, 0.5, BoundaryPoint::HALFLINE).unwrap();
    assert!((t.limit.re - 1.0 / gamma(1.5)).abs() < 1e-4);
    assert!((t.limit.re - 1.128379).abs() < 1e-4);
    for a in [0.2, 0.6, 0.9] {
        let s = make_transmission_sample(order(a), &plus(g, |x| (1.0 + 2.0 * x) * (-x).exp())).unwrap();
        let e = fit_exponent(&s.u, BoundaryPoint::HALFLINE).unwrap();
        assert!((e.exponent - a).abs() < 0.02);
        let t = weighted_trace(&s.u, a - 1.0, BoundaryPoint::HALFLINE).unwrap();
        assert!(t.limit.norm() < 1e-4);
    }
}

#[test]
fn poisson_operator_one_dimension() {
    let g = grid();
    let u = poisson_k0(c(1.0), g);
    let h = g.h();
    for k in g.origin() + 2..g.n() - 2 {
        let v = |j: usize| u.values[j].re;
        let d2 = (-v(k + 2) + 16.0 * v(k + 1) - 30.0 * v(k) + 16.0 * v(k - 1) - v(k - 2)) / (12.0 * h * h);
        assert!((v(k) - d2).abs() < 1e-6);
    }
    assert_eq!(u.values[g.origin()].re, 1.0);
    assert_eq!(poisson_k0(c(0.0), g).max_abs(), 0.0);
}

#[test]
fn poisson_operator_two_dimensions() {
    let g = Grid1D::new(256, 12.0).unwrap();
    let phi = GridFunction::from_fn(g, |x| (-x * x).exp());
    let u = poisson_k0_2d(&phi).unwrap();
    assert!(poisson_residual_2d(&u) <= 5e-3);
    let j0 = g.origin();
    for i in 0..g.n() {
        assert!((u.at(i, j0) - phi.values[i]).norm() < 1e-12);
    }
}

#[test]
fn decomposition_examples() {
    let g = grid();
    let a = order(0.75);
    let s = make_transmission_sample(a, &plus(g, |x| (-x).exp())).unwrap();
    let d = decompose(&s).unwrap();
    assert!((d.psi.re - 1.0).abs() < 1e-8);
    assert!((d.trace_a.re - 1.0 / gamma(1.75)).abs() < 1e-8);
    assert!(d.reconstruction_error <= 1e-5);
    // g = e^{-x} is entirely the boundary part
    assert!(d.v.max_abs() < 1e-10);

    let s = make_transmission_sample(a, &plus(g, |x| x * (-x).exp())).unwrap();
    let d = decompose(&s).unwrap();
    assert!(d.psi.norm() < 1e-8);
    assert!(d.v.rel_diff(&s.u, Norm::L2) < 1e-8);

    let s = make_transmission_sample(a, &plus(g, |x| (1.0 + x * x) * (-x).exp())).unwrap();
    let d = decompose(&s).unwrap();
    assert!(d.v_exponent >= (2.0 * 0.75f64).min(0.75 + 0.4), "{}", d.v_exponent);
    assert!(d.reconstruction_error <= 1e-5);
}

#[test]
fn decomposition_is_linear() {
    let g = grid();
    let a = order(0.6);
    let g1 = plus(g, |x| (-x).exp());
    let g2 = plus(g, |x| (2.0 - x) * (-x).exp());
    let d1 = decompose(&make_transmission_sample(a, &g1).unwrap()).unwrap();
    let d2 = decompose(&make_transmission_sample(a, &g2).unwrap()).unwrap();
    let d12 = decompose(&make_transmission_sample(a, &g1.add(&g2)).unwrap()).unwrap();
    assert!((d12.psi - d1.psi - d2.psi).norm() < 1e-8);
    assert!(d12.v.sub(&d1.v.add(&d2.v)).max_abs() < 1e-8);
}

#[test]
fn decomposition_needs_large_order() {
    let g = grid();
    let s = make_transmission_sample(order(0.5), &plus(g, |x| (-x).exp())).unwrap();
    assert!(matches!(decompose(&s), Err(fraclap::Error::Order { .. })));
}

#[test]
fn nonhomogeneous_reduces_to_homogeneous() {
    let g = grid();
    let f = plus(g, |x| (-x).exp());
    let a = order(0.4);
    let hom = solve_homogeneous(&ModelProblem::homogeneous(a, f.clone())).unwrap();
    let non = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(a, f, c(0.0))).unwrap();
    assert_eq!(hom.u, non.u);
}

#[test]
fn blow_up_solution() {
    let g = grid();
    let sol = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(order(0.5), GridFunction::zeros(g), c(1.0))).unwrap();
    assert!((sol.fitted_exponent + 0.5).abs() < 0.03, "{}", sol.fitted_exponent);
    assert!((sol.trace_a_minus_1.re - 1.0).abs() < 1e-3);
    assert_eq!(sol.class_tag, ClassTag::TransmissionAMinus1);
}

#[test]
fn nonhomogeneous_traces_and_linearity() {
    let g = grid();
    let a = order(0.7);
    let f = plus(g, |x| (1.0 + x) * (-x).exp());
    let phi = c(-0.8);
    let sol = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(a, f.clone(), phi)).unwrap();
    assert!((sol.trace_a_minus_1 - phi).norm() < 1e-3 * phi.norm());
    assert!(sol.residual <= 1e-5);
    let s1 = solve_homogeneous(&ModelProblem::homogeneous(a, f)).unwrap();
    let s2 = solve_nonhomogeneous(&ModelProblem::nonhomogeneous(a, GridFunction::zeros(g), phi)).unwrap();
    for ((u, u1), u2) in sol.u.iter().zip(&s1.u).zip(&s2.u) {
        assert!((u - u1 - u2).norm() < 1e-8);
    }
}

#[test]
fn sidecar_has_expected_keys() {
    let g = grid();
    let sol = solve_homogeneous(&ModelProblem::homogeneous(order(0.5), plus(g, |x| (-x).exp()))).unwrap();
    let js = sol.summary();
    for key in ["a", "residual", "trace_a", "trace_a_minus_1", "fitted_exponent"] {
        assert!(js.get(key).is_some(), "{key}");
    }
}
