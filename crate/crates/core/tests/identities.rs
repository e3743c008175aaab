use fraclap::identities::*;
use fraclap::interval::*;
use fraclap::{Complex64, Error, FractionalOrder, Grid1D, GridFunction};

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Pair {
    u: IdentityInput,
    v: IdentityInput,
    nonhom: IdentityInput,
}

fn pair(a: f64, m: usize) -> Pair {
    let op = assemble(order(a), IntervalMesh::new(m).unwrap());
    let xs = op.mesh.nodes();
    let u = IdentityInput::homogeneous(&op, &vec![1.0; m], "f = 1").unwrap();
    let v = IdentityInput::homogeneous(&op, &xs, "f = x").unwrap();
    let zero = vec![c(0.0); m];
    let phi = EndpointData { minus: c(0.0), plus: c(1.0) };
    let sol = solve_nonhomogeneous_interval(&op, &zero, phi, c(0.0)).unwrap();
    let nonhom = IdentityInput::from_solution(&sol, op.mesh, &zero, c(0.0), "phi+ = 1");
    Pair { u, v, nonhom }
}

#[test]
fn pohozaev_acceptance_pairs() {
    for a in [0.5, 0.75] {
        let p = pair(a, 1024);
        let r = check_pohozaev(&p.u, &p.v, order(a)).unwrap();
        assert!(r.rel_gap <= 1e-2, "a={a}: {r:?}");
        assert!(r.lhs.norm() > 0.1);
        let s = check_pohozaev(&p.u, &p.u, order(a)).unwrap();
        assert!(s.lhs.norm() <= 1e-3 && s.rhs.norm() <= 1e-3);
    }
}

#[test]
fn green_acceptance_pair() {
    let a = order(0.5);
    let p = pair(0.5, 1024);
    let r = check_green(&p.nonhom, &p.u, a).unwrap();
    assert!(r.rel_gap <= 3e-2, "{r:?}");
    assert!(r.rhs.norm() > 0.1);

    let same = check_green(&p.nonhom, &p.nonhom, a).unwrap();
    assert!(same.lhs.norm() <= 1e-12 && same.rhs.norm() <= 1e-12);
    let hom = check_green(&p.u, &p.v, a).unwrap();
    assert!(hom.lhs.norm() <= 1e-3 && hom.rhs.norm() <= 1e-3);
}

#[test]
fn green_antisymmetry_and_bilinearity() {
    let a = order(0.75);
    let p = pair(0.75, 256);
    let uv = check_green(&p.nonhom, &p.v, a).unwrap();
    let vu = check_green(&p.v, &p.nonhom, a).unwrap();
    assert!((uv.lhs + vu.lhs.conj()).norm() <= 1e-10);

    let alpha = Complex64::new(2.0, -1.0);
    let beta = Complex64::new(-0.5, 3.0);
    let scaled = check_green(&p.nonhom.scaled(alpha), &p.v.scaled(beta), a).unwrap();
    let factor = alpha * beta.conj();
    assert!((scaled.lhs - uv.lhs * factor).norm() <= 1e-10 * scaled.lhs.norm());
    assert!((scaled.rel_gap / uv.rel_gap - 1.0).abs() <= 0.1);
}

#[test]
fn gaps_shrink_under_refinement() {
    let a = 0.5;
    let mut prev: Option<(f64, f64)> = None;
    for m in [256, 512, 1024] {
        let p = pair(a, m);
        let poh = check_pohozaev(&p.u, &p.v, order(a)).unwrap().rel_gap;
        let green = check_green(&p.nonhom, &p.u, order(a)).unwrap().rel_gap;
        if let Some((p0, g0)) = prev {
            assert!(poh <= p0 + 1e-3 && green <= g0 + 1e-3, "m={m}");
            assert!(poh < p0);
        }
        prev = Some((poh, green));
    }
}

#[test]
fn green_flags_nonintegrable_products() {
    let a = 0.5;
    let op = assemble(order(a), IntervalMesh::new(128).unwrap());
    let zero = vec![c(0.0); 128];
    let phi = EndpointData { minus: c(1.0), plus: c(1.0) };
    let s1 = solve_nonhomogeneous_interval(&op, &zero, phi, c(0.0)).unwrap();
    let s2 = solve_nonhomogeneous_interval(&op, &zero, phi, c(-1.0)).unwrap();
    let u = IdentityInput::from_solution(&s1, op.mesh, &zero, c(0.0), "u");
    let v = IdentityInput::from_solution(&s2, op.mesh, &zero, c(-1.0), "v");
    assert!(matches!(check_green(&u, &v, order(a)), Err(Error::Integrability(_))));
}

#[test]
fn mismatched_inputs_are_rejected() {
    let p = pair(0.5, 64);
    let q = pair(0.5, 128);
    assert!(check_pohozaev(&p.u, &q.u, order(0.5)).is_err());
    assert!(check_green(&p.u, &p.v, order(0.6)).is_err());
}

#[test]
fn report_json() {
    let p = pair(0.5, 128);
    let r = check_pohozaev(&p.u, &p.v, order(0.5)).unwrap();
    let js = r.to_json();
    for key in ["identity", "a", "m", "lhs", "rhs", "abs_gap", "rel_gap", "inputs_summary"] {
        assert!(js.get(key).is_some(), "{key}");
    }
    assert_eq!(js["identity"], "pohozaev");
    let expect = r.abs_gap / r.lhs.norm().max(r.rhs.norm()).max(1e-14);
    assert_eq!(r.rel_gap, expect);
}

fn grid() -> Grid1D {
    Grid1D::new(8192, 2.0).unwrap()
}

fn inside(x: f64, f: impl Fn(f64) -> f64) -> f64 {
    if x.abs() < 1.0 {
        f(x)
    } else {
        0.0
    }
}

#[test]
fn classify_examples() {
    let candidates = [-0.5, -0.3, 0.25, 0.5, 0.7];
    let u = GridFunction::from_fn(grid(), |x| inside(x, |x| (1.0 - x * x).sqrt()));
    let r = classify_e_mu(&u, &candidates).unwrap();
    for e in &r.endpoints {
        assert_eq!(e.mu, 0.5);
        assert!((e.coefficients[0].re - 2f64.sqrt()).abs() < 1e-4);
    }
    let g = grid();
    let lead = leading_coefficients(&g.xs(), &u.values, g.h(), -0.5).unwrap();
    assert!(lead.iter().all(|z| z.norm() < 1e-4 * 2f64.sqrt()));

    let v = GridFunction::from_fn(grid(), |x| inside(x, |x| (1.0 - x * x).powf(-0.3) * (-x * x).exp()));
    let r = classify_e_mu(&v, &candidates).unwrap();
    assert!(r.endpoints.iter().all(|e| e.mu == -0.3));
}

#[test]
fn classify_ambiguity() {
    let u = GridFunction::from_fn(grid(), |x| inside(x, |x| (1.0 - x * x).sqrt()));
    assert!(matches!(
        classify_e_mu(&u, &[0.5, 0.5 + 1e-12]),
        Err(Error::AmbiguousClass { .. })
    ));
    assert!(classify_e_mu(&u, &[]).is_err());
}
