use hyperholo::fields::{build_dictionary, exp_modulate, fueter_variable, kernel_field, max_residual, Polynomial, QuaternionField};
use hyperholo::operators::{apply_with, conjugate_apply, operator_field, Differentiation, OperatorKind};
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn points(n: usize, seed: u64) -> Vec<Quaternion> {
    let mut s = Sampler::new(seed);
    (0..n).map(|_| s.in_ball(Quaternion::ZERO, 0.95)).collect()
}

#[test]
fn fueter_variables_solve_the_unperturbed_system() {
    let psi = StructuralSet::cimmino();
    for k in 1..=3 {
        let z = fueter_variable(k, &psi).unwrap();
        let r = max_residual(&z, OperatorKind::left(Quaternion::ZERO), &points(20, 1), &psi, Differentiation::Exact).unwrap();
        assert!(r < 1e-14, "z{k}: {r}");
    }
}

#[test]
fn modulated_entries_in_other_frames() {
    let mut s = Sampler::new(9);
    let psi = StructuralSet::new([Quaternion::E1, Quaternion::ONE, Quaternion::E3, Quaternion::E2]).unwrap();
    let q = s.bounded(1.0);
    let dict = build_dictionary(&psi, q, &[Quaternion::new(0.0, 3.0, 0.0, 0.0)], true).unwrap();
    for f in dict.entries() {
        let r = max_residual(f, OperatorKind::left(q), &points(30, 2), &psi, Differentiation::Central { h: 1e-4 }).unwrap();
        assert!(r < 1e-6, "{}: {r}", f.label());
    }
}

#[test]
fn kernel_is_right_solution_with_negated_perturbation() {
    // as a function of the pole it is annihilated by the right operator with -q
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.3, -0.4, 0.2, 0.1);
    let x = Quaternion::new(3.0, 0.0, 0.0, 0.0);
    let k = QuaternionField::new("K(y-x)", move |y| {
        let f = kernel_field(y, q, &psi);
        f.eval(x)
    });
    for y in points(10, 3) {
        let v = apply_with(OperatorKind::right(-q), &k, y, &psi, Differentiation::Central { h: 1e-4 }).unwrap();
        assert!(v.norm() < 1e-6 * (1.0 + k.eval(y).unwrap().norm()), "{v}");
    }
}

#[test]
fn truncation_error_is_second_order() {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.8, 0.3, -0.5, 0.2);
    let f = exp_modulate(&fueter_variable(1, &psi).unwrap(), q, &psi).without_partials();
    let x = Quaternion::new(0.3, -0.2, 0.4, 0.1);
    let r = |h: f64| apply_with(OperatorKind::left(q), &f, x, &psi, Differentiation::Central { h }).unwrap().norm();
    let ratio = r(1e-2) / r(5e-3);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn laplacian_factorisation() {
    // conj-operator after ψD is the Laplacian; check on a random cubic
    let psi = StructuralSet::cimmino();
    let mut s = Sampler::new(4);
    let p = Polynomial::random(&mut s, 3).into_field("p");
    let dp = operator_field(OperatorKind::left(Quaternion::ZERO), &p, &psi, Differentiation::Exact);
    let x = Quaternion::new(0.1, 0.2, -0.3, 0.4);
    let lhs = conjugate_apply(&dp, x, &psi, Differentiation::Central { h: 1e-3 }).unwrap();
    let h = 1e-3;
    let mut lap = Quaternion::ZERO;
    for k in 0..4 {
        let e = Quaternion::basis(k) * h;
        lap += (p.eval(x + e).unwrap() - p.eval(x).unwrap() * 2.0 + p.eval(x - e).unwrap()) / (h * h);
    }
    assert!((lhs - lap).norm() < 1e-4 * (1.0 + lap.norm()), "{lhs} vs {lap}");
}

#[test]
fn generic_polynomial_is_not_a_solution() {
    let psi = StructuralSet::cimmino();
    let p = Polynomial::random(&mut Sampler::new(8), 2).into_field("p");
    let r = max_residual(&p, OperatorKind::left(Quaternion::E1), &points(10, 5), &psi, Differentiation::Exact).unwrap();
    assert!(r > 1e-2);
}
