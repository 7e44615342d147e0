use std::f64::consts::PI;

use hyperholo::bergman::{
    inclusion_check, kernel_relation_checks, s_isometry, InnerProduct, InnerProductSpec, KernelRelation,
    SubspaceKernel, Weight,
};
use hyperholo::fields::{build_dictionary, build_dictionary_with, Certification, Polynomial, QuaternionField};
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::moebius::{pullback, MoebiusMap, PullbackKind};
use hyperholo::quat::pairing;
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn ip(weight: Weight, domain: &Domain4, res: Resolution) -> InnerProduct {
    InnerProduct::new(InnerProductSpec::new(weight, domain.clone(), res)).unwrap()
}

fn res(n: usize) -> Resolution {
    Resolution { sphere: [n, n, 2 * n], radial: n, box_per_axis: n.div_ceil(2) }
}

/// Modified Bessel function `I_2` from its power series.
fn bessel_i2(a: f64) -> f64 {
    let mut term = (a / 2.0).powi(2) / 2.0;
    let mut sum = 0.0;
    for k in 0..60 {
        sum += term;
        let k = k as f64;
        term *= (a / 2.0).powi(2) / ((k + 1.0) * (k + 3.0));
    }
    sum
}

#[test]
fn constant_span_closed_form() {
    // ∫_B e^{2<q,x>} dx = π² I_2(2|q|) / |q|²
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.3, -0.2, 0.4, 0.1);
    let r = Quaternion::new(-0.1, 0.2, 0.0, 0.3);
    let ball = Domain4::unit_ball();
    let n_q = PI * PI * bessel_i2(2.0 * q.norm()) / q.norm_sqr();
    let one = [QuaternionField::constant(Quaternion::ONE)];
    let k = SubspaceKernel::new(&one, ip(Weight::LambdaQ { q }, &ball, res(24))).unwrap();
    let (x, xi) = (Quaternion::new(0.1, 0.2, -0.3, 0.0), Quaternion::new(-0.4, 0.1, 0.0, 0.2));
    assert!((k.eval(x, xi).unwrap() - Quaternion::real(1.0 / n_q)).norm() < 1e-12);

    let shifted = [s_isometry(&one[0], q, r, &psi)];
    let kr = SubspaceKernel::new(&shifted, ip(Weight::LambdaQ { q: r }, &ball, res(24))).unwrap();
    let want = pairing(q - r, x + xi, &psi).exp() / n_q;
    assert!((kr.eval(x, xi).unwrap() - Quaternion::real(want)).norm() < 1e-8 * want);
}

#[test]
fn modulated_constant_closed_form_and_shift() {
    let psi = StructuralSet::cimmino();
    let (q, r) = (Quaternion::new(0.5, 0.1, -0.2, 0.3), Quaternion::new(0.0, -0.3, 0.2, 0.1));
    let ball = Domain4::unit_ball();
    let dq = build_dictionary(&psi, q, &[], false).unwrap();
    let dr = build_dictionary(&psi, r, &[], false).unwrap();
    let kq = SubspaceKernel::new(dq.entries(), ip(Weight::LambdaQ { q }, &ball, res(16))).unwrap();
    let kr = SubspaceKernel::new(dr.entries(), ip(Weight::LambdaQ { q: r }, &ball, res(16))).unwrap();
    let mut s = Sampler::new(1);
    let pairs: Vec<_> = (0..10).map(|_| (s.in_ball(Quaternion::ZERO, 1.0), s.in_ball(Quaternion::ZERO, 1.0))).collect();
    for &(x, xi) in &pairs {
        let want = (-pairing(q, x + xi, &psi)).exp() * 2.0 / (PI * PI);
        assert!((kq.eval(x, xi).unwrap() - Quaternion::real(want)).norm() < 1e-12 * want);
    }
    let rep = kernel_relation_checks(&kq, &kr, &KernelRelation::WeightShift { q, r }, &pairs, 1e-8).unwrap();
    assert!(rep.pass, "{}", rep.max_residual());
}

/// Orthonormalise under the right-linear product: `e_j = (f_j - Σ e_i <e_i, f_j>) / |.|`.
fn gram_schmidt(entries: &[QuaternionField], ip: &InnerProduct) -> Vec<Vec<Quaternion>> {
    let mut basis: Vec<Vec<Quaternion>> = Vec::new();
    for f in entries {
        let mut v = ip.values(f).unwrap();
        for e in &basis {
            let c = ip.from_values(e, &v);
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= *ei * c;
            }
        }
        let n = ip.from_values(&v, &v).to_array()[0].sqrt();
        basis.push(v.into_iter().map(|vi| vi / n).collect());
    }
    basis
}

#[test]
fn kernel_matches_orthonormal_basis() {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.2, -0.3, 0.1, 0.2);
    let ball = Domain4::unit_ball();
    let dict = build_dictionary(&psi, q, &[Quaternion::new(0.0, 2.0, 0.0, 0.0)], true).unwrap();
    let inner = ip(Weight::LambdaQ { q }, &ball, res(12));
    let k = SubspaceKernel::new(dict.entries(), inner.clone()).unwrap();
    assert!(k.is_full_rank());
    let basis = gram_schmidt(dict.entries(), &inner);
    // kernel at a pair of quadrature nodes: Σ e_i(x) conj(e_i(ξ))
    let nodes = &inner.quadrature().nodes;
    for (a, b) in [(0, 1), (17, 400), (1234, 5678), (99, 99)] {
        let want: Quaternion = basis.iter().map(|e| e[a] * e[b].conj()).sum();
        let got = k.eval(nodes[a], nodes[b]).unwrap();
        assert!((got - want).norm() < 1e-8 * (1.0 + want.norm()), "{got} vs {want}");
    }
}

#[test]
fn projection_is_idempotent_and_orthogonal() {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(-0.2, 0.1, 0.3, 0.0);
    let cube = Domain4::cuboid([-0.5; 4], [0.5; 4]).unwrap();
    let dict = build_dictionary(&psi, q, &[], true).unwrap();
    let inner = ip(Weight::LambdaQ { q }, &cube, res(12));
    let k = SubspaceKernel::new(dict.entries(), inner.clone()).unwrap();
    let g = Polynomial::random(&mut Sampler::new(3), 3).into_field("g");
    let p = k.projection(&g).unwrap();
    let pp = k.projection(&p).unwrap();
    let mut s = Sampler::new(4);
    for _ in 0..10 {
        let x = s.in_box([-0.5; 4], [0.5; 4]);
        let (a, b) = (p.eval(x).unwrap(), pp.eval(x).unwrap());
        assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
    }
    let (gv, pv) = (inner.values(&g).unwrap(), inner.values(&p).unwrap());
    let rest: Vec<Quaternion> = gv.iter().zip(&pv).map(|(a, b)| *a - *b).collect();
    let gn = inner.from_values(&gv, &gv).to_array()[0].sqrt();
    for f in dict.entries() {
        let fv = inner.values(f).unwrap();
        let c = inner.from_values(&fv, &rest);
        assert!(c.norm() < 1e-10 * gn, "{}: {c}", f.label());
    }
    // entries are fixed by the projection
    for f in dict.entries() {
        let pf = k.projection(f).unwrap();
        let x = Quaternion::new(0.1, 0.0, -0.2, 0.3);
        assert!((pf.eval(x).unwrap() - f.eval(x).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn rank_deficient_span() {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.1, 0.2, 0.0, 0.0);
    let f = build_dictionary(&psi, q, &[], false).unwrap().entries()[0].clone();
    let twice = [f.clone(), f.right_mul(Quaternion::new(0.0, 2.0, 1.0, 0.0))];
    let k = SubspaceKernel::new(&twice, ip(Weight::LambdaQ { q }, &Domain4::unit_ball(), res(12))).unwrap();
    assert_eq!(k.rank(), 1);
    let x = Quaternion::new(0.2, 0.1, 0.0, -0.1);
    assert!((k.eval(x, x).unwrap() - Quaternion::real((-2.0 * pairing(q, x, &psi)).exp() * 2.0 / (PI * PI))).norm() < 1e-10);
}

#[test]
fn s_isometry_is_exact_on_shared_nodes() {
    let psi = StructuralSet::cimmino();
    let mut s = Sampler::new(5);
    let ball = Domain4::ball(Quaternion::new(0.5, 0.0, 0.0, 0.5), 0.8).unwrap();
    for _ in 0..10 {
        let (q, r) = (s.bounded(1.0), s.bounded(1.0));
        let f = Polynomial::random(&mut s, 2).into_field("f");
        let a = ip(Weight::LambdaQ { q }, &ball, res(8)).norm_sqr(&f).unwrap();
        let b = ip(Weight::LambdaQ { q: r }, &ball, res(8)).norm_sqr(&s_isometry(&f, q, r, &psi)).unwrap();
        assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }
}

fn conformal_case(t: MoebiusMap, omega: Domain4, xi: Domain4, seed: u64) {
    let psi = StructuralSet::cimmino();
    let (r, q) = (Quaternion::new(0.2, 0.0, -0.1, 0.3), Quaternion::new(-0.1, 0.3, 0.2, 0.0));
    let delta = t.delta(r, omega.center()).unwrap();
    let cert = Certification { center: omega.center(), radius: 2.0 * omega.scale(), ..Certification::default() };
    let dict = build_dictionary_with(&psi, delta, &[], true, &cert).unwrap();
    let k_omega = SubspaceKernel::new(dict.entries(), ip(Weight::Gamma { map: t, r, q }, &omega, res(12))).unwrap();
    let pulled: Vec<_> = dict.entries().iter().map(|f| pullback(&t, r, q, f, PullbackKind::C, &psi)).collect();
    let k_xi = SubspaceKernel::new(&pulled, ip(Weight::Rho { map: t }, &xi, res(12))).unwrap();
    let mut s = Sampler::new(seed);
    let c = xi.center();
    let pairs: Vec<_> = (0..8).map(|_| (s.in_ball(c, 0.5 * xi.scale()), s.in_ball(c, 0.5 * xi.scale()))).collect();
    let rep = kernel_relation_checks(&k_omega, &k_xi, &KernelRelation::Conformal { map: t, r, q }, &pairs, 1e-6).unwrap();
    assert!(rep.pass, "{}", rep.max_residual());
}

#[test]
fn conformal_relation_for_translations() {
    let b = Quaternion::new(0.3, -0.2, 0.5, 0.1);
    let t = MoebiusMap::translation(b);
    conformal_case(t, Domain4::unit_ball(), Domain4::ball(-b, 1.0).unwrap(), 6);
    let lo = [0.0, -1.0, 0.0, 0.5];
    let hi = [1.0, 0.0, 1.0, 1.5];
    let bb = b.to_array();
    let shifted = Domain4::cuboid(std::array::from_fn(|k| lo[k] - bb[k]), std::array::from_fn(|k| hi[k] - bb[k])).unwrap();
    conformal_case(t, Domain4::cuboid(lo, hi).unwrap(), shifted, 7);
}

#[test]
fn conformal_relation_for_a_similarity() {
    let (a, b, d) = (Quaternion::new(1.0, 0.5, 0.0, -0.5), Quaternion::new(0.1, 0.0, 0.2, 0.0), Quaternion::new(0.8, 0.0, 0.3, 0.0));
    let t = MoebiusMap::affine(a, b, d).unwrap();
    let xi = Domain4::ball(t.invert(Quaternion::ZERO).unwrap(), d.norm() / a.norm()).unwrap();
    conformal_case(t, Domain4::unit_ball(), xi, 8);
}

#[test]
fn inclusion_on_a_negative_box_and_at_q_zero() {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.5, 0.5, 0.25, 0.25);
    let cube = Domain4::cuboid([-2.0, -1.5, -1.0, -1.0], [-1.0, -0.5, 0.0, 0.0]).unwrap();
    let dict = build_dictionary(&psi, q, &[], true).unwrap();
    let rep = inclusion_check(dict.entries(), q, &cube, &res(8), &psi, 1e-12).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.params["half_space"], true);
    let d0 = build_dictionary(&psi, Quaternion::ZERO, &[], true).unwrap();
    let rep = inclusion_check(d0.entries(), Quaternion::ZERO, &Domain4::unit_ball(), &res(8), &psi, 1e-12).unwrap();
    assert!(rep.pass);
    assert!(rep.residuals.iter().any(|r| r.label.starts_with("equal_")));
}
