//! Covariance of the perturbed operator under Moebius maps and the B_T exponent arbiter.
use hyperholo::fields::Polynomial;
use hyperholo::moebius::{covariance_check, exponent_arbiter, BExponent, MoebiusMap};
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let psi = StructuralSet::cimmino();
    let mut s = Sampler::new(5);
    let f = Polynomial::random(&mut s, 2).into_field("f");
    let (q, r) = (s.bounded(0.5), s.bounded(0.5));
    let points: Vec<Quaternion> = (0..10).map(|_| s.in_ball(Quaternion::ZERO, 0.4)).collect();

    let affine = MoebiusMap::affine(s.quaternion(1.0), s.quaternion(0.5), s.quaternion(1.0))?;
    let rep = covariance_check(&affine, r, q, &f, &points, 1e-4, &psi, BExponent::Plus4, 1e-5)?;
    println!("affine map: max relative residual {:.2e}", rep.max_residual());

    let t = MoebiusMap::new(Quaternion::ONE, Quaternion::ZERO, Quaternion::new(0.3, 0.2, -0.1, 0.4), Quaternion::ONE)?;
    let x = points[0];
    let y = t.apply(x)?;
    println!("T(x) = {y}, back: {}", t.invert(y)?);
    let rep = exponent_arbiter(&t, r, q, &f, &points, 1e-4, &psi, 1e-5)?;
    println!("{}", rep.to_json().unwrap());
    Ok(())
}
