//! Boundary vs volume sides of the weighted Stokes identity for random polynomials.
use hyperholo::cauchy::stokes_check;
use hyperholo::fields::Polynomial;
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let psi = StructuralSet::cimmino();
    let mut s = Sampler::new(11);
    let domains = [
        Domain4::unit_ball(),
        Domain4::ball(Quaternion::new(0.5, 0.0, -0.5, 1.0), 0.75)?,
        Domain4::unit_box(),
        Domain4::cuboid([0.0, -1.0, 0.0, 0.5], [1.0, 0.5, 2.0, 1.0])?,
    ];
    for d in &domains {
        let f = Polynomial::random(&mut s, 3).into_field("f");
        let g = Polynomial::random(&mut s, 2).into_field("g");
        let q = s.bounded(1.0);
        let rep = stokes_check(&f, &g, q, &psi, d, &Resolution::default(), 1e-6)?;
        println!("{:?}: relative residual {:.2e}", d, rep.max_residual());
    }
    Ok(())
}
