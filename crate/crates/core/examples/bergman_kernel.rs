//! Subspace Bergman kernels: reproduction, projection and transformation laws.
use hyperholo::bergman::{
    reproduction_check, s_isometry, InnerProduct, InnerProductSpec, KernelRelation, SubspaceKernel, Weight,
};
use hyperholo::fields::{build_dictionary, Polynomial};
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let psi = StructuralSet::cimmino();
    let (q, r) = (Quaternion::new(0.3, 0.1, 0.0, -0.2), Quaternion::new(-0.2, 0.0, 0.4, 0.1));
    let ball = Domain4::unit_ball();
    let gram = Resolution { sphere: [12, 12, 24], radial: 12, box_per_axis: 8 };
    let check = Resolution { sphere: [14, 14, 28], radial: 14, box_per_axis: 10 };
    let dict = build_dictionary(&psi, q, &[], true)?;

    let ip = |w, res| InnerProduct::new(InnerProductSpec::new(w, ball.clone(), res));
    let k = SubspaceKernel::new(dict.entries(), ip(Weight::LambdaQ { q }, gram)?)?;
    println!("rank {} of {}, spectrum {:?}", k.rank(), k.len(), k.spectrum());

    let x = Quaternion::new(0.1, -0.2, 0.3, 0.0);
    println!("B(x, x) = {}", k.eval(x, x)?);
    let rep = reproduction_check(&k, &ip(Weight::LambdaQ { q }, check)?, &[x], 1e-6)?;
    println!("reproduction residual {:.2e}", rep.max_residual());

    let g = Polynomial::random(&mut Sampler::new(2), 2).into_field("g");
    let p = k.projection(&g)?;
    let pp = k.projection(&p)?;
    println!("P g(x) = {}, |P P g - P g| = {:.2e}", p.eval(x)?, (pp.eval(x)? - p.eval(x)?).norm());

    let shifted: Vec<_> = dict.entries().iter().map(|f| s_isometry(f, q, r, &psi)).collect();
    let kr = SubspaceKernel::new(&shifted, ip(Weight::LambdaQ { q: r }, gram)?)?;
    let xi = Quaternion::new(-0.3, 0.0, 0.1, 0.2);
    let predicted = KernelRelation::WeightShift { q, r }.predict(&k, x, xi, &psi)?;
    println!("weight shift: B_r = {}, predicted {}", kr.eval(x, xi)?, predicted);
    Ok(())
}
