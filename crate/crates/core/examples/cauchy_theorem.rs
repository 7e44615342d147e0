//! Boundary integral of a solution against the weighted surface element.
use hyperholo::cauchy::{cauchy_theorem_check, TheoremWeight};
use hyperholo::fields::{build_dictionary, QuaternionField};
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.3, 0.2, -0.4, 0.1);
    let ball = Domain4::unit_ball();
    let res = Resolution::default();
    for f in build_dictionary(&psi, q, &[Quaternion::new(0.0, 0.0, 2.5, 0.0)], true)?.entries() {
        let single = cauchy_theorem_check(f, q, &psi, &ball, &res, TheoremWeight::Single, 1e-8)?;
        let double = cauchy_theorem_check(f, q, &psi, &ball, &res, TheoremWeight::Double, 1e-8)?;
        println!(
            "{:<40} e^<q,x>: {:.2e}   e^2<q,x>: {:.2e}",
            f.label(),
            single.max_residual(),
            double.max_residual()
        );
    }
    // a constant is not a solution when q has a vector part
    let control = QuaternionField::constant(Quaternion::E1);
    let r = cauchy_theorem_check(&control, Quaternion::ONE, &psi, &ball, &res, TheoremWeight::Single, 1e-8)?;
    println!("non-solution e1 with q = 1: {:.3e} (expected to be large)", r.max_residual());
    Ok(())
}
