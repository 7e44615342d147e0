//! Reconstruct a solution from its boundary values; zero outside the domain.
use hyperholo::cauchy::BoundaryIntegrator;
use hyperholo::fields::{exp_modulate, fueter_variable};
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let psi = StructuralSet::cimmino();
    let q = Quaternion::new(0.2, -0.1, 0.3, 0.0);
    let f = exp_modulate(&fueter_variable(2, &psi)?, q, &psi);
    let x = Quaternion::new(0.2, -0.1, 0.3, 0.1);
    let outside = Quaternion::new(1.2, 1.0, 0.0, 0.3);
    for n in [8, 12, 16, 24, 32] {
        let res = Resolution { sphere: [n, n, 2 * n], ..Resolution::default() };
        let bi = BoundaryIntegrator::new(&Domain4::unit_ball(), &res, &psi)?;
        let values = bi.boundary_values(&f)?;
        let inside = (bi.reconstruct_from(&values, q, x)? - f.eval(x)?).norm();
        let zero = bi.reconstruct_from(&values, q, outside)?.norm();
        println!("n = {n:>2}: interior error {inside:.2e}, exterior value {zero:.2e}");
    }
    let bi = BoundaryIntegrator::new(&Domain4::unit_ball(), &Resolution::default(), &psi)?;
    match bi.reconstruct(&f, q, Quaternion::new(0.9, 0.0, 0.0, 0.0)) {
        Err(e) => println!("rejected: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }
    Ok(())
}
