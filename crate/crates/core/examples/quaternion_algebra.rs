//! Hamilton products, structural sets and the frame-dependent pairing.
use hyperholo::quat::{pairing, psi_coords};
use hyperholo::sampling::Sampler;
use hyperholo::{Quaternion, StructuralSet};

fn main() -> hyperholo::Result<()> {
    let (i, j, k) = (Quaternion::E1, Quaternion::E2, Quaternion::E3);
    println!("e1 e2 = {}   e2 e1 = {}   e1 e2 e3 = {}", i * j, j * i, i * j * k);

    let q = Quaternion::new(1.0, -2.0, 0.5, 3.0);
    println!("q = {q}, |q| = {:.6}, q^-1 = {}", q.norm(), q.inverse()?);

    let psi = StructuralSet::cimmino();
    println!("cimmino frame {:?}, orientation {}", psi.psi(), psi.sign());
    let coords = psi_coords(q, &psi);
    println!("psi-coordinates of q: {:?}", coords.0);

    // the pairing is the Euclidean dot product, whatever frame is used
    let mut s = Sampler::new(1);
    let other = StructuralSet::new([Quaternion::ONE, Quaternion::E2, Quaternion::E3, Quaternion::E1])?;
    let (a, b) = (s.quaternion(1.0), s.quaternion(1.0));
    println!(
        "<a,b>: standard {:.12}, cimmino {:.12}, rotated {:.12}",
        pairing(a, b, &StructuralSet::standard()),
        pairing(a, b, &psi),
        pairing(a, b, &other)
    );

    let bad = StructuralSet::new([Quaternion::ONE, Quaternion::E1, Quaternion::E1, Quaternion::E3]);
    println!("non-orthonormal frame rejected: {}", bad.unwrap_err());
    Ok(())
}
