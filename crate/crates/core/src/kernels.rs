//! The ψ-Cauchy kernel `K_ψ(d) = conj(d_ψ) / (2π^2 |d_ψ|^4)`, its perturbation
//! `K^ψ_q(d) = e^{<q,d>_ψ} K_ψ(d)` and the kernel-surface products used by the
//! Cauchy-type formula.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::surface_element;
use crate::quat::{pairing, Quaternion, StructuralSet};

/// `1 / (2π^2)`, the reciprocal of the area of the unit 3-sphere.
pub const KERNEL_NORMALIZATION: f64 = 1.0 / (2.0 * PI * PI);

/// How the displacement `d = y - x` is turned into `d_ψ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFrame {
    /// `d_ψ = Σ d_k ψ_k` with `d_k` the ψ-coordinates of `d`, i.e. `d_ψ = d`.
    #[default]
    Rewritten,
    /// `d_ψ = Σ d_k ψ_k` with `d_k` the standard coordinates of `d`. Kept for
    /// auditing; it does not reproduce solutions for frames other than the
    /// standard one.
    Recoordinatized,
}

impl KernelFrame {
    pub fn apply(self, d: Quaternion, psi: &StructuralSet) -> Quaternion {
        match self {
            KernelFrame::Rewritten => psi.compose(psi.coords(d)),
            KernelFrame::Recoordinatized => {
                let c = d.to_array();
                (0..4).map(|k| psi.get(k) * c[k]).sum()
            }
        }
    }
}

/// A kernel value together with the displacement it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Quaternion,
    pub displacement: Quaternion,
}

impl KernelValue {
    /// Standard-basis components `(K^q_0, K^q_1, K^q_2, K^q_3)`.
    pub fn components(&self) -> [f64; 4] {
        self.value.to_array()
    }
}

fn check_singular(y: Quaternion, x: Quaternion) -> Result<Quaternion> {
    let d = y - x;
    let scale = 1.0_f64.max(y.norm()).max(x.norm());
    if d.norm() <= 1e-14 * scale {
        return Err(Error::Singularity(y));
    }
    Ok(d)
}

/// `K_ψ(y - x)`.
pub fn cauchy_kernel(y: Quaternion, x: Quaternion, psi: &StructuralSet) -> Result<Quaternion> {
    cauchy_kernel_in(y, x, psi, KernelFrame::Rewritten)
}

pub fn cauchy_kernel_in(
    y: Quaternion,
    x: Quaternion,
    psi: &StructuralSet,
    frame: KernelFrame,
) -> Result<Quaternion> {
    let d = frame.apply(check_singular(y, x)?, psi);
    let n2 = d.norm_sqr();
    Ok(d.conj() * (KERNEL_NORMALIZATION / (n2 * n2)))
}

/// `K^ψ_q(y - x) = e^{<q, y-x>_ψ} K_ψ(y - x)`.
pub fn cauchy_kernel_q(
    y: Quaternion,
    x: Quaternion,
    q: Quaternion,
    psi: &StructuralSet,
) -> Result<Quaternion> {
    cauchy_kernel_q_in(y, x, q, psi, KernelFrame::Rewritten)
}

pub fn cauchy_kernel_q_in(
    y: Quaternion,
    x: Quaternion,
    q: Quaternion,
    psi: &StructuralSet,
    frame: KernelFrame,
) -> Result<Quaternion> {
    let k = cauchy_kernel_in(y, x, psi, frame)?;
    Ok(k * pairing(q, y - x, psi).exp())
}

pub fn kernel_value(
    y: Quaternion,
    x: Quaternion,
    q: Quaternion,
    psi: &StructuralSet,
) -> Result<KernelValue> {
    Ok(KernelValue {
        value: cauchy_kernel_q(y, x, q, psi)?,
        displacement: y - x,
    })
}

/// Partial derivatives of `d ↦ K^ψ_q(d)` along the standard axes `1, e1, e2, e3`.
pub fn kernel_gradient(d: Quaternion, q: Quaternion, psi: &StructuralSet) -> Result<[Quaternion; 4]> {
    let k = cauchy_kernel_q(d, Quaternion::ZERO, q, psi)?;
    let n2 = d.norm_sqr();
    let e = pairing(q, d, psi).exp() * KERNEL_NORMALIZATION / (n2 * n2);
    let dc = d.to_array();
    let qc = q.to_array();
    Ok([0, 1, 2, 3].map(|j| {
        // d/d d_j [e^{<q,d>} conj(d) |d|^-4]
        k * qc[j] + Quaternion::basis(j).conj() * e - k * (4.0 * dc[j] / n2)
    }))
}

/// `K^ψ_q(y - x) · σ` at a boundary node with outward unit normal `normal`.
/// The standard-basis components of the result are `K^q_{σ,0..3}`.
pub fn kernel_surface_pairing(
    y: Quaternion,
    x: Quaternion,
    q: Quaternion,
    normal: Quaternion,
    psi: &StructuralSet,
) -> Result<Quaternion> {
    Ok(cauchy_kernel_q(y, x, q, psi)? * surface_element(normal, psi))
}
