//! The left and right (perturbed) ψ-Fueter operators
//!
//! ```text
//! ψD_q[f]  = Σ_k ψ_k ∂_k f + q f
//! D^ψ_q[f] = Σ_k ∂_k f ψ_k + f q
//! ```
//!
//! where `∂_k` differentiates along `ψ_k`, i.e. with respect to the k-th
//! ψ-coordinate of the point.

use serde::{Deserialize, Serialize};

use crate::fields::QuaternionField;
use crate::quat::{Quaternion, StructuralSet};

use crate::error::Result;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Side and perturbation of a Fueter-type operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorKind {
    pub side: Side,
    pub perturbation: Quaternion,
}

impl OperatorKind {
    pub fn left(q: Quaternion) -> Self {
        Self {
            side: Side::Left,
            perturbation: q,
        }
    }

    pub fn right(q: Quaternion) -> Self {
        Self {
            side: Side::Right,
            perturbation: q,
        }
    }
}

/// How derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Differentiation {
    /// Exact partials when the field has them, central differences otherwise.
    Auto { h: f64 },
    /// Exact partials; falls back to `Auto` behaviour if absent.
    Exact,
    Central { h: f64 },
    /// `(4 D(h/2) - D(h)) / 3` on central differences.
    Richardson { h: f64 },
}

impl Default for Differentiation {
    fn default() -> Self {
        Differentiation::Auto { h: DEFAULT_STEP }
    }
}

fn central(f: &QuaternionField, x: Quaternion, dir: Quaternion, h: f64) -> Result<Quaternion> {
    Ok((f.eval(x + dir * h)? - f.eval(x - dir * h)?) / (2.0 * h))
}

/// Derivatives of `f` at `x` along the four frame vectors `ψ_k`.
pub fn frame_derivatives(
    f: &QuaternionField,
    x: Quaternion,
    psi: &StructuralSet,
    mode: Differentiation,
) -> Result<[Quaternion; 4]> {
    let exact = |p: [Quaternion; 4]| -> [Quaternion; 4] {
        psi.psi().map(|v| {
            let c = v.to_array();
            (0..4).map(|j| p[j] * c[j]).sum()
        })
    };
    let fd = |h: f64| -> Result<[Quaternion; 4]> {
        let mut out = [Quaternion::ZERO; 4];
        for (k, v) in psi.psi().iter().enumerate() {
            out[k] = central(f, x, *v, h)?;
        }
        Ok(out)
    };
    match mode {
        Differentiation::Exact | Differentiation::Auto { .. } if f.has_partials() => {
            Ok(exact(f.partials(x).unwrap()?))
        }
        Differentiation::Exact => fd(DEFAULT_STEP),
        Differentiation::Auto { h } | Differentiation::Central { h } => fd(h),
        Differentiation::Richardson { h } => {
            let coarse = fd(h)?;
            let fine = fd(0.5 * h)?;
            Ok([0, 1, 2, 3].map(|k| (fine[k] * 4.0 - coarse[k]) / 3.0))
        }
    }
}

/// Applies the operator with an explicit differentiation mode.
pub fn apply_with(
    kind: OperatorKind,
    f: &QuaternionField,
    x: Quaternion,
    psi: &StructuralSet,
    mode: Differentiation,
) -> Result<Quaternion> {
    let d = frame_derivatives(f, x, psi, mode)?;
    let v = f.eval(x)?;
    let q = kind.perturbation;
    Ok(match kind.side {
        Side::Left => (0..4).map(|k| psi.get(k) * d[k]).sum::<Quaternion>() + q * v,
        Side::Right => (0..4).map(|k| d[k] * psi.get(k)).sum::<Quaternion>() + v * q,
    })
}

/// Exact partials when available, otherwise central differences with step `h`.
pub fn apply(
    kind: OperatorKind,
    f: &QuaternionField,
    x: Quaternion,
    psi: &StructuralSet,
    h: f64,
) -> Result<Quaternion> {
    apply_with(kind, f, x, psi, Differentiation::Auto { h })
}

/// The field `x ↦ A[f](x)`.
pub fn operator_field(
    kind: OperatorKind,
    f: &QuaternionField,
    psi: &StructuralSet,
    mode: Differentiation,
) -> QuaternionField {
    let f = f.clone();
    let psi = *psi;
    QuaternionField::new(format!("A[{}]", f.label()), move |x| {
        apply_with(kind, &f, x, &psi, mode)
    })
}

/// The four ψ-coordinates of `ψD_q[f](x)` for the Cimmino frame
/// `{1, e1, -e2, e3}`. All four vanish exactly when `f` solves the
/// inhomogeneous Cimmino system for `q`.
pub fn cimmino_residual(f: &QuaternionField, x: Quaternion, q: Quaternion) -> Result<[f64; 4]> {
    cimmino_residual_with(f, x, q, Differentiation::default())
}

pub fn cimmino_residual_with(
    f: &QuaternionField,
    x: Quaternion,
    q: Quaternion,
    mode: Differentiation,
) -> Result<[f64; 4]> {
    let psi = StructuralSet::cimmino();
    let v = apply_with(OperatorKind::left(q), f, x, &psi, mode)?;
    Ok(psi.coords(v).0)
}

/// The conjugate operator `Σ_k conj(ψ_k) ∂_k f`; composed with `ψD` it gives
/// the Laplacian.
pub fn conjugate_apply(
    f: &QuaternionField,
    x: Quaternion,
    psi: &StructuralSet,
    mode: Differentiation,
) -> Result<Quaternion> {
    let d = frame_derivatives(f, x, psi, mode)?;
    Ok((0..4).map(|k| psi.get(k).conj() * d[k]).sum())
}
