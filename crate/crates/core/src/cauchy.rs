//! Boundary integrals: the Stokes identity, Cauchy's integral theorem and the
//! Cauchy-type reconstruction formula
//!
//! ```text
//! ∫_∂Ω f ν_q g = ∫_Ω (D^ψ_q[f] g + f ψD_q[g]) dλ_q
//! ∫_∂Ω K^ψ_q(y - x) σ_y f(y) = f(x) inside, 0 outside
//! ```

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::QuaternionField;
use crate::geometry::{surface_element, Domain4, Resolution, SurfaceQuadrature};
use crate::kernels::{cauchy_kernel_q_in, KernelFrame};
use crate::numeric::pairwise_sum;
use crate::operators::{apply_with, Differentiation, OperatorKind};
use crate::quat::{pairing, Quaternion, StructuralSet};
use crate::report::VerificationReport;

/// Reconstruction points must keep this fraction of the domain scale away
/// from the boundary.
pub const BOUNDARY_FLOOR_FRACTION: f64 = 0.3;

/// Exponential weight multiplying `σ` in the integral theorem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremWeight {
    /// `e^{<q,x>_ψ}`: the boundary integral of `e^{<q,x>} σ f` vanishes for
    /// every left `q`-solution.
    #[default]
    Single,
    /// `e^{2<q,x>_ψ}`, i.e. `ν^ψ_q`. For a left `q`-solution the integral equals
    /// `∫_Ω q f dλ_q`, which is zero only when `q = 0`.
    Double,
}

impl TheoremWeight {
    pub fn factor(self) -> f64 {
        match self {
            TheoremWeight::Single => 1.0,
            TheoremWeight::Double => 2.0,
        }
    }
}

/// A boundary rule with cached quaternionic surface elements `σ_i = n_ψ w_i`.
#[derive(Clone, Debug)]
pub struct BoundaryIntegrator {
    domain: Domain4,
    psi: StructuralSet,
    quad: SurfaceQuadrature,
    elements: Vec<Quaternion>,
    frame: KernelFrame,
    floor: f64,
}

impl BoundaryIntegrator {
    pub fn new(domain: &Domain4, res: &Resolution, psi: &StructuralSet) -> Result<Self> {
        let quad = domain.surface_quadrature(res)?;
        let elements = quad
            .normals
            .iter()
            .zip(&quad.weights)
            .map(|(&n, &w)| surface_element(n, psi) * w)
            .collect();
        Ok(Self {
            domain: domain.clone(),
            psi: *psi,
            quad,
            elements,
            frame: KernelFrame::Rewritten,
            floor: BOUNDARY_FLOOR_FRACTION * domain.scale(),
        })
    }

    pub fn with_kernel_frame(mut self, frame: KernelFrame) -> Self {
        self.frame = frame;
        self
    }

    /// Minimum boundary distance for reconstruction points, as a fraction of
    /// the domain scale.
    pub fn with_floor_fraction(mut self, fraction: f64) -> Self {
        self.floor = fraction * self.domain.scale();
        self
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn domain(&self) -> &Domain4 {
        &self.domain
    }

    pub fn quadrature(&self) -> &SurfaceQuadrature {
        &self.quad
    }

    pub fn nodes(&self) -> &[Quaternion] {
        &self.quad.nodes
    }

    /// `f` at every boundary node.
    pub fn boundary_values(&self, f: &QuaternionField) -> Result<Vec<Quaternion>> {
        self.quad.nodes.iter().map(|&y| f.eval(y)).collect()
    }

    /// `∫_∂Ω e^{k<q,y>} σ_y f(y)` with `k` from `weight`.
    pub fn theorem_integral(
        &self,
        values: &[Quaternion],
        q: Quaternion,
        weight: TheoremWeight,
    ) -> Quaternion {
        let k = weight.factor();
        let terms: Vec<Quaternion> = (0..values.len())
            .map(|i| {
                let e = (k * pairing(q, self.quad.nodes[i], &self.psi)).exp();
                self.elements[i] * values[i] * e
            })
            .collect();
        pairwise_sum(&terms)
    }

    fn check_point(&self, x: Quaternion) -> Result<()> {
        let distance = self.domain.boundary_distance(x);
        if distance < self.floor {
            return Err(Error::TooCloseToBoundary {
                point: x,
                distance,
                floor: self.floor,
            });
        }
        Ok(())
    }

    /// `∫_∂Ω K^ψ_q(y - x) σ_y f(y)` from precomputed boundary values.
    pub fn reconstruct_from(&self, values: &[Quaternion], q: Quaternion, x: Quaternion) -> Result<Quaternion> {
        self.check_point(x)?;
        let mut terms = Vec::with_capacity(values.len());
        for i in 0..values.len() {
            let k = cauchy_kernel_q_in(self.quad.nodes[i], x, q, &self.psi, self.frame)?;
            terms.push(k * self.elements[i] * values[i]);
        }
        Ok(pairwise_sum(&terms))
    }

    pub fn reconstruct(&self, f: &QuaternionField, q: Quaternion, x: Quaternion) -> Result<Quaternion> {
        self.reconstruct_from(&self.boundary_values(f)?, q, x)
    }
}

fn max_norm(values: &[Quaternion]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Boundary and volume sides of the weighted Stokes identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesSides {
    pub boundary: Quaternion,
    pub volume: Quaternion,
    /// `Σ |f| |ν_q| |g|` over the boundary nodes.
    pub scale: f64,
}

pub fn stokes_sides(
    f: &QuaternionField,
    g: &QuaternionField,
    q: Quaternion,
    psi: &StructuralSet,
    domain: &Domain4,
    res: &Resolution,
    mode: Differentiation,
) -> Result<StokesSides> {
    let surface = domain.surface_quadrature(res)?.weighted(q, psi);
    let mut bterms = Vec::with_capacity(surface.nodes.len());
    let mut sterms = Vec::with_capacity(surface.nodes.len());
    for (i, &y) in surface.nodes.iter().enumerate() {
        let (fv, gv) = (f.eval(y)?, g.eval(y)?);
        bterms.push(fv * surface.elements[i] * gv);
        sterms.push(fv.norm() * surface.elements[i].norm() * gv.norm());
    }
    let volume = domain.volume_quadrature(res)?.weighted(q, psi);
    let mut vterms = Vec::with_capacity(volume.len());
    for (&x, &w) in volume.nodes.iter().zip(&volume.weights) {
        let df = apply_with(OperatorKind::right(q), f, x, psi, mode)?;
        let dg = apply_with(OperatorKind::left(q), g, x, psi, mode)?;
        vterms.push((df * g.eval(x)? + f.eval(x)? * dg) * w);
    }
    Ok(StokesSides {
        boundary: pairwise_sum(&bterms),
        volume: pairwise_sum(&vterms),
        scale: pairwise_sum(&sterms),
    })
}

/// Relative residual `|boundary − volume| / Σ|f||ν_q||g|` of the Stokes identity.
#[allow(clippy::too_many_arguments)]
pub fn stokes_check(
    f: &QuaternionField,
    g: &QuaternionField,
    q: Quaternion,
    psi: &StructuralSet,
    domain: &Domain4,
    res: &Resolution,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let s = stokes_sides(f, g, q, psi, domain, res, Differentiation::default())?;
    let abs = (s.boundary - s.volume).norm();
    let mut r = VerificationReport::new("stokes", tolerance);
    r.param("f", f.label())
        .param("g", g.label())
        .param("q", q)
        .param("domain", domain)
        .param("resolution", res)
        .param("boundary", s.boundary)
        .param("volume", s.volume)
        .param("absolute_residual", abs)
        .residual("relative", abs / s.scale.max(f64::MIN_POSITIVE));
    Ok(r.timed(start))
}

/// `|∫ e^{k<q,y>} σ f| / (|∂Ω| max|f|)` and the same for each standard component.
pub fn cauchy_theorem_check(
    f: &QuaternionField,
    q: Quaternion,
    psi: &StructuralSet,
    domain: &Domain4,
    res: &Resolution,
    weight: TheoremWeight,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let b = BoundaryIntegrator::new(domain, res, psi)?;
    let values = b.boundary_values(f)?;
    let integral = b.theorem_integral(&values, q, weight);
    let scale = (domain.surface_measure() * max_norm(&values)).max(f64::MIN_POSITIVE);
    let mut r = VerificationReport::new("cauchy-theorem", tolerance);
    r.param("f", f.label())
        .param("q", q)
        .param("weight", weight)
        .param("domain", domain)
        .param("resolution", res)
        .param("integral", integral)
        .param("scale", scale)
        .residual("relative", integral.norm() / scale);
    for (k, c) in integral.to_array().iter().enumerate() {
        r.residual(format!("component_{k}"), c.abs() / scale);
    }
    Ok(r.timed(start))
}

/// `∫_∂Ω K^ψ_q(y - x) σ_y f(y)`.
pub fn cauchy_reconstruct(
    f: &QuaternionField,
    q: Quaternion,
    psi: &StructuralSet,
    domain: &Domain4,
    x: Quaternion,
    res: &Resolution,
) -> Result<Quaternion> {
    BoundaryIntegrator::new(domain, res, psi)?.reconstruct(f, q, x)
}

/// Reconstruction errors at interior points and values at exterior points,
/// both relative to `max_∂Ω |f|`.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_formula_check(
    f: &QuaternionField,
    q: Quaternion,
    psi: &StructuralSet,
    domain: &Domain4,
    res: &Resolution,
    interior: &[Quaternion],
    exterior: &[Quaternion],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let b = BoundaryIntegrator::new(domain, res, psi)?;
    let values = b.boundary_values(f)?;
    let scale = max_norm(&values).max(f64::MIN_POSITIVE);
    let mut r = VerificationReport::new("cauchy-formula", tolerance);
    r.param("f", f.label())
        .param("q", q)
        .param("domain", domain)
        .param("resolution", res)
        .param("boundary_floor", b.floor())
        .param("scale", scale);
    for (i, &x) in interior.iter().enumerate() {
        if !domain.contains(x) {
            return Err(Error::InvalidArgument(format!("{x} is not inside the domain")));
        }
        let v = b.reconstruct_from(&values, q, x)?;
        r.residual(format!("interior_{i}"), (v - f.eval(x)?).norm() / scale);
    }
    for (i, &x) in exterior.iter().enumerate() {
        if domain.contains(x) {
            return Err(Error::InvalidArgument(format!("{x} is not outside the domain")));
        }
        let v = b.reconstruct_from(&values, q, x)?;
        r.residual(format!("exterior_{i}"), v.norm() / scale);
    }
    Ok(r.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{exp_modulate, fueter_variable};

    #[test]
    fn constant_is_reproduced_at_center() {
        let psi = StructuralSet::cimmino();
        let d = Domain4::unit_ball();
        let one = QuaternionField::constant(Quaternion::ONE);
        let res = Resolution::default();
        let v = cauchy_reconstruct(&one, Quaternion::ZERO, &psi, &d, Quaternion::ZERO, &res).unwrap();
        assert!(v.max_abs_diff(Quaternion::ONE) < 1e-8, "{v}");
        let v = cauchy_reconstruct(&one, Quaternion::ZERO, &psi, &d, Quaternion::real(1.5), &res).unwrap();
        assert!(v.norm() < 1e-6, "{v}");
    }

    #[test]
    fn near_boundary_point_is_rejected() {
        let psi = StructuralSet::cimmino();
        let d = Domain4::unit_ball();
        let one = QuaternionField::constant(Quaternion::ONE);
        let err = cauchy_reconstruct(&one, Quaternion::ZERO, &psi, &d, Quaternion::real(0.9), &Resolution::default());
        assert!(matches!(err, Err(Error::TooCloseToBoundary { .. })));
    }

    #[test]
    fn trivial_stokes() {
        let psi = StructuralSet::cimmino();
        let one = QuaternionField::constant(Quaternion::ONE);
        let r = stokes_check(&one, &one, Quaternion::ZERO, &psi, &Domain4::unit_ball(), &Resolution::default(), 1e-10)
            .unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn double_weight_matches_volume_of_q_f() {
        let psi = StructuralSet::cimmino();
        let q = Quaternion::new(0.3, -0.2, 0.4, 0.1);
        let f = exp_modulate(&fueter_variable(1, &psi).unwrap(), q, &psi);
        let d = Domain4::unit_ball();
        let res = Resolution::default();
        let b = BoundaryIntegrator::new(&d, &res, &psi).unwrap();
        let values = b.boundary_values(&f).unwrap();
        let single = b.theorem_integral(&values, q, TheoremWeight::Single);
        let double = b.theorem_integral(&values, q, TheoremWeight::Double);
        assert!(single.norm() < 1e-10, "{single}");
        let vol = d.volume_quadrature(&res).unwrap().weighted(q, &psi);
        let expected: Quaternion = vol
            .nodes
            .iter()
            .zip(&vol.weights)
            .map(|(&x, &w)| q * f.eval(x).unwrap() * w)
            .sum();
        assert!(double.max_abs_diff(expected) < 1e-10, "{double} vs {expected}");
        assert!(double.norm() > 1e-2);
    }
}
