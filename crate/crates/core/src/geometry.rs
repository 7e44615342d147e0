//! Domains in R^4, boundary and volume quadrature, and the weighted measures
//! `dλ^ψ_q = e^{2<q,x>_ψ} dμ` and `ν^ψ_q = e^{2<q,x>_ψ} σ^ψ`.
//!
//! The quaternionic surface element is realised as `σ^ψ = s · n_ψ dS` where
//! `n_ψ = Σ n_k ψ_k` is the outward unit normal assembled from its
//! ψ-coordinates (which is the normal quaternion itself) and `s` is
//! [`SURFACE_ORIENTATION_SIGN`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, GaussLegendre};
use crate::quat::{pairing, Quaternion, StructuralSet};

/// Global orientation factor of `σ^ψ`. Pinned by the requirement that the
/// Cauchy formula reproduces `f ≡ 1` as `+1` inside the domain; the same
/// value applies to every structural set.
pub const SURFACE_ORIENTATION_SIGN: f64 = 1.0;

/// A bounded domain with an explicitly parameterised boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain4 {
    Ball { center: Quaternion, radius: f64 },
    Box { lo: [f64; 4], hi: [f64; 4] },
}

impl Domain4 {
    pub fn ball(center: Quaternion, radius: f64) -> Result<Self> {
        let d = Domain4::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_ball() -> Self {
        Domain4::Ball {
            center: Quaternion::ZERO,
            radius: 1.0,
        }
    }

    pub fn cuboid(lo: [f64; 4], hi: [f64; 4]) -> Result<Self> {
        let d = Domain4::Box { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_box() -> Self {
        Domain4::Box {
            lo: [0.0; 4],
            hi: [1.0; 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain4::Ball { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !center.is_finite() {
                    return Err(Error::InvalidDomain(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
            }
            Domain4::Box { lo, hi } => {
                for k in 0..4 {
                    if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                        return Err(Error::InvalidDomain(format!(
                            "box needs lo < hi on every axis, axis {k}: {} !< {}",
                            lo[k], hi[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Open-set membership.
    pub fn contains(&self, x: Quaternion) -> bool {
        match self {
            Domain4::Ball { center, radius } => (x - *center).norm() < *radius,
            Domain4::Box { lo, hi } => {
                let c = x.to_array();
                (0..4).all(|k| lo[k] < c[k] && c[k] < hi[k])
            }
        }
    }

    /// Euclidean distance from `x` to the boundary.
    pub fn boundary_distance(&self, x: Quaternion) -> f64 {
        match self {
            Domain4::Ball { center, radius } => ((x - *center).norm() - radius).abs(),
            Domain4::Box { lo, hi } => {
                let c = x.to_array();
                if self.contains(x) {
                    (0..4)
                        .map(|k| (c[k] - lo[k]).min(hi[k] - c[k]))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    (0..4)
                        .map(|k| {
                            let d = (lo[k] - c[k]).max(0.0).max(c[k] - hi[k]);
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt()
                }
            }
        }
    }

    /// Characteristic length: the radius of a ball, half the shortest edge
    /// of a box.
    pub fn scale(&self) -> f64 {
        match self {
            Domain4::Ball { radius, .. } => *radius,
            Domain4::Box { lo, hi } => {
                0.5 * (0..4).map(|k| hi[k] - lo[k]).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn center(&self) -> Quaternion {
        match self {
            Domain4::Ball { center, .. } => *center,
            Domain4::Box { lo, hi } => {
                Quaternion::from([0, 1, 2, 3].map(|k| 0.5 * (lo[k] + hi[k])))
            }
        }
    }

    /// Exact 3-volume of the boundary.
    pub fn surface_measure(&self) -> f64 {
        match self {
            Domain4::Ball { radius, .. } => 2.0 * PI * PI * radius.powi(3),
            Domain4::Box { lo, hi } => {
                let e: Vec<f64> = (0..4).map(|k| hi[k] - lo[k]).collect();
                (0..4)
                    .map(|k| 2.0 * (0..4).filter(|&j| j != k).map(|j| e[j]).product::<f64>())
                    .sum()
            }
        }
    }

    /// Exact 4-volume.
    pub fn volume(&self) -> f64 {
        match self {
            Domain4::Ball { radius, .. } => 0.5 * PI * PI * radius.powi(4),
            Domain4::Box { lo, hi } => (0..4).map(|k| hi[k] - lo[k]).product(),
        }
    }

    pub fn surface_quadrature(&self, res: &Resolution) -> Result<SurfaceQuadrature> {
        match self {
            Domain4::Ball { center, radius } => {
                let [a, b, c] = res.sphere;
                sphere_quadrature(*center, *radius, a, b, c)
            }
            Domain4::Box { lo, hi } => box_quadrature(*lo, *hi, res.box_per_axis),
        }
    }

    pub fn volume_quadrature(&self, res: &Resolution) -> Result<VolumeQuadrature> {
        volume_quadrature(self, res)
    }
}

/// Quadrature resolutions shared by surface and volume rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// Nodes in the two polar angles and the periodic angle of S^3.
    pub sphere: [usize; 3],
    /// Radial Gauss nodes of the ball volume rule.
    pub radial: usize,
    /// Gauss nodes per axis on boxes (facets and volume).
    pub box_per_axis: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            sphere: [24, 24, 48],
            radial: 24,
            box_per_axis: 12,
        }
    }
}

impl Resolution {
    /// Every resolution multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            sphere: self.sphere.map(|n| n * factor),
            radial: self.radial * factor,
            box_per_axis: self.box_per_axis * factor,
        }
    }
}

/// Nodes, outward unit normals and positive 3-volume weights on a boundary.
#[derive(Clone, Debug)]
pub struct SurfaceQuadrature {
    pub nodes: Vec<Quaternion>,
    pub normals: Vec<Quaternion>,
    pub weights: Vec<f64>,
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// `Σ w_i g(x_i)` with pairwise summation.
    pub fn integrate_scalar(&self, g: impl Fn(Quaternion) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// Multiplies each weight by `e^{2<q,x>_ψ}` and builds the quaternionic
    /// element `ν^ψ_q = s · e^{2<q,x>_ψ} n_ψ dS` at every node.
    pub fn weighted(&self, q: Quaternion, psi: &StructuralSet) -> WeightedSurface {
        let mut weights = Vec::with_capacity(self.len());
        let mut elements = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let w = self.weights[i] * (2.0 * pairing(q, self.nodes[i], psi)).exp();
            weights.push(w);
            elements.push(surface_element(self.normals[i], psi) * w);
        }
        WeightedSurface {
            nodes: self.nodes.clone(),
            weights,
            elements,
        }
    }
}

/// The quaternionic normal `s · Σ n_k ψ_k` with `n_k` the ψ-coordinates of `n`.
pub fn surface_element(normal: Quaternion, psi: &StructuralSet) -> Quaternion {
    psi.compose(psi.coords(normal)) * SURFACE_ORIENTATION_SIGN
}

/// Boundary nodes carrying the weighted scalar measure and `ν^ψ_q`.
#[derive(Clone, Debug)]
pub struct WeightedSurface {
    pub nodes: Vec<Quaternion>,
    pub weights: Vec<f64>,
    pub elements: Vec<Quaternion>,
}

/// Interior nodes and positive 4-volume weights.
#[derive(Clone, Debug)]
pub struct VolumeQuadrature {
    pub nodes: Vec<Quaternion>,
    pub weights: Vec<f64>,
}

impl VolumeQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate_scalar(&self, g: impl Fn(Quaternion) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// Copy with weights multiplied by `e^{2<q,x>_ψ}` (the measure `dλ^ψ_q`).
    pub fn weighted(&self, q: Quaternion, psi: &StructuralSet) -> VolumeQuadrature {
        self.reweighted(|x| (2.0 * pairing(q, x, psi)).exp())
    }

    /// Copy with weights multiplied by an arbitrary positive density.
    pub fn reweighted(&self, density: impl Fn(Quaternion) -> f64) -> VolumeQuadrature {
        VolumeQuadrature {
            nodes: self.nodes.clone(),
            weights: self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * density(x))
                .collect(),
        }
    }
}

fn check_min(name: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidResolution(format!("{name} must be >= 2, got {n}")));
    }
    Ok(())
}

/// Hyperspherical tensor rule on the sphere `|x - center| = radius`.
///
/// With `x = c + R(cos χ, sin χ cos θ, sin χ sin θ cos φ, sin χ sin θ sin φ)`
/// and `dS = R^3 sin^2 χ sin θ dχ dθ dφ`, the rule is Gauss-Legendre in `χ`
/// and `θ` on `[0, π]` (the sine factors go into the weights) and the
/// trapezoidal rule in the periodic angle `φ`.
pub fn sphere_quadrature(
    center: Quaternion,
    radius: f64,
    n_chi: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<SurfaceQuadrature> {
    check_min("n_chi", n_chi)?;
    check_min("n_theta", n_theta)?;
    check_min("n_phi", n_phi)?;
    Domain4::ball(center, radius)?;
    let (chi, wchi) = GaussLegendre::new(n_chi).on_interval(0.0, PI);
    let (theta, wtheta) = GaussLegendre::new(n_theta).on_interval(0.0, PI);
    let dphi = 2.0 * PI / n_phi as f64;
    let r3 = radius.powi(3);

    let n = n_chi * n_theta * n_phi;
    let mut nodes = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &c) in chi.iter().enumerate() {
        let (sc, cc) = c.sin_cos();
        for (j, &t) in theta.iter().enumerate() {
            let (st, ct) = t.sin_cos();
            let w = r3 * wchi[i] * sc * sc * wtheta[j] * st * dphi;
            for k in 0..n_phi {
                let (sp, cp) = (k as f64 * dphi).sin_cos();
                let u = Quaternion::new(cc, sc * ct, sc * st * cp, sc * st * sp);
                nodes.push(center + u * radius);
                normals.push(u);
                weights.push(w);
            }
        }
    }
    Ok(SurfaceQuadrature {
        nodes,
        normals,
        weights,
    })
}

/// Tensor Gauss-Legendre rule on the eight 3-dimensional facets of a box.
pub fn box_quadrature(lo: [f64; 4], hi: [f64; 4], n: usize) -> Result<SurfaceQuadrature> {
    check_min("box_per_axis", n)?;
    Domain4::cuboid(lo, hi)?;
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..4)
        .map(|k| GaussLegendre::new(n).on_interval(lo[k], hi[k]))
        .collect();
    let mut nodes = Vec::with_capacity(8 * n * n * n);
    let mut normals = Vec::with_capacity(8 * n * n * n);
    let mut weights = Vec::with_capacity(8 * n * n * n);
    for axis in 0..4 {
        let free: Vec<usize> = (0..4).filter(|&j| j != axis).collect();
        for (value, sign) in [(lo[axis], -1.0), (hi[axis], 1.0)] {
            let normal = Quaternion::basis(axis) * sign;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut p = [0.0; 4];
                        p[axis] = value;
                        p[free[0]] = rules[free[0]].0[a];
                        p[free[1]] = rules[free[1]].0[b];
                        p[free[2]] = rules[free[2]].0[c];
                        nodes.push(Quaternion::from(p));
                        normals.push(normal);
                        weights.push(
                            rules[free[0]].1[a] * rules[free[1]].1[b] * rules[free[2]].1[c],
                        );
                    }
                }
            }
        }
    }
    Ok(SurfaceQuadrature {
        nodes,
        normals,
        weights,
    })
}

/// Tensor Gauss-Legendre over a box, or radial Gauss (with the `ρ^3`
/// Jacobian) times the unit-sphere rule for a ball.
pub fn volume_quadrature(domain: &Domain4, res: &Resolution) -> Result<VolumeQuadrature> {
    domain.validate()?;
    match domain {
        Domain4::Ball { center, radius } => {
            check_min("radial", res.radial)?;
            let [a, b, c] = res.sphere;
            let unit = sphere_quadrature(Quaternion::ZERO, 1.0, a, b, c)?;
            let (rho, wrho) = GaussLegendre::new(res.radial).on_interval(0.0, *radius);
            let mut nodes = Vec::with_capacity(rho.len() * unit.len());
            let mut weights = Vec::with_capacity(rho.len() * unit.len());
            for (r, wr) in rho.iter().zip(&wrho) {
                let jac = wr * r.powi(3);
                for (u, wu) in unit.normals.iter().zip(&unit.weights) {
                    nodes.push(*center + *u * *r);
                    weights.push(jac * wu);
                }
            }
            Ok(VolumeQuadrature { nodes, weights })
        }
        Domain4::Box { lo, hi } => {
            let n = res.box_per_axis;
            check_min("box_per_axis", n)?;
            let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..4)
                .map(|k| GaussLegendre::new(n).on_interval(lo[k], hi[k]))
                .collect();
            let mut nodes = Vec::with_capacity(n.pow(4));
            let mut weights = Vec::with_capacity(n.pow(4));
            for i0 in 0..n {
                for i1 in 0..n {
                    for i2 in 0..n {
                        for i3 in 0..n {
                            nodes.push(Quaternion::new(
                                rules[0].0[i0],
                                rules[1].0[i1],
                                rules[2].0[i2],
                                rules[3].0[i3],
                            ));
                            weights.push(
                                rules[0].1[i0] * rules[1].1[i1] * rules[2].1[i2] * rules[3].1[i3],
                            );
                        }
                    }
                }
            }
            Ok(VolumeQuadrature { nodes, weights })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_area_and_symmetry() {
        let s = sphere_quadrature(Quaternion::ZERO, 1.0, 24, 24, 48).unwrap();
        assert!((s.total_weight() - 2.0 * PI * PI).abs() < 1e-10);
        for k in 0..4 {
            let m = s.integrate_scalar(|x| x.to_array()[k]);
            assert!(m.abs() < 1e-10, "moment {k} = {m}");
        }
        let fine = sphere_quadrature(Quaternion::ZERO, 1.0, 48, 48, 96).unwrap();
        assert!((fine.total_weight() - s.total_weight()).abs() < 1e-12);
    }

    #[test]
    fn sphere_second_moments() {
        // ∫_{S^3} x_k^2 dS = 2π^2 / 4
        let s = sphere_quadrature(Quaternion::ZERO, 1.0, 16, 16, 32).unwrap();
        for k in 0..4 {
            let m = s.integrate_scalar(|x| x.to_array()[k].powi(2));
            assert!((m - PI * PI / 2.0).abs() < 1e-11, "k={k}: {m}");
        }
    }

    #[test]
    fn ball_normals_point_outward() {
        let c = Quaternion::new(0.3, -0.1, 0.2, 0.5);
        let s = sphere_quadrature(c, 2.0, 6, 6, 12).unwrap();
        for (x, n) in s.nodes.iter().zip(&s.normals) {
            assert!(((*x - c).dot(*n) - 2.0).abs() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-14);
            assert!(((*x - c) - *n * 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn box_facets() {
        let d = Domain4::unit_box();
        let s = d.surface_quadrature(&Resolution::default()).unwrap();
        assert!((s.total_weight() - 8.0).abs() < 1e-13);
        for (x, n) in s.nodes.iter().zip(&s.normals) {
            if (x.q0 - 1.0).abs() < 1e-15 {
                assert_eq!(*n, Quaternion::ONE);
            }
        }
        let terms: Vec<Quaternion> = s.normals.iter().zip(&s.weights).map(|(n, w)| *n * *w).collect();
        assert!(pairwise_sum(&terms).norm() < 1e-13);
        let d = Domain4::cuboid([0.0, -1.0, 0.0, 0.0], [1.0, 1.0, 3.0, 0.5]).unwrap();
        let s = d.surface_quadrature(&Resolution::default()).unwrap();
        assert!((s.total_weight() - d.surface_measure()).abs() < 1e-12);
    }

    #[test]
    fn volumes() {
        let res = Resolution::default();
        let v = volume_quadrature(&Domain4::unit_ball(), &res).unwrap();
        assert!((v.total_weight() - PI * PI / 2.0).abs() < 1e-10);
        let v = volume_quadrature(&Domain4::unit_box(), &res).unwrap();
        assert!((v.total_weight() - 1.0).abs() < 1e-13);
        let psi = StructuralSet::cimmino();
        let w = v.weighted(Quaternion::ZERO, &psi);
        assert_eq!(w.weights, v.weights);
    }

    #[test]
    fn weighted_box_volume_for_real_q() {
        let psi = StructuralSet::cimmino();
        let v = volume_quadrature(&Domain4::unit_box(), &Resolution::default()).unwrap();
        let w = v.weighted(Quaternion::ONE, &psi);
        let expect = (1f64.exp().powi(2) - 1.0) / 2.0;
        assert!((w.total_weight() - expect).abs() < 1e-12);
        assert!((expect - 3.194528049465325).abs() < 1e-12);
    }

    #[test]
    fn closed_surface_element_sums_to_zero() {
        let psi = StructuralSet::cimmino();
        for d in [Domain4::unit_ball(), Domain4::unit_box()] {
            let s = d.surface_quadrature(&Resolution::default()).unwrap();
            let nu = s.weighted(Quaternion::ZERO, &psi);
            assert!(pairwise_sum(&nu.elements).norm() < 1e-12);
            assert_eq!(nu.weights, s.weights);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(Domain4::ball(Quaternion::ZERO, 0.0).is_err());
        assert!(Domain4::cuboid([0.0; 4], [1.0, 1.0, 0.0, 1.0]).is_err());
        assert!(sphere_quadrature(Quaternion::ZERO, 1.0, 1, 4, 4).is_err());
        assert!(box_quadrature([0.0; 4], [1.0; 4], 1).is_err());
    }

    #[test]
    fn boundary_distance() {
        let b = Domain4::unit_ball();
        assert!((b.boundary_distance(Quaternion::real(0.25)) - 0.75).abs() < 1e-15);
        assert!((b.boundary_distance(Quaternion::real(1.5)) - 0.5).abs() < 1e-15);
        let bx = Domain4::unit_box();
        assert!((bx.boundary_distance(Quaternion::new(0.5, 0.5, 0.9, 0.5)) - 0.1).abs() < 1e-15);
        assert!((bx.boundary_distance(Quaternion::new(2.0, 0.5, 0.5, 0.5)) - 1.0).abs() < 1e-15);
    }
}
