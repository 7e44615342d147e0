//! Weighted quaternionic inner products, finite-span Bergman kernels and the
//! isometries between weighted solution spaces.
//!
//! Spaces are right-linear: a span element is `Σ φ_j c_j` and the inner
//! product is `<f, g> = ∫ conj(f) g w dμ`. The kernel of the span is
//! `B(x, ξ) = Σ φ_j(x) (G^+)_{jk} conj(φ_k(ξ))` with `G_{jk} = <φ_j, φ_k>`.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::QuaternionField;
use crate::geometry::{Domain4, Resolution, VolumeQuadrature};
use crate::moebius::MoebiusMap;
use crate::numeric::pairwise_sum;
use crate::quat::{pairing, Quaternion, StructuralSet};
use crate::report::VerificationReport;

/// Relative eigenvalue cutoff of the Gram pseudo-inverse.
pub const GRAM_CUTOFF: f64 = 1e-10;

/// Weight function of an inner product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Unweighted,
    /// `e^{2<q,x>_ψ}`.
    LambdaQ { q: Quaternion },
    /// `e^{2<r-q, T^{-1}(y)>_ψ}`.
    Gamma { map: MoebiusMap, r: Quaternion, q: Quaternion },
    /// `1 / |c x V^{-1} + d V^{-1}|^2` (1 for affine maps).
    Rho { map: MoebiusMap },
}

impl Weight {
    pub fn density(&self, x: Quaternion, psi: &StructuralSet) -> Result<f64> {
        match self {
            Weight::Unweighted => Ok(1.0),
            Weight::LambdaQ { q } => Ok((2.0 * pairing(*q, x, psi)).exp()),
            Weight::Gamma { map, r, q } => map.gamma(*r, *q, x, psi),
            Weight::Rho { map } => map.rho(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProductSpec {
    pub weight: Weight,
    pub domain: Domain4,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub psi: StructuralSet,
}

impl InnerProductSpec {
    pub fn new(weight: Weight, domain: Domain4, resolution: Resolution) -> Self {
        Self {
            weight,
            domain,
            resolution,
            psi: StructuralSet::default(),
        }
    }
}

/// An inner product realized on a fixed weighted volume rule.
#[derive(Clone, Debug)]
pub struct InnerProduct {
    spec: InnerProductSpec,
    quad: VolumeQuadrature,
}

impl InnerProduct {
    pub fn new(spec: InnerProductSpec) -> Result<Self> {
        let base = spec.domain.volume_quadrature(&spec.resolution)?;
        let mut weights = Vec::with_capacity(base.len());
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            let rho = spec.weight.density(x, &spec.psi)?;
            if !(rho.is_finite() && rho > 0.0) {
                return Err(Error::InvalidArgument(format!("weight {rho} at {x} is not positive")));
            }
            weights.push(w * rho);
        }
        Ok(Self {
            quad: VolumeQuadrature {
                nodes: base.nodes,
                weights,
            },
            spec,
        })
    }

    pub fn spec(&self) -> &InnerProductSpec {
        &self.spec
    }

    pub fn quadrature(&self) -> &VolumeQuadrature {
        &self.quad
    }

    pub fn values(&self, f: &QuaternionField) -> Result<Vec<Quaternion>> {
        self.quad.nodes.iter().map(|&x| f.eval(x)).collect()
    }

    /// `Σ_i conj(f_i) g_i w_i` for node values.
    pub fn from_values(&self, f: &[Quaternion], g: &[Quaternion]) -> Quaternion {
        let terms: Vec<Quaternion> = (0..f.len())
            .map(|i| f[i].conj() * g[i] * self.quad.weights[i])
            .collect();
        pairwise_sum(&terms)
    }

    pub fn inner(&self, f: &QuaternionField, g: &QuaternionField) -> Result<Quaternion> {
        Ok(self.from_values(&self.values(f)?, &self.values(g)?))
    }

    pub fn norm_sqr(&self, f: &QuaternionField) -> Result<f64> {
        let v = self.values(f)?;
        Ok(pairwise_sum(
            &v.iter()
                .zip(&self.quad.weights)
                .map(|(f, w)| f.norm_sqr() * w)
                .collect::<Vec<_>>(),
        ))
    }

    /// The ψ-coordinates of `<f, g>`.
    pub fn cb_form(&self, f: &QuaternionField, g: &QuaternionField) -> Result<CBForm> {
        Ok(CBForm(self.spec.psi.coords(self.inner(f, g)?).0))
    }
}

pub fn inner_product(f: &QuaternionField, g: &QuaternionField, spec: &InnerProductSpec) -> Result<Quaternion> {
    InnerProduct::new(spec.clone())?.inner(f, g)
}

pub fn cb_form(f: &QuaternionField, g: &QuaternionField, spec: &InnerProductSpec) -> Result<CBForm> {
    InnerProduct::new(spec.clone())?.cb_form(f, g)
}

/// The `R^4`-valued bilinear form of the componentwise spaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CBForm(pub [f64; 4]);

impl CBForm {
    /// First component; the squared norm when both arguments coincide.
    pub fn pi0(&self) -> f64 {
        self.0[0]
    }
}

/// Real `4×4` matrix of `v ↦ q v`.
fn left_matrix(q: Quaternion) -> [[f64; 4]; 4] {
    let [a, b, c, d] = q.to_array();
    [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]]
}

/// Hermitian quaternionic matrix pseudo-inverse through the real `4n × 4n`
/// left-multiplication representation. Returns the inverse (row-major), the
/// real spectrum in descending order, and the quaternionic rank.
pub fn hermitian_pinv(g: &[Quaternion], n: usize, cutoff: f64) -> (Vec<Quaternion>, Vec<f64>, usize) {
    let mut m = DMatrix::<f64>::zeros(4 * n, 4 * n);
    for j in 0..n {
        for k in 0..n {
            let l = left_matrix(g[j * n + k]);
            for (a, row) in l.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    m[(4 * j + a, 4 * k + b)] = v;
                }
            }
        }
    }
    // symmetrize rounding noise
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut pinv = DMatrix::<f64>::zeros(4 * n, 4 * n);
    let mut kept = 0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff * lmax && lambda > 0.0 {
            let v = eig.eigenvectors.column(i);
            pinv += v * v.transpose() / lambda;
            kept += 1;
        }
    }
    let mut out = vec![Quaternion::ZERO; n * n];
    for j in 0..n {
        for k in 0..n {
            out[j * n + k] = Quaternion::new(
                pinv[(4 * j, 4 * k)],
                pinv[(4 * j + 1, 4 * k)],
                pinv[(4 * j + 2, 4 * k)],
                pinv[(4 * j + 3, 4 * k)],
            );
        }
    }
    let mut spectrum: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    (out, spectrum, kept / 4)
}

/// Bergman kernel of the span of a dictionary in a weighted space.
#[derive(Clone, Debug)]
pub struct SubspaceKernel {
    entries: Vec<QuaternionField>,
    ip: InnerProduct,
    values: Vec<Vec<Quaternion>>,
    gram: Vec<Quaternion>,
    gram_pinv: Vec<Quaternion>,
    spectrum: Vec<f64>,
    rank: usize,
}

impl SubspaceKernel {
    pub fn new(entries: &[QuaternionField], ip: InnerProduct) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty dictionary".into()));
        }
        let values: Vec<Vec<Quaternion>> = entries.iter().map(|f| ip.values(f)).collect::<Result<_>>()?;
        let n = entries.len();
        let mut gram = vec![Quaternion::ZERO; n * n];
        for j in 0..n {
            for k in j..n {
                let v = ip.from_values(&values[j], &values[k]);
                gram[j * n + k] = v;
                gram[k * n + j] = v.conj();
            }
        }
        let (gram_pinv, spectrum, rank) = hermitian_pinv(&gram, n, GRAM_CUTOFF);
        Ok(Self {
            entries: entries.to_vec(),
            ip,
            values,
            gram,
            gram_pinv,
            spectrum,
            rank,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[QuaternionField] {
        &self.entries
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn gram(&self) -> &[Quaternion] {
        &self.gram
    }

    pub fn gram_pinv(&self) -> &[Quaternion] {
        &self.gram_pinv
    }

    /// Eigenvalues of the real representation, each with multiplicity 4.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.len()
    }

    fn entry_values(&self, x: Quaternion) -> Result<Vec<Quaternion>> {
        self.entries.iter().map(|f| f.eval(x)).collect()
    }

    pub fn eval(&self, x: Quaternion, xi: Quaternion) -> Result<Quaternion> {
        let n = self.len();
        let (fx, fxi) = (self.entry_values(x)?, self.entry_values(xi)?);
        let mut terms = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                terms.push(fx[j] * self.gram_pinv[j * n + k] * fxi[k].conj());
            }
        }
        Ok(pairwise_sum(&terms))
    }

    /// Right coefficients `c = G^+ b` with `b_k = <φ_k, g>`.
    pub fn coefficients_from_values(&self, g: &[Quaternion]) -> Vec<Quaternion> {
        let n = self.len();
        let b: Vec<Quaternion> = self.values.iter().map(|phi| self.ip.from_values(phi, g)).collect();
        (0..n)
            .map(|j| (0..n).map(|k| self.gram_pinv[j * n + k] * b[k]).sum())
            .collect()
    }

    pub fn coefficients(&self, g: &QuaternionField) -> Result<Vec<Quaternion>> {
        Ok(self.coefficients_from_values(&self.ip.values(g)?))
    }

    /// The projection `Σ φ_j c_j` as a field.
    pub fn projection(&self, g: &QuaternionField) -> Result<QuaternionField> {
        let c = self.coefficients(g)?;
        Ok(QuaternionField::right_combination(
            format!("P[{}]", g.label()),
            &self.entries,
            &c,
        ))
    }

    /// `∫ B(x, ζ) g(ζ) w(ζ) dμ_ζ`.
    pub fn project(&self, g: &QuaternionField, x: Quaternion) -> Result<Quaternion> {
        let c = self.coefficients(g)?;
        let fx = self.entry_values(x)?;
        Ok((0..self.len()).map(|j| fx[j] * c[j]).sum())
    }
}

pub fn subspace_kernel(entries: &[QuaternionField], spec: &InnerProductSpec) -> Result<SubspaceKernel> {
    SubspaceKernel::new(entries, InnerProduct::new(spec.clone())?)
}

pub fn kernel_eval(k: &SubspaceKernel, x: Quaternion, xi: Quaternion) -> Result<Quaternion> {
    k.eval(x, xi)
}

pub fn bergman_project(k: &SubspaceKernel, g: &QuaternionField, x: Quaternion) -> Result<Quaternion> {
    k.project(g, x)
}

/// `x ↦ e^{<q-r,x>_ψ} f(x)`, an isometry from the `λ_q`- to the `λ_r`-weighted space.
pub fn s_isometry(f: &QuaternionField, q: Quaternion, r: Quaternion, psi: &StructuralSet) -> QuaternionField {
    let (f2, psi) = (f.clone(), *psi);
    QuaternionField::new(format!("S[{}]", f.label()), move |x| {
        Ok(f2.eval(x)? * pairing(q - r, x, &psi).exp())
    })
}

/// `max_{j, x} |∫ B(x, ·) φ_j w − φ_j(x)| / (1 + |φ_j(x)|)` with the integral on
/// `check`, which should be a rule independent of the one used for the Gram
/// matrix.
pub fn reproduction_check(
    k: &SubspaceKernel,
    check: &InnerProduct,
    points: &[Quaternion],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new("bergman-kernel", tolerance);
    rep.param("entries", k.entries.iter().map(|e| e.label().to_string()).collect::<Vec<_>>())
        .param("rank", k.rank)
        .param("gram_spectrum", &k.spectrum)
        .param("gram_resolution", k.ip.spec.resolution)
        .param("check_resolution", check.spec.resolution);
    let nodes = &check.quad.nodes;
    let phis: Vec<Vec<Quaternion>> = k.entries.iter().map(|f| check.values(f)).collect::<Result<_>>()?;
    for (p, &x) in points.iter().enumerate() {
        // B(x, ζ) at the check nodes
        let bx: Vec<Quaternion> = nodes.iter().map(|&z| k.eval(x, z)).collect::<Result<_>>()?;
        for (j, phi) in phis.iter().enumerate() {
            let terms: Vec<Quaternion> = (0..nodes.len())
                .map(|i| bx[i] * phi[i] * check.quad.weights[i])
                .collect();
            let v = pairwise_sum(&terms);
            let exact = k.entries[j].eval(x)?;
            rep.residual(format!("point_{p}_entry_{j}"), (v - exact).norm() / (1.0 + exact.norm()));
        }
    }
    Ok(rep.timed(start))
}

/// Transformation law relating two subspace kernels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelRelation {
    /// `B_r(x, ξ) = e^{<q-r, x+ξ>_ψ} B_q(x, ξ)`; the first kernel is the `λ_q` one.
    WeightShift { q: Quaternion, r: Quaternion },
    /// `B_Ξ(x, ξ) = e^{<r-q, x+ξ>_ψ} C_T(x) B_Ω(T x, T ξ) conj(C_T(ξ))`; the
    /// first kernel lives on `Ω`, the second on `Ξ`.
    Conformal { map: MoebiusMap, r: Quaternion, q: Quaternion },
}

impl KernelRelation {
    /// Predicted second kernel from the first.
    pub fn predict(&self, first: &SubspaceKernel, x: Quaternion, xi: Quaternion, psi: &StructuralSet) -> Result<Quaternion> {
        match self {
            KernelRelation::WeightShift { q, r } => {
                Ok(first.eval(x, xi)? * pairing(*q - *r, x + xi, psi).exp())
            }
            KernelRelation::Conformal { map, r, q } => {
                let inner = first.eval(map.apply(x)?, map.apply(xi)?)?;
                let e = pairing(*r - *q, x + xi, psi).exp();
                Ok(map.coef_c(x)? * inner * map.coef_c(xi)?.conj() * e)
            }
        }
    }
}

/// Pointwise comparison of `second(x, ξ)` with the relation's prediction from
/// `first`, relative to the largest predicted value.
pub fn kernel_relation_checks(
    first: &SubspaceKernel,
    second: &SubspaceKernel,
    relation: &KernelRelation,
    pairs: &[(Quaternion, Quaternion)],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if first.rank != second.rank {
        return Err(Error::RankMismatch(first.rank, second.rank));
    }
    let psi = second.ip.spec.psi;
    let mut predicted = Vec::with_capacity(pairs.len());
    let mut actual = Vec::with_capacity(pairs.len());
    for &(x, xi) in pairs {
        predicted.push(relation.predict(first, x, xi, &psi)?);
        actual.push(second.eval(x, xi)?);
    }
    let scale = predicted.iter().map(|p| p.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut rep = VerificationReport::new("bergman-relations", tolerance);
    rep.param("relation", relation)
        .param("rank", first.rank)
        .param("scale", scale);
    for (i, (p, a)) in predicted.iter().zip(&actual).enumerate() {
        rep.residual(format!("pair_{i}"), (*p - *a).norm() / scale);
    }
    Ok(rep.timed(start))
}

/// Entrywise weighted and unweighted norms on a bounded domain. Residuals are
/// `max(0, ‖f‖_λ - ‖f‖) / ‖f‖` when the domain lies in `{<q,x> < 0}` and the
/// finiteness indicator otherwise.
pub fn inclusion_check(
    entries: &[QuaternionField],
    q: Quaternion,
    domain: &Domain4,
    resolution: &Resolution,
    psi: &StructuralSet,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let spec = |w| InnerProductSpec {
        weight: w,
        domain: domain.clone(),
        resolution: *resolution,
        psi: *psi,
    };
    let plain = InnerProduct::new(spec(Weight::Unweighted))?;
    let weighted = InnerProduct::new(spec(Weight::LambdaQ { q }))?;
    let negative = plain.quad.nodes.iter().all(|&x| pairing(q, x, psi) < 0.0) && corners_negative(domain, q, psi);
    let mut rep = VerificationReport::new("inclusion", tolerance);
    rep.param("q", q).param("domain", domain).param("half_space", negative);
    let mut norms = Vec::new();
    for (j, f) in entries.iter().enumerate() {
        let a = plain.norm_sqr(f)?.sqrt();
        let b = weighted.norm_sqr(f)?.sqrt();
        norms.push((f.label().to_string(), a, b));
        let finite = if a.is_finite() && b.is_finite() { 0.0 } else { f64::INFINITY };
        rep.residual(format!("finite_{j}"), finite);
        if negative {
            rep.residual(format!("dominated_{j}"), (b - a).max(0.0) / a.max(f64::MIN_POSITIVE));
        }
        if q == Quaternion::ZERO {
            rep.residual(format!("equal_{j}"), (b - a).abs() / a.max(f64::MIN_POSITIVE));
        }
    }
    rep.param("norms", norms);
    Ok(rep.timed(start))
}

fn corners_negative(domain: &Domain4, q: Quaternion, psi: &StructuralSet) -> bool {
    match domain {
        Domain4::Box { lo, hi } => (0..16).all(|m| {
            let c: [f64; 4] = std::array::from_fn(|k| if m >> k & 1 == 1 { hi[k] } else { lo[k] });
            pairing(q, Quaternion::from(c), psi) <= 0.0
        }),
        Domain4::Ball { center, radius } => pairing(q, *center, psi) + q.norm() * radius <= 0.0,
    }
}
