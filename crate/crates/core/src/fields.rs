//! Quaternion-valued test fields and certified dictionaries of solutions of
//! the (perturbed) ψ-Fueter equation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{cauchy_kernel_q, kernel_gradient};
use crate::operators::{apply_with, Differentiation, OperatorKind};
use crate::quat::{pairing, Quaternion, StructuralSet};
use crate::sampling::Sampler;

pub type Evaluator = Arc<dyn Fn(Quaternion) -> Result<Quaternion> + Send + Sync>;

/// Exact partial derivatives along the standard axes `1, e1, e2, e3`.
pub type PartialsFn = Arc<dyn Fn(Quaternion) -> Result<[Quaternion; 4]> + Send + Sync>;

/// The operator a field is claimed to solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annihilator {
    /// `ψD f + p f = 0` (`p = 0` is the plain ψ-Fueter operator).
    Left(Quaternion),
    /// `f Dψ + f p = 0`.
    Right(Quaternion),
    None,
}

impl Annihilator {
    pub fn tag(&self) -> &'static str {
        match self {
            Annihilator::Left(p) if *p == Quaternion::ZERO => "psi_fueter_left",
            Annihilator::Left(_) => "q_psi_fueter_left",
            Annihilator::Right(p) if *p == Quaternion::ZERO => "psi_fueter_right",
            Annihilator::Right(_) => "q_psi_fueter_right",
            Annihilator::None => "none",
        }
    }

    pub fn operator(&self) -> Option<OperatorKind> {
        match *self {
            Annihilator::Left(p) => Some(OperatorKind::left(p)),
            Annihilator::Right(p) => Some(OperatorKind::right(p)),
            Annihilator::None => None,
        }
    }
}

/// An evaluatable map `R^4 → H`, optionally with exact partial derivatives.
#[derive(Clone)]
pub struct QuaternionField {
    evaluator: Evaluator,
    partials: Option<PartialsFn>,
    label: String,
    annihilator: Annihilator,
}

impl fmt::Debug for QuaternionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuaternionField")
            .field("label", &self.label)
            .field("annihilator", &self.annihilator)
            .field("exact_partials", &self.partials.is_some())
            .finish()
    }
}

impl QuaternionField {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(Quaternion) -> Result<Quaternion> + Send + Sync + 'static,
    ) -> Self {
        Self {
            evaluator: Arc::new(eval),
            partials: None,
            label: label.into(),
            annihilator: Annihilator::None,
        }
    }

    /// Infallible evaluator convenience.
    pub fn from_fn(
        label: impl Into<String>,
        eval: impl Fn(Quaternion) -> Quaternion + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, move |x| Ok(eval(x)))
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(Quaternion) -> Result<[Quaternion; 4]> + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self
    }

    pub fn with_annihilator(mut self, a: Annihilator) -> Self {
        self.annihilator = a;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, x: Quaternion) -> Result<Quaternion> {
        (self.evaluator)(x)
    }

    pub fn partials(&self, x: Quaternion) -> Option<Result<[Quaternion; 4]>> {
        self.partials.as_ref().map(|p| p(x))
    }

    pub fn has_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn annihilator(&self) -> Annihilator {
        self.annihilator
    }

    /// Constant field.
    pub fn constant(c: Quaternion) -> Self {
        let label = if c == Quaternion::ONE {
            "1".to_string()
        } else {
            format!("const{c}")
        };
        Self::from_fn(label, move |_| c)
            .with_partials(|_| Ok([Quaternion::ZERO; 4]))
            .with_annihilator(Annihilator::Left(Quaternion::ZERO))
    }

    /// `x ↦ x`.
    pub fn identity() -> Self {
        Self::from_fn("x", |x| x).with_partials(|_| Ok([0, 1, 2, 3].map(Quaternion::basis)))
    }

    /// `x ↦ c · f(x)`.
    pub fn left_mul(&self, c: Quaternion) -> Self {
        let f = self.clone();
        let g = self.clone();
        let mut out = Self::new(format!("{c}*{}", self.label), move |x| Ok(c * f.eval(x)?));
        if self.has_partials() {
            out = out.with_partials(move |x| Ok(g.partials(x).unwrap()?.map(|d| c * d)));
        }
        out
    }

    /// `x ↦ f(x) · c`; right multiples of left solutions stay solutions.
    pub fn right_mul(&self, c: Quaternion) -> Self {
        let f = self.clone();
        let g = self.clone();
        let mut out = Self::new(format!("{}*{c}", self.label), move |x| Ok(f.eval(x)? * c))
            .with_annihilator(match self.annihilator {
                a @ Annihilator::Left(_) => a,
                _ => Annihilator::None,
            });
        if self.has_partials() {
            out = out.with_partials(move |x| Ok(g.partials(x).unwrap()?.map(|d| d * c)));
        }
        out
    }

    /// `Σ_j f_j(x) α_j`, the right-linear span element with coefficients `α`.
    pub fn right_combination(label: impl Into<String>, fields: &[QuaternionField], coeffs: &[Quaternion]) -> Self {
        assert_eq!(fields.len(), coeffs.len());
        let fs: Vec<QuaternionField> = fields.to_vec();
        let cs: Vec<Quaternion> = coeffs.to_vec();
        let exact = fs.iter().all(|f| f.has_partials());
        let common = common_left_annihilator(&fs);
        let (fs2, cs2) = (fs.clone(), cs.clone());
        let mut out = Self::new(label, move |x| {
            let mut acc = Quaternion::ZERO;
            for (f, c) in fs.iter().zip(&cs) {
                acc += f.eval(x)? * *c;
            }
            Ok(acc)
        });
        if exact {
            out = out.with_partials(move |x| {
                let mut acc = [Quaternion::ZERO; 4];
                for (f, c) in fs2.iter().zip(&cs2) {
                    let d = f.partials(x).unwrap()?;
                    for j in 0..4 {
                        acc[j] += d[j] * *c;
                    }
                }
                Ok(acc)
            });
        }
        out.with_annihilator(common)
    }
}

fn common_left_annihilator(fs: &[QuaternionField]) -> Annihilator {
    match fs.first().map(|f| f.annihilator()) {
        Some(a @ Annihilator::Left(_)) if fs.iter().all(|f| f.annihilator() == a) => a,
        _ => Annihilator::None,
    }
}

/// The Fueter variable `z_k(x) = x_k - conj(ψ_0) ψ_k x_0` with `x_k` the
/// ψ-coordinates of `x`; for `ψ_0 = 1` this is `x_k - ψ_k x_0`.
pub fn fueter_variable(k: usize, psi: &StructuralSet) -> Result<QuaternionField> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "Fueter variable index must be 1..=3, got {k}"
        )));
    }
    let psi = *psi;
    let pk = psi.get(k);
    let p0 = psi.get(0);
    let coef = p0.conj() * pk;
    let eval = move |x: Quaternion| Quaternion::real(x.dot(pk)) - coef * x.dot(p0);
    let partials = move |_x: Quaternion| {
        let a = pk.to_array();
        let b = p0.to_array();
        Ok([0, 1, 2, 3].map(|j| Quaternion::real(a[j]) - coef * b[j]))
    };
    Ok(QuaternionField::from_fn(format!("z{k}"), eval)
        .with_partials(partials)
        .with_annihilator(Annihilator::Left(Quaternion::ZERO)))
}

/// `f(x) = e^{-<q,x>_ψ} g(x)`. Maps solutions of `ψD + p` to solutions of
/// `ψD + (p + q)`; exact partials follow from the product rule.
pub fn exp_modulate(g: &QuaternionField, q: Quaternion, psi: &StructuralSet) -> QuaternionField {
    let psi = *psi;
    let annihilator = match g.annihilator() {
        Annihilator::Left(p) => Annihilator::Left(p + q),
        _ => Annihilator::None,
    };
    let label = if q == Quaternion::ZERO {
        g.label().to_string()
    } else {
        format!("exp(-<q,x>)*{}", g.label())
    };
    let ge = g.clone();
    let mut out = QuaternionField::new(label, move |x| {
        Ok(ge.eval(x)? * (-pairing(q, x, &psi)).exp())
    })
    .with_annihilator(annihilator);
    if g.has_partials() {
        let gp = g.clone();
        let qc = q.to_array();
        out = out.with_partials(move |x| {
            let e = (-pairing(q, x, &psi)).exp();
            let v = gp.eval(x)?;
            let d = gp.partials(x).unwrap()?;
            Ok([0, 1, 2, 3].map(|j| (d[j] - v * qc[j]) * e))
        });
    }
    out
}

/// `x ↦ K^ψ_q(pole - x)`, a solution of `ψD + q` away from the pole.
pub fn kernel_field(pole: Quaternion, q: Quaternion, psi: &StructuralSet) -> QuaternionField {
    let psi = *psi;
    QuaternionField::new(format!("K_q(pole{pole}-x)"), move |x| {
        cauchy_kernel_q(pole, x, q, &psi)
    })
    .with_partials(move |x| Ok(kernel_gradient(pole - x, q, &psi)?.map(|d| -d)))
    .with_annihilator(Annihilator::Left(q))
}

/// Quaternion polynomial `Σ c_m x^{α_m}` with real monomials in the standard
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<([u32; 4], Quaternion)>,
}

impl Polynomial {
    /// All monomials of total degree `<= degree` with coefficients drawn from
    /// `[-1, 1)^4`.
    pub fn random(sampler: &mut Sampler, degree: u32) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    for d in 0..=degree - a - b - c {
                        terms.push(([a, b, c, d], sampler.quaternion(1.0)));
                    }
                }
            }
        }
        Self { terms }
    }

    pub fn eval(&self, x: Quaternion) -> Quaternion {
        let c = x.to_array();
        self.terms
            .iter()
            .map(|(e, k)| *k * monomial(&c, e))
            .sum()
    }

    pub fn partials(&self, x: Quaternion) -> [Quaternion; 4] {
        let c = x.to_array();
        [0, 1, 2, 3].map(|j| {
            self.terms
                .iter()
                .filter(|(e, _)| e[j] > 0)
                .map(|(e, k)| {
                    let mut e2 = *e;
                    e2[j] -= 1;
                    *k * (e[j] as f64 * monomial(&c, &e2))
                })
                .sum()
        })
    }

    pub fn into_field(self, label: impl Into<String>) -> QuaternionField {
        let p = Arc::new(self);
        let p2 = p.clone();
        QuaternionField::from_fn(label, move |x| p.eval(x)).with_partials(move |x| Ok(p2.partials(x)))
    }
}

fn monomial(c: &[f64; 4], e: &[u32; 4]) -> f64 {
    (0..4).map(|k| c[k].powi(e[k] as i32)).product()
}

/// Serializable description of a dictionary for experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionarySpec {
    pub psi: StructuralSet,
    pub q: Quaternion,
    #[serde(default)]
    pub poles: Vec<Quaternion>,
    #[serde(default = "default_true")]
    pub degree_one: bool,
    #[serde(default, skip_deserializing)]
    pub labels: Vec<String>,
}

fn default_true() -> bool {
    true
}

/// Where and how strictly a dictionary is certified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certification {
    pub center: Quaternion,
    pub radius: f64,
    pub samples: usize,
    pub h: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for Certification {
    fn default() -> Self {
        Self {
            center: Quaternion::ZERO,
            radius: 1.0,
            samples: 100,
            h: 1e-4,
            tolerance: 1e-6,
            seed: 0x5eed,
        }
    }
}

/// Per-entry maximum of `|A[f](x)| / (1 + |f(x)|)` over the sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub residuals: Vec<(String, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// An ordered list of fields certified against one perturbation `q`.
#[derive(Clone, Debug)]
pub struct Dictionary {
    entries: Vec<QuaternionField>,
    psi: StructuralSet,
    q: Quaternion,
    poles: Vec<Quaternion>,
    degree_one: bool,
}

impl Dictionary {
    /// Wraps existing fields without certification (images under isometries,
    /// hand-built spans).
    pub fn from_entries(entries: Vec<QuaternionField>, psi: StructuralSet, q: Quaternion) -> Self {
        Self {
            entries,
            psi,
            q,
            poles: Vec::new(),
            degree_one: false,
        }
    }

    pub fn from_spec(spec: &DictionarySpec) -> Result<Self> {
        build_dictionary(&spec.psi, spec.q, &spec.poles, spec.degree_one)
    }

    pub fn entries(&self) -> &[QuaternionField] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn psi(&self) -> &StructuralSet {
        &self.psi
    }

    pub fn q(&self) -> Quaternion {
        self.q
    }

    pub fn spec(&self) -> DictionarySpec {
        DictionarySpec {
            psi: self.psi,
            q: self.q,
            poles: self.poles.clone(),
            degree_one: self.degree_one,
            labels: self.entries.iter().map(|e| e.label().to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.spec())?)
    }

    pub fn map(&self, q: Quaternion, f: impl Fn(&QuaternionField) -> QuaternionField) -> Self {
        Self::from_entries(self.entries.iter().map(f).collect(), self.psi, q)
    }

    /// Measures every entry's residual under its tagged operator with central
    /// differences of step `cert.h` at `cert.samples` points in the ball.
    pub fn certify(&self, cert: &Certification) -> Result<CertificationReport> {
        let mut sampler = Sampler::new(cert.seed);
        let points: Vec<Quaternion> = (0..cert.samples)
            .map(|_| sampler.in_ball(cert.center, cert.radius))
            .collect();
        let mut residuals = Vec::with_capacity(self.len());
        for f in &self.entries {
            let kind = f.annihilator().operator().unwrap_or(OperatorKind::left(self.q));
            let r = max_residual(f, kind, &points, &self.psi, Differentiation::Central { h: cert.h })?;
            residuals.push((f.label().to_string(), r));
        }
        let pass = residuals.iter().all(|(_, r)| *r <= cert.tolerance);
        Ok(CertificationReport {
            residuals,
            tolerance: cert.tolerance,
            pass,
        })
    }
}

/// `max_x |A[f](x)| / (1 + |f(x)|)`.
pub fn max_residual(
    f: &QuaternionField,
    kind: OperatorKind,
    points: &[Quaternion],
    psi: &StructuralSet,
    mode: Differentiation,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &x in points {
        let r = apply_with(kind, f, x, psi, mode)?.norm() / (1.0 + f.eval(x)?.norm());
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Constant, the three Fueter variables (optional), all modulated by
/// `e^{-<q,x>_ψ}`, then kernel fields `K^ψ_q(pole - x)`. Certified on the unit
/// ball with [`Certification::default`].
pub fn build_dictionary(
    psi: &StructuralSet,
    q: Quaternion,
    poles: &[Quaternion],
    degree_one: bool,
) -> Result<Dictionary> {
    build_dictionary_with(psi, q, poles, degree_one, &Certification::default())
}

pub fn build_dictionary_with(
    psi: &StructuralSet,
    q: Quaternion,
    poles: &[Quaternion],
    degree_one: bool,
    cert: &Certification,
) -> Result<Dictionary> {
    for p in poles {
        if (*p - cert.center).norm() <= cert.radius * 1.05 {
            return Err(Error::InvalidArgument(format!(
                "pole {p} lies inside the certification ball (radius {})",
                cert.radius
            )));
        }
    }
    let mut base = vec![QuaternionField::constant(Quaternion::ONE)];
    if degree_one {
        for k in 1..=3 {
            base.push(fueter_variable(k, psi)?);
        }
    }
    let mut entries: Vec<QuaternionField> = base.iter().map(|g| exp_modulate(g, q, psi)).collect();
    entries.extend(poles.iter().map(|&p| kernel_field(p, q, psi)));
    let dict = Dictionary {
        entries,
        psi: *psi,
        q,
        poles: poles.to_vec(),
        degree_one,
    };
    let report = dict.certify(cert)?;
    if let Some((label, residual)) = report
        .residuals
        .iter()
        .find(|(_, r)| *r > cert.tolerance || !r.is_finite())
    {
        return Err(Error::Certification {
            label: label.clone(),
            residual: *residual,
            tolerance: cert.tolerance,
        });
    }
    Ok(dict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::apply;

    #[test]
    fn fueter_variable_examples() {
        let std = StructuralSet::standard();
        let z1 = fueter_variable(1, &std).unwrap();
        assert_eq!(z1.eval(Quaternion::E1).unwrap(), Quaternion::ONE);
        let psi = StructuralSet::cimmino();
        for k in 1..=3 {
            let z = fueter_variable(k, &psi).unwrap();
            assert_eq!(z.eval(Quaternion::ZERO).unwrap(), Quaternion::ZERO);
        }
        assert!(fueter_variable(0, &psi).is_err());
        assert!(fueter_variable(4, &psi).is_err());
    }

    #[test]
    fn modulation_by_zero_and_back() {
        let psi = StructuralSet::cimmino();
        let g = fueter_variable(2, &psi).unwrap();
        let same = exp_modulate(&g, Quaternion::ZERO, &psi);
        let q = Quaternion::new(0.3, -0.2, 0.5, 0.1);
        let round = exp_modulate(&exp_modulate(&g, q, &psi), -q, &psi);
        let mut s = Sampler::new(5);
        for _ in 0..20 {
            let x = s.bounded(1.0);
            assert_eq!(same.eval(x).unwrap(), g.eval(x).unwrap());
            assert!(round.eval(x).unwrap().max_abs_diff(g.eval(x).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn kernel_field_pole_is_singular() {
        let psi = StructuralSet::cimmino();
        let pole = Quaternion::new(2.0, 0.0, 0.0, 0.0);
        let k = kernel_field(pole, Quaternion::ZERO, &psi);
        assert!(matches!(k.eval(pole), Err(Error::Singularity(_))));
        let v = k.eval(pole - Quaternion::ONE).unwrap();
        assert!((v.q0 - 0.05066059182116889).abs() < 1e-15);
    }

    #[test]
    fn dictionary_counts() {
        let psi = StructuralSet::cimmino();
        let d = build_dictionary(&psi, Quaternion::ZERO, &[], true).unwrap();
        assert_eq!(d.len(), 4);
        let labels: Vec<_> = d.entries().iter().map(|e| e.label().to_string()).collect();
        assert_eq!(labels, ["1", "z1", "z2", "z3"]);
        let q = Quaternion::new(0.2, 0.1, -0.3, 0.4);
        let d = build_dictionary(&psi, q, &[], false).unwrap();
        assert_eq!(d.len(), 1);
        let x = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        let expect = (-pairing(q, x, &psi)).exp();
        assert!((d.entries()[0].eval(x).unwrap().q0 - expect).abs() < 1e-15);
    }

    #[test]
    fn pole_inside_certification_ball_is_rejected() {
        let psi = StructuralSet::cimmino();
        let err = build_dictionary(&psi, Quaternion::ZERO, &[Quaternion::real(0.5)], true);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn non_solution_fails_certification() {
        let psi = StructuralSet::cimmino();
        let bad = QuaternionField::identity().with_annihilator(Annihilator::Left(Quaternion::ZERO));
        let d = Dictionary::from_entries(vec![bad], psi, Quaternion::ZERO);
        let rep = d.certify(&Certification::default()).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn spec_json_round_trip() {
        let psi = StructuralSet::cimmino();
        let d = build_dictionary(&psi, Quaternion::new(0.1, 0.0, 0.0, 0.2), &[Quaternion::real(2.0)], true).unwrap();
        let json = d.to_json().unwrap();
        let spec: DictionarySpec = serde_json::from_str(&json).unwrap();
        let d2 = Dictionary::from_spec(&spec).unwrap();
        assert_eq!(d2.len(), d.len());
        assert_eq!(d2.spec(), d.spec());
    }

    #[test]
    fn polynomial_partials_match_differences() {
        let mut s = Sampler::new(9);
        let p = Polynomial::random(&mut s, 3);
        let f = p.into_field("p");
        let x = Quaternion::new(0.3, -0.2, 0.4, 0.1);
        let exact = f.partials(x).unwrap().unwrap();
        let h = 1e-5;
        for j in 0..4 {
            let e = Quaternion::basis(j) * h;
            let fd = (f.eval(x + e).unwrap() - f.eval(x - e).unwrap()) / (2.0 * h);
            assert!(fd.max_abs_diff(exact[j]) < 1e-8);
        }
        let k = OperatorKind::left(Quaternion::ZERO);
        let _ = apply(k, &f, x, &StructuralSet::cimmino(), 1e-4).unwrap();
    }
}
