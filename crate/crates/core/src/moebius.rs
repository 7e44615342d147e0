//! Quaternionic Moebius maps `T(x) = (ax + b)(cx + d)^{-1}` and the conformal
//! coefficients entering the covariance identity
//!
//! ```text
//! ψD_q,x[e^{<r-q,x>} A_T f∘T] = e^{<r-q,x>} (B_T∘T) (ψD_δ,y[f])∘T
//! ```

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Annihilator, QuaternionField};
use crate::operators::{apply_with, frame_derivatives, Differentiation, OperatorKind};
use crate::quat::{pairing, Quaternion, StructuralSet};
use crate::report::VerificationReport;

/// Minimum `|y - ac^{-1}|` at which `B_T` and `δ_{T,r}` are evaluated.
pub const SINGULAR_CLEARANCE: f64 = 1e-6;

/// Exponent of the `|y - ac^{-1}|` factor in `B_T` when `c ≠ 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BExponent {
    #[default]
    Plus4,
    Minus4,
}

impl BExponent {
    pub fn value(self) -> i32 {
        match self {
            BExponent::Plus4 => 4,
            BExponent::Minus4 => -4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BExponent::Plus4 => "+4",
            BExponent::Minus4 => "-4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Quaternion; 4]", into = "[Quaternion; 4]")]
pub struct MoebiusMap {
    a: Quaternion,
    b: Quaternion,
    c: Quaternion,
    d: Quaternion,
    v: Quaternion,
}

impl TryFrom<[Quaternion; 4]> for MoebiusMap {
    type Error = Error;

    fn try_from(m: [Quaternion; 4]) -> Result<Self> {
        MoebiusMap::new(m[0], m[1], m[2], m[3])
    }
}

impl From<MoebiusMap> for [Quaternion; 4] {
    fn from(m: MoebiusMap) -> Self {
        [m.a, m.b, m.c, m.d]
    }
}

impl MoebiusMap {
    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(Error::InvalidMap(format!("{name} is not finite")));
            }
        }
        let scale = [a, b, c, d].iter().map(|v| v.norm()).fold(1.0, f64::max);
        let v = if c == Quaternion::ZERO {
            if a.norm() <= 1e-14 * scale {
                return Err(Error::InvalidMap("a = 0 with c = 0".into()));
            }
            if d.norm() <= 1e-14 * scale {
                return Err(Error::InvalidMap("d = 0 with c = 0".into()));
            }
            Quaternion::ZERO
        } else {
            let v = b - a * c.inverse()? * d;
            if v.norm() <= 1e-12 * scale * scale {
                return Err(Error::InvalidMap("b - a c^-1 d = 0".into()));
            }
            v
        };
        Ok(Self { a, b, c, d, v })
    }

    pub fn identity() -> Self {
        Self::affine(Quaternion::ONE, Quaternion::ZERO, Quaternion::ONE).unwrap()
    }

    /// `x ↦ (ax + b) d^{-1}`.
    pub fn affine(a: Quaternion, b: Quaternion, d: Quaternion) -> Result<Self> {
        Self::new(a, b, Quaternion::ZERO, d)
    }

    pub fn translation(t: Quaternion) -> Self {
        Self::affine(Quaternion::ONE, t, Quaternion::ONE).unwrap()
    }

    pub fn a(&self) -> Quaternion {
        self.a
    }

    pub fn b(&self) -> Quaternion {
        self.b
    }

    pub fn c(&self) -> Quaternion {
        self.c
    }

    pub fn d(&self) -> Quaternion {
        self.d
    }

    /// `V = b - a c^{-1} d` (zero when `c = 0`).
    pub fn v(&self) -> Quaternion {
        self.v
    }

    pub fn is_affine(&self) -> bool {
        self.c == Quaternion::ZERO
    }

    fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.norm())
            .fold(1.0, f64::max)
    }

    pub fn apply(&self, x: Quaternion) -> Result<Quaternion> {
        let den = self.c * x + self.d;
        if den.norm() <= 1e-14 * self.scale() * (1.0 + x.norm()) {
            return Err(Error::MapPole(x));
        }
        Ok((self.a * x + self.b) * den.inverse()?)
    }

    /// `x = (a - yc)^{-1}(yd - b)`.
    pub fn invert(&self, y: Quaternion) -> Result<Quaternion> {
        let m = self.a - y * self.c;
        if m.norm() <= 1e-14 * self.scale() * (1.0 + y.norm()) {
            return Err(Error::MapPole(y));
        }
        Ok(m.inverse()? * (y * self.d - self.b))
    }

    /// `(T(x), T^{-1}(T(x)))`.
    pub fn apply_and_invert(&self, x: Quaternion) -> Result<(Quaternion, Quaternion)> {
        let y = self.apply(x)?;
        Ok((y, self.invert(y)?))
    }

    /// `w = c x V^{-1} + d V^{-1}`.
    fn w(&self, x: Quaternion) -> Result<Quaternion> {
        let vi = self.v.inverse()?;
        let w = self.c * x * vi + self.d * vi;
        if w.norm() <= 1e-14 * self.scale() * (1.0 + x.norm()) / self.v.norm() {
            return Err(Error::SingularLocus(x));
        }
        Ok(w)
    }

    /// `u = y - a c^{-1}`, rejected within `SINGULAR_CLEARANCE`.
    fn u(&self, y: Quaternion) -> Result<Quaternion> {
        let u = y - self.a * self.c.inverse()?;
        if u.norm() < SINGULAR_CLEARANCE {
            return Err(Error::SingularLocus(y));
        }
        Ok(u)
    }

    /// `A_T(x)`.
    pub fn coef_a(&self, x: Quaternion) -> Result<Quaternion> {
        if self.is_affine() {
            return Ok(self.d.conj());
        }
        let w = self.w(x)?;
        Ok(self.v.conj() * w.conj() / w.norm_sqr().powi(2))
    }

    /// `B_T(y)`.
    pub fn coef_b(&self, y: Quaternion, exponent: BExponent) -> Result<Quaternion> {
        if self.is_affine() {
            return Ok(self.a.conj());
        }
        let u = self.u(y)?;
        Ok(-(self.c.conj() * u.conj()) * u.norm().powi(exponent.value()))
    }

    /// `δ_{T,r}(y)`.
    pub fn delta(&self, r: Quaternion, y: Quaternion) -> Result<Quaternion> {
        if self.is_affine() {
            return Ok(self.a.conj().inverse()? * r * self.d.conj());
        }
        let u = self.u(y)?;
        let num = u * self.c * r * self.v.conj() * u;
        Ok(-num / (self.c.norm_sqr() * u.norm_sqr().powi(2)))
    }

    /// `C_T(x)`.
    pub fn coef_c(&self, x: Quaternion) -> Result<Quaternion> {
        if self.is_affine() {
            return Ok(self.d.inverse()? * (self.a.norm_sqr() / self.d.norm()));
        }
        let w = self.w(x)?;
        let s = self.c.norm_sqr() / self.v.norm();
        Ok(self.v.inverse()? * s * w.conj() / w.norm_sqr().powi(2))
    }

    /// `ρ_T(x)`.
    pub fn rho(&self, x: Quaternion) -> Result<f64> {
        if self.is_affine() {
            return Ok(1.0);
        }
        Ok(1.0 / self.w(x)?.norm_sqr())
    }

    /// `γ_{T,r,q}(y) = e^{2<r-q, T^{-1}(y)>_ψ}`.
    pub fn gamma(&self, r: Quaternion, q: Quaternion, y: Quaternion, psi: &StructuralSet) -> Result<f64> {
        Ok((2.0 * pairing(r - q, self.invert(y)?, psi)).exp())
    }
}

/// Whether the point passed to [`coefficients`] is `x` in the domain of `T`
/// or `y = T(x)` in its image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSide {
    DomainX,
    CodomainY,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalCoefficients {
    pub x: Quaternion,
    pub y: Quaternion,
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub rho: f64,
    pub delta: Quaternion,
    pub gamma: f64,
}

pub fn coefficients(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    point: Quaternion,
    side: PointSide,
    psi: &StructuralSet,
    exponent: BExponent,
) -> Result<ConformalCoefficients> {
    let (x, y) = match side {
        PointSide::DomainX => (point, t.apply(point)?),
        PointSide::CodomainY => (t.invert(point)?, point),
    };
    Ok(ConformalCoefficients {
        x,
        y,
        a: t.coef_a(x)?,
        b: t.coef_b(y, exponent)?,
        c: t.coef_c(x)?,
        rho: t.rho(x)?,
        delta: t.delta(r, y)?,
        gamma: (2.0 * pairing(r - q, x, psi)).exp(),
    })
}

/// Coefficient used by [`pullback`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PullbackKind {
    #[serde(rename = "A_T")]
    A,
    #[serde(rename = "C_T")]
    C,
}

/// `g(x) = e^{<r-q,x>_ψ} coef(x) f(T(x))`.
pub fn pullback(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    f: &QuaternionField,
    kind: PullbackKind,
    psi: &StructuralSet,
) -> QuaternionField {
    let (t, f, psi) = (*t, f.clone(), *psi);
    let label = format!("pullback[{}]", f.label());
    let g = QuaternionField::new(label, move |x| {
        let coef = match kind {
            PullbackKind::A => t.coef_a(x)?,
            PullbackKind::C => t.coef_c(x)?,
        };
        Ok(coef * f.eval(t.apply(x)?)? * pairing(r - q, x, &psi).exp())
    });
    g.with_annihilator(Annihilator::Left(q))
}

/// Inverse of the `A_T` pullback: `f(y) = e^{-<r-q,x>_ψ} A_T(x)^{-1} g(x)` with
/// `x = T^{-1}(y)`. Maps left `q`-solutions to left `δ_{T,r}`-solutions.
pub fn pushforward(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    g: &QuaternionField,
    psi: &StructuralSet,
) -> QuaternionField {
    let (t, g, psi) = (*t, g.clone(), *psi);
    let label = format!("pushforward[{}]", g.label());
    QuaternionField::new(label, move |y| {
        let x = t.invert(y)?;
        Ok(t.coef_a(x)?.inverse()? * g.eval(x)? * (-pairing(r - q, x, &psi)).exp())
    })
}

/// `ψD f + δ_{T,r}(y) f` at `y`.
pub fn delta_operator(
    t: &MoebiusMap,
    r: Quaternion,
    f: &QuaternionField,
    y: Quaternion,
    psi: &StructuralSet,
    mode: Differentiation,
) -> Result<Quaternion> {
    apply_with(OperatorKind::left(t.delta(r, y)?), f, y, psi, mode)
}

/// Both sides of the covariance identity at `x` and a magnitude scale for
/// relative comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceSides {
    pub lhs: Quaternion,
    pub rhs: Quaternion,
    pub scale: f64,
}

impl CovarianceSides {
    pub fn relative(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.scale.max(f64::MIN_POSITIVE)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn covariance_sides(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    f: &QuaternionField,
    x: Quaternion,
    h: f64,
    psi: &StructuralSet,
    exponent: BExponent,
) -> Result<CovarianceSides> {
    let g = pullback(t, r, q, f, PullbackKind::A, psi).without_partials();
    let lhs = apply_with(OperatorKind::left(q), &g, x, psi, Differentiation::Central { h })?;
    let y = t.apply(x)?;
    let e = pairing(r - q, x, psi).exp();
    let b = t.coef_b(y, exponent)?;
    let delta = t.delta(r, y)?;
    let mode = Differentiation::Auto { h };
    let df = delta_operator(t, r, f, y, psi, mode)?;
    let rhs = b * df * e;
    let parts = frame_derivatives(f, y, psi, mode)?;
    let terms = parts.iter().map(|p| p.norm()).sum::<f64>() + (delta * f.eval(y)?).norm();
    let scale = lhs.norm().max(rhs.norm()).max(e * b.norm() * terms);
    Ok(CovarianceSides { lhs, rhs, scale })
}

/// Relative covariance residual at each point.
#[allow(clippy::too_many_arguments)]
pub fn covariance_check(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    f: &QuaternionField,
    points: &[Quaternion],
    h: f64,
    psi: &StructuralSet,
    exponent: BExponent,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new("covariance", tolerance);
    rep.param("map", t)
        .param("r", r)
        .param("q", q)
        .param("f", f.label())
        .param("h", h)
        .param("b_exponent", exponent.name());
    for (i, &x) in points.iter().enumerate() {
        let s = covariance_sides(t, r, q, f, x, h, psi, exponent)?;
        rep.residual(format!("point_{i}"), s.relative());
    }
    Ok(rep.timed(start))
}

/// Runs the covariance check under both `B_T` exponents. Passes when exactly
/// one convention passes; the passing one is recorded as `passing_exponent`.
#[allow(clippy::too_many_arguments)]
pub fn exponent_arbiter(
    t: &MoebiusMap,
    r: Quaternion,
    q: Quaternion,
    f: &QuaternionField,
    points: &[Quaternion],
    h: f64,
    psi: &StructuralSet,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let plus = covariance_check(t, r, q, f, points, h, psi, BExponent::Plus4, tolerance)?;
    let minus = covariance_check(t, r, q, f, points, h, psi, BExponent::Minus4, tolerance)?;
    let passing: Vec<&str> = [(&plus, BExponent::Plus4), (&minus, BExponent::Minus4)]
        .iter()
        .filter(|(r, _)| r.pass)
        .map(|(_, e)| e.name())
        .collect();
    let mut rep = VerificationReport::new("covariance-exponent", tolerance);
    rep.param("map", t)
        .param("r", r)
        .param("q", q)
        .param("f", f.label())
        .param("max_residual_plus4", plus.max_residual())
        .param("max_residual_minus4", minus.max_residual())
        .param("passing_exponent", passing.first().copied().unwrap_or("none"))
        .param("passing_count", passing.len());
    match passing.as_slice() {
        ["+4"] => rep.residual("selected_plus4", plus.max_residual()),
        ["-4"] => rep.residual("selected_minus4", minus.max_residual()),
        _ => rep.residual("exactly_one_convention", f64::INFINITY),
    };
    Ok(rep.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn identity_and_translation() {
        let x = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        let (y, back) = MoebiusMap::identity().apply_and_invert(x).unwrap();
        assert_eq!(y, x);
        assert_eq!(back, x);
        let y = MoebiusMap::translation(Quaternion::E1).apply(x).unwrap();
        assert!(y.max_abs_diff(x + Quaternion::E1) < 1e-15);
    }

    #[test]
    fn invalid_maps() {
        let z = Quaternion::ZERO;
        assert!(MoebiusMap::new(z, Quaternion::ONE, z, Quaternion::ONE).is_err());
        let one = Quaternion::ONE;
        assert!(MoebiusMap::new(one, one, one, one).is_err());
        let t = MoebiusMap::new(one, z, one, one).unwrap();
        assert!(matches!(t.apply(-one), Err(Error::MapPole(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let mut s = Sampler::new(5);
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let t = MoebiusMap::new(s.quaternion(1.0), s.quaternion(1.0), s.quaternion(1.0), s.quaternion(1.0));
            let Ok(t) = t else { continue };
            let x = s.quaternion(1.0);
            if let Ok((_, back)) = t.apply_and_invert(x) {
                if (t.c() * x + t.d()).norm() > 1e-3 {
                    worst = worst.max((back - x).norm());
                }
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn affine_coefficients() {
        let psi = StructuralSet::cimmino();
        let r = Quaternion::new(0.2, 0.1, 0.0, -0.3);
        let x = Quaternion::new(0.5, 0.5, 0.5, 0.5);
        let c = coefficients(&MoebiusMap::identity(), r, r, x, PointSide::DomainX, &psi, BExponent::Plus4).unwrap();
        assert_eq!((c.a, c.b, c.c, c.rho, c.delta, c.gamma), (Quaternion::ONE, Quaternion::ONE, Quaternion::ONE, 1.0, r, 1.0));
        let t = MoebiusMap::affine(Quaternion::ONE, Quaternion::ZERO, Quaternion::real(2.0)).unwrap();
        assert!((t.coef_c(x).unwrap().q0 - 0.25).abs() < 1e-16);
    }

    #[test]
    fn delta_modulus() {
        let mut s = Sampler::new(9);
        for _ in 0..50 {
            let t = MoebiusMap::new(s.quaternion(1.0), s.quaternion(1.0), s.unit(), s.quaternion(1.0)).unwrap();
            let (r, x) = (s.quaternion(1.0), s.quaternion(1.0));
            let Ok(y) = t.apply(x) else { continue };
            let Ok(d) = t.delta(r, y) else { continue };
            let expected = r.norm() * (t.c() * x + t.d()).norm_sqr() / (t.c().norm() * t.v().norm());
            assert!((d.norm() - expected).abs() < 1e-9 * expected.max(1.0), "{} {}", d.norm(), expected);
        }
    }

    #[test]
    fn covariance_identity_map() {
        let psi = StructuralSet::cimmino();
        let q = Quaternion::new(0.1, -0.4, 0.2, 0.3);
        let f = crate::fields::Polynomial::random(&mut Sampler::new(2), 2).into_field("p");
        let x = Quaternion::new(0.1, 0.2, -0.3, 0.05);
        let s = covariance_sides(&MoebiusMap::identity(), q, q, &f, x, 1e-4, &psi, BExponent::Plus4).unwrap();
        assert!(s.relative() < 1e-7, "{}", s.relative());
    }
}
