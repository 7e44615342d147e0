//! Real quaternions, structural sets and the ψ-pairing.
//!
//! A [`Quaternion`] stores its coordinates with respect to the standard basis
//! `1, e1, e2, e3` with `e1 e2 = e3`, `e2 e3 = e1`, `e3 e1 = e2` and
//! `e_k^2 = -1`. A [`StructuralSet`] is an orthonormal quaternion frame
//! `ψ = {ψ0, ψ1, ψ2, ψ3}`; every frame-dependent object in the crate
//! (Fueter operators, Fueter variables, pairings) is expressed through the
//! ψ-coordinates of a quaternion in that frame.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the real quaternion algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self { q0, q1, q2, q3 }
    }

    #[inline]
    pub const fn real(s: f64) -> Self {
        Self::new(s, 0.0, 0.0, 0.0)
    }

    /// The standard basis element `1, e1, e2, e3` for `k = 0..3`.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        Self::from(c)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `conj(q) / |q|^2`; fails on the zero quaternion.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj() / n2)
    }

    /// Euclidean dot product `(conj(q) r + conj(r) q) / 2` of the coordinate vectors.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.q0 * other.q0 + self.q1 * other.q1 + self.q2 * other.q2 + self.q3 * other.q3
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self - other)
            .to_array()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

/// Conjugate, modulus and inverse in one call.
pub fn conj_norm_inv(q: Quaternion) -> Result<(Quaternion, f64, Quaternion)> {
    Ok((q.conj(), q.norm(), q.inverse()?))
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(s: f64) -> Self {
        Self::real(s)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {:+}e1 {:+}e2 {:+}e3)",
            self.q0, self.q1, self.q2, self.q3
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.q0 + r.q0, self.q1 + r.q1, self.q2 + r.q2, self.q3 + r.q3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.q0 - r.q0, self.q1 - r.q1, self.q2 - r.q2, self.q3 - r.q3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
            a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
            a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
            a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
        )
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// Hamilton product as a free function.
#[inline]
pub fn mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Tolerance used when validating the orthonormality of a frame.
const FRAME_TOL: f64 = 1e-12;

/// An orthonormal quaternion frame together with its orientation sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Quaternion; 4]", into = "[Quaternion; 4]")]
pub struct StructuralSet {
    psi: [Quaternion; 4],
    sign: i8,
}

impl StructuralSet {
    /// Validates orthonormality and computes the orientation sign.
    pub fn new(psi: [Quaternion; 4]) -> Result<Self> {
        for k in 0..4 {
            for m in 0..4 {
                let expect = if k == m { 1.0 } else { 0.0 };
                let got = psi[k].dot(psi[m]);
                if (got - expect).abs() > FRAME_TOL {
                    return Err(Error::InvalidStructuralSet(format!(
                        "<psi_{k}, psi_{m}> = {got}, expected {expect}"
                    )));
                }
            }
        }
        let det = det4(psi.map(Quaternion::to_array));
        let sign = if det > 0.0 { 1 } else { -1 };
        Ok(Self { psi, sign })
    }

    /// The frame `{1, e1, -e2, e3}` under which the ψ-Fueter system is the
    /// Cimmino system.
    pub fn cimmino() -> Self {
        Self {
            psi: [
                Quaternion::ONE,
                Quaternion::E1,
                Quaternion::new(0.0, 0.0, -1.0, 0.0),
                Quaternion::E3,
            ],
            sign: -1,
        }
    }

    /// The standard frame `{1, e1, e2, e3}`.
    pub fn standard() -> Self {
        Self {
            psi: [Quaternion::ONE, Quaternion::E1, Quaternion::E2, Quaternion::E3],
            sign: 1,
        }
    }

    #[inline]
    pub fn psi(&self) -> &[Quaternion; 4] {
        &self.psi
    }

    #[inline]
    pub fn get(&self, k: usize) -> Quaternion {
        self.psi[k]
    }

    /// Determinant sign of the 4×4 matrix whose columns are the ψ_k.
    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    #[inline]
    pub fn coords(&self, q: Quaternion) -> PsiCoords {
        psi_coords(q, self)
    }

    #[inline]
    pub fn compose(&self, c: PsiCoords) -> Quaternion {
        from_psi_coords(c, self)
    }
}

impl Default for StructuralSet {
    fn default() -> Self {
        Self::cimmino()
    }
}

impl TryFrom<[Quaternion; 4]> for StructuralSet {
    type Error = Error;
    fn try_from(psi: [Quaternion; 4]) -> Result<Self> {
        Self::new(psi)
    }
}

impl From<StructuralSet> for [Quaternion; 4] {
    fn from(s: StructuralSet) -> Self {
        s.psi
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant by cofactor expansion along the first row; the argument holds
/// columns, and `det(A) = det(A^T)`.
fn det4(cols: [[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for j in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for (r, row) in (1..4).enumerate() {
            for (c, col) in (0..4).filter(|&c| c != j).enumerate() {
                minor[r][c] = cols[row][col];
            }
        }
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += s * cols[0][j] * det3(minor);
    }
    det
}

/// Coordinates of a quaternion in a ψ-frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PsiCoords(pub [f64; 4]);

impl PsiCoords {
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}

/// `c_k = <q, ψ_k>`.
pub fn psi_coords(q: Quaternion, psi: &StructuralSet) -> PsiCoords {
    PsiCoords(psi.psi.map(|p| q.dot(p)))
}

/// `Σ c_k ψ_k`.
pub fn from_psi_coords(c: PsiCoords, psi: &StructuralSet) -> Quaternion {
    (0..4).map(|k| psi.psi[k] * c.0[k]).sum()
}

/// `<q, x>_ψ = Σ q_k x_k` over ψ-coordinates. Orthonormality makes this the
/// Euclidean dot product for every frame.
pub fn pairing(q: Quaternion, x: Quaternion, psi: &StructuralSet) -> f64 {
    let a = psi_coords(q, psi);
    let b = psi_coords(x, psi);
    (0..4).map(|k| a.0[k] * b.0[k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn unit_products() {
        use Quaternion as Q;
        assert_eq!(Q::E1 * Q::E2, Q::E3);
        assert_eq!(Q::E2 * Q::E3, Q::E1);
        assert_eq!(Q::E3 * Q::E1, Q::E2);
        for e in [Q::E1, Q::E2, Q::E3] {
            assert_eq!(e * e, -Q::ONE);
        }
        let q = Q::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(q * Q::ONE, q);
        assert_eq!((Q::ONE + Q::E1) * (Q::ONE - Q::E1), Q::real(2.0));
    }

    #[test]
    fn conj_norm_inverse_examples() {
        let (c, n, i) = conj_norm_inv(Quaternion::E1).unwrap();
        assert_eq!(c, -Quaternion::E1);
        assert_eq!(n, 1.0);
        assert_eq!(i, -Quaternion::E1);
        assert_eq!(Quaternion::new(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn cimmino_frame_has_negative_orientation() {
        let psi = StructuralSet::cimmino();
        let rebuilt = StructuralSet::new(*psi.psi()).unwrap();
        assert_eq!(rebuilt.sign(), -1);
        assert_eq!(StructuralSet::new(*StructuralSet::standard().psi()).unwrap().sign(), 1);
    }

    #[test]
    fn rejects_non_orthonormal_frame() {
        let bad = [
            Quaternion::ONE,
            Quaternion::E1,
            Quaternion::new(0.0, 0.1, 1.0, 0.0),
            Quaternion::E3,
        ];
        assert!(matches!(
            StructuralSet::new(bad),
            Err(Error::InvalidStructuralSet(_))
        ));
        let scaled = [Quaternion::real(2.0), Quaternion::E1, Quaternion::E2, Quaternion::E3];
        assert!(StructuralSet::new(scaled).is_err());
    }

    #[test]
    fn psi_coordinate_examples() {
        let psi = StructuralSet::cimmino();
        assert_eq!(psi_coords(-Quaternion::E2, &psi).0, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(psi_coords(Quaternion::ONE, &psi).0, [1.0, 0.0, 0.0, 0.0]);
        let q = Quaternion::new(0.4, -2.0, 1.5, 3.25);
        assert!(close(from_psi_coords(psi_coords(q, &psi), &psi), q, 1e-15));
    }

    #[test]
    fn pairing_examples() {
        let psi = StructuralSet::cimmino();
        assert_eq!(pairing(Quaternion::E2, -Quaternion::E2, &psi), -1.0);
        assert_eq!(pairing(Quaternion::ZERO, Quaternion::new(1.0, 2.0, 3.0, 4.0), &psi), 0.0);
    }

    #[test]
    fn structural_set_json() {
        let psi = StructuralSet::cimmino();
        let s = serde_json::to_string(&psi).unwrap();
        assert_eq!(s, "[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0],[0.0,0.0,-1.0,0.0],[0.0,0.0,0.0,1.0]]");
        let back: StructuralSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, psi);
        assert!(serde_json::from_str::<StructuralSet>("[[1,0,0,0],[1,0,0,0],[0,0,1,0],[0,0,0,1]]").is_err());
    }
}
