//! `SU(2)`, `SL(2, C)` and their Lie algebras.
//!
//! Algebra elements are stored as coordinates over the orthonormal basis
//! `e_a = -(i/2) sigma_a`, `a = 1, 2, 3`, of `su(2)` with respect to
//! `<X, Y> = -2 tr(XY)`. With this normalisation `exp(t e_3)` has period `4 pi`
//! and `exp(2 pi e_3) = -I`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance from `-I` below which [`log_group`] refuses to pick a branch.
pub const CUT_LOCUS_TOLERANCE: f64 = 1e-12;

/// Pauli matrices `sigma_1, sigma_2, sigma_3`.
pub fn pauli() -> [CMatrix2; 3] {
    [CMatrix2::new(ZERO, ONE, ONE, ZERO), CMatrix2::new(ZERO, -I, I, ZERO), CMatrix2::new(ONE, ZERO, ZERO, -ONE)]
}

/// The orthonormal basis `e_a = -(i/2) sigma_a` of `su(2)` as matrices.
pub fn basis() -> [CMatrix2; 3] {
    pauli().map(|s| s * Complex64::new(0.0, -0.5))
}

/// Fixes `<X, Y> = -scale * tr(XY)` on `su(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductConvention {
    pub scale: f64,
}

impl InnerProductConvention {
    /// The convention used throughout the crate.
    pub const STANDARD: InnerProductConvention = InnerProductConvention { scale: 2.0 };

    /// Inner product computed from the matrices, independent of coordinates.
    pub fn inner(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        -self.scale * (x.matrix() * y.matrix()).trace().re
    }
}

/// Element of `su(2)` in orthonormal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraVector(pub [f64; 3]);

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector([0.0; 3]);

    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        AlgebraVector([c1, c2, c3])
    }

    /// `t * e_a` for `a` in `0..3`.
    pub fn basis(a: usize, t: f64) -> Self {
        let mut c = [0.0; 3];
        c[a] = t;
        AlgebraVector(c)
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    /// Traceless skew-Hermitian matrix `sum_a c_a e_a`.
    pub fn matrix(&self) -> CMatrix2 {
        let [c1, c2, c3] = self.0;
        // -(i/2) (c1 s1 + c2 s2 + c3 s3)
        CMatrix2::new(
            Complex64::new(0.0, -0.5 * c3),
            Complex64::new(-0.5 * c2, -0.5 * c1),
            Complex64::new(0.5 * c2, -0.5 * c1),
            Complex64::new(0.0, 0.5 * c3),
        )
    }

    /// Coordinates of the skew-Hermitian part of a traceless matrix.
    pub fn from_matrix(m: &CMatrix2) -> Self {
        let s = pauli();
        // c_a = i tr(M s_a)
        AlgebraVector(std::array::from_fn(|a| (I * (m * s[a]).trace()).re))
    }

    pub fn dot(&self, other: &AlgebraVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `[X, Y]` in coordinates; `[e_1, e_2] = e_3` cyclically.
    pub fn bracket(&self, other: &AlgebraVector) -> AlgebraVector {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        AlgebraVector([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn complexify(&self) -> ComplexAlgebraVector {
        ComplexAlgebraVector(self.0.map(|c| Complex64::new(c, 0.0)))
    }

    /// `i * self` as an element of `sl(2, C)`.
    pub fn times_i(&self) -> ComplexAlgebraVector {
        ComplexAlgebraVector(self.0.map(|c| Complex64::new(0.0, c)))
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: Self) -> Self {
        AlgebraVector(std::array::from_fn(|a| self.0[a] + rhs.0[a]))
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: Self) -> Self {
        AlgebraVector(std::array::from_fn(|a| self.0[a] - rhs.0[a]))
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> Self {
        AlgebraVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, t: f64) -> Self {
        AlgebraVector(self.0.map(|c| c * t))
    }
}

/// Element of `sl(2, C) = su(2) + i su(2)` in the same coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexAlgebraVector(pub [Complex64; 3]);

impl ComplexAlgebraVector {
    pub const ZERO: ComplexAlgebraVector = ComplexAlgebraVector([ZERO; 3]);

    pub fn from_parts(re: &AlgebraVector, im: &AlgebraVector) -> Self {
        ComplexAlgebraVector(std::array::from_fn(|a| Complex64::new(re.0[a], im.0[a])))
    }

    pub fn re(&self) -> AlgebraVector {
        AlgebraVector(self.0.map(|z| z.re))
    }

    pub fn im(&self) -> AlgebraVector {
        AlgebraVector(self.0.map(|z| z.im))
    }

    pub fn matrix(&self) -> CMatrix2 {
        let [z1, z2, z3] = self.0;
        let h = Complex64::new(0.0, -0.5);
        CMatrix2::new(h * z3, h * (z1 - I * z2), h * (z1 + I * z2), -h * z3)
    }

    pub fn from_matrix(m: &CMatrix2) -> Self {
        let s = pauli();
        ComplexAlgebraVector(std::array::from_fn(|a| I * (m * s[a]).trace()))
    }

    /// Hermitian norm `sqrt(|Re|^2 + |Im|^2)`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, t: Complex64) -> Self {
        ComplexAlgebraVector(self.0.map(|z| z * t))
    }
}

impl Add for ComplexAlgebraVector {
    type Output = ComplexAlgebraVector;
    fn add(self, rhs: Self) -> Self {
        ComplexAlgebraVector(std::array::from_fn(|a| self.0[a] + rhs.0[a]))
    }
}

impl Sub for ComplexAlgebraVector {
    type Output = ComplexAlgebraVector;
    fn sub(self, rhs: Self) -> Self {
        ComplexAlgebraVector(std::array::from_fn(|a| self.0[a] - rhs.0[a]))
    }
}

impl Mul<f64> for ComplexAlgebraVector {
    type Output = ComplexAlgebraVector;
    fn mul(self, t: f64) -> Self {
        ComplexAlgebraVector(self.0.map(|z| z * t))
    }
}

/// Element of `SU(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(CMatrix2);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(CMatrix2::identity())
    }

    /// Wraps a matrix without checking the group invariants.
    pub fn from_matrix_unchecked(m: CMatrix2) -> Self {
        GroupElement(m)
    }

    /// Wraps a matrix, checking unitarity and `det = 1` to `tol`.
    pub fn from_matrix(m: CMatrix2, tol: f64) -> Result<Self> {
        let g = GroupElement(m);
        let defect = g.unitarity_defect().max((m.determinant() - ONE).norm());
        if defect > tol {
            return Err(Error::InvalidParams(format!("matrix is not in SU(2): defect {defect:e}")));
        }
        Ok(g)
    }

    /// `q0 I - i (q1 s1 + q2 s2 + q3 s3)` for a unit quaternion.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let [q0, q1, q2, q3] = q;
        GroupElement(CMatrix2::new(
            Complex64::new(q0, -q3),
            Complex64::new(-q2, -q1),
            Complex64::new(q2, -q1),
            Complex64::new(q0, q3),
        ))
    }

    /// Inverse of [`GroupElement::from_quaternion`].
    pub fn quaternion(&self) -> [f64; 4] {
        let m = &self.0;
        [
            0.5 * (m[(0, 0)].re + m[(1, 1)].re),
            -0.5 * (m[(0, 1)].im + m[(1, 0)].im),
            0.5 * (m[(1, 0)].re - m[(0, 1)].re),
            0.5 * (m[(1, 1)].im - m[(0, 0)].im),
        ]
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        GroupElement(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `max |(g* g - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * self.0 - CMatrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Rotation angle `theta` in `[0, pi]` with eigenvalues `e^{+-i theta}`.
    pub fn eigen_angle(&self) -> f64 {
        let q = self.quaternion();
        let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        v.atan2(q[0])
    }

    /// Geodesic distance to the identity, `|log x|` in `[0, 2 pi]`.
    pub fn distance_from_identity(&self) -> f64 {
        2.0 * self.eigen_angle()
    }

    /// `Ad_x X = x X x^{-1}`.
    pub fn adjoint_action(&self, x: &AlgebraVector) -> AlgebraVector {
        AlgebraVector::from_matrix(&(self.0 * x.matrix() * self.0.adjoint()))
    }

    pub fn complexify(&self) -> ComplexGroupElement {
        ComplexGroupElement(self.0)
    }

    /// Frobenius distance between matrices.
    pub fn matrix_distance(&self, other: &GroupElement) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: Self) -> Self {
        GroupElement(self.0 * rhs.0)
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        GroupElement(self.0 * rhs.0)
    }
}

/// Element of `SL(2, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGroupElement(CMatrix2);

impl ComplexGroupElement {
    pub fn identity() -> Self {
        ComplexGroupElement(CMatrix2::identity())
    }

    pub fn from_matrix_unchecked(m: CMatrix2) -> Self {
        ComplexGroupElement(m)
    }

    pub fn from_matrix(m: CMatrix2, tol: f64) -> Result<Self> {
        let det = m.determinant();
        if (det - ONE).norm() > tol {
            return Err(Error::InvalidParams(format!("matrix is not in SL(2, C): det = {det}")));
        }
        Ok(ComplexGroupElement(m))
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Inverse via the adjugate; exact for `det = 1`.
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        ComplexGroupElement(CMatrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    /// Spectral radius `max |eigenvalue|`, at least 1 since `det = 1`.
    pub fn spectral_radius(&self) -> f64 {
        let half = self.trace() * 0.5;
        let disc = (half * half - ONE).sqrt();
        (half + disc).norm().max((half - disc).norm())
    }

    pub fn matrix_distance(&self, other: &ComplexGroupElement) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl Mul for ComplexGroupElement {
    type Output = ComplexGroupElement;
    fn mul(self, rhs: Self) -> Self {
        ComplexGroupElement(self.0 * rhs.0)
    }
}

impl Mul<&ComplexGroupElement> for &ComplexGroupElement {
    type Output = ComplexGroupElement;
    fn mul(self, rhs: &ComplexGroupElement) -> ComplexGroupElement {
        ComplexGroupElement(self.0 * rhs.0)
    }
}

/// Read access to the underlying matrix of either group type.
pub trait AsMatrix {
    fn as_matrix(&self) -> &CMatrix2;
}

impl AsMatrix for GroupElement {
    fn as_matrix(&self) -> &CMatrix2 {
        &self.0
    }
}

impl AsMatrix for ComplexGroupElement {
    fn as_matrix(&self) -> &CMatrix2 {
        &self.0
    }
}

/// `(cosh d, sinh d / d)` as functions of `d^2`; both are entire and even in `d`.
fn cosh_sinhc(delta_sq: Complex64) -> (Complex64, Complex64) {
    if delta_sq.norm() < 1e-3 {
        // term = d^{2k} / (2k+1)!, and 1/(2k)! = (2k+1)/(2k+1)!.
        let mut cosh = ZERO;
        let mut sinhc = ZERO;
        let mut term = ONE;
        for k in 0..10u32 {
            let k = f64::from(k);
            cosh += term * (2.0 * k + 1.0);
            sinhc += term;
            term *= delta_sq / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        (cosh, sinhc)
    } else {
        let d = delta_sq.sqrt();
        (d.cosh(), d.sinh() / d)
    }
}

/// Matrix exponential of a traceless `2 x 2` matrix, `cosh(d) I + sinh(d)/d M`
/// with `d^2 = -det M`.
fn exp_traceless(m: &CMatrix2) -> CMatrix2 {
    let (c, s) = cosh_sinhc(-m.determinant());
    CMatrix2::identity() * c + m * s
}

/// Exponential map `su(2) -> SU(2)`.
pub fn exp_group(x: &AlgebraVector) -> GroupElement {
    let theta = x.norm();
    let half = 0.5 * theta;
    let sinc = if half < 1e-4 { 1.0 - half * half / 6.0 + half.powi(4) / 120.0 } else { half.sin() / half };
    // cos(theta/2) - i sin(theta/2) n.sigma
    let q = [half.cos(), 0.5 * sinc * x.0[0], 0.5 * sinc * x.0[1], 0.5 * sinc * x.0[2]];
    GroupElement::from_quaternion(q)
}

/// Principal logarithm `SU(2) -> su(2)`; the result has norm below `2 pi`.
pub fn log_group(x: &GroupElement) -> Result<AlgebraVector> {
    let distance = (x.0 + CMatrix2::identity()).norm();
    if distance < CUT_LOCUS_TOLERANCE {
        return Err(Error::CutLocus { distance });
    }
    let q = x.quaternion();
    let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if v == 0.0 {
        return Ok(AlgebraVector::ZERO);
    }
    let factor = 2.0 * v.atan2(q[0]) / v;
    Ok(AlgebraVector([factor * q[1], factor * q[2], factor * q[3]]))
}

/// Exponential map `sl(2, C) -> SL(2, C)`.
pub fn exp_complex(z: &ComplexAlgebraVector) -> ComplexGroupElement {
    ComplexGroupElement(exp_traceless(&z.matrix()))
}

/// Principal logarithm on `SL(2, C)`.
///
/// Undefined where `tr g = -2` and `g != -I` (no logarithm exists) and at
/// `-I` itself (no unique one); both raise [`Error::CutLocus`].
pub fn log_complex(g: &ComplexGroupElement) -> Result<ComplexAlgebraVector> {
    let half = g.trace() * 0.5;
    let distance = (half + ONE).norm();
    if distance < CUT_LOCUS_TOLERANCE {
        return Err(Error::CutLocus { distance });
    }
    let traceless = g.0 - CMatrix2::identity() * half;
    // g = cosh(d) I + sinhc(d) M with cosh(d) = tr g / 2.
    let delta = half.acosh();
    let sinhc = if delta.norm() < 1e-4 {
        let d2 = delta * delta;
        ONE + d2 / 6.0 + d2 * d2 / 120.0
    } else {
        delta.sinh() / delta
    };
    Ok(ComplexAlgebraVector::from_matrix(&(traceless / sinhc)))
}

/// `Phi(x, Y) = x e^{iY}`, the polar identification `K x k -> K_C`.
pub fn polar_compose(x: &GroupElement, y: &AlgebraVector) -> ComplexGroupElement {
    ComplexGroupElement(x.0 * exp_complex(&y.times_i()).0)
}

/// Inverse of [`polar_compose`]: `g = x p` with `x` unitary and
/// `p = e^{iY}` positive.
///
/// Uses `g* g = p^2 = e^{2iY}`; writing `p^2 = cosh(|y|) I + sinh(|y|) y.sigma / |y|`
/// recovers `y` from the traceless part without taking a matrix square root.
pub fn polar_decompose(g: &ComplexGroupElement) -> (GroupElement, AlgebraVector) {
    let h = g.0.adjoint() * g.0;
    let s = pauli();
    let t: [f64; 3] = std::array::from_fn(|a| 0.5 * (h * s[a]).trace().re);
    let t_norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    let y = if t_norm == 0.0 {
        AlgebraVector::ZERO
    } else {
        let factor = t_norm.asinh() / t_norm;
        AlgebraVector(t.map(|c| c * factor))
    };
    let p_inv = exp_complex(&(-y).times_i());
    (GroupElement(g.0 * p_inv.0), y)
}

/// Geodesic `t -> x e^{tX}` of the bi-invariant metric.
pub fn geodesic(x: &GroupElement, direction: &AlgebraVector, t: f64) -> GroupElement {
    x * &exp_group(&(*direction * t))
}
