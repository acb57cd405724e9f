//! Two-level linear algebra: 2×2 complex matrices, spin states, and the
//! closed-form exponential of a traceless Hermitian generator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Real 3-vector; used for Bloch-form generators `h·σ`.
pub type Vec3 = [f64; 3];

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Dense 2×2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn pauli_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_y() -> Self {
        Mat2::new(ZERO, -I, I, ZERO)
    }

    pub fn pauli_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// `h·σ` for a real vector `h`.
    pub fn from_bloch(h: Vec3) -> Self {
        Mat2::new(
            C64::new(h[2], 0.0),
            C64::new(h[0], -h[1]),
            C64::new(h[0], h[1]),
            C64::new(-h[2], 0.0),
        )
    }

    /// `exp(-i k·σ)`, exact for any real `k`.
    pub fn exp_neg_i_bloch(k: Vec3) -> Self {
        let r = norm3(k);
        if r == 0.0 {
            return Mat2::identity();
        }
        let (s, c) = r.sin_cos();
        let f = s / r;
        Mat2::new(
            C64::new(c, -f * k[2]),
            C64::new(-f * k[1], -f * k[0]),
            C64::new(f * k[1], -f * k[0]),
            C64::new(c, f * k[2]),
        )
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ‖U†U − I‖_F
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).frobenius_norm()
    }

    /// ‖M − M†‖_F
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    pub fn apply(&self, s: &SpinState) -> SpinState {
        let m = &self.0;
        SpinState {
            c0: m[0][0] * s.c0 + m[0][1] * s.c1,
            c1: m[1][0] * s.c0 + m[1][1] * s.c1,
        }
    }

    /// Eigen-decomposition of a normal 2×2 matrix. Eigenvalues come from the
    /// characteristic polynomial, eigenvectors are normalized. When the two
    /// eigenvalues coincide the computational basis is returned.
    pub fn eig_normal(&self) -> [(C64, SpinState); 2] {
        let m = &self.0;
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        let lambdas = [half_tr + disc, half_tr - disc];
        if (lambdas[0] - lambdas[1]).norm() < 1e-14 * (1.0 + half_tr.norm()) {
            return [(lambdas[0], SpinState::ground()), (lambdas[1], SpinState::excited())];
        }
        let vec_for = |l: C64| {
            let a = SpinState { c0: m[0][1], c1: l - m[0][0] };
            let b = SpinState { c0: l - m[1][1], c1: m[1][0] };
            let v = if a.norm_sqr() >= b.norm_sqr() { a } else { b };
            v.normalized()
        };
        [(lambdas[0], vec_for(lambdas[0])), (lambdas[1], vec_for(lambdas[1]))]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

/// Spin-½ state in the `{|0⟩, |−1⟩}` basis (NV sublevels m_s = 0 and m_s = −1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub c0: C64,
    pub c1: C64,
}

impl SpinState {
    pub const fn new(c0: C64, c1: C64) -> Self {
        SpinState { c0, c1 }
    }

    /// `|0⟩`, the optically polarized state.
    pub const fn ground() -> Self {
        SpinState { c0: ONE, c1: ZERO }
    }

    /// `|−1⟩`
    pub const fn excited() -> Self {
        SpinState { c0: ZERO, c1: ONE }
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        SpinState { c0: C64::new(a, 0.0), c1: C64::new(b, 0.0) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        SpinState { c0: self.c0 / n, c1: self.c1 / n }
    }

    /// Population of `|0⟩`.
    pub fn p0(&self) -> f64 {
        self.c0.norm_sqr()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &SpinState) -> C64 {
        self.c0.conj() * other.c0 + self.c1.conj() * other.c1
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap(&self, other: &SpinState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn scale(&self, s: C64) -> Self {
        SpinState { c0: self.c0 * s, c1: self.c1 * s }
    }

    pub fn distance(&self, other: &SpinState) -> f64 {
        ((self.c0 - other.c0).norm_sqr() + (self.c1 - other.c1).norm_sqr()).sqrt()
    }

    /// `⟨σx⟩`
    pub fn expect_x(&self) -> f64 {
        2.0 * (self.c0.conj() * self.c1).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_exponential_matches_series() {
        let k = [0.3, -0.2, 0.5];
        let u = Mat2::exp_neg_i_bloch(k);
        // Taylor series of exp(-i K) to high order.
        let gen = Mat2::from_bloch(k).scale(C64::new(0.0, -1.0));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for n in 1..30 {
            term = (term * gen).scale(C64::new(1.0 / n as f64, 0.0));
            sum = sum + term;
        }
        assert!((u - sum).frobenius_norm() < 1e-14);
        assert!(u.unitarity_defect() < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (Mat2::pauli_x(), Mat2::pauli_y(), Mat2::pauli_z());
        assert_eq!(x * y, z.scale(I));
        assert_eq!(Mat2::from_bloch([1.0, 0.0, 0.0]), x);
        assert_eq!(Mat2::from_bloch([0.0, 1.0, 0.0]), y);
    }

    #[test]
    fn eig_of_rotation() {
        let u = Mat2::exp_neg_i_bloch([0.0, 0.0, 0.4]);
        let [(l0, v0), (l1, v1)] = u.eig_normal();
        for (l, v) in [(l0, v0), (l1, v1)] {
            let uv = u.apply(&v);
            assert!(uv.distance(&v.scale(l)) < 1e-14);
        }
        assert!(v0.overlap(&v1) < 1e-28);
    }
}
