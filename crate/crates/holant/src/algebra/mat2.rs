//! 2×2 matrices over [`Scalar`] and the projective decompositions used by the
//! classifiers.

use std::fmt;
use std::ops::Mul;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A 2×2 matrix, row-major, rows and columns indexed by bit values.
#[derive(Clone, PartialEq)]
pub struct Mat2 {
    pub m: [[Scalar; 2]; 2],
}

/// Which kind of left factor a QR-style decomposition produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrKind {
    /// q is orthogonal up to a nonzero scalar.
    Orthogonal,
    K,
    KX,
}

/// Triangular side requested from [`qr_orthogonal_decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// r has a zero in the upper right entry.
    Lower,
    /// r has a zero in the lower left entry.
    Upper,
}

/// Output of [`qr_orthogonal_decompose`]: `m = q·r` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QrDecomposition {
    pub q: Mat2,
    pub r: Mat2,
    pub kind: QrKind,
}

/// Which isotropic form [`ata_x_form`] found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsotropicKind {
    KD,
    KXD,
}

impl Mat2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Mat2 {
            m: [[a, b], [c, d]],
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: Scalar, d: Scalar) -> Self {
        Self::new(a, Scalar::zero(), Scalar::zero(), d)
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn x() -> Self {
        Self::from_ints(0, 1, 1, 0)
    }

    /// [[1,1],[i,−i]].
    pub fn k() -> Self {
        Self::new(Scalar::one(), Scalar::one(), Scalar::i(), -Scalar::i())
    }

    pub fn kx() -> Self {
        Self::k() * Self::x()
    }

    /// diag(1, e^{iπ/4}).
    pub fn t() -> Self {
        Self::diag(Scalar::one(), Scalar::zeta8())
    }

    /// Unnormalised Hadamard [[1,1],[1,−1]].
    pub fn h() -> Self {
        Self::from_ints(1, 1, 1, -1)
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.m[r][c]
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.m.clone();
        Self::new(a, c, b, d)
    }

    pub fn det(&self) -> Scalar {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv_det = self.det().inv().map_err(|_| Error::SingularMatrix)?;
        let [[a, b], [c, d]] = self.m.clone();
        Ok(Self::new(
            &d * &inv_det,
            -(&b * &inv_det),
            -(&c * &inv_det),
            &a * &inv_det,
        ))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let [[a, b], [c, d]] = &self.m;
        Self::new(a * s, b * s, c * s, d * s)
    }

    pub fn is_diagonal(&self) -> bool {
        self.m[0][1].is_zero() && self.m[1][0].is_zero()
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.m[0][0].is_zero() && self.m[1][1].is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Scalar::is_zero)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Scalar; 2]) -> [Scalar; 2] {
        [
            &self.m[0][0] * &v[0] + &self.m[0][1] * &v[1],
            &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1],
        ]
    }

    /// Returns c with `self = c·other`, if such a nonzero c exists.
    pub fn scale_equiv(&self, other: &Mat2) -> Option<Scalar> {
        let a: Vec<&Scalar> = self.m.iter().flatten().collect();
        let b: Vec<&Scalar> = other.m.iter().flatten().collect();
        scale_factor(&a, &b)
    }

    /// True if `self` is a nonzero scalar multiple of `other`.
    pub fn proj_eq(&self, other: &Mat2) -> bool {
        self.scale_equiv(other).is_some()
    }

    /// True if the matrix is orthogonal up to a nonzero scalar (qᵀq ≐ I).
    pub fn is_orthogonal_projective(&self) -> bool {
        let g = &self.transpose() * self;
        g.is_diagonal() && !g.m[0][0].is_zero() && g.m[0][0] == g.m[1][1]
    }

    pub fn to_float(&self) -> Self {
        let [[a, b], [c, d]] = &self.m;
        let f = |s: &Scalar| s.to_backend(super::scalar::Backend::Float);
        Self::new(f(a), f(b), f(c), f(d))
    }
}

/// Shared helper: the nonzero c with a = c·b, if any; both zero gives 1.
pub(crate) fn scale_factor(a: &[&Scalar], b: &[&Scalar]) -> Option<Scalar> {
    if a.len() != b.len() {
        return None;
    }
    let pivot = b.iter().position(|x| !x.is_zero());
    let Some(p) = pivot else {
        return if a.iter().all(|x| x.is_zero()) {
            Some(Scalar::one())
        } else {
            None
        };
    };
    let c = a[p] / b[p];
    if c.is_zero() {
        return None;
    }
    a.iter().zip(b).all(|(x, y)| **x == &c * *y).then_some(c)
}

impl<'a> Mul<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        let e = |r: usize, c: usize| &self.m[r][0] * &rhs.m[0][c] + &self.m[r][1] * &rhs.m[1][c];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Writes `m = q·r` with r triangular on the requested side and q either
/// orthogonal up to scalar, K, or KX.
///
/// q is left unnormalised, so every entry stays in the field of `m`.
pub fn qr_orthogonal_decompose(m: &Mat2, side: Side) -> Result<QrDecomposition> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let i = Scalar::i();
    // (u, v) is the row of m that must be rotated away: the second column for
    // a lower triangular r, the first column for an upper one.
    let (u, v) = match side {
        Side::Lower => (m.m[0][1].clone(), m.m[1][1].clone()),
        Side::Upper => (m.m[0][0].clone(), m.m[1][0].clone()),
    };
    let norm = &u * &u + &v * &v;
    let (q, kind) = if !norm.is_zero() {
        let q = match side {
            Side::Lower => Mat2::new(v.clone(), u.clone(), -&u, v.clone()),
            Side::Upper => Mat2::new(u.clone(), -&v, v.clone(), u.clone()),
        };
        (q, QrKind::Orthogonal)
    } else {
        // isotropic column: v = ±i·u
        let plus = v == &i * &u;
        match (side, plus) {
            (Side::Lower, true) | (Side::Upper, false) => (Mat2::kx(), QrKind::KX),
            (Side::Lower, false) | (Side::Upper, true) => (Mat2::k(), QrKind::K),
        }
    };
    let r = &q.inverse()? * m;
    Ok(QrDecomposition { q, r, kind })
}

/// Writes `m = q·d` with q orthogonal up to scalar and d diagonal, when mᵀm
/// is diagonal.
pub fn factor_orthogonal_diagonal(m: &Mat2) -> Option<(Mat2, Mat2)> {
    if !m.is_invertible() {
        return None;
    }
    let gram = &m.transpose() * m;
    if !gram.is_diagonal() {
        return None;
    }
    let (a, b) = (m.m[0][0].clone(), m.m[1][0].clone());
    let (c, d) = (&m.m[0][1], &m.m[1][1]);
    // second column is λ·(−b, a)
    let lambda = if !a.is_zero() { d / &a } else { -(c / &b) };
    let q = Mat2::new(a.clone(), -&b, b, a);
    let d = Mat2::diag(Scalar::one(), lambda);
    (&q * &d == *m).then_some((q, d))
}

/// Recognises `a = K·D` or `a = KX·D` with D diagonal, i.e. aᵀa ≐ X.
pub fn ata_x_form(a: &Mat2) -> Option<(IsotropicKind, Mat2)> {
    if !a.is_invertible() {
        return None;
    }
    let gram = &a.transpose() * a;
    if !gram.is_antidiagonal() {
        return None;
    }
    let d = Mat2::diag(a.m[0][0].clone(), a.m[0][1].clone());
    if a.m[0][0].is_zero() || a.m[0][1].is_zero() {
        return None;
    }
    [
        (IsotropicKind::KD, Mat2::k()),
        (IsotropicKind::KXD, Mat2::kx()),
    ]
    .into_iter()
    .find(|(_, base)| &(base * &d) == a)
    .map(|(kind, _)| (kind, d))
}
