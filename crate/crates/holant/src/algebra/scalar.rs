//! Scalars with an exact cyclotomic backend and a floating-point fallback.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::cyclotomic::Cyclo;
use crate::error::{Error, Result};

/// Absolute tolerance used by the float backend.
pub const EPSILON: f64 = 1e-9;

/// Which arithmetic backend a scalar uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

/// A scalar value: an exact element of Q(ζ₂₄) or a complex double.
///
/// Binary operations between an exact and a float operand promote the exact
/// one, so a computation that starts in float mode stays there. Equality in
/// float mode uses the absolute tolerance [`EPSILON`].
#[derive(Clone)]
pub enum Scalar {
    Exact(Cyclo),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Cyclo::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Cyclo::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Cyclo::from_int(n))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        let r = num_rational::BigRational::new(p.into(), q.into());
        Scalar::Exact(Cyclo::from_rational(&r))
    }

    /// ζ^k with ζ = e^{2πi/24}.
    pub fn zeta(k: i64) -> Self {
        Scalar::Exact(Cyclo::zeta_pow(k))
    }

    pub fn i() -> Self {
        Self::zeta(6)
    }

    pub fn omega() -> Self {
        Self::zeta(8)
    }

    /// e^{iπ/4}.
    pub fn zeta8() -> Self {
        Self::zeta(3)
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    /// Same value represented in the requested backend.
    pub fn to_backend(&self, backend: Backend) -> Self {
        match (self, backend) {
            (Scalar::Exact(c), Backend::Float) => Scalar::Float(c.to_complex()),
            (s, Backend::Exact) if s.backend() == Backend::Exact => s.clone(),
            (Scalar::Float(_), Backend::Exact) => {
                panic!("float scalars cannot be converted to the exact backend")
            }
            (s, _) => s.clone(),
        }
    }

    /// 0 or 1 in the same backend as `self`.
    pub fn zero_like(&self) -> Self {
        Self::zero().to_backend(self.backend())
    }

    pub fn one_like(&self) -> Self {
        Self::one().to_backend(self.backend())
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Cyclo> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.norm() <= EPSILON,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_one(),
            Scalar::Float(z) => (z - Complex64::new(1.0, 0.0)).norm() <= EPSILON,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            Scalar::Exact(c) => c
                .inv()
                .map(Scalar::Exact)
                .ok_or(Error::Precondition("division by zero".into())),
            Scalar::Float(z) => {
                if z.norm() <= EPSILON {
                    Err(Error::Precondition("division by zero".into()))
                } else {
                    Ok(Scalar::Float(z.inv()))
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.pow(e)),
            Scalar::Float(z) => Scalar::Float(z.powu(e)),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// All n-th roots available in this backend, principal root first.
    ///
    /// The exact backend returns only roots lying in Q(ζ₂₄) (possibly none);
    /// the float backend returns all n of them.
    pub fn nth_roots(&self, n: u32) -> Vec<Self> {
        match self {
            Scalar::Exact(c) => c.nth_roots(n).into_iter().map(Scalar::Exact).collect(),
            Scalar::Float(z) => {
                if z.norm() <= EPSILON {
                    return vec![Scalar::float(0.0, 0.0)];
                }
                let (r, theta) = z.to_polar();
                let rr = r.powf(1.0 / n as f64);
                let mut roots: Vec<Complex64> = (0..n)
                    .map(|t| {
                        Complex64::from_polar(
                            rr,
                            (theta + std::f64::consts::TAU * t as f64) / n as f64,
                        )
                    })
                    .collect();
                roots.sort_by(|a, b| {
                    let ka = (a.arg().abs(), -a.arg());
                    let kb = (b.arg().abs(), -b.arg());
                    ka.partial_cmp(&kb).unwrap()
                });
                roots.into_iter().map(Scalar::Float).collect()
            }
        }
    }

    /// Principal n-th root, if one exists in this backend.
    pub fn nth_root(&self, n: u32) -> Option<Self> {
        self.nth_roots(n).into_iter().next()
    }

    /// If the value is a root of unity ζ^k (k in 0..24), returns k.
    ///
    /// Float values are matched against the 24 candidates with tolerance.
    pub fn root_of_unity_exponent(&self) -> Option<usize> {
        match self {
            Scalar::Exact(c) => c.root_of_unity_exponent(),
            Scalar::Float(z) => (0..24).find(|&k| {
                let w = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 24.0);
                (z - w).norm() <= EPSILON
            }),
        }
    }

    /// Multiplicative order, if the value is a root of unity of order dividing 24.
    pub fn multiplicative_order(&self) -> Option<usize> {
        let k = self.root_of_unity_exponent()?;
        let g = num_integer::gcd(k, 24);
        Some(24 / g)
    }

    /// Exponent e in 0..4 with self = i^e, if any.
    pub fn power_of_i(&self) -> Option<u8> {
        let k = self.root_of_unity_exponent()?;
        if k % 6 == 0 {
            Some((k / 6) as u8)
        } else {
            None
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        exact: impl Fn(&Cyclo, &Cyclo) -> Cyclo,
        float: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Float(float(self.to_complex(), rhs.to_complex())),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= EPSILON,
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Cyclo> for Scalar {
    fn from(c: Cyclo) -> Self {
        Scalar::Exact(c)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a * b, |a, b| a * b)
    }
}

/// Division panics on a zero divisor; use [`Scalar::inv`] to handle it.
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Float(z) => {
                let re = if z.re.abs() < EPSILON { 0.0 } else { z.re };
                let im = if z.im.abs() < EPSILON { 0.0 } else { z.im };
                if im == 0.0 {
                    write!(f, "{re}")
                } else if re == 0.0 {
                    write!(f, "{im}i")
                } else if im < 0.0 {
                    write!(f, "{re}-{}i", -im)
                } else {
                    write!(f, "{re}+{im}i")
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses a scalar literal.
///
/// Exact grammar: terms `p/q`, `p/q*w^k`, `w^k`, `i`, `p*i`, joined by `+`
/// or `-`. Float grammar (`Backend::Float`): `a`, `bi`, `a+bi`, `a-bi`.
pub fn parse_scalar(text: &str, backend: Backend) -> Result<Scalar> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar literal".into()));
    }
    match backend {
        Backend::Exact => parse_exact(&s).map(Scalar::Exact),
        Backend::Float => parse_float(&s).map(Scalar::Float),
    }
}

fn split_terms(s: &str) -> Vec<(bool, &str)> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut neg = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let after_exp =
            i > 0 && (bytes[i - 1] == b'^' || bytes[i - 1] == b'e' || bytes[i - 1] == b'E');
        if (c == b'+' || c == b'-') && !after_exp {
            if i > start {
                out.push((neg, &s[start..i]));
            } else if i > 0 {
                out.push((neg, ""));
            }
            neg = c == b'-';
            start = i + 1;
        }
        i += 1;
    }
    out.push((neg, &s[start..]));
    out
}

fn parse_rational(s: &str) -> Result<num_rational::BigRational> {
    let bad = || Error::Parse(format!("malformed rational '{s}'"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: num_bigint::BigInt = p.parse().map_err(|_| bad())?;
    let q: num_bigint::BigInt = q.parse().map_err(|_| bad())?;
    if num_traits::Zero::is_zero(&q) {
        return Err(bad());
    }
    Ok(num_rational::BigRational::new(p, q))
}

fn parse_unit(s: &str) -> Result<Cyclo> {
    if s == "i" {
        return Ok(Cyclo::i());
    }
    if let Some(k) = s.strip_prefix("w^") {
        let k: i64 = k
            .parse()
            .map_err(|_| Error::Parse(format!("malformed exponent in '{s}'")))?;
        return Ok(Cyclo::zeta_pow(k));
    }
    if s == "w" {
        return Ok(Cyclo::zeta_pow(1));
    }
    Err(Error::Parse(format!("unknown unit '{s}'")))
}

fn parse_exact(s: &str) -> Result<Cyclo> {
    let mut acc = Cyclo::zero();
    for (neg, term) in split_terms(s) {
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in '{s}'")));
        }
        let value = if let Some((coef, unit)) = term.split_once('*') {
            let r = Cyclo::from_rational(&parse_rational(coef)?);
            &r * &parse_unit(unit)?
        } else if term.starts_with('w') || term == "i" {
            parse_unit(term)?
        } else {
            Cyclo::from_rational(&parse_rational(term)?)
        };
        acc = if neg { &acc - &value } else { &acc + &value };
    }
    Ok(acc)
}

fn parse_float(s: &str) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (neg, term) in split_terms(s) {
        let sign = if neg { -1.0 } else { 1.0 };
        let bad = || Error::Parse(format!("malformed float literal '{s}'"));
        if let Some(im) = term.strip_suffix('i') {
            let v: f64 = if im.is_empty() {
                1.0
            } else {
                im.trim_end_matches('*').parse().map_err(|_| bad())?
            };
            acc.im += sign * v;
        } else {
            let v: f64 = term.parse().map_err(|_| bad())?;
            acc.re += sign * v;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_exact_literals() {
        let half_z3 = parse_scalar("1/2*w^3", Backend::Exact).unwrap();
        assert_eq!(half_z3, Scalar::rational(1, 2) * Scalar::zeta8());
        let one_plus_i = parse_scalar("1 + i", Backend::Exact).unwrap();
        assert_eq!(one_plus_i, Scalar::one() + Scalar::i());
        assert_eq!(parse_scalar("-3", Backend::Exact).unwrap(), Scalar::int(-3));
        assert_eq!(parse_scalar("w^6", Backend::Exact).unwrap(), Scalar::i());
        assert_eq!(
            parse_scalar("2*w^-1", Backend::Exact).unwrap(),
            Scalar::int(2) * Scalar::zeta(23)
        );
        assert!(parse_scalar("1/0", Backend::Exact).is_err());
        assert!(parse_scalar("x", Backend::Exact).is_err());
        assert!(parse_scalar("1+", Backend::Exact).is_err());
    }

    #[test]
    fn display_round_trips() {
        for k in 0..24 {
            let v = Scalar::rational(3, 7) * Scalar::zeta(k) - Scalar::int(2);
            let back = parse_scalar(&v.to_string(), Backend::Exact).unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn parse_float_literals() {
        let z = parse_scalar("1.5-2i", Backend::Float).unwrap();
        assert_eq!(z, Scalar::float(1.5, -2.0));
        assert_eq!(
            parse_scalar("i", Backend::Float).unwrap(),
            Scalar::float(0.0, 1.0)
        );
        assert_eq!(
            parse_scalar("1e-3", Backend::Float).unwrap(),
            Scalar::float(0.001, 0.0)
        );
    }

    #[test]
    fn float_tolerance() {
        let a = Scalar::float(1.0, 0.0);
        let b = Scalar::float(1.0 + 1e-12, 0.0);
        assert_eq!(a, b);
        assert_ne!(a, Scalar::float(1.0 + 1e-6, 0.0));
        assert!(Scalar::float(1e-12, 0.0).is_zero());
    }

    #[test]
    fn promotion_stays_float() {
        let s = Scalar::int(2) * Scalar::float(0.5, 0.0);
        assert_eq!(s.backend(), Backend::Float);
        assert!(s.is_one());
    }

    #[test]
    fn powers_of_i() {
        assert_eq!(Scalar::i().power_of_i(), Some(1));
        assert_eq!(Scalar::int(-1).power_of_i(), Some(2));
        assert_eq!(Scalar::zeta8().power_of_i(), None);
        assert_eq!(Scalar::int(2).power_of_i(), None);
        assert_eq!(Scalar::omega().multiplicative_order(), Some(3));
    }
}
