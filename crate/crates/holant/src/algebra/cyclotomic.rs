//! Exact arithmetic in the cyclotomic field Q(ζ) with ζ = e^{2πi/24}.
//!
//! Elements are stored over the power basis 1, ζ, …, ζ⁷ with a common
//! positive denominator. The minimal polynomial of ζ is x⁸ − x⁴ + 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Degree of the field over Q.
pub const DEGREE: usize = 8;
/// Order of the root of unity generating the field.
pub const CONDUCTOR: usize = 24;

/// Units of Z/24, i.e. the exponents of the Galois automorphisms.
const UNITS: [usize; 8] = [1, 5, 7, 11, 13, 17, 19, 23];

/// An element of Q(ζ₂₄) in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    num: [BigInt; DEGREE],
    den: BigInt,
}

/// ζ^m in the power basis, for m in 0..24.
fn power_table() -> &'static [[i64; DEGREE]; CONDUCTOR] {
    static TABLE: OnceLock<[[i64; DEGREE]; CONDUCTOR]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[0i64; DEGREE]; CONDUCTOR];
        let mut cur = [0i64; DEGREE];
        cur[0] = 1;
        for row in table.iter_mut() {
            *row = cur;
            // multiply by ζ: shift and fold ζ⁸ = ζ⁴ − 1
            let top = cur[DEGREE - 1];
            for k in (1..DEGREE).rev() {
                cur[k] = cur[k - 1];
            }
            cur[0] = -top;
            cur[4] += top;
        }
        table
    })
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo {
            num: Default::default(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let mut c = Self::zero();
        c.num[0] = BigInt::from(n);
        c
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let mut num: [BigInt; DEGREE] = Default::default();
        num[0] = r.numer().clone();
        Self::normalised(num, r.denom().clone())
    }

    /// Builds an element from rational coefficients over the power basis.
    pub fn from_coefficients(coeffs: &[BigRational; DEGREE]) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num: [BigInt; DEGREE] = Default::default();
        for (slot, c) in num.iter_mut().zip(coeffs) {
            *slot = c.numer() * (&den / c.denom());
        }
        Self::normalised(num, den)
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let m = k.rem_euclid(CONDUCTOR as i64) as usize;
        let row = &power_table()[m];
        let mut num: [BigInt; DEGREE] = Default::default();
        for (slot, &v) in num.iter_mut().zip(row) {
            *slot = BigInt::from(v);
        }
        Cyclo {
            num,
            den: BigInt::one(),
        }
    }

    /// The imaginary unit i = ζ⁶.
    pub fn i() -> Self {
        Self::zeta_pow(6)
    }

    /// The primitive cube root of unity ω = ζ⁸.
    pub fn omega() -> Self {
        Self::zeta_pow(8)
    }

    fn normalised(mut num: [BigInt; DEGREE], mut den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            for n in num.iter_mut() {
                *n = &*n / &g;
            }
            den /= &g;
        }
        if num.iter().all(Zero::is_zero) {
            den = BigInt::one();
        }
        Cyclo { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// Coefficient of ζ^k as a rational.
    pub fn coefficient(&self, k: usize) -> BigRational {
        BigRational::new(self.num[k].clone(), self.den.clone())
    }

    pub fn coefficients(&self) -> [BigRational; DEGREE] {
        std::array::from_fn(|k| self.coefficient(k))
    }

    /// Returns the value as a rational if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(self.coefficient(0))
        } else {
            None
        }
    }

    /// Applies the Galois automorphism ζ ↦ ζ^j (j must be coprime to 24).
    pub fn galois(&self, j: usize) -> Self {
        debug_assert!(j.gcd(&CONDUCTOR) == 1);
        let table = power_table();
        let mut num: [BigInt; DEGREE] = Default::default();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &table[(k * j) % CONDUCTOR];
            for (slot, &v) in num.iter_mut().zip(row) {
                if v != 0 {
                    *slot += c * v;
                }
            }
        }
        Cyclo {
            num,
            den: self.den.clone(),
        }
    }

    /// Complex conjugate (the automorphism ζ ↦ ζ⁻¹).
    pub fn conj(&self) -> Self {
        self.galois(CONDUCTOR - 1)
    }

    /// Field norm down to Q.
    pub fn norm(&self) -> BigRational {
        let mut prod = self.clone();
        for &j in &UNITS[1..] {
            prod = &prod * &self.galois(j);
        }
        prod.as_rational().expect("norm is rational")
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut others = Self::one();
        for &j in &UNITS[1..] {
            others = &others * &self.galois(j);
        }
        let n = (&others * self).as_rational().expect("norm is rational");
        let scale = Self::from_rational(&n.recip());
        Some(&others * &scale)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Numerical value in the standard embedding ζ ↦ e^{2πi/24}.
    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for k in 0..DEGREE {
            if self.num[k].is_zero() {
                continue;
            }
            let c = self.coefficient(k).to_f64().unwrap_or(f64::NAN);
            z += Complex64::from_polar(c, std::f64::consts::TAU * k as f64 / CONDUCTOR as f64);
        }
        z
    }

    /// Numerical value under the embedding ζ ↦ e^{2πij/24}.
    fn embed(&self, j: usize) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for k in 0..DEGREE {
            if self.num[k].is_zero() {
                continue;
            }
            let c = self.coefficient(k).to_f64().unwrap_or(f64::NAN);
            let angle = std::f64::consts::TAU * ((k * j) % CONDUCTOR) as f64 / CONDUCTOR as f64;
            z += Complex64::from_polar(c, angle);
        }
        z
    }

    /// If self = ζ^k for some k, returns k in 0..24.
    pub fn root_of_unity_exponent(&self) -> Option<usize> {
        (0..CONDUCTOR).find(|&k| *self == Self::zeta_pow(k as i64))
    }

    /// Multiplicative order if self is a root of unity.
    pub fn multiplicative_order(&self) -> Option<usize> {
        let k = self.root_of_unity_exponent()?;
        Some(CONDUCTOR / k.gcd(&CONDUCTOR))
    }

    /// All exact n-th roots lying in the field, ordered by increasing
    /// absolute argument in the standard embedding.
    ///
    /// Candidates are seeded numerically from the eight complex embeddings
    /// and accepted only after the exact check `r^n == self`, so the result
    /// never contains a false root. Roots whose scaled integer coordinates
    /// exceed double precision are missed.
    pub fn nth_roots(&self, n: u32) -> Vec<Self> {
        if n == 0 {
            return Vec::new();
        }
        if self.is_zero() {
            return vec![Self::zero()];
        }
        if n == 1 {
            return vec![self.clone()];
        }
        // r^n = A/d with A integral gives (d·r)^n = A·d^{n−1}, and d·r is an
        // algebraic integer, so its coordinates are integers
        let d = Cyclo::from_rational(&BigRational::from_integer(self.den.clone()));
        let target = self * &d.pow(n);
        let images: Vec<Complex64> = UNITS.iter().map(|&j| target.embed(j)).collect();
        let inv = embedding_inverse();
        let per: Vec<Vec<Complex64>> = images
            .iter()
            .map(|z| {
                let (r, theta) = z.to_polar();
                let rr = r.powf(1.0 / n as f64);
                (0..n)
                    .map(|t| {
                        Complex64::from_polar(
                            rr,
                            (theta + std::f64::consts::TAU * t as f64) / n as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        // embeddings e and 7−e are complex conjugate, so only half of the
        // branch choices are free
        const HALF: usize = DEGREE / 2;
        let mut found: Vec<Self> = Vec::new();
        let total = (n as usize).pow(HALF as u32);
        let mut choice = [0usize; HALF];
        for _ in 0..total {
            let vals: [Complex64; DEGREE] = std::array::from_fn(|e| {
                if e < HALF {
                    per[e][choice[e]]
                } else {
                    per[DEGREE - 1 - e][choice[DEGREE - 1 - e]].conj()
                }
            });
            if let Some(cand) = recognise(inv, &vals) {
                if cand.pow(n) == target {
                    let root = &cand * &d.inv().expect("denominator is nonzero");
                    if !found.contains(&root) {
                        found.push(root);
                    }
                }
            }
            for digit in choice.iter_mut() {
                *digit += 1;
                if *digit < n as usize {
                    break;
                }
                *digit = 0;
            }
        }
        found.sort_by(|a, b| {
            let ka = arg_key(a.to_complex());
            let kb = arg_key(b.to_complex());
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        });
        found
    }
}

fn arg_key(z: Complex64) -> (f64, f64) {
    let a = z.arg();
    // ties between ±θ resolved towards the positive angle
    (a.abs(), -a)
}

/// Inverse of the embedding matrix V[e][k] = σ_e(ζ^k).
fn embedding_inverse() -> &'static [[Complex64; DEGREE]; DEGREE] {
    static INV: OnceLock<[[Complex64; DEGREE]; DEGREE]> = OnceLock::new();
    INV.get_or_init(|| {
        let mut a = [[Complex64::new(0.0, 0.0); 2 * DEGREE]; DEGREE];
        for (e, &j) in UNITS.iter().enumerate() {
            for k in 0..DEGREE {
                let angle = std::f64::consts::TAU * ((k * j) % CONDUCTOR) as f64 / CONDUCTOR as f64;
                a[e][k] = Complex64::from_polar(1.0, angle);
            }
            a[e][DEGREE + e] = Complex64::new(1.0, 0.0);
        }
        for col in 0..DEGREE {
            let pivot = (col..DEGREE)
                .max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            let p = a[col][col];
            for v in a[col].iter_mut() {
                *v /= p;
            }
            for row in 0..DEGREE {
                if row != col {
                    let f = a[row][col];
                    if f.norm() > 0.0 {
                        for c in 0..2 * DEGREE {
                            let t = a[col][c];
                            a[row][c] -= f * t;
                        }
                    }
                }
            }
        }
        std::array::from_fn(|k| std::array::from_fn(|e| a[k][DEGREE + e]))
    })
}

/// Recovers integer power-basis coordinates from embedding images.
fn recognise(inv: &[[Complex64; DEGREE]; DEGREE], vals: &[Complex64; DEGREE]) -> Option<Cyclo> {
    let mut coeffs: [BigRational; DEGREE] = Default::default();
    for k in 0..DEGREE {
        let mut c = Complex64::new(0.0, 0.0);
        for e in 0..DEGREE {
            c += inv[k][e] * vals[e];
        }
        let r = c.re.round();
        if !r.is_finite() || r.abs() > 9.0e15 || (c.re - r).abs() > 1e-6 * c.re.abs().max(1.0) {
            return None;
        }
        coeffs[k] = BigRational::from_integer(BigInt::from(r as i64));
    }
    Some(Cyclo::from_coefficients(&coeffs))
}

impl Default for Cyclo {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let num: [BigInt; DEGREE] =
            std::array::from_fn(|k| &self.num[k] * &rhs.den + &rhs.num[k] * &self.den);
        Cyclo::normalised(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        self + &(-rhs)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            num: std::array::from_fn(|k| -&self.num[k]),
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        if self.is_zero() || rhs.is_zero() {
            return Cyclo::zero();
        }
        let mut wide: [BigInt; 2 * DEGREE - 1] = Default::default();
        for (a, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in rhs.num.iter().enumerate() {
                if !y.is_zero() {
                    wide[a + b] += x * y;
                }
            }
        }
        // fold ζ⁸ = ζ⁴ − 1 from the top down
        for k in (DEGREE..2 * DEGREE - 1).rev() {
            let c = std::mem::take(&mut wide[k]);
            if c.is_zero() {
                continue;
            }
            wide[k - 4] += &c;
            wide[k - 8] -= &c;
        }
        let num: [BigInt; DEGREE] = std::array::from_fn(|k| std::mem::take(&mut wide[k]));
        Cyclo::normalised(num, &self.den * &rhs.den)
    }
}

impl fmt::Display for Cyclo {
    /// Writes the element in the scalar literal grammar, e.g. `1/2*w^3-i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in 0..DEGREE {
            let c = self.coefficient(k);
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let unit = match k {
                0 => None,
                6 => Some("i".to_string()),
                _ => Some(format!("w^{k}")),
            };
            match unit {
                None => write!(f, "{mag}")?,
                Some(u) if mag.is_one() => write!(f, "{u}")?,
                Some(u) => write!(f, "{mag}*{u}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: i64) -> Cyclo {
        Cyclo::zeta_pow(k)
    }

    #[test]
    fn root_of_unity_identities() {
        assert_eq!(z(1).pow(24), Cyclo::one());
        assert_eq!(z(1).pow(12), Cyclo::from_int(-1));
        assert_eq!(z(6), Cyclo::i());
        assert_eq!(&Cyclo::i() * &Cyclo::i(), Cyclo::from_int(-1));
        let w = Cyclo::omega();
        assert_eq!(w.pow(3), Cyclo::one());
        assert_ne!(w, Cyclo::one());
        // 1 + ω + ω² = 0
        let s = &(&Cyclo::one() + &w) + &w.pow(2);
        assert!(s.is_zero());
        // (e^{iπ/4})² = i
        assert_eq!(z(3).pow(2), Cyclo::i());
    }

    #[test]
    fn numeric_embedding_matches() {
        let v = z(3).to_complex();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - Complex64::new(r, r)).norm() < 1e-12);
        let w = Cyclo::omega().to_complex();
        assert!((w - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_and_norm() {
        let a = &(&z(1) + &Cyclo::from_int(3)) - &z(5);
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert!(Cyclo::zero().inv().is_none());
        assert_eq!(
            Cyclo::from_int(2).norm(),
            BigRational::from_integer(256.into())
        );
    }

    #[test]
    fn conjugation() {
        assert_eq!(Cyclo::i().conj(), -&Cyclo::i());
        let a = &z(1) + &Cyclo::from_int(2);
        let n = (&a * &a.conj()).to_complex();
        assert!(n.im.abs() < 1e-12);
    }

    #[test]
    fn orders() {
        assert_eq!(Cyclo::from_int(-1).multiplicative_order(), Some(2));
        assert_eq!(Cyclo::omega().multiplicative_order(), Some(3));
        assert_eq!(z(3).multiplicative_order(), Some(8));
        assert_eq!(Cyclo::from_int(2).multiplicative_order(), None);
    }

    #[test]
    fn square_and_cube_roots() {
        let four = Cyclo::from_int(4);
        let r = four.nth_roots(2);
        assert_eq!(r[0], Cyclo::from_int(2));
        assert_eq!(r.len(), 2);
        let m1 = Cyclo::from_int(-1);
        assert!(m1.nth_roots(2).contains(&Cyclo::i()));
        // ζ⁸ has three cube roots in the field
        let roots = z(3).nth_roots(3);
        assert_eq!(roots[0], z(1));
        assert_eq!(roots.len(), 3);
        // √2 lives in the field, √5 does not
        assert_eq!(Cyclo::from_int(2).nth_roots(2).len(), 2);
        assert!(Cyclo::from_int(5).nth_roots(2).is_empty());
        assert!(Cyclo::from_int(2).nth_roots(3).is_empty());
        let q = Cyclo::from_rational(&BigRational::new(4.into(), 9.into()));
        assert_eq!(
            q.nth_roots(2)[0],
            Cyclo::from_rational(&BigRational::new(2.into(), 3.into()))
        );
        let c = Cyclo::from_rational(&BigRational::new((-8).into(), 27.into()));
        assert!(c
            .nth_roots(3)
            .contains(&Cyclo::from_rational(&BigRational::new(
                (-2).into(),
                3.into()
            ))));
    }

    #[test]
    fn display_grammar() {
        let a = &(&Cyclo::from_int(1) + &Cyclo::i()) - &z(3);
        assert_eq!(a.to_string(), "1-w^3+i");
    }
}
