//! Constraint functions on Boolean inputs stored as dense value vectors.
//!
//! Index convention: the first argument is the most significant bit, so the
//! value at input (x₀, …, x_{n−1}) lives at index Σ xⱼ·2^{n−1−j}. Argument
//! positions are 0-based throughout the library.

use std::fmt;

use crate::algebra::{Backend, Mat2, Scalar};
use crate::error::{Error, Result};

/// Bit of argument `pos` in the input index `x` of an arity-`n` signature.
#[inline]
pub fn bit(x: usize, n: usize, pos: usize) -> usize {
    (x >> (n - 1 - pos)) & 1
}

/// Index of the input whose argument bits are `bits` (first = most significant).
pub fn index_of(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
}

/// Splits an index into argument bits.
pub fn bits_of(x: usize, n: usize) -> Vec<usize> {
    (0..n).map(|p| bit(x, n, p)).collect()
}

/// A function {0,1}ⁿ → scalars, stored as 2ⁿ values.
#[derive(Clone, PartialEq)]
pub struct Signature {
    arity: usize,
    values: Vec<Scalar>,
}

/// Named signatures from the standard vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardName {
    Eq,
    One,
    Neq,
    Delta0,
    Delta1,
    DeltaPlus,
    DeltaMinus,
    DeltaI,
    DeltaMinusI,
}

impl Signature {
    pub fn new(arity: usize, values: Vec<Scalar>) -> Result<Self> {
        if values.len() != 1 << arity {
            return Err(Error::ArityMismatch {
                expected: 1 << arity,
                found: values.len(),
            });
        }
        Ok(Signature { arity, values })
    }

    /// Builds a signature from its value list, inferring the arity.
    pub fn from_values(values: Vec<Scalar>) -> Result<Self> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::WrongShape(format!(
                "{len} values is not a power of two"
            )));
        }
        Self::new(len.trailing_zeros() as usize, values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::from_values(values.iter().map(|&v| Scalar::int(v)).collect())
            .expect("value count must be a power of two")
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(usize) -> Scalar) -> Self {
        Signature {
            arity,
            values: (0..1usize << arity).map(&mut f).collect(),
        }
    }

    /// Arity-0 signature holding a single value.
    pub fn constant(value: Scalar) -> Self {
        Signature {
            arity: 0,
            values: vec![value],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn value(&self, x: usize) -> &Scalar {
        &self.values[x]
    }

    pub fn value_at(&self, bits: &[usize]) -> &Scalar {
        &self.values[index_of(bits)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    /// Errors with [`Error::ZeroSignature`] if the signature vanishes.
    pub fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroSignature)
        } else {
            Ok(())
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&x| !self.values[x].is_zero())
            .collect()
    }

    pub fn backend(&self) -> Backend {
        if self.values.iter().any(|v| v.backend() == Backend::Float) {
            Backend::Float
        } else {
            Backend::Exact
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        Signature {
            arity: self.arity,
            values: self.values.iter().map(|v| v.to_backend(backend)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Signature {
            arity: self.arity,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// True if the value depends only on the Hamming weight of the input.
    pub fn is_symmetric(&self) -> bool {
        to_symmetric(self).is_some()
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.arity {
            Err(Error::InvalidSlot {
                index: slot,
                arity: self.arity,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature{}[", self.arity)?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match to_symmetric(self) {
            Some(sym) if self.arity > 0 => write!(f, "{sym}"),
            _ => fmt::Debug::fmt(self, f),
        }
    }
}

/// A symmetric signature given by its values on each Hamming weight.
#[derive(Clone, PartialEq)]
pub struct SymSignature {
    values: Vec<Scalar>,
}

impl SymSignature {
    pub fn new(values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::WrongShape("empty symmetric signature".into()));
        }
        Ok(SymSignature { values })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| Scalar::int(v)).collect()).expect("nonempty value list")
    }

    pub fn arity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn get(&self, weight: usize) -> &Scalar {
        &self.values[weight]
    }

    pub fn expand(&self) -> Signature {
        Signature::from_fn(self.arity(), |x| {
            self.values[x.count_ones() as usize].clone()
        })
    }
}

impl fmt::Debug for SymSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for SymSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Returns the named standard signature.
pub fn standard(name: StandardName, arity: usize) -> Result<Signature> {
    use StandardName::*;
    let fixed = |n: usize| {
        if arity == n {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                expected: n,
                found: arity,
            })
        }
    };
    let unary = |a: Scalar, b: Scalar| Signature::new(1, vec![a, b]);
    match name {
        Eq => {
            if arity == 0 {
                return Err(Error::Precondition("EQ needs arity at least 1".into()));
            }
            let last = (1usize << arity) - 1;
            Ok(Signature::from_fn(arity, |x| {
                Scalar::int((x == 0 || x == last) as i64)
            }))
        }
        One => {
            if arity == 0 {
                return Err(Error::Precondition("ONE needs arity at least 1".into()));
            }
            Ok(Signature::from_fn(arity, |x| {
                Scalar::int((x.count_ones() == 1) as i64)
            }))
        }
        Neq => {
            fixed(2)?;
            Ok(Signature::from_ints(&[0, 1, 1, 0]))
        }
        Delta0 => fixed(1).and_then(|_| unary(Scalar::one(), Scalar::zero())),
        Delta1 => fixed(1).and_then(|_| unary(Scalar::zero(), Scalar::one())),
        DeltaPlus => fixed(1).and_then(|_| unary(Scalar::one(), Scalar::one())),
        DeltaMinus => fixed(1).and_then(|_| unary(Scalar::one(), Scalar::int(-1))),
        DeltaI => fixed(1).and_then(|_| unary(Scalar::one(), Scalar::i())),
        DeltaMinusI => fixed(1).and_then(|_| unary(Scalar::one(), -Scalar::i())),
    }
}

/// Shorthand constructors used throughout the crate and its tests.
pub mod named {
    use super::*;

    pub fn eq(n: usize) -> Signature {
        standard(StandardName::Eq, n).expect("arity at least 1")
    }
    pub fn one(n: usize) -> Signature {
        standard(StandardName::One, n).expect("arity at least 1")
    }
    pub fn neq() -> Signature {
        standard(StandardName::Neq, 2).unwrap()
    }
    pub fn delta0() -> Signature {
        standard(StandardName::Delta0, 1).unwrap()
    }
    pub fn delta1() -> Signature {
        standard(StandardName::Delta1, 1).unwrap()
    }
    pub fn delta_plus() -> Signature {
        standard(StandardName::DeltaPlus, 1).unwrap()
    }
    pub fn delta_minus() -> Signature {
        standard(StandardName::DeltaMinus, 1).unwrap()
    }
    pub fn delta_i() -> Signature {
        standard(StandardName::DeltaI, 1).unwrap()
    }
    /// The four unaries searched by the extraction procedures, in search order.
    pub fn pinning_unaries() -> [Signature; 4] {
        [delta0(), delta1(), delta_plus(), delta_minus()]
    }
}

/// The weight-indexed form of `f`, if `f` is symmetric.
pub fn to_symmetric(f: &Signature) -> Option<SymSignature> {
    let n = f.arity();
    let mut by_weight: Vec<Option<&Scalar>> = vec![None; n + 1];
    for (x, v) in f.values().iter().enumerate() {
        let w = x.count_ones() as usize;
        match by_weight[w] {
            None => by_weight[w] = Some(v),
            Some(prev) if prev == v => {}
            Some(_) => return None,
        }
    }
    Some(SymSignature {
        values: by_weight.into_iter().map(|v| v.unwrap().clone()).collect(),
    })
}

/// The nonzero c with f = c·g, if any. Two zero signatures give c = 1.
pub fn scale_equiv(f: &Signature, g: &Signature) -> Result<Option<Scalar>> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: g.arity(),
        });
    }
    let a: Vec<&Scalar> = f.values().iter().collect();
    let b: Vec<&Scalar> = g.values().iter().collect();
    Ok(crate::algebra::mat2::scale_factor(&a, &b))
}

/// True if f and g have equal arity and differ by a nonzero scalar.
pub fn proj_eq(f: &Signature, g: &Signature) -> bool {
    matches!(scale_equiv(f, g), Ok(Some(_)))
}

/// Tensor product; f's arguments come first.
pub fn tensor(f: &Signature, g: &Signature) -> Signature {
    let m = g.arity();
    Signature::from_fn(f.arity() + m, |x| {
        f.value(x >> m) * g.value(x & ((1 << m) - 1))
    })
}

/// Tensor product of a list of signatures, in order.
pub fn tensor_all<'a>(sigs: impl IntoIterator<Item = &'a Signature>) -> Signature {
    sigs.into_iter()
        .fold(Signature::constant(Scalar::one()), |acc, s| tensor(&acc, s))
}

fn check_permutation(rho: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if rho.len() != n {
        return Err(Error::InvalidPermutation(rho.to_vec()));
    }
    for &r in rho {
        if r >= n || seen[r] {
            return Err(Error::InvalidPermutation(rho.to_vec()));
        }
        seen[r] = true;
    }
    Ok(())
}

/// f_ρ(x₀, …, x_{n−1}) = f(x_{ρ(0)}, …, x_{ρ(n−1)}).
pub fn permute(f: &Signature, rho: &[usize]) -> Result<Signature> {
    let n = f.arity();
    check_permutation(rho, n)?;
    Ok(Signature::from_fn(n, |x| {
        let bits: Vec<usize> = rho.iter().map(|&r| bit(x, n, r)).collect();
        f.value_at(&bits).clone()
    }))
}

/// Reorders arguments so that new argument k is old argument `order[k]`.
///
/// This is the inverse view of [`permute`]: it moves arguments around rather
/// than substituting variables.
pub fn reorder(f: &Signature, order: &[usize]) -> Result<Signature> {
    let n = f.arity();
    check_permutation(order, n)?;
    Ok(Signature::from_fn(n, |x| {
        let mut old = vec![0; n];
        for (k, &o) in order.iter().enumerate() {
            old[o] = bit(x, n, k);
        }
        f.value_at(&old).clone()
    }))
}

/// A dense matrix of scalars (rows of equal length).
pub type Matrix = Vec<Vec<Scalar>>;

/// Matrix with rows indexed by the arguments in `rows` (in the given order)
/// and columns by the remaining arguments in increasing order.
pub fn matricize(f: &Signature, rows: &[usize]) -> Result<Matrix> {
    let n = f.arity();
    if rows.is_empty() || rows.len() >= n {
        return Err(Error::Precondition(
            "row set must be a proper nonempty subset of the arguments".into(),
        ));
    }
    for (k, &r) in rows.iter().enumerate() {
        f.check_slot(r)?;
        if rows[..k].contains(&r) {
            return Err(Error::InvalidPermutation(rows.to_vec()));
        }
    }
    let cols: Vec<usize> = (0..n).filter(|p| !rows.contains(p)).collect();
    let mut out = vec![vec![Scalar::zero(); 1 << cols.len()]; 1 << rows.len()];
    for x in 0..1usize << n {
        let r = index_of(&rows.iter().map(|&p| bit(x, n, p)).collect::<Vec<_>>());
        let c = index_of(&cols.iter().map(|&p| bit(x, n, p)).collect::<Vec<_>>());
        out[r][c] = f.value(x).clone();
    }
    Ok(out)
}

/// Rank by Gaussian elimination.
pub fn rank(matrix: &Matrix) -> usize {
    let mut a = matrix.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("pivot is nonzero");
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            for j in c..cols {
                let t = &factor * &a[r][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Applies m to every argument: (m^{⊗n}) f, or (mᵀ)^{⊗n} f.
pub fn holographic(m: &Mat2, f: &Signature, transpose: bool) -> Result<Signature> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let m = if transpose { m.transpose() } else { m.clone() };
    let mats = vec![m; f.arity()];
    apply_local(&mats, f)
}

/// Applies `mats[j]` to argument j.
pub fn apply_local(mats: &[Mat2], f: &Signature) -> Result<Signature> {
    let n = f.arity();
    if mats.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: mats.len(),
        });
    }
    let mut values = f.values().to_vec();
    for (pos, m) in mats.iter().enumerate() {
        let stride = 1usize << (n - 1 - pos);
        for x in 0..values.len() {
            if x & stride != 0 {
                continue;
            }
            let v0 = values[x].clone();
            let v1 = values[x | stride].clone();
            values[x] = m.get(0, 0) * &v0 + m.get(0, 1) * &v1;
            values[x | stride] = m.get(1, 0) * &v0 + m.get(1, 1) * &v1;
        }
    }
    Signature::new(n, values)
}

/// Inserts bit `b` at argument position `slot` of an arity-(n−1) index.
fn insert_bit(x: usize, n: usize, slot: usize, b: usize) -> usize {
    let low_width = n - 1 - slot;
    let low = x & ((1 << low_width) - 1);
    let high = x >> low_width;
    (high << (low_width + 1)) | (b << low_width) | low
}

/// Σ_{x_slot} f(…, x_slot, …)·u(x_slot).
pub fn contract_unary(f: &Signature, slot: usize, u: &Signature) -> Result<Signature> {
    f.check_slot(slot)?;
    if u.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: u.arity(),
        });
    }
    let n = f.arity();
    Ok(Signature::from_fn(n - 1, |x| {
        let v0 = f.value(insert_bit(x, n, slot, 0)) * u.value(0);
        let v1 = f.value(insert_bit(x, n, slot, 1)) * u.value(1);
        v0 + v1
    }))
}

/// Fixes argument `slot` to `b` (pinning by δ_b).
pub fn pin(f: &Signature, slot: usize, b: usize) -> Result<Signature> {
    f.check_slot(slot)?;
    let n = f.arity();
    Ok(Signature::from_fn(n - 1, |x| {
        f.value(insert_bit(x, n, slot, b)).clone()
    }))
}

/// Σ_y f with x_i = x_j = y; the two arguments disappear.
pub fn self_loop(f: &Signature, i: usize, j: usize) -> Result<Signature> {
    if i == j {
        return Err(Error::Precondition(
            "self-loop needs two distinct slots".into(),
        ));
    }
    f.check_slot(i)?;
    f.check_slot(j)?;
    let n = f.arity();
    let (lo, hi) = (i.min(j), i.max(j));
    Ok(Signature::from_fn(n - 2, |x| {
        (0..2)
            .map(|y| {
                let partial = insert_bit(x, n - 1, lo, y);
                f.value(insert_bit(partial, n, hi, y)).clone()
            })
            .sum()
    }))
}

/// Merges argument j into argument i (x_j := x_i); arity drops by one.
pub fn identify(f: &Signature, i: usize, j: usize) -> Result<Signature> {
    if i == j {
        return Err(Error::Precondition(
            "identify needs two distinct slots".into(),
        ));
    }
    f.check_slot(i)?;
    f.check_slot(j)?;
    let n = f.arity();
    Ok(Signature::from_fn(n - 1, |x| {
        let i_new = if i > j { i - 1 } else { i };
        let b = bit(x, n - 1, i_new);
        f.value(insert_bit(x, n, j, b)).clone()
    }))
}

/// Sums out argument `slot`.
pub fn sum_out(f: &Signature, slot: usize) -> Result<Signature> {
    contract_unary(f, slot, &named::delta_plus())
}

/// Σ_y g(x, y)·f(…, y, …) with y at `slot`; the new argument x takes its place.
pub fn compose_binary(f: &Signature, slot: usize, g: &Signature) -> Result<Signature> {
    f.check_slot(slot)?;
    if g.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: g.arity(),
        });
    }
    let m = Mat2::new(
        g.value(0).clone(),
        g.value(1).clone(),
        g.value(2).clone(),
        g.value(3).clone(),
    );
    let n = f.arity();
    let mut values = f.values().to_vec();
    let stride = 1usize << (n - 1 - slot);
    for x in 0..values.len() {
        if x & stride != 0 {
            continue;
        }
        let v0 = values[x].clone();
        let v1 = values[x | stride].clone();
        values[x] = m.get(0, 0) * &v0 + m.get(0, 1) * &v1;
        values[x | stride] = m.get(1, 0) * &v0 + m.get(1, 1) * &v1;
    }
    Signature::new(n, values)
}

/// Binary signature f_m(x, y) = m[x][y].
pub fn from_matrix(m: &Mat2) -> Signature {
    Signature::new(
        2,
        vec![
            m.get(0, 0).clone(),
            m.get(0, 1).clone(),
            m.get(1, 0).clone(),
            m.get(1, 1).clone(),
        ],
    )
    .unwrap()
}

/// Matrix form of a binary signature, rows indexed by the first argument.
pub fn to_matrix(f: &Signature) -> Result<Mat2> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: f.arity(),
        });
    }
    Ok(Mat2::new(
        f.value(0).clone(),
        f.value(1).clone(),
        f.value(2).clone(),
        f.value(3).clone(),
    ))
}
