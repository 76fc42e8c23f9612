//! Tensor factorisation and the GHZ/W classification of ternary signatures.

use std::fmt;

use crate::algebra::{Mat2, Scalar};
use crate::error::{Error, Result};
use crate::signatures::{bit, holographic, index_of, named, proj_eq, Signature, SymSignature};

/// A signature written as scalar × tensor product of non-decomposable factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub arity: usize,
    pub scalar: Scalar,
    /// Each factor acts on the listed original arguments (increasing), and
    /// has its first nonzero value normalised to 1.
    pub factors: Vec<(Vec<usize>, Signature)>,
}

impl Factorization {
    /// Rebuilds the full signature from the factors.
    pub fn expand(&self) -> Signature {
        let n = self.arity;
        Signature::from_fn(n, |x| {
            self.factors
                .iter()
                .fold(self.scalar.clone(), |acc, (args, f)| {
                    let bits: Vec<usize> = args.iter().map(|&a| bit(x, n, a)).collect();
                    acc * f.value_at(&bits)
                })
        })
    }
}

/// Index of the first nonzero entry, as a rank-1 pivot.
fn first_nonzero(values: &[Scalar]) -> Option<usize> {
    values.iter().position(|v| !v.is_zero())
}

/// If f splits across (rows, rest) as a rank-1 matrix, returns the two parts.
fn rank_one_split(f: &Signature, rows: &[usize]) -> Option<(Signature, Signature)> {
    let n = f.arity();
    let cols: Vec<usize> = (0..n).filter(|p| !rows.contains(p)).collect();
    let index = |r: usize, c: usize| -> usize {
        let mut bits = vec![0; n];
        for (k, &p) in rows.iter().enumerate() {
            bits[p] = bit(r, rows.len(), k);
        }
        for (k, &p) in cols.iter().enumerate() {
            bits[p] = bit(c, cols.len(), k);
        }
        index_of(&bits)
    };
    let pivot = first_nonzero(f.values())?;
    let (r0, c0) = {
        let mut rb = 0;
        let mut cb = 0;
        for &p in rows {
            rb = (rb << 1) | bit(pivot, n, p);
        }
        for &p in &cols {
            cb = (cb << 1) | bit(pivot, n, p);
        }
        (rb, cb)
    };
    let pv = f.value(pivot);
    let nr = 1usize << rows.len();
    let nc = 1usize << cols.len();
    let column: Vec<Scalar> = (0..nr).map(|r| f.value(index(r, c0)).clone()).collect();
    let row: Vec<Scalar> = (0..nc).map(|c| f.value(index(r0, c)).clone()).collect();
    for r in 0..nr {
        for c in 0..nc {
            let lhs = f.value(index(r, c)) * pv;
            if lhs != &column[r] * &row[c] {
                return None;
            }
        }
    }
    let inv = pv.inv().ok()?;
    let row: Vec<Scalar> = row.iter().map(|v| v * &inv).collect();
    Some((
        Signature::new(rows.len(), column).ok()?,
        Signature::new(cols.len(), row).ok()?,
    ))
}

/// Subsets of {1, …, m−1} of the given size, each with 0 prepended.
fn subsets_with_zero(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..m {
            cur.push(k);
            rec(k + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    rec(1, m, size - 1, &mut cur, &mut out);
    out
}

/// Finest decomposition of f into non-decomposable tensor factors.
pub fn factorize(f: &Signature) -> Result<Factorization> {
    f.require_nonzero()?;
    let n = f.arity();
    let mut factors = Vec::new();
    let mut scalar = Scalar::one();
    let mut rest = f.clone();
    let mut args: Vec<usize> = (0..n).collect();
    while !args.is_empty() {
        let m = args.len();
        let mut split = None;
        'search: for size in 1..m {
            for rows in subsets_with_zero(m, size) {
                if let Some(parts) = rank_one_split(&rest, &rows) {
                    split = Some((rows, parts));
                    break 'search;
                }
            }
        }
        let (rows, head, tail) = match split {
            Some((rows, (head, tail))) => (rows, head, tail),
            None => (
                (0..m).collect(),
                rest.clone(),
                Signature::constant(Scalar::one()),
            ),
        };
        let p = first_nonzero(head.values()).expect("factor of a nonzero signature");
        let lead = head.value(p).clone();
        let inv = lead.inv()?;
        scalar = scalar * &lead;
        factors.push((rows.iter().map(|&r| args[r]).collect(), head.scale(&inv)));
        args = args
            .iter()
            .enumerate()
            .filter(|(k, _)| !rows.contains(k))
            .map(|(_, &a)| a)
            .collect();
        rest = tail;
    }
    // arity-0 leftover carries the final scalar
    scalar = scalar * rest.value(0);
    Ok(Factorization {
        arity: n,
        scalar,
        factors,
    })
}

/// True if f is a tensor product of unary signatures.
pub fn is_degenerate(f: &Signature) -> Result<bool> {
    Ok(factorize(f)?.factors.iter().all(|(a, _)| a.len() == 1))
}

/// True if f has at least two tensor factors.
pub fn is_decomposable(f: &Signature) -> Result<bool> {
    Ok(factorize(f)?.factors.len() > 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntanglementTag {
    Degenerate,
    DecomposableNontrivial,
    Ghz,
    W,
    BinaryEntangled,
    HigherUnclassified,
}

impl fmt::Display for EntanglementTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EntanglementTag::Degenerate => "Degenerate",
            EntanglementTag::DecomposableNontrivial => "DecomposableNontrivial",
            EntanglementTag::Ghz => "GHZ",
            EntanglementTag::W => "W",
            EntanglementTag::BinaryEntangled => "BinaryEntangled",
            EntanglementTag::HigherUnclassified => "HigherUnclassified",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementClass {
    pub tag: EntanglementTag,
    pub factors: Vec<Vec<usize>>,
    /// For symmetric GHZ inputs, M with f ≐ M∘EQ₃.
    pub witness: Option<Mat2>,
}

fn class_from_factors(fz: &Factorization, n: usize) -> EntanglementClass {
    let parts: Vec<Vec<usize>> = fz.factors.iter().map(|(a, _)| a.clone()).collect();
    let tag = if parts.iter().all(|p| p.len() == 1) {
        EntanglementTag::Degenerate
    } else if parts.len() > 1 {
        EntanglementTag::DecomposableNontrivial
    } else if n == 2 {
        EntanglementTag::BinaryEntangled
    } else {
        EntanglementTag::HigherUnclassified
    };
    EntanglementClass {
        tag,
        factors: parts,
        witness: None,
    }
}

/// Classifies a nonzero signature of any arity.
pub fn classify(f: &Signature) -> Result<EntanglementClass> {
    if f.arity() == 3 {
        return classify_ternary(f);
    }
    let fz = factorize(f)?;
    Ok(class_from_factors(&fz, f.arity()))
}

/// The discriminant whose nonvanishing characterises GHZ type.
pub fn li_polynomial(f: &Signature) -> Result<Scalar> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    let v = |x: usize| f.value(x);
    let (f000, f001, f010, f011) = (v(0), v(1), v(2), v(3));
    let (f100, f101, f110, f111) = (v(4), v(5), v(6), v(7));
    let a = f000 * f111 - f010 * f101 + f001 * f110 - f011 * f100;
    let b = f010 * f100 - f000 * f110;
    let c = f011 * f101 - f001 * f111;
    Ok(&a * &a - Scalar::int(4) * b * c)
}

/// The three W-type side conditions; all hold for W-type signatures.
pub fn w_conditions(f: &Signature) -> Result<[bool; 3]> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    let v = |x: usize| f.value(x);
    let (f000, f001, f010, f011) = (v(0), v(1), v(2), v(3));
    let (f100, f101, f110, f111) = (v(4), v(5), v(6), v(7));
    let ne = |a: Scalar, b: Scalar| a != b;
    Ok([
        ne(f000 * f011, f001 * f010) || ne(f101 * f110, f100 * f111),
        ne(f001 * f100, f000 * f101) || ne(f011 * f110, f010 * f111),
        ne(f011 * f101, f001 * f111) || ne(f010 * f100, f000 * f110),
    ])
}

/// GHZ, W, or a decomposable class for a nonzero ternary signature.
pub fn classify_ternary(f: &Signature) -> Result<EntanglementClass> {
    let poly = li_polynomial(f)?;
    f.require_nonzero()?;
    let all_parts = || vec![vec![0, 1, 2]];
    if !poly.is_zero() {
        return Ok(EntanglementClass {
            tag: EntanglementTag::Ghz,
            factors: all_parts(),
            witness: None,
        });
    }
    if w_conditions(f)?.iter().all(|&c| c) {
        return Ok(EntanglementClass {
            tag: EntanglementTag::W,
            factors: all_parts(),
            witness: None,
        });
    }
    let fz = factorize(f)?;
    Ok(class_from_factors(&fz, 3))
}

/// Discriminant of a symmetric ternary signature.
pub fn li_polynomial_symmetric(f: &SymSignature) -> Result<Scalar> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    let (f0, f1, f2, f3) = (f.get(0), f.get(1), f.get(2), f.get(3));
    let a = f0 * f3 - f1 * f2;
    let b = f1 * f1 - f0 * f2;
    let c = f2 * f2 - f1 * f3;
    Ok(&a * &a - Scalar::int(4) * b * c)
}

/// GHZ/W/decomposable classification for [f₀, f₁, f₂, f₃].
pub fn classify_ternary_symmetric(f: &SymSignature) -> Result<EntanglementClass> {
    let poly = li_polynomial_symmetric(f)?;
    let expanded = f.expand();
    expanded.require_nonzero()?;
    let (f0, f1, f2, f3) = (f.get(0), f.get(1), f.get(2), f.get(3));
    let all = vec![vec![0, 1, 2]];
    if !poly.is_zero() {
        let witness = ghz_witness(f).ok();
        return Ok(EntanglementClass {
            tag: EntanglementTag::Ghz,
            factors: all,
            witness,
        });
    }
    if f1 * f1 != f0 * f2 || f2 * f2 != f1 * f3 {
        return Ok(EntanglementClass {
            tag: EntanglementTag::W,
            factors: all,
            witness: None,
        });
    }
    let fz = factorize(&expanded)?;
    Ok(class_from_factors(&fz, 3))
}

/// M with f ≐ M∘EQ₃ for a GHZ-type symmetric ternary f.
///
/// Writes f as α·u^{⊗3} + β·v^{⊗3} from the recurrence f_{k+2} = p·f_{k+1} + q·f_k,
/// with u, v built from the roots of z² − pz − q. Fails with
/// [`Error::OutsideField`] when a needed root is not in the exact field.
pub fn ghz_witness(f: &SymSignature) -> Result<Mat2> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    if li_polynomial_symmetric(f)?.is_zero() {
        return Err(Error::Precondition("signature is not of GHZ type".into()));
    }
    let (f0, f1, f2, f3) = (f.get(0), f.get(1), f.get(2), f.get(3));
    let one = f0.one_like();
    let cube_root = |x: &Scalar| {
        x.nth_root(3)
            .ok_or_else(|| Error::OutsideField(format!("cube root of {x}")))
    };
    let d = f1 * f1 - f0 * f2;
    let m = if !d.is_zero() {
        let p = (f2 * f1 - f0 * f3) / &d;
        let q = (f1 * f3 - f2 * f2) / &d;
        let disc = &p * &p + Scalar::int(4) * &q;
        let s = disc
            .nth_root(2)
            .ok_or_else(|| Error::OutsideField(format!("square root of {disc}")))?;
        let half = Scalar::rational(1, 2);
        let r1 = (&p + &s) * &half;
        let r2 = (&p - &s) * &half;
        let alpha = (f1 - f0 * &r2) / (&r1 - &r2);
        let beta = f0 - &alpha;
        let t = cube_root(&(&beta / &alpha))?;
        Mat2::new(one.clone(), t.clone(), r1, t * r2)
    } else {
        // f = f₀·(1, r)^{⊗3} + β·(0, 1)^{⊗3}
        let r = f1 / f0;
        let beta = f3 - f0 * r.pow(3);
        let t = cube_root(&(&beta / f0))?;
        Mat2::new(one.clone(), one.zero_like(), r, t)
    };
    let rebuilt = holographic(&m, &named::eq(3), false)?;
    if !proj_eq(&rebuilt, &f.expand()) {
        return Err(Error::SearchExhausted(format!(
            "GHZ witness for {f} failed reconstruction"
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::{apply_local, tensor};
    use proptest::prelude::*;

    fn ints(arity: usize) -> impl Strategy<Value = Signature> {
        proptest::collection::vec(-2i64..=2, 1 << arity).prop_map(|v| Signature::from_ints(&v))
    }

    fn invertible() -> impl Strategy<Value = Mat2> {
        (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
            .prop_map(|(a, b, c, d)| Mat2::from_ints(a, b, c, d))
            .prop_filter("invertible", Mat2::is_invertible)
    }

    #[test]
    fn factorize_examples() {
        let f = tensor(&eq(2), &neq());
        let fz = factorize(&f).unwrap();
        assert_eq!(fz.factors.len(), 2);
        assert_eq!(fz.factors[0].0, vec![0, 1]);
        assert_eq!(fz.factors[1].0, vec![2, 3]);
        assert_eq!(fz.expand(), f);

        assert_eq!(factorize(&eq(4)).unwrap().factors.len(), 1);

        let d = tensor(&tensor(&delta0(), &delta0()), &delta0());
        let fz = factorize(&d).unwrap();
        assert_eq!(fz.factors.len(), 3);
        assert!(is_degenerate(&d).unwrap());

        assert_eq!(
            factorize(&Signature::from_ints(&[0, 0])),
            Err(Error::ZeroSignature)
        );
    }

    #[test]
    fn interleaved_factors() {
        // EQ2 on args {0, 2}, δ− on arg 1
        let f = crate::signatures::permute(&tensor(&eq(2), &delta_minus()), &[0, 2, 1]).unwrap();
        let fz = factorize(&f).unwrap();
        let parts: Vec<Vec<usize>> = fz.factors.iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(parts, vec![vec![0, 2], vec![1]]);
        assert_eq!(fz.expand(), f);
    }

    #[test]
    fn degenerate_examples() {
        assert!(is_degenerate(&Signature::from_ints(&[1, 1, 1, 1])).unwrap());
        assert!(!is_degenerate(&eq(2)).unwrap());
        assert!(!is_degenerate(&one(3)).unwrap());
    }

    #[test]
    fn ternary_examples() {
        assert_eq!(li_polynomial(&eq(3)).unwrap(), Scalar::one());
        assert_eq!(classify_ternary(&eq(3)).unwrap().tag, EntanglementTag::Ghz);
        assert_eq!(classify_ternary(&one(3)).unwrap().tag, EntanglementTag::W);
        let t = tensor(&delta0(), &eq(2));
        assert_eq!(
            classify_ternary(&t).unwrap().tag,
            EntanglementTag::DecomposableNontrivial
        );
        assert!(classify_ternary(&eq(2)).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let c = |v: &[i64]| {
            classify_ternary_symmetric(&SymSignature::from_ints(v))
                .unwrap()
                .tag
        };
        assert_eq!(c(&[1, 0, 0, 1]), EntanglementTag::Ghz);
        assert_eq!(c(&[0, 1, 0, 0]), EntanglementTag::W);
        assert_eq!(c(&[1, 1, 1, 1]), EntanglementTag::Degenerate);
    }

    #[test]
    fn ghz_witness_examples() {
        assert_eq!(
            ghz_witness(&SymSignature::from_ints(&[1, 0, 0, 1])).unwrap(),
            Mat2::identity()
        );
        assert_eq!(
            ghz_witness(&SymSignature::from_ints(&[2, 0, 2, 0])).unwrap(),
            Mat2::from_ints(1, 1, 1, -1)
        );
        assert!(ghz_witness(&SymSignature::from_ints(&[1, 1, 1, 1])).is_err());
        // [1,0,0,2] needs a cube root of 2
        assert!(matches!(
            ghz_witness(&SymSignature::from_ints(&[1, 0, 0, 2])),
            Err(Error::OutsideField(_))
        ));
        let fl = SymSignature::from_ints(&[1, 0, 0, 2]);
        let fl = SymSignature::new(
            fl.values()
                .iter()
                .map(|v| v.to_backend(crate::algebra::Backend::Float))
                .collect(),
        )
        .unwrap();
        let m = ghz_witness(&fl).unwrap();
        assert!(proj_eq(
            &holographic(&m, &eq(3), false).unwrap(),
            &fl.expand()
        ));
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(f in ints(4)) {
            prop_assume!(!f.is_zero());
            let fz = factorize(&f).unwrap();
            prop_assert_eq!(fz.expand(), f);
            for (_, g) in &fz.factors {
                if g.arity() >= 2 {
                    prop_assert_eq!(factorize(g).unwrap().factors.len(), 1);
                }
            }
        }

        #[test]
        fn ternary_agrees_with_factorize(f in ints(3)) {
            prop_assume!(!f.is_zero());
            let class = classify_ternary(&f).unwrap();
            let decomposable = is_decomposable(&f).unwrap();
            let entangled = matches!(class.tag, EntanglementTag::Ghz | EntanglementTag::W);
            prop_assert_eq!(entangled, !decomposable);
            if decomposable {
                let w = w_conditions(&f).unwrap();
                prop_assert!(w.iter().filter(|&&c| !c).count() >= 2);
            }
        }

        #[test]
        fn slocc_invariance(a in invertible(), b in invertible(), c in invertible()) {
            let mats = [a, b, c];
            let g = apply_local(&mats, &eq(3)).unwrap();
            prop_assert_eq!(classify_ternary(&g).unwrap().tag, EntanglementTag::Ghz);
            let w = apply_local(&mats, &one(3)).unwrap();
            prop_assert_eq!(classify_ternary(&w).unwrap().tag, EntanglementTag::W);
        }

        #[test]
        fn symmetric_agrees_with_dense(v in proptest::collection::vec(-2i64..=2, 4)) {
            let s = SymSignature::from_ints(&v);
            prop_assume!(!s.expand().is_zero());
            prop_assert_eq!(
                classify_ternary_symmetric(&s).unwrap().tag,
                classify_ternary(&s.expand()).unwrap().tag
            );
        }

        #[test]
        fn ghz_witness_reconstructs(m in invertible()) {
            let f = holographic(&m, &eq(3), false).unwrap();
            let s = crate::signatures::to_symmetric(&f).unwrap();
            match ghz_witness(&s) {
                Ok(w) => prop_assert!(proj_eq(&holographic(&w, &eq(3), false).unwrap(), &f)),
                Err(Error::OutsideField(_)) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
