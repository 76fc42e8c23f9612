//! Membership tests for the tractable families and the normal-form
//! predicates used by the classifiers.

use std::fmt;

use crate::algebra::{Mat2, Scalar};
use crate::entanglement::factorize;
use crate::error::{Error, Result};
use crate::eval::affine::is_affine;
use crate::signatures::{apply_local, bit, from_matrix, holographic, named, Signature};

/// Family tags reported by [`family_tags`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    /// Tensor closure of unary and binary functions.
    Tclosure,
    /// Tensor closure of generalised equalities.
    Eclosure,
    /// Tensor closure of functions supported on weight ≤ 1.
    Mclosure,
    Affine,
    LocalAffine,
    /// A binary signature whose matrix lies in the B set.
    Bset,
    /// A binary signature whose matrix has an affine signature.
    BAgroup,
    MatchgateParity,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::Tclosure => "T",
            FamilyTag::Eclosure => "E",
            FamilyTag::Mclosure => "M",
            FamilyTag::Affine => "A",
            FamilyTag::LocalAffine => "L",
            FamilyTag::Bset => "B",
            FamilyTag::BAgroup => "B_A",
            FamilyTag::MatchgateParity => "matchgate-parity",
        };
        f.write_str(s)
    }
}

fn transformed(f: &Signature, transform: Option<&Mat2>) -> Result<Signature> {
    match transform {
        None => Ok(f.clone()),
        Some(m) => holographic(&m.inverse()?, f, false),
    }
}

/// Every tensor factor has arity at most 2.
pub fn in_t_closure(f: &Signature) -> Result<bool> {
    Ok(factorize(f)?.factors.iter().all(|(a, _)| a.len() <= 2))
}

/// Every factor of transform⁻¹∘f is supported on a complementary pair.
pub fn in_e_closure(f: &Signature, transform: Option<&Mat2>) -> Result<bool> {
    let g = transformed(f, transform)?;
    let fz = factorize(&g)?;
    Ok(fz.factors.iter().all(|(_, h)| {
        let support = h.support();
        let mask = (1usize << h.arity()) - 1;
        support
            .iter()
            .all(|&x| x == support[0] || x == support[0] ^ mask)
    }))
}

/// Every factor of transform⁻¹∘f vanishes above Hamming weight 1.
pub fn in_m_closure(f: &Signature, transform: Option<&Mat2>) -> Result<bool> {
    let g = transformed(f, transform)?;
    let fz = factorize(&g)?;
    Ok(fz
        .factors
        .iter()
        .all(|(_, h)| h.support().iter().all(|x| x.count_ones() <= 1)))
}

/// f is affine.
pub fn in_affine(f: &Signature) -> bool {
    is_affine(f)
}

/// For every support point a, (⊗ⱼ T^{aⱼ})∘f is affine.
pub fn in_local_affine(f: &Signature) -> bool {
    let n = f.arity();
    let support = f.support();
    if support.is_empty() {
        return false;
    }
    support.iter().all(|&a| {
        let mats: Vec<Mat2> = (0..n)
            .map(|j| {
                if bit(a, n, j) == 1 {
                    Mat2::t()
                } else {
                    Mat2::identity()
                }
            })
            .collect();
        apply_local(&mats, f)
            .map(|g| is_affine(&g))
            .unwrap_or(false)
    })
}

/// mᵀ∘{EQ₂, δ₀, δ₁} ⊆ A.
pub fn in_b(m: &Mat2) -> Result<bool> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    for s in [named::eq(2), named::delta0(), named::delta1()] {
        if !is_affine(&holographic(m, &s, true)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The binary signature of m is affine.
pub fn in_b_a(m: &Mat2) -> Result<bool> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    Ok(is_affine(&from_matrix(m)))
}

/// λ of order 3t with gcd(t, 3) = 1: the 3-part of its order is exactly 3.
fn has_order_three_part(ratio: &Scalar) -> bool {
    match ratio.multiplicative_order() {
        Some(ord) => ord % 3 == 0 && ord % 9 != 0,
        None => false,
    }
}

/// True if the unary [a, b] or binary symmetric [y₀, y₁, y₂] is ω-normalised.
pub fn is_omega_normalised(f: &Signature) -> Result<bool> {
    let (first, last) = omega_ends(f)?;
    if first.is_zero() {
        return Ok(true);
    }
    Ok(!has_order_three_part(&(&last / &first)))
}

fn omega_ends(f: &Signature) -> Result<(Scalar, Scalar)> {
    match f.arity() {
        1 => Ok((f.value(0).clone(), f.value(1).clone())),
        2 if f.value(1) == f.value(2) => Ok((f.value(0).clone(), f.value(3).clone())),
        _ => Err(Error::WrongShape(
            "ω-normalisation needs a unary or symmetric binary signature".into(),
        )),
    }
}

/// Returns (diag(1, ω^k)∘f, diag(1, ω^k)) with k ∈ {0, 1, 2} chosen so that
/// the result is ω-normalised; k = 0 when f already is.
pub fn omega_normalise(f: &Signature) -> Result<(Signature, Mat2)> {
    omega_ends(f)?;
    for k in 0..3 {
        let d = Mat2::diag(Scalar::one(), Scalar::omega().pow(k));
        let g = holographic(&d, f, false)?;
        if is_omega_normalised(&g)? {
            return Ok((g, d));
        }
    }
    unreachable!("one of the three ω twists removes the order-3 part")
}

/// f vanishes on every even-weight input or on every odd-weight input.
pub fn matchgate_parity(f: &Signature) -> Result<bool> {
    if f.arity() > 3 {
        return Err(Error::Precondition(
            "the parity condition is only implemented up to arity 3".into(),
        ));
    }
    let vanishes = |parity: u32| {
        f.values()
            .iter()
            .enumerate()
            .all(|(x, v)| (x.count_ones() % 2 != parity) || v.is_zero())
    };
    Ok(vanishes(0) || vanishes(1))
}

/// Every family predicate that applies to f, with its outcome.
pub fn family_tags(f: &Signature) -> Result<Vec<(FamilyTag, bool)>> {
    let mut out = vec![
        (FamilyTag::Tclosure, in_t_closure(f)?),
        (FamilyTag::Eclosure, in_e_closure(f, None)?),
        (FamilyTag::Mclosure, in_m_closure(f, None)?),
        (FamilyTag::Affine, in_affine(f)),
        (FamilyTag::LocalAffine, in_local_affine(f)),
    ];
    if f.arity() == 2 {
        let m = crate::signatures::to_matrix(f)?;
        if m.is_invertible() {
            out.push((FamilyTag::Bset, in_b(&m)?));
            out.push((FamilyTag::BAgroup, in_b_a(&m)?));
        }
    }
    if f.arity() <= 3 {
        out.push((FamilyTag::MatchgateParity, matchgate_parity(f)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::{permute, tensor, SymSignature};
    use proptest::prelude::*;

    #[test]
    fn closure_examples() {
        assert!(in_t_closure(&tensor(&eq(2), &delta0())).unwrap());
        assert!(!in_t_closure(&eq(3)).unwrap());
        assert!(!in_t_closure(&one(3)).unwrap());

        assert!(in_e_closure(&eq(4), None).unwrap());
        assert!(!in_e_closure(&one(3), None).unwrap());
        assert!(in_e_closure(&tensor(&eq(2), &neq()), None).unwrap());

        assert!(in_m_closure(&one(3), None).unwrap());
        assert!(!in_m_closure(&eq(3), None).unwrap());
        assert!(!in_m_closure(&eq(4), Some(&Mat2::k())).unwrap());
        assert!(in_m_closure(
            &holographic(&Mat2::k(), &one(3), false).unwrap(),
            Some(&Mat2::k())
        )
        .unwrap());
        assert_eq!(
            in_t_closure(&Signature::from_ints(&[0, 0])),
            Err(Error::ZeroSignature)
        );
    }

    #[test]
    fn affine_examples() {
        assert!(in_affine(&eq(3)));
        assert!(!in_affine(&one(3)));
        assert!(in_affine(&Signature::from_ints(&[1, 1, 1, -1])));

        assert!(in_local_affine(&delta1()));
        assert!(in_local_affine(&eq(2)));
        let t = Signature::new(1, vec![Scalar::one(), Scalar::zeta8()]).unwrap();
        assert!(!in_local_affine(&t));
    }

    #[test]
    fn b_set_examples() {
        assert!(in_b(&Mat2::identity()).unwrap());
        assert!(in_b(&Mat2::h()).unwrap());
        assert!(in_b(&Mat2::t()).unwrap());
        assert!(in_b_a(&Mat2::identity()).unwrap());
        assert!(in_b_a(&Mat2::k()).unwrap());
        assert_eq!(
            in_b_a(&Mat2::from_ints(1, 1, 1, 1)),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn omega_examples() {
        let f = SymSignature::new(vec![Scalar::zero(), Scalar::int(3), Scalar::int(5)])
            .unwrap()
            .expand();
        let (g, d) = omega_normalise(&f).unwrap();
        assert_eq!((g, d), (f, Mat2::identity()));

        let f = SymSignature::new(vec![Scalar::one(), Scalar::zero(), Scalar::omega()])
            .unwrap()
            .expand();
        let (g, d) = omega_normalise(&f).unwrap();
        assert_eq!(d, Mat2::diag(Scalar::one(), Scalar::omega()));
        assert!(is_omega_normalised(&g).unwrap());
        assert!(!is_omega_normalised(&f).unwrap());

        let f = SymSignature::from_ints(&[1, 1, -1]).expand();
        assert_eq!(omega_normalise(&f).unwrap().1, Mat2::identity());
        assert!(omega_normalise(&eq(3)).is_err());

        // order 6 and 12 ratios also need a twist
        for k in [4i64, 2, 10] {
            let f = Signature::new(1, vec![Scalar::one(), Scalar::zeta(k)]).unwrap();
            let (g, _) = omega_normalise(&f).unwrap();
            assert!(!is_omega_normalised(&f).unwrap());
            assert!(is_omega_normalised(&g).unwrap());
        }
    }

    #[test]
    fn parity_examples() {
        assert!(matchgate_parity(&one(3)).unwrap());
        assert!(matchgate_parity(&delta0()).unwrap());
        assert!(!matchgate_parity(&delta_plus()).unwrap());
        assert!(matchgate_parity(&eq(4)).is_err());
    }

    fn b_a_member() -> impl Strategy<Value = Mat2> {
        let gens = [
            Mat2::h(),
            Mat2::t().scale(&Scalar::one()),
            Mat2::k(),
            Mat2::x(),
            Mat2::diag(Scalar::one(), Scalar::i()),
        ];
        proptest::collection::vec(0usize..5, 1..5)
            .prop_map(move |idx| idx.iter().fold(Mat2::identity(), |acc, &k| &acc * &gens[k]))
    }

    proptest! {
        #[test]
        fn closures_survive_tensor_and_permutation(a in 0usize..3, b in 0usize..3) {
            let pool = [eq(2), neq(), eq(3)];
            let f = tensor(&pool[a], &pool[b]);
            let n = f.arity();
            let rho: Vec<usize> = (0..n).rev().collect();
            let g = permute(&f, &rho).unwrap();
            prop_assert!(in_e_closure(&g, None).unwrap());
            let h = tensor(&one(3), &delta_minus());
            prop_assert!(in_m_closure(&permute(&h, &[3, 1, 0, 2]).unwrap(), None).unwrap());
        }

        #[test]
        fn b_a_group_laws(m in b_a_member(), n in b_a_member()) {
            // generators with affine signatures: the group they generate stays affine
            if in_b_a(&m).unwrap() && in_b_a(&n).unwrap() {
                prop_assert!(in_b_a(&(&m * &n)).unwrap());
                prop_assert!(in_b_a(&m.inverse().unwrap()).unwrap());
            }
        }

        #[test]
        fn scaling_and_diagonal_invariance(c in 1i64..4, d in 1i64..4) {
            let s = Scalar::int(c);
            let diag = Mat2::diag(Scalar::one(), Scalar::int(d));
            for f in [eq(3), one(3), tensor(&eq(2), &neq())] {
                let e = in_e_closure(&f, None).unwrap();
                let m = in_m_closure(&f, None).unwrap();
                prop_assert_eq!(in_e_closure(&f.scale(&s), None).unwrap(), e);
                prop_assert_eq!(in_m_closure(&f.scale(&s), None).unwrap(), m);
                let g = holographic(&diag, &f, false).unwrap();
                prop_assert_eq!(in_e_closure(&g, None).unwrap(), e);
                prop_assert_eq!(in_m_closure(&g, None).unwrap(), m);
            }
        }
    }
}
