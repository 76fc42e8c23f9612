//! Exhaustive, verified searches for small entangled gadgets.
//!
//! Candidates are visited in a fixed order (slot tuple first, then the unary
//! tuple with δ₀ < δ₁ < δ₊ < δ₋, most significant slot first) and the first
//! success is returned, so results are deterministic.

use crate::algebra::Mat2;
use crate::entanglement::is_decomposable;
use crate::error::{Error, Result};
use crate::families::in_m_closure;
use crate::signatures::{contract_unary, named, to_matrix, Signature};

use super::recipe::GadgetRecipe;

/// The isotropic transform whose ⟨·∘M⟩ closure [`binary_escape`] leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Isotropic {
    K,
    KX,
}

impl Isotropic {
    pub fn matrix(self) -> Mat2 {
        match self {
            Isotropic::K => Mat2::k(),
            Isotropic::KX => Mat2::kx(),
        }
    }
}

fn require_entangled(f: &Signature, min_arity: usize) -> Result<()> {
    f.require_nonzero()?;
    if f.arity() < min_arity {
        return Err(Error::Precondition(format!(
            "need arity at least {min_arity}, got {}",
            f.arity()
        )));
    }
    if is_decomposable(f)? {
        return Err(Error::Decomposable);
    }
    Ok(())
}

/// Odometer over `len` digits in 0..4, most significant digit first.
fn unary_tuples(len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..4usize.pow(len as u32)).map(move |mut code| {
        let mut digits = vec![0; len];
        for d in digits.iter_mut().rev() {
            *d = code % 4;
            code /= 4;
        }
        digits
    })
}

/// Contracts every slot in `slots` (increasing) with the chosen unaries.
fn contract_all(f: &Signature, slots: &[usize], choice: &[usize]) -> Result<Signature> {
    let unaries = named::pinning_unaries();
    let mut g = f.clone();
    for (&slot, &u) in slots.iter().zip(choice).rev() {
        g = contract_unary(&g, slot, &unaries[u])?;
    }
    Ok(g)
}

fn recipe_for(f: &Signature, slots: &[usize], choice: &[usize]) -> Result<GadgetRecipe> {
    let unaries = named::pinning_unaries();
    let mut r = GadgetRecipe::start(f);
    for (&slot, &u) in slots.iter().zip(choice).rev() {
        r.contract(slot, &unaries[u])?;
    }
    Ok(r)
}

fn entangled_binary(g: &Signature) -> Result<bool> {
    Ok(!g.is_zero() && to_matrix(g)?.is_invertible())
}

/// Contracts every slot except `j` and `k` with unaries from {δ₀, δ₁, δ₊, δ₋}
/// and returns the first non-decomposable binary result, together with the
/// unary used on each remaining slot in increasing slot order.
pub fn pr_binary_extract(f: &Signature, j: usize, k: usize) -> Result<(Signature, Vec<Signature>)> {
    require_entangled(f, 2)?;
    let n = f.arity();
    if j == k || j >= n || k >= n {
        return Err(Error::Precondition(format!(
            "need two distinct slots below {n}, got {j} and {k}"
        )));
    }
    let rest: Vec<usize> = (0..n).filter(|&s| s != j && s != k).collect();
    let unaries = named::pinning_unaries();
    for choice in unary_tuples(rest.len()) {
        let mut g = contract_all(f, &rest, &choice)?;
        if j > k {
            g = crate::signatures::reorder(&g, &[1, 0])?;
        }
        if entangled_binary(&g)? {
            return Ok((g, choice.iter().map(|&u| unaries[u].clone()).collect()));
        }
    }
    Err(Error::SearchExhausted(format!(
        "no entangled binary on slots ({j}, {k}) of an entangled signature"
    )))
}

/// Searches slot triples and unary contractions of the other slots for a
/// non-decomposable ternary signature.
pub fn ternary_extract(f: &Signature) -> Result<(Signature, GadgetRecipe)> {
    require_entangled(f, 3)?;
    let n = f.arity();
    if n == 3 {
        return Ok((f.clone(), GadgetRecipe::start(f)));
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&s| s != a && s != b && s != c).collect();
                for choice in unary_tuples(rest.len()) {
                    let g = contract_all(f, &rest, &choice)?;
                    if !g.is_zero() && !is_decomposable(&g)? {
                        return Ok((g, recipe_for(f, &rest, &choice)?));
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted(
        "no entangled ternary contraction of an entangled signature".into(),
    ))
}

/// Finds an entangled binary gadget outside ⟨which∘M⟩ by contracting one
/// slot at a time, keeping only intermediate results outside the closure.
pub fn binary_escape(f: &Signature, which: Isotropic) -> Result<(Signature, GadgetRecipe)> {
    let m = which.matrix();
    f.require_nonzero()?;
    if f.arity() < 2 {
        return Err(Error::Precondition("need arity at least 2".into()));
    }
    if in_m_closure(f, Some(&m))? {
        return Err(Error::Precondition(format!(
            "signature lies in the {which:?}∘M closure"
        )));
    }
    let mut recipe = GadgetRecipe::start(f);
    if escape_search(&mut recipe, &m)? {
        let g = recipe.result.clone();
        return Ok((g, recipe));
    }
    Err(Error::SearchExhausted(format!(
        "no binary gadget outside the {which:?}∘M closure"
    )))
}

fn escape_search(recipe: &mut GadgetRecipe, m: &Mat2) -> Result<bool> {
    let f = recipe.result.clone();
    if f.arity() == 2 {
        return entangled_binary(&f);
    }
    for slot in 0..f.arity() {
        for u in named::pinning_unaries() {
            let g = contract_unary(&f, slot, &u)?;
            if g.is_zero() || in_m_closure(&g, Some(m))? {
                continue;
            }
            let saved = recipe.clone();
            recipe.contract(slot, &u)?;
            if escape_search(recipe, m)? {
                return Ok(true);
            }
            *recipe = saved;
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::{tensor, SymSignature};

    #[test]
    fn binary_examples() {
        let (g, u) = pr_binary_extract(&eq(4), 0, 1).unwrap();
        assert_eq!(g, eq(2));
        assert_eq!(u, vec![delta_plus(), delta_plus()]);
        let (g, u) = pr_binary_extract(&one(4), 0, 1).unwrap();
        assert_eq!(g, neq());
        assert_eq!(u, vec![delta0(), delta0()]);
        let d = tensor(&eq(2), &eq(2));
        assert_eq!(pr_binary_extract(&d, 0, 1), Err(Error::Decomposable));
    }

    #[test]
    fn ternary_examples() {
        let (g, r) = ternary_extract(&eq(4)).unwrap();
        assert_eq!(g, eq(3));
        assert_eq!(
            r.steps[1],
            crate::gadgets::recipe::Step::Contract {
                slot: 3,
                unary: delta_plus()
            }
        );
        // δ₀ comes first in the search order, giving ONE₃
        let (g, r) = ternary_extract(&one(4)).unwrap();
        assert_eq!(g, one(3));
        assert!(r.verify().unwrap());
        // pinning with δ₊ instead gives the symmetric [1, 1, 0, 0]
        let plus = contract_unary(&one(4), 3, &delta_plus()).unwrap();
        assert_eq!(plus, SymSignature::from_ints(&[1, 1, 0, 0]).expand());
        assert!(!is_decomposable(&plus).unwrap());

        let (g, _) = ternary_extract(&one(3)).unwrap();
        assert_eq!(g, one(3));
        assert_eq!(
            ternary_extract(&tensor(&eq(2), &eq(2))).unwrap_err(),
            Error::Decomposable
        );
    }

    #[test]
    fn escape_examples() {
        let (g, r) = binary_escape(&eq(4), Isotropic::K).unwrap();
        assert_eq!(g, SymSignature::from_ints(&[1, 0, -1]).expand());
        assert_eq!(
            r.steps[1..],
            [
                crate::gadgets::recipe::Step::Contract {
                    slot: 0,
                    unary: delta_plus()
                },
                crate::gadgets::recipe::Step::Contract {
                    slot: 0,
                    unary: delta_minus()
                },
            ]
        );
        assert!(r.verify().unwrap());
        assert!(!in_m_closure(&g, Some(&Mat2::k())).unwrap());

        let h = SymSignature::from_ints(&[1, 0, -1]).expand();
        assert_eq!(binary_escape(&h, Isotropic::K).unwrap().0, h);

        let km = crate::signatures::holographic(&Mat2::k(), &one(3), false).unwrap();
        assert!(matches!(
            binary_escape(&km, Isotropic::K),
            Err(Error::Precondition(_))
        ));
    }
}
