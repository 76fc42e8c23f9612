//! Symmetric gadgets built from ternary signatures, and the unary chain.

use crate::algebra::Scalar;
use crate::entanglement::{classify_ternary_symmetric, is_decomposable, EntanglementTag};
use crate::error::{Error, Result};
use crate::families::in_m_closure;
use crate::signatures::{bit, named, to_symmetric, Signature, SymSignature};

use super::extract::Isotropic;
use super::recipe::GadgetRecipe;

fn require_ternary(f: &Signature) -> Result<()> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    Ok(())
}

/// Argument positions of f seen by one corner of the triangle: the outer
/// edge sits at `rotation`, the two inner edges at the next two positions.
fn corner(rotation: usize) -> [usize; 3] {
    [rotation % 3, (rotation + 1) % 3, (rotation + 2) % 3]
}

fn rotated_value(
    f: &Signature,
    rotation: usize,
    outer: usize,
    second: usize,
    third: usize,
) -> Scalar {
    let mut bits = [0usize; 3];
    let c = corner(rotation);
    bits[c[0]] = outer;
    bits[c[1]] = second;
    bits[c[2]] = third;
    f.value_at(&bits).clone()
}

/// Three copies of f joined in a triangle:
///
/// g(x₁, x₂, x₃) = Σ f(x₁, y₁₂, y₃₁)·f(x₂, y₂₃, y₁₂)·f(x₃, y₃₁, y₂₃)
///
/// where each copy is read with its outer edge at argument `rotation`. The
/// result is always symmetric.
pub fn triangle_symmetrize(f: &Signature, rotation: usize) -> Result<Signature> {
    require_ternary(f)?;
    if rotation > 2 {
        return Err(Error::Precondition(format!(
            "rotation must be 0, 1 or 2, got {rotation}"
        )));
    }
    Ok(Signature::from_fn(3, |x| {
        let (x1, x2, x3) = (bit(x, 3, 0), bit(x, 3, 1), bit(x, 3, 2));
        let mut acc = Scalar::zero();
        for y in 0..8usize {
            let (y12, y23, y31) = (bit(y, 3, 0), bit(y, 3, 1), bit(y, 3, 2));
            let a = rotated_value(f, rotation, x1, y12, y31);
            if a.is_zero() {
                continue;
            }
            let b = rotated_value(f, rotation, x2, y23, y12);
            let c = rotated_value(f, rotation, x3, y31, y23);
            acc = acc + a * b * c;
        }
        acc
    }))
}

/// The triangle of [`triangle_symmetrize`] over three copies of `base`.
pub fn triangle_recipe(base: &GadgetRecipe, rotation: usize) -> Result<GadgetRecipe> {
    if base.arity() != 3 || rotation > 2 {
        return Err(Error::Precondition(
            "triangle needs a ternary gadget and a rotation in 0..3".into(),
        ));
    }
    let mut r = GadgetRecipe::empty();
    for _ in 0..3 {
        r.append(base);
    }
    let c = corner(rotation);
    let (a, b, d) = (0, 3, 6);
    // outer edges, then the pairs (y₁₂), (y₃₁), (y₂₃)
    r.reorder(&[
        a + c[0],
        b + c[0],
        d + c[0],
        a + c[1],
        b + c[2],
        a + c[2],
        d + c[1],
        b + c[1],
        d + c[2],
    ])?;
    for _ in 0..3 {
        r.self_loop(3, 4)?;
    }
    Ok(r)
}

fn escape_membership(f: &Signature) -> Result<Option<Isotropic>> {
    for which in [Isotropic::K, Isotropic::KX] {
        if in_m_closure(f, Some(&which.matrix()))? {
            return Ok(Some(which));
        }
    }
    Ok(None)
}

/// A symmetric non-decomposable ternary signature realised from `f`.
///
/// Symmetric inputs are returned unchanged. Otherwise the triangle gadget
/// is tried in each rotation. For f in K∘M or KX∘M the triangle alone cannot
/// help, so `helper` (a binary signature outside the matching closure) is
/// first attached to one argument of every copy.
pub fn symmetrize(
    f: &Signature,
    helper: Option<&Signature>,
) -> Result<(SymSignature, GadgetRecipe)> {
    require_ternary(f)?;
    f.require_nonzero()?;
    if is_decomposable(f)? {
        return Err(Error::Decomposable);
    }
    if let Some(s) = to_symmetric(f) {
        return Ok((s, GadgetRecipe::start(f)));
    }
    let mut base = GadgetRecipe::start(f);
    if let Some(which) = escape_membership(f)? {
        let h = helper.ok_or_else(|| {
            Error::Precondition(format!(
                "signature lies in {which:?}∘M; a binary helper outside that closure is required"
            ))
        })?;
        if h.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: h.arity(),
            });
        }
        if h.is_zero() || in_m_closure(h, Some(&which.matrix()))? {
            return Err(Error::Precondition(format!(
                "helper lies in the {which:?}∘M closure"
            )));
        }
        base = escape_composition(&base, h)?;
        if let Some(s) = to_symmetric(&base.result) {
            return Ok((s, base));
        }
    }
    for rotation in 0..3 {
        let g = triangle_symmetrize(&base.result, rotation)?;
        if g.is_zero() || is_decomposable(&g)? {
            continue;
        }
        let recipe = triangle_recipe(&base, rotation)?;
        debug_assert_eq!(recipe.result, g);
        let s = to_symmetric(&recipe.result)
            .ok_or_else(|| Error::SearchExhausted("triangle output is not symmetric".into()))?;
        return Ok((s, recipe));
    }
    Err(Error::SearchExhausted(
        "every triangle rotation of an asymmetric entangled ternary is decomposable".into(),
    ))
}

/// Σ_y h(x, y)·f(…, y, …) at the first slot (and helper orientation) whose
/// result leaves both K∘M and KX∘M.
fn escape_composition(base: &GadgetRecipe, h: &Signature) -> Result<GadgetRecipe> {
    let flipped = crate::signatures::reorder(h, &[1, 0])?;
    for slot in 0..3 {
        for helper in [h, &flipped] {
            let mut r = base.clone();
            r.add_source(h);
            r.compose(slot, helper)?;
            let g = &r.result;
            if !g.is_zero() && escape_membership(g)?.is_none() && !is_decomposable(g)? {
                return Ok(r);
            }
        }
    }
    Err(Error::SearchExhausted(
        "no helper attachment leaves the isotropic matching closures".into(),
    ))
}

fn is_ghz(s: &SymSignature) -> Result<bool> {
    Ok(classify_ternary_symmetric(s)?.tag == EntanglementTag::Ghz)
}

/// Like [`symmetrize`], but keeps going until the symmetric output has GHZ
/// type: a symmetric W-type intermediate is fed back through the triangle
/// (after attaching `helper` when it lies in K∘M or KX∘M).
pub fn symmetrize_to_ghz(
    f: &Signature,
    helper: Option<&Signature>,
) -> Result<(SymSignature, GadgetRecipe)> {
    let (mut s, mut recipe) = symmetrize(f, helper)?;
    for _ in 0..3 {
        if is_ghz(&s)? {
            return Ok((s, recipe));
        }
        let mut base = recipe.clone();
        if let Some(which) = escape_membership(&base.result)? {
            let h = helper.ok_or_else(|| {
                Error::Precondition(format!(
                    "W-type intermediate lies in {which:?}∘M; a binary helper is required"
                ))
            })?;
            base = escape_composition(&base, h)?;
        }
        let rotation = (0..3)
            .map(|r| triangle_symmetrize(&base.result, r).map(|g| (r, g)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(_, g)| !g.is_zero() && !is_decomposable(g).unwrap_or(true))
            .map(|(r, _)| r)
            .ok_or_else(|| {
                Error::SearchExhausted(
                    "every triangle of a W-type signature is decomposable".into(),
                )
            })?;
        recipe = triangle_recipe(&base, rotation)?;
        s = to_symmetric(&recipe.result)
            .ok_or_else(|| Error::SearchExhausted("triangle output is not symmetric".into()))?;
    }
    if is_ghz(&s)? {
        return Ok((s, recipe));
    }
    Err(Error::SearchExhausted(
        "symmetrisation did not reach a GHZ-type signature".into(),
    ))
}

/// Sign of the unary at the start of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSign {
    Plus,
    Minus,
}

/// The chain δ± – NEQ – k′ – NEQ – … – k′ – NEQ with `length` copies of k′,
/// scaled to the form [1, length·z ± 1] where k′ ≐ [z, 1, 0].
pub fn unary_chain_recipe(
    kprime: &Signature,
    sign: ChainSign,
    length: usize,
) -> Result<GadgetRecipe> {
    let shape_error =
        || Error::WrongShape("chain link must be a symmetric [z, 1, 0] up to scale".into());
    if kprime.arity() != 2 {
        return Err(shape_error());
    }
    let (k00, k01, k10, k11) = (
        kprime.value(0),
        kprime.value(1),
        kprime.value(2),
        kprime.value(3),
    );
    if k01 != k10 || k01.is_zero() || !k11.is_zero() {
        return Err(shape_error());
    }
    let start = match sign {
        ChainSign::Plus => named::delta_plus(),
        ChainSign::Minus => named::delta_minus(),
    };
    let neq = named::neq();
    let mut r = GadgetRecipe::start(&start);
    r.add_source(kprime);
    r.add_source(&neq);
    r.compose(0, &neq)?;
    for _ in 0..length {
        r.compose(0, kprime)?;
        r.compose(0, &neq)?;
    }
    let lead = r.result.value(0).clone();
    r.rescale(&lead.inv()?);
    debug_assert_eq!(
        r.result.value(1),
        &(Scalar::int(length as i64) * (k00 / k01)
            + if sign == ChainSign::Plus {
                Scalar::one()
            } else {
                -Scalar::one()
            })
    );
    Ok(r)
}

/// [1, length·z ± 1] for the chain link k′ ≐ [z, 1, 0].
pub fn unary_chain(kprime: &Signature, sign: ChainSign, length: usize) -> Result<Signature> {
    Ok(unary_chain_recipe(kprime, sign, length)?.result)
}
