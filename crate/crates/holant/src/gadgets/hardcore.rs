//! The pinning pipeline that turns any entangled signature of arity ≥ 3 into
//! either an entangled ternary signature or an arity-4 equality source.
//!
//! The pipeline measures Hamming distances between support points (and, in
//! later stages, between classes of slices), pins every argument on which the
//! closest pair agrees, and shrinks the resulting generalised equality with
//! self-loops. Every step goes through a [`GadgetRecipe`], so the output is
//! replayable.

use std::fmt;

use crate::algebra::Scalar;
use crate::entanglement::{factorize, is_decomposable};
use crate::error::{Error, Result};
use crate::signatures::{bit, bits_of, proj_eq, Signature};

use super::recipe::GadgetRecipe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardCoreKind {
    TernaryNonDecomposable,
    /// An arity-4 generalised equality, or an arity-4 function whose only
    /// nonzero entries sit at 0000, 0011, 1100, 1111 with full-rank 2×2 core.
    GeneralizedEquality4,
    NotApplicable,
}

impl fmt::Display for HardCoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HardCoreKind::TernaryNonDecomposable => "TernaryNonDecomposable",
            HardCoreKind::GeneralizedEquality4 => "GeneralizedEquality4",
            HardCoreKind::NotApplicable => "NotApplicable",
        })
    }
}

/// A closest pair chosen at one stage, as bit vectors over the arguments the
/// distance was measured on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPair {
    pub stage: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HardCoreTrace {
    /// Index of the signature the entangled factor came from.
    pub source: Option<usize>,
    /// Arguments of that signature forming the factor.
    pub factor_arguments: Vec<usize>,
    /// D₀ … D₃, for the stages that were reached.
    pub distances: [Option<usize>; 4],
    pub pairs: Vec<SupportPair>,
    pub alpha: Option<Scalar>,
    pub beta: Option<Scalar>,
    pub lambda: Option<Scalar>,
    pub mu: Option<Scalar>,
    /// Human-readable labels of the branches taken.
    pub cases: Vec<String>,
    pub recipe: Option<GadgetRecipe>,
}

impl HardCoreTrace {
    /// Replays the recorded gadget and checks it against the stored output.
    pub fn replay(&self) -> Result<Option<Signature>> {
        match &self.recipe {
            None => Ok(None),
            Some(r) => {
                if !r.verify()? {
                    return Err(Error::SearchExhausted(
                        "recorded gadget does not reproduce its output".into(),
                    ));
                }
                Ok(Some(r.result.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardCoreOutcome {
    pub kind: HardCoreKind,
    pub signature: Option<Signature>,
    pub trace: HardCoreTrace,
}

/// True for an arity-4 generalised equality, or for the arity-4 shape with
/// nonzero entries only at 0000, 0011, 1100, 1111 and a full-rank core.
pub fn is_equality4_source(f: &Signature) -> bool {
    if f.arity() != 4 || f.is_zero() {
        return false;
    }
    let support = f.support();
    if support.len() == 2 && support[0] ^ support[1] == 0b1111 {
        return true;
    }
    if support.iter().any(|x| ![0, 3, 12, 15].contains(x)) {
        return false;
    }
    let det = f.value(0) * f.value(15) - f.value(3) * f.value(12);
    !det.is_zero()
}

fn distance(a: usize, b: usize) -> usize {
    (a ^ b).count_ones() as usize
}

/// Lexicographically first (a, b) with a ∈ left, b ∈ right, a ≠ b, at
/// minimum Hamming distance.
fn closest_pair(left: &[usize], right: &[usize]) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for &a in left {
        for &b in right {
            if a == b {
                continue;
            }
            let d = distance(a, b);
            if best.is_none_or(|(_, _, e)| d < e) {
                best = Some((a, b, d));
            }
        }
    }
    best
}

/// f restricted to x on its trailing arguments: z ↦ f(z, x).
fn slice(f: &Signature, prefix: usize, x: usize) -> Signature {
    let rest = f.arity() - prefix;
    Signature::from_fn(prefix, |z| f.value((z << rest) | x).clone())
}

/// Splits the trailing slices of f into those proportional to `reference`
/// and the other nonzero ones.
fn slice_classes(f: &Signature, prefix: usize, reference: &Signature) -> (Vec<usize>, Vec<usize>) {
    let width = f.arity() - prefix;
    let mut same = Vec::new();
    let mut other = Vec::new();
    for x in 0..1usize << width {
        let s = slice(f, prefix, x);
        if s.is_zero() {
            continue;
        }
        if proj_eq(&s, reference) {
            same.push(x);
        } else {
            other.push(x);
        }
    }
    (same, other)
}

/// Pins every trailing argument (offset `prefix`) on which a and b agree;
/// returns a's bits on the arguments that stay free.
fn pin_agreeing(
    r: &mut GadgetRecipe,
    prefix: usize,
    width: usize,
    a: usize,
    b: usize,
) -> Result<Vec<usize>> {
    let mut free = Vec::new();
    for p in (0..width).rev() {
        let (ab, bb) = (bit(a, width, p), bit(b, width, p));
        if ab == bb {
            r.pin(prefix + p, ab)?;
        } else {
            free.push(ab);
        }
    }
    free.reverse();
    Ok(free)
}

/// The current signature is a generalised equality supported on {a, ā}
/// with a = `bits`; self-loops on equal-bit pairs bring it to arity 4 or 3.
fn reduce_equality(
    r: &mut GadgetRecipe,
    mut bits: Vec<usize>,
    trace: &mut HardCoreTrace,
) -> Result<HardCoreKind> {
    let target = if bits.len().is_multiple_of(2) { 4 } else { 3 };
    while bits.len() > target {
        let (j, k) = (0..bits.len())
            .flat_map(|j| (j + 1..bits.len()).map(move |k| (j, k)))
            .find(|&(j, k)| bits[j] == bits[k])
            .expect("three or more bits always contain an equal pair");
        r.self_loop(j, k)?;
        bits.remove(k);
        bits.remove(j);
    }
    trace
        .cases
        .push(format!("generalised equality reduced to arity {target}"));
    Ok(if target == 4 {
        HardCoreKind::GeneralizedEquality4
    } else {
        HardCoreKind::TernaryNonDecomposable
    })
}

fn record_pair(
    trace: &mut HardCoreTrace,
    stage: usize,
    a: usize,
    b: usize,
    width: usize,
    d: usize,
) {
    trace.distances[stage] = Some(d);
    trace.pairs.push(SupportPair {
        stage,
        a: bits_of(a, width),
        b: bits_of(b, width),
    });
}

fn record_values(trace: &mut HardCoreTrace, values: [&Scalar; 4]) {
    trace.alpha = Some(values[0].clone());
    trace.beta = Some(values[1].clone());
    trace.lambda = Some(values[2].clone());
    trace.mu = Some(values[3].clone());
}

fn theorem_violation(stage: &str) -> Error {
    Error::SearchExhausted(format!("{stage}: expected slice classes are empty"))
}

/// Runs the pinning pipeline on the first entangled factor of arity ≥ 3
/// found in `family`.
pub fn extract_hard_core(family: &[Signature]) -> Result<HardCoreOutcome> {
    let mut trace = HardCoreTrace::default();
    let Some(mut r) = pick_factor(family, &mut trace)? else {
        trace
            .cases
            .push("no entangled factor of arity 3 or more".into());
        return Ok(HardCoreOutcome {
            kind: HardCoreKind::NotApplicable,
            signature: None,
            trace,
        });
    };
    let kind = if r.arity() == 3 {
        trace
            .cases
            .push("entangled factor is already ternary".into());
        HardCoreKind::TernaryNonDecomposable
    } else {
        pipeline(&mut r, &mut trace)?
    };
    let out = r.result.clone();
    let verified = match kind {
        HardCoreKind::TernaryNonDecomposable => {
            out.arity() == 3 && !out.is_zero() && !is_decomposable(&out)?
        }
        HardCoreKind::GeneralizedEquality4 => is_equality4_source(&out),
        HardCoreKind::NotApplicable => false,
    };
    if !verified {
        return Err(Error::SearchExhausted(format!(
            "pipeline output {kind} failed verification"
        )));
    }
    trace.recipe = Some(r);
    Ok(HardCoreOutcome {
        kind,
        signature: Some(out),
        trace,
    })
}

/// Realises the first entangled factor of arity ≥ 3 by pinning the other
/// arguments at a support point.
fn pick_factor(family: &[Signature], trace: &mut HardCoreTrace) -> Result<Option<GadgetRecipe>> {
    for (idx, f) in family.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let fz = factorize(f)?;
        let Some((args, _)) = fz.factors.iter().find(|(a, _)| a.len() >= 3) else {
            continue;
        };
        let n = f.arity();
        let point = f.support()[0];
        let mut r = GadgetRecipe::start(f);
        for p in (0..n).rev() {
            if !args.contains(&p) {
                r.pin(p, bit(point, n, p))?;
            }
        }
        trace.source = Some(idx);
        trace.factor_arguments = args.clone();
        return Ok(Some(r));
    }
    Ok(None)
}

fn pipeline(r: &mut GadgetRecipe, trace: &mut HardCoreTrace) -> Result<HardCoreKind> {
    let f = r.result.clone();
    let n = f.arity();
    let support = f.support();
    let (a, b, d0) = closest_pair(&support, &support).ok_or_else(|| theorem_violation("D0"))?;
    record_pair(trace, 0, a, b, n, d0);
    match d0 {
        1 => distance_one(r, trace, a, b),
        2 => distance_two(r, trace, a, b),
        _ => {
            trace
                .cases
                .push(format!("D0 = {d0}: pinned to a generalised equality"));
            let bits = pin_agreeing(r, 0, n, a, b)?;
            reduce_equality(r, bits, trace)
        }
    }
}

fn differing_positions(a: usize, b: usize, width: usize) -> Vec<usize> {
    (0..width)
        .filter(|&p| bit(a, width, p) != bit(b, width, p))
        .collect()
}

fn move_to_front(r: &mut GadgetRecipe, front: &[usize]) -> Result<()> {
    let n = r.arity();
    let order: Vec<usize> = front
        .iter()
        .copied()
        .chain((0..n).filter(|p| !front.contains(p)))
        .collect();
    r.reorder(&order)
}

/// Bits of x (width n) with the positions in `drop` removed.
fn project(x: usize, n: usize, drop: &[usize]) -> usize {
    (0..n)
        .filter(|p| !drop.contains(p))
        .fold(0, |acc, p| (acc << 1) | bit(x, n, p))
}

fn distance_two(
    r: &mut GadgetRecipe,
    trace: &mut HardCoreTrace,
    a: usize,
    b: usize,
) -> Result<HardCoreKind> {
    let n = r.arity();
    let diff = differing_positions(a, b, n);
    let (j, k) = (diff[0], diff[1]);
    let before = r.clone();
    pin_agreeing(r, 0, n, a, b)?;
    let g = r.result.clone();
    *r = before;
    if bit(a, n, j) != bit(a, n, k) {
        trace
            .cases
            .push("D0 = 2: pinned binary is a disequality; composed onto one argument".into());
        r.compose(j, &g)?;
    } else {
        trace
            .cases
            .push("D0 = 2: pinned binary is an equality".into());
    }
    move_to_front(r, &[j, k])?;
    let f = r.result.clone();
    let width = n - 2;
    let rest = project(a, n, &[j, k]);
    let reference = slice(&f, 2, rest);
    let (same, other) = slice_classes(&f, 2, &reference);
    let (a1, b1, d1) = closest_pair(&same, &other).ok_or_else(|| theorem_violation("D1"))?;
    record_pair(trace, 1, a1, b1, width, d1);
    let ga = slice(&f, 2, a1);
    let gb = slice(&f, 2, b1);
    let diagonal = gb.value(1).is_zero() && gb.value(2).is_zero();
    let (lambda, mu) = if diagonal {
        (gb.value(0).clone(), gb.value(3).clone())
    } else {
        (gb.value(1).clone(), gb.value(2).clone())
    };
    record_values(trace, [ga.value(0), ga.value(3), &lambda, &mu]);
    let bits = pin_agreeing(r, 2, width, a1, b1)?;
    let shape = if diagonal { "diagonal" } else { "antidiagonal" };
    match d1 {
        1 => {
            trace.cases.push(format!("D1 = 1 ({shape}): ternary"));
            Ok(HardCoreKind::TernaryNonDecomposable)
        }
        2 if diagonal && bits[0] == bits[1] => {
            trace
                .cases
                .push("D1 = 2 (diagonal, equal bits): full-rank arity-4 shape".into());
            Ok(HardCoreKind::GeneralizedEquality4)
        }
        2 if diagonal => {
            trace.cases.push(
                "D1 = 2 (diagonal, unequal bits): squared through the last two arguments".into(),
            );
            let mut sq = GadgetRecipe::empty();
            sq.append(r);
            sq.append(r);
            sq.reorder(&[0, 1, 4, 5, 2, 6, 3, 7])?;
            sq.self_loop(4, 5)?;
            sq.self_loop(4, 5)?;
            *r = sq;
            Ok(HardCoreKind::GeneralizedEquality4)
        }
        2 => {
            trace
                .cases
                .push("D1 = 2 (antidiagonal): pinned the first argument".into());
            r.pin(0, usize::from(lambda.is_zero()))?;
            Ok(HardCoreKind::TernaryNonDecomposable)
        }
        _ if diagonal => {
            trace.cases.push(format!(
                "D1 = {d1} (diagonal): pinned the first two arguments"
            ));
            let z = usize::from(lambda.is_zero());
            r.pin(1, z)?;
            r.pin(0, z)?;
            reduce_equality(r, bits, trace)
        }
        _ => {
            trace.cases.push(format!(
                "D1 = {d1} (antidiagonal): pinned the first argument"
            ));
            let z = usize::from(lambda.is_zero());
            r.pin(0, z)?;
            let mut all = vec![z];
            all.extend(bits);
            reduce_equality(r, all, trace)
        }
    }
}

fn distance_one(
    r: &mut GadgetRecipe,
    trace: &mut HardCoreTrace,
    a: usize,
    b: usize,
) -> Result<HardCoreKind> {
    let n = r.arity();
    let j = differing_positions(a, b, n)[0];
    let before = r.clone();
    pin_agreeing(r, 0, n, a, b)?;
    let unary = r.clone();
    *r = before;
    move_to_front(r, &[j])?;
    let f = r.result.clone();
    let width = n - 1;
    let (same, other) = slice_classes(&f, 1, &unary.result);
    let (a2, b2, d2) = closest_pair(&same, &other).ok_or_else(|| theorem_violation("D2"))?;
    record_pair(trace, 2, a2, b2, width, d2);
    let ga = slice(&f, 1, a2);
    let gb = slice(&f, 1, b2);
    record_values(trace, [ga.value(0), ga.value(1), gb.value(0), gb.value(1)]);
    match d2 {
        1 => distance_three(r, trace, &unary, a2, b2),
        2 => {
            trace.cases.push("D2 = 2: ternary".into());
            pin_agreeing(r, 1, width, a2, b2)?;
            Ok(HardCoreKind::TernaryNonDecomposable)
        }
        _ => {
            trace
                .cases
                .push(format!("D2 = {d2}: pinned the first argument"));
            let bits = pin_agreeing(r, 1, width, a2, b2)?;
            r.pin(0, usize::from(gb.value(0).is_zero()))?;
            reduce_equality(r, bits, trace)
        }
    }
}

/// The D₂ = 1 branch: a binary H sits on the first argument and position p;
/// measure distances between slices proportional to H and the rest.
fn distance_three(
    r: &mut GadgetRecipe,
    trace: &mut HardCoreTrace,
    unary: &GadgetRecipe,
    a2: usize,
    b2: usize,
) -> Result<HardCoreKind> {
    let n = r.arity();
    let width2 = n - 1;
    let p = differing_positions(a2, b2, width2)[0];
    move_to_front(r, &[0, p + 1])?;
    let f = r.result.clone();
    let width = n - 2;
    let rest = project(a2, width2, &[p]);
    let reference = slice(&f, 2, rest);
    let (same, other) = slice_classes(&f, 2, &reference);
    let (a3, b3, d3) = closest_pair(&same, &other).ok_or_else(|| theorem_violation("D3"))?;
    record_pair(trace, 3, a3, b3, width, d3);
    let h = slice(&f, 2, a3);
    let hp = slice(&f, 2, b3);
    record_values(trace, [h.value(0), h.value(1), h.value(2), h.value(3)]);
    let bits = pin_agreeing(r, 2, width, a3, b3)?;
    match d3 {
        1 => {
            trace.cases.push("D2 = 1, D3 = 1: ternary".into());
            Ok(HardCoreKind::TernaryNonDecomposable)
        }
        2 => {
            trace
                .cases
                .push("D2 = 1, D3 = 2: pinned unary attached to the last argument".into());
            r.append(unary);
            r.self_loop(3, 4)?;
            Ok(HardCoreKind::TernaryNonDecomposable)
        }
        _ => {
            let products: Vec<bool> = (0..4)
                .map(|k| (h.value(k) * hp.value(k)).is_zero())
                .collect();
            if products.iter().all(|&z| z) {
                trace.cases.push(format!(
                    "D2 = 1, D3 = {d3}: disjoint rows; pinned the first argument to 1"
                ));
                r.pin(0, 1)?;
                // λ = μ' = 0 puts a's copy at x₂ = 1, otherwise at x₂ = 0
                let lead = usize::from(h.value(2).is_zero());
                let mut all = vec![lead];
                all.extend(bits);
                reduce_equality(r, all, trace)
            } else {
                let label = products.iter().position(|&z| !z).unwrap();
                trace.cases.push(format!(
                    "D2 = 1, D3 = {d3}: shared nonzero entry {label:02b}; pinned the first two arguments"
                ));
                r.pin(1, label & 1)?;
                r.pin(0, label >> 1)?;
                reduce_equality(r, bits, trace)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::{tensor, SymSignature};
    use proptest::prelude::*;

    /// Minimum Hamming distance between distinct support points, by
    /// enumeration over all pairs of inputs.
    fn d0_oracle(f: &Signature) -> Option<usize> {
        let n = 1usize << f.arity();
        let mut best = None;
        for x in 0..n {
            for y in 0..n {
                if x != y && !f.value(x).is_zero() && !f.value(y).is_zero() {
                    let d = (x ^ y).count_ones() as usize;
                    best = Some(best.map_or(d, |b: usize| b.min(d)));
                }
            }
        }
        best
    }

    #[test]
    fn eq4_gives_equality4() {
        let out = extract_hard_core(&[eq(4)]).unwrap();
        assert_eq!(out.kind, HardCoreKind::GeneralizedEquality4);
        assert_eq!(out.trace.distances[0], Some(4));
        assert_eq!(out.signature, Some(eq(4)));
        assert_eq!(out.trace.replay().unwrap(), Some(eq(4)));
    }

    #[test]
    fn one4_gives_ternary() {
        let out = extract_hard_core(&[one(4)]).unwrap();
        assert_eq!(out.kind, HardCoreKind::TernaryNonDecomposable);
        assert_eq!(out.trace.distances[0], Some(2));
        let s = out.signature.clone().unwrap();
        assert!(!is_decomposable(&s).unwrap());
        assert_eq!(out.trace.replay().unwrap(), Some(s));
    }

    #[test]
    fn unentangled_family_is_not_applicable() {
        let out = extract_hard_core(&[tensor(&delta0(), &delta0())]).unwrap();
        assert_eq!(out.kind, HardCoreKind::NotApplicable);
        assert!(out.signature.is_none());
    }

    #[test]
    fn larger_equalities_shrink_by_parity() {
        let out = extract_hard_core(&[eq(6)]).unwrap();
        assert_eq!(out.kind, HardCoreKind::GeneralizedEquality4);
        assert_eq!(out.signature, Some(eq(4).scale(&Scalar::one())));
        let out = extract_hard_core(&[eq(5)]).unwrap();
        assert_eq!(out.kind, HardCoreKind::TernaryNonDecomposable);
        assert_eq!(out.signature, Some(eq(3)));
    }

    #[test]
    fn equality4_shape() {
        assert!(is_equality4_source(&eq(4)));
        let mut v = vec![0i64; 16];
        v[0] = 1;
        v[3] = 2;
        v[12] = 3;
        v[15] = 4;
        assert!(is_equality4_source(&Signature::from_ints(&v)));
        v[15] = 6;
        assert!(!is_equality4_source(&Signature::from_ints(&v)));
        assert!(!is_equality4_source(&one(4)));
    }

    #[test]
    fn distance_one_branches() {
        // a W-like arity-4 signature with adjacent support points
        let f = SymSignature::from_ints(&[1, 1, 0, 0, 0]).expand();
        let out = extract_hard_core(&[f]).unwrap();
        assert_eq!(out.trace.distances[0], Some(1));
        assert_eq!(out.kind, HardCoreKind::TernaryNonDecomposable);
        out.trace.replay().unwrap();
    }

    fn entangled(arity: usize) -> impl Strategy<Value = Signature> {
        proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -2i64..=2], 1 << arity)
            .prop_map(|v| Signature::from_ints(&v))
            .prop_filter("entangled", |f| {
                !f.is_zero() && !is_decomposable(f).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pipeline_always_succeeds(f in prop_oneof![entangled(4), entangled(5)]) {
            let out = extract_hard_core(std::slice::from_ref(&f)).unwrap();
            prop_assert_ne!(out.kind, HardCoreKind::NotApplicable);
            prop_assert_eq!(out.trace.distances[0], d0_oracle(&f));
            let replayed = out.trace.replay().unwrap();
            prop_assert_eq!(replayed, out.signature);
        }
    }
}
