//! Classification theorems as decision procedures.
//!
//! Every classifier evaluates all tractable cases of its problem and records
//! the outcome of each one, so a `Hard` verdict comes with a disproof per
//! case. Transforms for the existential cases (an orthogonal O, a B-set
//! matrix) are never searched for blindly: they are read off the GHZ witness
//! of a symmetric ternary signature realised from the family.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{ata_x_form, factor_orthogonal_diagonal, Backend, Mat2, Scalar};
use crate::entanglement::{
    classify_ternary_symmetric, factorize, ghz_witness, is_degenerate, EntanglementTag,
};
use crate::error::{Error, Result};
use crate::families::{
    in_affine, in_b, in_e_closure, in_local_affine, in_m_closure, in_t_closure, omega_normalise,
};
use crate::gadgets::{
    binary_escape, extract_hard_core, symmetrize_to_ghz, ternary_extract, HardCoreKind, Isotropic,
};
use crate::signatures::{holographic, named, to_matrix, Signature, SymSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Conservative,
    HolantPlus,
    HolantC,
    Csp,
    Csp2c,
    PlanarBinaryEq3,
    TernaryBipartite,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::Conservative,
        Problem::HolantPlus,
        Problem::HolantC,
        Problem::Csp,
        Problem::Csp2c,
        Problem::PlanarBinaryEq3,
        Problem::TernaryBipartite,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Problem::Conservative => "conservative",
            Problem::HolantPlus => "holant_plus",
            Problem::HolantC => "holant_c",
            Problem::Csp => "csp",
            Problem::Csp2c => "csp2c",
            Problem::PlanarBinaryEq3 => "planar_binary_eq3",
            Problem::TernaryBipartite => "ternary_bipartite",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown problem tag {s:?}")))
    }
}

/// A tractable case of some classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// ⟨T⟩: every factor has arity at most 2.
    ProductClosure,
    /// ⟨O∘E⟩ for an orthogonal O.
    OrthogonalEquality,
    /// ⟨K∘E⟩ = ⟨KX∘E⟩.
    IsotropicEquality,
    /// ⟨K∘M⟩ or ⟨KX∘M⟩.
    IsotropicMatching,
    Affine,
    /// B∘A with B in the B set.
    TransformedAffine,
    LocalAffine,
    /// ⟨E⟩ itself.
    EqualityClosure,
    /// T∘A.
    TAffine,
    /// diag(1, λ)∘g ∈ A with λ³ = 1.
    OmegaAffine,
    /// g = c·[a, 1, b] with abc ≠ 0 and a³ = b³.
    Matchgate,
    /// The ternary side is degenerate.
    Degenerate,
    /// x = M∘EQ₃ and Mᵀ∘y ∈ A ∪ ⟨E⟩.
    GhzTransform,
    /// x = M∘[1,1,0,0] and Mᵀ∘y vanishes at 00.
    WTransform,
}

impl Case {
    pub fn tag(self) -> &'static str {
        match self {
            Case::ProductClosure => "<T>",
            Case::OrthogonalEquality => "<O∘E>",
            Case::IsotropicEquality => "<K∘E>",
            Case::IsotropicMatching => "<K∘M>",
            Case::Affine => "A",
            Case::TransformedAffine => "B∘A",
            Case::LocalAffine => "L",
            Case::EqualityClosure => "<E>",
            Case::TAffine => "T∘A",
            Case::OmegaAffine => "ω-affine",
            Case::Matchgate => "matchgate",
            Case::Degenerate => "degenerate",
            Case::GhzTransform => "GHZ transform",
            Case::WTransform => "W transform",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The result of testing one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseCheck {
    pub case: Case,
    pub holds: bool,
    /// The transform that certifies the case, or the last candidate refuted.
    pub transform: Option<Mat2>,
    /// Index of the first input signature that fails the case.
    pub failing: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    PolyTime {
        case: Case,
        transform: Option<Mat2>,
    },
    /// Every case failed; `witness` is a function realised from the inputs
    /// (or an input) on which the failures hinge.
    Hard {
        witness: Option<Signature>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub problem: Problem,
    pub outcome: Outcome,
    pub cases: Vec<CaseCheck>,
    pub trace: Vec<String>,
    /// Some witness transform had to be computed with the float backend.
    pub approximate: bool,
    /// The same verdict holds when instances are restricted to planar graphs.
    pub planar: bool,
}

impl Verdict {
    pub fn is_polytime(&self) -> bool {
        matches!(self.outcome, Outcome::PolyTime { .. })
    }

    pub fn case(&self) -> Option<Case> {
        match self.outcome {
            Outcome::PolyTime { case, .. } => Some(case),
            Outcome::Hard { .. } => None,
        }
    }

    /// Every case that was certified.
    pub fn certified(&self) -> Vec<Case> {
        self.cases
            .iter()
            .filter(|c| c.holds)
            .map(|c| c.case)
            .collect()
    }

    /// Re-checks each recorded case against `inputs` with the family
    /// predicates: certified cases must hold and refuted ones must fail.
    ///
    /// `inputs` is the family for set problems, `[g]` for the planar binary
    /// problem and `[y, x]` for the bipartite ternary problem.
    pub fn verify(&self, inputs: &[Signature]) -> Result<bool> {
        for check in &self.cases {
            let again = recheck(check.case, inputs, check.transform.as_ref())?;
            if check.holds && !again {
                return Ok(false);
            }
            // a refuted candidate transform only disproves that candidate
            if !check.holds && again && check.transform.is_none() {
                return Ok(false);
            }
        }
        Ok(match &self.outcome {
            Outcome::PolyTime { case, transform } => recheck(*case, inputs, transform.as_ref())?,
            Outcome::Hard { .. } => self.cases.iter().all(|c| !c.holds),
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::PolyTime { case, transform } => {
                write!(f, "{}: PolyTime ({case})", self.problem)?;
                if let Some(m) = transform {
                    write!(f, " with transform {m}")?;
                }
            }
            Outcome::Hard { .. } => write!(f, "{}: Hard", self.problem)?,
        }
        if self.approximate {
            write!(f, " [approximate]")?;
        }
        Ok(())
    }
}

fn first_failure(
    family: &[Signature],
    mut pred: impl FnMut(&Signature) -> Result<bool>,
) -> Result<Option<usize>> {
    for (k, f) in family.iter().enumerate() {
        if !pred(f)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn affine_after(m: &Mat2, f: &Signature) -> Result<bool> {
    Ok(in_affine(&holographic(&m.inverse()?, f, false)?))
}

fn is_orthogonal(m: &Mat2) -> bool {
    m.is_orthogonal_projective()
}

fn set_member(case: Case, family: &[Signature], transform: Option<&Mat2>) -> Result<Option<usize>> {
    let k = Mat2::k();
    match case {
        Case::ProductClosure => first_failure(family, in_t_closure),
        Case::OrthogonalEquality => {
            let o =
                transform.ok_or_else(|| Error::Precondition("no orthogonal candidate".into()))?;
            if !is_orthogonal(o) {
                return Ok(Some(0));
            }
            first_failure(family, |f| in_e_closure(f, Some(o)))
        }
        Case::IsotropicEquality => first_failure(family, |f| in_e_closure(f, Some(&k))),
        Case::IsotropicMatching => {
            let m = transform.cloned().unwrap_or_else(Mat2::k);
            first_failure(family, |f| in_m_closure(f, Some(&m)))
        }
        Case::Affine => first_failure(family, |f| Ok(in_affine(f))),
        Case::TransformedAffine => {
            let b = transform.ok_or_else(|| Error::Precondition("no B candidate".into()))?;
            if !b.is_invertible() || !in_b(b)? {
                return Ok(Some(0));
            }
            first_failure(family, |f| affine_after(b, f))
        }
        Case::LocalAffine => first_failure(family, |f| Ok(in_local_affine(f))),
        Case::EqualityClosure => first_failure(family, |f| in_e_closure(f, None)),
        Case::TAffine => first_failure(family, |f| affine_after(&Mat2::t(), f)),
        _ => Err(Error::Precondition(format!("{case} is not a family case"))),
    }
}

fn recheck(case: Case, inputs: &[Signature], transform: Option<&Mat2>) -> Result<bool> {
    match case {
        Case::OmegaAffine => {
            let Some(d) = transform else {
                return (0..3).try_fold(false, |acc, k| {
                    let d = Mat2::diag(Scalar::one(), Scalar::omega().pow(k));
                    Ok(acc || in_affine(&holographic(&d, &inputs[0], false)?))
                });
            };
            let lambda = d.get(1, 1);
            Ok(d.is_diagonal()
                && d.get(0, 0).is_one()
                && lambda.pow(3).is_one()
                && in_affine(&holographic(d, &inputs[0], false)?))
        }
        Case::Matchgate => Ok(matchgate_form(&inputs[0])),
        Case::Degenerate => is_degenerate(&inputs[1]),
        // without a transform the case can only be refuted by the type of x
        Case::GhzTransform | Case::WTransform if transform.is_none() => {
            let want = if case == Case::GhzTransform {
                EntanglementTag::Ghz
            } else {
                EntanglementTag::W
            };
            let x = crate::signatures::to_symmetric(&inputs[1])
                .ok_or_else(|| Error::WrongShape("ternary side must be symmetric".into()))?;
            Ok(!is_degenerate(&inputs[1])? && classify_ternary_symmetric(&x)?.tag == want)
        }
        Case::OrthogonalEquality | Case::TransformedAffine if transform.is_none() => Ok(false),
        Case::GhzTransform => {
            let m = transform.ok_or_else(|| Error::Precondition("no GHZ witness".into()))?;
            let rebuilt = holographic(m, &named::eq(3), false)?;
            if !crate::signatures::proj_eq(&rebuilt, &inputs[1]) {
                return Ok(false);
            }
            let z = holographic(m, &inputs[0], true)?;
            Ok(in_affine(&z) || in_e_closure(&z, None)?)
        }
        Case::WTransform => {
            let m = transform.ok_or_else(|| Error::Precondition("no W witness".into()))?;
            let x = crate::signatures::to_symmetric(&inputs[1])
                .ok_or_else(|| Error::WrongShape("ternary side must be symmetric".into()))?;
            let u = [m.get(0, 0).clone(), m.get(1, 0).clone()];
            Ok(
                is_double_direction(&x, &u)
                    && quadratic_form(&to_matrix(&inputs[0])?, &u).is_zero(),
            )
        }
        _ => Ok(set_member(case, inputs, transform)?.is_none()),
    }
}

fn check(
    case: Case,
    family: &[Signature],
    transform: Option<&Mat2>,
    what: &str,
) -> Result<CaseCheck> {
    let failing = set_member(case, family, transform)?;
    let detail = match failing {
        None => format!("every signature lies in {what}"),
        Some(k) => format!("signature {k} is not in {what}"),
    };
    Ok(CaseCheck {
        case,
        holds: failing.is_none(),
        transform: transform.cloned(),
        failing,
        detail,
    })
}

/// Tries each candidate transform in order; the first success certifies.
fn check_candidates(
    case: Case,
    family: &[Signature],
    candidates: &[Mat2],
    what: &str,
) -> Result<CaseCheck> {
    if candidates.is_empty() {
        return Ok(CaseCheck {
            case,
            holds: false,
            transform: None,
            failing: None,
            detail: format!("no candidate transform for {what}"),
        });
    }
    let mut last = None;
    for m in candidates {
        let c = check(case, family, Some(m), &format!("{what} with {m}"))?;
        if c.holds {
            return Ok(c);
        }
        last = Some(c);
    }
    let mut c = last.unwrap();
    c.detail = format!(
        "{} candidate(s) refuted; last: {}",
        candidates.len(),
        c.detail
    );
    Ok(c)
}

fn isotropic_matching(family: &[Signature]) -> Result<CaseCheck> {
    let k = check(Case::IsotropicMatching, family, Some(&Mat2::k()), "<K∘M>")?;
    if k.holds {
        return Ok(k);
    }
    let kx = check(Case::IsotropicMatching, family, Some(&Mat2::kx()), "<KX∘M>")?;
    if kx.holds {
        return Ok(kx);
    }
    Ok(CaseCheck {
        case: Case::IsotropicMatching,
        holds: false,
        transform: None,
        failing: k.failing,
        detail: format!("{}; {}", k.detail, kx.detail),
    })
}

/// A symmetric GHZ-type ternary signature realised from the family, with M
/// such that it equals M∘EQ₃ up to a scalar.
#[derive(Debug, Clone)]
struct GhzSource {
    signature: SymSignature,
    witness: Mat2,
    approximate: bool,
}

fn witness_matrix(h: &SymSignature, trace: &mut Vec<String>) -> Result<(Mat2, bool)> {
    match ghz_witness(h) {
        Ok(m) => Ok((m, false)),
        Err(Error::OutsideField(why)) => {
            trace.push(format!("GHZ witness needs {why}; using the float backend"));
            let values = h
                .values()
                .iter()
                .map(|v| v.to_backend(Backend::Float))
                .collect();
            Ok((ghz_witness(&SymSignature::new(values)?)?, true))
        }
        Err(e) => Err(e),
    }
}

/// A helper binary outside ⟨which∘M⟩ realised from some member of the
/// family, or None when the whole family lies in that closure.
fn escape_helper(
    family: &[Signature],
    which: Isotropic,
    trace: &mut Vec<String>,
) -> Result<Option<Signature>> {
    for (k, f) in family.iter().enumerate() {
        if f.arity() >= 2 && !in_m_closure(f, Some(&which.matrix()))? {
            let (g, _) = binary_escape(f, which)?;
            trace.push(format!("helper binary {g:?} escaped from signature {k}"));
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn ghz_from_ternary(
    family: &[Signature],
    t: &Signature,
    trace: &mut Vec<String>,
) -> Result<Option<GhzSource>> {
    let mut helper = None;
    for which in [Isotropic::K, Isotropic::KX] {
        if in_m_closure(t, Some(&which.matrix()))? {
            trace.push(format!("ternary lies in {which:?}∘M; a helper is needed"));
            helper = escape_helper(family, which, trace)?;
            if helper.is_none() {
                trace.push(format!("family lies in <{which:?}∘M>; no helper exists"));
                return Ok(None);
            }
            break;
        }
    }
    let (h, recipe) = symmetrize_to_ghz(t, helper.as_ref())?;
    trace.push(format!(
        "symmetric GHZ-type signature {h} realised with {} gadget steps",
        recipe.steps.len()
    ));
    let (witness, approximate) = witness_matrix(&h, trace)?;
    trace.push(format!("GHZ witness M = {witness}"));
    Ok(Some(GhzSource {
        signature: h,
        witness,
        approximate,
    }))
}

/// Witness source used by the conservative and Holant⁺ classifiers: the
/// first signature outside ⟨T⟩, its entangled factor, a ternary contraction
/// and its symmetrisation.
fn ghz_source(family: &[Signature], trace: &mut Vec<String>) -> Result<Option<GhzSource>> {
    let Some(idx) = first_failure(family, in_t_closure)? else {
        trace.push("family lies in <T>; no witness source".into());
        return Ok(None);
    };
    let fz = factorize(&family[idx])?;
    let (args, factor) = fz
        .factors
        .iter()
        .find(|(a, _)| a.len() >= 3)
        .expect("a signature outside <T> has a factor of arity 3 or more");
    trace.push(format!(
        "signature {idx} has an entangled factor on arguments {args:?}"
    ));
    let (t, _) = ternary_extract(factor)?;
    trace.push(format!("entangled ternary {t:?}"));
    ghz_from_ternary(family, &t, trace)
}

fn orthogonal_candidates(source: Option<&GhzSource>, trace: &mut Vec<String>) -> Vec<Mat2> {
    match source {
        None => vec![Mat2::identity()],
        Some(s) => match factor_orthogonal_diagonal(&s.witness) {
            Some((q, _)) => {
                trace.push(format!(
                    "witness factors as orthogonal·diagonal with O = {q}"
                ));
                vec![q]
            }
            None => {
                trace.push("witness Gram matrix is not diagonal; no orthogonal candidate".into());
                if let Some((kind, _)) = ata_x_form(&s.witness) {
                    trace.push(format!("witness has the isotropic form {kind:?}"));
                }
                Vec::new()
            }
        },
    }
}

fn hard_witness(
    cases: &[CaseCheck],
    family: &[Signature],
    extracted: Option<Signature>,
) -> Option<Signature> {
    extracted.or_else(|| {
        cases
            .iter()
            .find_map(|c| c.failing)
            .and_then(|k| family.get(k).cloned())
    })
}

fn assemble(
    problem: Problem,
    cases: Vec<CaseCheck>,
    trace: Vec<String>,
    family: &[Signature],
    extracted: Option<Signature>,
    approximate: bool,
    planar: bool,
) -> Verdict {
    let outcome = match cases.iter().find(|c| c.holds) {
        Some(c) => Outcome::PolyTime {
            case: c.case,
            transform: c.transform.clone(),
        },
        None => Outcome::Hard {
            witness: hard_witness(&cases, family, extracted),
        },
    };
    Verdict {
        problem,
        outcome,
        cases,
        trace,
        approximate,
        planar,
    }
}

fn require_family(family: &[Signature]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    family.iter().try_for_each(Signature::require_nonzero)
}

fn conservative_cases(
    family: &[Signature],
    trace: &mut Vec<String>,
) -> Result<(Vec<CaseCheck>, Option<GhzSource>)> {
    let t = check(Case::ProductClosure, family, None, "<T>")?;
    let source = if t.holds {
        None
    } else {
        ghz_source(family, trace)?
    };
    let candidates = orthogonal_candidates(source.as_ref(), trace);
    let cases = vec![
        t,
        check_candidates(Case::OrthogonalEquality, family, &candidates, "<O∘E>")?,
        check(Case::IsotropicEquality, family, None, "<K∘E>")?,
        isotropic_matching(family)?,
    ];
    Ok((cases, source))
}

/// Holant with every unary function available.
pub fn classify_conservative(family: &[Signature]) -> Result<Verdict> {
    require_family(family)?;
    let mut trace = Vec::new();
    let (cases, source) = conservative_cases(family, &mut trace)?;
    let approximate = source.as_ref().is_some_and(|s| s.approximate);
    let extracted = source.map(|s| s.signature.expand());
    Ok(assemble(
        Problem::Conservative,
        cases,
        trace,
        family,
        extracted,
        approximate,
        true,
    ))
}

/// Holant with δ₀, δ₁, δ₊, δ₋ available.
pub fn classify_holant_plus(family: &[Signature]) -> Result<Verdict> {
    require_family(family)?;
    let mut trace = Vec::new();
    let (mut cases, source) = conservative_cases(family, &mut trace)?;
    cases.insert(1, check(Case::Affine, family, None, "A")?);
    let approximate = source.as_ref().is_some_and(|s| s.approximate);
    let extracted = source.map(|s| s.signature.expand());
    Ok(assemble(
        Problem::HolantPlus,
        cases,
        trace,
        family,
        extracted,
        approximate,
        true,
    ))
}

/// The twisted witnesses M·diag(1, ω^k), starting with the one whose
/// Mᵀ∘EQ₂ (or, when that is a multiple of NEQ, Mᵀ∘δ₀) is ω-normalised.
fn b_candidates(a: &Mat2, trace: &mut Vec<String>) -> Result<Vec<Mat2>> {
    let gram = holographic(a, &named::eq(2), true)?;
    let probe = if gram.value(0).is_zero() && gram.value(3).is_zero() {
        trace.push("Aᵀ∘EQ₂ is a multiple of NEQ; normalising Aᵀ∘δ₀ instead".into());
        holographic(a, &named::delta0(), true)?
    } else {
        gram
    };
    let (_, d) = omega_normalise(&probe)?;
    let first = a * &d;
    trace.push(format!("ω-normalised witness M = {first}"));
    let mut out = vec![first.clone()];
    for k in 0..3 {
        let m = a * &Mat2::diag(Scalar::one(), Scalar::omega().pow(k));
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Holant with δ₀ and δ₁ available.
pub fn classify_holant_c(family: &[Signature]) -> Result<Verdict> {
    require_family(family)?;
    let mut trace = Vec::new();
    let t = check(Case::ProductClosure, family, None, "<T>")?;
    let mut b_cands = vec![Mat2::identity()];
    let mut o_cands = vec![Mat2::identity()];
    let mut extracted = None;
    let mut approximate = false;
    if !t.holds {
        let hc = extract_hard_core(family)?;
        trace.push(format!("hard core: {}", hc.kind));
        trace.extend(hc.trace.cases.iter().map(|c| format!("  {c}")));
        match hc.kind {
            HardCoreKind::GeneralizedEquality4 => {
                b_cands = vec![Mat2::identity(), Mat2::t()];
                extracted = hc.signature;
            }
            HardCoreKind::TernaryNonDecomposable => {
                let ternary = hc.signature.expect("ternary outcome carries a signature");
                match ghz_from_ternary(family, &ternary, &mut trace)? {
                    Some(src) => {
                        approximate = src.approximate;
                        b_cands = b_candidates(&src.witness, &mut trace)?;
                        o_cands = orthogonal_candidates(Some(&src), &mut trace);
                        extracted = Some(src.signature.expand());
                    }
                    None => extracted = Some(ternary),
                }
            }
            HardCoreKind::NotApplicable => {}
        }
    }
    let cases = vec![
        t,
        check_candidates(Case::TransformedAffine, family, &b_cands, "B∘A")?,
        check(Case::LocalAffine, family, None, "L")?,
        check_candidates(Case::OrthogonalEquality, family, &o_cands, "<O∘E>")?,
        check(Case::IsotropicEquality, family, None, "<K∘E>")?,
        isotropic_matching(family)?,
    ];
    Ok(assemble(
        Problem::HolantC,
        cases,
        trace,
        family,
        extracted,
        approximate,
        false,
    ))
}

/// Counting CSP.
pub fn classify_csp(family: &[Signature]) -> Result<Verdict> {
    require_family(family)?;
    let cases = vec![
        check(Case::EqualityClosure, family, None, "<E>")?,
        check(Case::Affine, family, None, "A")?,
    ];
    Ok(assemble(
        Problem::Csp,
        cases,
        Vec::new(),
        family,
        None,
        false,
        false,
    ))
}

/// Counting CSP with even variable occurrences and pinning.
pub fn classify_csp2c(family: &[Signature]) -> Result<Verdict> {
    require_family(family)?;
    let cases = vec![
        check(Case::EqualityClosure, family, None, "<E>")?,
        check(Case::Affine, family, None, "A")?,
        check(Case::TAffine, family, None, "T∘A")?,
        check(Case::LocalAffine, family, None, "L")?,
    ];
    Ok(assemble(
        Problem::Csp2c,
        cases,
        Vec::new(),
        family,
        None,
        false,
        false,
    ))
}

fn matchgate_form(g: &Signature) -> bool {
    if g.arity() != 2 || g.value(1) != g.value(2) || g.value(1).is_zero() {
        return false;
    }
    let c = g.value(1);
    let (a, b) = (g.value(0) / c, g.value(3) / c);
    !a.is_zero() && !b.is_zero() && a.pow(3) == b.pow(3)
}

/// The four arithmetic conditions on X = ab, Y = a³ + b³ for [a, 1, b].
fn planar_conditions(a: &Scalar, b: &Scalar) -> [bool; 4] {
    let x = a * b;
    let y = a.pow(3) + b.pow(3);
    let two_i = Scalar::int(2) * Scalar::i();
    [
        x.is_one(),
        x.is_zero() && y.is_zero(),
        (-&x).is_one() && (y.is_zero() || y == two_i || y == -&two_i),
        Scalar::int(4) * x.pow(3) == y.pow(2),
    ]
}

/// Planar Holant({g} | {EQ₃}) for a symmetric binary g.
pub fn classify_planar_binary(g: &SymSignature) -> Result<Verdict> {
    if g.arity() != 2 {
        return Err(Error::WrongShape(format!(
            "expected a symmetric binary signature, got arity {}",
            g.arity()
        )));
    }
    let f = g.expand();
    f.require_nonzero()?;
    let family = [f.clone()];
    let mut trace = Vec::new();
    let e = check(Case::EqualityClosure, &family, None, "<E>")?;
    let twists: Vec<Mat2> = (0..3)
        .map(|k| Mat2::diag(Scalar::one(), Scalar::omega().pow(k)))
        .collect();
    let mut omega = CaseCheck {
        case: Case::OmegaAffine,
        holds: false,
        transform: None,
        failing: Some(0),
        detail: "no cube root of unity λ makes diag(1, λ)∘g affine".into(),
    };
    for d in &twists {
        if in_affine(&holographic(d, &f, false)?) {
            omega = CaseCheck {
                case: Case::OmegaAffine,
                holds: true,
                transform: Some(d.clone()),
                failing: None,
                detail: format!("diag(1, λ)∘g is affine with λ = {}", d.get(1, 1)),
            };
            break;
        }
    }
    let mg = matchgate_form(&f);
    let matchgate = CaseCheck {
        case: Case::Matchgate,
        holds: mg,
        transform: None,
        failing: (!mg).then_some(0),
        detail: if mg {
            "g = c·[a, 1, b] with a³ = b³".into()
        } else {
            "g is not c·[a, 1, b] with abc ≠ 0 and a³ = b³".into()
        },
    };
    let cases = vec![e, omega, matchgate];
    let tractable = cases.iter().any(|c| c.holds);
    if !g.get(1).is_zero() {
        let a = g.get(0) / g.get(1);
        let b = g.get(2) / g.get(1);
        let conds = planar_conditions(&a, &b);
        trace.push(format!(
            "normalised [a, 1, b] with X = {}, Y = {}; conditions {conds:?}",
            &a * &b,
            a.pow(3) + b.pow(3)
        ));
        if conds.iter().any(|&c| c) != tractable {
            return Err(Error::SearchExhausted(format!(
                "case list and arithmetic conditions disagree on {g}"
            )));
        }
    } else {
        trace.push("middle entry is zero: g is a generalised equality".into());
    }
    Ok(assemble(
        Problem::PlanarBinaryEq3,
        cases,
        trace,
        &family,
        None,
        false,
        true,
    ))
}

/// uᵀ·m·u.
fn quadratic_form(m: &Mat2, u: &[Scalar; 2]) -> Scalar {
    let mu = m.apply(u);
    &u[0] * &mu[0] + &u[1] * &mu[1]
}

/// The cubic form of x, Σ_k C(3,k) x_k s^{3−k} t^k, has its double root at
/// (s, t) = (u₁, −u₀).
fn is_double_direction(x: &SymSignature, u: &[Scalar; 2]) -> bool {
    if u[0].is_zero() && u[1].is_zero() {
        return false;
    }
    let (s, t) = (u[1].clone(), -&u[0]);
    let eval = |c: [&Scalar; 3]| c[0] * &s * &s + Scalar::int(2) * c[1] * &s * &t + c[2] * &t * &t;
    let (f0, f1, f2, f3) = (x.get(0), x.get(1), x.get(2), x.get(3));
    eval([f0, f1, f2]).is_zero() && eval([f1, f2, f3]).is_zero()
}

/// The repeated direction u of a W-type symmetric ternary x, so that
/// x = M∘[1,1,0,0] for any invertible M with first column u.
fn w_direction(x: &SymSignature) -> Option<[Scalar; 2]> {
    let (f0, f1, f2, f3) = (x.get(0), x.get(1), x.get(2), x.get(3));
    let two = Scalar::int(2);
    // the two partial derivatives, as coefficients of s², st, t²
    let (a1, b1, c1) = (f0.clone(), &two * f1, f2.clone());
    let (a2, b2, c2) = (f1.clone(), &two * f2, f3.clone());
    let candidates = [
        (Scalar::one(), Scalar::zero()),
        (Scalar::zero(), Scalar::one()),
        (-(&a2 * &c1 - &a1 * &c2), &a2 * &b1 - &a1 * &b2),
        (&c2 * &b1 - &c1 * &b2, -(&c2 * &a1 - &c1 * &a2)),
    ];
    candidates.into_iter().find_map(|(s, t)| {
        let u = [-&t, s];
        is_double_direction(x, &u).then_some(u)
    })
}

/// Holant({y} | {x}) for a symmetric binary y and symmetric ternary x.
pub fn classify_ternary_bipartite(y: &SymSignature, x: &SymSignature) -> Result<Verdict> {
    if y.arity() != 2 || x.arity() != 3 {
        return Err(Error::WrongShape(format!(
            "expected arities 2 and 3, got {} and {}",
            y.arity(),
            x.arity()
        )));
    }
    let (yf, xf) = (y.expand(), x.expand());
    yf.require_nonzero()?;
    xf.require_nonzero()?;
    let inputs = [yf.clone(), xf.clone()];
    let mut trace = Vec::new();
    let degenerate = is_degenerate(&xf)?;
    let mut cases = vec![CaseCheck {
        case: Case::Degenerate,
        holds: degenerate,
        transform: None,
        failing: (!degenerate).then_some(1),
        detail: format!("x is {}degenerate", if degenerate { "" } else { "not " }),
    }];
    let mut approximate = false;
    let tag = if degenerate {
        EntanglementTag::Degenerate
    } else {
        classify_ternary_symmetric(x)?.tag
    };
    trace.push(format!("x has type {tag}"));

    let mut ghz = CaseCheck {
        case: Case::GhzTransform,
        holds: false,
        transform: None,
        failing: Some(1),
        detail: "x is not of GHZ type".into(),
    };
    if tag == EntanglementTag::Ghz {
        let (m, approx) = witness_matrix(x, &mut trace)?;
        approximate = approx;
        ghz.failing = Some(0);
        ghz.detail = "Mᵀ∘y lies in neither A nor <E> for any twist of M".into();
        for k in 0..3 {
            let mk = &m * &Mat2::diag(Scalar::one(), Scalar::omega().pow(k));
            let z = holographic(&mk, &yf, true)?;
            let (aff, eq) = (in_affine(&z), in_e_closure(&z, None)?);
            ghz.transform = Some(mk.clone());
            if aff || eq {
                ghz.holds = true;
                ghz.failing = None;
                ghz.detail = format!("Mᵀ∘y = {z:?} lies in {}", if aff { "A" } else { "<E>" });
                break;
            }
        }
    }
    cases.push(ghz);

    let mut w = CaseCheck {
        case: Case::WTransform,
        holds: false,
        transform: None,
        failing: Some(1),
        detail: "x is not of W type".into(),
    };
    if tag == EntanglementTag::W {
        let u = w_direction(x).ok_or_else(|| {
            Error::SearchExhausted("W-type signature without a repeated direction".into())
        })?;
        let other = if u[0].is_zero() {
            [Scalar::one(), Scalar::zero()]
        } else {
            [Scalar::zero(), Scalar::one()]
        };
        let m = Mat2::new(
            u[0].clone(),
            other[0].clone(),
            u[1].clone(),
            other[1].clone(),
        );
        let q = quadratic_form(&to_matrix(&yf)?, &u);
        w.transform = Some(m);
        w.holds = q.is_zero();
        w.failing = (!w.holds).then_some(0);
        w.detail = format!("repeated direction u = ({}, {}); uᵀ·y·u = {q}", u[0], u[1]);
    }
    cases.push(w);
    Ok(assemble(
        Problem::TernaryBipartite,
        cases,
        trace,
        &inputs,
        None,
        approximate,
        false,
    ))
}

/// Dispatches a set problem by tag; the shape-specific problems take their
/// inputs from the first one or two signatures.
pub fn classify(problem: Problem, family: &[Signature]) -> Result<Verdict> {
    let sym = |k: usize| -> Result<SymSignature> {
        let f = family.get(k).ok_or_else(|| {
            Error::Precondition(format!("{problem} needs at least {} signature(s)", k + 1))
        })?;
        crate::signatures::to_symmetric(f)
            .ok_or_else(|| Error::WrongShape(format!("signature {k} must be symmetric")))
    };
    match problem {
        Problem::Conservative => classify_conservative(family),
        Problem::HolantPlus => classify_holant_plus(family),
        Problem::HolantC => classify_holant_c(family),
        Problem::Csp => classify_csp(family),
        Problem::Csp2c => classify_csp2c(family),
        Problem::PlanarBinaryEq3 => classify_planar_binary(&sym(0)?),
        Problem::TernaryBipartite => classify_ternary_bipartite(&sym(0)?, &sym(1)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::tensor;

    fn sym(v: &[i64]) -> SymSignature {
        SymSignature::from_ints(v)
    }

    #[test]
    fn conservative_examples() {
        let v = classify_conservative(&[eq(2), Signature::from_ints(&[1, 2])]).unwrap();
        assert_eq!(v.case(), Some(Case::ProductClosure));
        let v = classify_conservative(&[eq(3)]).unwrap();
        assert_eq!(v.case(), Some(Case::OrthogonalEquality));
        match &v.outcome {
            Outcome::PolyTime {
                transform: Some(o), ..
            } => assert!(o.proj_eq(&Mat2::identity())),
            other => panic!("unexpected {other:?}"),
        }
        assert!(v.verify(&[eq(3)]).unwrap());
        let fam = [eq(3), one(3)];
        let v = classify_conservative(&fam).unwrap();
        assert!(!v.is_polytime());
        assert_eq!(v.cases.len(), 4);
        assert!(v.verify(&fam).unwrap());
    }

    #[test]
    fn holant_plus_examples() {
        assert_eq!(
            classify_holant_plus(&[eq(3)]).unwrap().case(),
            Some(Case::Affine)
        );
        let v = classify_holant_plus(&[one(3)]).unwrap();
        assert!(!v.is_polytime());
        assert!(v.planar);
        assert!(v.verify(&[one(3)]).unwrap());
        let d = tensor(&delta0(), &delta0());
        assert_eq!(
            classify_holant_plus(&[d]).unwrap().case(),
            Some(Case::ProductClosure)
        );
    }

    #[test]
    fn holant_c_examples() {
        let v = classify_holant_c(&[eq(4)]).unwrap();
        assert_eq!(v.case(), Some(Case::TransformedAffine));
        match &v.outcome {
            Outcome::PolyTime {
                transform: Some(b), ..
            } => assert_eq!(b, &Mat2::identity()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(v.verify(&[eq(4)]).unwrap());
        assert_eq!(
            classify_holant_c(&[eq(2)]).unwrap().case(),
            Some(Case::ProductClosure)
        );

        // EQ₃ with a ζ₈ phase on 111: a generalised equality, but not affine
        let mut vals = vec![Scalar::zero(); 8];
        vals[0] = Scalar::one();
        vals[7] = Scalar::zeta8();
        let f = Signature::from_values(vals).unwrap();
        let v = classify_holant_c(std::slice::from_ref(&f)).unwrap();
        assert_eq!(v.case(), Some(Case::TransformedAffine));
        assert!(v.certified().contains(&Case::OrthogonalEquality));
        assert!(v.verify(&[f]).unwrap());
    }

    #[test]
    fn csp_examples() {
        assert_eq!(
            classify_csp(&[neq()]).unwrap().case(),
            Some(Case::EqualityClosure)
        );
        let v = classify_csp(&[one(3)]).unwrap();
        assert!(!v.is_polytime());
        assert_eq!(
            v.outcome,
            Outcome::Hard {
                witness: Some(one(3))
            }
        );

        let g = Signature::from_values(vec![
            Scalar::one(),
            Scalar::zero(),
            Scalar::zero(),
            Scalar::zeta8(),
        ])
        .unwrap();
        let v = classify_csp2c(std::slice::from_ref(&g)).unwrap();
        assert_eq!(v.case(), Some(Case::EqualityClosure));
        assert_eq!(v.certified(), vec![Case::EqualityClosure]);
        assert!(v.verify(&[g]).unwrap());
        // T itself moves [1, 0, i] into T∘A
        let h = holographic(&Mat2::t(), &eq(2), false).unwrap();
        assert!(classify_csp2c(&[h])
            .unwrap()
            .certified()
            .contains(&Case::TAffine));
    }

    #[test]
    fn planar_examples() {
        let v = classify_planar_binary(&sym(&[1, 1, -1])).unwrap();
        assert!(v.is_polytime());
        assert_eq!(v.case(), Some(Case::OmegaAffine));
        assert_eq!(
            classify_planar_binary(&sym(&[2, 1, 2])).unwrap().case(),
            Some(Case::Matchgate)
        );
        let v = classify_planar_binary(&sym(&[3, 1, 5])).unwrap();
        assert!(!v.is_polytime());
        assert!(v.verify(&[sym(&[3, 1, 5]).expand()]).unwrap());
        let [x1, x2, x3, x4] = planar_conditions(&Scalar::int(3), &Scalar::int(5));
        assert!(!(x1 || x2 || x3 || x4));
        assert!(classify_planar_binary(&sym(&[1, 0, 0, 1])).is_err());
    }

    #[test]
    fn bipartite_examples() {
        let v = classify_ternary_bipartite(&sym(&[1, 2, 3]), &sym(&[1, 1, 1, 1])).unwrap();
        assert_eq!(v.case(), Some(Case::Degenerate));
        let v = classify_ternary_bipartite(&sym(&[1, 0, 1]), &sym(&[1, 0, 0, 1])).unwrap();
        assert_eq!(v.case(), Some(Case::GhzTransform));
        assert!(v.verify(&[sym(&[1, 0, 1]).expand(), eq(3)]).unwrap());
        let v = classify_ternary_bipartite(&sym(&[1, 2, 3]), &sym(&[1, 0, 0, 1])).unwrap();
        assert!(!v.is_polytime());

        let v = classify_ternary_bipartite(&sym(&[0, 1, 5]), &sym(&[1, 1, 0, 0])).unwrap();
        assert_eq!(v.case(), Some(Case::WTransform));
        let v = classify_ternary_bipartite(&sym(&[1, 1, 5]), &sym(&[1, 1, 0, 0])).unwrap();
        assert!(!v.is_polytime());
        let v = classify_ternary_bipartite(&sym(&[2, 1, 0]), &sym(&[0, 0, 1, 1])).unwrap();
        assert_eq!(v.case(), Some(Case::WTransform));
        assert!(v
            .verify(&[sym(&[2, 1, 0]).expand(), sym(&[0, 0, 1, 1]).expand()])
            .unwrap());
    }

    #[test]
    fn w_direction_examples() {
        let u = w_direction(&sym(&[0, 1, 0, 0])).unwrap();
        assert!(u[1].is_zero() && !u[0].is_zero());
        let u = w_direction(&sym(&[0, 0, 1, 0])).unwrap();
        assert!(u[0].is_zero() && !u[1].is_zero());
    }

    #[test]
    fn problem_tags_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.tag().parse::<Problem>().unwrap(), p);
        }
        assert!("planar".parse::<Problem>().is_err());
    }
}
