//! Affine signatures c·i^{l(x)}·(−1)^{q(x)} on an affine support, and a
//! polynomial-time holant evaluator for grids built from them.

use std::collections::BTreeSet;

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::grids::SignatureGrid;
use crate::signatures::Signature;

/// Normal form of an affine signature.
///
/// Bit masks use the signature index convention: argument j is bit n−1−j.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub arity: usize,
    pub c: Scalar,
    /// A support point, zero at every pivot.
    pub offset: usize,
    /// Reduced basis of the support direction space; basis[i] contains the
    /// bit of argument pivots[i] and no other pivot bit.
    pub basis: Vec<usize>,
    pub pivots: Vec<usize>,
    /// Z₄ coefficient of each argument.
    pub linear: Vec<u8>,
    /// Argument pairs (j, k), j < k, contributing (−1)^{x_j x_k}.
    pub quadratic: Vec<(usize, usize)>,
}

fn arg_bit(n: usize, arg: usize) -> usize {
    1 << (n - 1 - arg)
}

impl AffineForm {
    /// True if x lies in the affine support.
    pub fn contains(&self, x: usize) -> bool {
        let n = self.arity;
        let mut y = x ^ self.offset;
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if y & arg_bit(n, p) != 0 {
                y ^= b;
            }
        }
        y == 0
    }

    /// Exponent of i at x (ignoring the support).
    pub fn phase(&self, x: usize) -> u8 {
        let n = self.arity;
        let on = |j: usize| x & arg_bit(n, j) != 0;
        let mut k: u32 = 0;
        for (j, &l) in self.linear.iter().enumerate() {
            if on(j) {
                k += l as u32;
            }
        }
        for &(a, b) in &self.quadratic {
            if on(a) && on(b) {
                k += 2;
            }
        }
        (k % 4) as u8
    }

    pub fn evaluate(&self, x: usize) -> Scalar {
        if self.contains(x) {
            &self.c * &Scalar::i().pow(self.phase(x) as u32)
        } else {
            self.c.zero_like()
        }
    }

    pub fn to_signature(&self) -> Signature {
        Signature::from_fn(self.arity, |x| self.evaluate(x))
    }

    /// Parity checks describing the support: each (mask, b) says that the
    /// XOR of the masked input bits equals b.
    pub fn parity_checks(&self) -> Vec<(usize, usize)> {
        let n = self.arity;
        (0..n)
            .filter(|j| !self.pivots.contains(j))
            .map(|j| {
                let mut mask = arg_bit(n, j);
                for (b, &p) in self.basis.iter().zip(&self.pivots) {
                    if b & arg_bit(n, j) != 0 {
                        mask |= arg_bit(n, p);
                    }
                }
                let rhs = usize::from(self.offset & arg_bit(n, j) != 0);
                (mask, rhs)
            })
            .collect()
    }
}

/// Builds the signature c·i^{l(x)}·(−1)^{q(x)} on offset + span(generators).
pub fn affine_signature(
    arity: usize,
    c: Scalar,
    offset: usize,
    generators: &[usize],
    linear: &[u8],
    quadratic: &[(usize, usize)],
) -> Signature {
    let mut span: BTreeSet<usize> = BTreeSet::from([0]);
    for &g in generators {
        let shifted: Vec<usize> = span.iter().map(|s| s ^ g).collect();
        span.extend(shifted);
    }
    let form = AffineForm {
        arity,
        c: c.clone(),
        offset: 0,
        basis: vec![],
        pivots: vec![],
        linear: linear.to_vec(),
        quadratic: quadratic.to_vec(),
    };
    Signature::from_fn(arity, |x| {
        if span.contains(&(x ^ offset)) {
            &c * &Scalar::i().pow(form.phase(x) as u32)
        } else {
            c.zero_like()
        }
    })
}

/// Normal form of f if f is affine; the zero signature is not affine here.
pub fn affine_normal_form(f: &Signature) -> Option<AffineForm> {
    let n = f.arity();
    let support = f.support();
    let &s0 = support.first()?;
    let mut basis: Vec<usize> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &s in &support {
        let mut v = s ^ s0;
        for (b, &p) in basis.iter().zip(&pivots) {
            if v & arg_bit(n, p) != 0 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = n - 1 - (usize::BITS - 1 - v.leading_zeros()) as usize;
        for b in basis.iter_mut() {
            if *b & arg_bit(n, p) != 0 {
                *b ^= v;
            }
        }
        basis.push(v);
        pivots.push(p);
    }
    if support.len() != 1 << basis.len() {
        return None;
    }
    let mut offset = s0;
    for (b, &p) in basis.iter().zip(&pivots) {
        if offset & arg_bit(n, p) != 0 {
            offset ^= b;
        }
    }
    let c = f.value(offset).clone();
    let cinv = c.inv().ok()?;
    let phase_at = |x: usize| (f.value(x) * &cinv).power_of_i();
    let mut linear = vec![0u8; n];
    let mut lam = Vec::with_capacity(basis.len());
    for (b, &p) in basis.iter().zip(&pivots) {
        let l = phase_at(offset ^ b)?;
        linear[p] = l;
        lam.push(l);
    }
    let mut quadratic = Vec::new();
    for i in 0..basis.len() {
        for k in i + 1..basis.len() {
            let total = phase_at(offset ^ basis[i] ^ basis[k])?;
            let q = (total + 8 - lam[i] - lam[k]) % 4;
            match q {
                0 => {}
                2 => {
                    let (a, b) = (pivots[i].min(pivots[k]), pivots[i].max(pivots[k]));
                    quadratic.push((a, b));
                }
                _ => return None,
            }
        }
    }
    quadratic.sort_unstable();
    let form = AffineForm {
        arity: n,
        c,
        offset,
        basis,
        pivots,
        linear,
        quadratic,
    };
    support
        .iter()
        .all(|&x| form.evaluate(x) == *f.value(x))
        .then_some(form)
}

/// True if f is affine.
pub fn is_affine(f: &Signature) -> bool {
    affine_normal_form(f).is_some()
}

/// An F₂-affine expression c ⊕ ⊕_{j∈vars} y_j.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Expr {
    c: bool,
    vars: BTreeSet<usize>,
}

impl Expr {
    fn var(j: usize) -> Self {
        Expr {
            c: false,
            vars: BTreeSet::from([j]),
        }
    }
}

/// The exponent k + Σ l_j y_j + 2·Σ_{j<k} Q_jk y_j y_k (mod 4) of i, over
/// Boolean variables.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub constant: u8,
    pub linear: Vec<u8>,
    /// Symmetric 0/1 matrix; only off-diagonal entries are used.
    pub quadratic: Vec<Vec<bool>>,
}

impl QuadraticForm {
    pub fn new(vars: usize) -> Self {
        QuadraticForm {
            constant: 0,
            linear: vec![0; vars],
            quadratic: vec![vec![false; vars]; vars],
        }
    }

    pub fn vars(&self) -> usize {
        self.linear.len()
    }

    pub fn add_linear(&mut self, j: usize, l: u8) {
        self.linear[j] = (self.linear[j] + l) % 4;
    }

    /// Adds 2·y_j·y_k.
    pub fn add_cross(&mut self, j: usize, k: usize) {
        if j == k {
            self.add_linear(j, 2);
        } else {
            self.quadratic[j][k] ^= true;
            self.quadratic[k][j] ^= true;
        }
    }

    /// Exponent at an assignment (bit j of `y` is y_j).
    pub fn exponent(&self, y: usize) -> u8 {
        let on = |j: usize| (y >> j) & 1 == 1;
        let mut k = self.constant as u32;
        for j in 0..self.vars() {
            if on(j) {
                k += self.linear[j] as u32;
                for t in j + 1..self.vars() {
                    if on(t) && self.quadratic[j][t] {
                        k += 2;
                    }
                }
            }
        }
        (k % 4) as u8
    }

    /// λ·e for an affine expression e, using c ⊕ Z = c + Z − 2cZ and
    /// ⊕ y = Σ y − 2Σ_{pairs} y_i y_j (mod 4).
    fn add_linear_expr(&mut self, lambda: u8, e: &Expr) {
        let lambda = lambda % 4;
        if lambda == 0 {
            return;
        }
        let sign = if e.c { 4 - lambda } else { lambda };
        if e.c {
            self.constant = (self.constant + lambda) % 4;
        }
        for &j in &e.vars {
            self.add_linear(j, sign);
        }
        if lambda % 2 == 1 {
            let vs: Vec<usize> = e.vars.iter().copied().collect();
            for a in 0..vs.len() {
                for b in a + 1..vs.len() {
                    self.add_cross(vs[a], vs[b]);
                }
            }
        }
    }

    /// 2·ea·eb.
    fn add_cross_expr(&mut self, ea: &Expr, eb: &Expr) {
        if ea.c && eb.c {
            self.constant = (self.constant + 2) % 4;
        }
        if ea.c {
            for &j in &eb.vars {
                self.add_linear(j, 2);
            }
        }
        if eb.c {
            for &j in &ea.vars {
                self.add_linear(j, 2);
            }
        }
        for &a in &ea.vars {
            for &b in &eb.vars {
                self.add_cross(a, b);
            }
        }
    }

    /// Removes every term mentioning j, returning (l_j, neighbours of j).
    fn take_var(&mut self, j: usize) -> (u8, Vec<usize>) {
        let l = self.linear[j];
        self.linear[j] = 0;
        let mut nbrs = Vec::new();
        for k in 0..self.vars() {
            if self.quadratic[j][k] {
                self.quadratic[j][k] = false;
                self.quadratic[k][j] = false;
                nbrs.push(k);
            }
        }
        (l, nbrs)
    }

    /// Replaces y_j by the expression e (which must not mention j).
    fn substitute(&mut self, j: usize, e: &Expr) {
        let (l, nbrs) = self.take_var(j);
        self.add_linear_expr(l, e);
        for k in nbrs {
            self.add_cross_expr(e, &Expr::var(k));
        }
    }
}

fn i_pow(k: u8) -> Scalar {
    Scalar::i().pow((k % 4) as u32)
}

/// Σ_{y ∈ {0,1}^m} i^{form(y)} for the variables flagged in `active`, by
/// eliminating one variable at a time.
fn gauss_sum_active(mut form: QuadraticForm, mut active: Vec<bool>) -> Scalar {
    let mut factor = Scalar::one();
    while let Some(v) = active.iter().position(|&a| a) {
        active[v] = false;
        let (l, nbrs) = form.take_var(v);
        if nbrs.is_empty() {
            // Σ_{y_v} i^{l·y_v}
            factor = factor * (Scalar::one() + i_pow(l));
        } else if l % 2 == 0 {
            // 1 + (−1)^{l/2 + L(y)} = 2·[L(y) = l/2]
            factor = factor * Scalar::int(2);
            let k0 = nbrs[0];
            let e = Expr {
                c: l == 2,
                vars: nbrs[1..].iter().copied().collect(),
            };
            form.substitute(k0, &e);
            active[k0] = false;
        } else {
            // 1 + i^l·(−1)^{L} = (1 + i^l)·i^{(4−l)·L}
            factor = factor * (Scalar::one() + i_pow(l));
            let e = Expr {
                c: false,
                vars: nbrs.iter().copied().collect(),
            };
            form.add_linear_expr(4 - l, &e);
        }
        if factor.is_zero() {
            return factor;
        }
    }
    factor * i_pow(form.constant)
}

/// Σ_y i^{form(y)} over all Boolean assignments, in polynomial time.
pub fn gauss_sum(form: &QuadraticForm) -> Scalar {
    gauss_sum_active(form.clone(), vec![true; form.vars()])
}

/// Σ_y i^{form(y)} by enumeration.
pub fn gauss_sum_bruteforce(form: &QuadraticForm) -> Scalar {
    (0..1usize << form.vars())
        .map(|y| i_pow(form.exponent(y)))
        .sum()
}

/// Holant of a grid whose signatures are all affine.
pub fn holant_affine(grid: &SignatureGrid) -> Result<Scalar> {
    grid.validate().map_err(Error::InvalidGrid)?;
    let slot_edges = grid.slot_edges();
    let n_vars = grid.edges.len();
    let mut constant = Scalar::one();
    let mut form = QuadraticForm::new(n_vars);
    // rows of the parity system: (variable set, right-hand side)
    let mut rows: Vec<(BTreeSet<usize>, bool)> = Vec::new();
    for (vi, v) in grid.vertices.iter().enumerate() {
        let f = &v.signature;
        if f.arity() == 0 {
            constant = constant * f.value(0);
            continue;
        }
        if f.is_zero() {
            return Ok(Scalar::zero());
        }
        let af = affine_normal_form(f)
            .ok_or_else(|| Error::Precondition(format!("vertex '{}' is not affine", v.id)))?;
        constant = constant * &af.c;
        let n = af.arity;
        let edge = |arg: usize| slot_edges[vi][arg];
        for (mask, rhs) in af.parity_checks() {
            let mut vars = BTreeSet::new();
            for arg in 0..n {
                if mask & arg_bit(n, arg) != 0 && !vars.remove(&edge(arg)) {
                    vars.insert(edge(arg));
                }
            }
            rows.push((vars, rhs == 1));
        }
        for (arg, &l) in af.linear.iter().enumerate() {
            form.add_linear(edge(arg), l);
        }
        for &(a, b) in &af.quadratic {
            form.add_cross(edge(a), edge(b));
        }
    }

    // reduced row echelon form over F₂
    let mut pivot_rows: Vec<(usize, BTreeSet<usize>, bool)> = Vec::new();
    for (mut vars, mut rhs) in rows {
        for (p, pv, pr) in &pivot_rows {
            if vars.contains(p) {
                vars = vars.symmetric_difference(pv).copied().collect();
                rhs ^= pr;
            }
        }
        let Some(&p) = vars.iter().next() else {
            if rhs {
                return Ok(Scalar::zero());
            }
            continue;
        };
        for (_, pv, pr) in pivot_rows.iter_mut() {
            if pv.contains(&p) {
                *pv = pv.symmetric_difference(&vars).copied().collect();
                *pr ^= rhs;
            }
        }
        pivot_rows.push((p, vars, rhs));
    }
    let mut active = vec![true; n_vars];
    for (p, vars, rhs) in &pivot_rows {
        let mut others = vars.clone();
        others.remove(p);
        form.substitute(
            *p,
            &Expr {
                c: *rhs,
                vars: others,
            },
        );
        active[*p] = false;
    }
    Ok(constant * gauss_sum_active(form, active))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::brute::holant_bruteforce;
    use crate::signatures::named::*;
    use crate::signatures::{identify, permute, sum_out, tensor};
    use proptest::prelude::*;

    #[test]
    fn normal_form_examples() {
        let f = affine_normal_form(&eq(2)).unwrap();
        assert!(f.c.is_one());
        assert_eq!(f.basis.len(), 1);
        assert!(f.linear.iter().all(|&l| l == 0));
        assert!(f.quadratic.is_empty());
        assert_eq!(f.parity_checks(), vec![(0b11, 0)]);

        let h = affine_normal_form(&Signature::from_ints(&[1, 1, 1, -1])).unwrap();
        assert_eq!(h.quadratic, vec![(0, 1)]);
        assert!(affine_normal_form(&one(3)).is_none());
        assert!(affine_normal_form(&Signature::from_ints(&[1, 2])).is_none());
        let t = Signature::new(1, vec![Scalar::one(), Scalar::zeta8()]).unwrap();
        assert!(affine_normal_form(&t).is_none());
    }

    #[test]
    fn holant_examples() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(2));
        g.add_edge((a, 0), (a, 1));
        assert_eq!(holant_affine(&g).unwrap(), Scalar::int(2));

        // Σ_{x ∈ {0,1}²} (−1)^{x₁x₂}: H with both arguments fed by δ₊
        let mut g = SignatureGrid::new();
        let h = g.add_vertex("h", Signature::from_ints(&[1, 1, 1, -1]));
        let p = g.add_vertex("p", delta_plus());
        let q = g.add_vertex("q", delta_plus());
        g.add_edge((h, 0), (p, 0));
        g.add_edge((h, 1), (q, 0));
        assert_eq!(holant_affine(&g).unwrap(), Scalar::int(2));

        // Σ_x i^x
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", delta_i());
        let b = g.add_vertex("b", delta_plus());
        g.add_edge((a, 0), (b, 0));
        assert_eq!(holant_affine(&g).unwrap(), Scalar::one() + Scalar::i());

        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", one(3));
        let d = g.add_vertex("d", delta0());
        g.add_edge((a, 0), (a, 1));
        g.add_edge((a, 2), (d, 0));
        assert!(holant_affine(&g).is_err());
    }

    #[test]
    fn inconsistent_support_gives_zero() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(2));
        let b = g.add_vertex("b", neq());
        g.add_edge((a, 0), (b, 0));
        g.add_edge((a, 1), (b, 1));
        assert_eq!(holant_affine(&g).unwrap(), holant_bruteforce(&g).unwrap());
    }

    fn random_form(
    ) -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<u8>, Vec<(usize, usize)>, i64)> {
        (1usize..=5).prop_flat_map(|n| {
            let top = 1usize << n;
            (
                Just(n),
                0..top,
                proptest::collection::vec(0..top, 0..=n),
                proptest::collection::vec(0u8..4, n),
                proptest::collection::vec((0..n, 0..n), 0..=n),
                prop_oneof![Just(1i64), Just(-2), Just(3)],
            )
        })
    }

    fn quad_form(vars: usize) -> impl Strategy<Value = QuadraticForm> {
        (
            0u8..4,
            proptest::collection::vec(0u8..4, vars),
            proptest::collection::vec(any::<bool>(), vars * vars),
        )
            .prop_map(move |(c, l, q)| {
                let mut f = QuadraticForm::new(vars);
                f.constant = c;
                f.linear = l;
                for j in 0..vars {
                    for k in j + 1..vars {
                        if q[j * vars + k] {
                            f.add_cross(j, k);
                        }
                    }
                }
                f
            })
    }

    proptest! {
        #[test]
        fn normal_form_round_trips((n, off, gens, lin, quad, c) in random_form()) {
            let quad: Vec<(usize, usize)> = quad.into_iter().filter(|(a, b)| a != b).collect();
            let f = affine_signature(n, Scalar::int(c), off, &gens, &lin, &quad);
            let form = affine_normal_form(&f).expect("affine by construction");
            prop_assert_eq!(form.to_signature(), f);
        }

        #[test]
        fn closure_under_gadget_operations((n, off, gens, lin, quad, c) in random_form(), j in 0usize..5, k in 0usize..5) {
            let quad: Vec<(usize, usize)> = quad.into_iter().filter(|(a, b)| a != b).collect();
            let f = affine_signature(n, Scalar::int(c), off, &gens, &lin, &quad);
            let g = tensor(&f, &Signature::from_ints(&[1, 0, 0, 1]));
            prop_assert!(is_affine(&g));
            let m = g.arity();
            let (j, k) = (j % m, k % m);
            let rho: Vec<usize> = (0..m).map(|x| (x + j) % m).collect();
            prop_assert!(is_affine(&permute(&g, &rho).unwrap()));
            let s = sum_out(&g, j).unwrap();
            prop_assert!(s.is_zero() || is_affine(&s));
            if j != k {
                let id = identify(&g, j, k).unwrap();
                prop_assert!(id.is_zero() || is_affine(&id));
            }
        }

        #[test]
        fn gauss_sum_matches_enumeration(form in (1usize..=8).prop_flat_map(quad_form)) {
            prop_assert_eq!(gauss_sum(&form), gauss_sum_bruteforce(&form));
        }
    }

    #[test]
    fn gauss_sum_twelve_variables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let mut f = QuadraticForm::new(12);
            f.constant = rng.gen_range(0..4);
            for j in 0..12 {
                f.linear[j] = rng.gen_range(0..4);
                for k in j + 1..12 {
                    if rng.gen_bool(0.4) {
                        f.add_cross(j, k);
                    }
                }
            }
            assert_eq!(gauss_sum(&f), gauss_sum_bruteforce(&f));
        }
    }
}
