//! Evaluation of grids whose transformed signatures are generalised
//! equalities (support inside a complementary pair {a, ā}).
//!
//! Once one piece of a connected component picks a or ā, the edge constraints
//! force every other piece, so each component contributes a sum of two terms.

use std::collections::VecDeque;

use crate::algebra::{Mat2, Scalar};
use crate::entanglement::factorize;
use crate::error::{Error, Result};
use crate::grids::SignatureGrid;
use crate::signatures::{bit, holographic, Signature};

struct Piece {
    edges: Vec<usize>,
    sig: Signature,
    /// A support point; the complementary input is the only other one allowed.
    anchor: usize,
}

/// Holant of `grid` given that every signature of transform⁻¹∘grid lies in
/// the tensor closure of generalised equalities.
///
/// Each edge then carries the binary form transformᵀ·transform, which must be
/// diagonal or antidiagonal.
pub fn holant_generalized_equality(grid: &SignatureGrid, transform: &Mat2) -> Result<Scalar> {
    grid.validate().map_err(Error::InvalidGrid)?;
    let inv = transform.inverse()?;
    let edge_form = &transform.transpose() * transform;
    let flip = if edge_form.is_diagonal() {
        0
    } else if edge_form.is_antidiagonal() {
        1
    } else {
        return Err(Error::Precondition(
            "transform must make the edge form diagonal or antidiagonal".into(),
        ));
    };
    let slot_edges = grid.slot_edges();
    let mut total = Scalar::one();
    let mut pieces: Vec<Piece> = Vec::new();
    for (vi, v) in grid.vertices.iter().enumerate() {
        let g = holographic(&inv, &v.signature, false)?;
        if g.arity() == 0 {
            total = total * g.value(0);
            continue;
        }
        if g.is_zero() {
            return Ok(Scalar::zero());
        }
        let fz = factorize(&g)?;
        total = total * &fz.scalar;
        for (args, f) in fz.factors {
            let support = f.support();
            let anchor = support[0];
            let mask = (1usize << f.arity()) - 1;
            if support.iter().any(|&x| x != anchor && x != anchor ^ mask) {
                return Err(Error::Precondition(format!(
                    "vertex '{}' is not a product of generalised equalities after the transform",
                    v.id
                )));
            }
            pieces.push(Piece {
                edges: args.iter().map(|&a| slot_edges[vi][a]).collect(),
                sig: f,
                anchor,
            });
        }
    }

    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); grid.edges.len()];
    for (p, piece) in pieces.iter().enumerate() {
        for (a, &e) in piece.edges.iter().enumerate() {
            ends[e].push((p, a));
        }
    }

    let mut done = vec![false; pieces.len()];
    for root in 0..pieces.len() {
        if done[root] {
            continue;
        }
        let mut component_sum = Scalar::zero();
        let mut members = Vec::new();
        for root_state in 0..2 {
            // state[p] = 0 means piece p takes its anchor, 1 its complement
            let mut state: Vec<Option<usize>> = vec![None; pieces.len()];
            state[root] = Some(root_state);
            let mut queue = VecDeque::from([root]);
            let mut weight = Scalar::one();
            let mut consistent = true;
            let mut seen_edges = vec![false; grid.edges.len()];
            members.clear();
            while let Some(p) = queue.pop_front() {
                members.push(p);
                let piece = &pieces[p];
                let n = piece.sig.arity();
                let mask = (1usize << n) - 1;
                let input = if state[p] == Some(0) {
                    piece.anchor
                } else {
                    piece.anchor ^ mask
                };
                weight = weight * piece.sig.value(input);
                for (a, &e) in piece.edges.iter().enumerate() {
                    if seen_edges[e] {
                        continue;
                    }
                    seen_edges[e] = true;
                    let here = bit(input, n, a);
                    let [x, y] = [ends[e][0], ends[e][1]];
                    let (q, b) = if x == (p, a) { y } else { x };
                    let there_required = here ^ flip;
                    weight = weight * edge_form.get(here, there_required);
                    let other = &pieces[q];
                    let m = other.sig.arity();
                    let anchor_bit = bit(other.anchor, m, b);
                    let needed = anchor_bit ^ there_required;
                    match state[q] {
                        None => {
                            state[q] = Some(needed);
                            queue.push_back(q);
                        }
                        Some(s) if s != needed => consistent = false,
                        Some(_) => {}
                    }
                }
            }
            if consistent {
                component_sum = component_sum + weight;
            }
        }
        for &p in &members {
            done[p] = true;
        }
        total = total * component_sum;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::brute::holant_bruteforce;
    use crate::signatures::named::*;
    use crate::signatures::SymSignature;

    #[test]
    fn examples() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(3));
        let b = g.add_vertex("b", eq(3));
        let c = g.add_vertex("c", eq(2));
        g.add_edge((a, 0), (b, 0));
        g.add_edge((a, 1), (b, 1));
        g.add_edge((a, 2), (c, 0));
        g.add_edge((b, 2), (c, 1));
        assert_eq!(
            holant_generalized_equality(&g, &Mat2::identity()).unwrap(),
            Scalar::int(2)
        );

        let mut g = SignatureGrid::new();
        let f = SymSignature::from_ints(&[3, 0, 5]).expand();
        let a = g.add_vertex("a", f.clone());
        let b = g.add_vertex("b", f);
        g.add_edge((a, 0), (b, 0));
        g.add_edge((a, 1), (b, 1));
        assert_eq!(
            holant_generalized_equality(&g, &Mat2::identity()).unwrap(),
            Scalar::int(34)
        );

        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", one(3));
        g.add_edge((a, 0), (a, 1));
        let d = g.add_vertex("d", delta0());
        g.add_edge((a, 2), (d, 0));
        assert!(holant_generalized_equality(&g, &Mat2::identity()).is_err());
    }

    #[test]
    fn transformed_grids_match_bruteforce() {
        // vertices K∘EQ₃, K∘NEQ: edge form KᵀK = 2X
        let k = Mat2::k();
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", holographic(&k, &eq(3), false).unwrap());
        let b = g.add_vertex("b", holographic(&k, &eq(3), false).unwrap());
        let c = g.add_vertex("c", holographic(&k, &neq(), false).unwrap());
        g.add_edge((a, 0), (b, 0));
        g.add_edge((a, 1), (b, 1));
        g.add_edge((a, 2), (c, 0));
        g.add_edge((b, 2), (c, 1));
        assert_eq!(
            holant_generalized_equality(&g, &k).unwrap(),
            holant_bruteforce(&g).unwrap()
        );
        assert!(holant_generalized_equality(&g, &Mat2::from_ints(1, 1, 0, 1)).is_err());
    }
}
