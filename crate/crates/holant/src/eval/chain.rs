//! Evaluation of grids whose signatures factor into unary and binary pieces.
//!
//! After factoring, every piece has degree at most two, so each connected
//! component is a path (closed off by unary pieces) or a cycle.

use crate::algebra::{Mat2, Scalar};
use crate::entanglement::factorize;
use crate::error::{Error, Result};
use crate::grids::SignatureGrid;

struct Piece {
    /// Edge id at each argument of the piece.
    edges: Vec<usize>,
    values: Vec<Scalar>,
}

impl Piece {
    fn matrix(&self) -> Mat2 {
        let v = &self.values;
        Mat2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())
    }
}

/// Holant of a grid whose signatures all lie in the tensor closure of unary
/// and binary functions.
pub fn holant_binary_chain(grid: &SignatureGrid) -> Result<Scalar> {
    grid.validate().map_err(Error::InvalidGrid)?;
    let slot_edges = grid.slot_edges();
    let mut total = Scalar::one();
    let mut pieces: Vec<Piece> = Vec::new();
    for (vi, v) in grid.vertices.iter().enumerate() {
        if v.signature.arity() == 0 {
            total = total * v.signature.value(0);
            continue;
        }
        if v.signature.is_zero() {
            return Ok(Scalar::zero());
        }
        let fz = factorize(&v.signature)?;
        total = total * &fz.scalar;
        for (args, f) in fz.factors {
            if args.len() > 2 {
                return Err(Error::Precondition(format!(
                    "vertex '{}' has a factor of arity {}",
                    v.id,
                    args.len()
                )));
            }
            pieces.push(Piece {
                edges: args.iter().map(|&a| slot_edges[vi][a]).collect(),
                values: f.into_values(),
            });
        }
    }

    // the two (piece, argument) ends of each edge
    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); grid.edges.len()];
    for (p, piece) in pieces.iter().enumerate() {
        for (a, &e) in piece.edges.iter().enumerate() {
            ends[e].push((p, a));
        }
    }
    let other_end = |e: usize, here: (usize, usize)| -> (usize, usize) {
        let [x, y] = [ends[e][0], ends[e][1]];
        if x == here {
            y
        } else {
            x
        }
    };

    let mut used = vec![false; pieces.len()];
    // Walks from `start` leaving through argument `out`, carrying a row vector
    // `acc` indexed by the value on that outgoing edge. Returns the vector at
    // the piece where the walk stops (a unary end, or back at `start`).
    let walk = |start: usize, out: usize, mut acc: [Scalar; 2], used: &mut Vec<bool>| {
        let mut cur = (start, out);
        loop {
            let e = pieces[cur.0].edges[cur.1];
            let (p, a) = other_end(e, cur);
            if p == start && used[p] {
                return (acc, true);
            }
            used[p] = true;
            let piece = &pieces[p];
            if piece.edges.len() == 1 {
                let v = &piece.values;
                return ([&acc[0] * &v[0] + &acc[1] * &v[1], Scalar::zero()], false);
            }
            let m = if a == 0 {
                piece.matrix()
            } else {
                piece.matrix().transpose()
            };
            acc = [
                &acc[0] * m.get(0, 0) + &acc[1] * m.get(1, 0),
                &acc[0] * m.get(0, 1) + &acc[1] * m.get(1, 1),
            ];
            cur = (p, 1 - a);
        }
    };

    // paths: start from every unused unary piece
    for start in 0..pieces.len() {
        if used[start] || pieces[start].edges.len() != 1 {
            continue;
        }
        used[start] = true;
        let v = &pieces[start].values;
        let (acc, _) = walk(start, 0, [v[0].clone(), v[1].clone()], &mut used);
        total = total * &acc[0];
    }
    // cycles: whatever binary pieces remain
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let m = pieces[start].matrix();
        // row vectors e₀ᵀM and e₁ᵀM, each walked round the cycle
        let mut trace = Scalar::zero();
        for row in 0..2 {
            let mut local = used.clone();
            let (acc, closed) = walk(
                start,
                1,
                [m.get(row, 0).clone(), m.get(row, 1).clone()],
                &mut local,
            );
            debug_assert!(closed);
            trace = trace + &acc[row];
            if row == 1 {
                used = local;
            }
        }
        total = total * trace;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::brute::holant_bruteforce;
    use crate::signatures::named::*;
    use crate::signatures::{tensor, Signature};

    #[test]
    fn cycles_of_equalities() {
        for k in 1..6 {
            let mut g = SignatureGrid::new();
            for v in 0..k {
                g.add_vertex(format!("v{v}"), eq(2));
            }
            for v in 0..k {
                g.add_edge((v, 1), ((v + 1) % k, 0));
            }
            assert_eq!(holant_binary_chain(&g).unwrap(), Scalar::int(2));
        }
    }

    #[test]
    fn path_and_components() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", delta0());
        let h = g.add_vertex("h", Signature::from_ints(&[1, 2, 3, 4]));
        let b = g.add_vertex("b", delta1());
        g.add_edge((a, 0), (h, 0));
        g.add_edge((h, 1), (b, 0));
        assert_eq!(holant_binary_chain(&g).unwrap(), Scalar::int(2));

        // reversed orientation of h
        let mut g2 = SignatureGrid::new();
        let a = g2.add_vertex("a", delta0());
        let h = g2.add_vertex("h", Signature::from_ints(&[1, 2, 3, 4]));
        let b = g2.add_vertex("b", delta1());
        g2.add_edge((a, 0), (h, 1));
        g2.add_edge((h, 0), (b, 0));
        assert_eq!(holant_binary_chain(&g2).unwrap(), Scalar::int(3));

        // two components multiply
        let mut both = g.clone();
        let off = both.vertices.len();
        for v in g2.vertices.clone() {
            both.vertices.push(v);
        }
        for [x, y] in g2.edges.clone() {
            both.add_edge((x.vertex + off, x.slot), (y.vertex + off, y.slot));
        }
        assert_eq!(holant_binary_chain(&both).unwrap(), Scalar::int(6));
    }

    #[test]
    fn factored_vertices_and_self_loops() {
        let mut g = SignatureGrid::new();
        let f = tensor(
            &Signature::from_ints(&[1, 2, 3, 4]),
            &Signature::from_ints(&[2, 5, 1, 1]),
        );
        let a = g.add_vertex("a", f);
        g.add_edge((a, 0), (a, 3));
        g.add_edge((a, 1), (a, 2));
        assert_eq!(
            holant_binary_chain(&g).unwrap(),
            holant_bruteforce(&g).unwrap()
        );

        let mut bad = SignatureGrid::new();
        let a = bad.add_vertex("a", eq(3));
        let b = bad.add_vertex("b", eq(3));
        bad.add_edge((a, 0), (b, 0));
        bad.add_edge((a, 1), (b, 1));
        bad.add_edge((a, 2), (b, 2));
        assert!(matches!(
            holant_binary_chain(&bad),
            Err(Error::Precondition(_))
        ));
    }
}
