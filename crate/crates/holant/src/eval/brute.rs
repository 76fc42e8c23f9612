//! Direct enumeration of edge assignments. Exponential, used as the oracle.

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::grids::{Endpoint, Gadget, SignatureGrid};
use crate::signatures::Signature;

/// Σ over all σ: E → {0,1} of Π_v f_v(σ restricted to the edges at v).
pub fn holant_bruteforce(grid: &SignatureGrid) -> Result<Scalar> {
    grid.validate().map_err(Error::InvalidGrid)?;
    Ok(enumerate(grid, &[]).value(0).clone())
}

/// Effective signature of a gadget by enumeration.
pub fn effective_signature_bruteforce(g: &Gadget) -> Result<Signature> {
    g.validate().map_err(Error::InvalidGrid)?;
    Ok(enumerate(&g.grid, &g.dangling))
}

fn enumerate(grid: &SignatureGrid, dangling: &[Endpoint]) -> Signature {
    let n_edges = grid.edges.len();
    let k = dangling.len();
    // variable index per (vertex, slot): internal edges first, then dangling
    let mut var: Vec<Vec<usize>> = grid
        .vertices
        .iter()
        .map(|v| vec![0; v.signature.arity()])
        .collect();
    for (e, ends) in grid.edges.iter().enumerate() {
        for end in ends {
            var[end.vertex][end.slot] = e;
        }
    }
    for (d, end) in dangling.iter().enumerate() {
        var[end.vertex][end.slot] = n_edges + d;
    }
    Signature::from_fn(k, |outer| {
        let mut acc = Scalar::zero();
        for inner in 0..1usize << n_edges {
            // variable v has value bit v of `assignment`
            let assignment = inner | (reverse_bits(outer, k) << n_edges);
            let mut term = Scalar::one();
            for (vi, v) in grid.vertices.iter().enumerate() {
                let idx = var[vi]
                    .iter()
                    .fold(0usize, |x, &e| (x << 1) | ((assignment >> e) & 1));
                let val = v.signature.value(idx);
                if val.is_zero() {
                    term = Scalar::zero();
                    break;
                }
                term = term * val;
            }
            if !term.is_zero() {
                acc = acc + term;
            }
        }
        acc
    })
}

/// Maps the MSB-first dangling index to LSB-first variable bits.
fn reverse_bits(x: usize, width: usize) -> usize {
    (0..width).fold(0, |acc, p| acc | (((x >> (width - 1 - p)) & 1) << p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;

    #[test]
    fn examples() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", delta_plus());
        let b = g.add_vertex("b", delta_plus());
        g.add_edge((a, 0), (b, 0));
        assert_eq!(holant_bruteforce(&g).unwrap(), Scalar::int(2));

        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(2));
        let b = g.add_vertex("b", neq());
        g.add_edge((a, 0), (b, 0));
        g.add_edge((a, 1), (b, 1));
        assert_eq!(holant_bruteforce(&g).unwrap(), Scalar::zero());

        let mut g = SignatureGrid::new();
        for k in 0..3 {
            g.add_vertex(format!("v{k}"), eq(2));
        }
        g.add_edge((0, 1), (1, 0));
        g.add_edge((1, 1), (2, 0));
        g.add_edge((2, 1), (0, 0));
        assert_eq!(holant_bruteforce(&g).unwrap(), Scalar::int(2));
    }

    #[test]
    fn gadget_enumeration_matches_argument_order() {
        let mut g = SignatureGrid::new();
        let h = g.add_vertex("h", Signature::from_ints(&[1, 2, 3, 4]));
        let gadget = Gadget::new(g, vec![Endpoint::new(h, 1), Endpoint::new(h, 0)]);
        assert_eq!(
            effective_signature_bruteforce(&gadget).unwrap(),
            Signature::from_ints(&[1, 3, 2, 4])
        );
    }
}
