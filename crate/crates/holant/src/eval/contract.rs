//! Pairwise tensor contraction with a greedy smallest-result order.

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::grids::{Endpoint, SignatureGrid};
use crate::signatures::{reorder, self_loop, Signature};

/// Tuning for [`contract_network`].
#[derive(Debug, Clone)]
pub struct ContractOptions {
    /// Largest intermediate tensor arity allowed before giving up.
    pub arity_cap: usize,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions { arity_cap: 20 }
    }
}

struct Tensor {
    labels: Vec<usize>,
    sig: Signature,
    /// Smallest vertex index merged into this tensor, for tie-breaking.
    min_vertex: usize,
}

impl Tensor {
    /// Sums out every label that occurs twice.
    fn trace_repeats(mut self) -> Result<Tensor> {
        loop {
            let dup = (0..self.labels.len()).find_map(|i| {
                (i + 1..self.labels.len())
                    .find(|&j| self.labels[j] == self.labels[i])
                    .map(|j| (i, j))
            });
            let Some((i, j)) = dup else {
                return Ok(self);
            };
            self.sig = self_loop(&self.sig, i, j)?;
            self.labels.remove(j);
            self.labels.remove(i);
        }
    }
}

fn shared_labels(a: &Tensor, b: &Tensor) -> Vec<usize> {
    a.labels
        .iter()
        .copied()
        .filter(|l| b.labels.contains(l))
        .collect()
}

/// For each input of a tensor, bit weights split between the free part and
/// the shared part of a contraction.
fn offsets(labels: &[usize], free: &[usize], shared: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = labels.len();
    let mut free_table = vec![0usize; 1 << free.len()];
    let mut shared_table = vec![0usize; 1 << shared.len()];
    for (pos, l) in labels.iter().enumerate() {
        let weight = 1usize << (n - 1 - pos);
        if let Some(k) = free.iter().position(|x| x == l) {
            let bitw = 1usize << (free.len() - 1 - k);
            for (x, t) in free_table.iter_mut().enumerate() {
                if x & bitw != 0 {
                    *t += weight;
                }
            }
        } else {
            let k = shared.iter().position(|x| x == l).unwrap();
            let bitw = 1usize << (shared.len() - 1 - k);
            for (x, t) in shared_table.iter_mut().enumerate() {
                if x & bitw != 0 {
                    *t += weight;
                }
            }
        }
    }
    (free_table, shared_table)
}

fn contract_pair(a: Tensor, b: Tensor) -> Result<Tensor> {
    let shared = shared_labels(&a, &b);
    let free_a: Vec<usize> = a
        .labels
        .iter()
        .copied()
        .filter(|l| !shared.contains(l))
        .collect();
    let free_b: Vec<usize> = b
        .labels
        .iter()
        .copied()
        .filter(|l| !shared.contains(l))
        .collect();
    let out_labels: Vec<usize> = free_a.iter().chain(free_b.iter()).copied().collect();

    // index of the result = (free_a bits, free_b bits)
    let (fa, sa) = offsets(&a.labels, &free_a, &shared);
    let (fb, sb) = offsets(&b.labels, &free_b, &shared);
    let nb = free_b.len();
    let values: Vec<Scalar> = (0..1usize << out_labels.len())
        .map(|x| {
            let ia = fa[x >> nb];
            let ib = fb[x & ((1 << nb) - 1)];
            let mut acc = Scalar::zero();
            for s in 0..1usize << shared.len() {
                let va = a.sig.value(ia + sa[s]);
                if va.is_zero() {
                    continue;
                }
                let vb = b.sig.value(ib + sb[s]);
                if vb.is_zero() {
                    continue;
                }
                acc = acc + va * vb;
            }
            acc
        })
        .collect();
    Ok(Tensor {
        sig: Signature::new(out_labels.len(), values)?,
        labels: out_labels,
        min_vertex: a.min_vertex.min(b.min_vertex),
    })
}

/// Contracts every internal edge of `grid`. Slots listed in `dangling` stay
/// open and become the result's arguments in the given order.
///
/// The grid is assumed to be valid for these dangling edges.
pub fn contract_network(
    grid: &SignatureGrid,
    dangling: &[Endpoint],
    opts: &ContractOptions,
) -> Result<Signature> {
    let n_edges = grid.edges.len();
    let mut slot_labels: Vec<Vec<usize>> = grid
        .vertices
        .iter()
        .map(|v| vec![usize::MAX; v.signature.arity()])
        .collect();
    for (e, ends) in grid.edges.iter().enumerate() {
        for end in ends {
            slot_labels[end.vertex][end.slot] = e;
        }
    }
    for (k, end) in dangling.iter().enumerate() {
        slot_labels[end.vertex][end.slot] = n_edges + k;
    }

    let mut tensors: Vec<Tensor> = Vec::with_capacity(grid.vertices.len());
    for (vi, v) in grid.vertices.iter().enumerate() {
        let t = Tensor {
            labels: slot_labels[vi].clone(),
            sig: v.signature.clone(),
            min_vertex: vi,
        };
        tensors.push(t.trace_repeats()?);
    }

    while tensors.len() > 1 {
        let mut best: Option<((usize, usize, usize), usize, usize)> = None;
        for i in 0..tensors.len() {
            for j in i + 1..tensors.len() {
                let shared = shared_labels(&tensors[i], &tensors[j]).len();
                let arity = tensors[i].labels.len() + tensors[j].labels.len() - 2 * shared;
                let (lo, hi) = {
                    let (x, y) = (tensors[i].min_vertex, tensors[j].min_vertex);
                    (x.min(y), x.max(y))
                };
                let key = (arity, lo, hi);
                if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                    best = Some((key, i, j));
                }
            }
        }
        let ((arity, _, _), i, j) = best.unwrap();
        if arity > opts.arity_cap {
            return Err(Error::ArityCap {
                arity,
                cap: opts.arity_cap,
            });
        }
        let b = tensors.remove(j);
        let a = tensors.remove(i);
        tensors.push(contract_pair(a, b)?);
    }

    let Some(last) = tensors.pop() else {
        return Ok(Signature::constant(Scalar::one()));
    };
    let order: Vec<usize> = (0..dangling.len())
        .map(|k| last.labels.iter().position(|&l| l == n_edges + k).unwrap())
        .collect();
    reorder(&last.sig, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;

    #[test]
    fn path_through_binary() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", delta0());
        let h = g.add_vertex("h", Signature::from_ints(&[1, 2, 3, 4]));
        let b = g.add_vertex("b", delta1());
        g.add_edge((a, 0), (h, 0));
        g.add_edge((h, 1), (b, 0));
        let s = contract_network(&g, &[], &ContractOptions::default()).unwrap();
        assert_eq!(s.value(0), &Scalar::int(2));
    }

    #[test]
    fn dangling_order_is_respected() {
        let mut g = SignatureGrid::new();
        let h = g.add_vertex("h", Signature::from_ints(&[1, 2, 3, 4]));
        let d = [Endpoint::new(h, 1), Endpoint::new(h, 0)];
        let s = contract_network(&g, &d, &ContractOptions::default()).unwrap();
        assert_eq!(s, Signature::from_ints(&[1, 3, 2, 4]));
    }

    #[test]
    fn cap_is_enforced() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(3));
        let b = g.add_vertex("b", eq(3));
        g.add_edge((a, 0), (b, 0));
        let d = [
            Endpoint::new(a, 1),
            Endpoint::new(a, 2),
            Endpoint::new(b, 1),
            Endpoint::new(b, 2),
        ];
        let err = contract_network(&g, &d, &ContractOptions { arity_cap: 3 }).unwrap_err();
        assert_eq!(err, Error::ArityCap { arity: 4, cap: 3 });
        let s = contract_network(&g, &d, &ContractOptions::default()).unwrap();
        assert_eq!(s, eq(4));
    }
}
