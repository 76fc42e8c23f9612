//! Gadget constructions recorded as replayable step lists.
//!
//! A recipe starts from the empty gadget (the arity-0 constant 1) and keeps a
//! list of dangling arguments. Every step is a gadget operation, so the
//! recipe can be rebuilt either directly on signatures or as a grid whose
//! effective signature is the same function.

use crate::algebra::{Mat2, Scalar};
use crate::error::{Error, Result};
use crate::grids::{effective_signature, Endpoint, Gadget, SignatureGrid};
use crate::signatures::{
    compose_binary, contract_unary, from_matrix, named, reorder, self_loop, tensor, Signature,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// Appends the arguments of `sources[source]` after the current ones.
    Tensor { source: usize },
    /// Connects argument `slot` to a unary vertex.
    Contract { slot: usize, unary: Signature },
    /// Connects arguments `i` and `j` to each other.
    SelfLoop { i: usize, j: usize },
    /// Attaches a binary vertex b at `slot`: Σ_y b(x, y)·f(…, y, …).
    Compose { slot: usize, binary: Signature },
    /// New argument k is old argument `order[k]`.
    Reorder { order: Vec<usize> },
}

/// A gadget over `sources` together with the signature it realises.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetRecipe {
    pub sources: Vec<Signature>,
    pub steps: Vec<Step>,
    /// Global factor: `result` is `scale` times the effective signature.
    pub scale: Scalar,
    pub result: Signature,
}

impl GadgetRecipe {
    /// The empty gadget, realising the arity-0 constant 1.
    pub fn empty() -> Self {
        GadgetRecipe {
            sources: Vec::new(),
            steps: Vec::new(),
            scale: Scalar::one(),
            result: Signature::constant(Scalar::one()),
        }
    }

    /// The trivial gadget: a single vertex carrying `f`.
    pub fn start(f: &Signature) -> Self {
        GadgetRecipe {
            sources: vec![f.clone()],
            steps: vec![Step::Tensor { source: 0 }],
            scale: Scalar::one(),
            result: f.clone(),
        }
    }

    /// Places a copy of `other` beside this gadget; its arguments follow the
    /// current ones.
    pub fn append(&mut self, other: &GadgetRecipe) {
        let offset = self.arity();
        let map: Vec<usize> = other.sources.iter().map(|s| self.add_source(s)).collect();
        for step in &other.steps {
            self.steps.push(match step {
                Step::Tensor { source } => Step::Tensor {
                    source: map[*source],
                },
                Step::Contract { slot, unary } => Step::Contract {
                    slot: slot + offset,
                    unary: unary.clone(),
                },
                Step::SelfLoop { i, j } => Step::SelfLoop {
                    i: i + offset,
                    j: j + offset,
                },
                Step::Compose { slot, binary } => Step::Compose {
                    slot: slot + offset,
                    binary: binary.clone(),
                },
                Step::Reorder { order } => Step::Reorder {
                    order: (0..offset)
                        .chain(order.iter().map(|o| o + offset))
                        .collect(),
                },
            });
        }
        self.scale = &self.scale * &other.scale;
        self.result = tensor(&self.result, &other.result);
    }

    pub fn arity(&self) -> usize {
        self.result.arity()
    }

    /// Registers a source signature and returns its index.
    pub fn add_source(&mut self, f: &Signature) -> usize {
        if let Some(k) = self.sources.iter().position(|s| s == f) {
            return k;
        }
        self.sources.push(f.clone());
        self.sources.len() - 1
    }

    pub fn tensor_with(&mut self, source: usize) -> Result<()> {
        let s = self
            .sources
            .get(source)
            .ok_or_else(|| Error::Precondition(format!("no source {source}")))?;
        self.result = tensor(&self.result, s);
        self.steps.push(Step::Tensor { source });
        Ok(())
    }

    pub fn contract(&mut self, slot: usize, unary: &Signature) -> Result<()> {
        self.result = contract_unary(&self.result, slot, unary)?;
        self.steps.push(Step::Contract {
            slot,
            unary: unary.clone(),
        });
        Ok(())
    }

    /// Pins argument `slot` to `b` with δ₀ or δ₁.
    pub fn pin(&mut self, slot: usize, b: usize) -> Result<()> {
        let u = if b == 0 {
            named::delta0()
        } else {
            named::delta1()
        };
        self.contract(slot, &u)
    }

    pub fn self_loop(&mut self, i: usize, j: usize) -> Result<()> {
        self.result = self_loop(&self.result, i, j)?;
        self.steps.push(Step::SelfLoop { i, j });
        Ok(())
    }

    pub fn compose(&mut self, slot: usize, binary: &Signature) -> Result<()> {
        self.result = compose_binary(&self.result, slot, binary)?;
        self.steps.push(Step::Compose {
            slot,
            binary: binary.clone(),
        });
        Ok(())
    }

    pub fn reorder(&mut self, order: &[usize]) -> Result<()> {
        self.result = reorder(&self.result, order)?;
        self.steps.push(Step::Reorder {
            order: order.to_vec(),
        });
        Ok(())
    }

    /// m^{⊗n} (or (mᵀ)^{⊗n}) applied to the current arguments.
    pub fn holographic(&mut self, m: &Mat2, transpose: bool) -> Result<()> {
        let b = if transpose {
            from_matrix(&m.transpose())
        } else {
            from_matrix(m)
        };
        for slot in 0..self.arity() {
            self.compose(slot, &b)?;
        }
        Ok(())
    }

    pub fn rescale(&mut self, c: &Scalar) {
        self.scale = &self.scale * c;
        self.result = self.result.scale(c);
    }

    /// Re-runs the steps on signatures.
    pub fn replay(&self) -> Result<Signature> {
        let mut cur = Signature::constant(Scalar::one());
        for step in &self.steps {
            cur = match step {
                Step::Tensor { source } => {
                    let s = self
                        .sources
                        .get(*source)
                        .ok_or_else(|| Error::Precondition(format!("no source {source}")))?;
                    tensor(&cur, s)
                }
                Step::Contract { slot, unary } => contract_unary(&cur, *slot, unary)?,
                Step::SelfLoop { i, j } => self_loop(&cur, *i, *j)?,
                Step::Compose { slot, binary } => compose_binary(&cur, *slot, binary)?,
                Step::Reorder { order } => reorder(&cur, order)?,
            };
        }
        Ok(cur.scale(&self.scale))
    }

    /// The recipe as a gadget; its effective signature times `scale` is
    /// `result`.
    pub fn to_gadget(&self) -> Result<Gadget> {
        let mut grid = SignatureGrid::new();
        let mut ends: Vec<Endpoint> = Vec::new();
        let check = |slot: usize, len: usize| {
            if slot < len {
                Ok(())
            } else {
                Err(Error::InvalidSlot {
                    index: slot,
                    arity: len,
                })
            }
        };
        for (k, step) in self.steps.iter().enumerate() {
            match step {
                Step::Tensor { source } => {
                    let s = self
                        .sources
                        .get(*source)
                        .ok_or_else(|| Error::Precondition(format!("no source {source}")))?;
                    let v = grid.add_vertex(format!("s{source}_{k}"), s.clone());
                    ends.extend((0..s.arity()).map(|slot| Endpoint::new(v, slot)));
                }
                Step::Contract { slot, unary } => {
                    check(*slot, ends.len())?;
                    let v = grid.add_vertex(format!("u{k}"), unary.clone());
                    grid.add_edge(ends.remove(*slot), (v, 0));
                }
                Step::SelfLoop { i, j } => {
                    check(*i, ends.len())?;
                    check(*j, ends.len())?;
                    let (a, b) = (ends[*i], ends[*j]);
                    grid.add_edge(a, b);
                    ends.retain(|e| *e != a && *e != b);
                }
                Step::Compose { slot, binary } => {
                    check(*slot, ends.len())?;
                    let v = grid.add_vertex(format!("b{k}"), binary.clone());
                    grid.add_edge(ends[*slot], (v, 1));
                    ends[*slot] = Endpoint::new(v, 0);
                }
                Step::Reorder { order } => {
                    if order.len() != ends.len() {
                        return Err(Error::InvalidPermutation(order.clone()));
                    }
                    ends = order.iter().map(|&o| ends[o]).collect();
                }
            }
        }
        Ok(Gadget::new(grid, ends))
    }

    /// Checks that both replays reproduce `result`.
    pub fn verify(&self) -> Result<bool> {
        if self.replay()? != self.result {
            return Ok(false);
        }
        let eff = effective_signature(&self.to_gadget()?)?;
        Ok(eff.scale(&self.scale) == self.result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::brute::effective_signature_bruteforce;
    use crate::signatures::named::*;

    #[test]
    fn steps_replay_on_both_sides() {
        let mut r = GadgetRecipe::start(&one(3));
        r.pin(2, 0).unwrap();
        assert_eq!(r.result, neq());
        let k = r.add_source(&eq(3));
        r.tensor_with(k).unwrap();
        r.self_loop(1, 2).unwrap();
        r.compose(0, &Signature::from_ints(&[1, 2, 3, 4])).unwrap();
        r.reorder(&[2, 0, 1]).unwrap();
        r.holographic(&Mat2::k(), true).unwrap();
        r.rescale(&Scalar::int(3));
        assert!(r.verify().unwrap());
        let mut two = GadgetRecipe::empty();
        two.append(&r);
        two.append(&r);
        two.self_loop(0, 3).unwrap();
        assert!(two.verify().unwrap());
        let g = r.to_gadget().unwrap();
        assert_eq!(
            effective_signature_bruteforce(&g).unwrap().scale(&r.scale),
            r.result
        );
    }

    #[test]
    fn bad_slots_are_rejected() {
        let mut r = GadgetRecipe::start(&eq(2));
        assert!(r.pin(2, 0).is_err());
        r.steps.push(Step::SelfLoop { i: 0, j: 5 });
        assert!(r.to_gadget().is_err());
        assert!(r.replay().is_err());
    }
}
