//! Holant evaluators: enumeration, tensor contraction, and polynomial-time
//! algorithms for the tractable families.

pub mod affine;
pub mod brute;
pub mod chain;
pub mod contract;
pub mod geneq;

use std::fmt;
use std::str::FromStr;

use crate::algebra::{Mat2, Scalar};
use crate::error::{Error, Result};
use crate::families;
use crate::grids::SignatureGrid;

pub use affine::{affine_normal_form, gauss_sum, holant_affine, AffineForm, QuadraticForm};
pub use brute::{effective_signature_bruteforce, holant_bruteforce};
pub use chain::holant_binary_chain;
pub use contract::{contract_network, ContractOptions};
pub use geneq::holant_generalized_equality;

/// Evaluation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Brute,
    Contract,
    Chain,
    GenEq,
    Affine,
    Auto,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "contract" => Ok(Method::Contract),
            "chain" => Ok(Method::Chain),
            "geneq" => Ok(Method::GenEq),
            "affine" => Ok(Method::Affine),
            "auto" => Ok(Method::Auto),
            _ => Err(Error::Parse(format!("unknown method '{s}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Brute => "brute",
            Method::Contract => "contract",
            Method::Chain => "chain",
            Method::GenEq => "geneq",
            Method::Affine => "affine",
            Method::Auto => "auto",
        };
        f.write_str(s)
    }
}

/// Holant value by pairwise contraction with the default options.
pub fn holant_contract(grid: &SignatureGrid) -> Result<Scalar> {
    crate::grids::holant(grid)
}

/// Picks a polynomial-time evaluator the grid qualifies for, if any.
pub fn auto_method(grid: &SignatureGrid) -> Method {
    let sigs: Vec<_> = grid
        .signatures()
        .filter(|s| s.arity() > 0 && !s.is_zero())
        .collect();
    let all = |p: &dyn Fn(&crate::signatures::Signature) -> bool| sigs.iter().all(|s| p(s));
    if all(&|s| families::in_t_closure(s).unwrap_or(false)) {
        Method::Chain
    } else if all(&|s| families::in_affine(s)) {
        Method::Affine
    } else if all(&|s| families::in_e_closure(s, None).unwrap_or(false)) {
        Method::GenEq
    } else {
        Method::Contract
    }
}

/// Evaluates a closed grid with the chosen method.
pub fn evaluate(grid: &SignatureGrid, method: Method) -> Result<Scalar> {
    match method {
        Method::Brute => holant_bruteforce(grid),
        Method::Contract => holant_contract(grid),
        Method::Chain => holant_binary_chain(grid),
        Method::GenEq => holant_generalized_equality(grid, &Mat2::identity()),
        Method::Affine => holant_affine(grid),
        Method::Auto => evaluate(grid, auto_method(grid)),
    }
}
