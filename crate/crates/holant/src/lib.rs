pub mod algebra;
pub mod cli;
pub mod dichotomy;
pub mod entanglement;
pub mod error;
pub mod eval;
pub mod families;
pub mod gadgets;
pub mod grids;
pub mod signatures;

pub use error::{Error, Result};
