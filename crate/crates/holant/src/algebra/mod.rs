//! Exact scalars in Q(ζ₂₄), a float fallback, and 2×2 matrix tools.

pub mod cyclotomic;
pub mod mat2;
pub mod scalar;

pub use cyclotomic::Cyclo;
pub use mat2::{
    ata_x_form, factor_orthogonal_diagonal, qr_orthogonal_decompose, IsotropicKind, Mat2,
    QrDecomposition, QrKind, Side,
};
pub use scalar::{parse_scalar, Backend, Scalar, EPSILON};
