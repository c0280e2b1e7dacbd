//! Exact arithmetic over prime fields GF(q): scalars, vectors, matrices,
//! Gaussian elimination, and the structured decoding matrix used by the
//! collector.

mod field;
mod linalg;
mod structured;

use thiserror::Error;

pub use field::{is_prime, FieldElement, Modulus};
pub use linalg::{solve_linear, FieldMatrix, FieldVector};
pub use structured::build_decoding_matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("operands live in different fields (GF({left}) vs GF({right}))")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged rows: expected width {expected}, found {found}")]
    Ragged { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector must be nonempty")]
    Empty,
}
