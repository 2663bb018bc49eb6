//! Exact scalars and linear algebra over diagonal scalar-product spaces.

mod kernel;
mod metric;
mod operator;
mod perm;
mod scalar;

use thiserror::Error;

pub use kernel::{common_eigenspace, eigenspace, kernel, rank};
pub use metric::MetricSpace;
pub use operator::Operator;
pub use perm::SignedPerm;
pub use scalar::{is_square_free, split_square, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quadratic surds with different radicands {0} and {1}")]
    RadicandMismatch(u64, u64),
    #[error("radicand {0} is not square-free")]
    NotSquareFree(u64),
    #[error("radicand too large to factor")]
    RadicandTooLarge,
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("division by zero")]
    DivisionByZero,
    #[error("metric must be non-empty")]
    EmptyMetric,
    #[error("metric sign {0} is not ±1")]
    BadSign(i8),
    #[error("not a signed permutation")]
    NotAPermutation,
    #[error("operator is not an involution")]
    NotAnInvolution,
    #[error("eigenvalue {0} is not ±1")]
    BadEigenvalue(i64),
    #[error("kernel computation needs rational entries")]
    IrrationalEntry,
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

pub fn add_vec(u: &[Scalar], v: &[Scalar]) -> Result<Vector, LinError> {
    if u.len() != v.len() {
        return Err(LinError::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    u.iter().zip(v).map(|(x, y)| x.checked_add(y)).collect()
}

pub fn scale_vec(c: &Scalar, v: &[Scalar]) -> Result<Vector, LinError> {
    v.iter().map(|x| c.checked_mul(x)).collect()
}

pub fn neg_vec(v: &[Scalar]) -> Vector {
    v.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// The single radicand shared by all entries, if any. Errors on a mix.
pub fn common_radicand(v: &[Scalar]) -> Result<Option<u64>, LinError> {
    let mut d = None;
    for x in v {
        match (d, x.radicand()) {
            (Some(a), Some(b)) if a != b => return Err(LinError::RadicandMismatch(a, b)),
            (None, Some(b)) => d = Some(b),
            _ => {}
        }
    }
    Ok(d)
}
