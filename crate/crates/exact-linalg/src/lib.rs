//! Exact rational linear algebra for small quantum registers.
//!
//! Every quantity is a [`BigRational`](num_rational::BigRational); nothing is
//! ever rounded. Matrices are real, so the adjoint is the transpose.

mod error;
mod matrix;
mod psd;
mod scalar;
mod superop;
mod vector;

pub use error::LinalgError;
pub use matrix::ExactMatrix;
pub use psd::{psd_by_elimination, psd_by_minors, psd_check, violated_minor, MINOR_TEST_LIMIT};
pub use scalar::{display_decimal, format_scalar, int, parse_scalar, pow_scalar, rat, ExactScalar};
pub use superop::{
    choose_scale_d, gram_sum, initialize, superop_apply, superop_validate, Applied, RestartMode, Superoperator,
};
pub use vector::ExactVector;

pub type Result<T> = std::result::Result<T, LinalgError>;
