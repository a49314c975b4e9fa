use std::fmt;

use num_traits::Zero;

use crate::scalar::{format_scalar, int};
use crate::{ExactScalar, LinalgError, Result};

/// Column vector with exact entries. Used for unnormalized (unconditional)
/// register states as well as normalized ones.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactVector {
    entries: Vec<ExactScalar>,
}

impl ExactVector {
    /// Panics on an empty entry list; registers always have at least one state.
    pub fn new(entries: Vec<ExactScalar>) -> Self {
        assert!(!entries.is_empty(), "vectors have dimension >= 1");
        ExactVector { entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ExactScalar::zero(); dim])
    }

    /// Standard basis vector e_i (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[i] = int(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> &ExactScalar {
        &self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: ExactScalar) {
        self.entries[i] = value;
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ExactScalar> {
        self.entries
    }

    pub fn dot(&self, other: &ExactVector) -> Result<ExactScalar> {
        self.same_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum())
    }

    /// ⟨v|v⟩, the outcome probability when `self` is an unconditional vector.
    pub fn norm_sq(&self) -> ExactScalar {
        self.entries.iter().map(|a| a * a).sum()
    }

    pub fn scale(&self, s: &ExactScalar) -> ExactVector {
        ExactVector::new(self.entries.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &ExactVector) -> Result<ExactVector> {
        self.same_dim(other)?;
        Ok(ExactVector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &ExactVector) -> Result<ExactVector> {
        self.same_dim(other)?;
        Ok(ExactVector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn same_dim(&self, other: &ExactVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(LinalgError::dims(self.dim(), other.dim()));
        }
        Ok(())
    }
}

impl fmt::Debug for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(format_scalar).collect();
        write!(f, "({})", parts.join(", "))
    }
}
