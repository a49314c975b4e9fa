use num_traits::{Signed, Zero};

use crate::{ExactMatrix, LinalgError, Result};

/// Largest dimension decided by enumerating principal minors.
pub const MINOR_TEST_LIMIT: usize = 6;

/// Exact positive-semidefiniteness test for a symmetric matrix.
///
/// Up to [`MINOR_TEST_LIMIT`] every principal minor is checked; larger
/// matrices use pivoted symmetric elimination, which decides the same
/// predicate in cubic time.
pub fn psd_check(m: &ExactMatrix) -> Result<bool> {
    require_symmetric(m)?;
    if m.rows() <= MINOR_TEST_LIMIT {
        Ok(violated_minor_unchecked(m).is_none())
    } else {
        Ok(elimination(m))
    }
}

pub fn psd_by_minors(m: &ExactMatrix) -> Result<bool> {
    require_symmetric(m)?;
    Ok(violated_minor_unchecked(m).is_none())
}

pub fn psd_by_elimination(m: &ExactMatrix) -> Result<bool> {
    require_symmetric(m)?;
    Ok(elimination(m))
}

/// Index set (0-based) of the first negative principal minor, in order of
/// increasing size. Exponential in the dimension.
pub fn violated_minor(m: &ExactMatrix) -> Result<Option<Vec<usize>>> {
    require_symmetric(m)?;
    Ok(violated_minor_unchecked(m))
}

fn violated_minor_unchecked(m: &ExactMatrix) -> Option<Vec<usize>> {
    let n = m.rows();
    let mut subsets: Vec<u32> = (1..(1u32 << n)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    subsets.into_iter().find_map(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let det = m
            .principal_submatrix(&idx)
            .determinant()
            .expect("principal submatrix is square");
        det.is_negative().then_some(idx)
    })
}

fn elimination(m: &ExactMatrix) -> bool {
    let n = m.rows();
    let mut a = m.clone();
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            // A zero diagonal entry of a PSD matrix forces a zero row.
            if (k + 1..n).any(|j| !a.get(k, j).is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = a.get(i, k) / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    true
}

fn require_symmetric(m: &ExactMatrix) -> Result<()> {
    m.require_square()?;
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ExactMatrix};

    #[test]
    fn small_cases() {
        let half = ExactMatrix::identity(4).scale(&rat(1, 2));
        assert!(psd_check(&half).unwrap());
        let indefinite = ExactMatrix::from_int_rows(&[&[1, 2], &[2, 1]]);
        assert!(!psd_check(&indefinite).unwrap());
        assert_eq!(violated_minor(&indefinite).unwrap(), Some(vec![0, 1]));
        let slack = ExactMatrix::identity(4)
            .sub(&ExactMatrix::identity(4).scale(&(rat(1, 4) + rat(1, 4))))
            .unwrap();
        assert_eq!(slack, half);
        assert!(psd_check(&slack).unwrap());
    }

    #[test]
    fn zero_pivot_with_coupling_is_rejected() {
        let m = ExactMatrix::from_int_rows(&[&[0, 1], &[1, 5]]);
        assert!(!psd_check(&m).unwrap());
        assert!(!psd_by_elimination(&m).unwrap());
        let z = ExactMatrix::from_int_rows(&[&[0, 0], &[0, 5]]);
        assert!(psd_by_elimination(&z).unwrap());
    }

    #[test]
    fn non_symmetric_is_an_error() {
        let m = ExactMatrix::from_int_rows(&[&[1, 2], &[0, 1]]);
        assert_eq!(psd_check(&m), Err(LinalgError::NotSymmetric));
    }
}
