use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::psd::psd_check;
use crate::psd::violated_minor;
use crate::scalar::{format_scalar, int};
use crate::{ExactMatrix, ExactScalar, ExactVector, LinalgError, Result, MINOR_TEST_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestartMode {
    /// Auxiliary elements are implicit; their mass restarts the round.
    ImplicitRestart,
    /// The listed elements already satisfy Σ EᵀE = I.
    Complete,
}

/// A finite family of labeled operation elements, each already scaled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Superoperator {
    dim: usize,
    elements: Vec<(String, ExactMatrix)>,
    mode: RestartMode,
    slack: ExactMatrix,
}

/// Per-element unconditional vectors and the mass left to the restart event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub outcomes: Vec<(String, ExactVector)>,
    pub restart_mass: ExactScalar,
}

impl Applied {
    pub fn outcome(&self, label: &str) -> Option<&ExactVector> {
        self.outcomes.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }

    pub fn mass(&self, label: &str) -> Option<ExactScalar> {
        self.outcome(label).map(ExactVector::norm_sq)
    }
}

impl Superoperator {
    pub fn new(elements: Vec<(String, ExactMatrix)>, mode: RestartMode) -> Result<Self> {
        let dim = elements.first().ok_or(LinalgError::NoElements)?.1.rows();
        let mut seen = HashSet::new();
        for (label, m) in &elements {
            if !seen.insert(label.as_str()) {
                return Err(LinalgError::DuplicateLabel(label.clone()));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(LinalgError::dims(
                    format!("{dim}x{dim}"),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
        }
        let mats: Vec<ExactMatrix> = elements.iter().map(|(_, m)| m.clone()).collect();
        let slack = ExactMatrix::identity(dim).sub(&gram_sum(&mats)?)?;
        Ok(Superoperator {
            dim,
            elements,
            mode,
            slack,
        })
    }

    /// Builds `{(1/d) M_i}` in implicit-restart mode.
    pub fn scaled(unscaled: Vec<(String, ExactMatrix)>, d: u64) -> Result<Self> {
        let s = ExactScalar::new(BigInt::from(1), BigInt::from(d));
        let elements = unscaled.into_iter().map(|(l, m)| (l, m.scale(&s))).collect();
        Self::new(elements, RestartMode::ImplicitRestart)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[(String, ExactMatrix)] {
        &self.elements
    }

    pub fn element(&self, label: &str) -> Option<&ExactMatrix> {
        self.elements.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(l, _)| l.as_str())
    }

    pub fn mode(&self) -> RestartMode {
        self.mode
    }

    /// I − Σ EᵀE.
    pub fn slack(&self) -> &ExactMatrix {
        &self.slack
    }

    /// `Ok(())` when the completeness condition of the mode holds, otherwise a
    /// diagnostic naming the violated condition.
    pub fn validate(&self) -> std::result::Result<(), String> {
        match self.mode {
            RestartMode::Complete => {
                if self.slack.is_zero() {
                    Ok(())
                } else {
                    Err(format!("complete mode but slack is nonzero: {}", self.slack))
                }
            }
            RestartMode::ImplicitRestart => {
                if psd_check(&self.slack).map_err(|e| e.to_string())? {
                    return Ok(());
                }
                if self.dim <= MINOR_TEST_LIMIT {
                    let idx = violated_minor(&self.slack)
                        .map_err(|e| e.to_string())?
                        .unwrap_or_default();
                    let det = self
                        .slack
                        .principal_submatrix(&idx)
                        .determinant()
                        .map_err(|e| e.to_string())?;
                    Err(format!(
                        "slack is not PSD: principal minor on rows {:?} equals {}",
                        idx,
                        format_scalar(&det)
                    ))
                } else {
                    Err("slack is not PSD".to_string())
                }
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn apply(&self, psi: &ExactVector) -> Result<Applied> {
        if psi.dim() != self.dim {
            return Err(LinalgError::dims(self.dim, psi.dim()));
        }
        let mut total = ExactScalar::zero();
        let mut outcomes = Vec::with_capacity(self.elements.len());
        for (label, m) in &self.elements {
            let v = m.apply(psi)?;
            total += v.norm_sq();
            outcomes.push((label.clone(), v));
        }
        Ok(Applied {
            outcomes,
            restart_mass: psi.norm_sq() - total,
        })
    }
}

pub fn superop_validate(s: &Superoperator) -> bool {
    s.is_valid()
}

pub fn superop_apply(s: &Superoperator, psi: &ExactVector) -> Result<Applied> {
    s.apply(psi)
}

/// Σ EᵢᵀEᵢ.
pub fn gram_sum(elements: &[ExactMatrix]) -> Result<ExactMatrix> {
    let first = elements.first().ok_or(LinalgError::NoElements)?;
    first.require_square()?;
    let n = first.rows();
    let mut acc = ExactMatrix::zeros(n, n);
    for e in elements {
        if e.rows() != n || e.cols() != n {
            return Err(LinalgError::dims(
                format!("{n}x{n}"),
                format!("{}x{}", e.rows(), e.cols()),
            ));
        }
        acc = acc.add(&e.transpose().mul(e)?)?;
    }
    Ok(acc)
}

/// Discards the register and returns `target`.
pub fn initialize(s_dim: usize, target: &ExactVector) -> Result<ExactVector> {
    if target.dim() != s_dim {
        return Err(LinalgError::dims(s_dim, target.dim()));
    }
    Ok(target.clone())
}

/// Smallest integer d ≥ 2 with d²I − Σ MᵀM positive semidefinite.
pub fn choose_scale_d(unscaled: &[ExactMatrix]) -> Result<u64> {
    let g = gram_sum(unscaled)?;
    let n = g.rows();
    let ok = |d: u64| -> bool {
        let dd = int(d as i64) * int(d as i64);
        let m = ExactMatrix::identity(n).scale(&dd).sub(&g).expect("same shape");
        psd_check(&m).expect("symmetric")
    };
    // λ_max(G) ≤ tr(G) since G is PSD, so d = ⌈√⌈tr G⌉⌉ always works.
    let tr = g.trace();
    let ceil_tr = tr.ceil().to_integer();
    let mut hi = ceil_tr.sqrt();
    if &hi * &hi < ceil_tr {
        hi += 1;
    }
    let mut hi = hi.to_u64().expect("scale fits in u64").max(2);
    if ok(2) {
        return Ok(2);
    }
    debug_assert!(ok(hi));
    let mut lo = 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn coin(s: ExactScalar, mode: RestartMode) -> Superoperator {
        Superoperator::new(
            vec![
                ("l".into(), ExactMatrix::identity(4).scale(&s)),
                ("r".into(), ExactMatrix::identity(4).scale(&s)),
            ],
            mode,
        )
        .unwrap()
    }

    #[test]
    fn coin_has_half_slack() {
        let c = coin(rat(1, 2), RestartMode::ImplicitRestart);
        assert!(superop_validate(&c));
        assert_eq!(c.slack(), &ExactMatrix::identity(4).scale(&rat(1, 2)));
        let out = c.apply(&ExactVector::basis(4, 0)).unwrap();
        assert_eq!(out.outcome("l").unwrap(), &ExactVector::basis(4, 0).scale(&rat(1, 2)));
        assert_eq!(out.restart_mass, rat(1, 2));
    }

    #[test]
    fn overfull_family_fails_with_diagnostic() {
        let c = coin(int(1), RestartMode::ImplicitRestart);
        assert_eq!(c.slack(), &ExactMatrix::identity(4).scale(&int(-1)));
        let err = c.validate().unwrap_err();
        assert!(err.contains("[0]"), "{err}");
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let e = ExactMatrix::identity(2);
        let r = Superoperator::new(vec![("a".into(), e.clone()), ("a".into(), e)], RestartMode::Complete);
        assert_eq!(r.unwrap_err(), LinalgError::DuplicateLabel("a".into()));
    }

    #[test]
    fn scale_examples() {
        let i2 = ExactMatrix::identity(2);
        assert_eq!(choose_scale_d(&[i2.clone(), i2]).unwrap(), 2);
        let m = ExactMatrix::from_int_rows(&[&[1, 0], &[0, 2]]);
        assert_eq!(choose_scale_d(&[m]).unwrap(), 2);
        let big = ExactMatrix::from_int_rows(&[&[1, 0], &[0, 3]]);
        assert_eq!(choose_scale_d(&[big]).unwrap(), 3);
    }

    #[test]
    fn initialize_checks_dimension() {
        let t = ExactVector::basis(3, 0);
        assert_eq!(initialize(3, &t).unwrap(), t);
        assert!(initialize(4, &t).is_err());
    }
}
