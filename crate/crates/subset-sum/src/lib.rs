//! A three-state quantum register that checks a subset sum over binary
//! numbers. The prover says, at every `$` after an `a_i`, whether `a_i` is
//! in the subset; the verifier keeps `S - T` in an amplitude and tests it
//! for zero at the end of the round.

use std::collections::BTreeSet;

use exact_linalg::{ExactMatrix, ExactScalar, ExactVector, RestartMode, Superoperator};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use qam_core::Ledger;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubsetSumError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("selection index {index} out of range 1..={n}")]
    BadSelection { index: usize, n: usize },
}

/// `S$a₁$…$aₙ$` with every number in binary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    raw: String,
    target: BigUint,
    items: Vec<BigUint>,
}

impl SubsetSumInstance {
    pub fn parse(w: &str) -> Result<Self, SubsetSumError> {
        let bad = |m: &str| SubsetSumError::Malformed(m.to_string());
        let body = w.strip_suffix('$').ok_or_else(|| bad("must end with `$`"))?;
        let fields: Vec<&str> = body.split('$').collect();
        if fields.len() < 2 {
            return Err(bad("need S and at least one a_i"));
        }
        let mut nums = Vec::with_capacity(fields.len());
        for f in &fields {
            if f.is_empty() || !f.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad(&format!("`{f}` is not a binary number")));
            }
            nums.push(BigUint::parse_bytes(f.as_bytes(), 2).expect("binary digits"));
        }
        let target = nums.remove(0);
        Ok(SubsetSumInstance {
            raw: w.to_string(),
            target,
            items: nums,
        })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    pub fn items(&self) -> &[BigUint] {
        &self.items
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    /// `T` for a 1-based selection.
    pub fn selected_sum(&self, selection: &BTreeSet<usize>) -> Result<BigUint, SubsetSumError> {
        let mut t = BigUint::zero();
        for &i in selection {
            if i == 0 || i > self.n() {
                return Err(SubsetSumError::BadSelection { index: i, n: self.n() });
            }
            t += &self.items[i - 1];
        }
        Ok(t)
    }

    pub fn is_member(&self) -> bool {
        all_selections(self.n()).any(|s| self.selected_sum(&s).unwrap() == self.target)
    }
}

/// Every subset of `{1..n}`, in binary-counter order.
pub fn all_selections(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    assert!(n < 64, "too many items to enumerate");
    (0u64..1 << n).map(move |mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())
}

/// Names of the eight operators, in table order.
pub const OP_NAMES: [&str; 8] = ["E0", "E1", "E$", "E'0", "E'1", "E'$", "E''$", "E#"];

fn third(rows: &[&[i64]]) -> ExactMatrix {
    ExactMatrix::from_int_rows(rows).scale(&exact_linalg::rat(1, 3))
}

fn complete(elems: Vec<(&str, ExactMatrix)>) -> Superoperator {
    let elems = elems.into_iter().map(|(l, m)| (l.to_string(), m)).collect();
    Superoperator::new(elems, RestartMode::Complete).expect("3x3 elements")
}

/// The eight operators. Outcome `f` moves the head on, `a`/`r` accept or
/// reject, and `i1`, `i2`, … start a new round.
pub fn build_subsetsum_ops() -> Vec<(&'static str, Superoperator)> {
    let e0 = complete(vec![
        ("f", third(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]])),
        ("i1", third(&[&[2, 0, -2], &[2, 0, 2], &[0, 2, 0]])),
        ("i2", third(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]])),
    ]);
    let e1 = complete(vec![
        ("f", third(&[&[1, 0, 0], &[1, 2, 0], &[0, 0, 1]])),
        ("i1", third(&[&[2, -1, 0], &[1, 0, 2], &[1, 0, -2]])),
        ("i2", third(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]])),
    ]);
    let id = ExactMatrix::identity(3);
    let e_dollar = complete(vec![
        ("f", id.scale(&exact_linalg::rat(1, 3))),
        ("i1", id.scale(&exact_linalg::rat(2, 3))),
        ("i2", id.scale(&exact_linalg::rat(2, 3))),
    ]);
    let e0p = complete(vec![
        ("f", third(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]])),
        ("i1", third(&[&[2, 2, 0], &[2, -2, 0], &[0, 0, 2]])),
        ("i2", third(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]])),
    ]);
    let e1p = complete(vec![
        ("f", third(&[&[1, 0, 0], &[0, 1, 0], &[1, 0, 2]])),
        ("i1", third(&[&[2, 0, -1], &[1, 2, 0], &[1, -2, 0]])),
        ("i2", third(&[&[1, 0, 0], &[0, 0, 2], &[0, 0, 0]])),
    ]);
    let select = complete(vec![
        ("f", third(&[&[1, 0, 0], &[0, 1, -1], &[0, 0, 0]])),
        ("i1", third(&[&[0, -1, 1], &[2, 1, -1], &[2, -1, 1]])),
        ("i2", third(&[&[0, 2, 2], &[0, 0, 0], &[0, 0, 0]])),
        ("i3", third(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])),
    ]);
    let skip = complete(vec![
        ("f", third(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]])),
        ("i1", third(&[&[2, -2, 0], &[2, 2, 0], &[0, 0, 3]])),
    ]);
    let end = complete(vec![
        ("a", third(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]])),
        ("r", third(&[&[0, 0, 0], &[0, 3, 0], &[0, 0, 0]])),
        ("i1", third(&[&[2, 0, 0], &[2, 0, 0], &[0, 0, 3]])),
    ]);
    OP_NAMES
        .into_iter()
        .zip([e0, e1, e_dollar, e0p, e1p, select, skip, end])
        .collect()
}

fn op<'a>(ops: &'a [(&'static str, Superoperator)], name: &str) -> &'a Superoperator {
    &ops.iter().find(|(n, _)| *n == name).expect("known operator").1
}

/// One applied operator on the surviving `f` path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub symbol: char,
    pub op: &'static str,
    /// Mass that restarts at this step.
    pub restart: ExactScalar,
    /// Unconditional register after the `f` outcome (or before `#`'s decision).
    pub register: ExactVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumRun {
    pub ledger: Ledger,
    /// The register just before `#` is read.
    pub pre_end: ExactVector,
    pub steps: Vec<Step>,
}

impl SubsetSumRun {
    /// Acceptance over the restart loop with this selection every round.
    pub fn overall(&self) -> ExactScalar {
        let l = &self.ledger;
        &l.p_accept / (&l.p_accept + &l.p_reject)
    }
}

/// One round with the prover announcing `selection` (1-based).
pub fn simulate(inst: &SubsetSumInstance, selection: &BTreeSet<usize>) -> Result<SubsetSumRun, SubsetSumError> {
    inst.selected_sum(selection)?;
    let ops = build_subsetsum_ops();
    let mut ledger = Ledger::new();
    let mut psi = ExactVector::basis(3, 0);
    let mut steps = Vec::new();
    let mut field = 0usize;
    for ch in inst.raw.chars() {
        let name = match (ch, field) {
            ('0', 0) => "E0",
            ('1', 0) => "E1",
            ('$', 0) => "E$",
            ('0', _) => "E'0",
            ('1', _) => "E'1",
            ('$', i) if selection.contains(&i) => "E'$",
            ('$', _) => "E''$",
            _ => unreachable!("validated instance"),
        };
        if ch == '$' {
            field += 1;
        }
        let applied = op(&ops, name).apply(&psi).expect("dimension 3");
        let mut restart = ExactScalar::zero();
        for (label, v) in &applied.outcomes {
            if label != "f" {
                restart += v.norm_sq();
            }
        }
        ledger.p_restart += &restart;
        psi = applied.outcome("f").expect("f outcome").clone();
        steps.push(Step {
            symbol: ch,
            op: name,
            restart,
            register: psi.clone(),
        });
    }
    let applied = op(&ops, "E#").apply(&psi).expect("dimension 3");
    ledger.p_accept += applied.mass("a").expect("a");
    ledger.p_reject += applied.mass("r").expect("r");
    let restart = applied.mass("i1").expect("i1");
    ledger.p_restart += &restart;
    steps.push(Step {
        symbol: '#',
        op: "E#",
        restart,
        register: psi.clone(),
    });
    Ok(SubsetSumRun {
        ledger,
        pre_end: psi,
        steps,
    })
}

/// Runs a raw instance string; a malformed one is rejected outright.
pub fn simulate_raw(w: &str, selection: &BTreeSet<usize>) -> Ledger {
    match SubsetSumInstance::parse(w) {
        Ok(inst) => match simulate(&inst, selection) {
            Ok(run) => run.ledger,
            Err(_) => rejected(),
        },
        Err(_) => rejected(),
    }
}

fn rejected() -> Ledger {
    let mut l = Ledger::new();
    l.p_reject = ExactScalar::one();
    l
}

/// The best overall acceptance over all 2ⁿ selections, and the first
/// selection reaching it.
pub fn overall_acceptance(inst: &SubsetSumInstance) -> (ExactScalar, BTreeSet<usize>) {
    let mut best: Option<(ExactScalar, BTreeSet<usize>)> = None;
    for sel in all_selections(inst.n()) {
        let p = simulate(inst, &sel).expect("in range").overall();
        if best.as_ref().is_none_or(|(b, _)| p > *b) {
            best = Some((p, sel));
        }
    }
    best.expect("n ≥ 1")
}
