//! Alternating machines with a fixed-size quantum register that only the
//! universal states touch.
//!
//! A configuration is a classical part plus an unconditional register
//! vector. Existential steps change only the classical part. Universal steps
//! apply a superoperator, and an outcome is a branch exactly when its
//! probability is nonzero. The input is accepted when some strategy for the
//! existential choices has a finite subtree whose leaves all accept.

mod protocol;
mod search;
mod table;

use std::fmt::Debug;
use std::hash::Hash;

use exact_linalg::{ExactMatrix, ExactVector, LinalgError};
use num_traits::{Signed, Zero};

pub use protocol::{atm_block_bound, PConf, ProtocolMachine, ProverStrategy};
pub use search::{
    accepting_subtree_search, follow_strategy, strong_eval, verify_witness, PathStep, SearchOutcome, SearchReport,
    SearchStats, Strategy, StrongVerdict, SubtreeSummary, Witness, WitnessStep,
};
pub use table::{TableConfig, TableMachine, TableRun};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Machine(#[from] machines::MachineError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("{elements} operation elements for {branches} branches")]
    BranchMismatch { elements: usize, branches: usize },
    #[error("step from a halting configuration")]
    Halting,
    #[error("machine is not certified to halt on every path")]
    NotCertified,
}

/// Classical part plus unconditional register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QConfig<C> {
    pub classical: C,
    pub register: ExactVector,
}

impl<C> QConfig<C> {
    pub fn new(classical: C, register: ExactVector) -> Self {
        QConfig { classical, register }
    }
}

/// What an outcome of a universal step does to the register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    /// An operation element, already scaled.
    Matrix(ExactMatrix),
    /// The auxiliary elements that complete the listed ones, taken together.
    /// Their probability is whatever the listed elements leave, and the
    /// successor has to halt, so the register after them is never needed.
    Remainder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome<C> {
    pub label: String,
    pub element: Element,
    pub next: C,
}

/// The transition rule at a classical configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move<C> {
    Accept,
    Reject,
    Existential(Vec<C>),
    Universal(Vec<Outcome<C>>),
}

pub trait QMachine {
    type Classical: Clone + Eq + Hash + Debug;

    fn initial(&self) -> QConfig<Self::Classical>;

    fn rule(&self, c: &Self::Classical) -> Result<Move<Self::Classical>, QError>;

    /// True when no finite accepting subtree can start here. Only a search
    /// shortcut; the default never prunes.
    fn doomed(&self, _qc: &QConfig<Self::Classical>) -> bool {
        false
    }

    /// A depth by which every path provably halts, if the machine is strong.
    fn halting_depth(&self) -> Option<usize> {
        None
    }
}

/// One child of [`qstep`], labeled by the branch index or the outcome label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Child<C> {
    pub label: String,
    pub config: QConfig<C>,
}

/// The children of a nonhalting configuration.
pub fn qstep<M: QMachine>(machine: &M, qc: &QConfig<M::Classical>) -> Result<Vec<Child<M::Classical>>, QError> {
    match machine.rule(&qc.classical)? {
        Move::Accept | Move::Reject => Err(QError::Halting),
        Move::Existential(next) => Ok(next
            .into_iter()
            .enumerate()
            .map(|(i, c)| Child {
                label: i.to_string(),
                config: QConfig::new(c, qc.register.clone()),
            })
            .collect()),
        Move::Universal(outcomes) => universal_children(machine, qc, outcomes),
    }
}

fn universal_children<M: QMachine>(
    machine: &M,
    qc: &QConfig<M::Classical>,
    outcomes: Vec<Outcome<M::Classical>>,
) -> Result<Vec<Child<M::Classical>>, QError> {
    let mut left = qc.register.norm_sq();
    let mut out = Vec::with_capacity(outcomes.len());
    let mut remainder = Vec::new();
    for o in outcomes {
        match o.element {
            Element::Matrix(e) => {
                let v = e.apply(&qc.register)?;
                let p = v.norm_sq();
                left -= &p;
                if !p.is_zero() {
                    out.push(Child {
                        label: o.label,
                        config: QConfig::new(o.next, v),
                    });
                }
            }
            Element::Remainder => remainder.push((o.label, o.next)),
        }
    }
    if left.is_negative() {
        return Err(QError::Invalid(
            "operation elements exceed the identity on this register".into(),
        ));
    }
    // Without an auxiliary outcome, lost mass is only normalization.
    match remainder.len() {
        0 => {}
        1 => {
            let (label, next) = remainder.pop().expect("one remainder");
            if !matches!(machine.rule(&next)?, Move::Accept | Move::Reject) {
                return Err(QError::Invalid("auxiliary outcome must halt".into()));
            }
            if !left.is_zero() {
                out.push(Child {
                    label,
                    config: QConfig::new(next, qc.register.clone()),
                });
            }
        }
        _ => return Err(QError::Invalid("more than one auxiliary outcome".into())),
    }
    Ok(out)
}
