//! The one-round protocol verifier as an alternating machine: the verifier's
//! steps are universal, the prover's symbols are existential choices, and
//! an auxiliary outcome accepts instead of restarting the round.

use exact_linalg::{ExactMatrix, ExactScalar, ExactVector};
use machines::{MachineKind, MachineSpec};
use num_traits::Zero;
use qam_core::{
    classical_eval, Mode, Observed, PSym, Prover, ProverView, Side, VState, VStep, Verdict, Verifier, VerifierConfig,
};

use crate::{Element, Move, Outcome, PathStep, QConfig, QError, QMachine};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PConf {
    /// Strong mode only: the register initialization, whose discarded mass
    /// accepts.
    Init,
    /// Waiting for the prover's next symbol.
    Await(VState),
    /// The verifier processing one symbol.
    Read(VState, PSym),
    Accept,
    Reject,
}

pub struct ProtocolMachine<'a> {
    verifier: Verifier<'a>,
    symbols: Vec<PSym>,
    inv_d: ExactScalar,
    block_limit: Option<usize>,
    tape_len: usize,
    prune: bool,
}

impl<'a> ProtocolMachine<'a> {
    /// The weak protocol for a DTM. Not strong: a prover may talk forever.
    pub fn weak(spec: &'a MachineSpec, x: &str) -> Result<Self, QError> {
        let vc = VerifierConfig::weak(spec, usize::MAX);
        Self::build(Verifier::new(spec, vc, x)?, None, x)
    }

    /// The strong protocol for an ATM, rejecting once the prover starts
    /// block `block_limit + 1`. Every path then halts.
    pub fn strong(spec: &'a MachineSpec, x: &str, block_limit: usize) -> Result<Self, QError> {
        let vc = VerifierConfig::strong(spec, x, usize::MAX);
        Self::build(Verifier::new(spec, vc, x)?, Some(block_limit), x)
    }

    fn build(verifier: Verifier<'a>, block_limit: Option<usize>, x: &str) -> Result<Self, QError> {
        let spec = verifier.spec();
        let mut symbols: Vec<PSym> = spec.symbols().map(PSym::Sym).collect();
        symbols.push(PSym::Dollar);
        if verifier.mode() == Mode::Strong5State {
            symbols.extend([PSym::Left, PSym::Right]);
        }
        let inv_d = ExactScalar::new(1.into(), verifier.config().d.into());
        Ok(ProtocolMachine {
            verifier,
            symbols,
            inv_d,
            block_limit,
            tape_len: x.chars().count() + 2,
            prune: true,
        })
    }

    /// Turns off the pruning of configurations whose current block already
    /// disagrees with the encoded successor.
    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }

    pub fn verifier(&self) -> &Verifier<'a> {
        &self.verifier
    }

    /// The prover alphabet, in branch order.
    pub fn symbols(&self) -> &[PSym] {
        &self.symbols
    }

    fn dim(&self) -> usize {
        self.verifier.mode().dim()
    }

    fn await_state(&self, st: VState) -> PConf {
        match self.block_limit {
            Some(b) if st.at_exchange() && st.block() > b => PConf::Reject,
            _ => PConf::Await(st),
        }
    }
}

impl QMachine for ProtocolMachine<'_> {
    type Classical = PConf;

    fn initial(&self) -> QConfig<PConf> {
        let start = match self.verifier.mode() {
            Mode::Weak4State => self.await_state(self.verifier.start_state()),
            Mode::Strong5State => PConf::Init,
        };
        QConfig::new(start, ExactVector::basis(self.dim(), 0))
    }

    fn rule(&self, c: &PConf) -> Result<Move<PConf>, QError> {
        let restart = || Outcome {
            label: "restart".into(),
            element: Element::Remainder,
            next: PConf::Accept,
        };
        Ok(match c {
            PConf::Accept => Move::Accept,
            PConf::Reject => Move::Reject,
            PConf::Init => {
                let (v, _) = self.verifier.start_register();
                let mut e = ExactMatrix::zeros(self.dim(), self.dim());
                for i in 0..self.dim() {
                    e.set(i, 0, v.get(i).clone());
                }
                let next = self.await_state(self.verifier.start_state());
                Move::Universal(vec![
                    Outcome {
                        label: "init".into(),
                        element: Element::Matrix(e),
                        next,
                    },
                    restart(),
                ])
            }
            PConf::Await(st) => Move::Existential(self.symbols.iter().map(|&s| PConf::Read(st.clone(), s)).collect()),
            PConf::Read(st, sym) => match self.verifier.step(st, *sym) {
                VStep::Reject(_) => Move::Reject,
                VStep::Apply { elements, verdicts, .. } => {
                    if elements.len() != verdicts.len() {
                        return Err(QError::BranchMismatch {
                            elements: elements.len(),
                            branches: verdicts.len(),
                        });
                    }
                    let mut out: Vec<Outcome<PConf>> = elements
                        .into_iter()
                        .zip(verdicts)
                        .map(|((label, m), v)| Outcome {
                            label,
                            element: Element::Matrix(m.scale(&self.inv_d)),
                            next: match v {
                                Verdict::Continue(s) => self.await_state(s),
                                Verdict::Accept => PConf::Accept,
                                Verdict::Reject => PConf::Reject,
                            },
                        })
                        .collect();
                    out.push(restart());
                    Move::Universal(out)
                }
            },
        })
    }

    /// Past the first block the register holds the encoded successor of the
    /// previous configuration next to the digits of the current one read so
    /// far. Digits are never zero, so once the latter stop being a prefix of
    /// the former the subtraction at the second `$` must leave a nonzero
    /// rejecting amplitude.
    fn doomed(&self, qc: &QConfig<PConf>) -> bool {
        let PConf::Await(st) = &qc.classical else { return false };
        if !self.prune || st.block() < 2 || !(st.in_config() || st.awaiting_second_dollar()) {
            return false;
        }
        let r = &qc.register;
        if r.get(0).is_zero() {
            return false;
        }
        let (succ, cur) = (r.get(1) / r.get(0), r.get(2) / r.get(0));
        if !succ.is_integer() || !cur.is_integer() || succ.is_zero() {
            return false;
        }
        if st.awaiting_second_dollar() {
            return succ != cur;
        }
        let m = self.verifier.config().m() as u32;
        let succ = succ.to_integer().magnitude().to_radix_be(m);
        let k = st.position();
        let cur = cur.to_integer().magnitude().to_radix_be(m);
        if k == 0 || cur.len() != k {
            return false;
        }
        k > succ.len() || succ[..k] != cur[..]
    }

    fn halting_depth(&self) -> Option<usize> {
        // Per block: a branch symbol, at most |x|+3 configuration symbols
        // before the length check fails, and two `$`; each symbol is a
        // choice followed by a verifier step. Plus the initialization and
        // the final rejecting choice.
        let b = self.block_limit?;
        Some(2 + 2 * b * (self.tape_len + 1 + 3))
    }
}

/// Number of configurations on the longest computation path of an ATM whose
/// reachable configuration graph is acyclic.
pub fn atm_block_bound(spec: &MachineSpec, x: &str) -> Result<usize, QError> {
    if spec.kind() != MachineKind::Atm {
        return Err(QError::Invalid("alternating machine expected".into()));
    }
    classical_eval(spec, x)?
        .depth
        .map(|d| d + 1)
        .ok_or_else(|| QError::Invalid("the computation graph has a cycle".into()))
}

/// Drives the existential choices of a [`ProtocolMachine`] with a protocol
/// prover.
pub struct ProverStrategy<'p> {
    prover: &'p dyn Prover,
    symbols: Vec<PSym>,
}

impl<'p> ProverStrategy<'p> {
    pub fn new(prover: &'p dyn Prover, machine: &ProtocolMachine<'_>) -> Self {
        ProverStrategy {
            prover,
            symbols: machine.symbols().to_vec(),
        }
    }

    pub fn choose(&self, path: &[PathStep]) -> usize {
        let mut sent = Vec::new();
        let mut observed = Vec::new();
        for s in path {
            match s {
                PathStep::Chose(i) => sent.push(self.symbols[*i]),
                PathStep::Outcome(l) => observed.push(match l.as_str() {
                    "init" => continue,
                    "l" => Observed::Coin(Side::L),
                    "r" => Observed::Coin(Side::R),
                    "continue" => Observed::Continue,
                    _ => Observed::Main,
                }),
            }
        }
        let sym = self.prover.next_symbol(&ProverView {
            round: 0,
            sent: &sent,
            observed: &observed,
        });
        self.symbols
            .iter()
            .position(|&s| s == sym)
            .expect("prover symbol in the alphabet")
    }
}
