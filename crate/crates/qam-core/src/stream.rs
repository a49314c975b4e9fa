use machines::{MachineError, MachineKind, MachineSpec, Move, Sym, SymKind, Transition};

/// Which transition to take at a branching state. Deterministic states
/// always take branch 0; the caller fixes the branch once the state of the
/// configuration is known.
pub type BranchOracle<'a> = &'a dyn Fn(usize) -> usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Phase {
    /// Left of the state symbol. `held` is the previous symbol, not yet emitted.
    Left { held: Option<Sym>, at_zero: bool },
    /// The state symbol was just read.
    State { q: usize, e: Option<Sym>, e_at_zero: bool },
    /// Copying the tail. `pad` means nothing has followed the head cell yet
    /// after a right move.
    Copy { pad: bool },
    /// After a left move, the written symbol is still pending.
    Pending { a: usize, e: Sym, e_at_zero: bool, b: Sym },
    /// Left move seen the blank after a nonblank head cell.
    PendingBlank { e: Sym, e_at_zero: bool, b: Sym, z: Sym },
}

/// Online transducer from a configuration to the digits of its successor,
/// emitting at most three symbols per input symbol. It keeps a constant
/// amount of state: the last symbol, the pending write, and a phase flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuccessorStream {
    phase: Phase,
    seen: usize,
    emitted: usize,
    next_state: Option<usize>,
}

impl Default for SuccessorStream {
    fn default() -> Self {
        Self::new()
    }
}

impl SuccessorStream {
    pub fn new() -> Self {
        SuccessorStream {
            phase: Phase::Left {
                held: None,
                at_zero: false,
            },
            seen: 0,
            emitted: 0,
            next_state: None,
        }
    }

    /// Number of successor symbols emitted so far.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    /// State of the successor, known once the head cell has been read.
    pub fn next_state(&self) -> Option<usize> {
        self.next_state
    }

    /// The state symbol has been read but not the head cell.
    pub fn awaiting_head(&self) -> Option<usize> {
        match self.phase {
            Phase::State { q, .. } => Some(q),
            _ => None,
        }
    }

    fn out(&mut self, v: Vec<Sym>) -> Vec<Sym> {
        self.emitted += v.len();
        v
    }

    /// Feeds one symbol. `branch` picks the transition at the head.
    pub fn push(&mut self, spec: &MachineSpec, s: Sym, branch: BranchOracle<'_>) -> Result<Vec<Sym>, MachineError> {
        let idx = self.seen;
        self.seen += 1;
        let blank = spec.tape_sym(spec.blank());
        let atm = spec.kind() == MachineKind::Atm;
        let malformed = |m: &str| MachineError::MalformedConfiguration(m.to_string());
        match (self.phase.clone(), spec.classify(s)) {
            (Phase::Left { held, .. }, SymKind::Tape(_)) => {
                self.phase = Phase::Left {
                    held: Some(s),
                    at_zero: idx == 0,
                };
                Ok(self.out(held.into_iter().collect()))
            }
            (Phase::Left { held, at_zero }, SymKind::State(q)) => {
                if spec.is_halting_state(q) {
                    return Err(MachineError::Halting);
                }
                self.phase = Phase::State {
                    q,
                    e: held,
                    e_at_zero: held.is_some() && at_zero,
                };
                Ok(vec![])
            }
            (Phase::State { q, e, e_at_zero }, SymKind::Tape(a)) => {
                let ts = spec.transitions(q, a).ok_or_else(|| MachineError::NoTransition {
                    state: spec.states()[q].clone(),
                    symbol: spec.tape_alphabet()[a].clone(),
                })?;
                let k = branch(ts.len());
                let Transition { state, write, mv } = *ts.get(k).ok_or(MachineError::NoSuchBranch {
                    branch: k,
                    available: ts.len(),
                })?;
                if atm {
                    let cent = spec.endmarker();
                    if (a == cent) != (write == cent) {
                        return Err(malformed("endmarker overwritten or written inside the tape"));
                    }
                } else if e.is_none() && write != spec.blank() {
                    return Err(MachineError::LeadingBlankOverwritten);
                }
                self.next_state = Some(state);
                let b = spec.tape_sym(write);
                let q2 = spec.state_sym(state);
                match mv {
                    Move::R => {
                        self.phase = Phase::Copy { pad: true };
                        Ok(self.out(e.into_iter().chain([b, q2]).collect()))
                    }
                    Move::L => {
                        let e = e.ok_or(MachineError::LeftOfTape)?;
                        self.phase = Phase::Pending { a, e, e_at_zero, b };
                        Ok(self.out(vec![q2, e]))
                    }
                }
            }
            (Phase::Copy { .. }, SymKind::Tape(_)) => {
                self.phase = Phase::Copy { pad: false };
                Ok(self.out(vec![s]))
            }
            (Phase::Pending { a, e, e_at_zero, b }, SymKind::Tape(_)) => {
                if !atm && spec.tape_sym(a) != blank && s == blank {
                    self.phase = Phase::PendingBlank { e, e_at_zero, b, z: s };
                    Ok(vec![])
                } else {
                    self.phase = Phase::Copy { pad: false };
                    Ok(self.out(vec![b, s]))
                }
            }
            (Phase::PendingBlank { b, z, .. }, SymKind::Tape(_)) => {
                self.phase = Phase::Copy { pad: false };
                Ok(self.out(vec![b, z, s]))
            }
            (Phase::State { .. }, SymKind::State(_)) => Err(malformed("state symbol follows a state symbol")),
            (_, SymKind::State(_)) => Err(malformed("more than one state symbol")),
        }
    }

    /// Flushes the remaining successor symbols at the end of the configuration.
    pub fn finish(&mut self, spec: &MachineSpec) -> Result<Vec<Sym>, MachineError> {
        let blank = spec.tape_sym(spec.blank());
        let atm = spec.kind() == MachineKind::Atm;
        let malformed = |m: &str| MachineError::MalformedConfiguration(m.to_string());
        // The right end of a blank-only frontier: keep the written blank only
        // when it is the sole cell after a nonblank or the leading cell.
        let keep_blank = |e: Sym, e_at_zero: bool| e != blank || e_at_zero;
        let tail = match self.phase.clone() {
            Phase::Left { .. } => return Err(malformed("no state symbol")),
            Phase::State { .. } => return Err(malformed("state symbol is last")),
            Phase::Copy { pad: true } if atm => return Err(MachineError::RightOfTape),
            Phase::Copy { pad: true } => vec![blank],
            Phase::Copy { pad: false } => vec![],
            Phase::Pending { b, .. } if atm => vec![b],
            Phase::Pending { e, e_at_zero, b, .. } => {
                if b != blank {
                    vec![b, blank]
                } else if keep_blank(e, e_at_zero) {
                    vec![b]
                } else {
                    vec![]
                }
            }
            Phase::PendingBlank { e, e_at_zero, b, z } => {
                if b != blank {
                    vec![b, z]
                } else if keep_blank(e, e_at_zero) {
                    vec![b]
                } else {
                    return Err(MachineError::LengthJump);
                }
            }
        };
        self.phase = Phase::Copy { pad: false };
        Ok(self.out(tail))
    }
}
