use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::MachineError;

pub const BLANK: &str = "#";
pub const CENT: &str = "¢";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineKind {
    Dtm,
    Atm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Existential,
    Universal,
    Deterministic,
}

/// A symbol of Γ′ = Q ∪ Γ. States occupy indices `0..|Q|` in declaration
/// order, tape symbols follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymKind {
    State(usize),
    Tape(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub state: usize,
    pub write: usize,
    pub mv: Move,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MachineSpec {
    kind: MachineKind,
    states: Vec<String>,
    tape: Vec<String>,
    input: Vec<usize>,
    start: usize,
    accept: usize,
    reject: usize,
    labels: Vec<Option<StateLabel>>,
    delta: BTreeMap<(usize, usize), Vec<Transition>>,
    blank: usize,
    cent: Option<usize>,
}

impl fmt::Debug for MachineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MachineSpec")
            .field("kind", &self.kind)
            .field("states", &self.states)
            .field("tape", &self.tape)
            .finish_non_exhaustive()
    }
}

/// State, read symbol and the (state, write, move) choices.
pub type RawDelta = (String, String, Vec<(String, String, Move)>);

/// Unvalidated pieces collected by the parser or by hand.
pub(crate) struct RawSpec {
    pub kind: MachineKind,
    pub states: Vec<String>,
    pub tape: Vec<String>,
    pub input: Vec<String>,
    pub start: String,
    pub accept: String,
    pub reject: String,
    pub labels: Vec<(String, StateLabel)>,
    pub delta: Vec<RawDelta>,
}

impl MachineSpec {
    pub(crate) fn from_raw(raw: RawSpec) -> Result<Self, MachineError> {
        let bad = |m: String| MachineError::InvalidSpec(m);
        let mut names = HashSet::new();
        for n in raw.states.iter().chain(&raw.tape) {
            if !names.insert(n.as_str()) {
                return Err(bad(format!("symbol `{n}` declared twice")));
            }
        }
        if raw.states.len() + raw.tape.len() < 5 {
            return Err(bad("the configuration alphabet needs at least 5 symbols".into()));
        }
        let state = |n: &str| {
            raw.states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| bad(format!("unknown state `{n}`")))
        };
        let tape = |n: &str| {
            raw.tape
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| bad(format!("unknown tape symbol `{n}`")))
        };
        let blank = tape(BLANK)?;
        let cent = raw.tape.iter().position(|s| s == CENT);
        if raw.kind == MachineKind::Atm && cent.is_none() {
            return Err(bad("alternating machines need the endmarker ¢".into()));
        }
        let mut input = Vec::new();
        for s in &raw.input {
            let i = tape(s)?;
            if i == blank || Some(i) == cent || s.chars().count() != 1 {
                return Err(bad(format!("`{s}` cannot be an input symbol")));
            }
            input.push(i);
        }
        let (start, accept, reject) = (state(&raw.start)?, state(&raw.accept)?, state(&raw.reject)?);
        if accept == reject {
            return Err(bad("accepting and rejecting states coincide".into()));
        }
        let mut labels = vec![None; raw.states.len()];
        for (q, l) in &raw.labels {
            labels[state(q)?] = Some(*l);
        }
        let mut delta = BTreeMap::new();
        for (q, a, outs) in &raw.delta {
            let key = (state(q)?, tape(a)?);
            if key.0 == accept || key.0 == reject {
                return Err(bad(format!("halting state `{q}` has a transition")));
            }
            let mut ts = Vec::new();
            for (q2, b, mv) in outs {
                ts.push(Transition {
                    state: state(q2)?,
                    write: tape(b)?,
                    mv: *mv,
                });
            }
            if delta.insert(key, ts).is_some() {
                return Err(bad(format!("transition for `{q}` on `{a}` given twice")));
            }
        }
        let spec = MachineSpec {
            kind: raw.kind,
            states: raw.states,
            tape: raw.tape,
            input,
            start,
            accept,
            reject,
            labels,
            delta,
            blank,
            cent,
        };
        spec.check_arity()?;
        Ok(spec)
    }

    fn check_arity(&self) -> Result<(), MachineError> {
        for (&(q, a), ts) in &self.delta {
            let want = match (self.kind, self.labels[q]) {
                (MachineKind::Dtm, _) => 1,
                (MachineKind::Atm, Some(StateLabel::Deterministic)) => 1,
                (MachineKind::Atm, Some(_)) => 2,
                (MachineKind::Atm, None) => {
                    return Err(MachineError::InvalidSpec(format!(
                        "state `{}` has no label",
                        self.states[q]
                    )))
                }
            };
            if ts.len() != want {
                return Err(MachineError::InvalidSpec(format!(
                    "`{}` on `{}` has {} transitions, expected {}",
                    self.states[q],
                    self.tape[a],
                    ts.len(),
                    want
                )));
            }
        }
        if self.kind == MachineKind::Atm {
            for q in 0..self.states.len() {
                if !self.is_halting_state(q) && self.labels[q].is_none() {
                    return Err(MachineError::InvalidSpec(format!(
                        "state `{}` has no label",
                        self.states[q]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> MachineKind {
        self.kind
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn tape_alphabet(&self) -> &[String] {
        &self.tape
    }

    pub fn input_alphabet(&self) -> &[usize] {
        &self.input
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> usize {
        self.accept
    }

    pub fn reject(&self) -> usize {
        self.reject
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn cent(&self) -> Option<usize> {
        self.cent
    }

    /// The endmarker used at both ends of `uv`: `#` for DTMs, `¢` for ATMs.
    pub fn endmarker(&self) -> usize {
        match self.kind {
            MachineKind::Dtm => self.blank,
            MachineKind::Atm => self.cent.expect("validated"),
        }
    }

    pub fn label(&self, q: usize) -> Option<StateLabel> {
        self.labels[q]
    }

    pub fn is_halting_state(&self, q: usize) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn transitions(&self, q: usize, a: usize) -> Option<&[Transition]> {
        self.delta.get(&(q, a)).map(Vec::as_slice)
    }

    pub fn delta(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<Transition>)> {
        self.delta.iter()
    }

    /// |Γ′|.
    pub fn alphabet_size(&self) -> usize {
        self.states.len() + self.tape.len()
    }

    pub fn state_sym(&self, q: usize) -> Sym {
        Sym(q as u16)
    }

    pub fn tape_sym(&self, a: usize) -> Sym {
        Sym((self.states.len() + a) as u16)
    }

    pub fn classify(&self, s: Sym) -> SymKind {
        let i = s.0 as usize;
        if i < self.states.len() {
            SymKind::State(i)
        } else {
            SymKind::Tape(i - self.states.len())
        }
    }

    pub fn is_state(&self, s: Sym) -> bool {
        (s.0 as usize) < self.states.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        (0..self.alphabet_size() as u16).map(Sym)
    }

    pub fn name(&self, s: Sym) -> &str {
        match self.classify(s) {
            SymKind::State(q) => &self.states[q],
            SymKind::Tape(a) => &self.tape[a],
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        if let Some(q) = self.states.iter().position(|s| s == name) {
            return Some(self.state_sym(q));
        }
        self.tape.iter().position(|s| s == name).map(|a| self.tape_sym(a))
    }
}
