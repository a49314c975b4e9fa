use std::cmp::max;

use crate::spec::{MachineKind, MachineSpec, Move, Sym, SymKind};
use crate::MachineError;

/// A configuration string `uqv`: the head is on the leftmost symbol of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    syms: Vec<Sym>,
}

/// Tape contents `uv` with the head index into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub tape: Vec<usize>,
    pub head: usize,
    pub state: usize,
}

impl Configuration {
    pub fn new(syms: Vec<Sym>) -> Self {
        Configuration { syms }
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    /// Tokenizes by longest match against the symbol names; whitespace is
    /// ignored.
    pub fn parse(spec: &MachineSpec, text: &str) -> Result<Self, MachineError> {
        let mut names: Vec<(String, Sym)> = spec.symbols().map(|s| (spec.name(s).to_string(), s)).collect();
        names.sort_by_key(|(n, _)| std::cmp::Reverse(n.len()));
        let mut rest: String = text.split_whitespace().collect();
        let mut syms = Vec::new();
        while !rest.is_empty() {
            let (n, s) = names
                .iter()
                .find(|(n, _)| rest.starts_with(n.as_str()))
                .ok_or_else(|| MachineError::MalformedConfiguration(format!("cannot tokenize `{rest}`")))?;
            syms.push(*s);
            rest = rest[n.len()..].to_string();
        }
        Ok(Configuration { syms })
    }

    pub fn render(&self, spec: &MachineSpec) -> String {
        self.syms.iter().map(|&s| spec.name(s)).collect()
    }

    pub fn state_position(&self, spec: &MachineSpec) -> Option<usize> {
        self.syms.iter().position(|&s| spec.is_state(s))
    }

    pub fn state(&self, spec: &MachineSpec) -> Option<usize> {
        self.state_position(spec).map(|p| self.syms[p].0 as usize)
    }

    pub fn is_halting(&self, spec: &MachineSpec) -> bool {
        self.state(spec).is_some_and(|q| spec.is_halting_state(q))
    }

    pub fn is_accepting(&self, spec: &MachineSpec) -> bool {
        self.state(spec) == Some(spec.accept())
    }

    /// Checks the `uqv` shape for the machine kind and splits it.
    pub fn parsed(&self, spec: &MachineSpec) -> Result<Parsed, MachineError> {
        let bad = |m: &str| MachineError::MalformedConfiguration(m.to_string());
        let mut state = None;
        let mut tape = Vec::with_capacity(self.syms.len());
        let mut head = 0;
        for &s in &self.syms {
            match spec.classify(s) {
                SymKind::State(q) => {
                    if state.replace(q).is_some() {
                        return Err(bad("more than one state symbol"));
                    }
                    head = tape.len();
                }
                SymKind::Tape(a) => tape.push(a),
            }
        }
        let state = state.ok_or_else(|| bad("no state symbol"))?;
        if head >= tape.len() {
            return Err(bad("state symbol is last"));
        }
        let end = spec.endmarker();
        if tape.len() < 2 || tape[0] != end || tape[tape.len() - 1] != end {
            return Err(bad("tape must start and end with the endmarker"));
        }
        if spec.kind() == MachineKind::Atm && tape[1..tape.len() - 1].contains(&end) {
            return Err(bad("endmarker inside the tape"));
        }
        Ok(Parsed { tape, head, state })
    }

    /// True when no blank could be dropped from the right end. Alternating
    /// configurations have fixed length and are always canonical.
    pub fn is_canonical(&self, spec: &MachineSpec) -> bool {
        let Ok(p) = self.parsed(spec) else {
            return false;
        };
        if spec.kind() == MachineKind::Atm {
            return true;
        }
        let last = p.tape.len() - 1;
        p.head == last || last == 1 || p.tape[last - 1] != spec.blank()
    }

    fn assemble(spec: &MachineSpec, tape: &[usize], head: usize, state: usize) -> Self {
        let mut syms: Vec<Sym> = Vec::with_capacity(tape.len() + 1);
        syms.extend(tape[..head].iter().map(|&a| spec.tape_sym(a)));
        syms.push(spec.state_sym(state));
        syms.extend(tape[head..].iter().map(|&a| spec.tape_sym(a)));
        Configuration { syms }
    }
}

/// `q₁#x#` for DTMs, `q₁¢x¢` for ATMs. Each character of `x` is one input symbol.
pub fn initial_config(spec: &MachineSpec, x: &str) -> Result<Configuration, MachineError> {
    let end = spec.endmarker();
    let mut tape = vec![end];
    for ch in x.chars() {
        let name = ch.to_string();
        let a = spec
            .input_alphabet()
            .iter()
            .copied()
            .find(|&a| spec.tape_alphabet()[a] == name)
            .ok_or(MachineError::InvalidInput(name))?;
        tape.push(a);
    }
    tape.push(end);
    Ok(Configuration::assemble(spec, &tape, 0, spec.start()))
}

/// Applies transition number `branch` at the head.
pub fn step(spec: &MachineSpec, c: &Configuration, branch: usize) -> Result<Configuration, MachineError> {
    let Parsed { mut tape, head, state } = c.parsed(spec)?;
    if spec.is_halting_state(state) {
        return Err(MachineError::Halting);
    }
    let ts = spec
        .transitions(state, tape[head])
        .ok_or_else(|| MachineError::NoTransition {
            state: spec.states()[state].clone(),
            symbol: spec.tape_alphabet()[tape[head]].clone(),
        })?;
    let t = *ts.get(branch).ok_or(MachineError::NoSuchBranch {
        branch,
        available: ts.len(),
    })?;
    match spec.kind() {
        MachineKind::Dtm => {
            let blank = spec.blank();
            if head == 0 && t.write != blank {
                return Err(MachineError::LeadingBlankOverwritten);
            }
            tape[head] = t.write;
            let new_head = match t.mv {
                Move::R => head + 1,
                Move::L => head.checked_sub(1).ok_or(MachineError::LeftOfTape)?,
            };
            if new_head == tape.len() {
                tape.push(blank);
            }
            // Drop blanks beyond both the head and the last nonblank cell.
            let last = (1..tape.len()).rev().find(|&i| tape[i] != blank).unwrap_or(0);
            let keep = max(new_head, last);
            tape.truncate(keep + 1);
            if tape[keep] != blank || tape.len() == 1 {
                tape.push(blank);
            }
            let next = Configuration::assemble(spec, &tape, new_head, t.state);
            if next.len() + 1 < c.len() {
                return Err(MachineError::LengthJump);
            }
            Ok(next)
        }
        MachineKind::Atm => {
            let cent = spec.endmarker();
            let at_end = head == 0 || head == tape.len() - 1;
            if at_end != (t.write == cent) {
                return Err(MachineError::MalformedConfiguration(
                    "endmarker overwritten or written inside the tape".into(),
                ));
            }
            tape[head] = t.write;
            let new_head = match t.mv {
                Move::R if head + 1 == tape.len() => return Err(MachineError::RightOfTape),
                Move::R => head + 1,
                Move::L => head.checked_sub(1).ok_or(MachineError::LeftOfTape)?,
            };
            Ok(Configuration::assemble(spec, &tape, new_head, t.state))
        }
    }
}

/// The single successor of a deterministic configuration.
pub fn next_config(spec: &MachineSpec, c: &Configuration) -> Result<Configuration, MachineError> {
    let n = branch_count(spec, c)?;
    if n != 1 {
        return Err(MachineError::NoSuchBranch {
            branch: 0,
            available: n,
        });
    }
    step(spec, c, 0)
}

/// All successors in branch order (one or two).
pub fn next_configs(spec: &MachineSpec, c: &Configuration) -> Result<Vec<Configuration>, MachineError> {
    let n = branch_count(spec, c)?;
    (0..n).map(|b| step(spec, c, b)).collect()
}

fn branch_count(spec: &MachineSpec, c: &Configuration) -> Result<usize, MachineError> {
    let p = c.parsed(spec)?;
    if spec.is_halting_state(p.state) {
        return Err(MachineError::Halting);
    }
    spec.transitions(p.state, p.tape[p.head])
        .map(<[_]>::len)
        .ok_or_else(|| MachineError::NoTransition {
            state: spec.states()[p.state].clone(),
            symbol: spec.tape_alphabet()[p.tape[p.head]].clone(),
        })
}
