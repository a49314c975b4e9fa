use exact_linalg::{ExactMatrix, ExactScalar, ExactVector, Superoperator};
use machines::{initial_config, DigitMap, MachineError, MachineKind, MachineSpec, StateLabel, Sym, SymKind};
use num_traits::One;

use crate::ops::{coin_elements, dollar2_elements, step_elements, Block, Decision, LengthCase, Mode};
use crate::stream::SuccessorStream;

/// A transcript symbol sent by the prover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PSym {
    Sym(Sym),
    Dollar,
    Left,
    Right,
}

impl PSym {
    pub fn render(&self, spec: &MachineSpec) -> String {
        match self {
            PSym::Sym(s) => spec.name(*s).to_string(),
            PSym::Dollar => "$".into(),
            PSym::Left => "l".into(),
            PSym::Right => "r".into(),
        }
    }
}

/// A branch side; `L` is transition 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::L => 0,
            Side::R => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Side::L
        } else {
            Side::R
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierConfig {
    pub mode: Mode,
    pub digit_map: DigitMap,
    pub d: u64,
    /// Expected tape length `|x| + 2` (strong mode); the configuration string
    /// is one longer because of the state symbol.
    pub length_check: Option<usize>,
    pub max_transcript: usize,
}

impl VerifierConfig {
    pub fn weak(spec: &MachineSpec, max_transcript: usize) -> Self {
        let digit_map = DigitMap::for_spec(spec);
        VerifierConfig {
            mode: Mode::Weak4State,
            d: crate::ops::protocol_scale(Mode::Weak4State, digit_map.base()),
            digit_map,
            length_check: None,
            max_transcript,
        }
    }

    pub fn strong(spec: &MachineSpec, x: &str, max_transcript: usize) -> Self {
        let digit_map = DigitMap::for_spec(spec);
        VerifierConfig {
            mode: Mode::Strong5State,
            d: crate::ops::protocol_scale(Mode::Strong5State, digit_map.base()),
            digit_map,
            length_check: Some(x.chars().count() + 2),
            max_transcript,
        }
    }

    pub fn m(&self) -> u64 {
        self.digit_map.base()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Phase {
    /// Strong mode: waiting for the prover's branch symbol.
    Exchange,
    Config,
    AfterDollar(Decision),
}

/// Finite-memory format check of one configuration (P1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
struct Format {
    read: usize,
    tape_len: usize,
    head: Option<usize>,
    last_was_state: bool,
    last: Option<Sym>,
    prev: Option<Sym>,
    closed: bool,
}

impl Format {
    fn push(&mut self, spec: &MachineSpec, s: Sym) -> Result<(), &'static str> {
        self.read += 1;
        let end = spec.tape_sym(spec.endmarker());
        match spec.classify(s) {
            SymKind::State(_) => {
                if self.head.is_some() {
                    return Err("more than one state symbol");
                }
                self.head = Some(self.tape_len);
                self.last_was_state = true;
            }
            SymKind::Tape(_) => {
                if self.closed {
                    return Err("endmarker inside the tape");
                }
                if self.tape_len == 0 && s != end {
                    return Err("tape must start with the endmarker");
                }
                if spec.kind() == MachineKind::Atm && self.tape_len > 0 && s == end {
                    self.closed = true;
                }
                self.prev = self.last;
                self.last = Some(s);
                self.tape_len += 1;
                self.last_was_state = false;
            }
        }
        Ok(())
    }

    fn finish(&self, spec: &MachineSpec) -> Result<(), &'static str> {
        let end = spec.tape_sym(spec.endmarker());
        let head = self.head.ok_or("no state symbol")?;
        if self.last_was_state {
            return Err("state symbol is last");
        }
        if self.tape_len < 2 || self.last != Some(end) {
            return Err("tape must end with the endmarker");
        }
        if spec.kind() == MachineKind::Dtm {
            let blank = spec.tape_sym(spec.blank());
            let canonical = head == self.tape_len - 1 || self.tape_len == 2 || self.prev != Some(blank);
            if !canonical {
                return Err("droppable blank at the right end");
            }
        }
        Ok(())
    }
}

/// The classical part of the verifier between two transcript symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VState {
    block: usize,
    phase: Phase,
    fmt: Format,
    stream: SuccessorStream,
    /// The state of the configuration expected next: q₁ for the first block,
    /// otherwise the state of the encoded successor.
    predicted: usize,
    /// Branch symbols of the current exchange; cleared once the branch is fixed.
    choice: Option<Side>,
    coin: Option<Side>,
}

impl VState {
    pub fn block(&self) -> usize {
        self.block
    }

    /// Symbols of the current configuration read so far.
    pub fn position(&self) -> usize {
        self.fmt.read
    }

    pub fn in_config(&self) -> bool {
        self.phase == Phase::Config
    }

    pub fn at_exchange(&self) -> bool {
        self.phase == Phase::Exchange
    }

    pub fn awaiting_second_dollar(&self) -> bool {
        matches!(self.phase, Phase::AfterDollar(_))
    }
}

/// What the element with the same index leads to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Verdict {
    Continue(VState),
    Accept,
    Reject,
}

#[derive(Debug, Clone)]
pub enum VStep {
    /// A deterministic check failed; the whole register mass is rejected.
    Reject(String),
    Apply {
        name: &'static str,
        /// Unscaled elements; the operator applied is `{(1/d) M}`.
        elements: Vec<(String, ExactMatrix)>,
        verdicts: Vec<Verdict>,
    },
}

impl VStep {
    /// The operator of an `Apply` step at scale `d`.
    pub fn operator(&self, d: u64) -> Option<Superoperator> {
        match self {
            VStep::Apply { elements, .. } => Some(Superoperator::scaled(elements.clone(), d).expect("square elements")),
            VStep::Reject(_) => None,
        }
    }
}

/// The finite-state verifier for one machine and input.
#[derive(Debug, Clone)]
pub struct Verifier<'a> {
    spec: &'a MachineSpec,
    vc: VerifierConfig,
    initial: Vec<Sym>,
}

impl<'a> Verifier<'a> {
    pub fn new(spec: &'a MachineSpec, vc: VerifierConfig, x: &str) -> Result<Self, MachineError> {
        let want = match vc.mode {
            Mode::Weak4State => MachineKind::Dtm,
            Mode::Strong5State => MachineKind::Atm,
        };
        if spec.kind() != want {
            return Err(MachineError::InvalidSpec(format!(
                "{:?} protocol needs a {:?} machine",
                vc.mode, want
            )));
        }
        let initial = initial_config(spec, x)?.symbols().to_vec();
        Ok(Verifier { spec, vc, initial })
    }

    pub fn spec(&self) -> &'a MachineSpec {
        self.spec
    }

    pub fn config(&self) -> &VerifierConfig {
        &self.vc
    }

    pub fn mode(&self) -> Mode {
        self.vc.mode
    }

    /// The register at the start of a round and the mass that restarts at once.
    pub fn start_register(&self) -> (ExactVector, ExactScalar) {
        match self.vc.mode {
            Mode::Weak4State => (ExactVector::basis(4, 0), ExactScalar::from_integer(0.into())),
            Mode::Strong5State => {
                let s = ExactScalar::new(1.into(), self.vc.d.into());
                let mut v = ExactVector::zeros(5);
                v.set(0, s.clone());
                v.set(4, s);
                let rest = ExactScalar::one() - v.norm_sq();
                (v, rest)
            }
        }
    }

    pub fn start_state(&self) -> VState {
        self.block_state(1, self.spec.start())
    }

    fn block_state(&self, block: usize, predicted: usize) -> VState {
        VState {
            block,
            phase: match self.vc.mode {
                Mode::Weak4State => Phase::Config,
                Mode::Strong5State => Phase::Exchange,
            },
            fmt: Format::default(),
            stream: SuccessorStream::new(),
            predicted,
            choice: None,
            coin: None,
        }
    }

    fn blk(st: &VState) -> Block {
        if st.block == 1 {
            Block::First
        } else {
            Block::Later
        }
    }

    /// The exchange at `st` halves the q₅ amplitude.
    pub fn halves_at(&self, st: &VState) -> bool {
        st.at_exchange() && self.is_branching(st.predicted)
    }

    fn is_branching(&self, q: usize) -> bool {
        matches!(
            self.spec.label(q),
            Some(StateLabel::Existential | StateLabel::Universal)
        )
    }

    fn scaled(&self, name: &'static str, elems: Vec<(String, ExactMatrix)>, verdicts: Vec<Verdict>) -> VStep {
        VStep::Apply {
            name,
            elements: elems,
            verdicts,
        }
    }

    fn value(&self, digits: &[Sym]) -> u64 {
        digits
            .iter()
            .fold(0, |acc, &s| acc * self.vc.m() + self.vc.digit_map.digit(s))
    }

    /// The verifier's move on one prover symbol.
    pub fn step(&self, st: &VState, sym: PSym) -> VStep {
        let spec = self.spec;
        let reject = |m: &str| VStep::Reject(m.to_string());
        match (&st.phase, sym) {
            (Phase::Exchange, PSym::Left | PSym::Right) => {
                let side = if sym == PSym::Left { Side::L } else { Side::R };
                let halve = self.is_branching(st.predicted);
                let kids = [Side::L, Side::R]
                    .into_iter()
                    .map(|coin| {
                        let mut n = st.clone();
                        n.phase = Phase::Config;
                        n.choice = Some(side);
                        n.coin = Some(coin);
                        Verdict::Continue(n)
                    })
                    .collect();
                self.scaled("coin", coin_elements(self.vc.mode, halve), kids)
            }
            (Phase::Exchange, _) => reject("expected a branch symbol"),
            (Phase::Config, PSym::Sym(s)) => {
                let mut n = st.clone();
                if let Err(e) = n.fmt.push(spec, s) {
                    return reject(e);
                }
                let idx = n.fmt.read - 1;
                if st.block == 1 && self.initial.get(idx) != Some(&s) {
                    return reject("first configuration differs from the initial one");
                }
                if let Some(len) = self.vc.length_check {
                    if n.fmt.read > len + 1 {
                        return reject("configuration too long");
                    }
                }
                let (choice, coin) = (st.choice, st.coin);
                let oracle = |k: usize| -> usize {
                    if k < 2 {
                        return 0;
                    }
                    let q = n.stream.awaiting_head().expect("branch asked at the head");
                    match spec.label(q) {
                        Some(StateLabel::Existential) => choice.map_or(0, Side::index),
                        Some(StateLabel::Universal) => coin.map_or(0, Side::index),
                        _ => 0,
                    }
                };
                let mut stream = n.stream.clone();
                let out = match stream.push(spec, s, &oracle) {
                    Ok(o) => o,
                    Err(e) => return VStep::Reject(e.to_string()),
                };
                let resolved = stream.next_state().is_some() && n.stream.next_state().is_none();
                n.stream = stream;
                if resolved {
                    n.choice = None;
                    n.coin = None;
                }
                let current = (Self::blk(st) == Block::Later).then(|| self.vc.digit_map.digit(s));
                let elems = step_elements(
                    self.vc.mode,
                    Self::blk(st),
                    current,
                    out.len() as u32,
                    self.value(&out),
                    self.vc.m(),
                );
                self.scaled("encode", elems, vec![Verdict::Continue(n)])
            }
            (Phase::Config, PSym::Dollar) => {
                if let Err(e) = st.fmt.finish(spec) {
                    return reject(e);
                }
                if st.block == 1 && st.fmt.read != self.initial.len() {
                    return reject("first configuration differs from the initial one");
                }
                if let Some(len) = self.vc.length_check {
                    if st.fmt.read != len + 1 {
                        return reject("configuration length differs from |x|+3");
                    }
                }
                let mut n = st.clone();
                let tail = match n.stream.finish(spec) {
                    Ok(t) => t,
                    Err(e) => return VStep::Reject(e.to_string()),
                };
                let q = n.stream.next_state().expect("state read");
                let dec = if q == spec.accept() {
                    Decision::Accept
                } else if q == spec.reject() {
                    Decision::Reject
                } else {
                    Decision::Continue
                };
                n.phase = Phase::AfterDollar(dec);
                let elems = step_elements(
                    self.vc.mode,
                    Self::blk(st),
                    None,
                    tail.len() as u32,
                    self.value(&tail),
                    self.vc.m(),
                );
                self.scaled("dollar1", elems, vec![Verdict::Continue(n)])
            }
            (Phase::Config, _) => reject("branch symbol inside a configuration"),
            (Phase::AfterDollar(dec), PSym::Dollar) => {
                let block = Self::blk(st);
                let elems = dollar2_elements(self.vc.mode, block, *dec);
                let mut verdicts = Vec::new();
                if block == Block::Later {
                    verdicts.push(Verdict::Reject);
                }
                let next_q = st.stream.next_state().expect("state read");
                verdicts.push(match dec {
                    Decision::Accept => Verdict::Accept,
                    Decision::Reject => Verdict::Reject,
                    Decision::Continue => Verdict::Continue(self.block_state(st.block + 1, next_q)),
                });
                self.scaled("dollar2", elems, verdicts)
            }
            (Phase::AfterDollar(_), _) => reject("expected the second $"),
        }
    }

    /// |next(c)| against |c| for the configuration just finished, known after
    /// the first `$`.
    pub fn length_case(st: &VState) -> Option<LengthCase> {
        if !st.awaiting_second_dollar() {
            return None;
        }
        let c = st.fmt.read;
        let n = st.stream.emitted();
        Some(match n as isize - c as isize {
            -1 => LengthCase::Minus1,
            0 => LengthCase::Equal,
            _ => LengthCase::Plus1,
        })
    }
}
