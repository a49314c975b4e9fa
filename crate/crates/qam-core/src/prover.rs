use std::collections::HashMap;

use machines::{
    initial_config, next_config, step, Configuration, MachineError, MachineKind, MachineSpec, StateLabel, Sym,
};

use crate::atm::classical_eval;
use crate::verifier::{PSym, Side};

/// The public outcome after each transcript symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observed {
    /// The single main element of an encoding step.
    Main,
    /// The continue element at a second `$`.
    Continue,
    Coin(Side),
}

/// Everything a prover sees: the round number, its own symbols and the
/// verifier's public outcomes so far in this round.
#[derive(Debug, Clone, Copy)]
pub struct ProverView<'a> {
    pub round: usize,
    pub sent: &'a [PSym],
    pub observed: &'a [Observed],
}

impl ProverView<'_> {
    pub fn coins(&self) -> impl Iterator<Item = Side> + '_ {
        self.observed.iter().filter_map(|o| match o {
            Observed::Coin(s) => Some(*s),
            _ => None,
        })
    }
}

pub trait Prover {
    fn next_symbol(&self, view: &ProverView<'_>) -> PSym;

    /// The strategy ignores the round number.
    fn round_stationary(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProverKind {
    HonestDtm,
    /// Honest for an alternating machine, choosing existential branches from
    /// the classical evaluation.
    HonestAtm,
    /// Shifts symbol `digit` (1-based) of configuration `config` (1-based)
    /// by `delta` places, cyclically within Γ′.
    DefectDigit {
        config: usize,
        digit: usize,
        delta: i64,
    },
    /// Omits configuration `i` (1-based).
    SkipConfig(usize),
    /// After `c₁`, sends a short configuration whose successor accepts.
    PrematureAccept,
    /// Sends `c₁ $ $` and then blanks forever.
    Silent,
    /// Sends `c₂` one symbol too long.
    WrongLength,
    /// Honest configurations, but every existential branch takes this side.
    FixedChoice(Side),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProverError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("{0}")]
    Unsupported(String),
}

type Blocks = Vec<Vec<Sym>>;

/// A prover that tells a fixed story, possibly altered. The story of an
/// alternating machine follows the coin outcomes seen so far.
struct Scripted {
    spec: MachineSpec,
    x: String,
    kind: ProverKind,
    strategy: HashMap<Configuration, usize>,
    fixed: Option<Vec<PSym>>,
    premature: Option<Vec<Sym>>,
    horizon: usize,
}

/// Upper bound on blocks generated for one alternating story.
const MAX_ATM_BLOCKS: usize = 256;

pub fn make_prover(
    kind: ProverKind,
    spec: &MachineSpec,
    x: &str,
    horizon: usize,
) -> Result<Box<dyn Prover>, ProverError> {
    let atm = spec.kind() == MachineKind::Atm;
    match (&kind, atm) {
        (ProverKind::HonestDtm, true) => {
            return Err(ProverError::Unsupported(
                "honest-dtm needs a deterministic machine".into(),
            ))
        }
        (ProverKind::FixedChoice(_), false) => {
            return Err(ProverError::Unsupported(
                "fixed-choice needs an alternating machine".into(),
            ))
        }
        (ProverKind::HonestAtm, false) => {
            return Err(ProverError::Unsupported(
                "honest-atm needs an alternating machine".into(),
            ))
        }
        _ => {}
    }
    let strategy = if atm {
        classical_eval(spec, x)?.strategy
    } else {
        HashMap::new()
    };
    let mut p = Scripted {
        spec: spec.clone(),
        x: x.to_string(),
        kind,
        strategy,
        fixed: None,
        premature: None,
        horizon,
    };
    if p.kind == ProverKind::PrematureAccept {
        let honest = p.honest_blocks(&[]);
        let c = premature_config(spec, x, honest.get(1))
            .ok_or_else(|| ProverError::Unsupported("no premature accepting configuration".into()))?;
        p.premature = Some(c.symbols().to_vec());
    }
    if !atm {
        p.fixed = Some(p.flatten(p.tampered(&[])));
    }
    Ok(Box::new(p))
}

impl Scripted {
    fn honest_blocks(&self, coins: &[Side]) -> Blocks {
        let spec = &self.spec;
        if spec.kind() == MachineKind::Dtm {
            // Enough configurations to fill the horizon.
            let mut out = Vec::new();
            let mut total = 0;
            let Ok(mut c) = initial_config(spec, &self.x) else {
                return out;
            };
            while total < self.horizon {
                total += c.len() + 2;
                out.push(c.symbols().to_vec());
                match next_config(spec, &c) {
                    Ok(n) if !n.is_halting(spec) => c = n,
                    _ => break,
                }
            }
            return out;
        }
        let mut out = Vec::new();
        let Ok(mut c) = initial_config(spec, &self.x) else {
            return out;
        };
        for i in 0..MAX_ATM_BLOCKS {
            out.push(c.symbols().to_vec());
            let q = c.state(spec).expect("state");
            let branch = match spec.label(q) {
                Some(StateLabel::Existential) => self.choice_for(&c).index(),
                Some(StateLabel::Universal) => coins.get(i).map_or(0, |s| s.index()),
                _ => 0,
            };
            match step(spec, &c, branch) {
                Ok(n) if !n.is_halting(spec) => c = n,
                _ => break,
            }
        }
        out
    }

    /// The branch symbol sent before configuration `c`.
    fn choice_for(&self, c: &Configuration) -> Side {
        let spec = &self.spec;
        let Some(q) = c.state(spec) else { return Side::L };
        if spec.label(q) != Some(StateLabel::Existential) {
            return Side::L;
        }
        if let ProverKind::FixedChoice(side) = self.kind {
            return side;
        }
        if let Some(&b) = self.strategy.get(c) {
            return Side::from_index(b);
        }
        (0..2)
            .find(|&b| step(spec, c, b).is_ok_and(|n| n.is_accepting(spec)))
            .map_or(Side::L, Side::from_index)
    }

    fn tampered(&self, coins: &[Side]) -> Blocks {
        let mut blocks = self.honest_blocks(coins);
        let size = self.spec.alphabet_size() as i64;
        match &self.kind {
            ProverKind::HonestDtm | ProverKind::HonestAtm | ProverKind::Silent | ProverKind::FixedChoice(_) => {}
            ProverKind::DefectDigit { config, digit, delta } => {
                if let Some(s) = blocks
                    .get_mut(config.wrapping_sub(1))
                    .and_then(|b| b.get_mut(digit.wrapping_sub(1)))
                {
                    s.0 = (s.0 as i64 + delta).rem_euclid(size) as u16;
                }
            }
            ProverKind::SkipConfig(i) => {
                if (1..=blocks.len()).contains(i) {
                    blocks.remove(i - 1);
                }
            }
            ProverKind::PrematureAccept => {
                blocks.truncate(1);
                blocks.push(self.premature.clone().expect("built"));
            }
            ProverKind::WrongLength => {
                let i = blocks.len().min(2) - 1;
                let b = &mut blocks[i];
                let spec = &self.spec;
                let filler = spec.tape_sym(spec.blank());
                let at = match spec.kind() {
                    MachineKind::Dtm => b.len(),
                    MachineKind::Atm => b.len() - 1,
                };
                b.insert(at, filler);
            }
        }
        blocks
    }

    fn flatten(&self, blocks: Blocks) -> Vec<PSym> {
        let atm = self.spec.kind() == MachineKind::Atm;
        let mut out = Vec::new();
        let silent = self.kind == ProverKind::Silent;
        for (i, b) in blocks.into_iter().enumerate() {
            if silent && i > 0 {
                if atm {
                    out.push(PSym::Left);
                }
                break;
            }
            if atm {
                let c = Configuration::new(b.clone());
                out.push(match self.choice_for(&c) {
                    Side::L => PSym::Left,
                    Side::R => PSym::Right,
                });
            }
            out.extend(b.into_iter().map(PSym::Sym));
            out.push(PSym::Dollar);
            out.push(PSym::Dollar);
        }
        out
    }

    fn tail(&self) -> PSym {
        if self.kind == ProverKind::Silent {
            PSym::Sym(self.spec.tape_sym(self.spec.blank()))
        } else {
            PSym::Dollar
        }
    }
}

impl Prover for Scripted {
    fn next_symbol(&self, view: &ProverView<'_>) -> PSym {
        let i = view.sent.len();
        if let Some(f) = &self.fixed {
            return f.get(i).copied().unwrap_or_else(|| self.tail());
        }
        let coins: Vec<Side> = view.coins().collect();
        let t = self.flatten(self.tampered(&coins));
        t.get(i).copied().unwrap_or_else(|| self.tail())
    }
}

/// A configuration, different from `avoid`, whose successor accepts. For
/// alternating machines it has the length of the input configurations.
fn premature_config(spec: &MachineSpec, x: &str, avoid: Option<&Vec<Sym>>) -> Option<Configuration> {
    let ok = |c: &Configuration| -> bool {
        if avoid.is_some_and(|a| a.as_slice() == c.symbols()) || !c.is_canonical(spec) {
            return false;
        }
        let Some(q) = c.state(spec) else { return false };
        if spec.is_halting_state(q) {
            return false;
        }
        let accepts = |b| step(spec, c, b).is_ok_and(|n| n.is_accepting(spec));
        match (spec.kind(), spec.label(q)) {
            (MachineKind::Atm, Some(StateLabel::Universal)) => accepts(0) && accepts(1),
            (MachineKind::Atm, Some(StateLabel::Existential)) => accepts(0) || accepts(1),
            _ => accepts(0),
        }
    };
    let tapes: Vec<Vec<usize>> = match spec.kind() {
        MachineKind::Dtm => {
            let blank = spec.blank();
            let mut t = vec![vec![blank, blank]];
            for a in 0..spec.tape_alphabet().len() {
                if a != blank {
                    t.push(vec![blank, a, blank]);
                }
            }
            t
        }
        MachineKind::Atm => {
            let init = initial_config(spec, x).ok()?;
            let p = init.parsed(spec).ok()?;
            vec![p.tape]
        }
    };
    for tape in tapes {
        for head in 0..tape.len() {
            for q in 0..spec.states().len() {
                let mut syms: Vec<Sym> = tape.iter().map(|&a| spec.tape_sym(a)).collect();
                syms.insert(head, spec.state_sym(q));
                let c = Configuration::new(syms);
                if ok(&c) {
                    return Some(c);
                }
            }
        }
    }
    None
}
