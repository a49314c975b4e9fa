use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use exact_linalg::{choose_scale_d, int, ExactMatrix, ExactScalar, Superoperator};

/// Register layout: 4 states for the weak protocol, a fifth acceptance state
/// for the strong one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Weak4State,
    Strong5State,
}

impl Mode {
    pub fn dim(self) -> usize {
        match self {
            Mode::Weak4State => 4,
            Mode::Strong5State => 5,
        }
    }
}

/// The first block only encodes the successor; later blocks also encode the
/// current configuration and finish the previous check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    First,
    Later,
}

/// |next(c)| compared with |c|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LengthCase {
    Minus1,
    Equal,
    Plus1,
}

/// What the second `$` does after the successor check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Accept,
    Reject,
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PositionCase {
    Interior,
    /// The last symbol of the configuration.
    Last(LengthCase),
    Dollar1(LengthCase),
    Dollar2(Decision),
}

/// Digits passed to the element builders: the current symbol `c[j]`, the
/// successor symbol `next(c)[j]` and the endmarker digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Digits {
    pub current: u64,
    pub successor: u64,
    pub end: u64,
}

fn n(v: u64) -> ExactScalar {
    ExactScalar::from_integer(v.into())
}

/// Rows of the unscaled 4×4 block, widened with q₅ = 1 in strong mode.
fn widen(mode: Mode, rows: [[ExactScalar; 4]; 4], q5: ExactScalar) -> ExactMatrix {
    let dim = mode.dim();
    let mut m = ExactMatrix::zeros(dim, dim);
    for (i, r) in rows.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    if mode == Mode::Strong5State {
        m.set(4, 4, q5);
    }
    m
}

fn z() -> ExactScalar {
    int(0)
}

fn o() -> ExactScalar {
    int(1)
}

/// Block 1: rows (1,0,0,0), (s, w, 0, 0).
fn first_block(mode: Mode, s: ExactScalar, w: ExactScalar) -> ExactMatrix {
    widen(
        mode,
        [
            [o(), z(), z(), z()],
            [s, w, z(), z()],
            [z(), z(), z(), z()],
            [z(), z(), z(), z()],
        ],
        o(),
    )
}

/// Later blocks: rows (1,0,0,0), (0,1,0,0), (c, 0, u, 0), (s, 0, 0, w).
fn later_block(mode: Mode, c: ExactScalar, u: ExactScalar, s: ExactScalar, w: ExactScalar) -> ExactMatrix {
    widen(
        mode,
        [
            [o(), z(), z(), z()],
            [z(), o(), z(), z()],
            [c, z(), u, z()],
            [s, z(), z(), w],
        ],
        o(),
    )
}

/// The unscaled main elements of one step of the successor encoding, in the
/// one-digit-per-symbol form.
pub fn encode_elements(
    mode: Mode,
    block: Block,
    case: PositionCase,
    digits: Digits,
    m: u64,
) -> Vec<(String, ExactMatrix)> {
    use LengthCase::*;
    use PositionCase::*;
    let Digits {
        current,
        successor,
        end,
    } = digits;
    let main = |mat| vec![("main".to_string(), mat)];
    match (block, case) {
        (_, Dollar2(dec)) => dollar2_elements(mode, block, dec),
        (Block::First, Interior) => main(first_block(mode, n(successor), n(m))),
        (Block::First, Last(Minus1)) | (Block::First, Dollar1(Minus1)) => main(first_block(mode, z(), o())),
        (Block::First, Last(Equal)) => main(first_block(mode, n(end), n(m))),
        (Block::First, Dollar1(Equal)) => main(first_block(mode, z(), o())),
        (Block::First, Last(Plus1)) => main(first_block(mode, n(successor), n(m))),
        (Block::First, Dollar1(Plus1)) => main(first_block(mode, n(end), n(m))),
        (Block::Later, Interior) => main(later_block(mode, n(current), n(m), n(successor), n(m))),
        (Block::Later, Last(Minus1)) => main(later_block(mode, n(end), n(m), z(), o())),
        (Block::Later, Last(Equal)) => main(later_block(mode, n(end), n(m), n(end), n(m))),
        (Block::Later, Last(Plus1)) => main(later_block(mode, n(end), n(m), n(successor), n(m))),
        (Block::Later, Dollar1(Minus1)) | (Block::Later, Dollar1(Equal)) => main(later_block(mode, z(), o(), z(), o())),
        (Block::Later, Dollar1(Plus1)) => main(later_block(mode, z(), o(), n(end), n(m))),
    }
}

/// The superoperator of one encoding step, scaled by 1/d.
pub fn build_encode_op(mode: Mode, block: Block, case: PositionCase, digits: Digits, m: u64, d: u64) -> Superoperator {
    Superoperator::scaled(encode_elements(mode, block, case, digits, m), d).expect("square elements")
}

/// Second `$`: the subtract element (later blocks only) and the decision.
pub fn dollar2_elements(mode: Mode, block: Block, dec: Decision) -> Vec<(String, ExactMatrix)> {
    let dim = mode.dim();
    let mut out = Vec::new();
    if block == Block::Later {
        let mut s = ExactMatrix::zeros(dim, dim);
        s.set(1, 1, int(1));
        s.set(1, 2, int(-1));
        out.push(("subtract".to_string(), s));
    }
    let mut e = ExactMatrix::zeros(dim, dim);
    match dec {
        Decision::Accept => {
            // The strong protocol accepts by the q₅ amplitude.
            let src = if mode == Mode::Strong5State { 4 } else { 0 };
            e.set(0, src, int(1));
        }
        Decision::Reject => e.set(0, 0, int(1)),
        Decision::Continue => {
            e.set(0, 0, int(1));
            match block {
                Block::First => e.set(1, 1, int(1)),
                Block::Later => e.set(1, 3, int(1)),
            }
            if mode == Mode::Strong5State {
                e.set(4, 4, int(1));
            }
        }
    }
    let label = match dec {
        Decision::Accept => "accept",
        Decision::Reject => "reject",
        Decision::Continue => "continue",
    };
    out.push((label.to_string(), e));
    out
}

/// One step of the streaming encoder: the successor register is shifted by
/// `k` digits and `value` is added; the current register is shifted by one
/// digit when `current` is given.
pub fn step_elements(
    mode: Mode,
    block: Block,
    current: Option<u64>,
    k: u32,
    value: u64,
    m: u64,
) -> Vec<(String, ExactMatrix)> {
    let w = n(m.pow(k));
    let mat = match block {
        Block::First => first_block(mode, n(value), w),
        Block::Later => match current {
            Some(c) => later_block(mode, n(c), n(m), n(value), w),
            None => later_block(mode, z(), o(), n(value), w),
        },
    };
    vec![("main".to_string(), mat)]
}

/// The branch-exchange coin {(1/d)I, (1/d)I}; the q₅ entry is halved when
/// the configuration about to be sent branches.
pub fn coin_elements(mode: Mode, halve: bool) -> Vec<(String, ExactMatrix)> {
    let mut id = ExactMatrix::identity(mode.dim());
    if halve && mode == Mode::Strong5State {
        id.set(4, 4, ExactScalar::new(1.into(), 2.into()));
    }
    vec![("l".to_string(), id.clone()), ("r".to_string(), id)]
}

/// Most digits the streaming encoder emits for one input symbol.
pub const MAX_DIGITS_PER_STEP: u32 = 3;

/// The common scale for every operator of the protocol over base `m`: the
/// largest of the minimal scales of the worst-case element families.
pub fn protocol_scale(mode: Mode, m: u64) -> u64 {
    static CACHE: OnceLock<Mutex<HashMap<(Mode, u64), u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&d) = cache.lock().expect("scale cache").get(&(mode, m)) {
        return d;
    }
    let d = compute_scale(mode, m);
    cache.lock().expect("scale cache").insert((mode, m), d);
    d
}

fn compute_scale(mode: Mode, m: u64) -> u64 {
    let top = m - 1;
    let mut families: Vec<Vec<ExactMatrix>> = Vec::new();
    for k in 0..=MAX_DIGITS_PER_STEP {
        let worst = m.pow(k) - 1;
        for block in [Block::First, Block::Later] {
            for current in [Some(top), None] {
                families.push(strip(step_elements(mode, block, current, k, worst, m)));
            }
        }
    }
    let digits = Digits {
        current: top,
        successor: top,
        end: top,
    };
    for block in [Block::First, Block::Later] {
        for case in all_cases() {
            families.push(strip(encode_elements(mode, block, case, digits, m)));
        }
    }
    families.push(strip(coin_elements(mode, false)));
    families
        .iter()
        .map(|f| choose_scale_d(f).expect("square families"))
        .max()
        .expect("nonempty")
}

fn strip(v: Vec<(String, ExactMatrix)>) -> Vec<ExactMatrix> {
    v.into_iter().map(|(_, m)| m).collect()
}

pub fn all_cases() -> Vec<PositionCase> {
    use LengthCase::*;
    let mut v = vec![PositionCase::Interior];
    for c in [Minus1, Equal, Plus1] {
        v.push(PositionCase::Last(c));
        v.push(PositionCase::Dollar1(c));
    }
    for dec in [Decision::Accept, Decision::Reject, Decision::Continue] {
        v.push(PositionCase::Dollar2(dec));
    }
    v
}
