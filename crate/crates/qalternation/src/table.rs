//! Table-driven one-way alternating automata with a register, read from the
//! machine file format plus `superop:` lines.
//!
//! ```text
//! type: Q1AFA
//! states: s u acc rej
//! input_alphabet: a b
//! start: s
//! accept: acc
//! reject: rej
//! labels: s E u U
//! dim: 2
//! init: 1 0
//! branch: s cent -> (u R)
//! branch: u a -> (acc R | rej S)
//! superop: u a -> [1/2 0; 0 1/2] [1/2 0; 0 1/2]
//! ```
//!
//! The tape is `cent x end`. A move is `R` (one cell right) or `S` (stay);
//! `end` only allows `S`. A universal transition lists exactly one operation
//! element per branch. The elements may lose mass, since registers are kept
//! unnormalized, but no nonzero register may lose all of it.

use std::collections::{HashMap, HashSet, VecDeque};

use exact_linalg::{gram_sum, parse_scalar, ExactMatrix, ExactScalar, ExactVector, RestartMode, Superoperator};
use halting_bound::{density_halting_index, NonhaltingSystem};
use num_traits::Zero;

use crate::{Element, Move, Outcome, QConfig, QError, QMachine};

const END: &str = "end";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Existential,
    Universal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMachine {
    states: Vec<String>,
    kinds: Vec<Option<Kind>>,
    /// `cent`, the input letters, `end`.
    symbols: Vec<String>,
    start: usize,
    accept: usize,
    reject: usize,
    dim: usize,
    init: ExactVector,
    delta: HashMap<(usize, usize), Vec<(usize, bool)>>,
    superops: HashMap<(usize, usize), Vec<ExactMatrix>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableConfig {
    pub state: usize,
    pub head: usize,
}

fn perr(line: usize, message: impl Into<String>) -> QError {
    QError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_matrices(line: usize, text: &str) -> Result<Vec<ExactMatrix>, QError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('[')
            .ok_or_else(|| perr(line, format!("expected `[` at `{rest}`")))?;
        let close = body.find(']').ok_or_else(|| perr(line, "unclosed `[`"))?;
        let rows = body[..close]
            .split(';')
            .map(|r| r.split_whitespace().map(parse_scalar).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        out.push(ExactMatrix::from_rows(rows)?);
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

impl TableMachine {
    pub fn parse(text: &str) -> Result<Self, QError> {
        let ds = machines::directives(text).map_err(|e| perr(e.line, e.message))?;
        let mut get = HashMap::new();
        let mut branches = Vec::new();
        let mut superops = Vec::new();
        for d in &ds {
            match d.key.as_str() {
                "branch" => branches.push(d),
                "superop" => superops.push(d),
                "type" | "states" | "input_alphabet" | "start" | "accept" | "reject" | "labels" | "dim" | "init" => {
                    if get.insert(d.key.as_str(), d).is_some() {
                        return Err(perr(d.line, format!("`{}` given twice", d.key)));
                    }
                }
                other => return Err(perr(d.line, format!("unknown key `{other}`"))),
            }
        }
        let last = ds.last().map_or(0, |d| d.line);
        let need = |k: &str| get.get(k).copied().ok_or_else(|| perr(last, format!("missing `{k}`")));

        let ty = need("type")?;
        if ty.value != "Q1AFA" {
            return Err(perr(ty.line, format!("expected type Q1AFA, found `{}`", ty.value)));
        }
        let states: Vec<String> = need("states")?.value.split_whitespace().map(str::to_string).collect();
        let state = |line: usize, name: &str| {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| perr(line, format!("unknown state `{name}`")))
        };
        let mut symbols = vec!["cent".to_string()];
        let alpha = need("input_alphabet")?;
        for a in alpha.value.split_whitespace() {
            if a == "cent" || a == END || symbols.iter().any(|s| s == a) {
                return Err(perr(alpha.line, format!("bad input letter `{a}`")));
            }
            symbols.push(a.to_string());
        }
        symbols.push(END.to_string());
        let symbol = |line: usize, name: &str| {
            symbols
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| perr(line, format!("unknown symbol `{name}`")))
        };
        let one = |k: &str| need(k).and_then(|d| state(d.line, &d.value));
        let (start, accept, reject) = (one("start")?, one("accept")?, one("reject")?);
        if accept == reject {
            return Err(perr(need("reject")?.line, "accept and reject coincide"));
        }

        let mut kinds = vec![None; states.len()];
        let labels = need("labels")?;
        let toks: Vec<&str> = labels.value.split_whitespace().collect();
        if !toks.len().is_multiple_of(2) {
            return Err(perr(labels.line, "labels come in `state E|U` pairs"));
        }
        for pair in toks.chunks(2) {
            let q = state(labels.line, pair[0])?;
            kinds[q] = Some(match pair[1] {
                "E" => Kind::Existential,
                "U" => Kind::Universal,
                l => return Err(perr(labels.line, format!("unknown label `{l}`"))),
            });
        }
        for (q, k) in kinds.iter().enumerate() {
            let halting = q == accept || q == reject;
            if halting == k.is_some() {
                return Err(perr(
                    labels.line,
                    format!("state `{}` needs a label iff it is not halting", states[q]),
                ));
            }
        }

        let dim_d = need("dim")?;
        let dim: usize = dim_d
            .value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| perr(dim_d.line, "bad dim"))?;
        let init_d = need("init")?;
        let init = ExactVector::new(
            init_d
                .value
                .split_whitespace()
                .map(parse_scalar)
                .collect::<Result<Vec<_>, _>>()?,
        );
        if init.dim() != dim || init.is_zero() {
            return Err(perr(
                init_d.line,
                format!("init must be a nonzero vector of {dim} entries"),
            ));
        }

        fn split(d: &machines::Directive) -> Result<(&str, &str), QError> {
            let (l, r) = d
                .value
                .split_once("->")
                .ok_or_else(|| perr(d.line, "expected `q a -> ...`"))?;
            Ok((l, r.trim()))
        }
        let lhs = |d: &machines::Directive| -> Result<(usize, usize), QError> {
            let l = split(d)?.0;
            let l: Vec<&str> = l.split_whitespace().collect();
            let [q, a] = l[..] else {
                return Err(perr(d.line, "expected a state and a symbol"));
            };
            let q = state(d.line, q)?;
            if kinds[q].is_none() {
                return Err(perr(d.line, "transition out of a halting state"));
            }
            Ok((q, symbol(d.line, a)?))
        };
        let mut delta = HashMap::new();
        for d in branches {
            let (key, r) = (lhs(d)?, split(d)?.1);
            let inner = r
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| perr(d.line, "branches go in parentheses"))?;
            let mut list = Vec::new();
            for b in inner.split('|') {
                let t: Vec<&str> = b.split_whitespace().collect();
                let [q, mv] = t[..] else {
                    return Err(perr(d.line, format!("bad branch `{}`", b.trim())));
                };
                let advance = match mv {
                    "R" if key.1 == symbols.len() - 1 => return Err(perr(d.line, "cannot move right of `end`")),
                    "R" => true,
                    "S" => false,
                    m => return Err(perr(d.line, format!("unknown move `{m}`"))),
                };
                list.push((state(d.line, q)?, advance));
            }
            if delta.insert(key, list).is_some() {
                return Err(perr(d.line, "transition given twice"));
            }
        }
        let mut ops = HashMap::new();
        for d in superops {
            let (key, r) = (lhs(d)?, split(d)?.1);
            if kinds[key.0] != Some(Kind::Universal) {
                return Err(perr(d.line, "superop on an existential state"));
            }
            let ms = parse_matrices(d.line, r)?;
            let Some(bs) = delta.get(&key) else {
                return Err(perr(d.line, "superop without a branch line"));
            };
            if ms.len() != bs.len() {
                return Err(QError::BranchMismatch {
                    elements: ms.len(),
                    branches: bs.len(),
                });
            }
            if ms.iter().any(|m| m.rows() != dim || m.cols() != dim) {
                return Err(perr(d.line, format!("operation elements must be {dim}x{dim}")));
            }
            let named = ms.iter().enumerate().map(|(i, m)| (i.to_string(), m.clone())).collect();
            Superoperator::new(named, RestartMode::ImplicitRestart)?
                .validate()
                .map_err(|e| perr(d.line, e))?;
            if gram_sum(&ms)?.determinant()?.is_zero() {
                return Err(perr(d.line, "some register would have no outcome"));
            }
            if ops.insert(key, ms).is_some() {
                return Err(perr(d.line, "superop given twice"));
            }
        }
        for (key, _) in delta.iter().filter(|(k, _)| kinds[k.0] == Some(Kind::Universal)) {
            if !ops.contains_key(key) {
                return Err(perr(
                    last,
                    format!(
                        "universal transition on ({}, {}) has no superop",
                        states[key.0], symbols[key.1]
                    ),
                ));
            }
        }
        Ok(TableMachine {
            states,
            kinds,
            symbols,
            start,
            accept,
            reject,
            dim,
            init,
            delta,
            superops: ops,
        })
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The machine started on `x`, with letters separated by whitespace when
    /// any letter is longer than one character.
    pub fn on_input(&self, x: &str) -> Result<TableRun<'_>, QError> {
        let letters: Vec<String> = if self.symbols[1..self.symbols.len() - 1]
            .iter()
            .all(|s| s.chars().count() == 1)
        {
            x.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
        } else {
            x.split_whitespace().map(String::from).collect()
        };
        let mut tape = vec![0];
        for l in letters {
            let a = self.symbols[1..self.symbols.len() - 1]
                .iter()
                .position(|s| *s == l)
                .ok_or_else(|| QError::Invalid(format!("`{l}` is not an input letter")))?;
            tape.push(a + 1);
        }
        tape.push(self.symbols.len() - 1);
        Ok(TableRun {
            machine: self,
            tape,
            certified: None,
        })
    }
}

/// A [`TableMachine`] on a fixed input.
#[derive(Debug, Clone)]
pub struct TableRun<'a> {
    machine: &'a TableMachine,
    tape: Vec<usize>,
    certified: Option<usize>,
}

impl TableRun<'_> {
    pub fn machine(&self) -> &TableMachine {
        self.machine
    }

    fn branches(&self, c: TableConfig) -> Result<&[(usize, bool)], QError> {
        let m = self.machine;
        m.delta
            .get(&(c.state, self.tape[c.head]))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                QError::Invalid(format!(
                    "no transition on ({}, {})",
                    m.states[c.state], m.symbols[self.tape[c.head]]
                ))
            })
    }

    fn next(&self, c: TableConfig, (q, advance): (usize, bool)) -> TableConfig {
        TableConfig {
            state: q,
            head: c.head + usize::from(advance),
        }
    }

    fn halting(&self, c: TableConfig) -> bool {
        c.state == self.machine.accept || c.state == self.machine.reject
    }

    /// Checks that every path halts, by running the nonhalting part of the
    /// classical-times-register density matrix until it vanishes. Its
    /// dimension N is the number of reachable nonhalting configurations times
    /// the register size, and a density still nonzero after N² steps never
    /// vanishes. On success [`QMachine::halting_depth`] reports the step
    /// count.
    pub fn certify(&mut self) -> Result<Option<usize>, QError> {
        let m = self.machine;
        let start = TableConfig {
            state: m.start,
            head: 0,
        };
        let mut index = HashMap::new();
        let mut order = Vec::new();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            if self.halting(c) {
                continue;
            }
            index.insert(c, order.len());
            order.push(c);
            for &b in self.branches(c)? {
                let n = self.next(c, b);
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        if order.is_empty() {
            self.certified = Some(0);
            return Ok(self.certified);
        }
        let (k, n) = (m.dim, order.len() * m.dim);
        let mut elements = Vec::new();
        for &c in &order {
            let bs = self.branches(c)?;
            let ops: Vec<ExactMatrix> = match m.kinds[c.state] {
                Some(Kind::Universal) => m.superops[&(c.state, self.tape[c.head])].clone(),
                _ => {
                    let w = ExactScalar::new(1.into(), (bs.len() as i64).into());
                    vec![ExactMatrix::identity(k).scale(&w); bs.len()]
                }
            };
            for (&b, op) in bs.iter().zip(ops) {
                let Some(&to) = index.get(&self.next(c, b)) else {
                    continue;
                };
                let mut e = ExactMatrix::zeros(n, n);
                for i in 0..k {
                    for j in 0..k {
                        e.set(to * k + i, index[&c] * k + j, op.get(i, j).clone());
                    }
                }
                elements.push(e);
            }
        }
        let mut psi = ExactVector::zeros(n);
        if let Some(&s) = index.get(&start) {
            for i in 0..k {
                psi.set(s * k + i, m.init.get(i).clone());
            }
        }
        let nu0 = ExactMatrix::outer(&psi, &psi);
        let sys = NonhaltingSystem::new(n, elements, nu0).map_err(|e| QError::Invalid(e.to_string()))?;
        self.certified = density_halting_index(&sys, n * n);
        Ok(self.certified)
    }
}

impl QMachine for TableRun<'_> {
    type Classical = TableConfig;

    fn initial(&self) -> QConfig<TableConfig> {
        QConfig::new(
            TableConfig {
                state: self.machine.start,
                head: 0,
            },
            self.machine.init.clone(),
        )
    }

    fn rule(&self, c: &TableConfig) -> Result<Move<TableConfig>, QError> {
        let m = self.machine;
        if c.state == m.accept {
            return Ok(Move::Accept);
        }
        if c.state == m.reject {
            return Ok(Move::Reject);
        }
        let bs = self.branches(*c)?;
        Ok(match m.kinds[c.state] {
            Some(Kind::Universal) => Move::Universal(
                bs.iter()
                    .zip(&m.superops[&(c.state, self.tape[c.head])])
                    .enumerate()
                    .map(|(i, (&b, e))| Outcome {
                        label: i.to_string(),
                        element: Element::Matrix(e.clone()),
                        next: self.next(*c, b),
                    })
                    .collect(),
            ),
            _ => Move::Existential(bs.iter().map(|&b| self.next(*c, b)).collect()),
        })
    }

    fn halting_depth(&self) -> Option<usize> {
        self.certified
    }
}
