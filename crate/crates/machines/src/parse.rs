use crate::spec::{MachineKind, MachineSpec, Move, RawSpec, StateLabel, BLANK, CENT};
use crate::ParseError;

/// One `key: value` line of a machine file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits a file into directives, skipping blank lines and `//` comments.
pub fn directives(text: &str) -> Result<Vec<Directive>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| ParseError {
            line: i + 1,
            message: format!("expected `key: value`, found `{line}`"),
        })?;
        out.push(Directive {
            line: i + 1,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// File spelling to internal symbol name: `_` is the blank, `cent` the endmarker.
pub fn symbol_token(tok: &str) -> String {
    match tok {
        "_" => BLANK.to_string(),
        "cent" => CENT.to_string(),
        other => other.to_string(),
    }
}

pub fn parse_machine(text: &str) -> Result<MachineSpec, ParseError> {
    let mut kind = None;
    let mut raw = RawSpec {
        kind: MachineKind::Dtm,
        states: vec![],
        tape: vec![],
        input: vec![],
        start: String::new(),
        accept: String::new(),
        reject: String::new(),
        labels: vec![],
        delta: vec![],
    };
    let mut last_line = 0;
    for d in directives(text)? {
        last_line = d.line;
        let err = |m: String| ParseError {
            line: d.line,
            message: m,
        };
        let toks = || d.value.split_whitespace().map(symbol_token).collect::<Vec<_>>();
        match d.key.as_str() {
            "type" => {
                kind = Some(match d.value.to_ascii_uppercase().as_str() {
                    "DTM" => MachineKind::Dtm,
                    "ATM" => MachineKind::Atm,
                    v => return Err(err(format!("unknown machine type `{v}`"))),
                })
            }
            "states" => raw.states = toks(),
            "tape_alphabet" => raw.tape = toks(),
            "input_alphabet" => raw.input = toks(),
            "start" => raw.start = d.value.clone(),
            "accept" => raw.accept = d.value.clone(),
            "reject" => raw.reject = d.value.clone(),
            "labels" => {
                let t = toks();
                if t.len() % 2 != 0 {
                    return Err(err("labels come in `state E|U|D` pairs".into()));
                }
                for pair in t.chunks(2) {
                    let l = match pair[1].as_str() {
                        "E" => StateLabel::Existential,
                        "U" => StateLabel::Universal,
                        "D" => StateLabel::Deterministic,
                        o => return Err(err(format!("unknown label `{o}`"))),
                    };
                    raw.labels.push((pair[0].clone(), l));
                }
            }
            "delta" | "branch" => {
                let (lhs, rhs) = d.value.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
                let l: Vec<String> = lhs.split_whitespace().map(symbol_token).collect();
                if l.len() != 2 {
                    return Err(err("left side must be `state symbol`".into()));
                }
                let rhs = rhs.trim();
                let alts: Vec<&str> = if d.key == "branch" {
                    let inner = rhs
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| err("branch targets must be parenthesized".into()))?;
                    inner.split('|').collect()
                } else {
                    vec![rhs]
                };
                let mut outs = Vec::new();
                for alt in alts {
                    let t: Vec<String> = alt.split_whitespace().map(symbol_token).collect();
                    if t.len() != 3 {
                        return Err(err(format!("target `{}` must be `state symbol L|R`", alt.trim())));
                    }
                    let mv = match t[2].as_str() {
                        "L" => Move::L,
                        "R" => Move::R,
                        o => return Err(err(format!("unknown move `{o}`"))),
                    };
                    outs.push((t[0].clone(), t[1].clone(), mv));
                }
                raw.delta.push((l[0].clone(), l[1].clone(), outs));
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    raw.kind = kind.ok_or(ParseError {
        line: last_line,
        message: "missing `type:`".into(),
    })?;
    MachineSpec::from_raw(raw).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}
