use std::collections::HashSet;

use crate::spec::{MachineKind, MachineSpec, StateLabel};

/// Checks the structural assumptions made for alternating machines. An empty
/// result means the machine is usable by the strong protocol.
pub fn validate_normal_form(spec: &MachineSpec) -> Vec<String> {
    let mut out = Vec::new();
    if spec.kind() != MachineKind::Atm {
        out.push("not an alternating machine".to_string());
        return out;
    }
    let cent = spec.cent().expect("validated");
    let mut cent_overwritten = false;
    let mut cent_written = false;
    for (&(q, a), ts) in spec.delta() {
        for t in ts {
            if a == cent && t.write != cent {
                cent_overwritten = true;
            }
            if a != cent && t.write == cent {
                cent_written = true;
            }
        }
        let want = match spec.label(q) {
            Some(StateLabel::Deterministic) => 1,
            Some(_) => 2,
            None => 0,
        };
        if ts.len() != want {
            out.push(format!(
                "state `{}` on `{}` has {} transitions",
                spec.states()[q],
                spec.tape_alphabet()[a],
                ts.len()
            ));
        }
    }
    if cent_overwritten {
        out.push("cent overwritten".to_string());
    }
    if cent_written {
        out.push("cent written inside the tape".to_string());
    }
    if !alternates(spec) {
        out.push("alternation violated".to_string());
    }
    out
}

/// From every branching state, every path through deterministic states must
/// reach a branching state of the opposite kind or halt.
fn alternates(spec: &MachineSpec) -> bool {
    let n = spec.states().len();
    let mut succ = vec![HashSet::new(); n];
    for (&(q, _), ts) in spec.delta() {
        for t in ts {
            succ[q].insert(t.state);
        }
    }
    for q in 0..n {
        let own = match spec.label(q) {
            Some(l @ (StateLabel::Existential | StateLabel::Universal)) => l,
            _ => continue,
        };
        let mut seen = HashSet::new();
        let mut stack: Vec<usize> = succ[q].iter().copied().collect();
        while let Some(p) = stack.pop() {
            if !seen.insert(p) {
                continue;
            }
            match spec.label(p) {
                Some(StateLabel::Deterministic) => stack.extend(succ[p].iter().copied()),
                Some(l) if l == own => return false,
                _ => {}
            }
        }
    }
    true
}
