use std::collections::{HashMap, VecDeque};

use machines::{
    initial_config, next_config, next_configs, Configuration, MachineError, MachineKind, MachineSpec, StateLabel,
};

/// Classical alternating evaluation of an ATM on one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtmEval {
    pub accepts: bool,
    /// For each reachable existential configuration, a branch that accepts
    /// when one exists, else branch 0.
    pub strategy: HashMap<Configuration, usize>,
    /// Longest step count from the initial configuration to a halting one,
    /// when the reachable graph is acyclic.
    pub depth: Option<usize>,
}

/// Least fixed point of the AND/OR equations over the reachable
/// configurations; steps that fail count as rejecting.
pub fn classical_eval(spec: &MachineSpec, x: &str) -> Result<AtmEval, MachineError> {
    if spec.kind() != MachineKind::Atm {
        return Err(MachineError::InvalidSpec("alternating machine expected".into()));
    }
    let root = initial_config(spec, x)?;
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut nodes: Vec<Configuration> = Vec::new();
    let mut kids: Vec<Option<Vec<usize>>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(root.clone(), 0);
    nodes.push(root);
    kids.push(None);
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        let c = nodes[i].clone();
        if c.is_halting(spec) {
            continue;
        }
        let Ok(next) = next_configs(spec, &c) else {
            continue;
        };
        let mut ks = Vec::new();
        for n in next {
            let j = *index.entry(n.clone()).or_insert_with(|| {
                nodes.push(n);
                kids.push(None);
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            ks.push(j);
        }
        kids[i] = Some(ks);
    }
    let mut val = vec![false; nodes.len()];
    for (i, c) in nodes.iter().enumerate() {
        val[i] = c.is_accepting(spec);
    }
    let label = |c: &Configuration| c.state(spec).and_then(|q| spec.label(q));
    loop {
        let mut changed = false;
        for i in 0..nodes.len() {
            if val[i] {
                continue;
            }
            let Some(ks) = &kids[i] else { continue };
            let v = match label(&nodes[i]) {
                Some(StateLabel::Existential) => ks.iter().any(|&k| val[k]),
                _ => ks.iter().all(|&k| val[k]),
            };
            if v {
                val[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut strategy = HashMap::new();
    for (i, c) in nodes.iter().enumerate() {
        if let (Some(StateLabel::Existential), Some(ks)) = (label(c), &kids[i]) {
            strategy.insert(c.clone(), ks.iter().position(|&k| val[k]).unwrap_or(0));
        }
    }
    Ok(AtmEval {
        accepts: val[0],
        strategy,
        depth: longest_path(&kids),
    })
}

fn longest_path(kids: &[Option<Vec<usize>>]) -> Option<usize> {
    // 0 = unvisited, 1 = on stack, 2 = done.
    fn go(i: usize, kids: &[Option<Vec<usize>>], mark: &mut [u8], memo: &mut [usize]) -> Option<usize> {
        match mark[i] {
            1 => return None,
            2 => return Some(memo[i]),
            _ => {}
        }
        mark[i] = 1;
        let mut best = 0;
        if let Some(ks) = &kids[i] {
            for &k in ks {
                best = best.max(go(k, kids, mark, memo)? + 1);
            }
        }
        mark[i] = 2;
        memo[i] = best;
        Some(best)
    }
    let mut mark = vec![0u8; kids.len()];
    let mut memo = vec![0usize; kids.len()];
    go(0, kids, &mut mark, &mut memo)
}

/// The honest computation `c₁, …, c_t` of a DTM, where `next(c_t)` halts,
/// or `None` if it does not halt within `max_steps`.
pub fn dtm_computation(
    spec: &MachineSpec,
    x: &str,
    max_steps: usize,
) -> Result<Option<Vec<Configuration>>, MachineError> {
    let mut c = initial_config(spec, x)?;
    let mut out = Vec::new();
    for _ in 0..max_steps {
        let n = next_config(spec, &c)?;
        out.push(c);
        if n.is_halting(spec) {
            return Ok(Some(out));
        }
        c = n;
    }
    Ok(None)
}

/// Length of the honest transcript: every block is `c $ $`, preceded by a
/// branch symbol for alternating machines.
pub fn honest_transcript_len(spec: &MachineSpec, x: &str) -> Option<usize> {
    match spec.kind() {
        MachineKind::Dtm => {
            let cs = dtm_computation(spec, x, 10_000).ok()??;
            Some(cs.iter().map(|c| c.len() + 2).sum())
        }
        MachineKind::Atm => {
            let depth = classical_eval(spec, x).ok()?.depth?;
            Some(depth.max(1) * (x.chars().count() + 6))
        }
    }
}
