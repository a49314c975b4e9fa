use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::{qstep, Child, Move, QConfig, QError, QMachine};

/// A finite accepting subtree: one branch at each existential node, every
/// surviving outcome at each universal node, accepting leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<C> {
    pub config: QConfig<C>,
    pub step: WitnessStep<C>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessStep<C> {
    Accept,
    Choose { branch: usize, child: Rc<Witness<C>> },
    All(Vec<(String, Rc<Witness<C>>)>),
}

impl<C> Witness<C> {
    pub fn height(&self) -> usize {
        match &self.step {
            WitnessStep::Accept => 0,
            WitnessStep::Choose { child, .. } => 1 + child.height(),
            WitnessStep::All(kids) => 1 + kids.iter().map(|(_, k)| k.height()).max().unwrap_or(0),
        }
    }

    pub fn leaves(&self) -> usize {
        match &self.step {
            WitnessStep::Accept => 1,
            WitnessStep::Choose { child, .. } => child.leaves(),
            WitnessStep::All(kids) => kids.iter().map(|(_, k)| k.leaves()).sum(),
        }
    }

    /// Existential choices along the leftmost path, root first.
    pub fn choices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut w = self;
        loop {
            match &w.step {
                WitnessStep::Accept => return out,
                WitnessStep::Choose { branch, child } => {
                    out.push(*branch);
                    w = child;
                }
                WitnessStep::All(kids) => match kids.iter().find(|(_, k)| !matches!(k.step, WitnessStep::Accept)) {
                    Some((_, k)) => w = k,
                    None => return out,
                },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<C> {
    Accepted(Rc<Witness<C>>),
    /// Neither an accepting subtree nor a rejecting leaf for every strategy
    /// was found within the depth limit.
    NoSubtreeWithinLimit,
    /// Every strategy reaches a rejecting leaf within the depth limit.
    RejectCertificate,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: usize,
    pub memo_hits: usize,
    pub doomed: usize,
    pub limit_hits: usize,
}

#[derive(Debug, Clone)]
pub struct SearchReport<C> {
    pub outcome: SearchOutcome<C>,
    pub depth_limit: usize,
    pub stats: SearchStats,
}

impl<C> SearchReport<C> {
    pub fn accepted(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Accepted(_))
    }

    pub fn witness(&self) -> Option<&Rc<Witness<C>>> {
        match &self.outcome {
            SearchOutcome::Accepted(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone)]
enum Val<C> {
    Accept(Rc<Witness<C>>),
    Reject,
    Open,
}

/// Best value found per configuration, with the budget it was found at.
type Memo<C> = HashMap<QConfig<C>, (usize, Val<C>)>;

struct Search<'m, M: QMachine> {
    machine: &'m M,
    memo: Memo<M::Classical>,
    certified: bool,
    stats: SearchStats,
}

impl<M: QMachine> Search<'_, M> {
    fn visit(&mut self, qc: &QConfig<M::Classical>, budget: usize) -> Result<Val<M::Classical>, QError> {
        match self.machine.rule(&qc.classical)? {
            Move::Accept => {
                return Ok(Val::Accept(Rc::new(Witness {
                    config: qc.clone(),
                    step: WitnessStep::Accept,
                })))
            }
            Move::Reject => return Ok(Val::Reject),
            _ => {}
        }
        if let Some((b, v)) = self.memo.get(qc) {
            // Accept and Reject survive a larger budget, Open a smaller one.
            let reusable = match v {
                Val::Open => *b >= budget,
                _ => *b <= budget,
            };
            if reusable {
                self.stats.memo_hits += 1;
                return Ok(v.clone());
            }
        }
        self.stats.nodes += 1;
        let v = if budget == 0 {
            self.stats.limit_hits += 1;
            Val::Open
        } else if self.machine.doomed(qc) {
            // On a machine certified to halt, no accepting subtree means a
            // rejecting leaf under every strategy.
            self.stats.doomed += 1;
            if self.certified {
                Val::Reject
            } else {
                Val::Open
            }
        } else {
            let existential = matches!(self.machine.rule(&qc.classical)?, Move::Existential(_));
            let kids = qstep(self.machine, qc)?;
            if existential {
                self.any(qc, kids, budget - 1)?
            } else {
                self.all(qc, kids, budget - 1)?
            }
        };
        self.memo.insert(qc.clone(), (budget, v.clone()));
        Ok(v)
    }

    fn any(
        &mut self,
        qc: &QConfig<M::Classical>,
        kids: Vec<Child<M::Classical>>,
        budget: usize,
    ) -> Result<Val<M::Classical>, QError> {
        let mut open = false;
        for (branch, k) in kids.into_iter().enumerate() {
            match self.visit(&k.config, budget)? {
                Val::Accept(child) => {
                    let step = WitnessStep::Choose { branch, child };
                    return Ok(Val::Accept(Rc::new(Witness {
                        config: qc.clone(),
                        step,
                    })));
                }
                Val::Open => open = true,
                Val::Reject => {}
            }
        }
        Ok(if open { Val::Open } else { Val::Reject })
    }

    fn all(
        &mut self,
        qc: &QConfig<M::Classical>,
        kids: Vec<Child<M::Classical>>,
        budget: usize,
    ) -> Result<Val<M::Classical>, QError> {
        let mut open = false;
        let mut accepted = Vec::with_capacity(kids.len());
        for k in kids {
            match self.visit(&k.config, budget)? {
                Val::Reject => return Ok(Val::Reject),
                Val::Open => open = true,
                Val::Accept(w) if !open => accepted.push((k.label, w)),
                Val::Accept(_) => {}
            }
        }
        Ok(if open {
            Val::Open
        } else {
            Val::Accept(Rc::new(Witness {
                config: qc.clone(),
                step: WitnessStep::All(accepted),
            }))
        })
    }
}

/// Memoized AND-OR search over at most `depth_limit` steps.
pub fn accepting_subtree_search<M: QMachine>(
    machine: &M,
    depth_limit: usize,
) -> Result<SearchReport<M::Classical>, QError> {
    let certified = machine.halting_depth().is_some();
    let mut s = Search {
        machine,
        memo: HashMap::new(),
        certified,
        stats: SearchStats::default(),
    };
    let root = machine.initial();
    let outcome = match s.visit(&root, depth_limit)? {
        Val::Accept(w) => SearchOutcome::Accepted(w),
        Val::Reject => SearchOutcome::RejectCertificate,
        Val::Open => SearchOutcome::NoSubtreeWithinLimit,
    };
    Ok(SearchReport {
        outcome,
        depth_limit,
        stats: s.stats,
    })
}

/// Replays a witness from the machine's initial configuration: every step is
/// recomputed and every leaf must accept. Returns the number of leaves.
pub fn verify_witness<M: QMachine>(machine: &M, w: &Witness<M::Classical>) -> Result<usize, String> {
    if w.config != machine.initial() {
        return Err("witness does not start at the initial configuration".into());
    }
    check(machine, w, &mut HashSet::new())
}

fn check<M: QMachine>(
    machine: &M,
    w: &Witness<M::Classical>,
    done: &mut HashSet<*const Witness<M::Classical>>,
) -> Result<usize, String> {
    let rule = machine.rule(&w.config.classical).map_err(|e| e.to_string())?;
    let leaves = match (&w.step, rule) {
        (WitnessStep::Accept, Move::Accept) => 1,
        (WitnessStep::Accept, _) => return Err(format!("leaf {:?} does not accept", w.config.classical)),
        (WitnessStep::Choose { branch, child }, Move::Existential(_)) => {
            let kids = qstep(machine, &w.config).map_err(|e| e.to_string())?;
            let k = kids.get(*branch).ok_or("branch index out of range")?;
            if k.config != child.config {
                return Err(format!("branch {branch} leads elsewhere"));
            }
            sub(machine, child, done)?
        }
        (WitnessStep::All(listed), Move::Universal(_)) => {
            let kids = qstep(machine, &w.config).map_err(|e| e.to_string())?;
            if kids.len() != listed.len() {
                return Err(format!(
                    "{} surviving outcomes, {} in the witness",
                    kids.len(),
                    listed.len()
                ));
            }
            let mut n = 0;
            for (k, (label, child)) in kids.iter().zip(listed) {
                if &k.label != label || k.config != child.config {
                    return Err(format!("outcome `{label}` does not match"));
                }
                n += sub(machine, child, done)?;
            }
            n
        }
        (step, _) => {
            return Err(format!(
                "witness step {} does not fit the configuration",
                step_name(step)
            ))
        }
    };
    Ok(leaves)
}

fn sub<M: QMachine>(
    machine: &M,
    w: &Rc<Witness<M::Classical>>,
    done: &mut HashSet<*const Witness<M::Classical>>,
) -> Result<usize, String> {
    if done.contains(&Rc::as_ptr(w)) {
        return Ok(w.leaves());
    }
    let n = check(machine, w, done)?;
    done.insert(Rc::as_ptr(w));
    Ok(n)
}

fn step_name<C>(s: &WitnessStep<C>) -> &'static str {
    match s {
        WitnessStep::Accept => "accept",
        WitnessStep::Choose { .. } => "choose",
        WitnessStep::All(_) => "all",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongVerdict {
    Accept,
    Reject,
}

/// Decides a machine that halts on every path within its certified depth:
/// accept iff some strategy's subtree has no rejecting leaf.
pub fn strong_eval<M: QMachine>(machine: &M) -> Result<StrongVerdict, QError> {
    let depth = machine.halting_depth().ok_or(QError::NotCertified)?;
    let rep = accepting_subtree_search(machine, depth)?;
    if rep.stats.limit_hits > 0 {
        return Err(QError::Invalid(format!(
            "a path is longer than the certified {depth} steps"
        )));
    }
    Ok(if rep.accepted() {
        StrongVerdict::Accept
    } else {
        StrongVerdict::Reject
    })
}

/// One step of a root path, as a strategy sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathStep {
    Chose(usize),
    Outcome(String),
}

/// Leaves of the subtree that one strategy selects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SubtreeSummary {
    pub accept_leaves: usize,
    pub reject_leaves: usize,
    /// Paths still running at the depth limit.
    pub cut: usize,
    pub nodes: usize,
}

impl SubtreeSummary {
    pub fn is_finite(&self) -> bool {
        self.cut == 0
    }

    pub fn is_accepting(&self) -> bool {
        self.is_finite() && self.reject_leaves == 0
    }
}

/// Picks a branch index at an existential node from the path so far.
pub type Strategy<'s, C> = dyn FnMut(&[PathStep], &QConfig<C>) -> usize + 's;

/// Expands the subtree of a strategy: the strategy picks a branch index at
/// each existential node, given the path from the root.
pub fn follow_strategy<M: QMachine>(
    machine: &M,
    strategy: &mut Strategy<'_, M::Classical>,
    depth_limit: usize,
) -> Result<SubtreeSummary, QError> {
    let mut sum = SubtreeSummary::default();
    let mut stack = vec![(machine.initial(), Vec::<PathStep>::new())];
    while let Some((qc, path)) = stack.pop() {
        sum.nodes += 1;
        match machine.rule(&qc.classical)? {
            Move::Accept => sum.accept_leaves += 1,
            Move::Reject => sum.reject_leaves += 1,
            _ if path.len() >= depth_limit => sum.cut += 1,
            Move::Existential(_) => {
                let b = strategy(&path, &qc);
                let mut kids = qstep(machine, &qc)?;
                if b >= kids.len() {
                    return Err(QError::Invalid(format!("strategy chose branch {b} of {}", kids.len())));
                }
                let mut p = path;
                p.push(PathStep::Chose(b));
                stack.push((kids.swap_remove(b).config, p));
            }
            Move::Universal(_) => {
                for k in qstep(machine, &qc)?.into_iter().rev() {
                    let mut p = path.clone();
                    p.push(PathStep::Outcome(k.label));
                    stack.push((k.config, p));
                }
            }
        }
    }
    Ok(sum)
}
