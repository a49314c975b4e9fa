use exact_linalg::ExactScalar;
use num_traits::{One, Zero};

use crate::ledger::Ledger;
use crate::prover::{Observed, Prover, ProverView};
use crate::scaled::{Mass, Register};
use crate::verifier::{PSym, Side, VState, VStep, Verdict, Verifier};

/// One processed transcript symbol on a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub symbol: String,
    pub op: String,
    /// Mass of each element outcome, in element order.
    pub outcomes: Vec<(String, Mass)>,
    pub restart: Mass,
    /// The register on this path after the symbol.
    pub register: Register,
    /// Branch exchanges so far at which q₅ was halved.
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathEnd {
    Accepted,
    Rejected,
    /// A deterministic check failed.
    CheckFailed,
    Truncated,
}

/// One root-to-leaf path through the coin outcomes of a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathReport {
    pub coins: Vec<Side>,
    pub entries: Vec<TraceEntry>,
    pub end: PathEnd,
    pub accept_mass: Mass,
    pub reject_mass: Mass,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundReport {
    pub ledger: Ledger,
    pub start_restart: ExactScalar,
    pub paths: Vec<PathReport>,
}

struct Frame {
    st: VState,
    reg: Register,
    sent: Vec<PSym>,
    observed: Vec<Observed>,
    path: PathReport,
    halvings: usize,
}

/// Runs one round against `prover`, following every coin outcome with
/// nonzero mass. The weak protocol has a single path.
pub fn run_round(v: &Verifier<'_>, prover: &dyn Prover, round: usize) -> RoundReport {
    let spec = v.spec();
    let horizon = v.config().max_transcript;
    let d = v.config().d;
    let (reg, restart0) = v.start_register();
    let reg = Register::from_exact(&reg, d);
    let mut acc = Mass::zero(d);
    let mut rej = Mass::zero(d);
    let mut restart = Mass::zero(d);
    let mut pending = Mass::zero(d);
    let mut paths = Vec::new();
    let mut stack = vec![Frame {
        st: v.start_state(),
        reg,
        sent: vec![],
        observed: vec![],
        path: PathReport {
            coins: vec![],
            entries: vec![],
            end: PathEnd::Truncated,
            accept_mass: Mass::zero(d),
            reject_mass: Mass::zero(d),
            reason: None,
        },
        halvings: 0,
    }];
    while let Some(mut f) = stack.pop() {
        if f.sent.len() >= horizon {
            pending.add(&f.reg.norm_sq());
            f.path.end = PathEnd::Truncated;
            paths.push(f.path);
            continue;
        }
        let sym = prover.next_symbol(&ProverView {
            round,
            sent: &f.sent,
            observed: &f.observed,
        });
        let halved = v.halves_at(&f.st) && matches!(sym, PSym::Left | PSym::Right);
        match v.step(&f.st, sym) {
            VStep::Reject(reason) => {
                let m = f.reg.norm_sq();
                rej.add(&m);
                f.path.reject_mass.add(&m);
                f.path.end = PathEnd::CheckFailed;
                f.path.reason = Some(reason);
                paths.push(f.path);
            }
            VStep::Apply {
                name,
                elements,
                verdicts,
            } => {
                let (outs, restart_mass) = f.reg.apply_scaled(&elements);
                restart.add(&restart_mass);
                let labels: Vec<String> = elements.into_iter().map(|(l, _)| l).collect();
                let masses: Vec<(String, Mass)> = labels
                    .iter()
                    .zip(&outs)
                    .map(|(l, v)| (l.clone(), v.norm_sq()))
                    .collect();
                let mut terminal_accept = Mass::zero(d);
                let mut terminal_reject = Mass::zero(d);
                let mut children = Vec::new();
                for ((label, vec), verdict) in labels.into_iter().zip(outs).zip(verdicts) {
                    let m = vec.norm_sq();
                    match verdict {
                        Verdict::Accept => terminal_accept.add(&m),
                        Verdict::Reject => terminal_reject.add(&m),
                        Verdict::Continue(st) => {
                            if !m.is_zero() {
                                children.push((label, vec, st));
                            }
                        }
                    }
                }
                acc.add(&terminal_accept);
                rej.add(&terminal_reject);
                let mut base = f.path;
                base.accept_mass.add(&terminal_accept);
                base.reject_mass.add(&terminal_reject);
                let halvings = f.halvings + usize::from(halved);
                let rendered = sym.render(spec);
                if children.is_empty() {
                    base.entries.push(TraceEntry {
                        symbol: rendered,
                        op: name.to_string(),
                        outcomes: masses,
                        restart: restart_mass,
                        register: Register::zeros(f.reg.dim(), d),
                        halvings,
                    });
                    base.end = if base.accept_mass.is_zero() {
                        PathEnd::Rejected
                    } else {
                        PathEnd::Accepted
                    };
                    paths.push(base);
                    continue;
                }
                for (label, vec, st) in children.into_iter().rev() {
                    let mut path = base.clone();
                    let mut observed = f.observed.clone();
                    let obs = match label.as_str() {
                        "l" => Observed::Coin(Side::L),
                        "r" => Observed::Coin(Side::R),
                        "continue" => Observed::Continue,
                        _ => Observed::Main,
                    };
                    if let Observed::Coin(c) = obs {
                        path.coins.push(c);
                    }
                    observed.push(obs);
                    path.entries.push(TraceEntry {
                        symbol: rendered.clone(),
                        op: name.to_string(),
                        outcomes: masses.clone(),
                        restart: restart_mass.clone(),
                        register: vec.clone(),
                        halvings,
                    });
                    let mut sent = f.sent.clone();
                    sent.push(sym);
                    stack.push(Frame {
                        st,
                        reg: vec,
                        sent,
                        observed,
                        path,
                        halvings,
                    });
                }
            }
        }
    }
    paths.sort_by(|a, b| a.coins.cmp(&b.coins));
    restart.add(&Mass::from_exact(&restart0, d));
    let ledger = Ledger {
        p_accept: acc.to_exact(),
        p_reject: rej.to_exact(),
        p_restart: restart.to_exact(),
        p_pending: pending.to_exact(),
    };
    RoundReport {
        ledger,
        start_restart: restart0,
        paths,
    }
}

/// How the overall acceptance probability is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Exact(ExactScalar),
    Bounds {
        lo: ExactScalar,
        hi: ExactScalar,
    },
    /// No accept or reject mass within the horizon.
    NeverHalts {
        pending: ExactScalar,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolOutcome {
    pub classification: Classification,
    pub first_round: RoundReport,
    pub rounds: usize,
}

/// Rounds iterated for provers that change behavior between rounds.
pub const ADAPTIVE_ROUNDS: usize = 64;

/// Overall acceptance over the restart loop.
pub fn run_protocol(v: &Verifier<'_>, prover: &dyn Prover, rounds: usize) -> ProtocolOutcome {
    let first = run_round(v, prover, 0);
    if prover.round_stationary() {
        let l = &first.ledger;
        let decided = &l.p_accept + &l.p_reject;
        let classification = if decided.is_zero() {
            Classification::NeverHalts {
                pending: l.p_pending.clone(),
            }
        } else if l.p_pending.is_zero() {
            Classification::Exact(&l.p_accept / &decided)
        } else {
            let live = ExactScalar::one() - &l.p_restart;
            let lo = &l.p_accept / &live;
            let all_accept = (&l.p_accept + &l.p_pending) / &live;
            let all_restart = &l.p_accept / &decided;
            let hi = all_accept.max(all_restart).min(ExactScalar::one());
            Classification::Bounds { lo, hi }
        };
        return ProtocolOutcome {
            classification,
            first_round: first,
            rounds: 1,
        };
    }
    let mut alive = ExactScalar::one();
    let mut lo = ExactScalar::zero();
    let mut pending = ExactScalar::zero();
    let mut rejected = ExactScalar::zero();
    for r in 0..rounds.max(1) {
        let rep = if r == 0 { first.clone() } else { run_round(v, prover, r) };
        let l = &rep.ledger;
        lo += &alive * &l.p_accept;
        rejected += &alive * &l.p_reject;
        pending += &alive * &l.p_pending;
        alive = &alive * &l.p_restart;
    }
    let classification = if lo.is_zero() && rejected.is_zero() {
        Classification::NeverHalts { pending }
    } else {
        let hi = (&lo + &pending + &alive).min(ExactScalar::one());
        Classification::Bounds { lo, hi }
    };
    ProtocolOutcome {
        classification,
        first_round: first,
        rounds: rounds.max(1),
    }
}
