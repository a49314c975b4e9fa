use std::collections::BTreeSet;
use std::path::Path;

use exact_linalg::format_scalar;
use halting_bound::{
    density_halting_index, halting_index, kernel_chain, stabilization_index, vectorize, HaltingIndex, NonhaltingSystem,
};
use ips_tree::{build_tree, evaluate_traced, IpsVerifierSpec};
use machines::{parse_machine, MachineKind, MachineSpec};
use qalternation::{
    accepting_subtree_search, atm_block_bound, strong_eval, verify_witness, PConf, ProtocolMachine, QConfig, QError,
    QMachine, SearchOutcome, SearchReport, TableMachine, Witness, WitnessStep,
};
use qam_core::{
    default_max_transcript, make_prover, run_protocol, Classification, PathEnd, ProverKind, RoundReport, Side,
    Verifier, VerifierConfig, ADAPTIVE_ROUNDS,
};
use serde_json::{json, Value};
use subset_sum::{all_selections, overall_acceptance, simulate, SubsetSumInstance};

use crate::report::{dump, input, internal, ledger, prob, vector, CliError};

pub struct Global {
    pub trace: bool,
    pub max_transcript: Option<usize>,
    pub argv: Vec<String>,
}

impl Global {
    fn envelope(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("argv".into(), json!(self.argv));
        m
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<MachineSpec, CliError> {
    parse_machine(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_selection(s: &str, n: usize) -> Result<BTreeSet<usize>, CliError> {
    let mut out = BTreeSet::new();
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i: usize = t
            .parse()
            .map_err(|_| CliError::Input(format!("bad selection index `{t}`")))?;
        if i == 0 || i > n {
            return Err(CliError::Input(format!("selection index {i} out of range 1..={n}")));
        }
        out.insert(i);
    }
    Ok(out)
}

pub fn subset_sum(g: &Global, instance: &str, selection: Option<&str>) -> Result<Value, CliError> {
    let inst = SubsetSumInstance::parse(instance).map_err(input)?;
    let mut out = g.envelope("subset-sum");
    out.insert("instance".into(), json!(instance));
    out.insert("n".into(), json!(inst.n()));
    out.insert("member".into(), json!(inst.is_member()));
    let sel = match selection {
        Some(s) => parse_selection(s, inst.n())?,
        None => {
            let (best, arg) = overall_acceptance(&inst);
            out.insert("mode".into(), json!("maximize"));
            out.insert("argmax".into(), json!(arg));
            out.insert("overall".into(), prob(&best));
            if g.trace {
                let all: Vec<Value> = all_selections(inst.n())
                    .map(|s| {
                        let run = simulate(&inst, &s).expect("selection in range");
                        json!({ "selection": s, "overall": prob(&run.overall()) })
                    })
                    .collect();
                out.insert("selections".into(), Value::from(all));
            }
            arg
        }
    };
    let run = simulate(&inst, &sel).map_err(input)?;
    if selection.is_some() {
        out.insert("mode".into(), json!("selection"));
        out.insert("overall".into(), prob(&run.overall()));
    }
    out.insert("selection".into(), json!(sel));
    out.insert("ledger".into(), ledger(&run.ledger)?);
    out.insert("register_before_end".into(), vector(&run.pre_end));
    if g.trace {
        let steps: Vec<Value> = run
            .steps
            .iter()
            .map(|s| {
                json!({
                    "symbol": s.symbol.to_string(),
                    "op": s.op,
                    "restart": prob(&s.restart),
                    "register": vector(&s.register),
                })
            })
            .collect();
        out.insert("steps".into(), Value::from(steps));
    }
    Ok(Value::Object(out))
}

fn parse_prover(spec: &str, kind: MachineKind) -> Result<ProverKind, CliError> {
    let bad = || {
        CliError::Input(format!(
            "unknown prover `{spec}`; expected honest, defect:C:D:DELTA, skip:I, premature, silent, wrong-length or fixed:l|r"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    Ok(match parts[..] {
        ["honest"] if kind == MachineKind::Atm => ProverKind::HonestAtm,
        ["honest"] => ProverKind::HonestDtm,
        ["honest-dtm"] => ProverKind::HonestDtm,
        ["honest-atm"] => ProverKind::HonestAtm,
        ["defect", c, d, delta] => ProverKind::DefectDigit {
            config: num(c)?,
            digit: num(d)?,
            delta: delta.parse().map_err(|_| bad())?,
        },
        ["skip", i] => ProverKind::SkipConfig(num(i)?),
        ["premature"] => ProverKind::PrematureAccept,
        ["silent"] => ProverKind::Silent,
        ["wrong-length"] => ProverKind::WrongLength,
        ["fixed", "l"] => ProverKind::FixedChoice(Side::L),
        ["fixed", "r"] => ProverKind::FixedChoice(Side::R),
        _ => return Err(bad()),
    })
}

fn parse_rounds(s: &str) -> Result<usize, CliError> {
    if s == "closed-form" {
        return Ok(ADAPTIVE_ROUNDS);
    }
    s.parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("bad --rounds `{s}`")))
}

fn round_trace(r: &RoundReport) -> Value {
    let paths: Vec<Value> = r
        .paths
        .iter()
        .map(|p| {
            let entries: Vec<Value> = p
                .entries
                .iter()
                .map(|e| {
                    let outcomes: serde_json::Map<String, Value> = e
                        .outcomes
                        .iter()
                        .map(|(l, m)| (l.clone(), prob(&m.to_exact())))
                        .collect();
                    json!({
                        "symbol": e.symbol,
                        "op": e.op,
                        "outcomes": outcomes,
                        "restart": prob(&e.restart.to_exact()),
                        "register": vector(&e.register.to_exact()),
                    })
                })
                .collect();
            json!({
                "coins": p.coins.iter().map(|s| if *s == Side::L { "l" } else { "r" }).collect::<Vec<_>>(),
                "end": match p.end {
                    PathEnd::Accepted => "accepted",
                    PathEnd::Rejected => "rejected",
                    PathEnd::CheckFailed => "check-failed",
                    PathEnd::Truncated => "truncated",
                },
                "reason": p.reason,
                "accept_mass": prob(&p.accept_mass.to_exact()),
                "reject_mass": prob(&p.reject_mass.to_exact()),
                "entries": entries,
            })
        })
        .collect();
    Value::from(paths)
}

pub fn protocol(
    g: &Global,
    command: &str,
    machine: &Path,
    x: &str,
    prover: &str,
    rounds: &str,
) -> Result<Value, CliError> {
    let spec = load_machine(machine)?;
    let strong = command == "atm-protocol";
    let want = if strong { MachineKind::Atm } else { MachineKind::Dtm };
    if spec.kind() != want {
        return Err(CliError::Input(format!("{command} needs a {want:?} machine file")));
    }
    let max = g.max_transcript.unwrap_or_else(|| default_max_transcript(&spec, x));
    let vc = if strong {
        VerifierConfig::strong(&spec, x, max)
    } else {
        VerifierConfig::weak(&spec, max)
    };
    let (d, m) = (vc.d, vc.m());
    let v = Verifier::new(&spec, vc, x).map_err(input)?;
    let kind = parse_prover(prover, spec.kind())?;
    let p = make_prover(kind.clone(), &spec, x, max).map_err(input)?;
    let outcome = run_protocol(&v, p.as_ref(), parse_rounds(rounds)?);

    let mut out = g.envelope(command);
    out.insert("machine".into(), json!(machine.display().to_string()));
    out.insert("input".into(), json!(x));
    out.insert("prover".into(), json!(format!("{kind:?}")));
    out.insert("d".into(), json!(d));
    out.insert("m".into(), json!(m));
    out.insert("max_transcript".into(), json!(max));
    out.insert("rounds".into(), json!(outcome.rounds));
    out.insert(
        "classification".into(),
        match &outcome.classification {
            Classification::Exact(p) => json!({ "kind": "exact", "overall": prob(p) }),
            Classification::Bounds { lo, hi } => json!({ "kind": "bounds", "lo": prob(lo), "hi": prob(hi) }),
            Classification::NeverHalts { pending } => json!({ "kind": "never-halts", "pending": prob(pending) }),
        },
    );
    let r = &outcome.first_round;
    out.insert(
        "first_round".into(),
        json!({
            "ledger": ledger(&r.ledger)?,
            "start_restart": prob(&r.start_restart),
            "paths": r.paths.len(),
        }),
    );
    if g.trace || std::env::var_os("QAMLAB_TRACE_DIR").is_some() {
        let t = round_trace(r);
        if let Some(path) = dump(&format!("{command}-trace.json"), &[t.to_string()])? {
            out.insert("trace_file".into(), json!(path));
        }
        if g.trace {
            out.insert("trace".into(), t);
        }
    }
    Ok(Value::Object(out))
}

fn render_witness<C>(
    w: &Witness<C>,
    node: &dyn Fn(&QConfig<C>) -> String,
    choice: &dyn Fn(&QConfig<C>, usize) -> String,
    edge: &str,
    indent: usize,
    out: &mut Vec<String>,
) {
    let pad = "  ".repeat(indent);
    out.push(format!("{pad}{edge}{} {}", node(&w.config), w.config.register));
    match &w.step {
        WitnessStep::Accept => {}
        WitnessStep::Choose { branch, child } => render_witness(
            child,
            node,
            choice,
            &format!("[{}] ", choice(&w.config, *branch)),
            indent + 1,
            out,
        ),
        WitnessStep::All(kids) => {
            for (label, k) in kids {
                render_witness(k, node, choice, &format!("<{label}> "), indent + 1, out);
            }
        }
    }
}

fn search_json<C>(rep: &SearchReport<C>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert(
        "outcome".into(),
        json!(match rep.outcome {
            SearchOutcome::Accepted(_) => "Accepted",
            SearchOutcome::NoSubtreeWithinLimit => "NoSubtreeWithinLimit",
            SearchOutcome::RejectCertificate => "RejectCertificate",
        }),
    );
    m.insert("depth_limit".into(), json!(rep.depth_limit));
    m.insert(
        "stats".into(),
        json!({
            "nodes": rep.stats.nodes,
            "memo_hits": rep.stats.memo_hits,
            "doomed": rep.stats.doomed,
            "limit_hits": rep.stats.limit_hits,
        }),
    );
    m
}

fn qerr(e: QError) -> CliError {
    match e {
        QError::Parse { .. } | QError::Machine(_) | QError::NotCertified => input(e),
        other => internal(other),
    }
}

/// Runs the search, checks the witness, and adds the witness fields.
fn search_and_report<M: QMachine>(
    g: &Global,
    m: &M,
    depth: usize,
    node: &dyn Fn(&QConfig<M::Classical>) -> String,
    choice: &dyn Fn(&QConfig<M::Classical>, usize) -> String,
    out: &mut serde_json::Map<String, Value>,
) -> Result<(), CliError> {
    let rep = accepting_subtree_search(m, depth).map_err(qerr)?;
    out.extend(search_json(&rep));
    if let Some(w) = rep.witness() {
        let leaves = verify_witness(m, w).map_err(|e| CliError::Internal(format!("witness rejected: {e}")))?;
        let mut lines = Vec::new();
        render_witness(w, node, choice, "", 0, &mut lines);
        let mut path = Vec::new();
        let mut cur: &Witness<M::Classical> = w;
        loop {
            match &cur.step {
                WitnessStep::Choose { branch, child } => {
                    path.push(choice(&cur.config, *branch));
                    cur = child;
                }
                WitnessStep::All(kids) => match kids.iter().find(|(_, k)| !matches!(k.step, WitnessStep::Accept)) {
                    Some((_, k)) => cur = k,
                    None => break,
                },
                WitnessStep::Accept => break,
            }
        }
        let mut wj = json!({
            "height": w.height(),
            "leaves": w.leaves(),
            "verified_leaves": leaves,
            "choices": path,
        });
        if g.trace {
            wj["tree"] = json!(lines);
        }
        if let Some(p) = dump("q1afa-witness.txt", &lines)? {
            wj["file"] = json!(p);
        }
        out.insert("witness".into(), wj);
    }
    Ok(())
}

pub fn q1afa(g: &Global, machine: &Path, x: &str, depth: usize) -> Result<Value, CliError> {
    let text = read(machine)?;
    let mut out = g.envelope("q1afa");
    out.insert("machine".into(), json!(machine.display().to_string()));
    out.insert("input".into(), json!(x));
    let is_table = machines::directives(&text)
        .map_err(input)?
        .iter()
        .any(|d| d.key == "type" && d.value == "Q1AFA");
    if is_table {
        let tm = TableMachine::parse(&text).map_err(qerr)?;
        let mut run = tm.on_input(x).map_err(qerr)?;
        let certified = run.certify().map_err(qerr)?;
        out.insert("kind".into(), json!("table"));
        out.insert("certified_depth".into(), json!(certified));
        let depth = certified.unwrap_or(depth);
        if certified.is_some() {
            out.insert(
                "verdict".into(),
                json!(format!("{:?}", strong_eval(&run).map_err(qerr)?)),
            );
        }
        let node = |q: &QConfig<qalternation::TableConfig>| {
            format!("{}@{}", tm.state_name(q.classical.state), q.classical.head)
        };
        let choice = |_: &QConfig<qalternation::TableConfig>, b: usize| b.to_string();
        search_and_report(g, &run, depth, &node, &choice, &mut out)?;
        return Ok(Value::Object(out));
    }

    let spec = parse_machine(&text).map_err(|e| CliError::Input(format!("{}: {e}", machine.display())))?;
    let m = match spec.kind() {
        MachineKind::Dtm => ProtocolMachine::weak(&spec, x).map_err(qerr)?,
        MachineKind::Atm => {
            let b = atm_block_bound(&spec, x).map_err(input)?;
            ProtocolMachine::strong(&spec, x, b).map_err(qerr)?
        }
    };
    let certified = m.halting_depth();
    out.insert(
        "kind".into(),
        json!(if certified.is_some() {
            "strong-protocol"
        } else {
            "weak-protocol"
        }),
    );
    out.insert("certified_depth".into(), json!(certified));
    if certified.is_some() {
        out.insert("verdict".into(), json!(format!("{:?}", strong_eval(&m).map_err(qerr)?)));
    }
    let syms: Vec<String> = m.symbols().iter().map(|s| s.render(&spec)).collect();
    let node = |q: &QConfig<PConf>| match &q.classical {
        PConf::Init => "init".to_string(),
        PConf::Await(st) => format!("await b{} p{}", st.block(), st.position()),
        PConf::Read(_, s) => format!("read {}", s.render(&spec)),
        PConf::Accept => "accept".to_string(),
        PConf::Reject => "reject".to_string(),
    };
    let choice = |_: &QConfig<PConf>, b: usize| syms[b].clone();
    search_and_report(g, &m, certified.unwrap_or(depth), &node, &choice, &mut out)?;
    Ok(Value::Object(out))
}

pub fn tree_eval(g: &Global, path: &Path) -> Result<Value, CliError> {
    let spec = IpsVerifierSpec::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let tree = build_tree(&spec);
    let (value, trace) = evaluate_traced(&tree, &spec);
    let rendered: Vec<String> = tree.render(&spec).lines().map(str::to_string).collect();
    let mut out = g.envelope("tree-eval");
    out.insert("spec".into(), json!(path.display().to_string()));
    out.insert("configurations".into(), json!(spec.len()));
    out.insert("communication_acyclic".into(), json!(spec.communication_is_acyclic()));
    out.insert("root_value".into(), json!(format!("{value:?}")));
    out.insert("accepts".into(), json!(value == ips_tree::TreeValue::True));
    out.insert("tree_size".into(), json!(tree.size()));
    out.insert("tree_height".into(), json!(tree.height()));
    out.insert("trace".into(), json!(trace));
    if g.trace {
        out.insert("tree".into(), json!(rendered));
    }
    if let Some(p) = dump(
        "tree-eval-trace.txt",
        &rendered.iter().chain(&trace).cloned().collect::<Vec<_>>(),
    )? {
        out.insert("trace_file".into(), json!(p));
    }
    Ok(Value::Object(out))
}

pub fn halting_bound(g: &Global, path: &Path) -> Result<Value, CliError> {
    let sys = NonhaltingSystem::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let n = sys.n();
    let index = halting_index(&sys);
    let density = density_halting_index(&sys, n * n);
    let agrees = match index {
        HaltingIndex::HaltsAt(j) => density == Some(j),
        HaltingIndex::RunsForever => density.is_none(),
    };
    if !agrees {
        return Err(CliError::Internal(format!(
            "vectorized index {index:?}, density iteration {density:?}"
        )));
    }
    let chain = kernel_chain(&vectorize(&sys).big_e).map_err(internal)?;
    let mut out = g.envelope("halting-bound");
    out.insert("elements_file".into(), json!(path.display().to_string()));
    out.insert("n".into(), json!(n));
    out.insert("elements".into(), json!(sys.elements().len()));
    out.insert("bound".into(), json!(n * n));
    out.insert("halting_index".into(), json!(format!("{index:?}")));
    out.insert(
        "halts_at".into(),
        match index {
            HaltingIndex::HaltsAt(j) => json!(j),
            HaltingIndex::RunsForever => Value::Null,
        },
    );
    out.insert("kernel_chain".into(), json!(chain));
    out.insert("stabilization_index".into(), json!(stabilization_index(&chain)));
    if g.trace {
        let mut nu = sys.nu0().clone();
        let mut steps = Vec::new();
        for _ in 0..=density.unwrap_or(n * n).min(n * n) {
            steps.push(json!(format_scalar(&nu.trace())));
            nu = sys.evolve(&nu);
        }
        out.insert("nonhalting_mass".into(), json!(steps));
    }
    Ok(Value::Object(out))
}
