use exact_linalg::{rat, ExactScalar, ExactVector};
use machines::{encode_config, next_config, parse_machine, DigitMap, MachineSpec};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use qam_core::*;

fn toy(name: &str) -> MachineSpec {
    let path = format!("{}/../../machines/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_machine(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const HALTING_DTMS: [&str; 4] = ["starts_a.tm", "even_a.tm", "ends_a.tm", "append_a.tm"];
const ATMS: [&str; 2] = ["choose.atm", "forall_exists.atm"];

fn words(max: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| [format!("{w}a"), format!("{w}b")]).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn verifier<'a>(spec: &'a MachineSpec, x: &str) -> Verifier<'a> {
    let h = default_max_transcript(spec, x);
    let vc = match spec.kind() {
        machines::MachineKind::Dtm => VerifierConfig::weak(spec, h),
        machines::MachineKind::Atm => VerifierConfig::strong(spec, x, h),
    };
    Verifier::new(spec, vc, x).unwrap()
}

/// Runs one protocol and checks that the round ledger sums to one.
fn run<'a>(spec: &'a MachineSpec, x: &str, kind: ProverKind) -> Option<(Verifier<'a>, ProtocolOutcome)> {
    let v = verifier(spec, x);
    let p = make_prover(kind, spec, x, v.config().max_transcript).ok()?;
    let out = run_protocol(&v, p.as_ref(), ADAPTIVE_ROUNDS);
    assert_eq!(out.first_round.ledger.total(), ExactScalar::one(), "{x:?}");
    Some((v, out))
}

fn exact(o: &ProtocolOutcome) -> ExactScalar {
    match &o.classification {
        Classification::Exact(q) => q.clone(),
        c => panic!("expected an exact value, got {c:?}"),
    }
}

fn member(spec: &MachineSpec, x: &str) -> bool {
    let comp = dtm_computation(spec, x, 64).unwrap().expect("halts");
    next_config(spec, comp.last().unwrap()).unwrap().is_accepting(spec)
}

#[test]
fn honest_dtm_prover_is_decided_exactly() {
    for name in HALTING_DTMS {
        let spec = toy(name);
        for x in words(4) {
            let (_, out) = run(&spec, &x, ProverKind::HonestDtm).unwrap();
            let l = &out.first_round.ledger;
            let want = if member(&spec, &x) { 1 } else { 0 };
            assert_eq!(exact(&out), rat(want, 1), "{name} {x:?}");
            if want == 1 {
                assert!(l.p_reject.is_zero(), "{name} {x:?}");
            }
            assert!(l.p_pending.is_zero());
        }
    }
}

/// Provers that actually deviate from the honest transcript.
fn cheats(spec: &MachineSpec, x: &str) -> Vec<ProverKind> {
    let comp = dtm_computation(spec, x, 64).unwrap().unwrap();
    let mut out = vec![ProverKind::PrematureAccept];
    for (i, c) in comp.iter().enumerate().skip(1).take(2) {
        out.push(ProverKind::SkipConfig(i + 1));
        for digit in 1..=c.len() {
            for delta in [1, 2] {
                out.push(ProverKind::DefectDigit {
                    config: i + 1,
                    digit,
                    delta,
                });
            }
        }
    }
    out
}

#[test]
fn cheating_dtm_provers_are_bounded() {
    let mut successor_failures = 0;
    for name in HALTING_DTMS {
        let spec = toy(name);
        for x in words(3) {
            for kind in cheats(&spec, &x) {
                let Some((v, out)) = run(&spec, &x, kind.clone()) else {
                    continue;
                };
                let m = v.config().m();
                let l = &out.first_round.ledger;
                let m2 = ExactScalar::from_integer(BigInt::from(m * m));
                assert!(l.p_reject >= &m2 * &l.p_accept, "{name} {x:?} {kind:?}");
                let q = exact(&out);
                assert!(q <= rat(1, (m * m + 1) as i64), "{name} {x:?} {kind:?}");
                if !l.p_accept.is_zero() {
                    successor_failures += 1;
                }
            }
        }
    }
    // The battery must exercise the quantum check, not only the classical ones.
    assert!(successor_failures >= 5, "{successor_failures}");
}

#[test]
fn premature_accept_hits_the_bound_exactly() {
    let spec = toy("append_a.tm");
    let (v, out) = run(&spec, "", ProverKind::PrematureAccept).unwrap();
    let m = v.config().m() as i64;
    assert_eq!(exact(&out), rat(1, m * m + 1));
}

#[test]
fn silent_prover_never_decides() {
    let spec = toy("even_a.tm");
    let (_, out) = run(&spec, "aa", ProverKind::Silent).unwrap();
    match out.classification {
        Classification::NeverHalts { pending } => assert!(!pending.is_zero()),
        c => panic!("{c:?}"),
    }
}

#[test]
fn non_halting_machine_never_decides() {
    let spec = toy("bounce.tm");
    let v = {
        let vc = VerifierConfig::weak(&spec, 96);
        Verifier::new(&spec, vc, "ab").unwrap()
    };
    let p = make_prover(ProverKind::HonestDtm, &spec, "ab", 96).unwrap();
    let out = run_protocol(&v, p.as_ref(), 1);
    assert!(matches!(out.classification, Classification::NeverHalts { .. }));
    assert_eq!(out.first_round.ledger.total(), ExactScalar::one());
}

#[test]
fn wrong_length_is_a_classical_rejection() {
    let spec = toy("even_a.tm");
    let (_, out) = run(&spec, "aa", ProverKind::WrongLength).unwrap();
    assert_eq!(exact(&out), rat(0, 1));
    assert_eq!(out.first_round.paths[0].end, PathEnd::CheckFailed);
}

fn scaled(v: &[BigInt], d: u64, power: usize) -> ExactVector {
    let s = exact_linalg::pow_scalar(&rat(1, d as i64), power as i64);
    ExactVector::new(v.iter().map(|x| ExactScalar::from_integer(x.clone()) * &s).collect())
}

fn big(n: num_bigint::BigUint) -> BigInt {
    BigInt::from(n)
}

#[test]
fn register_checkpoints_follow_the_encodings() {
    let mut checked = 0;
    for name in HALTING_DTMS {
        let spec = toy(name);
        let dm = DigitMap::for_spec(&spec);
        for x in words(3) {
            let comp = dtm_computation(&spec, &x, 64).unwrap().unwrap();
            let (v, out) = run(&spec, &x, ProverKind::HonestDtm).unwrap();
            let d = v.config().d;
            let entries = &out.first_round.paths[0].entries;
            let c1 = &comp[0];
            let n1 = next_config(&spec, c1).unwrap();
            let l1 = c1.len() + 2;
            let after_first = entries[l1 - 1].register.to_exact();
            if n1.is_halting(&spec) {
                // The round ends at the second `$`.
                assert_eq!(entries.len(), l1);
                continue;
            }
            let one = BigInt::one();
            let zero = BigInt::zero();
            let want = scaled(&[one.clone(), big(encode_config(&n1, &dm)), zero.clone(), zero], d, l1);
            assert_eq!(after_first, want, "{name} {x:?}");
            let c2 = &comp[1];
            let n2 = next_config(&spec, c2).unwrap();
            let at = l1 + c2.len() + 1;
            let want = scaled(
                &[
                    one,
                    big(encode_config(&n1, &dm)),
                    big(encode_config(c2, &dm)),
                    big(encode_config(&n2, &dm)),
                ],
                d,
                at,
            );
            assert_eq!(entries[at - 1].register.to_exact(), want, "{name} {x:?}");
            checked += 1;
        }
    }
    assert!(checked >= 20, "{checked}");
}

#[test]
fn strong_protocol_is_exact_on_the_classical_answer() {
    for name in ATMS {
        let spec = toy(name);
        for x in words(3) {
            let accepts = classical_eval(&spec, &x).unwrap().accepts;
            let (_, out) = run(&spec, &x, ProverKind::HonestAtm).unwrap();
            let want = if accepts { 1 } else { 0 };
            assert_eq!(exact(&out), rat(want, 1), "{name} {x:?}");
            if accepts {
                assert!(out.first_round.ledger.p_reject.is_zero());
            }
        }
    }
}

fn two_pow(b: usize) -> ExactScalar {
    ExactScalar::from_integer(BigInt::one() << b)
}

#[test]
fn first_to_fifth_amplitude_ratio_is_two_to_the_branchings() {
    let mut seen = 0;
    for name in ATMS {
        let spec = toy(name);
        for x in words(3) {
            for kind in [
                ProverKind::HonestAtm,
                ProverKind::FixedChoice(Side::L),
                ProverKind::FixedChoice(Side::R),
            ] {
                let (_, out) = run(&spec, &x, kind).unwrap();
                for path in &out.first_round.paths {
                    for e in &path.entries {
                        if e.register.is_zero() {
                            continue;
                        }
                        assert_eq!(
                            e.register.entry(0),
                            e.register.entry(4) * two_pow(e.halvings),
                            "{name} {x:?}"
                        );
                        seen += 1;
                    }
                }
            }
        }
    }
    assert!(seen > 100);
}

#[test]
fn accept_mass_is_a_quarter_per_branching_of_reject_mass() {
    let mut pairs = 0;
    for name in ATMS {
        let spec = toy(name);
        for x in words(3) {
            for side in [Side::L, Side::R] {
                let (_, out) = run(&spec, &x, ProverKind::FixedChoice(side)).unwrap();
                let paths = &out.first_round.paths;
                for a in paths.iter().filter(|p| p.end == PathEnd::Accepted) {
                    for r in paths.iter().filter(|p| p.end == PathEnd::Rejected) {
                        if a.entries.len() != r.entries.len() {
                            continue;
                        }
                        let b = a.entries.last().unwrap().halvings;
                        assert_eq!(r.entries.last().unwrap().halvings, b);
                        let quarter = exact_linalg::pow_scalar(&rat(1, 4), b as i64);
                        assert_eq!(a.accept_mass.to_exact(), r.reject_mass.to_exact() * quarter);
                        pairs += 1;
                    }
                }
            }
        }
    }
    assert!(pairs >= 3, "{pairs}");
}

#[test]
fn wrong_existential_choice_is_bounded() {
    let spec = toy("choose.atm");
    // On `b` the left branch runs into a universal check that rejects once.
    let (v, out) = run(&spec, "b", ProverKind::FixedChoice(Side::L)).unwrap();
    assert!(v.config().length_check == Some(3));
    assert_eq!(exact(&out), rat(1, 17));
}

#[test]
fn strong_length_check_rejects_long_configurations() {
    let spec = toy("choose.atm");
    let (_, out) = run(&spec, "ab", ProverKind::WrongLength).unwrap();
    assert_eq!(exact(&out), rat(0, 1));
    let reasons: Vec<_> = out.first_round.paths.iter().filter_map(|p| p.reason.clone()).collect();
    assert!(
        reasons.iter().any(|r| r.contains("too long") || r.contains("|x|+3")),
        "{reasons:?}"
    );
}

/// Cheats in even rounds and tells the truth in odd ones.
struct Alternating {
    cheat: Box<dyn Prover>,
    honest: Box<dyn Prover>,
}

impl Prover for Alternating {
    fn next_symbol(&self, view: &ProverView<'_>) -> PSym {
        if view.round.is_multiple_of(2) {
            self.cheat.next_symbol(view)
        } else {
            self.honest.next_symbol(view)
        }
    }

    fn round_stationary(&self) -> bool {
        false
    }
}

#[test]
fn adaptive_prover_gets_bounds() {
    let spec = toy("even_a.tm");
    let x = "aa";
    let v = verifier(&spec, x);
    let h = v.config().max_transcript;
    let p = Alternating {
        cheat: make_prover(
            ProverKind::DefectDigit {
                config: 2,
                digit: 2,
                delta: 1,
            },
            &spec,
            x,
            h,
        )
        .unwrap(),
        honest: make_prover(ProverKind::HonestDtm, &spec, x, h).unwrap(),
    };
    let out = run_protocol(&v, &p, 8);
    assert_eq!(out.rounds, 8);
    match out.classification {
        Classification::Bounds { lo, hi } => {
            assert!(lo > ExactScalar::zero());
            assert!(lo <= hi && hi <= ExactScalar::one());
        }
        c => panic!("{c:?}"),
    }
}

#[test]
fn round_engine_uses_the_verifier_scale() {
    let spec = toy("starts_a.tm");
    let v = verifier(&spec, "a");
    let p = make_prover(ProverKind::HonestDtm, &spec, "a", 64).unwrap();
    let rep = run_round(&v, p.as_ref(), 0);
    let d = v.config().d as i64;
    // Two blocks of |c| + 2 = 6 steps each; the accept element reads q₁.
    let len = rep.paths[0].entries.len() as i64;
    assert_eq!(len, 12);
    assert_eq!(rep.ledger.p_accept, exact_linalg::pow_scalar(&rat(1, d), 2 * len));
}
