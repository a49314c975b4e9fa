//! The finite-state verifiers of the weak (4-state register) and strong
//! (5-state register) qAM protocols, their round engine, and prover
//! strategies.

mod atm;
mod ledger;
mod ops;
mod prover;
mod round;
mod scaled;
mod stream;
mod verifier;

pub use atm::{classical_eval, dtm_computation, honest_transcript_len, AtmEval};
pub use ledger::Ledger;
pub use ops::{
    all_cases, build_encode_op, coin_elements, dollar2_elements, encode_elements, protocol_scale, step_elements, Block,
    Decision, Digits, LengthCase, Mode, PositionCase, MAX_DIGITS_PER_STEP,
};
pub use prover::{make_prover, Observed, Prover, ProverError, ProverKind, ProverView};
pub use round::{
    run_protocol, run_round, Classification, PathEnd, PathReport, ProtocolOutcome, RoundReport, TraceEntry,
    ADAPTIVE_ROUNDS,
};
pub use scaled::{Mass, Register};
pub use stream::{BranchOracle, SuccessorStream};
pub use verifier::{PSym, Side, VState, VStep, Verdict, Verifier, VerifierConfig};

/// Default round horizon: four honest transcripts, or a fixed budget when
/// the honest computation does not halt.
pub fn default_max_transcript(spec: &machines::MachineSpec, x: &str) -> usize {
    honest_transcript_len(spec, x).map_or(FALLBACK_HORIZON, |n| 4 * n)
}

/// Transcript budget used when the honest computation does not halt.
pub const FALLBACK_HORIZON: usize = 512;
