use exact_linalg::ExactScalar;
use num_traits::Zero;

/// Exact probability accounting for one round.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ledger {
    pub p_accept: ExactScalar,
    pub p_reject: ExactScalar,
    pub p_restart: ExactScalar,
    pub p_pending: ExactScalar,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger {
            p_accept: ExactScalar::zero(),
            p_reject: ExactScalar::zero(),
            p_restart: ExactScalar::zero(),
            p_pending: ExactScalar::zero(),
        }
    }

    pub fn total(&self) -> ExactScalar {
        &self.p_accept + &self.p_reject + &self.p_restart + &self.p_pending
    }

    pub fn merge(&mut self, other: &Ledger) {
        self.p_accept += &other.p_accept;
        self.p_reject += &other.p_reject;
        self.p_restart += &other.p_restart;
        self.p_pending += &other.p_pending;
    }

    /// Accept or reject mass was produced.
    pub fn decides(&self) -> bool {
        !(self.p_accept.is_zero() && self.p_reject.is_zero())
    }
}
