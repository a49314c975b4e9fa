use num_bigint::BigUint;

use crate::{Configuration, MachineSpec, Sym};

/// Assigns `1..=|Γ′|` to Γ′ in declaration order (states first). Zero is
/// never used, so leading symbols always contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigitMap {
    size: u32,
}

impl DigitMap {
    pub fn for_spec(spec: &MachineSpec) -> Self {
        DigitMap {
            size: spec.alphabet_size() as u32,
        }
    }

    /// The base m = |Γ′| + 1.
    pub fn base(&self) -> u64 {
        self.size as u64 + 1
    }

    pub fn digit(&self, s: Sym) -> u64 {
        assert!((s.0 as u32) < self.size, "symbol outside the digit map");
        s.0 as u64 + 1
    }

    pub fn symbol(&self, digit: u64) -> Option<Sym> {
        (1..=self.size as u64).contains(&digit).then(|| Sym((digit - 1) as u16))
    }
}

/// Σ_j dm(c[j])·m^(|c|−j), most significant symbol first.
pub fn encode_config(c: &Configuration, dm: &DigitMap) -> BigUint {
    encode_symbols(c.symbols(), dm)
}

pub fn encode_symbols(syms: &[Sym], dm: &DigitMap) -> BigUint {
    let m = BigUint::from(dm.base());
    syms.iter()
        .fold(BigUint::from(0u32), |acc, &s| acc * &m + BigUint::from(dm.digit(s)))
}
