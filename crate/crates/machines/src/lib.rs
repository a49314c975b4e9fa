//! Deterministic and alternating single-tape Turing machines, their
//! configuration strings `uqv`, one-step successors and base-m encodings.

mod config;
mod digits;
mod error;
mod normal_form;
mod parse;
mod spec;

pub use config::{initial_config, next_config, next_configs, step, Configuration, Parsed};
pub use digits::{encode_config, encode_symbols, DigitMap};
pub use error::{MachineError, ParseError};
pub use normal_form::validate_normal_form;
pub use parse::{directives, parse_machine, symbol_token, Directive};
pub use spec::{MachineKind, MachineSpec, Move, StateLabel, Sym, SymKind, Transition, BLANK, CENT};
