//! The acceptance suite lives in `tests/acceptance.rs`. Run it with
//! `cargo test -p acceptance` to see one line per criterion.
