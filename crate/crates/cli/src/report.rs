use exact_linalg::{display_decimal, format_scalar, ExactScalar, ExactVector};
use qam_core::Ledger;
use serde_json::{json, Value};

/// Significant digits of the approximate decimal next to each exact value.
pub const DISPLAY_DIGITS: usize = 12;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid input files. Exit code 2.
    Input(String),
    /// An engine broke one of its own invariants. Exit code 3.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

pub fn prob(x: &ExactScalar) -> Value {
    json!({ "exact": format_scalar(x), "approx": display_decimal(x, DISPLAY_DIGITS) })
}

pub fn vector(v: &ExactVector) -> Value {
    Value::from(v.entries().iter().map(format_scalar).collect::<Vec<_>>())
}

/// The four probabilities plus their sum, which must be exactly one.
pub fn ledger(l: &Ledger) -> Result<Value, CliError> {
    let total = l.total();
    if total != ExactScalar::from_integer(1.into()) {
        return Err(CliError::Internal(format!("ledger sums to {}", format_scalar(&total))));
    }
    Ok(json!({
        "p_accept": prob(&l.p_accept),
        "p_reject": prob(&l.p_reject),
        "p_restart": prob(&l.p_restart),
        "p_pending": prob(&l.p_pending),
        "total": format_scalar(&total),
    }))
}

/// Writes `lines` to `$QAMLAB_TRACE_DIR/name` when the variable is set and
/// returns the path written.
pub fn dump(name: &str, lines: &[String]) -> Result<Option<String>, CliError> {
    let Some(dir) = std::env::var_os("QAMLAB_TRACE_DIR") else {
        return Ok(None);
    };
    let dir = std::path::PathBuf::from(dir);
    std::fs::create_dir_all(&dir).map_err(input)?;
    let path = dir.join(name);
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(&path, text).map_err(input)?;
    Ok(Some(path.display().to_string()))
}
