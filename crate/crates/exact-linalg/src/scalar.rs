use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::LinalgError;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type ExactScalar = BigRational;

pub fn rat(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Integer power; negative exponents invert.
pub fn pow_scalar(x: &ExactScalar, exp: i64) -> ExactScalar {
    let mut base = if exp < 0 { x.recip() } else { x.clone() };
    let mut e = exp.unsigned_abs();
    let mut acc = ExactScalar::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Renders as `num/den`, including integers (`1/1`).
pub fn format_scalar(x: &ExactScalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `n`, `-n`, `n/d` and `-n/d` with decimal integers.
pub fn parse_scalar(s: &str) -> Result<ExactScalar, LinalgError> {
    let bad = || LinalgError::Parse(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Scientific rendering with `sig` significant digits, rounded half away from
/// zero, computed from the exact value (no floating point involved).
pub fn display_decimal(x: &ExactScalar, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let ten = BigInt::from(10);
    let digits = |n: &BigInt| n.to_string().len() as i64;
    // 10^e <= a < 10^(e+1)
    let mut e = digits(a.numer()) - digits(a.denom());
    let ten_r = BigRational::from_integer(ten.clone());
    while pow_scalar(&ten_r, e) > a {
        e -= 1;
    }
    while pow_scalar(&ten_r, e + 1) <= a {
        e += 1;
    }
    let scaled = &a * pow_scalar(&ten_r, sig as i64 - 1 - e);
    let twice = scaled * int(2) + int(1);
    let mut mant = twice.numer().div_floor(&(twice.denom() * BigInt::from(2)));
    if mant == num_traits::pow(ten.clone(), sig) {
        mant = num_traits::pow(ten, sig - 1);
        e += 1;
    }
    let m = mant.to_string();
    let body = if sig == 1 {
        m
    } else {
        format!("{}.{}", &m[..1], &m[1..])
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, e)
}
