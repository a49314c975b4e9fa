use std::fmt;

use exact_linalg::{ExactMatrix, ExactScalar, ExactVector, Superoperator};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `num / (d^a · 2^b)` with the fraction left unreduced. Every amplitude and
/// mass in a protocol round has this form, so sums and products never need
/// a gcd until the value is read out.
#[derive(Clone, PartialEq, Eq)]
pub struct Mass {
    num: BigInt,
    a: u32,
    b: u32,
    d: u64,
}

impl fmt::Debug for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", exact_linalg::format_scalar(&self.to_exact()))
    }
}

fn lift(num: &BigInt, d: u64, da: u32, db: u32) -> BigInt {
    let mut n = num.clone();
    if da > 0 {
        n *= BigInt::from(d).pow(da);
    }
    n << db as usize
}

impl Mass {
    pub fn zero(d: u64) -> Self {
        Mass {
            num: BigInt::zero(),
            a: 0,
            b: 0,
            d,
        }
    }

    pub fn from_exact(x: &ExactScalar, d: u64) -> Self {
        let r = Register::from_exact(&ExactVector::new(vec![x.clone()]), d);
        Mass {
            num: r.num[0].clone(),
            a: r.a,
            b: r.b,
            d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn add(&mut self, other: &Mass) {
        if other.num.is_zero() {
            return;
        }
        let a = self.a.max(other.a);
        let b = self.b.max(other.b);
        let x = lift(&self.num, self.d, a - self.a, b - self.b);
        let y = lift(&other.num, self.d, a - other.a, b - other.b);
        *self = Mass {
            num: x + y,
            a,
            b,
            d: self.d,
        };
    }

    pub fn sub(&mut self, other: &Mass) {
        let mut neg = other.clone();
        neg.num = -neg.num;
        self.add(&neg);
    }

    pub fn to_exact(&self) -> ExactScalar {
        let den = lift(&BigInt::one(), self.d, self.a, self.b);
        ExactScalar::new(self.num.clone(), den)
    }
}

/// A register vector `num / (d^a · 2^b)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Register {
    num: Vec<BigInt>,
    a: u32,
    b: u32,
    d: u64,
}

impl fmt::Debug for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_exact())
    }
}

/// Writes a rational matrix as `K / (d · 2^β)` with integer K.
fn integerize(m: &ExactMatrix, d: u64) -> (Vec<Vec<BigInt>>, u32) {
    for beta in 0..8u32 {
        let scale = ExactScalar::from_integer(BigInt::from(d) << beta as usize);
        let k = m.scale(&scale);
        let ok = (0..k.rows()).all(|i| (0..k.cols()).all(|j| k.get(i, j).is_integer()));
        if ok {
            let rows = (0..k.rows())
                .map(|i| (0..k.cols()).map(|j| k.get(i, j).to_integer()).collect())
                .collect();
            return (rows, beta);
        }
    }
    panic!("operator entries are not of the form n/(d·2^k)");
}

/// Writes a matrix with dyadic entries as `K / 2^β`.
fn dyadic(m: &ExactMatrix) -> (Vec<Vec<BigInt>>, u32) {
    let mut beta = 0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let den = m.get(i, j).denom();
            let tz = den.trailing_zeros().unwrap_or(0) as u32;
            assert!((den >> tz as usize).is_one(), "entry {} is not dyadic", m.get(i, j));
            beta = beta.max(tz);
        }
    }
    let rows = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let e = m.get(i, j);
                    let tz = e.denom().trailing_zeros().unwrap_or(0) as u32;
                    e.numer() << (beta - tz) as usize
                })
                .collect()
        })
        .collect();
    (rows, beta)
}

impl Register {
    /// Exact conversion; the denominator of every entry must divide d^a·2^b
    /// for some a, b.
    pub fn from_exact(v: &ExactVector, d: u64) -> Self {
        let mut a = 0;
        let dd = BigInt::from(d);
        loop {
            for b in 0..64u32 {
                let den = dd.pow(a) << b as usize;
                let scaled: Vec<ExactScalar> = v
                    .entries()
                    .iter()
                    .map(|e| e * ExactScalar::from_integer(den.clone()))
                    .collect();
                if scaled.iter().all(|e| e.is_integer()) {
                    return Register {
                        num: scaled.iter().map(|e| e.to_integer()).collect(),
                        a,
                        b,
                        d,
                    };
                }
            }
            a += 1;
            assert!(a < 4096, "vector entries are not of the form n/(d^a·2^b)");
        }
    }

    pub fn zeros(dim: usize, d: u64) -> Self {
        Register {
            num: vec![BigInt::zero(); dim],
            a: 0,
            b: 0,
            d,
        }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn to_exact(&self) -> ExactVector {
        let den = lift(&BigInt::one(), self.d, self.a, self.b);
        ExactVector::new(
            self.num
                .iter()
                .map(|n| ExactScalar::new(n.clone(), den.clone()))
                .collect(),
        )
    }

    /// The amplitude at index `i`, exactly.
    pub fn entry(&self, i: usize) -> ExactScalar {
        let den = lift(&BigInt::one(), self.d, self.a, self.b);
        ExactScalar::new(self.num[i].clone(), den)
    }

    pub fn norm_sq(&self) -> Mass {
        let num = self.num.iter().map(|n| n * n).sum();
        Mass {
            num,
            a: 2 * self.a,
            b: 2 * self.b,
            d: self.d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// Applies every element; returns the per-element vectors and the mass
    /// left to the restart event.
    pub fn apply(&self, op: &Superoperator) -> (Vec<Register>, Mass) {
        let ks = op.elements().iter().map(|(_, m)| integerize(m, self.d)).collect();
        self.apply_integer(ks)
    }

    /// Applies `{(1/d) M}` for unscaled elements `M` with dyadic entries.
    pub fn apply_scaled(&self, unscaled: &[(String, ExactMatrix)]) -> (Vec<Register>, Mass) {
        let ks = unscaled.iter().map(|(_, m)| dyadic(m)).collect();
        self.apply_integer(ks)
    }

    fn apply_integer(&self, ks: Vec<(Vec<Vec<BigInt>>, u32)>) -> (Vec<Register>, Mass) {
        let mut outs = Vec::with_capacity(ks.len());
        let mut rest = self.norm_sq();
        for (k, beta) in ks {
            assert_eq!(k.len(), self.dim(), "register dimension");
            let num: Vec<BigInt> = k
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&self.num)
                        .filter(|(c, _)| !c.is_zero())
                        .map(|(c, x)| c * x)
                        .sum()
                })
                .collect();
            let r = Register {
                num,
                a: self.a + 1,
                b: self.b + beta,
                d: self.d,
            };
            rest.sub(&r.norm_sq());
            outs.push(r);
        }
        (outs, rest)
    }

    /// Drops common factors of d and 2 so equal vectors compare equal.
    pub fn normalized(&self) -> Register {
        let mut r = self.clone();
        if r.is_zero() {
            r.a = 0;
            r.b = 0;
            return r;
        }
        let dd = BigInt::from(self.d);
        while r.a > 0 && r.num.iter().all(|n| n.is_multiple_of(&dd)) {
            for n in &mut r.num {
                *n /= &dd;
            }
            r.a -= 1;
        }
        let two = BigInt::from(2);
        while r.b > 0 && r.num.iter().all(|n| n.is_multiple_of(&two)) {
            for n in &mut r.num {
                *n >>= 1;
            }
            r.b -= 1;
        }
        r
    }
}
