//! The nonhalting part `ν ↦ Σ Eᵢ ν Eᵢᵀ` of a space-bounded quantum machine,
//! as one linear map on vectorized N×N matrices. If the machine halts
//! absolutely it does so within N² steps, because the kernels of the powers
//! of that map stabilize by its dimension.

use exact_linalg::{gram_sum, parse_scalar, psd_check, ExactMatrix, ExactScalar, ExactVector, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HaltingError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Σ EᵀE exceeds the identity")]
    NotSubComplete,
    #[error("initial matrix is not symmetric positive semidefinite")]
    BadInitial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonhaltingSystem {
    n: usize,
    elements: Vec<ExactMatrix>,
    nu0: ExactMatrix,
}

impl NonhaltingSystem {
    pub fn new(n: usize, elements: Vec<ExactMatrix>, nu0: ExactMatrix) -> Result<Self, HaltingError> {
        let square = |m: &ExactMatrix| {
            if m.rows() == n && m.cols() == n {
                Ok(())
            } else {
                Err(LinalgError::DimensionMismatch {
                    expected: format!("{n}x{n}"),
                    found: format!("{}x{}", m.rows(), m.cols()),
                })
            }
        };
        for e in &elements {
            square(e)?;
        }
        square(&nu0)?;
        if !elements.is_empty() {
            let slack = ExactMatrix::identity(n).sub(&gram_sum(&elements)?)?;
            if !psd_check(&slack)? {
                return Err(HaltingError::NotSubComplete);
            }
        }
        if !nu0.is_symmetric() || !psd_check(&nu0)? {
            return Err(HaltingError::BadInitial);
        }
        Ok(NonhaltingSystem { n, elements, nu0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[ExactMatrix] {
        &self.elements
    }

    pub fn nu0(&self) -> &ExactMatrix {
        &self.nu0
    }

    /// One step of the unvectorized dynamics.
    pub fn evolve(&self, nu: &ExactMatrix) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.n, self.n);
        for e in &self.elements {
            let t = e.mul(nu).and_then(|m| m.mul(&e.transpose())).expect("n×n");
            out = out.add(&t).expect("n×n");
        }
        out
    }

    /// Parses the elements format:
    ///
    /// ```text
    /// dim: 2
    /// element:
    /// 0 1
    /// 0 0
    /// nu0:
    /// 0 0
    /// 0 1
    /// ```
    ///
    /// Entries are integers or `num/den`; `//` starts a comment. Without a
    /// `nu0` block the initial matrix is e₁e₁ᵀ.
    pub fn parse(text: &str) -> Result<Self, HaltingError> {
        let err = |line: usize, m: &str| HaltingError::Parse {
            line,
            message: m.to_string(),
        };
        let mut n: Option<usize> = None;
        let mut blocks: Vec<(String, usize, Vec<Vec<ExactScalar>>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("dim:") {
                let d = rest.trim().parse().map_err(|_| err(line_no, "bad dimension"))?;
                if d == 0 {
                    return Err(err(line_no, "dimension must be positive"));
                }
                n = Some(d);
            } else if line == "element:" || line == "nu0:" {
                blocks.push((line.trim_end_matches(':').to_string(), line_no, Vec::new()));
            } else {
                let row = line
                    .split_whitespace()
                    .map(parse_scalar)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(line_no, &e.to_string()))?;
                let (_, _, rows) = blocks
                    .last_mut()
                    .ok_or_else(|| err(line_no, "matrix row outside a block"))?;
                rows.push(row);
            }
        }
        let n = n.ok_or_else(|| err(1, "missing `dim:` header"))?;
        let mut elements = Vec::new();
        let mut nu0 = None;
        for (kind, line, rows) in blocks {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(err(line, &format!("block is not {n}x{n}")));
            }
            let m = ExactMatrix::from_rows(rows)?;
            if kind == "nu0" {
                if nu0.replace(m).is_some() {
                    return Err(err(line, "second nu0 block"));
                }
            } else {
                elements.push(m);
            }
        }
        let nu0 = nu0.unwrap_or_else(|| {
            let e = ExactVector::basis(n, 0);
            ExactMatrix::outer(&e, &e)
        });
        Self::new(n, elements, nu0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorizedSystem {
    pub big_e: ExactMatrix,
    pub v0: ExactVector,
}

/// `Σ Eᵢ ⊗ Eᵢ` acting on column-stacked matrices, so that
/// `big_e · vec(ν) = vec(Σ Eᵢ ν Eᵢᵀ)`.
pub fn vectorize(sys: &NonhaltingSystem) -> VectorizedSystem {
    let nn = sys.n * sys.n;
    let mut big_e = ExactMatrix::zeros(nn, nn);
    for e in &sys.elements {
        big_e = big_e.add(&e.kron(e)).expect("n²×n²");
    }
    VectorizedSystem {
        big_e,
        v0: sys.nu0.vec_col(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltingIndex {
    /// The nonhalting part first vanishes after this many steps.
    HaltsAt(usize),
    RunsForever,
}

/// The first `j ≤ N²` with `big_eʲ v₀ = 0`. A vector still nonzero after
/// N² steps is nonzero forever.
pub fn halting_index(sys: &NonhaltingSystem) -> HaltingIndex {
    let vs = vectorize(sys);
    let bound = sys.n * sys.n;
    let mut v = vs.v0;
    for j in 0..=bound {
        if v.is_zero() {
            return HaltingIndex::HaltsAt(j);
        }
        v = vs.big_e.apply(&v).expect("n²");
    }
    HaltingIndex::RunsForever
}

/// The same question answered by iterating the density matrix directly, up
/// to `limit` steps.
pub fn density_halting_index(sys: &NonhaltingSystem, limit: usize) -> Option<usize> {
    let mut nu = sys.nu0.clone();
    for j in 0..=limit {
        if nu.is_zero() {
            return Some(j);
        }
        nu = sys.evolve(&nu);
    }
    None
}

/// Nullities of `Aʲ` for `j = 1 … dim(A)`.
pub fn kernel_chain(a: &ExactMatrix) -> Result<Vec<usize>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let mut out = Vec::with_capacity(a.rows());
    let mut p = a.clone();
    for j in 1..=a.rows() {
        out.push(p.nullity());
        if j < a.rows() {
            p = p.mul(a)?;
        }
    }
    Ok(out)
}

/// Index from which the chain is constant (1-based).
pub fn stabilization_index(chain: &[usize]) -> usize {
    (1..chain.len())
        .find(|&i| chain[i] == chain[i - 1])
        .unwrap_or(chain.len())
}
