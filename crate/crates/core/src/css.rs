//! CSS parity-check pairs `(H_X, H_Z)` over `F_q` shared by the `k` helpers.
//!
//! With `beta = ceil(alpha / 2)`, the code lives on `n_q = beta · k` qudits,
//! `H_Z` is `r_x × n_q` with `r_x = beta` and `H_X` is `r_z × n_q` with
//! `r_z = alpha - beta`. Helper `h` owns the qudits
//! `I_h = {h·beta, ..., (h+1)·beta - 1}`.
//!
//! Every constructor validates the code before returning it: dual containment
//! `H_X H_Zᵀ = 0`, `rank(H_Z) = r_x`, and full-rank restrictions
//! `rank(H_Z|I_h) = beta`, `rank(H_X|I_h) = r_z` for every helper.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, FieldError, FieldMatrix, PrimeField};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CssError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field size {q} is too small: need q >= {need}")]
    FieldTooSmall { q: u32, need: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid CSS code: {0}")]
    InvalidCssCode(String),
    #[error("no valid H_X found after {0} random draws")]
    SamplingExhausted(usize),
}

/// `ceil(alpha / 2)`: qudits per helper.
pub fn qudits_per_helper(alpha: usize) -> usize {
    alpha.div_ceil(2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    field: PrimeField,
    k: usize,
    alpha: usize,
    beta: usize,
    h_z: FieldMatrix,
    h_x: FieldMatrix,
}

/// `M_h = [H_Z|I_h, 0; 0, H_X|I_h]`, the `alpha × 2·beta` map from helper
/// `h`'s Pauli exponents `(x_h, z_h)` to its syndrome contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    pub helper: usize,
    pub matrix: FieldMatrix,
}

/// Result of one random draw of `H_X` from `ker(H_Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sample {
    Accepted(CssCode),
    /// Some helper's `H_X` restriction lost rank.
    Rejected,
}

impl CssCode {
    /// Assembles and validates a code from explicit parity checks.
    pub fn from_parts(k: usize, alpha: usize, h_x: FieldMatrix, h_z: FieldMatrix) -> Result<Self, CssError> {
        let code = Self::from_parts_unverified(k, alpha, h_x, h_z)?;
        code.validate()?;
        Ok(code)
    }

    /// Shape-checked but otherwise unvalidated code, for negative tests.
    pub fn from_parts_unverified(k: usize, alpha: usize, h_x: FieldMatrix, h_z: FieldMatrix) -> Result<Self, CssError> {
        if alpha < 2 || k < 2 {
            return Err(CssError::InvalidParameters(format!("need alpha >= 2 and k >= 2 (alpha={alpha}, k={k})")));
        }
        let beta = qudits_per_helper(alpha);
        let n_q = beta * k;
        if h_x.field() != h_z.field() {
            return Err(CssError::InvalidParameters("H_X and H_Z use different moduli".into()));
        }
        if h_z.rows() != beta || h_z.cols() != n_q || h_x.rows() != alpha - beta || h_x.cols() != n_q {
            return Err(CssError::InvalidParameters(format!(
                "expected H_Z {beta}x{n_q} and H_X {}x{n_q}, got {}x{} and {}x{}",
                alpha - beta,
                h_z.rows(),
                h_z.cols(),
                h_x.rows(),
                h_x.cols()
            )));
        }
        Ok(CssCode { field: h_x.field(), k, alpha, beta, h_z, h_x })
    }

    /// The all-ones construction for `alpha = 2`:
    /// `H_X = (1, ..., 1)`, `H_Z = (1, ..., 1, -(k-1))`.
    pub fn build_css_alpha2(k: usize, q: u32) -> Result<Self, CssError> {
        let field = PrimeField::new(q)?;
        if k < 2 {
            return Err(CssError::InvalidParameters(format!("need k >= 2, got {k}")));
        }
        if (q as usize) < k + 1 {
            return Err(CssError::FieldTooSmall { q, need: k as u32 + 1 });
        }
        let h_x = FieldMatrix::from_vec(field, 1, k, vec![1; k])?;
        let mut z = vec![1i64; k];
        z[k - 1] = -(k as i64 - 1);
        let h_z = FieldMatrix::from_rows(field, &[z])?;
        Self::from_parts(k, 2, h_x, h_z)
    }

    /// Two-qudit code `H_X = (1, a)`, `H_Z = (1, b)` with `b = -a^{-1}`,
    /// whose codespace is the generalized Bell state `Σ_j |j⟩|aj⟩`.
    pub fn build_css_bell(a: u32, q: u32) -> Result<Self, CssError> {
        let field = PrimeField::new(q)?;
        let a = a % q;
        let b = field.neg(field.inv(a).map_err(|_| CssError::InvalidParameters("a must be nonzero".into()))?);
        let h_x = FieldMatrix::row_vector(field, &[1, a]);
        let h_z = FieldMatrix::row_vector(field, &[1, b]);
        Self::from_parts(2, 2, h_x, h_z)
    }

    /// Deterministic construction for any `alpha >= 2`.
    ///
    /// `H_Z` is the `beta`-row Vandermonde at points `1..=n_q`. `H_X` takes the
    /// generalized Reed-Solomon dual rows `H_X[i, j-1] = j^i / w_j` with
    /// `w_j = Π_{m≠j} (j - m)`, for `i < r_z`.
    pub fn build_css_general(alpha: usize, k: usize, q: u32) -> Result<Self, CssError> {
        let field = PrimeField::new(q)?;
        let (beta, n_q) = check_general_params(alpha, k, q)?;
        let points: Vec<Elem> = (1..=n_q as u32).collect();
        let h_z = FieldMatrix::vandermonde(field, &points, beta)?;
        let weights = grs_weights(field, n_q);
        let mut h_x = FieldMatrix::zeros(field, alpha - beta, n_q);
        for j in 1..=n_q {
            let w_inv = field.inv(weights[j - 1])?;
            for i in 0..alpha - beta {
                h_x.set(i, j - 1, field.mul(field.pow(j as Elem, i as u64), w_inv));
            }
        }
        Self::from_parts(k, alpha, h_x, h_z)
    }

    /// One random draw of `H_X` as combinations of a fixed basis of `ker(H_Z)`.
    ///
    /// The coefficient vectors come from a ChaCha generator seeded with
    /// `seed`, so the same seed always reproduces the same draw.
    pub fn sample_css_random(alpha: usize, k: usize, q: u32, seed: u64) -> Result<Sample, CssError> {
        let field = PrimeField::new(q)?;
        let (beta, n_q) = check_general_params(alpha, k, q)?;
        let points: Vec<Elem> = (1..=n_q as u32).collect();
        let h_z = FieldMatrix::vandermonde(field, &points, beta)?;
        let basis = h_z.kernel_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r_z = alpha - beta;
        let mut h_x = FieldMatrix::zeros(field, r_z, n_q);
        for i in 0..r_z {
            let coeffs: Vec<Elem> = (0..basis.len()).map(|_| rng.random_range(0..q)).collect();
            for col in 0..n_q {
                let v: u64 = coeffs.iter().zip(&basis).map(|(&c, b)| (c * b[col]) as u64).sum();
                h_x.set(i, col, field.reduce(v));
            }
        }
        let code = Self::from_parts_unverified(k, alpha, h_x, h_z)?;
        Ok(if code.check_subblock_ranks() { Sample::Accepted(code) } else { Sample::Rejected })
    }

    fn validate(&self) -> Result<(), CssError> {
        if !self.check_dual_containment() {
            return Err(CssError::InvalidCssCode("H_X H_Z^T != 0".into()));
        }
        if self.h_z.rank() != self.r_x() {
            return Err(CssError::InvalidCssCode("H_Z does not have full row rank".into()));
        }
        if !self.check_subblock_ranks() {
            return Err(CssError::InvalidCssCode("a helper's parity-check restriction is rank deficient".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.modulus()
    }

    /// Number of helpers.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Qudits per helper.
    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Number of Z-type generators (rows of `H_Z`), equal to `beta`.
    pub fn r_x(&self) -> usize {
        self.beta
    }

    /// Number of X-type generators (rows of `H_X`), equal to `alpha - beta`.
    pub fn r_z(&self) -> usize {
        self.alpha - self.beta
    }

    /// Total qudit count.
    pub fn n_qudits(&self) -> usize {
        self.beta * self.k
    }

    pub fn h_x(&self) -> &FieldMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &FieldMatrix {
        &self.h_z
    }

    /// Qudit indices owned by helper `h`.
    pub fn ownership(&self, h: usize) -> Range<usize> {
        h * self.beta..(h + 1) * self.beta
    }

    pub fn h_x_block(&self, h: usize) -> FieldMatrix {
        self.h_x.column_block(h * self.beta, self.beta)
    }

    pub fn h_z_block(&self, h: usize) -> FieldMatrix {
        self.h_z.column_block(h * self.beta, self.beta)
    }

    pub fn check_dual_containment(&self) -> bool {
        self.h_x
            .mul(&self.h_z.transpose())
            .map(|p| p.is_zero())
            .unwrap_or(false)
    }

    pub fn check_subblock_ranks(&self) -> bool {
        (0..self.k).all(|h| self.h_x_block(h).rank() == self.r_z() && self.h_z_block(h).rank() == self.beta)
    }

    pub fn transfer_matrix(&self, h: usize) -> Result<TransferMatrix, CssError> {
        if h >= self.k {
            return Err(CssError::InvalidParameters(format!("helper {h} out of range for k = {}", self.k)));
        }
        let (beta, r_x) = (self.beta, self.r_x());
        let mut m = FieldMatrix::zeros(self.field, self.alpha, 2 * beta);
        let (hz, hx) = (self.h_z_block(h), self.h_x_block(h));
        for r in 0..r_x {
            for c in 0..beta {
                m.set(r, c, hz.get(r, c));
            }
        }
        for r in 0..self.r_z() {
            for c in 0..beta {
                m.set(r_x + r, beta + c, hx.get(r, c));
            }
        }
        if m.rank() != self.alpha {
            return Err(CssError::InvalidCssCode(format!("transfer matrix of helper {h} has rank < {}", self.alpha)));
        }
        Ok(TransferMatrix { helper: h, matrix: m })
    }

    /// Overwrites one `H_X` entry with no revalidation.
    pub(crate) fn corrupt_h_x(&mut self, row: usize, col: usize, delta: Elem) {
        let v = self.field.add(self.h_x.get(row, col), delta);
        self.h_x.set(row, col, v);
    }
}

fn check_general_params(alpha: usize, k: usize, q: u32) -> Result<(usize, usize), CssError> {
    if alpha < 2 || k < 2 {
        return Err(CssError::InvalidParameters(format!("need alpha >= 2 and k >= 2 (alpha={alpha}, k={k})")));
    }
    let beta = qudits_per_helper(alpha);
    let n_q = beta * k;
    if (q as usize) <= n_q {
        return Err(CssError::FieldTooSmall { q, need: n_q as u32 + 1 });
    }
    Ok((beta, n_q))
}

/// `w_j = Π_{m ≠ j} (j - m)` for `j = 1..=n`, over `F_q`.
pub fn grs_weights(field: PrimeField, n: usize) -> Vec<Elem> {
    (1..=n as i64)
        .map(|j| {
            (1..=n as i64)
                .filter(|&m| m != j)
                .fold(1, |acc, m| field.mul(acc, field.from_i64(j - m)))
        })
        .collect()
}

/// Inputs to a [`CssConstruction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssParams {
    pub alpha: usize,
    pub k: usize,
    pub q: u32,
    /// Seed for randomized constructions.
    pub seed: u64,
    /// Free parameter of parametric families (the `a` of the Bell-pair code).
    pub param: Option<u32>,
}

/// A named way of building a CSS code for `k` helpers.
pub trait CssConstruction: Named + Send + Sync {
    fn build(&self, params: &CssParams) -> Result<CssCode, CssError>;
}

/// `all-ones`: the `alpha = 2` construction.
pub struct AllOnes;

impl Named for AllOnes {
    fn name(&self) -> &'static str {
        "all-ones"
    }
    fn description(&self) -> &'static str {
        "alpha = 2 only: H_X = (1,...,1), H_Z = (1,...,1,-(k-1))"
    }
}

impl CssConstruction for AllOnes {
    fn build(&self, p: &CssParams) -> Result<CssCode, CssError> {
        if p.alpha != 2 {
            return Err(CssError::InvalidParameters(format!("all-ones needs alpha = 2, got {}", p.alpha)));
        }
        CssCode::build_css_alpha2(p.k, p.q)
    }
}

/// `bell`: the two-helper `(1, a) / (1, -a^{-1})` family, `a = param` (default 1).
pub struct BellPair;

impl Named for BellPair {
    fn name(&self) -> &'static str {
        "bell"
    }
    fn description(&self) -> &'static str {
        "alpha = 2, k = 2 only: H_X = (1, a), H_Z = (1, -1/a); a from `param`"
    }
}

impl CssConstruction for BellPair {
    fn build(&self, p: &CssParams) -> Result<CssCode, CssError> {
        if p.alpha != 2 || p.k != 2 {
            return Err(CssError::InvalidParameters("bell needs alpha = 2 and k = 2".into()));
        }
        CssCode::build_css_bell(p.param.unwrap_or(1), p.q)
    }
}

/// `grs-dual`: the explicit Vandermonde / GRS-dual construction.
pub struct GrsDual;

impl Named for GrsDual {
    fn name(&self) -> &'static str {
        "grs-dual"
    }
    fn description(&self) -> &'static str {
        "any alpha >= 2, q > ceil(alpha/2) k: Vandermonde H_Z with explicit GRS-dual H_X"
    }
}

impl CssConstruction for GrsDual {
    fn build(&self, p: &CssParams) -> Result<CssCode, CssError> {
        CssCode::build_css_general(p.alpha, p.k, p.q)
    }
}

/// `random`: rejection sampling of `H_X` from `ker(H_Z)`.
pub struct RandomKernel {
    pub max_attempts: usize,
}

impl Named for RandomKernel {
    fn name(&self) -> &'static str {
        "random"
    }
    fn description(&self) -> &'static str {
        "random H_X rows from ker(H_Z), resampled until every helper block has full rank"
    }
}

impl CssConstruction for RandomKernel {
    fn build(&self, p: &CssParams) -> Result<CssCode, CssError> {
        for attempt in 0..self.max_attempts as u64 {
            if let Sample::Accepted(code) = CssCode::sample_css_random(p.alpha, p.k, p.q, p.seed.wrapping_add(attempt))? {
                return Ok(code);
            }
        }
        Err(CssError::SamplingExhausted(self.max_attempts))
    }
}

/// `auto`: `all-ones` for `alpha = 2`, `grs-dual` otherwise.
pub struct Auto;

impl Named for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn description(&self) -> &'static str {
        "all-ones when alpha = 2, grs-dual otherwise"
    }
}

impl CssConstruction for Auto {
    fn build(&self, p: &CssParams) -> Result<CssCode, CssError> {
        if p.alpha == 2 {
            AllOnes.build(p)
        } else {
            GrsDual.build(p)
        }
    }
}

/// All built-in CSS constructions.
pub fn css_constructions() -> Registry<dyn CssConstruction> {
    let mut r: Registry<dyn CssConstruction> = Registry::new();
    r.register(Box::new(Auto)).unwrap();
    r.register(Box::new(AllOnes)).unwrap();
    r.register(Box::new(GrsDual)).unwrap();
    r.register(Box::new(RandomKernel { max_attempts: 1000 })).unwrap();
    r.register(Box::new(BellPair)).unwrap();
    r
}
