//! `(n, k)` MDS storage codes with per-node storage `alpha`.
//!
//! Node `i` stores `Γ_i · m`, where `Γ_i` is an `alpha × B` generator and
//! `B = alpha · k`. The MDS property says any `k` stacked generators form an
//! invertible `B × B` matrix. Node indices are zero-based throughout.

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, FieldError, FieldMatrix, PrimeField};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field size {q} is too small: need q >= {need}")]
    FieldTooSmall { q: u32, need: u32 },
    #[error("generators are not MDS: nodes {0:?} stack to a singular matrix")]
    NotMds(Vec<usize>),
    #[error("node index {index} out of range for n = {n}")]
    IndexError { index: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("stacked generator of helpers {0:?} is singular")]
    HelperStackSingular(Vec<usize>),
}

/// One node's coded share `d_i = Γ_i m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeShare {
    pub node: usize,
    pub data: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsCode {
    field: PrimeField,
    n: usize,
    k: usize,
    alpha: usize,
    generators: Vec<FieldMatrix>,
    verified: bool,
}

impl MdsCode {
    /// Wraps user-supplied generators, checking the MDS property eagerly.
    ///
    /// `n` is the number of matrices, `alpha` their row count and `k` the
    /// column count divided by `alpha`.
    pub fn load_generators(generators: Vec<FieldMatrix>) -> Result<Self, MdsError> {
        let code = Self::from_generators_unverified(generators)?;
        code.check_mds()?;
        Ok(MdsCode { verified: true, ..code })
    }

    /// Wraps generators with consistent shapes but does not check the MDS
    /// property. Used for negative-test fixtures.
    pub fn from_generators_unverified(generators: Vec<FieldMatrix>) -> Result<Self, MdsError> {
        let first = generators
            .first()
            .ok_or_else(|| MdsError::InvalidParameters("no generators".into()))?;
        let (field, alpha, b) = (first.field(), first.rows(), first.cols());
        if alpha == 0 || b == 0 || b % alpha != 0 {
            return Err(MdsError::InvalidParameters(format!(
                "generator shape {alpha}x{b} is not alpha x (alpha*k)"
            )));
        }
        for g in &generators {
            if g.field() != field || g.rows() != alpha || g.cols() != b {
                return Err(MdsError::InvalidParameters("inconsistent generator shapes".into()));
            }
        }
        let k = b / alpha;
        if k > generators.len() {
            return Err(MdsError::InvalidParameters(format!(
                "k = {k} exceeds n = {}",
                generators.len()
            )));
        }
        Ok(MdsCode { field, n: generators.len(), k, alpha, generators, verified: false })
    }

    /// `alpha`-interleaved Reed-Solomon code evaluated at points `1..=n`.
    ///
    /// Layer `l` of every node encodes the message coordinates
    /// `{l, l + alpha, l + 2 alpha, ...}` as the coefficients of a degree `< k`
    /// polynomial evaluated at the node's point, so
    /// `Γ_i[l][l + alpha t] = (i + 1)^t`.
    pub fn build_interleaved_rs(n: usize, k: usize, alpha: usize, q: u32) -> Result<Self, MdsError> {
        let field = PrimeField::new(q)?;
        check_basic(n, k, alpha)?;
        if (q as usize) < n {
            return Err(MdsError::FieldTooSmall { q, need: n as u32 });
        }
        let b = alpha * k;
        let generators = (0..n)
            .map(|i| {
                let point = (i + 1) as Elem % q;
                let mut g = FieldMatrix::zeros(field, alpha, b);
                for layer in 0..alpha {
                    for t in 0..k {
                        g.set(layer, layer + alpha * t, field.pow(point, t as u64));
                    }
                }
                g
            })
            .collect();
        let code = MdsCode { field, n, k, alpha, generators, verified: false };
        code.check_mds()?;
        Ok(MdsCode { verified: true, ..code })
    }

    /// Non-systematic Vandermonde code: row `l` of node `i` is the Vandermonde
    /// row `(x^0, ..., x^{B-1})` at `x = alpha * i + l + 1`. Any `k` nodes stack
    /// to a `B × B` Vandermonde on distinct points, so `q >= alpha * n` suffices.
    pub fn build_vandermonde(n: usize, k: usize, alpha: usize, q: u32) -> Result<Self, MdsError> {
        let field = PrimeField::new(q)?;
        check_basic(n, k, alpha)?;
        if (q as usize) < alpha * n {
            return Err(MdsError::FieldTooSmall { q, need: (alpha * n) as u32 });
        }
        let b = alpha * k;
        let generators = (0..n)
            .map(|i| {
                let mut g = FieldMatrix::zeros(field, alpha, b);
                for l in 0..alpha {
                    let x = ((alpha * i + l + 1) as u32) % q;
                    for c in 0..b {
                        g.set(l, c, field.pow(x, c as u64));
                    }
                }
                g
            })
            .collect();
        let code = MdsCode { field, n, k, alpha, generators, verified: false };
        code.check_mds()?;
        Ok(MdsCode { verified: true, ..code })
    }

    /// Systematic `(k + 1, k)` code: node `i < k` stores message block `i`
    /// verbatim, node `k` stores the sum of all blocks. For `k = 2`, `alpha = 2`
    /// this is the running three-node example.
    pub fn build_systematic_parity(k: usize, alpha: usize, q: u32) -> Result<Self, MdsError> {
        let field = PrimeField::new(q)?;
        check_basic(k + 1, k, alpha)?;
        let b = alpha * k;
        let mut generators = Vec::with_capacity(k + 1);
        let mut parity = FieldMatrix::zeros(field, alpha, b);
        for i in 0..k {
            let mut g = FieldMatrix::zeros(field, alpha, b);
            for l in 0..alpha {
                g.set(l, alpha * i + l, 1);
                parity.set(l, alpha * i + l, 1);
            }
            generators.push(g);
        }
        generators.push(parity);
        Self::load_generators(generators)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.modulus()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// File size `B = alpha · k`.
    pub fn message_len(&self) -> usize {
        self.alpha * self.k
    }

    /// Whether the MDS property was checked at construction.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn generators(&self) -> &[FieldMatrix] {
        &self.generators
    }

    pub fn generator(&self, node: usize) -> Result<&FieldMatrix, MdsError> {
        self.generators
            .get(node)
            .ok_or(MdsError::IndexError { index: node, n: self.n })
    }

    /// Stacks `[Γ_{i_1}; ...; Γ_{i_m}]`.
    pub fn stacked(&self, nodes: &[usize]) -> Result<FieldMatrix, MdsError> {
        let blocks = nodes
            .iter()
            .map(|&i| self.generator(i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FieldMatrix::vstack(&blocks)?)
    }

    fn check_mds(&self) -> Result<(), MdsError> {
        let b = self.message_len();
        for subset in (0..self.n).combinations(self.k) {
            if self.stacked(&subset)?.rank() != b {
                return Err(MdsError::NotMds(subset));
            }
        }
        Ok(())
    }

    /// Exhaustively checks every `k`-subset for invertibility.
    pub fn verify_mds(&self) -> bool {
        self.check_mds().is_ok()
    }

    pub fn encode_node(&self, node: usize, m: &[Elem]) -> Result<NodeShare, MdsError> {
        let data = self.generator(node)?.mul_vec(m)?;
        Ok(NodeShare { node, data })
    }

    /// Blocks `P_1..P_k` (each `alpha × alpha`) of
    /// `P = Γ_s · [Γ_{h_1}; ...; Γ_{h_k}]^{-1}`, so that
    /// `Γ_s m' = Σ_i P_i · Γ_{h_i} m'`.
    pub fn reconstruction_blocks(&self, stale: usize, helpers: &[usize]) -> Result<Vec<FieldMatrix>, MdsError> {
        if helpers.len() != self.k {
            return Err(MdsError::InvalidParameters(format!(
                "need exactly k = {} helpers, got {}",
                self.k,
                helpers.len()
            )));
        }
        if !helpers.iter().all_unique() {
            return Err(MdsError::InvalidParameters(format!("helpers {helpers:?} are not distinct")));
        }
        if helpers.contains(&stale) {
            return Err(MdsError::InvalidParameters(format!("stale node {stale} is also a helper")));
        }
        let g_s = self.generator(stale)?;
        for &h in helpers {
            if self.generator(h)? == g_s {
                return Err(MdsError::InvalidParameters(format!(
                    "stale node {stale} has the same generator as helper {h}"
                )));
            }
        }
        let inv = self
            .stacked(helpers)?
            .inverse()
            .map_err(|_| MdsError::HelperStackSingular(helpers.to_vec()))?;
        let p = g_s.mul(&inv)?;
        Ok((0..self.k).map(|i| p.column_block(i * self.alpha, self.alpha)).collect())
    }
}

fn check_basic(n: usize, k: usize, alpha: usize) -> Result<(), MdsError> {
    if k == 0 || alpha == 0 || k > n {
        return Err(MdsError::InvalidParameters(format!(
            "need 1 <= k <= n and alpha >= 1 (n={n}, k={k}, alpha={alpha})"
        )));
    }
    Ok(())
}

/// `m + delta · e_j`.
pub fn apply_update(field: PrimeField, m: &[Elem], j: usize, delta: Elem) -> Vec<Elem> {
    let mut out = m.to_vec();
    out[j] = field.add(out[j], delta % field.modulus());
    out
}

/// Fixed codes used by regression tests and campaign presets.
pub mod fixtures {
    use super::*;

    /// The three-node `(3, 2)` systematic code with `alpha = 2`:
    /// `Γ_1 = [I | 0]`, `Γ_2 = [0 | I]`, `Γ_3 = [I | I]`.
    pub fn systematic_3_2(q: u32) -> Result<MdsCode, MdsError> {
        let field = PrimeField::new(q)?;
        let gens = [
            [[1, 0, 0, 0], [0, 1, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 1]],
            [[1, 0, 1, 0], [0, 1, 0, 1]],
        ]
        .iter()
        .map(|rows| FieldMatrix::from_rows(field, rows))
        .collect::<Result<Vec<_>, _>>()?;
        MdsCode::load_generators(gens)
    }

    /// A `(3, 2)`, `alpha = 2` code that is not MDS: the helper pair `{0, 1}`
    /// is invertible, but node 2 stores `(m_1, m_3)`, which is dependent on
    /// either helper alone.
    pub fn non_mds_3_2(q: u32) -> Result<MdsCode, MdsError> {
        let field = PrimeField::new(q)?;
        let gens = [
            [[1, 0, 0, 0], [0, 1, 0, 0]],
            [[0, 0, 1, 0], [0, 0, 0, 1]],
            [[1, 0, 0, 0], [0, 0, 1, 0]],
        ]
        .iter()
        .map(|rows| FieldMatrix::from_rows(field, rows))
        .collect::<Result<Vec<_>, _>>()?;
        MdsCode::from_generators_unverified(gens)
    }
}

/// A named way of building an MDS code from `(n, k, alpha, q)`.
pub trait MdsConstruction: Named + Send + Sync {
    fn build(&self, n: usize, k: usize, alpha: usize, q: u32) -> Result<MdsCode, MdsError>;

    /// Whether the construction deliberately yields a non-MDS code.
    fn is_negative_fixture(&self) -> bool {
        false
    }
}

pub struct InterleavedRs;

impl Named for InterleavedRs {
    fn name(&self) -> &'static str {
        "interleaved-rs"
    }
    fn description(&self) -> &'static str {
        "alpha-interleaved Reed-Solomon at points 1..n (q >= n)"
    }
}

impl MdsConstruction for InterleavedRs {
    fn build(&self, n: usize, k: usize, alpha: usize, q: u32) -> Result<MdsCode, MdsError> {
        MdsCode::build_interleaved_rs(n, k, alpha, q)
    }
}

pub struct Vandermonde;

impl Named for Vandermonde {
    fn name(&self) -> &'static str {
        "vandermonde"
    }
    fn description(&self) -> &'static str {
        "non-systematic Vandermonde code at points 1..alpha*n (q >= alpha*n)"
    }
}

impl MdsConstruction for Vandermonde {
    fn build(&self, n: usize, k: usize, alpha: usize, q: u32) -> Result<MdsCode, MdsError> {
        MdsCode::build_vandermonde(n, k, alpha, q)
    }
}

pub struct SystematicParity;

impl Named for SystematicParity {
    fn name(&self) -> &'static str {
        "systematic"
    }
    fn description(&self) -> &'static str {
        "systematic (k+1, k) code with one sum-parity node"
    }
}

impl MdsConstruction for SystematicParity {
    fn build(&self, n: usize, k: usize, alpha: usize, q: u32) -> Result<MdsCode, MdsError> {
        if n != k + 1 {
            return Err(MdsError::InvalidParameters(format!(
                "systematic parity code needs n = k + 1, got n={n}, k={k}"
            )));
        }
        MdsCode::build_systematic_parity(k, alpha, q)
    }
}

pub struct NonMdsFixture;

impl Named for NonMdsFixture {
    fn name(&self) -> &'static str {
        "non-mds"
    }
    fn description(&self) -> &'static str {
        "negative fixture: (3, 2), alpha = 2 code whose parity node breaks the MDS property"
    }
}

impl MdsConstruction for NonMdsFixture {
    fn build(&self, n: usize, k: usize, alpha: usize, q: u32) -> Result<MdsCode, MdsError> {
        if (n, k, alpha) != (3, 2, 2) {
            return Err(MdsError::InvalidParameters("non-mds fixture is (n, k, alpha) = (3, 2, 2)".into()));
        }
        fixtures::non_mds_3_2(q)
    }

    fn is_negative_fixture(&self) -> bool {
        true
    }
}

/// All built-in MDS constructions.
pub fn mds_constructions() -> Registry<dyn MdsConstruction> {
    let mut r: Registry<dyn MdsConstruction> = Registry::new();
    r.register(Box::new(InterleavedRs)).unwrap();
    r.register(Box::new(Vandermonde)).unwrap();
    r.register(Box::new(SystematicParity)).unwrap();
    r.register(Box::new(NonMdsFixture)).unwrap();
    r
}
