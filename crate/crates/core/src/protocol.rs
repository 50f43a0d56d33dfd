//! Syndrome-level oblivious update protocol.
//!
//! Each helper turns its current share `d_h = Γ_h m'` into Pauli exponents
//! `(x_h, z_h)` for the `beta` qudits it owns. The stale node reads the two
//! syndrome vectors and concatenates them into its refreshed share:
//!
//! * `s_X = H_Z · x` is the eigenvalue exponent of the **Z-type** stabilizers
//!   (X shifts move Z-type eigenvalues), and fills rows `0..r_x` of `Γ_s m'`;
//! * `s_Z = H_X · z` is the eigenvalue exponent of the **X-type** stabilizers
//!   and fills rows `r_x..alpha`.
//!
//! The cross-wired naming is deliberate and matches the transfer matrix,
//! whose top block is `H_Z|I_h`.

use std::collections::HashSet;

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::css::{qudits_per_helper, CssCode, CssError, TransferMatrix};
use crate::field::{Elem, FieldError, FieldMatrix, PrimeField};
use crate::mds::{MdsCode, MdsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("incomplete round: {0}")]
    IncompleteRound(String),
    #[error("enumeration of {0} points exceeds the limit")]
    TooLarge(u128),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponents of `Π_{j ∈ I_h} X(x_j) Z(z_j)` applied by one helper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PauliExponents {
    pub helper: usize,
    pub x: Vec<Elem>,
    pub z: Vec<Elem>,
}

/// Measured syndromes: `s_x` has `r_x` entries, `s_z` has `r_z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SyndromePair {
    pub s_x: Vec<Elem>,
    pub s_z: Vec<Elem>,
}

impl SyndromePair {
    /// The refreshed share `(s_X, s_Z)`.
    pub fn to_share(&self) -> Vec<Elem> {
        self.s_x.iter().chain(&self.s_z).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpdateRecord {
    pub syndromes: SyndromePair,
    pub reconstructed: Vec<Elem>,
    /// `Γ_s m'` computed directly.
    pub expected: Vec<Elem>,
    /// The stale node's outdated share `Γ_s m`.
    pub stale_before: Vec<Elem>,
    pub correct: bool,
}

/// An MDS code, a CSS code, and a choice of helpers and stale node, with the
/// reconstruction blocks and transfer matrices precomputed.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    mds: MdsCode,
    css: CssCode,
    helpers: Vec<usize>,
    stale: usize,
    p_blocks: Vec<FieldMatrix>,
    transfer: Vec<TransferMatrix>,
    /// `R_h · P_h`, where column `i` of `R_h` solves `M_h p = e_i`.
    encoders: Vec<FieldMatrix>,
}

/// Reusable buffers for [`ProtocolInstance::check_update`].
#[derive(Debug, Clone)]
pub struct RoundScratch {
    d: Vec<Elem>,
    p: Vec<Elem>,
    x: Vec<Elem>,
    z: Vec<Elem>,
    s: Vec<Elem>,
    expected: Vec<Elem>,
}

impl ProtocolInstance {
    pub fn bind(mds: MdsCode, css: CssCode, helpers: &[usize], stale: usize) -> Result<Self, ProtocolError> {
        if mds.field() != css.field() {
            return Err(ProtocolError::Config(format!("MDS code is over F_{} but CSS code over F_{}", mds.q(), css.q())));
        }
        if mds.alpha() != css.alpha() {
            return Err(ProtocolError::Config(format!("alpha mismatch: MDS {} vs CSS {}", mds.alpha(), css.alpha())));
        }
        if css.k() != helpers.len() || mds.k() != helpers.len() {
            return Err(ProtocolError::Config(format!(
                "need k helpers (MDS k={}, CSS k={}), got {}",
                mds.k(),
                css.k(),
                helpers.len()
            )));
        }
        if !helpers.iter().all_unique() {
            return Err(ProtocolError::Config(format!("helpers {helpers:?} are not distinct")));
        }
        if helpers.contains(&stale) {
            return Err(ProtocolError::Config(format!("stale node {stale} is among the helpers")));
        }
        if let Some(&bad) = helpers.iter().chain([&stale]).find(|&&i| i >= mds.n()) {
            return Err(ProtocolError::Config(format!("node {bad} out of range for n = {}", mds.n())));
        }
        let p_blocks = mds.reconstruction_blocks(stale, helpers)?;
        let transfer = (0..helpers.len()).map(|h| css.transfer_matrix(h)).collect::<Result<Vec<_>, _>>()?;
        let field = css.field();
        let alpha = css.alpha();
        let encoders = transfer
            .iter()
            .zip(&p_blocks)
            .map(|(t, p)| {
                let mut r = FieldMatrix::zeros(field, t.matrix.cols(), alpha);
                for i in 0..alpha {
                    let mut e = vec![0; alpha];
                    e[i] = 1;
                    for (row, v) in t.matrix.solve(&e)?.into_iter().enumerate() {
                        r.set(row, i, v);
                    }
                }
                r.mul(p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProtocolInstance { mds, css, helpers: helpers.to_vec(), stale, p_blocks, transfer, encoders })
    }

    pub fn mds(&self) -> &MdsCode {
        &self.mds
    }

    pub fn css(&self) -> &CssCode {
        &self.css
    }

    pub fn field(&self) -> PrimeField {
        self.css.field()
    }

    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    pub fn stale(&self) -> usize {
        self.stale
    }

    pub fn p_blocks(&self) -> &[FieldMatrix] {
        &self.p_blocks
    }

    pub fn transfer(&self) -> &[TransferMatrix] {
        &self.transfer
    }

    /// Pauli exponents for helper slot `h` (position in the helper list)
    /// holding share `d_h`.
    ///
    /// Depends only on `h`, `d_h` and the static instance data. For
    /// `alpha = 2` this is the closed form `x = [P_h]_1 d / [H_Z]_h`,
    /// `z = [P_h]_2 d / [H_X]_h`; otherwise the target `t_h = P_h d_h` is solved
    /// against the transfer matrix with free variables set to zero.
    pub fn helper_encode(&self, h: usize, d_h: &[Elem]) -> Result<PauliExponents, ProtocolError> {
        let alpha = self.css.alpha();
        if h >= self.helpers.len() {
            return Err(ProtocolError::Config(format!("helper slot {h} out of range")));
        }
        if d_h.len() != alpha {
            return Err(ProtocolError::Config(format!("share has length {}, expected {alpha}", d_h.len())));
        }
        let f = self.field();
        let p = &self.p_blocks[h];
        if alpha == 2 {
            let x = f.div(f.dot(p.row(0), d_h), self.css.h_z().get(0, h))?;
            let z = f.div(f.dot(p.row(1), d_h), self.css.h_x().get(0, h))?;
            return Ok(PauliExponents { helper: h, x: vec![x], z: vec![z] });
        }
        let target = p.mul_vec(d_h)?;
        let sol = self.transfer[h].matrix.solve(&target)?;
        let beta = self.css.beta();
        Ok(PauliExponents { helper: h, x: sol[..beta].to_vec(), z: sol[beta..].to_vec() })
    }

    /// `s_X = H_Z x`, `s_Z = H_X z` over the concatenated helper exponents.
    pub fn syndrome_extract(&self, encodings: &[PauliExponents]) -> Result<SyndromePair, ProtocolError> {
        let k = self.helpers.len();
        let beta = self.css.beta();
        let mut slots: Vec<Option<&PauliExponents>> = vec![None; k];
        for e in encodings {
            let slot = slots
                .get_mut(e.helper)
                .ok_or_else(|| ProtocolError::IncompleteRound(format!("unknown helper slot {}", e.helper)))?;
            if slot.is_some() {
                return Err(ProtocolError::IncompleteRound(format!("helper {} reported twice", e.helper)));
            }
            if e.x.len() != beta || e.z.len() != beta {
                return Err(ProtocolError::IncompleteRound(format!("helper {} sent malformed exponents", e.helper)));
            }
            *slot = Some(e);
        }
        let mut x = Vec::with_capacity(beta * k);
        let mut z = Vec::with_capacity(beta * k);
        for (h, slot) in slots.iter().enumerate() {
            let e = slot.ok_or_else(|| ProtocolError::IncompleteRound(format!("missing helper {h}")))?;
            x.extend_from_slice(&e.x);
            z.extend_from_slice(&e.z);
        }
        Ok(SyndromePair { s_x: self.css.h_z().mul_vec(&x)?, s_z: self.css.h_x().mul_vec(&z)? })
    }

    /// Each helper's exponents for the updated message `m'`.
    pub fn encode_all(&self, m_prime: &[Elem]) -> Result<Vec<PauliExponents>, ProtocolError> {
        self.helpers
            .iter()
            .enumerate()
            .map(|(h, &node)| {
                let d = self.mds.encode_node(node, m_prime)?.data;
                self.helper_encode(h, &d)
            })
            .collect()
    }

    /// Syndromes produced by a full round on `m'`.
    pub fn syndromes(&self, m_prime: &[Elem]) -> Result<SyndromePair, ProtocolError> {
        self.check_len(m_prime)?;
        self.syndrome_extract(&self.encode_all(m_prime)?)
    }

    fn check_len(&self, v: &[Elem]) -> Result<(), ProtocolError> {
        let b = self.mds.message_len();
        if v.len() != b {
            return Err(ProtocolError::Config(format!("message has length {}, expected B = {b}", v.len())));
        }
        Ok(())
    }

    /// Runs one full round: encode, extract, reconstruct, compare with
    /// `Γ_s m'`. Works for any `m'`, whatever its distance from `m`.
    pub fn run_update(&self, m: &[Elem], m_prime: &[Elem]) -> Result<UpdateRecord, ProtocolError> {
        self.check_len(m)?;
        let syndromes = self.syndromes(m_prime)?;
        let reconstructed = syndromes.to_share();
        let expected = self.mds.encode_node(self.stale, m_prime)?.data;
        let stale_before = self.mds.encode_node(self.stale, m)?.data;
        let correct = reconstructed == expected;
        Ok(UpdateRecord { syndromes, reconstructed, expected, stale_before, correct })
    }

    pub fn scratch(&self) -> RoundScratch {
        let alpha = self.css.alpha();
        let nq = self.css.n_qudits();
        RoundScratch {
            d: vec![0; alpha],
            p: vec![0; 2 * self.css.beta()],
            x: vec![0; nq],
            z: vec![0; nq],
            s: vec![0; alpha],
            expected: vec![0; alpha],
        }
    }

    /// Allocation-free round used by campaigns: same result as
    /// [`run_update`](Self::run_update)`.correct`, with the per-helper solve
    /// replaced by its precomputed linear map.
    ///
    /// `m_prime` must have length `B`.
    pub fn check_update(&self, m_prime: &[Elem], s: &mut RoundScratch) -> bool {
        let beta = self.css.beta();
        let r_x = self.css.r_x();
        for (h, &node) in self.helpers.iter().enumerate() {
            self.mds.generators()[node].mul_vec_into(m_prime, &mut s.d);
            self.encoders[h].mul_vec_into(&s.d, &mut s.p);
            s.x[h * beta..(h + 1) * beta].copy_from_slice(&s.p[..beta]);
            s.z[h * beta..(h + 1) * beta].copy_from_slice(&s.p[beta..]);
        }
        self.css.h_z().mul_vec_into(&s.x, &mut s.s[..r_x]);
        self.css.h_x().mul_vec_into(&s.z, &mut s.s[r_x..]);
        self.mds.generators()[self.stale].mul_vec_into(m_prime, &mut s.expected);
        s.s == s.expected
    }

    /// Checks the converse premise for helper slot `i`: with the other
    /// helpers' data pinned (at the shares of a base message drawn from
    /// `seed`), `m'` ranges over an affine subspace `V`, and `Γ_s` must take
    /// exactly `q^alpha` distinct values on it.
    pub fn converse_image(&self, i: usize, seed: u64) -> Result<ConverseOutcome, ProtocolError> {
        const LIMIT: u128 = 20_000_000;
        if i >= self.helpers.len() {
            return Err(ProtocolError::Config(format!("helper slot {i} out of range")));
        }
        let f = self.field();
        let q = f.modulus();
        let b = self.mds.message_len();
        let alpha = self.mds.alpha();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: Vec<Elem> = (0..b).map(|_| rng.random_range(0..q)).collect();
        let others: Vec<usize> = self.helpers.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &n)| n).collect();
        let constraints = if others.is_empty() { FieldMatrix::zeros(f, 0, b) } else { self.mds.stacked(&others)? };
        let directions = constraints.kernel_basis();
        let dim = directions.len();
        let points = (q as u128).pow(dim as u32);
        if points > LIMIT {
            return Err(ProtocolError::TooLarge(points));
        }
        let g_s = self.mds.generator(self.stale)?;
        let base_img = g_s.mul_vec(&base)?;
        let dir_imgs: Vec<Vec<Elem>> = directions.iter().map(|v| g_s.mul_vec_unchecked(v)).collect();
        let mut image = HashSet::with_capacity(points as usize);
        let mut coeffs = vec![0u32; dim];
        let mut cur = base_img.clone();
        loop {
            image.insert(cur.iter().fold(0u64, |acc, &e| acc * q as u64 + e as u64));
            // Odometer step; `cur` tracks Γ_s(base + Σ c_t v_t) incrementally.
            let mut t = 0;
            while t < dim {
                coeffs[t] += 1;
                cur = f.add_vec(&cur, &dir_imgs[t]);
                if coeffs[t] < q {
                    break;
                }
                coeffs[t] = 0;
                t += 1;
            }
            if t == dim {
                break;
            }
        }
        let target = (q as u64).pow(alpha as u32);
        let image_size = image.len() as u64;
        Ok(ConverseOutcome {
            helper: i,
            subspace_dim: dim,
            image_size,
            target,
            injective: dim == alpha && image_size == target,
        })
    }

    pub fn converse_injectivity_check(&self, i: usize) -> Result<bool, ProtocolError> {
        Ok(self.converse_image(i, 0)?.injective)
    }

    /// Syndrome extraction from a depolarized shared state
    /// `p |Ψ⟩⟨Ψ| + (1 - p) I / dim`: with probability `p` the true syndromes,
    /// otherwise a uniform draw from `F_q^{r_x} × F_q^{r_z}`.
    pub fn noisy_run<R: Rng + ?Sized>(&self, m_prime: &[Elem], p: f64, rng: &mut R) -> Result<NoisyOutcome, ProtocolError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ProtocolError::Config(format!("fidelity {p} is not in [0, 1]")));
        }
        let truth = self.syndromes(m_prime)?;
        let q = self.field().modulus();
        let outcome = if rng.random_bool(p) {
            truth.clone()
        } else {
            SyndromePair {
                s_x: (0..self.css.r_x()).map(|_| rng.random_range(0..q)).collect(),
                s_z: (0..self.css.r_z()).map(|_| rng.random_range(0..q)).collect(),
            }
        };
        let success = outcome == truth;
        Ok(NoisyOutcome { outcome, truth, success })
    }

    /// Test hook: perturbs one `H_X` entry after binding, leaving the
    /// precomputed encoders untouched, so rounds stop reconstructing.
    #[doc(hidden)]
    pub fn corrupt_h_x_entry(&mut self, row: usize, col: usize, delta: Elem) {
        self.css.corrupt_h_x(row, col, delta);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConverseOutcome {
    pub helper: usize,
    pub subspace_dim: usize,
    pub image_size: u64,
    /// `q^alpha`.
    pub target: u64,
    pub injective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoisyOutcome {
    pub outcome: SyndromePair,
    pub truth: SyndromePair,
    pub success: bool,
}

/// Bandwidth in bits-equivalent: one dimension-`q` qudit counts `log2 q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthReport {
    pub alpha: usize,
    pub k: usize,
    pub q: u32,
    pub qudits_per_helper: usize,
    /// `ceil(alpha/2) · k · log2 q`.
    pub quantum_bits_equiv: f64,
    /// `alpha · k · log2 q`.
    pub classical_lb_bits: f64,
    /// classical / quantum as an exact fraction.
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub ratio: f64,
}

impl BandwidthReport {
    pub fn ratio_exact(&self) -> Ratio<u64> {
        Ratio::new(self.ratio_num, self.ratio_den)
    }
}

pub fn bandwidth_report(alpha: usize, k: usize, q: u32) -> BandwidthReport {
    let beta = qudits_per_helper(alpha);
    let log_q = (q as f64).log2();
    let ratio = Ratio::new((alpha * k) as u64, (beta * k) as u64);
    BandwidthReport {
        alpha,
        k,
        q,
        qudits_per_helper: beta,
        quantum_bits_equiv: (beta * k) as f64 * log_q,
        classical_lb_bits: (alpha * k) as f64 * log_q,
        ratio_num: *ratio.numer(),
        ratio_den: *ratio.denom(),
        ratio: *ratio.numer() as f64 / *ratio.denom() as f64,
    }
}
