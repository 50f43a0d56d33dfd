//! Dense state-vector simulation of qudit Pauli operators and CSS stabilizers.
//!
//! Basis label `(j_0, …, j_{n-1})` maps to flat index `Σ j_i q^{n-1-i}`.
//! `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j |j⟩` with `ω = e^{2πi/q}`, and `X(a)Z(b)`
//! means Z acts first.
//!
//! X-type generators are measured as `⊗ X^{-e_i}`. Under the conventions above
//! `Z(z)` lowers the eigenvalue exponent of `⊗ X^{e_i}` by `e·z`, so the
//! inverse operator is the one whose exponent rises by `[H_X]·z`, matching
//! `s_Z = H_X z`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::css::CssCode;
use crate::field::Elem;
use crate::protocol::{ProtocolError, ProtocolInstance, SyndromePair};

pub const DEFAULT_CAP: usize = 2_000_000;
pub const EIGEN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("state dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: u128, cap: usize },
    #[error("state is not an eigenstate of the stabilizer (residual {residual:e})")]
    NotAnEigenstate { residual: f64 },
    #[error("invalid stabilizer: {0}")]
    InvalidStabilizer(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    q: u32,
    n_qudits: usize,
    amps: Vec<Complex64>,
}

fn omega_powers(q: u32) -> Vec<Complex64> {
    (0..q).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / q as f64)).collect()
}

fn dimension(q: u32, n: usize, cap: usize) -> Result<usize, QsimError> {
    let dim = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(QsimError::TooLarge { dim, cap });
    }
    Ok(dim as usize)
}

impl StateVector {
    /// The computational basis state `|digits⟩`.
    pub fn basis(q: u32, digits: &[Elem]) -> Self {
        let n = digits.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); (q as usize).pow(n as u32)];
        let idx = digits.iter().fold(0usize, |acc, &d| acc * q as usize + (d % q) as usize);
        amps[idx] = Complex64::new(1.0, 0.0);
        StateVector { q, n_qudits: n, amps }
    }

    /// A state with the given amplitudes, rescaled to unit norm. `None` if the
    /// length is not `q^n_qudits` or all amplitudes vanish.
    pub fn from_amplitudes(q: u32, n_qudits: usize, amps: Vec<Complex64>) -> Option<Self> {
        if amps.len() != (q as usize).checked_pow(n_qudits as u32)? {
            return None;
        }
        let mut s = StateVector { q, n_qudits, amps };
        if s.norm() == 0.0 {
            return None;
        }
        s.normalize();
        Some(s)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n_qudits(&self) -> usize {
        self.n_qudits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalize(&mut self) {
        let n = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= n);
    }

    fn stride(&self, qudit: usize) -> usize {
        (self.q as usize).pow((self.n_qudits - 1 - qudit) as u32)
    }

    /// Basis label of flat index `idx`.
    fn digits(&self, idx: usize) -> Vec<u32> {
        let q = self.q as usize;
        let mut out = vec![0; self.n_qudits];
        let mut rest = idx;
        for d in out.iter_mut().rev() {
            *d = (rest % q) as u32;
            rest /= q;
        }
        out
    }

    /// Index of basis label `digits + shift` (componentwise mod q).
    fn shifted(&self, digits: &[u32], shift: &[Elem]) -> usize {
        let q = self.q;
        digits.iter().zip(shift).fold(0usize, |acc, (&d, &s)| acc * q as usize + ((d + s) % q) as usize)
    }

    /// `X(a)Z(b)` on one qudit, in place.
    ///
    /// # Panics
    /// If `qudit` is out of range.
    pub fn apply_pauli_mut(&mut self, qudit: usize, a: Elem, b: Elem) {
        assert!(qudit < self.n_qudits, "qudit {qudit} out of range");
        let q = self.q as usize;
        let (a, b) = (a as usize % q, b as usize % q);
        let stride = self.stride(qudit);
        let w = omega_powers(self.q);
        let block = stride * q;
        let mut tmp = vec![Complex64::new(0.0, 0.0); q];
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                for j in 0..q {
                    tmp[(j + a) % q] = w[(b * j) % q] * self.amps[base + off + j * stride];
                }
                for (j, v) in tmp.iter().enumerate() {
                    self.amps[base + off + j * stride] = *v;
                }
            }
        }
    }
}

/// `X(a)Z(b)` on `qudit`, returning a new state.
pub fn apply_pauli(state: &StateVector, qudit: usize, a: Elem, b: Elem) -> StateVector {
    let mut out = state.clone();
    out.apply_pauli_mut(qudit, a, b);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizerKind {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    pub exponents: Vec<Elem>,
}

impl Stabilizer {
    pub fn new(kind: StabilizerKind, exponents: Vec<Elem>) -> Result<Self, QsimError> {
        if exponents.iter().all(|&e| e == 0) {
            return Err(QsimError::InvalidStabilizer("all exponents are zero".into()));
        }
        Ok(Stabilizer { kind, exponents })
    }

    /// `S|ψ⟩`, with X-type generators applied as `⊗ X^{-e_i}`.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        let q = state.q as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
        match self.kind {
            StabilizerKind::Z => {
                let w = omega_powers(state.q);
                for (idx, o) in out.iter_mut().enumerate() {
                    let d = state.digits(idx);
                    let phase = d.iter().zip(&self.exponents).map(|(&j, &e)| j as usize * e as usize).sum::<usize>() % q;
                    *o = w[phase] * state.amps[idx];
                }
            }
            StabilizerKind::X => {
                for (idx, o) in out.iter_mut().enumerate() {
                    *o = state.amps[state.shifted(&state.digits(idx), &self.exponents)];
                }
            }
        }
        StateVector { q: state.q, n_qudits: state.n_qudits, amps: out }
    }
}

/// Z-type generators (rows of `H_Z`) followed by X-type generators (rows of `H_X`).
pub fn stabilizers(css: &CssCode) -> Vec<Stabilizer> {
    let z = css.h_z().to_rows().into_iter().map(|e| Stabilizer { kind: StabilizerKind::Z, exponents: e });
    let x = css.h_x().to_rows().into_iter().map(|e| Stabilizer { kind: StabilizerKind::X, exponents: e });
    z.chain(x).collect()
}

/// `(1/q) Σ_c (⊗ X^{e})^c` applied in place.
fn project_x(state: &mut StateVector, e: &[Elem]) {
    let q = state.q;
    let mut acc = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    let mut shift = vec![0; e.len()];
    for _ in 0..q {
        for (idx, a) in acc.iter_mut().enumerate() {
            *a += state.amps[state.shifted(&state.digits(idx), &shift)];
        }
        shift.iter_mut().zip(e).for_each(|(s, &v)| *s = (*s + v) % q);
    }
    state.amps = acc.into_iter().map(|a| a / q as f64).collect();
}

/// The canonical codespace state: the X-type projector applied to `|0…0⟩`,
/// normalized.
pub fn codespace_state(css: &CssCode) -> Result<StateVector, QsimError> {
    codespace_state_with_cap(css, DEFAULT_CAP)
}

pub fn codespace_state_with_cap(css: &CssCode, cap: usize) -> Result<StateVector, QsimError> {
    dimension(css.q(), css.n_qudits(), cap)?;
    let mut state = StateVector::basis(css.q(), &vec![0; css.n_qudits()]);
    for row in css.h_x().to_rows() {
        project_x(&mut state, &row);
    }
    state.normalize();
    Ok(state)
}

/// Trace of the full codespace projector, computed basis state by basis state.
pub fn codespace_dimension(css: &CssCode, cap: usize) -> Result<f64, QsimError> {
    let dim = dimension(css.q(), css.n_qudits(), cap)?;
    let mut trace = 0.0;
    let z_rows = css.h_z().to_rows();
    for idx in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[idx] = Complex64::new(1.0, 0.0);
        let mut state = StateVector { q: css.q(), n_qudits: css.n_qudits(), amps };
        for row in &z_rows {
            project_z(&mut state, row);
        }
        for row in css.h_x().to_rows() {
            project_x(&mut state, &row);
        }
        trace += state.amps[idx].re;
    }
    Ok(trace)
}

/// `(1/q) Σ_c (⊗ Z^{e})^c` applied in place.
fn project_z(state: &mut StateVector, e: &[Elem]) {
    let stab = Stabilizer { kind: StabilizerKind::Z, exponents: e.to_vec() };
    let q = state.q;
    let mut acc = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    let mut cur = state.clone();
    for _ in 0..q {
        acc.iter_mut().zip(&cur.amps).for_each(|(a, c)| *a += c);
        cur = stab.apply(&cur);
    }
    state.amps = acc.into_iter().map(|a| a / q as f64).collect();
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub value: Elem,
    /// `‖S ψ − ω^value ψ‖`.
    pub residual: f64,
}

/// Eigenvalue exponent of `S` on an exact eigenstate.
pub fn measure_stabilizer_eigenvalue(state: &StateVector, stab: &Stabilizer) -> Result<Measurement, QsimError> {
    if stab.exponents.len() != state.n_qudits {
        return Err(QsimError::InvalidStabilizer(format!(
            "{} exponents for {} qudits",
            stab.exponents.len(),
            state.n_qudits
        )));
    }
    let phi = stab.apply(state);
    let (pivot, _) = state
        .amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .expect("state has at least one amplitude");
    let ratio = phi.amps[pivot] / state.amps[pivot];
    let q = state.q as i64;
    let value = ((ratio.arg() * q as f64 / TAU).round() as i64).rem_euclid(q) as Elem;
    let w = Complex64::from_polar(1.0, TAU * value as f64 / q as f64);
    let residual = phi.amps.iter().zip(&state.amps).map(|(p, s)| (p - w * s).norm_sqr()).sum::<f64>().sqrt();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(residual < EIGEN_TOLERANCE) {
        return Err(QsimError::NotAnEigenstate { residual });
    }
    Ok(Measurement { value, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRecord {
    pub syndromes: SyndromePair,
    pub matches_algebraic: bool,
    /// Largest eigenstate residual over all generators.
    pub max_residual: f64,
}

/// Hilbert-space simulator for one protocol instance, with the codespace
/// state prepared once.
#[derive(Debug, Clone)]
pub struct QuantumSimulator<'a> {
    instance: &'a ProtocolInstance,
    psi: StateVector,
    stabilizers: Vec<Stabilizer>,
}

impl<'a> QuantumSimulator<'a> {
    pub fn new(instance: &'a ProtocolInstance, cap: usize) -> Result<Self, QsimError> {
        let psi = codespace_state_with_cap(instance.css(), cap)?;
        Ok(QuantumSimulator { instance, psi, stabilizers: stabilizers(instance.css()) })
    }

    pub fn run(&self, m_prime: &[Elem]) -> Result<QuantumRecord, QsimError> {
        let encodings = self.instance.encode_all(m_prime)?;
        let css = self.instance.css();
        let mut state = self.psi.clone();
        for e in &encodings {
            for (offset, j) in css.ownership(e.helper).enumerate() {
                state.apply_pauli_mut(j, e.x[offset], e.z[offset]);
            }
        }
        let mut values = Vec::with_capacity(self.stabilizers.len());
        let mut max_residual: f64 = 0.0;
        for s in &self.stabilizers {
            let m = measure_stabilizer_eigenvalue(&state, s)?;
            max_residual = max_residual.max(m.residual);
            values.push(m.value);
        }
        let s_z = values.split_off(css.r_x());
        let syndromes = SyndromePair { s_x: values, s_z };
        let matches_algebraic = syndromes == self.instance.syndrome_extract(&encodings)?;
        Ok(QuantumRecord { syndromes, matches_algebraic, max_residual })
    }
}

/// One round through the Hilbert-space oracle with the default cap.
pub fn run_quantum_update(instance: &ProtocolInstance, m_prime: &[Elem]) -> Result<QuantumRecord, QsimError> {
    QuantumSimulator::new(instance, DEFAULT_CAP)?.run(m_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mds::{fixtures, MdsCode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn single_qudit_examples() {
        let s = StateVector::basis(5, &[0]);
        assert_eq!(apply_pauli(&s, 0, 0, 0), s);
        assert_eq!(apply_pauli(&s, 0, 2, 0), StateVector::basis(5, &[2]));
        let one = StateVector::basis(5, &[1]);
        let out = apply_pauli(&one, 0, 0, 1);
        assert!(close(out.amplitudes()[1], Complex64::from_polar(1.0, TAU / 5.0)));
    }

    #[test]
    fn big_endian_layout() {
        let s = StateVector::basis(3, &[1, 0, 2]);
        assert_eq!(s.amplitudes()[9 + 2].re, 1.0);
        let t = apply_pauli(&s, 2, 1, 0);
        assert_eq!(t.amplitudes()[9].re, 1.0);
    }

    #[test]
    fn commutation_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = 7;
        let mut s = StateVector::basis(q, &[0, 0]);
        s.amps.iter_mut().for_each(|a| *a = Complex64::new(rng.random(), rng.random()));
        s.normalize();
        for (a, b) in [(1, 1), (2, 5), (6, 3)] {
            let xz = apply_pauli(&s, 1, a, b);
            let zx = apply_pauli(&apply_pauli(&s, 1, a, 0), 1, 0, b);
            let phase = Complex64::from_polar(1.0, TAU * ((a * b) % q) as f64 / q as f64);
            for (u, v) in zx.amplitudes().iter().zip(xz.amplitudes()) {
                assert!(close(*u, phase * v));
            }
            assert!((xz.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_state() {
        let css = CssCode::build_css_bell(1, 5).unwrap();
        let psi = codespace_state(&css).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-9);
        let amp = 1.0 / 5f64.sqrt();
        for j in 0..5 {
            for l in 0..5 {
                let expect = if j == l { amp } else { 0.0 };
                assert!((psi.amplitudes()[j * 5 + l] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        for s in stabilizers(&css) {
            assert_eq!(measure_stabilizer_eigenvalue(&psi, &s).unwrap().value, 0);
        }
        assert!((codespace_dimension(&css, 1000).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn codespace_dimension_for_larger_codes() {
        // n_q = 4, alpha = 3 gives one logical qudit.
        let css = CssCode::build_css_general(3, 2, 5).unwrap();
        assert!((codespace_dimension(&css, 1000).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn eigenvalue_shifts() {
        let css = CssCode::build_css_general(3, 2, 5).unwrap();
        let psi = codespace_state(&css).unwrap();
        let stabs = stabilizers(&css);
        let f = css.field();
        for i in 0..css.n_qudits() {
            for (x, z) in [(1, 0), (0, 1), (3, 4)] {
                let s = apply_pauli(&psi, i, x, z);
                for st in &stabs {
                    let m = measure_stabilizer_eigenvalue(&s, st).unwrap();
                    let expect = match st.kind {
                        StabilizerKind::Z => f.mul(st.exponents[i], x),
                        StabilizerKind::X => f.mul(st.exponents[i], z),
                    };
                    assert_eq!(m.value, expect);
                    assert!(m.residual < 1e-8);
                }
            }
        }
    }

    #[test]
    fn non_eigenstate_is_rejected() {
        let css = CssCode::build_css_bell(1, 5).unwrap();
        let s = StateVector::basis(5, &[1, 2]);
        let x_type = stabilizers(&css).pop().unwrap();
        assert!(matches!(measure_stabilizer_eigenvalue(&s, &x_type), Err(QsimError::NotAnEigenstate { .. })));
        assert!(Stabilizer::new(StabilizerKind::Z, vec![0, 0]).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let css = CssCode::build_css_general(3, 3, 7).unwrap();
        assert!(matches!(codespace_state_with_cap(&css, 1000), Err(QsimError::TooLarge { dim: 117_649, cap: 1000 })));
    }

    #[test]
    fn example_round_matches_algebra() {
        let mds = fixtures::systematic_3_2(5).unwrap();
        let inst = ProtocolInstance::bind(mds, CssCode::build_css_bell(2, 5).unwrap(), &[0, 1], 2).unwrap();
        let rec = run_quantum_update(&inst, &[1, 2, 3, 4]).unwrap();
        assert!(rec.matches_algebraic);
        assert_eq!(rec.syndromes, SyndromePair { s_x: vec![4], s_z: vec![1] });
    }

    #[test]
    fn alpha3_round_matches_algebra() {
        let mds = MdsCode::build_interleaved_rs(4, 2, 3, 7).unwrap();
        let inst = ProtocolInstance::bind(mds, CssCode::build_css_general(3, 2, 7).unwrap(), &[2, 0], 1).unwrap();
        let sim = QuantumSimulator::new(&inst, DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mp: Vec<u32> = (0..6).map(|_| rng.random_range(0..7)).collect();
            let rec = sim.run(&mp).unwrap();
            assert!(rec.matches_algebraic);
            assert_eq!(rec.syndromes.to_share(), inst.mds().encode_node(1, &mp).unwrap().data);
        }
    }
}
