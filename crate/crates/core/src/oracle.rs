//! Syndrome oracles: independent ways of checking one protocol round.

use thiserror::Error;

use crate::field::Elem;
use crate::protocol::{ProtocolError, ProtocolInstance, RoundScratch};
use crate::qsim::{QsimError, QuantumSimulator, DEFAULT_CAP};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Result of checking one updated message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseOutcome {
    pub pass: bool,
    /// Largest eigenstate residual, zero for exact oracles.
    pub residual: f64,
}

/// An oracle bound to one protocol instance.
pub trait PreparedOracle {
    fn check(&mut self, m_prime: &[Elem]) -> Result<CaseOutcome, OracleError>;
}

pub trait SyndromeOracle: Named + Send + Sync {
    fn prepare<'a>(&self, instance: &'a ProtocolInstance) -> Result<Box<dyn PreparedOracle + 'a>, OracleError>;
}

/// Finite-field rounds: the reconstructed share must equal `Γ_s m'`.
pub struct Algebraic;

struct AlgebraicRun<'a> {
    instance: &'a ProtocolInstance,
    scratch: RoundScratch,
}

impl PreparedOracle for AlgebraicRun<'_> {
    fn check(&mut self, m_prime: &[Elem]) -> Result<CaseOutcome, OracleError> {
        Ok(CaseOutcome { pass: self.instance.check_update(m_prime, &mut self.scratch), residual: 0.0 })
    }
}

impl Named for Algebraic {
    fn name(&self) -> &'static str {
        "algebraic"
    }

    fn description(&self) -> &'static str {
        "exact syndrome arithmetic over F_q"
    }
}

impl SyndromeOracle for Algebraic {
    fn prepare<'a>(&self, instance: &'a ProtocolInstance) -> Result<Box<dyn PreparedOracle + 'a>, OracleError> {
        Ok(Box::new(AlgebraicRun { instance, scratch: instance.scratch() }))
    }
}

/// State-vector rounds: measured syndromes must equal the algebraic ones and
/// reconstruct `Γ_s m'`.
pub struct Hilbert {
    pub cap: usize,
}

impl Default for Hilbert {
    fn default() -> Self {
        Hilbert { cap: DEFAULT_CAP }
    }
}

struct HilbertRun<'a> {
    instance: &'a ProtocolInstance,
    sim: QuantumSimulator<'a>,
}

impl PreparedOracle for HilbertRun<'_> {
    fn check(&mut self, m_prime: &[Elem]) -> Result<CaseOutcome, OracleError> {
        let rec = self.sim.run(m_prime)?;
        let expected = self.instance.mds().encode_node(self.instance.stale(), m_prime).map_err(ProtocolError::from)?;
        Ok(CaseOutcome {
            pass: rec.matches_algebraic && rec.syndromes.to_share() == expected.data,
            residual: rec.max_residual,
        })
    }
}

impl Named for Hilbert {
    fn name(&self) -> &'static str {
        "quantum"
    }

    fn description(&self) -> &'static str {
        "dense state-vector simulation of the shared CSS state"
    }
}

impl SyndromeOracle for Hilbert {
    fn prepare<'a>(&self, instance: &'a ProtocolInstance) -> Result<Box<dyn PreparedOracle + 'a>, OracleError> {
        Ok(Box::new(HilbertRun { instance, sim: QuantumSimulator::new(instance, self.cap)? }))
    }
}

pub fn syndrome_oracles() -> Registry<dyn SyndromeOracle> {
    let mut r: Registry<dyn SyndromeOracle> = Registry::new();
    r.register(Box::new(Algebraic)).expect("unique");
    r.register(Box::new(Hilbert::default())).expect("unique");
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::CssCode;
    use crate::mds::fixtures;

    #[test]
    fn both_oracles_pass_and_detect_faults() {
        let mds = fixtures::systematic_3_2(5).unwrap();
        let mut inst = ProtocolInstance::bind(mds, CssCode::build_css_bell(3, 5).unwrap(), &[1, 0], 2).unwrap();
        let reg = syndrome_oracles();
        assert_eq!(reg.names(), vec!["algebraic", "quantum"]);
        for o in reg.iter() {
            let mut p = o.prepare(&inst).unwrap();
            assert!(p.check(&[4, 3, 2, 1]).unwrap().pass);
        }
        inst.corrupt_h_x_entry(0, 1, 1);
        // Broken dual containment may also surface as a non-eigenstate.
        for o in reg.iter() {
            let mut p = o.prepare(&inst).unwrap();
            assert!(p.check(&[4, 3, 2, 1]).map_or(true, |c| !c.pass), "{}", o.name());
        }
    }

    #[test]
    fn hilbert_cap() {
        let mds = crate::mds::MdsCode::build_interleaved_rs(4, 3, 3, 7).unwrap();
        let inst = ProtocolInstance::bind(mds, CssCode::build_css_general(3, 3, 7).unwrap(), &[0, 1, 2], 3).unwrap();
        assert!(matches!(Hilbert { cap: 10 }.prepare(&inst).err(), Some(OracleError::Qsim(QsimError::TooLarge { .. }))));
    }
}
