//! Quantum-assisted oblivious updates for MDS-coded storage.
//!
//! A stale node of an `(n, k)` MDS code with sub-packetization `alpha`
//! refreshes its share from `k` helpers. Helpers never learn which message
//! symbol changed: each applies Pauli operators to its `ceil(alpha/2)` qudits
//! of a shared CSS-code state, and the stale node reads its new share off the
//! stabilizer syndromes.

pub mod campaign;
pub mod css;
pub mod field;
pub mod matfile;
pub mod mds;
pub mod oracle;
pub mod protocol;
pub mod qsim;
pub mod registry;

pub use css::{CssCode, CssConstruction};
pub use field::{Elem, FieldError, FieldMatrix, PrimeField};
pub use mds::{MdsCode, MdsConstruction};
pub use protocol::{ProtocolError, ProtocolInstance};
pub use registry::{Named, Registry};
