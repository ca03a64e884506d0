//! Entanglement, EPR-steering, unsteerability and Bell-nonlocality quantifiers
//! for two-qubit states under local amplitude damping.

pub mod bell;
pub mod entanglement;
pub mod error;
pub mod expsim;
pub mod qmath;
pub mod states;
pub mod steering;
pub mod sweep;
pub mod unsteering;

pub use error::{QcError, Result};
pub use states::{family_state, DensityMatrix, StatePoint};
