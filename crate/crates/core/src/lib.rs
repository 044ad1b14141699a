//! Probabilistic remote control of a quantum system: the target is entangled
//! with an identical control system, the control is rotated and measured,
//! and the measurement induces a non-unitary (Kraus) map on the target.
//!
//! The numerics are generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`). The aliases in [`f64s`] fix the scalar to `f64`.

pub mod bloch;
pub mod decoh;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod qcore;
pub mod random;
pub mod reach;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use qcore::{
    partial_trace, purity, schmidt_decompose, schmidt_number, tensor, BipartiteState, DensityMatrix, PureState,
    SchmidtDecomposition, Subsystem, UnitaryGate,
};
pub use scalar::{Real, C};

/// Double-precision aliases.
pub mod f64s {
    pub type Complex = crate::scalar::C<f64>;
    pub type Matrix = crate::linalg::CMatrix<f64>;
    pub type PureState = crate::qcore::PureState<f64>;
    pub type DensityMatrix = crate::qcore::DensityMatrix<f64>;
    pub type BipartiteState = crate::qcore::BipartiteState<f64>;
    pub type UnitaryGate = crate::qcore::UnitaryGate<f64>;
    pub type EntangledPair = crate::protocol::EntangledPair<f64>;
    pub type KrausBranch = crate::protocol::KrausBranch<f64>;
    pub type CoherentVector = crate::bloch::CoherentVector<f64>;
    pub type GeometryReport = crate::bloch::GeometryReport<f64>;
    pub type TripartiteState = crate::decoh::TripartiteState<f64>;
    pub type TrialSpec = crate::reach::TrialSpec<f64>;
    pub type TrialResult = crate::reach::TrialResult<f64>;
}
