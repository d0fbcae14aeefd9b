//! Complex-matrix foundations: dense matrices, Hermitian observables,
//! quantum channels, superoperators, and seeded randomness.

pub mod channel;
pub mod cmatrix;
pub mod herm;
pub mod linalg;
pub mod random;
pub mod transfer;

pub use channel::{choi_from_kraus, is_cptp, CptpDiagnostics, QuantumChannel};
pub use cmatrix::{ComplexMatrix, ComplexVector, C64};
pub use herm::{HermitianOperator, ObservableSet};
pub use random::SeedSplitter;
pub use transfer::{cesaro_mean, TransferMatrix};
