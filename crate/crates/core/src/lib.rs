//! Driven disordered Ising chains: Floquet propagation, eigenphase
//! statistics, Porter-Thomas diagnostics, entanglement, Magnus terms, a
//! random-circuit baseline and the sweep harness that ties them together.

pub mod circuits;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod magnus;
pub mod model;
pub mod ops;
pub mod propagator;
pub mod sampling;
pub mod spectra;
pub mod stats;

pub use error::{Error, Result};
pub use model::{draw_disorder, DisorderRealization, SpinChainSpec};
pub use ops::{DenseOperator, DenseUnitary, StateVector};
pub use propagator::{floquet_unitary, FloquetOperators};
pub use sampling::{OutputDistribution, ProbabilityHistogram};
pub use spectra::{EigenphaseSet, Ensemble, RStatistics};
