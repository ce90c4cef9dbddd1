//! Spin-1/2 Hilbert-space plumbing: states, dense operators, Pauli strings,
//! bit kernels and dense eigensolvers.

mod eigen;
pub mod kernels;
mod operator;
mod pauli;
mod state;

pub use eigen::{
    eig_hermitian, eig_unitary, eigvals_hermitian, wrap_phase, HermitianEigen, UnitaryEigen,
    RECONSTRUCTION_TOL,
};
pub(crate) use eigen::hermitian_eigen;
pub use operator::{DenseOperator, DenseUnitary, HERMITIAN_TOL, UNITARY_TOL};
pub(crate) use operator::matvec;
pub use pauli::{apply_pauli_string, pauli_sum, Axis, PauliString};
pub use state::{StateVector, NORM_TOL};
