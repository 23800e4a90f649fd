//! Pauli-string algebra, q-local operators and matrix-free state action.

pub mod basis;
pub mod dense;
pub mod local;
pub mod notation;
pub mod pauli;
pub mod state;

pub use basis::{enumerate_q_local_basis, q_local_count};
pub use dense::{operator_norm, to_dense, to_dense_real, NormMode};
pub use local::{apply_local_operator, apply_pauli, LocalOperator};
pub use notation::{format_operator, parse_operator, parse_pauli};
pub use pauli::{Letter, PauliString, Phase};
pub use state::{inner, Representation, StateVector};
