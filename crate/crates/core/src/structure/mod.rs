//! Structural results built on the symmetry algebra: balanced models, chain
//! decompositions of generalized rotations and the analysis of nonrigid components.

mod balanced;
mod chain;
mod coords;
mod hermitian;
mod jacobian;
mod lemtub;
mod nc;

pub use balanced::{balanced_test, balanced_weights, diagonal_field, diagonal_reproducing, solve_reproducing, BalancedCertificate};
pub use chain::{chain_decomposition, verify_chain, ChainDecomposition, ChainPair, ChainVerification};
pub use coords::{forward_all, pullback_all, transform_p_all, CoordinateChange};
pub use hermitian::{expand_factorization, eye, minimal_factorization, HermitianForm};
pub use jacobian::{determinant, jacobian_delta, jacobian_delta_h, jacobian_matrix};
pub use lemtub::{lemtub_coefficients, lemtub_residual, lemtub_system};
pub use nc::{expand_in_x, nc_analysis, nc_analysis_with, solve_affine, NcCase, NcCondition, NcReport};
