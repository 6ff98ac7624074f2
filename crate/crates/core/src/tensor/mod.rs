//! Matrix fields with Whitney 1-form rows: row-wise calculus, symmetric and
//! skew parts, the skew projection, rigid motions, row-wise Helmholtz
//! splits and the sampling harness for the main inequality.

mod calculus;
mod field;
mod forms;
mod helmholtz;
mod material;
mod verify;

pub use calculus::{
    integral_map, pi_so, rigid_motion_projection, skew_part, sym_skew_norms, RigidMotion, SymSkewNorms,
};
pub use field::{grad_vector_field, row_curl, skew_basis, TensorField};
pub use forms::{TensorForms, TENSOR_QUADRATURE_DEGREE};
pub use helmholtz::{helmholtz_split_tensor, TensorSplit};
pub use material::MaterialField;
pub use verify::{
    verify_main_inequality, verify_media_variant, Case, MediaSection, ProofChain, Sampling, UsedConstants,
    VerificationReport, CHAIN_TOL, DEFAULT_SLACK, SKEW_MATCH_TOL,
};
