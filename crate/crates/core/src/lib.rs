//! Discrete exterior calculus on simplicial meshes with mixed boundary
//! conditions: Whitney forms, Hodge decompositions, Poincaré, Maxwell and
//! Korn constants, and tensor-field inequalities combining them.
//!
//! Everything is generic over the scalar type; the aliases below fix `f64`.

// Index loops mirror the math in the assembly kernels; negated comparisons
// deliberately treat NaN as failure.
#![allow(
    clippy::needless_range_loop,
    clippy::type_complexity,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod error;
pub mod forms;
pub mod hodge;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod scalar;
pub mod snf;
pub mod spectra;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = mesh::SimplicialComplex<f64>;
pub type Form = forms::Cochain<f64>;
pub type Forms<'a> = forms::FormSystem<'a, f64>;
pub type Solver<'a> = hodge::HodgeSolver<'a, f64>;
pub type Tensor = tensor::TensorField<f64>;
pub type Material = tensor::MaterialField<f64>;
