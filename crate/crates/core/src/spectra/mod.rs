//! Poincaré, Maxwell, Korn and mixed constants from discrete eigenproblems.

mod composite;
mod korn;
mod poincare;
mod report;
mod sharp;

pub use composite::composite_constants;
pub use korn::{
    korn_irrotational, korn_rigid_constant, korn_standard_constant, korn_tangential_constant, rigid_modes,
    KornConstant, KornVariant, SlicedKorn, VectorP1,
};
pub use poincare::{d_constant, maxwell_constant, poincare_constant, PoincareConstant, SpectralConstant};
pub use report::{compute_constants, resolve_slices, ConstantsOptions, ConstantsReport};
pub use sharp::{sharp_mixed_constant, tensor_free_dofs, SharpConstant};

#[cfg(test)]
mod tests;
