//! Exact integer linear algebra and presented abelian groups.

mod group;
mod matrix;
mod smith;

pub use group::{
    cokernel_group, morphism_is_iso, morphism_is_well_defined, FgAbGroup, GroupMorphism,
};
pub use matrix::IntMatrix;
pub use smith::{
    kernel_basis, rank, smith_diagonal, smith_normal_form, solve_linear, unimodular_inverse,
    SmithDecomposition,
};
