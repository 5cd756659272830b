//! Exact integer linear algebra and finite abelian groups.

pub mod arith;
mod group;
mod matrix;
mod normal_form;

pub use group::{
    direct_sum, direct_sum_hom, direct_sum_with_maps, group_from_relations, hom_cokernel, hom_image, hom_kernel, image_order,
    iso_type_equal, presentation_from_orders, subgroup_from_lattice, subgroup_generated, sylow_with_maps,
    FiniteAbelianGroup, GroupHom, PresentedGroup,
};
pub use matrix::IntMatrix;
pub use normal_form::{hnf, integer_kernel, smith, snf, solve_congruences, solve_integer_system, SmithForm};

use crate::error::Result;

/// The p-part of a group.
pub fn sylow(g: &FiniteAbelianGroup, p: u64) -> Result<FiniteAbelianGroup> {
    g.sylow(p)
}
