//! Homological stability workbench for concrete finite group families.
//!
//! The crate builds, for a braided monoidal family of finite groups
//! (symmetric groups, general linear groups over `Z/m`, hyperoctahedral
//! groups), the semi-simplicial spaces of destabilizations and their
//! associated simplicial complexes, computes exact homology over `Z` and
//! prime fields through sparse Smith normal form, computes group homology
//! with constant, abelian and polynomial coefficients through bar and
//! free-resolution methods, and sweeps stabilization maps against
//! predicted stability ranges.
//!
//! Two further subsystems round out the toolkit: exact tree-pair
//! arithmetic in the Higman-Thompson groups `V_{k,n}` with their
//! stabilization and subdivision maps, and the bracket construction `UG`
//! that adds non-invertible inclusions to a groupoid.

pub mod families;
pub mod grouphom;
pub mod homology;
pub mod spaces;

mod error;

pub use error::{Error, Result};
