//! Group homology of finite groups with coefficients, induced maps of
//! stabilization homomorphisms, and stability sweeps.

pub mod bar;
pub mod group;
pub mod induced;
pub mod module;
pub mod presentation;
pub mod resolution;
pub mod sweep;

pub use bar::{bar_complex, coinvariants, BarCaps};
pub use group::{FiniteGroup, GroupHom};
pub use module::{GModule, IntMat, Scalars};
pub use resolution::{resolution_homology, ResolutionCaps};
