//! Exact homology of chain complexes: sparse integer matrices, Smith
//! normal form, Betti numbers, torsion, and connectivity certificates.

pub mod chain;
pub mod modular;
pub mod snf;
pub mod sparse;

pub use chain::{
    connectivity_report, homology, ChainComplex, ConnectivityReport, HomologyResult,
    HomologySummand, Ring,
};
pub use snf::{rank, smith_normal_form, SnfResult};
pub use sparse::SparseIntMatrix;
