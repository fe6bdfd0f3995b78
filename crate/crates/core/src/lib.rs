//! Numerical toolkit for operators on finite-dimensional Hilbert spaces
//! relative to the annulus `A_r = {z : r < |z| < 1}`.
//!
//! The crate classifies matrices (A_r-unitary, A_r-isometry, A_r-contraction
//! candidate, atom type), computes the single-operator decompositions
//! (unitary / r-times-unitary, Wold, canonical, Levan), the joint
//! decompositions of finite tuples, Brehmer positivity operators, and
//! generators for the standard model operators.

pub mod brehmer;
pub mod classify;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod family;
pub mod io;
pub mod linops;
pub mod models;
pub mod params;

pub use classify::{AtomLabel, CnuLabel, UnitaryTypeLabel};
pub use decompose::{SplitPart, SplitReport};
pub use error::{Error, Result};
pub use family::{Alphabet, FamilyPart, FamilyReport, TypeAssignment, TypeLabel};

pub use linops::{ComplexMatrix, Subspace};
pub use num_complex::Complex64;
pub use params::{AnnulusParams, ToleranceProfile};
