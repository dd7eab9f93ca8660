//! Coding sequences from group compactifications of the integers.
//!
//! The library builds finitely described compactifications of `Z` (torus
//! rotations, cyclic quotients, truncated 3-adics and their products),
//! cuts Haar-continuity windows out of them and studies the resulting
//! 0-1 coding sequences: sliding-window Banach densities, almost
//! convergence, subword complexity, and the Fourier-Stieltjes machinery
//! around the ternary-Cantor product `prod_j cos^2(2 pi k / 3^j)`.
//!
//! Everything works on finite slices and finite truncations. Reports
//! carry the window sizes and scan ranges that produced them, so
//! truncation error stays visible.

pub mod cantor;
pub mod compactification;
pub mod complexity;
pub mod density;
pub mod error;
pub mod finite;
pub mod sequence;
pub mod window;

pub use cantor::DiscreteMeasure;
pub use compactification::{Alpha, CompactPoint, CompactificationSpec, FactorPoint};
pub use complexity::ComplexityProfile;
pub use density::{CesaroTrace, DensityReport, ZSequence};
pub use error::Error;
pub use finite::{CycleDecomposition, FiniteSystem, InvariantMeanSet};
pub use sequence::{SequenceSlice, SimpleFunction};
pub use window::{Arc, FactorConstraint, Window};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
