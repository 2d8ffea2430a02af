//! Exact lattice enumeration and truncated Siegel theta series of even
//! unimodular lattices.

pub mod decimal;
pub mod enumeration;
pub mod exactnum;
pub mod jacobi;
pub mod lattice;
pub mod theta;

pub use enumeration::{CoefficientCache, Engine, EnumerationError, GramTarget, ShellTable};
pub use exactnum::{ExactError, IntMatrix, RatMatrix};
pub use lattice::{GlueSpec, Lattice, LatticeError, RootSystemReport};
pub use theta::{FormalDifference, ThetaError, ThetaTruncation};
pub use jacobi::{JacobiCoefficient, JacobiError, VenkovReport};
