//! Inversion of the operator Omega(g) = [[I, H+g], [H-g*, I]] from the data of
//! a two-sided extension problem over an admissible algebra.
//!
//! Two instances are provided: upper/lower triangular splitting of square
//! matrices ([`TriangularAlgebra`]) and matrix trigonometric polynomials split
//! by index sign ([`SequenceAlgebra`]).

pub mod algebra;
pub mod cli;
pub mod conditions;
pub mod data;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod operators;
pub mod sequence;
pub mod selftest;
pub mod solver;

pub use algebra::{Algebra, Block, InstanceKind, Mask, PartTag, Sign, Subspace};
pub use conditions::{check_conditions, CheckReport};
pub use data::{AnyDataSet, DataSet, Tolerances};
pub use error::{Error, Result};
pub use matrix::TriangularAlgebra;
pub use operators::{build_omega, build_r, Basis, BlockOperator, ROperators, Segment, Window};
pub use sequence::{MatSeq, SequenceAlgebra};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
