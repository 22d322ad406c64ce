//! Exact combinatorics of A-hypergeometric systems.
//!
//! A point configuration `A` is an integer matrix whose columns lie on an
//! affine hyperplane. The crate computes its face lattice and face
//! saturations, the multiplicities `m(A, Γ) = i(A, Γ) v(A, Γ)` of the
//! principal A-determinant, regular triangulations and the secondary
//! polytope, Γ-series solutions of `H_A(β)` and their extension across
//! lattice-redundant columns, and for monomial curves the principal
//! determinant, the reduced scalar equation and its monodromy.
//!
//! All combinatorial and symbolic work is exact (`BigInt`/`BigRational`);
//! only the monodromy continuation uses floating point.

pub mod config;
pub mod curves;
pub mod error;
pub mod hyper;
pub mod lattice;
pub mod lp;
pub mod matrix;
pub mod polytope;
pub mod secondary;

pub use config::{PointConfiguration, SaturationMode};
pub use curves::{MPoly, MonomialCurveConfig};
pub use error::{Error, Result};
pub use hyper::{ParameterVector, TruncatedSeries};
pub use lattice::{AffineLattice, Lattice, QuotientLattice};
pub use matrix::{Int, IntMatrix, Rat};
pub use polytope::{Face, Polytope};
pub use secondary::Triangulation;
