//! k-collapsing families of vectors in finite-dimensional normed spaces.
//!
//! A family `x_1, ..., x_m` is k-collapsing when every k-element subset sums to a vector of
//! norm at most 1. This crate verifies the collapsing and balancing conditions in exact
//! rational arithmetic (or binary64 for `l_p` norms), evaluates the known bounds on the
//! largest such families, and builds the families that realise the lower bounds.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod family;
pub mod gf;
pub mod graphtools;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod matrixform;
pub mod scalar;
pub mod simplexopt;
pub mod spaces;
pub mod subsets;
pub mod vector;

pub use bounds::{best_bounds, BestBounds, BoundKind, BoundQuery, BoundResult, BoundValue, Quantity};
pub use constructions::{AlmostOrthogonalSet, FiniteFieldParams, PolynomialCode};
pub use error::{Error, Result};
pub use family::{Condition, ConditionReport, ScanOptions, VectorFamily};
pub use graphtools::{EquitableColoring, SimpleGraph};
pub use io::DynFamily;
pub use matrixform::{CollapseMatrix, RankCertificate};
pub use scalar::{Rational, Scalar};
pub use simplexopt::{Exactness, OptResult, OracleResult};
pub use spaces::{Cap, NormKind, NormSpace};
