//! Exact-arithmetic toolkit for quiver mutation, quivers with potential,
//! truncated Jacobian algebras, graded mutation and triangulated polygons.
//!
//! All coefficients are exact rationals. Paths are stored in traversal order
//! (first-traversed arrow first); the `Display` impls print products
//! right-to-left, so the cycle traversing `c`, then `d`, then `e` prints as
//! `edc`.

pub mod canonical;
pub mod error;
pub mod explorer;
pub mod graded;
pub mod linalg;
pub mod path_algebra;
pub mod qp;
pub mod quiver;
pub mod rational;
pub mod surface;
pub mod wire;

pub use error::{Error, ErrorClass, Result};
pub use graded::{GradedQp, PresentedAlgebra, Side};
pub use path_algebra::{AlgebraElement, CycleClass, DimensionResult, Path, Potential};
pub use qp::{Qp, ReductionReport, Rigidity};
pub use quiver::{Arrow, ArrowId, ExchangeMatrix, Quiver, Vertex};
pub use rational::Rational;
pub use surface::{SideKind, Triangulation};

/// Default truncation order for potentials and substitutions.
pub const DEFAULT_TRUNCATION: usize = 12;
