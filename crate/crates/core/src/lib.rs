//! Numerical toolkit for finite-dimensional metric Lie algebras.
//!
//! Given a real Lie algebra by structure constants and a positive-definite
//! inner product, this crate computes the Levi-Civita connection (Koszul
//! formula), the vector space of parallel skew-symmetric endomorphisms,
//! curvature / Ricci / sectional curvature, the holonomy Lie algebra via
//! the span of curvature operators and their covariant derivatives, and an
//! orthogonal invariant-factor decomposition with flat / surface /
//! irreducible labels.
//!
//! A catalog of low-dimensional solvable examples (with their designated
//! parallel tensors and Kähler structures) is built in; see [`catalog`].
//!
//! All values are immutable after construction and every operation is a
//! pure function, so the API is safe to call concurrently. Operations that
//! draw random elements (witness search, commutant splitting) take an
//! explicit seed.
//!
//! ```
//! use std::collections::BTreeMap;
//! use metlie::holonomy::FactorKind;
//! use metlie::{catalog, derham_report, Tolerance};
//!
//! // aff(R) x aff(R) with metric diag(1, 1, s, s) splits into two
//! // hyperbolic surface factors of curvatures -1 and -1/s
//! let params = BTreeMap::from([("s".to_string(), 0.5)]);
//! let (mla, _tensors) = catalog::catalog_build("aff_x_aff", &params)?;
//! let report = derham_report(&mla, None, &Tolerance::default(), 0)?;
//! let kinds: Vec<_> = report.factors.iter().map(|f| f.kind).collect();
//! assert!(matches!(kinds[..], [FactorKind::Surface(_), FactorKind::Surface(_)]));
//! # Ok::<(), metlie::Error>(())
//! ```

// structure-constant arithmetic is clearest with explicit index loops
#![allow(clippy::needless_range_loop)]

pub use nalgebra;

pub mod algebra;
pub mod catalog;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod holonomy;
pub mod input;
pub mod linalg;
pub mod parallel;
pub mod tolerance;

pub use algebra::{
    center, change_basis, derived_subalgebra, orthonormal_frame, validate_lie_algebra, Frame,
    LieAlgebra, MetricLieAlgebra, StructureDiagnostic, Subspace,
};
pub use connection::{
    build_from_connection_forms, connection_form_decomposition, jacobi_relations, levi_civita,
    Connection, ConnectionForms,
};
pub use curvature::{curvature, ricci, sectional, CurvatureData, RicciData};
pub use error::Error;
pub use holonomy::{
    covariant_derivative_tensor, derham_report, holonomy_algebra, invariant_decomposition,
    matrix_to_two_form, two_form_to_matrix, DeRhamDecomposition, DeRhamFactor, FactorKind,
    HolonomyAlgebra, InvariantFactor, OperatorTensor, TwoForm,
};
pub use parallel::{
    classify_element, contains_non_complex_multiple, distinguish, fingerprint, parallel_space,
    Distinction, Fingerprint, ParallelBasis, RestrictionCharPoly, SkewEndomorphism, SpectralClass,
};
pub use tolerance::Tolerance;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
