//! Finite-dimensional ordered *-algebras over the complex numbers.
//!
//! The crate models a unital associative *-algebra through its structure
//! constants and layers the order-theoretic machinery on top:
//!
//! - [`algebra`]: algebra construction, multiplication, involution,
//!   inversion, and Hermitian decomposition.
//! - [`cone`]: positivity cones (block-PSD and functional-generated),
//!   order comparisons, coercivity, dominant sets.
//! - [`functional`]: linear functionals, states, the dual bimodule
//!   actions, variance, and purity tests.
//! - [`gns`]: the GNS construction, representation norms, and the
//!   moment sequences of a state.
//! - [`character`]: multiplicative states, their enumeration, and the
//!   comparison of pure states against characters.
//! - [`moments`]: scalar moment sequences, growth diagnostics, Carleman
//!   classification, and the moment-to-Jacobi transformation.
//!
//! All sampling operations take explicit seeds; given equal inputs and
//! seeds every operation is deterministic.

pub mod algebra;
pub mod character;
pub mod cone;
pub mod error;
pub mod functional;
pub mod gns;
pub mod jacobi;
pub mod linalg;
pub mod moments;
pub mod polyhedral;
pub mod sampling;

pub use algebra::{Element, StarAlgebra};
pub use cone::{ConeModel, DominantSet};
pub use error::Error;
pub use functional::{Functional, State};
pub use gns::GnsData;
pub use moments::MomentSequence;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Result alias for fallible crate operations.
pub type Result<T> = std::result::Result<T, Error>;
