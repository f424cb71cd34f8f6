//! Hypocoercivity certificates for linearized BGK models on the torus.
//!
//! The crate assembles Hermite-spectral matrix representations of the
//! linearized BGK equation in one, two and three velocity dimensions,
//! computes hypocoercivity indices of (skew, dissipative) matrix pairs,
//! builds Lyapunov transformation matrices `P`, and evaluates closed-form
//! decay-rate certificates that are cross-checked against dense numerical
//! eigenvalue computations and modal time integration.
//!
//! Module overview:
//!
//! - [`hermite`]: Hermite function bases, orderings and quadrature.
//! - [`operators`]: truncated transport and collision matrices.
//! - [`hypo_index`]: hypocoercivity index and equivalent conditions.
//! - [`lyapunov`]: transformation matrices and their construction.
//! - [`certificate`]: closed-form minors and certified decay rates.
//! - [`spectral`]: dense eigenvalue solver and spectral-gap studies.
//! - [`simulation`]: modal evolution, entropies and `L¹` distances.
//! - [`io`]: matrix serialization helpers.

pub mod certificate;
pub mod eigen;
pub mod error;
pub mod hermite;
pub mod hypo_index;
pub mod io;
pub mod linalg;
pub mod lyapunov;
pub mod operators;
pub mod simulation;
pub mod spectral;

pub use error::{HypoError, Result};
pub use linalg::{CMatrix, CVector};
