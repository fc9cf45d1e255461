//! Numerical toolkit for model spaces `K_u`, their conjugations `C_u`, and
//! truncated Toeplitz operators, for finite Blaschke products `u`.
//!
//! Everything is finite-dimensional: `K_u` has dimension `deg u`, operators
//! are complex matrices in a Takenaka–Malmquist basis, and the antilinear
//! conjugation `C_u` is the matrix `J` acting by `x ↦ J·conj(x)`. Boundary
//! inner products use a uniform trapezoid grid on the circle.

pub mod conjugation;
pub mod error;
pub mod inner;
pub mod linalg;
pub mod modelspace;
pub mod moebius;
pub mod random;
pub mod singular_limits;
pub mod tolerances;
pub mod tto;

pub use num_complex::Complex64;

pub use conjugation::{lemma1_residual, Conjugation, SymmetryCheck};
pub use error::{Error, Result};
pub use inner::{Atom, AtomicMeasure, BlaschkeProduct, InnerFunction, InnerSpec, SingularInner};
pub use linalg::{CMat, CVec};
pub use modelspace::{ModelSpace, ModelVector, QuadratureGrid, DEFAULT_GRID_SIZE};
pub use moebius::{compose_with_automorphism, CrofootReport, Crofoot};
pub use singular_limits::{ArcItem, Lemma5Report, RationalFunction};
pub use tolerances::Tolerances;
pub use tto::{ConstraintSpace, ModelOperator, TheoremReport, TtoSpace};
