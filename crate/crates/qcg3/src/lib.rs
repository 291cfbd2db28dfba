//! Quantum Clebsch-Gordan coefficients for tensor products of symmetric
//! representations of the rank-2 quantum deformation, with exact and
//! arbitrary-precision numeric scalar backends.
//!
//! The crate is organized bottom-up:
//!
//! - [`qscalar`]: q-numbers, q-factorials, q-Pochhammer symbols and the
//!   radical scalars the coefficients live in, over an exact or numeric
//!   backend.
//! - [`su2`]: rank-1 quantum Clebsch-Gordan coefficients via the closed form
//!   and the basic-hypergeometric form, plus the ladder factors used
//!   everywhere downstream.
//! - [`weights`]: rank-2 root/weight geometry, weight-diagram enumeration
//!   with shell multiplicities, and per-root subalgebra profiles.
//! - [`tensor`]: the coupled-state pipeline: highest-weight expansions,
//!   lowering with ladder-normalization factors, multiplicity resolution via
//!   path sequences and Gram-Schmidt, and full coefficient tables.
//! - [`oracle`]: independent brute-force verification through explicit
//!   coproduct generator matrices on the product basis.
//! - [`document`]: deterministic JSON/CSV/text serialization of tables and
//!   reports.

pub mod document;
pub mod error;
pub mod half;
pub mod oracle;
pub mod qscalar;
pub mod su2;
pub mod tensor;
pub mod weights;

pub use error::{Error, Result};
pub use half::Half;
pub use qscalar::{Backend, Scalar};
