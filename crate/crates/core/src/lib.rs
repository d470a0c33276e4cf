//! Exact construction, evaluation and verification of multivariate
//! Krawtchouk polynomials.
//!
//! The crate is organized bottom-up:
//!
//! - [`numeric`]: scalars (exact rational or complex float), Pochhammer
//!   symbols, multinomials, the simplex lattice and kernel-matrix enumeration.
//! - [`kappa`]: validated parameter sets, the bispectral involution and the
//!   three explicit families.
//! - [`hyperg`]: evaluation by the hypergeometric sum and by the generating
//!   function, tables, orthogonality and duality checks.
//! - [`liemod`]: the `sl_{d+1}` picture; both Cartan bases, the
//!   antiautomorphism, the module of homogeneous polynomials, the bilinear
//!   form and the pairing evaluation.
//! - [`bispec`]: the two commuting families of difference operators and the
//!   universal operator.
//! - [`format`]: the JSON file formats.
//! - [`suite`]: the named verification suites run by the front ends.

pub mod bispec;
pub mod format;
pub mod hyperg;
pub mod kappa;
pub mod liemod;
pub mod matrix;
pub mod numeric;
pub mod report;
pub mod suite;

pub use kappa::{ParameterSet, RawParameters};
pub use numeric::{Approx, Exact, Scalar};
pub use report::CheckReport;
