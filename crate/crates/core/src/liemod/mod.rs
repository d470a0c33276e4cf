//! `sl_{d+1}` machinery behind the polynomials: both Cartan bases as
//! explicit matrices, the module of degree-`N` homogeneous polynomials with
//! its two weight bases, and the bilinear form pairing them.

mod algebra;
mod form;
mod poly;

use thiserror::Error;

pub use algebra::{
    antiauto, basis_e, basis_phi, check_antiauto, check_conjugation, check_generation, conjugator,
    dual_e, dual_phi, dual_phi_closed_form, off_diagonal_pairs, phi_from_dual_basis, standard_basis,
    Conjugator,
};
pub use form::{
    bilinear, check_adjacency, check_adjointness, check_dual_norms, check_representation,
    check_threeway, check_transition, check_transition_table, check_weights, pairing_eval, pairing_table, to_dual_coords,
    xtilde_forms, xtilde_monomial,
};
pub use poly::{act, HomogPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("index {index} out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("e_{{{0},{0}}} is not an off-diagonal unit")]
    DiagonalUnit(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("multi-index has {found} parts, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}
