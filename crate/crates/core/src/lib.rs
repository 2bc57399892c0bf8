//! Exact computation of quasi-invariant polynomials of symmetric groups.
//!
//! The crate is layered bottom-up: [`coeffs`] provides exact coefficient
//! domains, [`poly`] sparse polynomials with the symmetric group action,
//! [`quasi`] the brute-force graded components and Hilbert series,
//! [`generators`] the constructive generator chain for three variables,
//! [`shift`] the Opdam shift operator and its scalar chains, and
//! [`qdeform`] the q-deformed variants.

pub mod arith;
pub mod coeffs;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod poly;
pub mod qdeform;
pub mod quasi;
pub mod shift;

pub use error::{Error, Result};
