//! Exact normal forms, moduli and rational invariants for germs of plane
//! curves made of `p` smooth branches with pairwise distinct tangents.
//!
//! The crate is layered bottom-up:
//! [`algebra`] (exact arithmetic), [`normal_form`] (the triangular family and
//! its parameter space), [`prenorm`] (reduction of a branch list to normal
//! form), [`distribution`] (generators of the fixed-separatrix distribution)
//! and [`integrals`] (rational first integrals and curve invariants).

pub mod algebra;
pub mod distribution;
pub mod error;
pub mod integrals;
pub mod io;
pub mod normal_form;
pub mod prenorm;
pub mod sampling;
pub mod selfcheck;

pub use error::{Error, Result};
