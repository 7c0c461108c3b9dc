//! Simulation of electron vortex beams.
//!
//! The crate builds Pauli (2-component) and Dirac (4-component) Bessel vortex
//! states on sampled grids, synthesizes scalar and matrix-valued holographic
//! masks, reconstructs their far fields, and evaluates angular-momentum
//! observables and the relativistic central-density correction.
//!
//! Internally everything is in natural units: energies and momenta in keV,
//! lengths in keV⁻¹. Conversions to nm/pm live in [`units`].

// `!(x > 0.0)` also rejects NaN; index loops mirror the matrix algebra
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dirac;
pub mod error;
pub mod grid;
pub mod holography;
pub mod io;
pub mod pauli;
pub mod render;
pub mod special;
pub mod units;

pub use error::{Result, VortexError};
pub use grid::{
    Aperture, ComplexField, GridSpec, Radial, RadialProfile, Spinor2Field, Spinor4Field,
    SpinorField, Window,
};
pub use num_complex::Complex64 as C64;
pub use units::{BeamKinematics, PhysicalConstants};
