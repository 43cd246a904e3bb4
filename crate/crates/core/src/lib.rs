//! # Dispersia
//!
//! Retarded dispersion (Casimir-type) interaction energies and forces between
//! disjoint neutral bodies, obtained by summing the `-ħc B₁₂ / r⁷` attraction
//! between every pair of volume elements of the two bodies.
//!
//! The crate is organised bottom-up:
//!
//! - [`materials`]: Clausius–Mossotti factors, pair constants and unit systems.
//! - [`geometry`]: bodies, gaps, clipped octrees and the box Fourier transform.
//! - [`analytic`]: closed forms for plates, point particles and spheres.
//! - [`integrator`]: the dual-tree volume integrator and its Monte Carlo oracle.
//! - [`forces`]: finite-difference forces and parameter sweeps.
//! - [`cli`]: scene files, presets and report writers behind the `dispersia` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
mod error;
pub mod forces;
pub mod geometry;
pub mod integrator;
pub mod materials;

pub use crate::error::{Error, Result};
pub use crate::geometry::{Body, Scene};
pub use crate::integrator::{EnergyEstimate, IntegratorSettings};
pub use crate::materials::{Material, PairCoupling, UnitSystem};

/// A point or displacement in 3D space.
pub type Vector3 = nalgebra::Vector3<f64>;
/// A 3x3 matrix, used for second moments and kernel Hessians.
pub type Matrix3 = nalgebra::Matrix3<f64>;
