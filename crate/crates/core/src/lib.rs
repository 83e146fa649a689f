//! Numerical analysis of central-force Hamiltonians `|p|²/2 + V(|x|)`:
//! effective-potential geometry, action-angle charts, the Arnold determinant,
//! Birkhoff coefficients at circular orbits and perturbed long-time drift.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common types to one precision.

// `!(x > 0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod birkhoff;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod numerics;
pub mod potentials;
pub mod quasiconvexity;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Potential64 = potentials::Potential<f64>;
pub type Potential32 = potentials::Potential<f32>;
pub type CriticalPoint64 = effective::CriticalPoint<f64>;
pub type CriticalPoint32 = effective::CriticalPoint<f32>;
pub type MomentumInterval64 = effective::MomentumInterval<f64>;
pub type MomentumInterval32 = effective::MomentumInterval<f32>;
pub type ActionChart64 = actions::ActionChart<f64>;
pub type ActionChart32 = actions::ActionChart<f32>;
pub type Perturbation64 = dynamics::Perturbation<f64>;
pub type Perturbation32 = dynamics::Perturbation<f32>;
pub type PhaseState64 = dynamics::PhaseState<f64>;
pub type PhaseState32 = dynamics::PhaseState<f32>;
pub type DriftRecord64 = dynamics::DriftRecord<f64>;
pub type DriftRecord32 = dynamics::DriftRecord<f32>;
