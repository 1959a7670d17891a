//! Exact stochastic dominance between random walks with finitely supported
//! steps on `R^d`, ordered by a polyhedral cone.
//!
//! The crate is `no_std` (with `alloc`). All weights, coordinates and
//! thresholds are exact rationals; floating point only appears in the
//! cumulant-generating-function sweeps of [`spectrum`] and [`ldp`], where every
//! endpoint comparison is still carried out exactly.
//!
//! Module map:
//!
//! - [`measure`]: finitely supported measures, convolution, pushforwards.
//! - [`cone`]: polyhedral positive cones, order units, dual directions.
//! - [`stochorder`]: the stochastic preorder, decided by coupling or tails.
//! - [`solvers`]: exact max-flow and phase-one simplex back-ends.
//! - [`spectrum`]: normalized cumulant-generating function and the spectral sweep.
//! - [`dominance`]: minimal `n`, catalyst search, power-universality exponents.
//! - [`ldp`]: rate function, relative decay rates, empirical Cramér check.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cone;
pub mod dominance;
mod error;
pub mod ldp;
pub mod measure;
mod par;
pub mod point;
pub mod rational;
pub mod rng;
pub mod solvers;
pub mod spectrum;
pub mod stochorder;

pub use cone::{Cone, Direction};
pub use error::{Error, Result};
pub use measure::Measure;
pub use point::Point;
pub use rational::Rational;
