//! Model-free 2-DOF motion control and simulation.
//!
//! The controller composes a generalized super-twisting term (continuous
//! second-order sliding mode over `s = lambda e + e_dot`) with a signum-type
//! iterative learning trace that estimates the lumped uncertainty across
//! repeated runs of the same motion. The crate ships two plants to drive it
//! against: a flexure-coupled dual-drive gantry stage with three carriages,
//! and a single-axis "oracle" whose uncertainty is known exactly so the
//! learning behavior can be verified end to end.
//!
//! Entry point for whole experiments: [`sim::run_experiment`] over a
//! [`sim::SimConfig`]. Individual pieces (the switching functions, learning
//! law, axis controllers, plants, reference profile, metrics) are exposed by
//! the modules below.

pub mod controller;
pub mod error;
pub mod ilc;
pub mod metrics;
pub mod plant;
pub mod reference;
pub mod sim;
pub mod sta;

pub use error::{Error, Result};
