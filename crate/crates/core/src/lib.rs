//! Explicit isogeometric collocation dynamics of geometrically exact,
//! shear-deformable beams.
//!
//! Space is discretized with B-splines collocated at Greville points; time
//! with an SO(3)-consistent central-difference scheme. Three per-step
//! solvers are provided: a consistent-mass Newton solver, a lumped
//! predictor–multicorrector Newton solver and a fully explicit lumped
//! solver with a linearized rotational balance.

pub mod beam;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod rot3;
pub mod scenario;
pub mod solver;
pub mod spline;

pub use error::{Error, Result};
