//! Exact chamber geometry for Calabi–Yau threefolds and their birational
//! models.
//!
//! The crate works with the second-cohomology lattice of a threefold only
//! through combinatorial data: integer divisor and curve classes, the cubic
//! intersection form, rational polyhedral cones (nef, movable, framing), and
//! signed rational-curve counts supplied as input. On top of that it offers
//!
//! * flops across flopping walls and reflections across divisorial walls,
//! * A-model three-point functions as truncated series and as closed
//!   expressions in the multiple-cover terms `q^η/(1-q^η)`,
//! * an exact check that the classical cubic jump across a flop is cancelled
//!   by the analytic continuation of the wall term,
//! * a spot-checker for covering a cone by group translates of a polyhedral
//!   candidate domain,
//! * the local `C^4 // C*` flop model with its moment map and the linear
//!   growth of the exceptional-curve area.
//!
//! All lattice and cone arithmetic is exact. Floating point is confined to
//! [`lattice::q_coordinates`] and [`git_model`].

pub mod a_model;
pub mod atlas;
pub mod cli;
pub mod cone;
pub mod cover;
pub mod descriptor;
mod error;
pub mod git_model;
pub mod lattice;
pub(crate) mod linalg;
pub mod qalg;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
