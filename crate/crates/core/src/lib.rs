//! Vectorial feedback-with-carry shift registers over `F_p[beta]` with carries
//! through a ramified element `pi = p^(1/d)`.
//!
//! - [`algebra`]: exact arithmetic in `Z[pi, beta]`, multiplication matrices, norms.
//! - [`register`]: the automaton, its step function and output streams.
//! - [`connection`]: connection integers, the matrices `M` and `M'`, and the
//!   inverse construction of a register from a connection integer.
//! - [`analysis`]: multiplicative orders, eventual periods, rationality of the
//!   decimated p-adic output vector.
//! - [`search`]: enumeration of connection grids by the value of the norm form.
//! - [`tables`] and [`fixtures`]: CSV sequence tables and the bundled reference data.

pub mod algebra;
pub mod analysis;
pub mod connection;
pub mod fixtures;
pub mod json;
pub mod matrix;
pub mod numtheory;
pub mod presets;
pub mod register;
pub mod search;
pub mod tables;

pub use algebra::{basis_index, AlgebraError, BetaPoly, GroundParams, RingElement, ZPiElement};
pub use matrix::{det_int, IntMatrix, Matrix};
