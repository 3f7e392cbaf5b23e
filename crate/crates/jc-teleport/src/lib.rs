//! Numerical library for a two-qubit teleportation study on the projected
//! Jaynes-Cummings atom-field channel: channel coefficients, two protocol
//! variants with closed-form output states and fidelities, and quantum
//! Fisher information of the teleported states.

pub mod channel;
pub mod error;
pub mod fisher;
pub mod linalg;
pub mod teleport;

pub use error::{Error, Result};
