//! Command-line front end for the teleportation library: tau sweeps of the
//! channel coefficients, fidelities, and quantum Fisher information, a
//! table of figure presets, and a self-test suite. The binary is `jctp`;
//! everything it does is reachable through this library too.

pub mod config;
pub mod csv;
pub mod error;
pub mod plot;
pub mod presets;
pub mod selftest;
pub mod sweep;
