//! Algebraic Bethe circuits for the inhomogeneous periodic spin-1/2 XXZ chain.
//!
//! The crate builds the F-basis matrix-product representation of coordinate
//! Bethe states, turns it into a staircase of unitaries acting on `N` qubits,
//! and verifies the algebraic identities behind the construction by dense
//! computation at small sizes.

pub mod cba;
pub mod error;
pub mod fbasis;
pub mod index;
pub mod kernel;
pub mod operator;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use kernel::{ChainSpec, Model, PlaneWaves, Tolerances};
pub use num_complex::Complex64 as C64;
pub use operator::{CMatrix, DenseOperator, QubitPermutation};
