//! Exact-diagonalization simulator for entanglement growth from structured
//! initial states in the random-field XXZ chain and its LIOM phenomenological
//! model.
//!
//! Basis convention, used by every module: basis index `x` has bit `j - 1`
//! set iff site `j` (1-indexed) carries `S^z = +1/2`. Spin values are
//! `s_j = bit_j - 1/2`. All entropies are in nats.

pub mod entropy;
pub mod error;
pub mod evolve;
pub mod exec;
pub mod hilbert;
pub mod liom;
pub mod models;
pub mod rng;
pub mod runner;

pub use error::{Error, Result};
pub use exec::Exec;
pub use hilbert::{PureState, Sector, SubsetMask, Spin};
pub use rng::SeededRng;

pub type C64 = num_complex::Complex64;
