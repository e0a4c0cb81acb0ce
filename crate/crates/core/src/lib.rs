//! One-dimensional coupled-channel scattering for real symmetric matrix
//! potentials of finite range.
//!
//! The equation `−ψ″ + V(x)ψ = k²ψ` is solved for `N` coupled channels with
//! `V(x) = 0` outside `[−R, R]`. From the fundamental solutions `φ`, `χ` at
//! `x = R` the crate builds the reflection and transmission matrices, the
//! S matrix, the bound-state determinant and the half-bound count, and
//! checks Levinson's theorem `η(0) = π(n_b + n/2 − N/2)`.
//!
//! ```
//! use coupled_scatter::models::coupled_double_delta;
//! use coupled_scatter::spectrum::default_spectrum;
//!
//! let pot = coupled_double_delta(1.0).unwrap();
//! let rep = default_spectrum(&pot).unwrap();
//! assert_eq!((rep.n_b, rep.n_half), (2, 1));
//! ```

pub mod amplitudes;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod factorization;
pub mod io;
pub mod levinson;
pub mod linalg;
pub mod models;
pub mod potential;
pub mod propagator;
pub mod selfcheck;
pub mod spectrum;

pub use amplitudes::{scattering_amplitudes, AmplitudeSet, SMatrix};
pub use error::{Result, ScatterError};
pub use potential::{PotentialSpec, ValidatedPotential};
pub use propagator::PropagationOptions;
