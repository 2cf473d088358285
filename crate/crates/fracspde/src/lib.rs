//! Simulation and verification library for the one-dimensional stochastic
//! fractional heat equation driven by space-time white noise.
//!
//! The crate evaluates the fractional heat kernel spectrally on a periodic
//! grid, integrates the mild-solution formula with an exponential Euler
//! scheme, runs the Picard fixed-point iteration under frozen noise, and
//! estimates moment bounds and Hölder regularity exponents by Monte Carlo.

pub mod analysis;
pub mod error;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod noise;
pub mod solver;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use kernel::{KernelSpec, KernelValues};
pub use noise::NoiseField;
pub use solver::{Coefficients, InitialCondition, SimConfig, Trajectory};
