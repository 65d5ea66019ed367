//! Semi-classical Wigner-Weyl dynamics of a damped harmonic oscillator
//! driven by Gaussian white noise.
//!
//! The ensemble-averaged Wigner propagator is an exact bivariate Gaussian, so
//! states, kernels and most observables reduce to 2×2 linear algebra. Angle
//! observables need one-dimensional quadrature, and the quantised phase
//! operators are handled as truncated Hermitian matrices. [`langevin`]
//! provides an independent Monte-Carlo check of the analytic propagator.

pub mod error;
pub mod flow;
pub mod gaussian;
pub mod langevin;
pub mod observables;
pub mod params;
pub mod phase;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use flow::{
    classical_flow, classical_flow_between, time_generator_weyl, AffineFlow, TimeGenerator,
};
pub use gaussian::{
    evolve, noise_form, propagator, propagator_between, thermal_state, Gaussian2D,
    NoiseQuadraticForm, Propagator,
};
pub use params::{derive, DerivedParams, ModelParams, PhasePoint};
