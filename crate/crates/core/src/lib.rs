//! Diffusive search with stochastic resetting: spectral theory and simulation.
//!
//! A searcher performs Brownian motion with diffusion constant `D` and is
//! reset to the origin at the jump times of an independent Poisson clock of
//! rate `r`. The search succeeds when the searcher first reaches a target: a
//! point at distance `a` in one dimension, or a ball of radius `eps0` whose
//! centre lies at distance `A` from the origin in dimension `d >= 2`.
//!
//! The law of the search time has a pure-exponential tail controlled by the
//! principal eigenvalue `lambda0` of the reset generator with absorption at
//! the target. This crate computes that eigenvalue, the associated principal
//! and adjoint eigenfunctions, the prefactor of the survival asymptote, and
//! several derived quantities:
//!
//! - [`eigen1d`]: closed-form one-dimensional theory (transcendental
//!   eigenvalue equation, eigenfunctions, prefactor, mean search time);
//! - [`eigen_radial`]: the radially symmetric problem in `d >= 2`, built on
//!   modified Bessel functions ([`bessel`]);
//! - [`mc`]: Monte Carlo simulators (an exact event-driven sampler in one
//!   dimension, Euler-Maruyama for the radial problem) used to cross-check
//!   every analytic quantity;
//! - [`target`]: failure probabilities when the target location is random,
//!   with stretched-exponential radial densities, plus the Laplace-type
//!   asymptotics of those integrals;
//! - [`speed`]: classification of moving detection frontiers against the
//!   logarithmic spreading front of the reset process.
//!
//! Numerical building blocks (Brent root bracketing, adaptive Simpson
//! quadrature, monotone cubic interpolation) live in [`roots`], [`quad`] and
//! [`interp`].

pub mod bessel;
pub mod eigen1d;
pub mod eigen_radial;
pub mod interp;
pub mod mc;
pub mod quad;
pub mod roots;
pub mod speed;
pub mod target;
