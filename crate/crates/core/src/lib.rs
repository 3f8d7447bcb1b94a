//! Configurations of rotation matrices in SO(3) with low logarithmic energy.
//!
//! The construction takes `r` points on the unit sphere and places over each
//! of them a fiber of `s` equally spaced rotations sharing that point as the
//! image of the vertical axis, each fiber turned by an independent uniform
//! phase. The expected logarithmic energy of the resulting `n = r s`
//! rotations depends on the sphere points only through the surrogate kernel
//! `log(1 + sqrt((1 - <p, q>) / 2))`, which is what makes the energy of the
//! different spherical point processes in [`ensembles`] computable in closed
//! form or by one-dimensional quadrature ([`constants`]).
//!
//! Module map:
//!
//! - [`geometry`]: sphere points, rotations, base frames, Haar sampling.
//! - [`construct`]: fibers and configurations, plus their JSON/CSV formats.
//! - [`energy`]: exact energies, the surrogate kernel and closed-form expectations.
//! - [`ensembles`]: uniform, elliptic-polynomial zeros, equal-area and spherical ensembles.
//! - [`specfun`]: quadrature, Gamma/digamma, Bessel, Jacobi/Gegenbauer and kernel analysis.
//! - [`constants`]: named constants, optimal fiber counts and expected kernel energies.
//! - [`experiment`]: seeded, parallel, reproducible Monte Carlo runs.
//! - [`verify`]: the self-check suites behind `so3-energy verify`.

pub mod constants;
pub mod construct;
pub mod energy;
pub mod ensembles;
mod error;
pub mod experiment;
pub mod geometry;
pub mod rng;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
