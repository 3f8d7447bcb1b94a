//! Quadrature and special functions.

pub mod bessel;
pub mod gamma;
pub mod kernel;
pub mod moments;
pub mod orthopoly;
pub mod quadrature;

pub use bessel::bessel_j;
pub use gamma::{digamma, log_gamma, EULER_GAMMA};
pub use kernel::{kernel_derivative, kernel_gegenbauer_coeff, GegenbauerCoefficient};
pub use moments::{bessel_log_moment, bessel_moment};
pub use orthopoly::{gegenbauer, jacobi_p, legendre};
pub use quadrature::{integrate, integrate_improper, QuadratureRule};
