//! Numerical bounds for `L_p -> L_q` Fourier multipliers on the line and the circle.
//!
//! The crate computes block-wise Lorentz quasi-norms of multiplier symbols
//! (sufficient conditions), interval-average net-space functionals
//! (necessary conditions), derivative-based dyadic bounds, generalized
//! monotonicity certificates, and an empirical lower estimate of the
//! operator norm of the discretized multiplier.
//!
//! Module map:
//!
//! * [`symbols`]: sequence and function symbols, dyadic blocks, exponents.
//! * [`rearrange`]: distribution functions, rearrangements, Lorentz norms.
//! * [`netspace`]: interval averages and net-space quasi-norms.
//! * [`bounds`]: upper and lower bounds and the sandwich report.
//! * [`monotone`]: generalized-monotone certificates and the criterion.
//! * [`opnorm`]: discrete multiplier operators and norm estimation.
//! * [`examples`]: the named example symbols with expected values.
//! * [`cli`]: command implementations behind the `lpq` binary.

pub mod bounds;
pub mod cli;
pub mod divergence;
pub mod error;
pub mod examples;
pub mod monotone;
pub mod netspace;
pub mod opnorm;
pub mod quadrature;
pub mod rearrange;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
