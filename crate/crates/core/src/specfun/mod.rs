//! Special functions used by the closed-form wavefunctions and the
//! Woods-Saxon quantization condition: generalized Laguerre and Jacobi
//! polynomials, the Gauss hypergeometric series and the complex log-gamma.

mod gamma;
mod hypergeometric;
mod polynomials;

pub use gamma::{arg_gamma, log_gamma};
pub use hypergeometric::{gauss_2f1, gauss_2f1_reflected};
pub use polynomials::{jacobi, laguerre};

/// Complex number type used across the crate.
pub type ComplexValue<T> = num_complex::Complex<T>;
