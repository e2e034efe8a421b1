//! Exactly solvable radial Dirac problems.
//!
//! The crate covers nine potentials for which the two-component radial Dirac
//! equation reduces, after a global rotation of the spinor, to a
//! Schrödinger-like equation with a known solution. It provides closed-form
//! spectra ([`spectra`]) and spinors ([`wavefunctions`]), the
//! relativistic↔nonrelativistic parameter maps ([`parameter_maps`]), the
//! point-canonical transformation engine ([`xpct`]) and an independent
//! shooting solver for the first-order system ([`oracle`]) that the closed
//! forms are checked against ([`verify`]).
//!
//! The special functions, catalog, spectra and parameter maps are generic over
//! the float type (`f32` or `f64`); the numerical layers run in `f64`.

pub mod catalog;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod parameter_maps;
pub mod scalar;
pub mod specfun;
pub mod spectra;
pub mod verify;
pub mod wavefunctions;
pub mod xpct;

pub use catalog::{AngularChannel, Branch, Domain, PotentialKind, Sign};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases.
pub type RelativisticContext = catalog::RelativisticContext<f64>;
pub type PotentialSpec = catalog::PotentialSpec<f64>;
pub type TransformParameters = catalog::TransformParameters<f64>;
pub type BoundState = spectra::BoundState<f64>;
pub type SpectrumRequest = spectra::SpectrumRequest<f64>;
pub type ComplexValue = specfun::ComplexValue<f64>;
