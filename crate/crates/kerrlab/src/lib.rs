//! Numerical laboratory for TE-wave propagation in Kerr slabs with complex
//! linear and nonlinear permittivity.
//!
//! The library integrates the nondimensional Helmholtz oscillator
//!
//! ```text
//! phi''(z) + [r(z) + s(z) |phi(z)|^2] phi(z) = 0
//! ```
//!
//! as a complex initial-value problem, detects finite-coordinate blow-up of
//! the field amplitude, and checks the detected blow-up point against the
//! comparison-integral bound that holds whenever `Re s` is bounded above by a
//! negative constant.
//!
//! Module map:
//! - [`profile`]: physical slab parameters, coefficient profiles, and the
//!   nondimensional reduction with certified real-part upper bounds.
//! - [`analytic`]: the exact secant blow-up solution of the homogeneous
//!   lossless defocusing slab, used as ground truth for the integrator.
//! - [`integrate`]: adaptive Dormand-Prince 5(4) integration with blow-up
//!   detection and pole extrapolation.
//! - [`glassey`]: the comparison-function machinery — hypothesis checks,
//!   the comparison-time integral, the improper-integral bound `gamma`, its
//!   Gamma-function closed form, and the physical slab-length bound.
//! - [`quadrature`]: adaptive Gauss-Kronrod quadrature used by the bound
//!   computations.
//! - [`special`]: Gamma function evaluation.

pub mod analytic;
pub mod error;
pub mod glassey;
pub mod integrate;
pub mod profile;
pub mod quadrature;
pub mod special;

mod serde_util;

pub use error::{Error, Result};
pub use num_complex::Complex64;
