//! Numerical laboratory for enhanced (Taylor) diffusion in the linear model
//!
//! ```text
//! w_t = nu w_xx - v_x
//! v_t = nu v_xx - nu v - w_x
//! ```
//!
//! The crate provides the exact Fourier-space propagator, the Hermite
//! eigenbasis in self-similar variables, exact center-manifold coefficient
//! tables for the reduced ODE system, the low/high frequency decomposition
//! and the experiments that tie them together.

pub mod error;
pub mod params;
pub mod scaling;
pub mod quadrature;
pub mod norms;
pub mod shear;
pub mod propagator;
pub mod jet;
pub mod initial_data;
pub mod hermite;
pub mod center_manifold;
pub mod fit;
pub mod decomposition;
pub mod harness;

pub use error::{Error, Result};
pub use params::{enhanced_diffusivity, Config, Params};

pub use num_complex::Complex64 as C64;
