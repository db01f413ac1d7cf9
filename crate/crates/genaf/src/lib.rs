//! Semi-discrete generalized Active Flux method on 2-D periodic Cartesian
//! grids for hyperbolic conservation laws, spatial orders 3 through 7.
//!
//! The degrees of freedom are shared interface point values (cell nodes plus
//! Gauss-distributed edge points) and per-cell moments. Point values evolve by
//! an upwind quasi-linear update built from Jacobian splitting and one-sided
//! derivatives of the globally continuous reconstruction; moments evolve by a
//! quadrature-exact weak form. Time integration is SSP-RK3.
//!
//! Module map:
//! - [`mesh`]: Cartesian grid geometry and periodic index arithmetic.
//! - [`quadrature`]: Gauss-Legendre and Gauss-Lobatto rules on [-1/2, 1/2].
//! - [`element`]: the hybrid finite element (DOF layout, reconstruction
//!   basis, shape functions from a generalized Vandermonde solve).
//! - [`models`]: advection, acoustics and compressible Euler fluxes with
//!   eigendecompositions and sign-split Jacobians.
//! - [`field`]: global DOF storage, initial projection, reconstruction.
//! - [`operator`]: the semi-discrete right-hand side.
//! - [`timestepper`]: SSP-RK3 driver with CFL time-step selection.
//! - [`stability`]: assembled linear operator, spectra, max stable time
//!   steps and CFL stability maps for linear advection.
//! - [`harness`]: benchmark problems, error norms, convergence driver.

pub mod element;
pub mod error;
pub mod field;
pub mod harness;
pub mod mesh;
pub mod models;
pub mod operator;
pub mod quadrature;
pub mod stability;
pub mod timestepper;

pub use error::GenAfError;
