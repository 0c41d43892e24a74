//! Simulation and certification of the nonlocal neural-field equation
//!
//! ```text
//! u_t = -u + J∗f(u) + h
//! ```
//!
//! on a truncated box in `R^N` (`N <= 3`), with `u` taken as zero off the box.
//! Solutions are measured in weighted `L^p` norms with weights that decay at
//! infinity.
//!
//! Modules, bottom up:
//! - [`grid`]: grids, fields, quadrature and the binary snapshot format;
//! - [`weight`]: weights `ρ` and the normalized weighted `L^p` norm;
//! - [`kernel`]: compactly supported connectivity kernels `J`;
//! - [`firing`]: bounded Lipschitz firing rates `f`;
//! - [`convolution`]: the operator `J∗v` by direct sums or FFT;
//! - [`dynamics`]: the vector field, integrators and homogeneous equilibria;
//! - [`analysis`]: absorbing ball, attractor bounds, semidistance and energy;
//! - [`cli`]: configuration and subcommand drivers for the `nfield` binary.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod convolution;
pub mod dynamics;
pub mod error;
pub mod firing;
pub mod grid;
pub mod kernel;
pub mod weight;
