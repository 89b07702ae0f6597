//! Solver library for the linear and nonlinear Schrödinger equation on the
//! half-plane with Robin or Neumann boundary data, built on the unified
//! transform (contour integral) representation of the solution.

pub mod error;
pub mod fft;
pub mod grid;
pub mod linear_solver;
pub mod nonlinear;
pub mod spaces;
pub mod contours;
pub mod oracles;
pub mod quad;
pub mod record;
pub mod transforms;

pub use error::{Result, UtmError};
pub use grid::{AxisTag, DataTriple, Grid, GridField, ProblemSpec, Sign, SolvePath, C64};
