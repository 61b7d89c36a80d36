//! Independent reference solvers used to check the spectral machinery.
//!
//! Nothing here shares quadrature, interpolation or differentiation code with
//! the main path.

mod fd;
mod quad;
mod radial;

pub use fd::{fd_dirichlet, FdSolution};
pub use quad::singular_quadrature_cauchy;
pub use radial::{radial_mode_bvp, RadialProfile};
