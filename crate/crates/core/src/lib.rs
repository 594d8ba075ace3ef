//! Numerical forward and inverse solvers for the quasilinear conductivity
//! equation `div(sigma grad u + a |grad u|^{p-2} grad u) = 0` on a uniform
//! periodic 3-D grid.
//!
//! The crate is organized around a discrete sub-box domain embedded in a
//! periodic box: [`field`] provides the grid, differential operators and
//! spectral transforms; [`forward`] the nonlinear solvers; [`dnmap`] the
//! Dirichlet-to-Neumann pairings; [`asympt`] small/large-data sweeps and
//! exponent recovery; [`polarize`] the trilinear polarization functionals;
//! [`cgo`] complex geometric optics solutions; [`recon`] the Fourier-side
//! reconstruction of the nonlinear weight; [`vecineq`] the vector-inequality
//! kernels shared with the solvers.

pub mod asympt;
pub mod cgo;
pub mod dnmap;
pub mod field;
pub mod fitting;
pub mod forward;
pub mod polarize;
pub mod recon;
pub mod vecineq;

pub use num_complex::Complex64;
