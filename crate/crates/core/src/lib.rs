//! Numerical laboratory for the Camassa-Holm equation
//!
//! ```text
//! u_t + 2 kappa u_x + 3 u u_x - u_txx = 2 u_x u_xx + u u_xxx
//! ```
//!
//! on a periodic interval, together with the shallow-water scaling maps it
//! comes from, the linear small-amplitude limit, multipeakon dynamics and a
//! discrete check that the equation is the Euler-Lagrange equation of a
//! right-invariant action on diffeomorphisms.
//!
//! | module | contents |
//! |---|---|
//! | [`field`] | periodic grids, sampled fields, FFT-based derivatives and Helmholtz inverse |
//! | [`scaling`] | physical/nondimensional/scaled/long-wave transforms and the limit-system audit |
//! | [`linear_sw`] | d'Alembert surface evolution and irrotational velocity reconstruction |
//! | [`ch`] | pseudospectral RK4 solver and conserved quantities |
//! | [`peakon`] | multipeakon Hamiltonian ODE and field sampling |
//! | [`variational`] | discrete action, first variation and Euler-Lagrange residual |
//! | [`scenario`] | JSON-configured batch runs behind the `wavelab` binary |

pub mod ch;
pub mod error;
pub mod field;
pub mod integrate;
pub mod interp;
pub mod linear_sw;
pub mod output;
pub mod peakon;
pub mod scaling;
pub mod scenario;
pub mod variational;

pub use error::{Error, Result};
pub use field::{Field, Grid1D, Spectral};
