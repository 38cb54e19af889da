//! Loewner energy of planar chords and Jordan loops, computed from driving functions,
//! from Dirichlet energies of conformal maps, and from spectral functionals.

pub mod cli;
pub mod curve;
pub mod driving;
pub mod energy;
pub mod error;
pub mod field_energy;
pub mod io;
pub mod jet;
pub mod loewner;
pub mod mobius;
pub mod quadrature;
pub mod spectral;
pub mod teichmuller;

pub use curve::{Ambient, CurveSamples, Param, Root};
pub use driving::DrivingFunction;
pub use error::{Error, Result};
pub use loewner::SlitMapChain;
pub use num_complex::Complex64 as C64;
