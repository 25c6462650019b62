//! Numerical laboratory for the atom-optics kicked rotor at and near the
//! fundamental quantum resonances `tau = 2 pi ell`.
//!
//! * [`specfun`]: Bessel functions `J0`, `J1` and the phasor sum `W_N`.
//! * [`rotor`]: split-operator propagation of a single quasimomentum sector.
//! * [`analytics`]: closed-form fidelities and the saturation value.
//! * [`ensemble`]: incoherent quasimomentum ensembles and Ramsey fringes.

pub mod analytics;
pub mod ensemble;
pub mod error;
pub mod quadrature;
pub mod rotor;
pub mod specfun;

pub use error::{Error, Result};
