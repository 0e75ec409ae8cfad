//! Quantum operators for the kicked-rotor models and the SU(2) reference model.

mod floquet;
mod params;
mod su2;

pub use floquet::{
    build_escape_floquet, build_floquet, build_floquet_with, build_pt_floquet, BuildRoute,
    FloquetOperator,
};
pub use params::{RotorParams, Variant};
pub use su2::{
    angular_momentum, build_su2_hamiltonian, su2_propagator, su2_schur_reference, Su2Params,
};
