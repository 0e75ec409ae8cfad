//! Ordered Schur vectors of non-Hermitian kicked rotors and their semiclassical
//! phase-space densities.
//!
//! The crate is organised along the pipeline it implements:
//!
//! - [`model`] builds Floquet operators for the PT-symmetric kicked rotor and the
//!   rotor with partial escape, plus the analytically solvable SU(2) model.
//! - [`spectral`] computes eigenvalue-ordered complex Schur decompositions,
//!   biorthogonal eigenpairs, quasienergy classification and the eigenvectors of
//!   the norm operator `W(t) = U^t (U^t)^†`.
//! - [`phasespace`] evaluates torus coherent states and Husimi distributions.
//! - [`classical`] iterates the classical maps with norm dynamics and builds
//!   norm landscapes.
//! - [`density`] thresholds landscapes into support sets, smooths them and solves
//!   the Planck-cell counting condition.
//! - [`compare`] measures quantum–classical agreement with the Jensen–Shannon
//!   divergence and scans the final time.

pub mod classical;
pub mod compare;
pub mod density;
mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod phasespace;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};

pub use classical::{ClassicalMap, Ensemble, MapState, NormLandscape};
pub use compare::{jsd, ScanResult};
pub use density::{DensityField, SupportMode, SupportSet};
pub use model::{FloquetOperator, RotorParams, Su2Params, Variant};
pub use phasespace::{CoherentFactory, Field, TorusGrid};
pub use spectral::{EigenPairs, OrderedSchur, QuasiEnergySet, StateClass};
