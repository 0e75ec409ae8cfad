//! Schur and eigen analysis of non-normal operators.

mod eigen;
mod norm_operator;
mod quasi;
mod schur;

pub use eigen::{
    eigendecompose_biorthogonal, eigendecompose_biorthogonal_with, expand_in_eigenbasis, reconstruct,
    EigenPairs, DEFAULT_CONDITION_LIMIT,
};
pub use norm_operator::{
    compare_bases, norm_operator_eigvecs, norm_operator_trajectory, norm_operator_trajectory_against,
    subspace_sine, ConvergenceReport, NormOperatorEigs, NormOperatorIteration,
};
pub use quasi::{
    phase_quasienergy, quasienergies, schur_fraction_sets, top_n_set, FractionSets, QuasiEnergySet,
    StateClass,
};
pub use schur::{ordered_schur, reorder_schur, schur, similarity, OrderedSchur};
