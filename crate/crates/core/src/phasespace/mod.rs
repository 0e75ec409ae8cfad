//! Torus coherent states and Husimi distributions.

mod coherent;
mod grid;
mod husimi;

pub use coherent::CoherentFactory;
pub use grid::{Field, TorusGrid};
pub use husimi::{husimi, husimi_sum, husimi_sum_columns, HusimiSum, ORTHONORMALITY_TOL};
