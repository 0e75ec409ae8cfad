//! Classical backward maps with norm dynamics, Poincaré sections, the
//! frozen-Gaussian flow and norm landscapes.

mod flow;
mod landscape;
mod maps;

pub use flow::{integrate_frozen_gaussian, FlowPoint, FlowSpec, PhaseFn, Trajectory};
pub use landscape::{norm_landscape, norm_landscape_series, Ensemble, NormLandscape};
pub use maps::{
    poincare_section, step_escape, step_pt, wrap_centered, wrap_unit, ClassicalMap, MapState, SectionPoint,
};
