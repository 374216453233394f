//! Extended-space Floquet engine.

pub mod label;
pub mod matrix;
pub mod series;

pub use label::{
    label_sweep, label_sweep_adaptive, stark_shift, track_to, LabelFlags, LabelOptions, LabeledPoint,
    LabeledSpectrum, PointLabels, Tracker,
};
pub use matrix::{
    apply_series, build_floquet, centroid, diagonalize, fold, inner, overlap, photon_weights, project_mode,
    shift_vector, FloquetProblem, FloquetSpectrum, DEFAULT_MAX_DIM,
};
pub use series::FourierSeries;
