//! Instance generators for the application utilities.

mod active_learning;
mod counterexample;
mod coverage;
mod viral;

pub use active_learning::{
    build_active_learning, random_hypothesis_space, ActiveLearningUtility, HypothesisSpace,
    LabelMode,
};
pub use counterexample::counterexample;
pub use coverage::{
    build_sensor_selection, build_stochastic_coverage, random_coverage, random_sensors,
    CoverageUtility, SensorUtility,
};
pub use viral::{build_viral_marketing, random_graph, DiffusionGraph, ViralUtility};

/// Default bound on a materialized prior support.
pub const DEFAULT_SUPPORT_CAP: usize = 4096;
