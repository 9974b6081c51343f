//! Seeded ensembles: uniformity sweeps over the degree, full-polynomial growth, the
//! exploratory `d` scan and the structural property suite.

pub mod sampling;
pub mod stats;
pub mod structure;
pub mod sweep;

pub use sampling::{derive_seed, draw_rng, random_good_components, sample_fewnomial, sample_with_exponents, ComponentInstance};
pub use structure::{replay, structure_suite, suite_instance, FailureRecord, PropertyReport};
pub use sweep::{logd_scan, parissis_growth, uniformity_sweep, write_csv, GrowthSummary, SweepConfig, SweepRecord};
