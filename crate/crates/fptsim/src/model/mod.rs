//! Model types: the Lévy-measure split, boundaries, triplets and bounds.

pub mod boundary;
pub mod bounds;
pub mod config;
pub mod decompose;
pub mod measure;
pub mod spec;
pub mod triplet;

pub use boundary::{boundary_update, Boundary};
pub use config::ModelConfig;
pub use bounds::{complexity_bracket, cpp_jump_bound, lambda_mass, lambda_mass_upper, loop_allowance, psi0, upsilon};
pub use decompose::{decompose_density, Decomposition};
pub use measure::FiniteMeasure;
pub use spec::{EngineConfig, RPolicy, SubordinatorSpec, DEFAULT_SEED};
pub use triplet::{drift_adjust, CrossingTriplet, Diagnostics, Tally};
