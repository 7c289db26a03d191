//! Instance sources: the random generator, the three fixtures, and the
//! chain file format.

mod batch;
mod fixtures;
mod format;
mod generator;

pub use batch::{instance_params, instances, Instance, verify_instances, InstanceOutcome};
pub use fixtures::{
    default_truncation, fixture, Claim, ClaimOutcome, ExpectedVerdicts, Fixture, FIXTURE_NAMES,
    STANDARD_HORIZON,
};
pub use format::ChainSpecFile;
pub use generator::{random_chain, GeneratorParams};
