//! Seeded batches of random instances run through the full audit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{random_chain, GeneratorParams};
use crate::chain::{Distribution, Kernel};
use crate::error::Result;
use crate::scalar::Prob;
use crate::verdict::{audit, Violation};

/// Parameters of instance `index` in the batch seeded with `seed`. Each
/// index draws from its own ChaCha stream.
pub fn instance_params(seed: u64, index: u64, max_states: usize) -> GeneratorParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let chain_seed = rng.gen();
    GeneratorParams::sample(&mut rng, max_states, chain_seed)
}

/// Generator parameters with the chain and measure they produced.
pub type Instance<T> = (GeneratorParams, Kernel<T>, Distribution<T>);

/// `count` instances in index order.
pub fn instances<T: Prob>(
    count: usize,
    max_states: usize,
    seed: u64,
) -> Result<Vec<Instance<T>>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let params = instance_params(seed, i, max_states);
            let (k, mu) = random_chain(&params)?;
            Ok((params, k, mu))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub params: GeneratorParams,
    pub fingerprint: u64,
    pub violations: Vec<Violation>,
    /// Set when generation or a checker returned an error.
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.error.is_none()
    }
}

/// Generates and audits `count` instances concurrently. Output is ordered
/// by index regardless of scheduling.
pub fn verify_instances<T: Prob>(count: usize, max_states: usize, seed: u64) -> Vec<InstanceOutcome> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let params = instance_params(seed, index as u64, max_states);
            let mut outcome = InstanceOutcome {
                index,
                params: params.clone(),
                fingerprint: 0,
                violations: Vec::new(),
                error: None,
            };
            match random_chain::<T>(&params).and_then(|(k, mu)| audit(&k, &mu)) {
                Ok(a) => {
                    outcome.fingerprint = a.fingerprint;
                    outcome.violations = a.violations;
                }
                Err(e) => outcome.error = Some(e.to_string()),
            }
            outcome
        })
        .collect()
}
