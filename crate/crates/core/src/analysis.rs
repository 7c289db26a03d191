//! Per-kernel cache of the structural quantities most deciders share.

use std::sync::OnceLock;

use crate::chain::{Distribution, Kernel};
use crate::equivalence::{pair_reachability, PairReachability};
use crate::error::Result;
use crate::structure::{decompose, ClassDecomposition, LimitTable};
use crate::scalar::Prob;

#[derive(Debug)]
pub struct Analysis<'k, T> {
    kernel: &'k Kernel<T>,
    decomposition: ClassDecomposition,
    ipms: Vec<Distribution<T>>,
    limits: LimitTable<T>,
    pairs: OnceLock<PairReachability>,
}

impl<'k, T: Prob> Analysis<'k, T> {
    pub fn new(kernel: &'k Kernel<T>) -> Result<Self> {
        let decomposition = decompose(kernel);
        let ipms = decomposition
            .recurrent()
            .map(|c| kernel.class_invariant_measure(&c.members))
            .collect::<Result<Vec<_>>>()?;
        let limits = LimitTable::new(kernel, &decomposition, &ipms)?;
        Ok(Self {
            kernel,
            decomposition,
            ipms,
            limits,
            pairs: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> &'k Kernel<T> {
        self.kernel
    }

    pub fn decomposition(&self) -> &ClassDecomposition {
        &self.decomposition
    }

    /// Extremal invariant measures, one per recurrent class.
    pub fn ipms(&self) -> &[Distribution<T>] {
        &self.ipms
    }

    pub fn limits(&self) -> &LimitTable<T> {
        &self.limits
    }

    pub fn pairs(&self) -> &PairReachability {
        self.pairs.get_or_init(|| pair_reachability(self.kernel))
    }

    /// Asymptotic equivalence decided from the limits: `x ~ y` iff the
    /// skeleton limits from `x` and `y` have the same support.
    pub fn structurally_equivalent(&self, x: usize, y: usize) -> bool {
        self.limits.support(x) == self.limits.support(y)
    }

    /// `lim_n d(P_n(x, .), mu)`.
    pub fn limit_distance(&self, x: usize, mu: &Distribution<T>) -> T {
        crate::equivalence::tv_slices(self.limits.limit(x).as_slice(), mu.as_slice())
    }

    /// `lim_n d(P_n(x, .), P_n(y, .))`.
    pub fn limit_pair_distance(&self, x: usize, y: usize) -> T {
        crate::equivalence::tv_slices(
            self.limits.limit(x).as_slice(),
            self.limits.limit(y).as_slice(),
        )
    }
}
