//! States, distributions and kernels: `n`-step transitions, push-forwards,
//! invariant measures, invariant subsets, restriction and skeleton chains.

mod distribution;
mod kernel;
mod space;

pub use distribution::Distribution;
pub use kernel::{Evolution, InvariantSet, Kernel};
pub use space::StateSpace;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Prob;
use crate::structure::decompose;

impl<T: Prob> Kernel<T> {
    /// Extremal invariant probability measures, one per recurrent class, in
    /// the order of [`crate::structure::ClassDecomposition::recurrent`].
    ///
    /// Each measure solves `(P^T - I) mu = 0` on its class with the
    /// normalization row substituted for the last balance equation.
    pub fn invariant_measures(&self) -> Result<Vec<Distribution<T>>> {
        let dec = decompose(self);
        dec.recurrent()
            .map(|class| self.class_invariant_measure(&class.members))
            .collect()
    }

    pub(crate) fn class_invariant_measure(&self, members: &[usize]) -> Result<Distribution<T>> {
        let k = members.len();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &x) in members.iter().enumerate() {
            local[x] = i;
        }
        let mut a = vec![vec![T::zero(); k]; k];
        for (i, &x) in members.iter().enumerate() {
            a[i][i] -= T::one();
            for &(y, p) in self.row(x) {
                if local[y] != usize::MAX {
                    a[local[y]][i] += p;
                }
            }
        }
        let mut b = vec![T::zero(); k];
        a[k - 1] = vec![T::one(); k];
        b[k - 1] = T::one();
        let solution = linalg::solve(a, b).ok_or(Error::NumericalFailure {
            residual: f64::INFINITY,
        })?;

        let mut mass = vec![T::zero(); self.len()];
        for (i, &x) in members.iter().enumerate() {
            mass[x] = solution[i].max(T::zero());
        }
        let total: T = mass.iter().copied().sum();
        for m in &mut mass {
            *m /= total;
        }
        let mu = Distribution::from_raw(mass, self.tolerance());
        let residual = self.invariance_residual(&mu)?;
        if residual > self.tolerance() {
            return Err(Error::NumericalFailure {
                residual: residual.as_f64(),
            });
        }
        Ok(mu)
    }
}
