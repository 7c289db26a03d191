//! Minorization `P_m(x, .) >= nu` on a small set `C`.

use serde::{Deserialize, Serialize};

use super::{decompose, is_irreducible};
use crate::chain::Kernel;
use crate::error::{Error, Result};
use crate::scalar::Prob;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallSet<T> {
    /// Sorted state ids of `C`.
    pub set: Vec<usize>,
    /// The minorizing measure (a multiple of a point mass here).
    pub nu: Vec<T>,
    pub m: usize,
    /// Whether `nu(C) > 0`. Not required, see [`find_small_set`].
    pub nu_charges_set: bool,
}

impl<T: Prob> SmallSet<T> {
    /// Re-checks `P_m(x, {z}) >= nu({z}) - tol` for every `x` in `C`.
    pub fn verify(&self, kernel: &Kernel<T>) -> bool {
        if self.set.is_empty() || self.nu.iter().all(|&v| v <= T::zero()) {
            return false;
        }
        self.set.iter().all(|&x| {
            let row = kernel.n_step(x, self.m);
            (0..kernel.len()).all(|z| row.mass(z) >= self.nu[z] - kernel.tolerance())
        })
    }
}

/// [`find_small_set_with`] with `m_max = 2 |E|`.
pub fn find_small_set<T: Prob>(kernel: &Kernel<T>) -> Result<SmallSet<T>> {
    find_small_set_with(kernel, 2 * kernel.len())
}

/// For `m = 1, 2, ...` and every anchor `z`, tries `nu = beta delta_z` on
/// `C = {x : P_m(x, {z}) >= beta}` with `beta` running over the distinct
/// positive values of `P_m(., {z})`. `C` must meet the recurrent class so
/// that every invariant measure charges it. Among the hits at the smallest
/// `m`, prefers the largest `nu(E) = beta`, then the largest `C`, then the
/// lexicographically smallest `C`.
pub fn find_small_set_with<T: Prob>(kernel: &Kernel<T>, m_max: usize) -> Result<SmallSet<T>> {
    let irr = is_irreducible(kernel)?;
    if !irr.holds {
        return Err(Error::NotIrreducible);
    }
    let dec = decompose(kernel);
    let n = kernel.len();
    let mut rows: Vec<Vec<T>> = (0..n)
        .map(|x| {
            let mut v = vec![T::zero(); n];
            v[x] = T::one();
            v
        })
        .collect();

    for m in 1..=m_max {
        for row in rows.iter_mut() {
            *row = kernel.step_mass(row);
        }
        let mut best: Option<(T, Vec<usize>, usize)> = None;
        for z in 0..n {
            let mut betas: Vec<T> = rows
                .iter()
                .map(|r| r[z])
                .filter(|&v| v > T::zero())
                .collect();
            betas.sort_by(|a, b| b.partial_cmp(a).expect("finite probabilities"));
            betas.dedup();
            for beta in betas {
                let set: Vec<usize> = (0..n).filter(|&x| rows[x][z] >= beta).collect();
                if !set.iter().any(|&x| dec.is_recurrent_state(x)) {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((b, c, _)) => {
                        beta > *b
                            || (beta == *b
                                && (set.len() > c.len() || (set.len() == c.len() && set < *c)))
                    }
                };
                if better {
                    best = Some((beta, set, z));
                }
                break;
            }
        }
        if let Some((beta, set, z)) = best {
            let mut nu = vec![T::zero(); n];
            nu[z] = beta;
            let nu_charges_set = set.contains(&z);
            return Ok(SmallSet {
                set,
                nu,
                m,
                nu_charges_set,
            });
        }
    }
    Err(Error::SearchExhausted { m_max })
}
