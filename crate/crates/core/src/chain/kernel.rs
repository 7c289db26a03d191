use serde::{Deserialize, Serialize};

use super::{Distribution, StateSpace};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// A row-stochastic transition kernel on a finite state space.
///
/// Rows are stored sparsely as `(target, probability)` pairs sorted by
/// target, with exact zeros dropped. The positive-probability digraph used by
/// the structural deciders is read off these entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel<T> {
    space: StateSpace,
    rows: Vec<Vec<(usize, T)>>,
    tolerance: T,
}

/// A subset of states closed under the kernel: every member sends all of its
/// mass (up to tolerance) back into the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub members: Vec<usize>,
}

impl InvariantSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

impl<T: Prob> Kernel<T> {
    /// Builds a kernel from `(from, to, probability)` triples. Duplicate
    /// entries are summed; each row must sum to one within `tolerance`.
    pub fn from_entries(
        space: StateSpace,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
        tolerance: T,
    ) -> Result<Self> {
        let n = space.len();
        let mut dense: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (from, to, p) in entries {
            space.check_id(from)?;
            space.check_id(to)?;
            if !p.is_finite() || p < T::zero() {
                return Err(Error::InvalidProbability {
                    from,
                    to,
                    value: p.as_f64(),
                });
            }
            dense[from].push((to, p));
        }
        let mut rows = Vec::with_capacity(n);
        for (row_id, mut row) in dense.into_iter().enumerate() {
            row.sort_by_key(|&(to, _)| to);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for (to, p) in row {
                match merged.last_mut() {
                    Some((last, acc)) if *last == to => *acc += p,
                    _ => merged.push((to, p)),
                }
            }
            merged.retain(|&(_, p)| p > T::zero());
            let sum: T = merged.iter().map(|&(_, p)| p).sum();
            if (sum - T::one()).abs() > tolerance {
                return Err(Error::RowNotStochastic {
                    row: row_id,
                    sum: sum.as_f64(),
                });
            }
            rows.push(merged);
        }
        Ok(Self {
            space,
            rows,
            tolerance,
        })
    }

    /// Builds a kernel from a dense row-major matrix on states `0..n`.
    pub fn from_dense(matrix: &[Vec<T>], tolerance: T) -> Result<Self> {
        let space = StateSpace::indexed(matrix.len())?;
        let entries = matrix.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, &p)| (i, j, p))
        });
        Self::from_entries(space, entries, tolerance)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn row(&self, x: usize) -> &[(usize, T)] {
        &self.rows[x]
    }

    pub fn prob(&self, x: usize, y: usize) -> T {
        self.rows[x]
            .binary_search_by_key(&y, |&(to, _)| to)
            .map(|k| self.rows[x][k].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// Probability of moving from `x` into `set` in one step.
    pub fn prob_into(&self, x: usize, in_set: &[bool]) -> T {
        self.rows[x]
            .iter()
            .filter(|&&(to, _)| in_set[to])
            .map(|&(_, p)| p)
            .sum()
    }

    pub fn successors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[x].iter().map(|&(to, _)| to)
    }

    /// Adjacency lists of the positive-probability digraph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|x| self.successors(x).collect()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |&(y, p)| (x, y, p)))
    }

    /// One step of a mass vector: `(v P)(j) = sum_i v(i) P(i, j)`.
    pub fn step_mass(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.len()];
        for (i, &vi) in v.iter().enumerate() {
            if vi == T::zero() {
                continue;
            }
            for &(j, p) in &self.rows[i] {
                out[j] += vi * p;
            }
        }
        out
    }

    /// `P_n(x, .)`, computed by repeated sparse row-vector products.
    pub fn n_step(&self, x: usize, n: usize) -> Distribution<T> {
        let mut v = Distribution::point(self.len(), x, self.tolerance).into_vec();
        for _ in 0..n {
            v = self.step_mass(&v);
        }
        Distribution::from_raw(v, self.tolerance)
    }

    /// Iterator over `P_0(x, .), P_1(x, .), ...`.
    pub fn evolve(&self, x: usize) -> Evolution<'_, T> {
        Evolution {
            kernel: self,
            current: Distribution::point(self.len(), x, self.tolerance).into_vec(),
        }
    }

    /// Iterator over `nu, nu P, nu P^2, ...`.
    pub fn evolve_from(&self, nu: &Distribution<T>) -> Evolution<'_, T> {
        Evolution {
            kernel: self,
            current: nu.as_slice().to_vec(),
        }
    }

    /// `nu P`.
    pub fn push_forward(&self, nu: &Distribution<T>) -> Result<Distribution<T>> {
        if nu.len() != self.len() {
            return Err(Error::SpaceMismatch {
                left: nu.len(),
                right: self.len(),
            });
        }
        Ok(Distribution::from_raw(
            self.step_mass(nu.as_slice()),
            self.tolerance,
        ))
    }

    /// `|| mu P - mu ||_1`.
    pub fn invariance_residual(&self, mu: &Distribution<T>) -> Result<T> {
        let next = self.push_forward(mu)?;
        Ok(next
            .as_slice()
            .iter()
            .zip(mu.as_slice())
            .map(|(a, b)| (*a - *b).abs())
            .sum())
    }

    pub fn check_invariant(&self, mu: &Distribution<T>) -> Result<()> {
        let residual = self.invariance_residual(mu)?;
        if residual > self.tolerance {
            Err(Error::NotInvariant {
                residual: residual.as_f64(),
            })
        } else {
            Ok(())
        }
    }

    /// The `h`-skeleton: the kernel whose rows are `P_h(x, .)`.
    pub fn skeleton(&self, h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::PreconditionViolated(
                "skeleton step must be at least 1".into(),
            ));
        }
        if h == 1 {
            return Ok(self.clone());
        }
        let rows = (0..self.len())
            .map(|x| {
                self.n_step(x, h)
                    .into_vec()
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, p)| p > T::zero())
                    .collect()
            })
            .collect();
        Ok(Self {
            space: self.space.clone(),
            rows,
            tolerance: self.tolerance,
        })
    }

    /// Largest invariant subset of `initial`, obtained by repeatedly discarding
    /// states that leak mass out of the current set.
    pub fn absorbing_closure(&self, initial: &[usize]) -> InvariantSet {
        let mut inside = vec![false; self.len()];
        for &x in initial {
            inside[x] = true;
        }
        loop {
            let leaking: Vec<usize> = (0..self.len())
                .filter(|&x| inside[x])
                .filter(|&x| T::one() - self.prob_into(x, &inside) > self.tolerance)
                .collect();
            if leaking.is_empty() {
                break;
            }
            for x in leaking {
                inside[x] = false;
            }
        }
        InvariantSet {
            members: (0..self.len()).filter(|&x| inside[x]).collect(),
        }
    }

    /// The kernel restricted to an invariant set, relabelled so that new id
    /// `k` is `set.members[k]`.
    pub fn restrict(&self, set: &InvariantSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::PreconditionViolated(
                "cannot restrict to an empty set".into(),
            ));
        }
        let mut new_id = vec![usize::MAX; self.len()];
        for (k, &x) in set.members.iter().enumerate() {
            self.space.check_id(x)?;
            new_id[x] = k;
        }
        let mut rows = Vec::with_capacity(set.len());
        for &x in &set.members {
            let mut leak = T::zero();
            let mut row = Vec::new();
            for &(y, p) in &self.rows[x] {
                if new_id[y] == usize::MAX {
                    leak += p;
                } else {
                    row.push((new_id[y], p));
                }
            }
            if leak > self.tolerance {
                return Err(Error::NotInvariantSet {
                    state: x,
                    leak: leak.as_f64(),
                });
            }
            rows.push(row);
        }
        Ok(Self {
            space: self.space.subspace(&set.members)?,
            rows,
            tolerance: self.tolerance,
        })
    }
}

/// Successive `n`-step distributions of a chain.
#[derive(Debug)]
pub struct Evolution<'k, T> {
    kernel: &'k Kernel<T>,
    current: Vec<T>,
}

impl<T: Prob> Iterator for Evolution<'_, T> {
    type Item = Distribution<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let next = self.kernel.step_mass(&self.current);
        let out = std::mem::replace(&mut self.current, next);
        Some(Distribution::from_raw(out, self.kernel.tolerance))
    }
}
