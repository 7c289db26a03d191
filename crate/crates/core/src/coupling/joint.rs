//! Sparse joint distributions on `E_1 x E_2` and the maximal coupling.

use serde::{Deserialize, Serialize};

use crate::chain::Distribution;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Sparse probability on a product of two finite spaces. Entries are kept
/// sorted by `(i, j)` with no zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution<T> {
    dims: (usize, usize),
    entries: Vec<((usize, usize), T)>,
}

impl<T: Prob> JointDistribution<T> {
    /// Duplicate cells are summed. Fails on negative mass or a total away
    /// from one by more than `tolerance`.
    pub fn new(
        dims: (usize, usize),
        cells: impl IntoIterator<Item = ((usize, usize), T)>,
        tolerance: T,
    ) -> Result<Self> {
        let mut entries: Vec<((usize, usize), T)> = Vec::new();
        for ((i, j), m) in cells {
            if i >= dims.0 || j >= dims.1 {
                return Err(Error::IndexOutOfRange {
                    id: i.max(j),
                    len: dims.0.min(dims.1),
                });
            }
            if !(m >= T::zero()) || !m.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "mass {m} at ({i}, {j})"
                )));
            }
            entries.push(((i, j), m));
        }
        let joint = Self::from_cells(dims, entries);
        let total = joint.total();
        if (total - T::one()).abs() > tolerance {
            return Err(Error::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(joint)
    }

    pub(crate) fn from_cells(dims: (usize, usize), mut cells: Vec<((usize, usize), T)>) -> Self {
        cells.sort_by_key(|&(ij, _)| ij);
        let mut entries: Vec<((usize, usize), T)> = Vec::with_capacity(cells.len());
        for (ij, m) in cells {
            match entries.last_mut() {
                Some((last, acc)) if *last == ij => *acc += m,
                _ => entries.push((ij, m)),
            }
        }
        entries.retain(|&(_, m)| m > T::zero());
        Self { dims, entries }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn entries(&self) -> &[((usize, usize), T)] {
        &self.entries
    }

    pub fn mass(&self, i: usize, j: usize) -> T {
        self.entries
            .binary_search_by_key(&(i, j), |&(ij, _)| ij)
            .map(|k| self.entries[k].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn total(&self) -> T {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn first_marginal(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dims.0];
        for &((i, _), m) in &self.entries {
            out[i] += m;
        }
        out
    }

    pub fn second_marginal(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dims.1];
        for &((_, j), m) in &self.entries {
            out[j] += m;
        }
        out
    }

    /// `xi(Delta)`.
    pub fn diagonal_mass(&self) -> T {
        self.entries
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|&(_, m)| m)
            .sum()
    }

    /// Largest absolute deviation of the two marginals from `a` and `b`.
    pub fn marginal_error(&self, a: &[T], b: &[T]) -> T {
        let m1 = self.first_marginal();
        let m2 = self.second_marginal();
        let e1 = m1.iter().zip(a).map(|(&p, &q)| (p - q).abs());
        let e2 = m2.iter().zip(b).map(|(&p, &q)| (p - q).abs());
        e1.chain(e2).fold(T::zero(), T::max)
    }

    /// Product measure `a (x) b`.
    pub fn product(a: &[T], b: &[T]) -> Self {
        let cells = a
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > T::zero())
            .flat_map(|(i, &p)| {
                b.iter()
                    .enumerate()
                    .filter(|(_, &q)| q > T::zero())
                    .map(move |(j, &q)| ((i, j), p * q))
            })
            .collect();
        Self::from_cells((a.len(), b.len()), cells)
    }
}

/// Coupling with diagonal `min(a, b)` and off-diagonal part the normalized
/// product of the residuals. Its diagonal mass is `1 - d(a, b)`.
pub fn maximal_coupling<T: Prob>(
    a: &Distribution<T>,
    b: &Distribution<T>,
) -> Result<JointDistribution<T>> {
    a.check_same_space(b)?;
    Ok(maximal_coupling_slices(a.as_slice(), b.as_slice()))
}

pub(crate) fn maximal_coupling_slices<T: Prob>(a: &[T], b: &[T]) -> JointDistribution<T> {
    let n = a.len();
    let mut cells = Vec::new();
    let mut ra = vec![T::zero(); n];
    let mut rb = vec![T::zero(); n];
    for i in 0..n {
        let m = a[i].min(b[i]);
        if m > T::zero() {
            cells.push(((i, i), m));
        }
        ra[i] = a[i] - m;
        rb[i] = b[i] - m;
    }
    let da: T = ra.iter().copied().sum();
    let db: T = rb.iter().copied().sum();
    if da > T::zero() && db > T::zero() {
        for i in (0..n).filter(|&i| ra[i] > T::zero()) {
            for j in (0..n).filter(|&j| rb[j] > T::zero()) {
                // Both residual totals equal d; averaging keeps the marginals
                // symmetric under rounding.
                cells.push(((i, j), ra[i] * rb[j] * T::lit(2.0) / (da + db)));
            }
        }
    }
    JointDistribution::from_cells((n, n), cells)
}
