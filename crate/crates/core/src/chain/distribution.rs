use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Prob;

/// A probability vector indexed by state id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution<T> {
    mass: Vec<T>,
    tolerance: T,
}

impl<T: Prob> Distribution<T> {
    /// Validates non-negativity and unit total mass (within `tolerance`).
    pub fn new(mass: Vec<T>, tolerance: T) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty mass vector".into()));
        }
        if let Some((i, m)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < T::zero())
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {m}"
            )));
        }
        let total: T = mass.iter().copied().sum();
        if (total - T::one()).abs() > tolerance {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(Self { mass, tolerance })
    }

    /// Builds a distribution without validation. Callers guarantee the
    /// invariants (used for results of mass-preserving operations).
    pub(crate) fn from_raw(mass: Vec<T>, tolerance: T) -> Self {
        Self { mass, tolerance }
    }

    /// Normalizes an arbitrary non-negative vector with positive total.
    pub fn normalized(mut mass: Vec<T>, tolerance: T) -> Result<Self> {
        let total: T = mass.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        for m in &mut mass {
            *m /= total;
        }
        Self::new(mass, tolerance)
    }

    pub fn point(len: usize, at: usize, tolerance: T) -> Self {
        let mut mass = vec![T::zero(); len];
        mass[at] = T::one();
        Self { mass, tolerance }
    }

    pub fn uniform(len: usize, tolerance: T) -> Self {
        let w = T::one() / T::from_usize(len).expect("length fits");
        Self {
            mass: vec![w; len],
            tolerance,
        }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn mass(&self, i: usize) -> T {
        self.mass[i]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.mass
    }

    pub fn into_vec(self) -> Vec<T> {
        self.mass
    }

    /// States carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.mass[i] > T::zero()).collect()
    }

    /// States carrying mass above the tolerance ("charged" states).
    pub fn charged(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.mass[i] > self.tolerance)
            .collect()
    }

    pub fn is_charged(&self, i: usize) -> bool {
        self.mass[i] > self.tolerance
    }

    pub fn mass_of(&self, set: impl IntoIterator<Item = usize>) -> T {
        set.into_iter().map(|i| self.mass[i]).sum()
    }

    pub fn total(&self) -> T {
        self.mass.iter().copied().sum()
    }

    pub(crate) fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}
