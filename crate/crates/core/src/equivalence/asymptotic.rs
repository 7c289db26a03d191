//! Bounded search for asymptotic-equivalence witnesses `(n, A)`.

use serde::{Deserialize, Serialize};

use crate::chain::Kernel;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// `P_n(x, A) >= 1 - epsilon`, `P_n(y, A) >= 1 - epsilon`, and the two
/// measures restricted to `A` share their support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymEquivWitness<T> {
    pub n: usize,
    pub set: Vec<usize>,
    pub epsilon: T,
    pub masses: (T, T),
}

impl<T: Prob> AsymEquivWitness<T> {
    /// Recomputes `P_n` from scratch and checks every invariant.
    pub fn verify(&self, kernel: &Kernel<T>, x: usize, y: usize) -> bool {
        let px = kernel.n_step(x, self.n);
        let py = kernel.n_step(y, self.n);
        let floor = T::one() - self.epsilon;
        let same_support = self
            .set
            .iter()
            .all(|&i| (px.mass(i) > T::zero()) == (py.mass(i) > T::zero()));
        same_support
            && px.mass_of(self.set.iter().copied()) >= floor
            && py.mass_of(self.set.iter().copied()) >= floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymEquivSearch<T> {
    pub x: usize,
    pub y: usize,
    pub n_cap: usize,
    /// One entry per requested epsilon, in the order given.
    pub results: Vec<(T, Option<AsymEquivWitness<T>>)>,
}

impl<T: Prob> AsymEquivSearch<T> {
    /// Every epsilon found a witness within the cap.
    pub fn holds_up_to_cap(&self) -> bool {
        self.results.iter().all(|(_, w)| w.is_some())
    }

    pub fn witnesses(&self) -> Vec<AsymEquivWitness<T>> {
        self.results.iter().filter_map(|(_, w)| w.clone()).collect()
    }

    /// Largest witness step over the epsilons.
    pub fn max_n(&self) -> usize {
        self.results
            .iter()
            .filter_map(|(_, w)| w.as_ref().map(|w| w.n))
            .max()
            .unwrap_or(0)
    }
}

/// Epsilons used when none are given.
pub fn default_epsilons<T: Prob>() -> Vec<T> {
    [0.5, 0.1, 0.01, 0.001].iter().map(|&e| T::lit(e)).collect()
}

/// Default cap `4 |E|^2`.
pub fn default_n_cap(len: usize) -> usize {
    4 * len * len
}

/// For `n = 1..=n_cap`, takes `A` as the intersection of the supports of
/// `P_n(x, .)` and `P_n(y, .)` (the largest admissible set) and records the
/// least `n` at which both masses reach `1 - epsilon`, per epsilon.
pub fn asymptotically_equivalent<T: Prob>(
    kernel: &Kernel<T>,
    x: usize,
    y: usize,
    epsilons: &[T],
    n_cap: usize,
) -> Result<AsymEquivSearch<T>> {
    kernel.space().check_id(x)?;
    kernel.space().check_id(y)?;
    if n_cap == 0 {
        return Err(Error::PreconditionViolated("n_cap must be at least 1".into()));
    }
    if let Some(&e) = epsilons.iter().find(|&&e| !(e > T::zero() && e < T::one())) {
        return Err(Error::PreconditionViolated(format!(
            "epsilon {e} outside (0, 1)"
        )));
    }
    let mut results: Vec<(T, Option<AsymEquivWitness<T>>)> =
        epsilons.iter().map(|&e| (e, None)).collect();
    let mut ex = kernel.evolve(x).skip(1);
    let mut ey = kernel.evolve(y).skip(1);
    for n in 1..=n_cap {
        let px = ex.next().expect("evolution is infinite");
        let py = ey.next().expect("evolution is infinite");
        if results.iter().all(|(_, w)| w.is_some()) {
            break;
        }
        let set: Vec<usize> = (0..kernel.len())
            .filter(|&i| px.mass(i) > T::zero() && py.mass(i) > T::zero())
            .collect();
        let mx = px.mass_of(set.iter().copied());
        let my = py.mass_of(set.iter().copied());
        for (e, slot) in results.iter_mut().filter(|(_, w)| w.is_none()) {
            let floor = T::one() - *e;
            if mx >= floor && my >= floor {
                *slot = Some(AsymEquivWitness {
                    n,
                    set: set.clone(),
                    epsilon: *e,
                    masses: (mx, my),
                });
            }
        }
    }
    Ok(AsymEquivSearch {
        x,
        y,
        n_cap,
        results,
    })
}
