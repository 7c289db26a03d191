//! The switching kernel on `E x E`: maximal coupling of the `N`-step rows on
//! `C_{N,p} = {(x, y) : d(P_N(x, .), P_N(y, .)) <= 1 - p}`, independent
//! product elsewhere, diagonal absorbing.

use serde::{Deserialize, Serialize};

use super::joint::maximal_coupling_slices;
use super::JointDistribution;
use crate::chain::{Distribution, Kernel, StateSpace};
use crate::equivalence::tv_slices;
use crate::error::{Error, Result};
use crate::scalar::Prob;
use crate::structure::hit_probabilities;

/// A set of ordered pairs of states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet {
    n: usize,
    members: Vec<bool>,
}

impl PairSet {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.members[x * self.n + y]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n * self.n)
            .filter(|&i| self.members[i])
            .map(|i| (i / self.n, i % self.n))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_count(&self) -> usize {
        self.n
    }
}

fn skeleton_rows<T: Prob>(kernel: &Kernel<T>, step: usize) -> Vec<Vec<T>> {
    (0..kernel.len())
        .map(|x| kernel.n_step(x, step).into_vec())
        .collect()
}

/// `C_{N,p}` computed with the total-variation distance of `N`-step rows.
pub fn coupling_set_c<T: Prob>(kernel: &Kernel<T>, step: usize, p: T) -> Result<PairSet> {
    if step == 0 {
        return Err(Error::PreconditionViolated("N must be at least 1".into()));
    }
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::PreconditionViolated(format!("p = {p} outside (0, 1)")));
    }
    let rows = skeleton_rows(kernel, step);
    Ok(pair_set_from_rows(&rows, p))
}

fn pair_set_from_rows<T: Prob>(rows: &[Vec<T>], p: T) -> PairSet {
    let n = rows.len();
    let bound = T::one() - p;
    let members = (0..n * n)
        .map(|i| tv_slices(&rows[i / n], &rows[i % n]) <= bound)
        .collect();
    PairSet { n, members }
}

/// Whether a row of the switching kernel couples maximally or independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowMode {
    Maximal,
    Independent,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductKernel<T> {
    pub step: usize,
    pub set: PairSet,
    modes: Vec<RowMode>,
    rows: Vec<JointDistribution<T>>,
}

impl<T: Prob> ProductKernel<T> {
    pub fn state_count(&self) -> usize {
        self.set.state_count()
    }

    pub fn row(&self, x: usize, y: usize) -> &JointDistribution<T> {
        &self.rows[x * self.state_count() + y]
    }

    pub fn mode(&self, x: usize, y: usize) -> RowMode {
        self.modes[x * self.state_count() + y]
    }

    /// The chain on pairs as an ordinary kernel on `n^2` states, pair
    /// `(x, y)` at index `x n + y`.
    pub fn pair_kernel(&self, tolerance: T) -> Result<Kernel<T>> {
        let n = self.state_count();
        let entries = self.rows.iter().enumerate().flat_map(|(s, row)| {
            row.entries()
                .iter()
                .map(move |&((i, j), m)| (s, i * n + j, m))
        });
        Kernel::from_entries(StateSpace::indexed(n * n)?, entries, tolerance)
    }
}

/// Builds the switching kernel and checks that every row has marginals
/// `P_N(x, .)` and `P_N(y, .)`.
pub fn switching_kernel<T: Prob>(
    kernel: &Kernel<T>,
    set: &PairSet,
    step: usize,
) -> Result<ProductKernel<T>> {
    if step == 0 {
        return Err(Error::PreconditionViolated("N must be at least 1".into()));
    }
    let n = kernel.len();
    if set.state_count() != n {
        return Err(Error::SpaceMismatch {
            left: set.state_count(),
            right: n,
        });
    }
    let rows_n = skeleton_rows(kernel, step);
    let mut modes = Vec::with_capacity(n * n);
    let mut rows = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let (mode, row) = if x == y {
                let cells = rows_n[x]
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > T::zero())
                    .map(|(i, &m)| ((i, i), m))
                    .collect();
                (RowMode::Diagonal, JointDistribution::from_cells((n, n), cells))
            } else if set.contains(x, y) {
                (RowMode::Maximal, maximal_coupling_slices(&rows_n[x], &rows_n[y]))
            } else {
                (RowMode::Independent, JointDistribution::product(&rows_n[x], &rows_n[y]))
            };
            let err = row.marginal_error(&rows_n[x], &rows_n[y]);
            if err > kernel.tolerance() {
                return Err(Error::NumericalFailure {
                    residual: err.as_f64(),
                });
            }
            modes.push(mode);
            rows.push(row);
        }
    }
    Ok(ProductKernel {
        step,
        set: set.clone(),
        modes,
        rows,
    })
}

/// `(N, p)` for the switching construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingParams<T> {
    pub step: usize,
    pub p: T,
}

/// Halves `p` from `1/2` (outer loop) and scans `N = 1..=2|E|` (inner loop)
/// for the first `C_{N,p}` with positive `mu (x) mu` mass off the diagonal.
/// Falls back to `N = 1`, `p = 1/2` when `mu` charges a single state or no
/// pair qualifies before `p` drops below the tolerance.
pub fn select_switching_params<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
) -> SwitchingParams<T> {
    let fallback = SwitchingParams {
        step: 1,
        p: T::lit(0.5),
    };
    let charged = mu.charged();
    if charged.len() < 2 {
        return fallback;
    }
    let n_max = 2 * kernel.len();
    let mut evolutions: Vec<_> = charged.iter().map(|&x| kernel.evolve(x).skip(1)).collect();
    let mut best_d = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let rows: Vec<Distribution<T>> = evolutions
            .iter_mut()
            .map(|e| e.next().expect("evolution is infinite"))
            .collect();
        let mut d = T::one();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                d = d.min(tv_slices(rows[i].as_slice(), rows[j].as_slice()));
            }
        }
        best_d.push(d);
    }
    let mut p = T::lit(0.5);
    while p > kernel.tolerance() {
        if let Some(k) = best_d.iter().position(|&d| d <= T::one() - p) {
            return SwitchingParams { step: k + 1, p };
        }
        p *= T::lit(0.5);
    }
    fallback
}

/// Exact probability that the switching chain started at each pair ever
/// reaches the diagonal (indexed `x n + y`).
pub fn meeting_probabilities<T: Prob>(pk: &ProductKernel<T>, tolerance: T) -> Result<Vec<T>> {
    let n = pk.state_count();
    let pair = pk.pair_kernel(tolerance)?;
    let diagonal: Vec<bool> = (0..n * n).map(|i| i / n == i % n).collect();
    hit_probabilities(&pair, &diagonal)
}

/// The switching coupling selected for `mu` with its exact meeting
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingAnalysis<T> {
    pub step: usize,
    pub p: T,
    n: usize,
    meet: Vec<T>,
}

impl<T: Prob> SwitchingAnalysis<T> {
    pub fn meet_probability(&self, x: usize, y: usize) -> T {
        self.meet[x * self.n + y]
    }

    /// Pair among `states` with the smallest meeting probability.
    pub fn worst_pair(&self, states: &[usize]) -> (usize, usize, T) {
        let mut worst = (states[0], states[0], T::one());
        for &x in states {
            for &y in states {
                let m = self.meet_probability(x, y);
                if m < worst.2 {
                    worst = (x, y, m);
                }
            }
        }
        worst
    }
}

pub fn switching_analysis<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
) -> Result<SwitchingAnalysis<T>> {
    let params = select_switching_params(kernel, mu);
    switching_analysis_with(kernel, params)
}

pub fn switching_analysis_with<T: Prob>(
    kernel: &Kernel<T>,
    params: SwitchingParams<T>,
) -> Result<SwitchingAnalysis<T>> {
    let set = coupling_set_c(kernel, params.step, params.p)?;
    let pk = switching_kernel(kernel, &set, params.step)?;
    let meet = meeting_probabilities(&pk, kernel.tolerance())?;
    Ok(SwitchingAnalysis {
        step: params.step,
        p: params.p,
        n: kernel.len(),
        meet,
    })
}
