//! Discrete gluing of two joint laws along a shared coordinate, and the
//! conditional path bridges used to interpolate skeleton couplings.

use serde::{Deserialize, Serialize};

use super::JointDistribution;
use crate::chain::Kernel;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Sparse law on `E_1 x E_2 x E_3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeWay<T> {
    pub dims: (usize, usize, usize),
    pub entries: Vec<((usize, usize, usize), T)>,
}

impl<T: Prob> ThreeWay<T> {
    pub fn mass(&self, a: usize, b: usize, c: usize) -> T {
        self.entries
            .iter()
            .filter(|&&(abc, _)| abc == (a, b, c))
            .map(|&(_, m)| m)
            .sum()
    }

    pub fn project_12(&self) -> JointDistribution<T> {
        let cells = self.entries.iter().map(|&((a, b, _), m)| ((a, b), m)).collect();
        JointDistribution::from_cells((self.dims.0, self.dims.1), cells)
    }

    pub fn project_23(&self) -> JointDistribution<T> {
        let cells = self.entries.iter().map(|&((_, b, c), m)| ((b, c), m)).collect();
        JointDistribution::from_cells((self.dims.1, self.dims.2), cells)
    }

    pub fn project_13(&self) -> JointDistribution<T> {
        let cells = self.entries.iter().map(|&((a, _, c), m)| ((a, c), m)).collect();
        JointDistribution::from_cells((self.dims.0, self.dims.2), cells)
    }
}

/// `mass(a, b, c) = rho1(a, b) rho3(b, c) / m(b)` with `m` the first
/// marginal of `rho3`; cells with `m(b) = 0` carry no mass. Summing out `c`
/// gives back `rho1`, summing out `a` gives back `rho3`.
pub fn glue<T: Prob>(
    rho1: &JointDistribution<T>,
    rho3: &JointDistribution<T>,
    tolerance: T,
) -> Result<ThreeWay<T>> {
    let (n1, n2) = rho1.dims();
    let (m2, n3) = rho3.dims();
    if n2 != m2 {
        return Err(Error::SpaceMismatch { left: n2, right: m2 });
    }
    let left = rho1.second_marginal();
    let right = rho3.first_marginal();
    for (b, (&l, &r)) in left.iter().zip(&right).enumerate() {
        if (l - r).abs() > tolerance {
            return Err(Error::MarginalMismatch {
                index: b,
                left: l.as_f64(),
                right: r.as_f64(),
            });
        }
    }
    let mut by_middle: Vec<Vec<(usize, T)>> = vec![Vec::new(); n2];
    for &((b, c), m) in rho3.entries() {
        by_middle[b].push((c, m));
    }
    let mut entries = Vec::new();
    for &((a, b), m1) in rho1.entries() {
        if right[b] <= T::zero() {
            continue;
        }
        for &(c, m3) in &by_middle[b] {
            entries.push(((a, b, c), m1 * m3 / right[b]));
        }
    }
    Ok(ThreeWay {
        dims: (n1, n2, n3),
        entries,
    })
}

/// Conditional one-step laws of a chain bridge: from `v` with `r` steps
/// left and required endpoint `b`, the next state has law
/// `P(v, w) P_{r-1}(w, b) / P_r(v, b)`.
#[derive(Debug, Clone)]
pub struct BridgeTable<T> {
    n: usize,
    len: usize,
    /// `table[r - 2][v * n + b]`; `r = 1` is deterministic.
    table: Vec<Vec<Vec<(usize, T)>>>,
}

impl<T: Prob> BridgeTable<T> {
    /// Bridges of length `len >= 1`, each conditional built by gluing the
    /// joint law of `(X_1, X_r)` given `X_0 = v` from the one-step and
    /// `(r-1)`-step transitions.
    pub fn new(kernel: &Kernel<T>, len: usize) -> Result<Self> {
        let n = kernel.len();
        let tol = kernel.tolerance();
        let mut powers: Vec<Vec<Vec<T>>> = Vec::with_capacity(len);
        powers.push(
            (0..n)
                .map(|w| {
                    let mut v = vec![T::zero(); n];
                    v[w] = T::one();
                    v
                })
                .collect(),
        );
        for r in 1..len {
            let next = powers[r - 1].iter().map(|row| kernel.step_mass(row)).collect();
            powers.push(next);
        }
        let mut table = Vec::new();
        for r in 2..=len {
            let mut by_vb = vec![Vec::new(); n * n];
            for v in 0..n {
                let first: Vec<((usize, usize), T)> =
                    kernel.row(v).iter().map(|&(w, p)| ((v, w), p)).collect();
                let rho1 = JointDistribution::from_cells((n, n), first);
                let later: Vec<((usize, usize), T)> = kernel
                    .row(v)
                    .iter()
                    .flat_map(|&(w, p)| {
                        powers[r - 1][w]
                            .iter()
                            .enumerate()
                            .filter(|(_, &q)| q > T::zero())
                            .map(move |(c, &q)| ((w, c), p * q))
                    })
                    .collect();
                let rho3 = JointDistribution::from_cells((n, n), later);
                let triple = glue(&rho1, &rho3, tol)?;
                for &((_, w, c), m) in &triple.entries {
                    by_vb[v * n + c].push((w, m));
                }
            }
            for row in by_vb.iter_mut() {
                let total: T = row.iter().map(|&(_, m)| m).sum();
                for (_, m) in row.iter_mut() {
                    *m /= total;
                }
            }
            table.push(by_vb);
        }
        Ok(Self { n, len, table })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Law of the next state from `v` with `r` steps to go, ending at `b`.
    /// Empty when `b` is unreachable in exactly `r` steps.
    pub fn conditional(&self, v: usize, r: usize, b: usize) -> std::borrow::Cow<'_, [(usize, T)]> {
        if r == 1 {
            return std::borrow::Cow::Owned(vec![(b, T::one())]);
        }
        std::borrow::Cow::Borrowed(&self.table[r - 2][v * self.n + b])
    }

    /// Samples `z_1, ..., z_len` of a bridge from `from` to `to`.
    pub fn sample<R: rand::Rng + ?Sized>(
        &self,
        kernel: &Kernel<T>,
        from: usize,
        to: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if self.len >= 2 && self.conditional(from, self.len, to).is_empty()
            || self.len == 1 && kernel.prob(from, to) <= T::zero()
        {
            return Err(Error::UnsupportedEndpoint {
                from_x: from,
                from_y: from,
                to_x: to,
                to_y: to,
            });
        }
        let mut path = Vec::with_capacity(self.len);
        let mut v = from;
        for r in (1..=self.len).rev() {
            v = sample_index(&self.conditional(v, r, to), rng);
            path.push(v);
        }
        Ok(path)
    }
}

/// Inverse-CDF draw from a sparse law.
pub(crate) fn sample_index<T: Prob, R: rand::Rng + ?Sized>(law: &[(usize, T)], rng: &mut R) -> usize {
    let total: f64 = law.iter().map(|&(_, m)| m.as_f64()).sum();
    let mut u = rng.gen::<f64>() * total;
    for &(i, m) in law {
        let m = m.as_f64();
        if u < m {
            return i;
        }
        u -= m;
    }
    law.last().expect("non-empty law").0
}
