//! Hitting probabilities `L(x, A)` and infinitely-often probabilities
//! `Q(x, A)` on finite chains.

use serde::{Deserialize, Serialize};

use super::decompose;
use crate::chain::Kernel;
use crate::error::{Error, Result};
use crate::graph;
use crate::linalg;
use crate::scalar::Prob;

/// `L(x, A)` and `Q(x, A)` for one target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingReport<T> {
    pub target: Vec<usize>,
    pub l: Vec<T>,
    pub q: Vec<T>,
}

fn membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    if set.is_empty() {
        return Err(Error::PreconditionViolated("target set is empty".into()));
    }
    let mut inside = vec![false; n];
    for &a in set {
        if a >= n {
            return Err(Error::IndexOutOfRange { id: a, len: n });
        }
        inside[a] = true;
    }
    Ok(inside)
}

/// Probability of ever visiting `target` at a time `n >= 0` (so states of
/// the target get 1). This is the minimal non-negative solution of the
/// first-step equations.
///
/// States that cannot reach the target get exactly 0; states that cannot
/// reach any such state get exactly 1; the rest solve `(I - P_MM) h = b`.
pub fn hit_probabilities<T: Prob>(kernel: &Kernel<T>, target: &[bool]) -> Result<Vec<T>> {
    let n = kernel.len();
    let killed: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            if target[x] {
                Vec::new()
            } else {
                kernel.successors(x).collect()
            }
        })
        .collect();
    let rev = graph::reverse(&killed);
    let reaches_target = graph::reachable(&rev, (0..n).filter(|&x| target[x]));
    let zero: Vec<bool> = (0..n).map(|x| !reaches_target[x]).collect();
    let reaches_zero = graph::reachable(&rev, (0..n).filter(|&x| zero[x]));

    let mut h = vec![T::zero(); n];
    let mut unknown = Vec::new();
    for x in 0..n {
        if target[x] {
            h[x] = T::one();
        } else if zero[x] {
            h[x] = T::zero();
        } else if !reaches_zero[x] {
            h[x] = T::one();
        } else {
            unknown.push(x);
        }
    }
    if unknown.is_empty() {
        return Ok(h);
    }

    let mut local = vec![usize::MAX; n];
    for (i, &x) in unknown.iter().enumerate() {
        local[x] = i;
    }
    let m = unknown.len();
    let mut a = vec![vec![T::zero(); m]; m];
    let mut b = vec![T::zero(); m];
    for (i, &x) in unknown.iter().enumerate() {
        a[i][i] += T::one();
        for &(y, p) in kernel.row(x) {
            if local[y] != usize::MAX {
                a[i][local[y]] -= p;
            } else {
                b[i] += p * h[y];
            }
        }
    }
    let sol = linalg::solve(a.clone(), b.clone()).ok_or(Error::NumericalFailure {
        residual: f64::INFINITY,
    })?;
    let residual = a
        .iter()
        .zip(&b)
        .map(|(row, &bi)| {
            let lhs: T = row.iter().zip(&sol).map(|(&aij, &xj)| aij * xj).sum();
            (lhs - bi).abs()
        })
        .fold(T::zero(), T::max);
    if residual > kernel.tolerance() {
        return Err(Error::NumericalFailure {
            residual: residual.as_f64(),
        });
    }
    for (i, &x) in unknown.iter().enumerate() {
        h[x] = sol[i].max(T::zero()).min(T::one());
    }
    Ok(h)
}

/// `L(x, A)`: probability of entering `A` at some time `n >= 1`. For
/// `x` in `A` this is the return probability.
pub fn hitting_prob_l<T: Prob>(kernel: &Kernel<T>, set: &[usize]) -> Result<Vec<T>> {
    let inside = membership(kernel.len(), set)?;
    let h = hit_probabilities(kernel, &inside)?;
    Ok((0..kernel.len())
        .map(|x| {
            let l: T = kernel.row(x).iter().map(|&(y, p)| p * h[y]).sum();
            l.min(T::one())
        })
        .collect())
}

/// `Q(x, A)`: probability of visiting `A` infinitely often, i.e. of being
/// absorbed by a recurrent class that meets `A`.
pub fn q_infinite<T: Prob>(kernel: &Kernel<T>, set: &[usize]) -> Result<Vec<T>> {
    let inside = membership(kernel.len(), set)?;
    let dec = decompose(kernel);
    let mut absorbing = vec![false; kernel.len()];
    let mut any = false;
    for class in dec.recurrent() {
        if class.members.iter().any(|&x| inside[x]) {
            any = true;
            for &x in &class.members {
                absorbing[x] = true;
            }
        }
    }
    if !any {
        return Ok(vec![T::zero(); kernel.len()]);
    }
    hit_probabilities(kernel, &absorbing)
}

/// `P_x(X_k in A for some 1 <= k <= horizon)`, by backward iteration.
pub fn hitting_prob_within<T: Prob>(
    kernel: &Kernel<T>,
    set: &[usize],
    horizon: usize,
) -> Result<Vec<T>> {
    let inside = membership(kernel.len(), set)?;
    let mut u = vec![T::zero(); kernel.len()];
    for _ in 0..horizon {
        u = (0..kernel.len())
            .map(|x| {
                kernel
                    .row(x)
                    .iter()
                    .map(|&(y, p)| if inside[y] { p } else { p * u[y] })
                    .sum()
            })
            .collect();
    }
    Ok(u)
}

pub fn hitting_report<T: Prob>(kernel: &Kernel<T>, set: &[usize]) -> Result<HittingReport<T>> {
    Ok(HittingReport {
        target: set.to_vec(),
        l: hitting_prob_l(kernel, set)?,
        q: q_infinite(kernel, set)?,
    })
}
