//! Exact limits of `P_{kL}(x, .)` as `k -> infinity`, where `L` is the least
//! common multiple of the recurrent periods.
//!
//! For a recurrent class `R` of period `d` with cyclic cells, a chain started
//! at `x` enters `R` at a random time `tau` in some cell `c`; at times that
//! are multiples of `L` it then sits in cell `c - tau (mod d)` and converges
//! to `d * pi_R` restricted to that cell. The phase probabilities
//! `f_R(x, s) = P_x(c - tau = s mod d)` solve a linear system over the
//! transient states that can reach `R`.

use super::ClassDecomposition;
use crate::chain::{Distribution, Kernel};
use crate::error::{Error, Result};
use crate::graph;
use crate::linalg;
use crate::scalar::Prob;

#[derive(Debug, Clone)]
pub struct LimitTable<T> {
    period_lcm: usize,
    limits: Vec<Distribution<T>>,
    support: Vec<Vec<bool>>,
}

impl<T: Prob> LimitTable<T> {
    /// `ipms[r]` must be the invariant measure of the `r`-th recurrent class.
    pub fn new(
        kernel: &Kernel<T>,
        dec: &ClassDecomposition,
        ipms: &[Distribution<T>],
    ) -> Result<Self> {
        let n = kernel.len();
        let adj = kernel.adjacency();
        let rev = graph::reverse(&adj);
        let mut mass = vec![vec![T::zero(); n]; n];
        let mut support = vec![vec![false; n]; n];

        for (r, class) in dec.recurrent().enumerate() {
            let d = class.period.expect("recurrent class has a period");
            let dt = T::from_usize(d).expect("period fits");
            let pi = &ipms[r];
            let phases = phase_absorption(kernel, dec, &rev, r, d)?;
            for x in 0..n {
                let (f, pos) = &phases[x];
                for &j in &class.members {
                    let c = dec.cell_of(j).expect("recurrent state has a cell");
                    if pos[c] {
                        support[x][j] = true;
                        mass[x][j] = f[c] * dt * pi.mass(j);
                    }
                }
            }
        }
        let period_lcm = dec
            .recurrent()
            .map(|c| c.period.unwrap_or(1))
            .fold(1, graph::lcm);
        let limits = mass
            .into_iter()
            .map(|m| Distribution::from_raw(m, kernel.tolerance()))
            .collect();
        Ok(Self {
            period_lcm,
            limits,
            support,
        })
    }

    pub fn period_lcm(&self) -> usize {
        self.period_lcm
    }

    /// `lim_k P_{kL}(x, .)`.
    pub fn limit(&self, x: usize) -> &Distribution<T> {
        &self.limits[x]
    }

    /// Structural support of the limit (exact, independent of rounding).
    pub fn support(&self, x: usize) -> &[bool] {
        &self.support[x]
    }
}

/// Per state: phase probabilities `f(x, s)` for recurrent class `r` and
/// whether each phase is reachable at all.
fn phase_absorption<T: Prob>(
    kernel: &Kernel<T>,
    dec: &ClassDecomposition,
    rev: &[Vec<usize>],
    r: usize,
    d: usize,
) -> Result<Vec<(Vec<T>, Vec<bool>)>> {
    let n = kernel.len();
    let class = dec.recurrent().nth(r).expect("class index in range");
    let class_id = dec.class_of(class.members[0]);
    let mut out = vec![(vec![T::zero(); d], vec![false; d]); n];
    for &x in &class.members {
        let c = dec.cell_of(x).expect("recurrent state has a cell");
        out[x].0[c] = T::one();
        out[x].1[c] = true;
    }

    let reaches = graph::reachable(rev, class.members.iter().copied());
    let transient: Vec<usize> = (0..n)
        .filter(|&x| reaches[x] && !dec.is_recurrent_state(x))
        .collect();
    if transient.is_empty() {
        return Ok(out);
    }
    let in_class = |y: usize| dec.class_of(y) == class_id;
    let mut local = vec![usize::MAX; n];
    for (i, &t) in transient.iter().enumerate() {
        local[t] = i;
    }

    // Boolean phase reachability: least fixpoint of the first-entry recursion.
    let mut pos = vec![vec![false; d]; transient.len()];
    loop {
        let mut changed = false;
        for (i, &t) in transient.iter().enumerate() {
            for &(y, _) in kernel.row(t) {
                if in_class(y) {
                    let c = dec.cell_of(y).unwrap();
                    let s = (c + d - 1) % d;
                    if !pos[i][s] {
                        pos[i][s] = true;
                        changed = true;
                    }
                } else if local[y] != usize::MAX {
                    for s in 0..d {
                        if pos[local[y]][(s + 1) % d] && !pos[i][s] {
                            pos[i][s] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let adj = kernel.adjacency();
    let only_here = d == 1
        && transient.iter().all(|&t| {
            let seen = graph::reachable(&adj, [t]);
            dec.recurrent()
                .filter(|c| c.members.iter().any(|&m| seen[m]))
                .count()
                == 1
        });
    let values: Vec<Vec<T>> = if only_here {
        vec![vec![T::one()]; transient.len()]
    } else {
        solve_phases(kernel, &transient, &local, d, |y| {
            if in_class(y) {
                dec.cell_of(y)
            } else {
                None
            }
        })?
    };

    for (i, &t) in transient.iter().enumerate() {
        for s in 0..d {
            if pos[i][s] {
                out[t].0[s] = values[i][s].max(T::zero()).min(T::one());
                out[t].1[s] = true;
            }
        }
    }
    Ok(out)
}

fn solve_phases<T: Prob>(
    kernel: &Kernel<T>,
    transient: &[usize],
    local: &[usize],
    d: usize,
    cell: impl Fn(usize) -> Option<usize>,
) -> Result<Vec<Vec<T>>> {
    let m = transient.len() * d;
    let idx = |i: usize, s: usize| i * d + s;
    let mut a = vec![vec![T::zero(); m]; m];
    let mut b = vec![T::zero(); m];
    for (i, &t) in transient.iter().enumerate() {
        for s in 0..d {
            let row = idx(i, s);
            a[row][row] += T::one();
            for &(y, p) in kernel.row(t) {
                if let Some(c) = cell(y) {
                    if c == (s + 1) % d {
                        b[row] += p;
                    }
                } else if local[y] != usize::MAX {
                    a[row][idx(local[y], (s + 1) % d)] -= p;
                }
            }
        }
    }
    let sol = linalg::solve(a, b).ok_or(Error::NumericalFailure {
        residual: f64::INFINITY,
    })?;
    Ok((0..transient.len())
        .map(|i| (0..d).map(|s| sol[idx(i, s)]).collect())
        .collect())
}
