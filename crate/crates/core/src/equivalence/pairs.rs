//! Non-singularity of `P_n(x, .)` and `P_n(y, .)` on a discrete space:
//! two measures are non-singular iff their supports intersect.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::Kernel;
use crate::scalar::Prob;

/// For each ordered pair, the least `n >= 1` at which `P_n(x, .)` and
/// `P_n(y, .)` have a common support point, or `None` if that never happens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReachability {
    n: usize,
    table: Vec<Option<usize>>,
}

impl PairReachability {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize) -> Option<usize> {
        self.table[x * self.n + y]
    }

    /// First pair among `states` that never becomes non-singular, or the
    /// pair with the largest first time together with that time.
    pub fn scan(&self, states: &[usize]) -> Result<(usize, usize, usize), (usize, usize)> {
        let mut worst = (states.first().copied().unwrap_or(0), states.first().copied().unwrap_or(0), 0);
        for &x in states {
            for &y in states {
                match self.get(x, y) {
                    None => return Err((x, y)),
                    Some(k) if k > worst.2 => worst = (x, y, k),
                    Some(_) => {}
                }
            }
        }
        Ok(worst)
    }
}

/// Reverse BFS from the diagonal in the product digraph. The distance to
/// the diagonal (0 on it) gives `entry(x, y) = 1 + min` over successor pairs.
pub fn pair_reachability<T: Prob>(kernel: &Kernel<T>) -> PairReachability {
    let n = kernel.len();
    let adj = kernel.adjacency();
    let rev = crate::graph::reverse(&adj);
    let mut dist = vec![usize::MAX; n * n];
    let mut queue = VecDeque::new();
    for z in 0..n {
        dist[z * n + z] = 0;
        queue.push_back((z, z));
    }
    while let Some((u, v)) = queue.pop_front() {
        let d = dist[u * n + v];
        for &a in &rev[u] {
            for &b in &rev[v] {
                if dist[a * n + b] == usize::MAX {
                    dist[a * n + b] = d + 1;
                    queue.push_back((a, b));
                }
            }
        }
    }
    let table = (0..n * n)
        .map(|i| {
            let (x, y) = (i / n, i % n);
            adj[x]
                .iter()
                .flat_map(|&a| adj[y].iter().map(move |&b| (a, b)))
                .map(|(a, b)| dist[a * n + b])
                .filter(|&d| d != usize::MAX)
                .min()
                .map(|d| d + 1)
        })
        .collect();
    PairReachability { n, table }
}

/// Exact-step supports: `supp P_k(x, .)` as a boolean mask.
pub(crate) fn step_support<T: Prob>(kernel: &Kernel<T>, current: &[bool]) -> Vec<bool> {
    let mut next = vec![false; current.len()];
    for (x, _) in current.iter().enumerate().filter(|(_, &c)| c) {
        for y in kernel.successors(x) {
            next[y] = true;
        }
    }
    next
}

/// Least `k >= 1` with a common state in the exact-`k`-step supports, and
/// the smallest such state. Exhaustive: the pair graph has `n^2` vertices,
/// and a repeated pair of support sets closes a cycle.
pub fn first_common_state<T: Prob>(kernel: &Kernel<T>, x: usize, y: usize) -> Option<(usize, usize)> {
    let n = kernel.len();
    let mut sx = vec![false; n];
    let mut sy = vec![false; n];
    sx[x] = true;
    sy[y] = true;
    let mut seen = HashSet::new();
    for k in 1..=n * n + 1 {
        sx = step_support(kernel, &sx);
        sy = step_support(kernel, &sy);
        if let Some(z) = (0..n).find(|&z| sx[z] && sy[z]) {
            return Some((k, z));
        }
        if !seen.insert((sx.clone(), sy.clone())) {
            return None;
        }
    }
    None
}

/// A generalized coupling `delta_z (x) delta_z` of `P_k(x, .)` and
/// `P_k(y, .)`: its marginals are absolutely continuous with respect to
/// them, and its diagonal mass is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalAtomWitness {
    pub x: usize,
    pub y: usize,
    pub k: usize,
    pub z: usize,
}

impl DiagonalAtomWitness {
    /// `z` is reachable from `x` and from `y` in exactly `k` steps.
    pub fn validate<T: Prob>(&self, kernel: &Kernel<T>) -> bool {
        let n = kernel.len();
        if self.x >= n || self.y >= n || self.z >= n || self.k == 0 {
            return false;
        }
        let mut sx = vec![false; n];
        let mut sy = vec![false; n];
        sx[self.x] = true;
        sy[self.y] = true;
        for _ in 0..self.k {
            sx = step_support(kernel, &sx);
            sy = step_support(kernel, &sy);
        }
        sx[self.z] && sy[self.z]
    }

    pub fn diagonal_mass(&self) -> f64 {
        1.0
    }
}
