//! Independent oracles on dense `f64` matrices. Nothing here calls into the
//! deciders under test; only the instance generators are shared.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvconv::harness::instances;
use tvconv::{Distribution, GeneratorParams, Kernel};

pub type Matrix = Vec<Vec<f64>>;

pub fn dense(k: &Kernel<f64>) -> Matrix {
    let n = k.len();
    (0..n).map(|x| (0..n).map(|y| k.prob(x, y)).collect()).collect()
}

pub fn step(p: &Matrix, v: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n];
    for (x, &vx) in v.iter().enumerate() {
        if vx != 0.0 {
            for y in 0..n {
                out[y] += vx * p[x][y];
            }
        }
    }
    out
}

pub fn point(n: usize, x: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[x] = 1.0;
    v
}

/// Rows `P_0(x,.), ..., P_n_max(x,.)`.
pub fn rows(p: &Matrix, x: usize, n_max: usize) -> Vec<Vec<f64>> {
    let mut out = vec![point(p.len(), x)];
    for _ in 0..n_max {
        let next = step(p, out.last().unwrap());
        out.push(next);
    }
    out
}

pub fn n_step(p: &Matrix, x: usize, n: usize) -> Vec<f64> {
    let mut v = point(p.len(), x);
    for _ in 0..n {
        v = step(p, &v);
    }
    v
}

/// `sup_A |a(A) - b(A)|` by enumerating every subset (at most 20 points).
pub fn tv_subsets(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    assert!(n <= 20);
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        let mut s = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                s += a[i] - b[i];
            }
        }
        best = best.max(s.abs());
    }
    best
}

/// `sup_A` over the positive-part set only, for longer vectors.
pub fn tv_positive_part(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).sum()
}

/// Boolean reachability in `>= 1` steps.
pub fn reach_plus(p: &Matrix) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut r: Vec<Vec<bool>> = p.iter().map(|row| row.iter().map(|&v| v > 0.0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// `L(x, A)`: iterate `h <- 1_A + 1_{A^c} P h` from 0 (at most `iters`
/// times, stopping at a fixed point), then one more step from every state
/// (entry at a time `>= 1`).
pub fn value_iteration_l(p: &Matrix, set: &[usize], iters: usize) -> Vec<f64> {
    let n = p.len();
    let in_set: Vec<bool> = (0..n).map(|x| set.contains(&x)).collect();
    let h = hit_iteration(p, &in_set, iters);
    (0..n).map(|x| (0..n).map(|y| p[x][y] * h[y]).sum()).collect()
}

fn hit_iteration(p: &Matrix, in_set: &[bool], iters: usize) -> Vec<f64> {
    let n = p.len();
    let mut h = vec![0.0; n];
    for _ in 0..iters {
        let next: Vec<f64> = (0..n)
            .map(|x| {
                if in_set[x] {
                    1.0
                } else {
                    (0..n).map(|y| p[x][y] * h[y]).sum()
                }
            })
            .collect();
        let change = sup_change(&h, &next);
        h = next;
        if change < 1e-16 {
            break;
        }
    }
    h
}

fn sup_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `Q(x, A) = lim_n P^n h_A(x)`: the probability of hitting `A` after time
/// `n` decreases to the probability of infinitely many visits.
pub fn value_iteration_q(p: &Matrix, set: &[usize], iters: usize, horizon: usize) -> Vec<f64> {
    let n = p.len();
    let in_set: Vec<bool> = (0..n).map(|x| set.contains(&x)).collect();
    let mut h = hit_iteration(p, &in_set, iters);
    for _ in 0..horizon {
        let next: Vec<f64> = (0..n).map(|x| (0..n).map(|y| p[x][y] * h[y]).sum()).collect();
        let change = sup_change(&h, &next);
        h = next;
        if change < 1e-16 {
            break;
        }
    }
    h
}

/// Largest `d >= 2` admitting disjoint `E_1..E_d` with `mu(E_1) > 0` and
/// `P(x, E_{i+1}) = 1` on `E_i`, by exhaustive assignment of states to
/// cells (or to no cell). Returns every feasible `d`.
pub fn brute_periods(p: &Matrix, mu: &[f64], tol: f64) -> Vec<usize> {
    let n = p.len();
    let mut feasible = Vec::new();
    for d in 2..=n {
        let total = (d + 1).pow(n as u32);
        let mut cell = vec![0usize; n];
        'assign: for code in 0..total {
            let mut c = code;
            for s in cell.iter_mut() {
                *s = c % (d + 1);
                c /= d + 1;
            }
            // cell value 0: unassigned; 1..=d: E_1..E_d.
            let mass1: f64 = (0..n).filter(|&x| cell[x] == 1).map(|x| mu[x]).sum();
            if mass1 <= tol {
                continue;
            }
            for i in 1..=d {
                if !(0..n).any(|x| cell[x] == i) {
                    continue 'assign;
                }
            }
            for x in 0..n {
                if cell[x] == 0 {
                    continue;
                }
                let next = cell[x] % d + 1;
                let into: f64 = (0..n).filter(|&y| cell[y] == next).map(|y| p[x][y]).sum();
                if into < 1.0 - tol {
                    continue 'assign;
                }
            }
            feasible.push(d);
            break;
        }
    }
    feasible
}

/// `d` cells satisfy the cyclic-set definition.
pub fn is_cyclic_witness(p: &Matrix, mu: &[f64], cells: &[Vec<usize>], tol: f64) -> bool {
    let d = cells.len();
    if d < 2 || cells.iter().any(|c| c.is_empty()) {
        return false;
    }
    let mut seen = vec![false; p.len()];
    for c in cells {
        for &x in c {
            if seen[x] {
                return false;
            }
            seen[x] = true;
        }
    }
    let mass1: f64 = cells[0].iter().map(|&x| mu[x]).sum();
    mass1 > tol
        && (0..d).all(|i| {
            let next = &cells[(i + 1) % d];
            cells[i]
                .iter()
                .all(|&x| next.iter().map(|&y| p[x][y]).sum::<f64>() >= 1.0 - tol)
        })
}

/// `lim_n d(P_n(x,.), mu)` read off the curve at a long horizon; the curve
/// is non-increasing, so the tail value is the limit up to the decay.
pub fn curve_limit(p: &Matrix, x: usize, mu: &[f64], horizon: usize) -> f64 {
    let v = n_step(p, x, horizon);
    tv_positive_part(&v, mu)
}

/// Horizon `10 |E| lcm(periods)` with a floor that lets slow transients die.
pub fn threshold_horizon(n: usize) -> usize {
    (10 * n * lcm_upto(n)).max(4000)
}

fn lcm_upto(n: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=n).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

/// `(P1, P2, P3)` by thresholding the tail of every curve.
pub fn threshold_p(p: &Matrix, mu: &[f64], tol: f64) -> (bool, bool, bool) {
    let n = p.len();
    let horizon = threshold_horizon(n);
    let limits: Vec<f64> = (0..n).map(|x| curve_limit(p, x, mu, horizon)).collect();
    let eps = 1e-6;
    let p1 = limits.iter().all(|&l| l < eps);
    let p3 = (0..n).filter(|&x| mu[x] > tol).all(|x| limits[x] < eps);
    let p2 = p3 && limits.iter().all(|&l| l < 1.0 - eps);
    (p1, p2, p3)
}

pub fn random_instances(count: usize, max_states: usize, seed: u64) -> Vec<(GeneratorParams, Kernel<f64>, Distribution<f64>)> {
    instances::<f64>(count, max_states, seed).expect("sampled params are realizable")
}

/// Random pair of probability vectors on `n` points with supports of at
/// most `max_support` each.
pub fn random_measure_pair(rng: &mut ChaCha8Rng, n: usize, max_support: usize) -> (Vec<f64>, Vec<f64>) {
    let draw = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=max_support.min(n));
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            idx.swap(i, j);
        }
        let mut v = vec![0.0; n];
        for &i in &idx[..k] {
            v[i] = rng.gen_range(0.01..1.0);
        }
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
