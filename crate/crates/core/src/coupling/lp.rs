//! Transportation LP for the coupling equality
//! `d(a, b) = min { xi(Delta^c) : xi couples a and b }`, used as an oracle.

use super::JointDistribution;
use crate::chain::Distribution;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Largest combined support the dense simplex accepts.
pub const LP_SUPPORT_LIMIT: usize = 64;

/// Minimal off-diagonal mass over all couplings and an optimizer.
pub fn optimal_coupling_lp<T: Prob>(
    a: &Distribution<T>,
    b: &Distribution<T>,
) -> Result<(T, JointDistribution<T>)> {
    a.check_same_space(b)?;
    let support: Vec<usize> = (0..a.len())
        .filter(|&i| a.mass(i) > T::zero() || b.mass(i) > T::zero())
        .collect();
    let s = support.len();
    if s > LP_SUPPORT_LIMIT {
        return Err(Error::SupportTooLarge {
            size: s,
            limit: LP_SUPPORT_LIMIT,
        });
    }
    // Variables xi[i][j] at column i*s + j. Rows: s row sums, s - 1 column
    // sums (the last is implied by the totals).
    let vars = s * s;
    let mut rows = Vec::with_capacity(2 * s - 1);
    let mut rhs = Vec::with_capacity(2 * s - 1);
    for i in 0..s {
        let mut r = vec![T::zero(); vars];
        for j in 0..s {
            r[i * s + j] = T::one();
        }
        rows.push(r);
        rhs.push(a.mass(support[i]));
    }
    for j in 0..s.saturating_sub(1) {
        let mut r = vec![T::zero(); vars];
        for i in 0..s {
            r[i * s + j] = T::one();
        }
        rows.push(r);
        rhs.push(b.mass(support[j]));
    }
    let cost: Vec<T> = (0..vars)
        .map(|v| if v / s == v % s { T::zero() } else { T::one() })
        .collect();
    let (value, x) = simplex_min(rows, rhs, cost)?;
    let cells = x
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > T::zero())
        .map(|(v, &m)| ((support[v / s], support[v % s]), m))
        .collect();
    Ok((value.max(T::zero()), JointDistribution::from_cells((a.len(), a.len()), cells)))
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Prob> Tableau<T> {
    fn pivot(&mut self, obj: &mut [T], r: usize, c: usize) {
        let pv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= pv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != T::zero() {
                    for (v, &p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = obj[c];
        if f != T::zero() {
            for (v, &p) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test
    /// broken by lowest basic index. Terminates on degenerate problems.
    fn optimize(&mut self, obj: &mut [T], allowed: usize, eps: T) -> Result<()> {
        let rhs = self.width;
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j] < -eps) else {
                return Ok(());
            };
            let mut best: Option<(T, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > eps {
                    let ratio = row[rhs] / row[c];
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - eps || (ratio <= br + eps && self.basis[i] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            // Bounded: the transportation polytope is compact.
            let Some((_, r, _)) = best else {
                return Err(Error::LpInfeasible);
            };
            self.pivot(obj, r, c);
        }
    }
}

/// `min c.x` subject to `A x = b`, `x >= 0`, by the two-phase simplex
/// method on a dense tableau.
pub(crate) fn simplex_min<T: Prob>(a: Vec<Vec<T>>, b: Vec<T>, c: Vec<T>) -> Result<(T, Vec<T>)> {
    let m = a.len();
    let nvar = c.len();
    let width = nvar + m;
    let eps = T::pivot_epsilon() * T::lit(100.0);
    let mut rows: Vec<Vec<T>> = a
        .into_iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (mut row, &bi))| {
            let sign = if bi < T::zero() { -T::one() } else { T::one() };
            for v in row.iter_mut() {
                *v *= sign;
            }
            row.resize(width + 1, T::zero());
            row[nvar + i] = T::one();
            row[width] = bi * sign;
            row
        })
        .collect();
    let mut tab = Tableau {
        rows: std::mem::take(&mut rows),
        basis: (nvar..nvar + m).collect(),
        width,
    };

    let mut phase1 = vec![T::zero(); width + 1];
    for row in &tab.rows {
        for j in 0..nvar {
            phase1[j] -= row[j];
        }
        phase1[width] -= row[width];
    }
    tab.optimize(&mut phase1, nvar, eps)?;
    let scale = b.iter().fold(T::one(), |acc, &v| acc.max(v.abs()));
    if -phase1[width] > eps * scale * T::from_usize(m.max(1)).unwrap() {
        return Err(Error::LpInfeasible);
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // redundant and dropped.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= nvar {
            if let Some(j) = (0..nvar).find(|&j| tab.rows[r][j].abs() > eps) {
                tab.pivot(&mut phase1, r, j);
                r += 1;
            } else {
                tab.rows.remove(r);
                tab.basis.remove(r);
            }
        } else {
            r += 1;
        }
    }

    let mut phase2 = vec![T::zero(); width + 1];
    phase2[..nvar].copy_from_slice(&c);
    for (i, row) in tab.rows.iter().enumerate() {
        let cb = c[tab.basis[i]];
        if cb != T::zero() {
            for (v, &p) in phase2.iter_mut().zip(row) {
                *v -= cb * p;
            }
        }
    }
    tab.optimize(&mut phase2, nvar, eps)?;

    let mut x = vec![T::zero(); nvar];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < nvar {
            x[bv] = tab.rows[i][width].max(T::zero());
        }
    }
    let value = x.iter().zip(&c).map(|(&xi, &ci)| xi * ci).sum();
    Ok((value, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_small_problem() {
        // min -x - y  s.t.  x + s1 = 1, y + s2 = 2
        let a = vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]];
        let (v, x) = simplex_min(a, vec![1.0, 2.0], vec![-1.0, -1.0, 0.0, 0.0]).unwrap();
        assert!((v + 3.0f64).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_detects_infeasible() {
        // x = 1 and x = 2
        let a = vec![vec![1.0], vec![1.0]];
        assert_eq!(
            simplex_min(a, vec![1.0f64, 2.0], vec![0.0]).unwrap_err(),
            Error::LpInfeasible
        );
    }
}
