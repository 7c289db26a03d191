//! Sampling paths of the switching coupling, with skeleton gaps filled by
//! conditionally independent bridges.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::glue::{sample_index, BridgeTable};
use super::switching::{coupling_set_c, switching_kernel, ProductKernel, SwitchingParams};
use crate::chain::Kernel;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// A coupled path `(X_k, Y_k)` for `k = 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingTrace {
    pub path: Vec<(usize, usize)>,
    /// Least `k` with `X_j = Y_j` for every `j >= k`, if that happens within
    /// the horizon.
    pub meet_time: Option<usize>,
    pub seed: u64,
}

/// Deterministic RNG for trace `stream` of a batch seeded with `seed`.
pub fn trace_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The switching kernel plus bridge tables, ready to sample.
#[derive(Debug, Clone)]
pub struct Coupler<'k, T> {
    kernel: &'k Kernel<T>,
    product: ProductKernel<T>,
    bridges: Option<BridgeTable<T>>,
}

impl<'k, T: Prob> Coupler<'k, T> {
    pub fn new(kernel: &'k Kernel<T>, params: SwitchingParams<T>) -> Result<Self> {
        let set = coupling_set_c(kernel, params.step, params.p)?;
        let product = switching_kernel(kernel, &set, params.step)?;
        Self::from_product(kernel, product)
    }

    pub fn from_product(kernel: &'k Kernel<T>, product: ProductKernel<T>) -> Result<Self> {
        let bridges = if product.step >= 2 {
            Some(BridgeTable::new(kernel, product.step)?)
        } else {
            None
        };
        Ok(Self {
            kernel,
            product,
            bridges,
        })
    }

    pub fn product(&self) -> &ProductKernel<T> {
        &self.product
    }

    /// Fills one skeleton gap: the intermediate and final pairs between
    /// `(x, y)` at time `kN` and `(x', y')` at time `(k+1)N`. On the
    /// diagonal both coordinates follow one shared bridge; elsewhere the two
    /// bridges are drawn independently given their endpoints.
    pub fn interpolate<R: rand::Rng + ?Sized>(
        &self,
        from: (usize, usize),
        to: (usize, usize),
        rng: &mut R,
    ) -> Result<Vec<(usize, usize)>> {
        let unsupported = Error::UnsupportedEndpoint {
            from_x: from.0,
            from_y: from.1,
            to_x: to.0,
            to_y: to.1,
        };
        if self.product.row(from.0, from.1).mass(to.0, to.1) <= T::zero() {
            return Err(unsupported);
        }
        let Some(bridges) = &self.bridges else {
            return Ok(vec![to]);
        };
        let xs = bridges
            .sample(self.kernel, from.0, to.0, rng)
            .map_err(|_| unsupported.clone())?;
        let ys = if from.0 == from.1 && to.0 == to.1 {
            xs.clone()
        } else {
            bridges
                .sample(self.kernel, from.1, to.1, rng)
                .map_err(|_| unsupported)?
        };
        Ok(xs.into_iter().zip(ys).collect())
    }

    pub fn trace<R: rand::Rng + ?Sized>(
        &self,
        x: usize,
        y: usize,
        horizon: usize,
        seed: u64,
        rng: &mut R,
    ) -> Result<CouplingTrace> {
        self.kernel.space().check_id(x)?;
        self.kernel.space().check_id(y)?;
        if horizon == 0 {
            return Err(Error::PreconditionViolated("horizon must be at least 1".into()));
        }
        let mut path = vec![(x, y)];
        let mut current = (x, y);
        let mut met_at_skeleton = x == y;
        while path.len() <= horizon && !met_at_skeleton {
            let law: Vec<(usize, T)> = self
                .product
                .row(current.0, current.1)
                .entries()
                .iter()
                .enumerate()
                .map(|(k, &(_, m))| (k, m))
                .collect();
            let k = sample_index(&law, rng);
            let next = self.product.row(current.0, current.1).entries()[k].0;
            path.extend(self.interpolate(current, next, rng)?);
            current = next;
            met_at_skeleton = next.0 == next.1;
        }
        // After the skeleton meets, the pair moves as one copy of the chain.
        let mut z = current.0;
        while path.len() <= horizon {
            let row: Vec<(usize, T)> = self.kernel.row(z).to_vec();
            z = sample_index(&row, rng);
            path.push((z, z));
        }
        let meet_time = if met_at_skeleton {
            let mut t = path.len();
            while t > 0 && path[t - 1].0 == path[t - 1].1 {
                t -= 1;
            }
            (t <= horizon).then_some(t)
        } else {
            None
        };
        path.truncate(horizon + 1);
        Ok(CouplingTrace {
            path,
            meet_time,
            seed,
        })
    }

    /// Meeting times of `count` independent traces from `(x, y)`; trace `i`
    /// uses stream `i` of `seed`, so the result does not depend on the
    /// thread schedule.
    pub fn meeting_times(
        &self,
        x: usize,
        y: usize,
        horizon: usize,
        seed: u64,
        count: usize,
    ) -> Result<Vec<Option<usize>>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = trace_rng(seed, i as u64);
                self.trace(x, y, horizon, seed, &mut rng).map(|t| t.meet_time)
            })
            .collect()
    }
}

/// One trace of the switching coupling from `(x, y)`.
pub fn simulate_coupling<T: Prob>(
    kernel: &Kernel<T>,
    x: usize,
    y: usize,
    params: SwitchingParams<T>,
    seed: u64,
    horizon: usize,
) -> Result<CouplingTrace> {
    let coupler = Coupler::new(kernel, params)?;
    coupler.trace(x, y, horizon, seed, &mut trace_rng(seed, 0))
}

/// Fills the gaps of a skeleton pair path (pairs at times `0, N, 2N, ...`)
/// into a step-level path.
pub fn interpolate_skeleton_coupling<T: Prob, R: rand::Rng + ?Sized>(
    kernel: &Kernel<T>,
    product: &ProductKernel<T>,
    skeleton: &[(usize, usize)],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if product.step < 2 {
        return Err(Error::PreconditionViolated("interpolation needs N >= 2".into()));
    }
    let coupler = Coupler::from_product(kernel, product.clone())?;
    let mut path = vec![*skeleton
        .first()
        .ok_or_else(|| Error::PreconditionViolated("empty skeleton path".into()))?];
    for w in skeleton.windows(2) {
        path.extend(coupler.interpolate(w[0], w[1], rng)?);
    }
    Ok(path)
}
