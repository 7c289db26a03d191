//! Seeded random chains with prescribed recurrent classes and periods.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{Distribution, Kernel, StateSpace};
use crate::error::{Error, Result};
use crate::graph;
use crate::scalar::Prob;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n_states: usize,
    pub n_recurrent_classes: usize,
    /// One period per recurrent class.
    pub periods: Vec<usize>,
    /// Share of states that are transient, rounded down.
    pub transient_fraction: f64,
    /// Probability that an admissible edge is left out, in `[0, 1)`.
    pub sparsity: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn n_transient(&self) -> usize {
        (self.transient_fraction * self.n_states as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::UnrealizableParams(m));
        if self.n_states == 0 {
            return bad("no states".into());
        }
        if self.n_recurrent_classes == 0 {
            return bad("at least one recurrent class is needed".into());
        }
        if self.periods.len() != self.n_recurrent_classes {
            return bad(format!(
                "{} periods for {} classes",
                self.periods.len(),
                self.n_recurrent_classes
            ));
        }
        if self.periods.contains(&0) {
            return bad("period 0".into());
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return bad(format!("transient_fraction {}", self.transient_fraction));
        }
        if !(0.0..1.0).contains(&self.sparsity) {
            return bad(format!("sparsity {}", self.sparsity));
        }
        let needed: usize = self.periods.iter().sum();
        let available = self.n_states - self.n_transient();
        if needed > available {
            return bad(format!(
                "classes need {needed} recurrent states, only {available} available"
            ));
        }
        Ok(())
    }

    /// Random realizable parameters with at most `max_states` states.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, max_states: usize, seed: u64) -> Self {
        let n_states = rng.gen_range(1..=max_states.max(1));
        let transient_fraction = if n_states > 1 && rng.gen_bool(0.6) {
            rng.gen_range(0.0..0.5)
        } else {
            0.0
        };
        let n_transient = (transient_fraction * n_states as f64).floor() as usize;
        let mut room = n_states - n_transient;
        let classes = rng.gen_range(1..=room.min(3));
        let mut periods = Vec::with_capacity(classes);
        for c in 0..classes {
            // Keep one state for each class still to come.
            let spare = room - (classes - c - 1);
            let p = if rng.gen_bool(0.7) { 1 } else { rng.gen_range(1..=spare.min(3)) };
            periods.push(p);
            room -= p;
        }
        Self {
            n_states,
            n_recurrent_classes: classes,
            periods,
            transient_fraction,
            sparsity: rng.gen_range(0.0..0.7),
            seed,
        }
    }
}

/// Kernel plus an invariant measure mixed from a random nonempty subset of
/// the extremal ones.
pub fn random_chain<T: Prob>(params: &GeneratorParams) -> Result<(Kernel<T>, Distribution<T>)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_states;
    let n_transient = params.n_transient();
    let n_rec = n - n_transient;

    // Class sizes: each class gets its period, the rest is spread at random.
    let mut sizes = params.periods.clone();
    for _ in 0..n_rec - sizes.iter().sum::<usize>() {
        let c = rng.gen_range(0..sizes.len());
        sizes[c] += 1;
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut next = 0;
    let mut recurrent = Vec::new();
    for (&size, &period) in sizes.iter().zip(&params.periods) {
        let members: Vec<usize> = ids[next..next + size].to_vec();
        next += size;
        wire_class(&mut rng, &mut adj, &members, period, params.sparsity);
        recurrent.extend_from_slice(&members);
    }
    let transient: Vec<usize> = ids[next..].to_vec();
    for &t in &transient {
        let exit = recurrent[rng.gen_range(0..recurrent.len())];
        adj[t].push(exit);
        for &y in recurrent.iter().chain(&transient) {
            if y != exit && rng.gen_bool((1.0 - params.sparsity) / 2.0) {
                adj[t].push(y);
            }
        }
    }

    let mut entries = Vec::new();
    for (x, succ) in adj.iter_mut().enumerate() {
        succ.sort_unstable();
        succ.dedup();
        let w: Vec<f64> = succ.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        for (&y, &wy) in succ.iter().zip(&w) {
            entries.push((x, y, T::lit(wy / total)));
        }
    }
    let tol = T::default_tolerance();
    let kernel = Kernel::from_entries(StateSpace::indexed(n)?, entries, tol)?;

    let extremal = kernel.invariant_measures()?;
    let mut chosen: Vec<usize> = (0..extremal.len()).filter(|_| rng.gen_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(rng.gen_range(0..extremal.len()));
    }
    let weights: Vec<f64> = chosen.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let mut mass = vec![T::zero(); n];
    for (&c, &w) in chosen.iter().zip(&weights) {
        for (m, &e) in mass.iter_mut().zip(extremal[c].as_slice()) {
            *m += T::lit(w / wsum) * e;
        }
    }
    let mu = Distribution::normalized(mass, tol)?;
    Ok((kernel, mu))
}

/// Edges of one recurrent class: cells `0..period`, every member moves to
/// the next cell. Random sparse wirings are retried until the class is
/// strongly connected with the prescribed period; after that, all
/// cell-to-next-cell edges are used.
fn wire_class<R: Rng + ?Sized>(
    rng: &mut R,
    adj: &mut [Vec<usize>],
    members: &[usize],
    period: usize,
    sparsity: f64,
) {
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); period];
    for (i, &m) in members.iter().enumerate() {
        let c = if i < period { i } else { rng.gen_range(0..period) };
        cells[c].push(m);
    }
    let n = adj.len();
    for attempt in 0..20 {
        let dense = attempt == 19;
        let mut local: Vec<Vec<usize>> = vec![Vec::new(); n];
        for c in 0..period {
            let targets = &cells[(c + 1) % period];
            for &x in &cells[c] {
                for &y in targets {
                    if dense || rng.gen_bool(1.0 - sparsity) {
                        local[x].push(y);
                    }
                }
                if local[x].is_empty() {
                    local[x].push(targets[rng.gen_range(0..targets.len())]);
                }
            }
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let comps = graph::strongly_connected_components(&local);
        let connected = comps.iter().any(|c| c.len() == members.len() && c[0] == sorted[0]);
        let right_period = connected
            && graph::period_and_phases(&local, &sorted).map(|(d, _)| d) == Some(period);
        if right_period {
            for &x in members {
                adj[x] = std::mem::take(&mut local[x]);
            }
            return;
        }
    }
    unreachable!("complete cell-to-cell wiring is strongly connected with the cell period");
}
