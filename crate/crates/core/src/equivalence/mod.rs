//! Total variation, TV curves, and the A- and G-condition checkers.

mod asymptotic;
mod pairs;

pub use asymptotic::{
    asymptotically_equivalent, default_epsilons, default_n_cap, AsymEquivSearch,
    AsymEquivWitness,
};
pub use pairs::{first_common_state, pair_reachability, DiagonalAtomWitness, PairReachability};

use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::chain::{Distribution, Kernel};
use crate::coupling::switching_analysis;
use crate::error::{Error, Result};
use crate::report::{Condition, ConditionReport, Level, Method, Witness};
use crate::scalar::Prob;

/// `d(nu_1, nu_2) = (1/2) sum |nu_1 - nu_2|`.
pub fn tv_distance<T: Prob>(a: &Distribution<T>, b: &Distribution<T>) -> Result<T> {
    a.check_same_space(b)?;
    Ok(tv_slices(a.as_slice(), b.as_slice()))
}

pub(crate) fn tv_slices<T: Prob>(a: &[T], b: &[T]) -> T {
    let s: T = a.iter().zip(b).map(|(&p, &q)| (p - q).abs()).sum();
    (s * T::lit(0.5)).min(T::one())
}

/// `d(P_n(x, .), mu)` for `n = 0..=n_max`, plus the exact limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TVCurve<T> {
    pub x: usize,
    pub values: Vec<T>,
    pub limit: T,
}

impl<T: Prob> TVCurve<T> {
    pub fn is_non_increasing(&self, tolerance: T) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tolerance)
    }

    pub fn last(&self) -> T {
        *self.values.last().expect("curve has at least two points")
    }
}

pub fn tv_curve<T: Prob>(
    kernel: &Kernel<T>,
    x: usize,
    mu: &Distribution<T>,
    n_max: usize,
) -> Result<TVCurve<T>> {
    Analysis::new(kernel)?.tv_curve(x, mu, n_max)
}

impl<T: Prob> Analysis<'_, T> {
    pub fn tv_curve(&self, x: usize, mu: &Distribution<T>, n_max: usize) -> Result<TVCurve<T>> {
        let kernel = self.kernel();
        kernel.space().check_id(x)?;
        if n_max == 0 {
            return Err(Error::PreconditionViolated("n_max must be at least 1".into()));
        }
        kernel.check_invariant(mu)?;
        let values = kernel
            .evolve(x)
            .take(n_max + 1)
            .map(|p| tv_slices(p.as_slice(), mu.as_slice()))
            .collect();
        Ok(TVCurve {
            x,
            values,
            limit: self.limit_distance(x, mu),
        })
    }
}

/// Which A-condition to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AIndex {
    One,
    Two,
    Three,
    ThreePrime,
}

impl AIndex {
    pub fn condition(self) -> Condition {
        match self {
            AIndex::One => Condition::A1,
            AIndex::Two => Condition::A2,
            AIndex::Three => Condition::A3,
            AIndex::ThreePrime => Condition::A3Prime,
        }
    }
}

pub fn check_a<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    which: AIndex,
) -> Result<ConditionReport<T>> {
    Analysis::new(kernel)?.check_a(mu, which)
}

pub fn check_g<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    level: Level,
) -> Result<ConditionReport<T>> {
    Analysis::new(kernel)?.check_g(mu, level)
}

impl<T: Prob> Analysis<'_, T> {
    /// All of `states` asymptotically equivalent to the first of them
    /// (enough, since the relation is an equivalence).
    ///
    /// Structural: equal limit supports. Definitional: the bounded witness
    /// search confirms positives; a pair whose supports never meet is a
    /// conclusive negative. Anything else is inconclusive.
    pub(crate) fn equivalence_on(&self, states: &[usize]) -> (bool, Option<bool>, Witness<T>) {
        let x0 = states[0];
        if let Some(&y) = states.iter().find(|&&y| !self.structurally_equivalent(x0, y)) {
            let never = self.pairs().get(x0, y).is_none();
            return (
                false,
                never.then_some(false),
                Witness::CounterexamplePair {
                    x: x0,
                    y,
                    detail: "limit supports differ".into(),
                },
            );
        }
        let kernel = self.kernel();
        let eps = default_epsilons::<T>();
        let cap = default_n_cap(kernel.len());
        let mut hardest: Option<AsymEquivSearch<T>> = None;
        let mut confirmed = true;
        for &y in states.iter().skip(1) {
            let search = asymptotically_equivalent(kernel, x0, y, &eps, cap)
                .expect("ids and parameters are valid");
            let ok = search.holds_up_to_cap();
            if hardest.as_ref().is_none_or(|h| search.max_n() > h.max_n() || !ok) {
                hardest = Some(search);
            }
            if !ok {
                confirmed = false;
                break;
            }
        }
        let witness = match hardest {
            Some(h) => Witness::AsymptoticEquivalence {
                x: h.x,
                y: h.y,
                witnesses: h.witnesses(),
            },
            None => Witness::AsymptoticEquivalence {
                x: x0,
                y: x0,
                witnesses: asymptotically_equivalent(kernel, x0, x0, &eps, cap)
                    .expect("ids and parameters are valid")
                    .witnesses(),
            },
        };
        (true, confirmed.then_some(true), witness)
    }

    /// Non-singularity for all pairs of `states`, structurally (one
    /// aperiodic recurrent class carrying the states' limits) and by the
    /// pair graph.
    fn non_singularity_on(&self, states: &[usize], structural: bool) -> (bool, Method, Witness<T>) {
        match self.pairs().scan(states) {
            Ok((x, y, n)) => (
                true,
                Method::combine(structural, Some(true)),
                Witness::NonSingularity { x, y, n },
            ),
            Err((x, y)) => (
                false,
                Method::combine(structural, Some(false)),
                Witness::CounterexamplePair {
                    x,
                    y,
                    detail: "supports of P_n(x,.) and P_n(y,.) are disjoint for every n".into(),
                },
            ),
        }
    }

    /// Charged states lie in a single recurrent class of period one.
    fn charged_in_one_aperiodic_class(&self, mu: &Distribution<T>) -> bool {
        let dec = self.decomposition();
        let charged = mu.charged();
        let c = dec.class_of(charged[0]);
        charged.iter().all(|&x| dec.class_of(x) == c)
            && dec.classes[c].recurrent
            && dec.classes[c].period == Some(1)
    }

    fn single_aperiodic_class(&self) -> bool {
        let dec = self.decomposition();
        dec.recurrent_count() == 1 && dec.recurrent().all(|c| c.period == Some(1))
    }

    pub fn check_a(&self, mu: &Distribution<T>, which: AIndex) -> Result<ConditionReport<T>> {
        let kernel = self.kernel();
        kernel.check_invariant(mu)?;
        let all: Vec<usize> = (0..kernel.len()).collect();
        let charged = mu.charged();
        let (holds, method, witness) = match which {
            AIndex::One | AIndex::ThreePrime => {
                let states = if which == AIndex::One { &all } else { &charged };
                let (s, d, w) = self.equivalence_on(states);
                (s, Method::combine(s, d), w)
            }
            AIndex::Two => self.non_singularity_on(&all, self.single_aperiodic_class()),
            AIndex::Three => {
                self.non_singularity_on(&charged, self.charged_in_one_aperiodic_class(mu))
            }
        };
        Ok(ConditionReport::new(which.condition(), holds, method, witness))
    }

    /// G_2 / G_3: a `delta_z (x) delta_z` coupling at a common exact-step
    /// support point for every (charged) pair. G_1: the switching coupling
    /// meets almost surely from every pair; false whenever A_1 fails.
    pub fn check_g(&self, mu: &Distribution<T>, level: Level) -> Result<ConditionReport<T>> {
        let kernel = self.kernel();
        kernel.check_invariant(mu)?;
        match level {
            Level::One => {
                let all: Vec<usize> = (0..kernel.len()).collect();
                let (a1, _, w) = self.equivalence_on_structural(&all);
                if !a1 {
                    return Ok(ConditionReport::new(Condition::G1, false, Method::Structural, w));
                }
                let sw = switching_analysis(kernel, mu)?;
                let (x, y, meet) = sw.worst_pair(&all);
                let ok = meet >= T::one() - kernel.tolerance();
                Ok(ConditionReport::new(
                    Condition::G1,
                    ok,
                    Method::combine(true, Some(ok)),
                    Witness::Switching {
                        step: sw.step,
                        p: sw.p,
                        x,
                        y,
                        meet_probability: meet,
                    },
                ))
            }
            Level::Two | Level::Three => {
                let (cond, states, structural) = if level == Level::Two {
                    (
                        Condition::G2,
                        (0..kernel.len()).collect::<Vec<_>>(),
                        self.single_aperiodic_class(),
                    )
                } else {
                    (Condition::G3, mu.charged(), self.charged_in_one_aperiodic_class(mu))
                };
                let mut worst: Option<DiagonalAtomWitness> = None;
                for (i, &x) in states.iter().enumerate() {
                    for &y in &states[i..] {
                        match first_common_state(kernel, x, y) {
                            None => {
                                return Ok(ConditionReport::new(
                                    cond,
                                    false,
                                    Method::combine(structural, Some(false)),
                                    Witness::CounterexamplePair {
                                        x,
                                        y,
                                        detail: "no coupling with diagonal mass at any step".into(),
                                    },
                                ))
                            }
                            Some((k, z)) => {
                                if worst.as_ref().is_none_or(|w| k > w.k) {
                                    worst = Some(DiagonalAtomWitness { x, y, k, z });
                                }
                            }
                        }
                    }
                }
                let w = worst.expect("at least one state");
                Ok(ConditionReport::new(
                    cond,
                    true,
                    Method::combine(structural, Some(true)),
                    Witness::DiagonalAtom(w),
                ))
            }
        }
    }

    /// Structural half of [`Self::equivalence_on`] without the search.
    pub(crate) fn equivalence_on_structural(&self, states: &[usize]) -> (bool, Option<bool>, Witness<T>) {
        let x0 = states[0];
        match states.iter().find(|&&y| !self.structurally_equivalent(x0, y)) {
            Some(&y) => (
                false,
                self.pairs().get(x0, y).is_none().then_some(false),
                Witness::CounterexamplePair {
                    x: x0,
                    y,
                    detail: "limit supports differ".into(),
                },
            ),
            None => (true, None, Witness::None),
        }
    }
}
