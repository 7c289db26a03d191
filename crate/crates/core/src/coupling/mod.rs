//! Constructive couplings and the C-condition checkers.

mod glue;
mod joint;
mod lp;
mod simulate;
mod switching;

pub use glue::{glue, BridgeTable, ThreeWay};
pub use joint::{maximal_coupling, JointDistribution};
pub use lp::{optimal_coupling_lp, LP_SUPPORT_LIMIT};
pub use simulate::{
    interpolate_skeleton_coupling, simulate_coupling, trace_rng, Coupler, CouplingTrace,
};
pub use switching::{
    coupling_set_c, meeting_probabilities, select_switching_params, switching_analysis,
    switching_analysis_with, switching_kernel, PairSet, ProductKernel, RowMode, SwitchingAnalysis,
    SwitchingParams,
};

use crate::analysis::Analysis;
use crate::chain::{Distribution, Kernel};
use crate::equivalence::tv_slices;
use crate::error::{Error, Result};
use crate::report::{Condition, ConditionReport, CouplingStep, Level, Method, Witness};
use crate::scalar::Prob;

/// Targets `1 - 1/m` for the coupling-sequence witnesses.
const SEQUENCE_TARGETS: [usize; 10] = [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024];

pub fn check_c<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    condition: Condition,
) -> Result<ConditionReport<T>> {
    Analysis::new(kernel)?.check_c(mu, condition)
}

/// Every C-condition of the given index.
pub fn check_c_level<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    level: Level,
) -> Result<Vec<ConditionReport<T>>> {
    let analysis = Analysis::new(kernel)?;
    c_conditions(level)
        .iter()
        .map(|&c| analysis.check_c(mu, c))
        .collect()
}

pub fn c_conditions(level: Level) -> &'static [Condition] {
    match level {
        Level::One => &[
            Condition::C1,
            Condition::C1Hat,
            Condition::C1Ring,
            Condition::C1Prime,
        ],
        Level::Two => &[Condition::C2, Condition::C2Prime],
        Level::Three => &[Condition::C3, Condition::C3Prime],
    }
}

impl<T: Prob> Analysis<'_, T> {
    pub fn check_c(&self, mu: &Distribution<T>, condition: Condition) -> Result<ConditionReport<T>> {
        let kernel = self.kernel();
        kernel.check_invariant(mu)?;
        let all: Vec<usize> = (0..kernel.len()).collect();
        let charged = mu.charged();
        let report = match condition {
            Condition::C1 | Condition::C1Hat => {
                let (holds, method, witness) = self.vanishing_distance(&all);
                ConditionReport::new(condition, holds, method, witness)
            }
            Condition::C1Ring | Condition::C1Prime => {
                let structural = self.limits_agree(&all);
                self.switching_report(condition, mu, structural, &all, &[])?
            }
            Condition::C2 => {
                let structural = self.decomposition().recurrent_count() == 1
                    && self.decomposition().recurrent().all(|c| c.period == Some(1));
                self.overlap_report(condition, &all, structural)
            }
            Condition::C3 => {
                let dec = self.decomposition();
                let c0 = dec.class_of(charged[0]);
                let structural = charged.iter().all(|&x| dec.class_of(x) == c0)
                    && dec.classes[c0].period == Some(1);
                self.overlap_report(condition, &charged, structural)
            }
            Condition::C2Prime => {
                let structural = self.decomposition().recurrent_count() == 1
                    && self.decomposition().recurrent().all(|c| c.period == Some(1));
                self.switching_report(condition, mu, structural, &charged, &all)?
            }
            Condition::C3Prime => {
                let dec = self.decomposition();
                let c0 = dec.class_of(charged[0]);
                let structural = charged.iter().all(|&x| dec.class_of(x) == c0)
                    && dec.classes[c0].period == Some(1);
                self.switching_report(condition, mu, structural, &charged, &[])?
            }
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "{other} is not a C-condition"
                )))
            }
        };
        Ok(report)
    }

    fn limits_agree(&self, states: &[usize]) -> bool {
        let tol = self.kernel().tolerance();
        states
            .iter()
            .all(|&y| self.limit_pair_distance(states[0], y) <= tol)
    }

    /// `d(P_n(x, .), P_n(y, .)) -> 0` for all pairs, decided from the limits
    /// and confirmed by finding, for each target `1 - 1/m`, a step whose
    /// maximal coupling reaches it.
    fn vanishing_distance(&self, states: &[usize]) -> (bool, Method, Witness<T>) {
        let kernel = self.kernel();
        let x0 = states[0];
        let structural = self.limits_agree(states);
        if !structural {
            let y = *states
                .iter()
                .find(|&&y| self.limit_pair_distance(x0, y) > kernel.tolerance())
                .expect("some limit differs");
            let never = self.pairs().get(x0, y).is_none();
            return (
                false,
                Method::combine(false, never.then_some(false)),
                Witness::CounterexamplePair {
                    x: x0,
                    y,
                    detail: format!(
                        "lim d(P_n(x,.), P_n(y,.)) = {}",
                        self.limit_pair_distance(x0, y)
                    ),
                },
            );
        }
        let cap = crate::equivalence::default_n_cap(kernel.len());
        let mut hardest: Option<(usize, Vec<CouplingStep<T>>)> = None;
        let mut confirmed = true;
        for &y in states.iter().skip(1) {
            let steps = coupling_sequence(kernel, x0, y, cap);
            let complete = steps.len() == SEQUENCE_TARGETS.len();
            let last_k = steps.last().map_or(0, |s| s.k);
            if hardest
                .as_ref()
                .is_none_or(|(_, h)| !complete || last_k > h.last().map_or(0, |s| s.k))
            {
                hardest = Some((y, steps));
            }
            if !complete {
                confirmed = false;
                break;
            }
        }
        let (y, steps) = hardest.unwrap_or_else(|| (x0, coupling_sequence(kernel, x0, x0, cap)));
        (
            true,
            Method::combine(true, confirmed.then_some(true)),
            Witness::CouplingSequence { x: x0, y, steps },
        )
    }

    /// Some `k` with `d(P_k(x, .), P_k(y, .)) < 1` for all pairs of
    /// `states`; the pair graph bounds the search by `n^2 + 1` steps, so the
    /// negative is conclusive.
    fn overlap_report(
        &self,
        condition: Condition,
        states: &[usize],
        structural: bool,
    ) -> ConditionReport<T> {
        let kernel = self.kernel();
        let cap = kernel.len() * kernel.len() + 1;
        let mut worst: Option<(usize, usize, usize, T)> = None;
        for (i, &x) in states.iter().enumerate() {
            for &y in &states[i..] {
                let hit = kernel
                    .evolve(x)
                    .zip(kernel.evolve(y))
                    .enumerate()
                    .skip(1)
                    .take(cap)
                    .find_map(|(k, (px, py))| {
                        let overlap = T::one() - tv_slices(px.as_slice(), py.as_slice());
                        let common = (0..kernel.len())
                            .any(|z| px.mass(z) > T::zero() && py.mass(z) > T::zero());
                        common.then_some((k, overlap))
                    });
                match hit {
                    None => {
                        return ConditionReport::new(
                            condition,
                            false,
                            Method::combine(structural, Some(false)),
                            Witness::CounterexamplePair {
                                x,
                                y,
                                detail: "d(P_k(x,.), P_k(y,.)) = 1 for every k".into(),
                            },
                        )
                    }
                    Some((k, mass)) => {
                        if worst.is_none_or(|w| k > w.2) {
                            worst = Some((x, y, k, mass));
                        }
                    }
                }
            }
        }
        let (x, y, k, diagonal_mass) = worst.expect("at least one state");
        ConditionReport::new(
            condition,
            true,
            Method::combine(structural, Some(true)),
            Witness::CouplingAtStep {
                x,
                y,
                k,
                diagonal_mass,
            },
        )
    }

    /// The switching coupling meets almost surely from every pair of
    /// `sure`, and with positive probability from every pair of `positive`.
    fn switching_report(
        &self,
        condition: Condition,
        mu: &Distribution<T>,
        structural: bool,
        sure: &[usize],
        positive: &[usize],
    ) -> Result<ConditionReport<T>> {
        let kernel = self.kernel();
        let sw = switching_analysis(kernel, mu)?;
        let one = T::one() - kernel.tolerance();
        let (x, y, meet) = sw.worst_pair(sure);
        let mut ok = meet >= one;
        let mut shown = (x, y, meet);
        if ok && !positive.is_empty() {
            let (px, py, pm) = sw.worst_pair(positive);
            if pm <= T::zero() {
                ok = false;
                shown = (px, py, pm);
            }
        }
        Ok(ConditionReport::new(
            condition,
            ok,
            Method::combine(structural, Some(ok)),
            Witness::Switching {
                step: sw.step,
                p: sw.p,
                x: shown.0,
                y: shown.1,
                meet_probability: shown.2,
            },
        ))
    }
}

/// For each target `m`, the least `k <= cap` with
/// `d(P_k(x, .), P_k(y, .)) <= 1/m`, and the diagonal mass of the maximal
/// coupling there. Stops at the first unreachable target.
pub fn coupling_sequence<T: Prob>(
    kernel: &Kernel<T>,
    x: usize,
    y: usize,
    cap: usize,
) -> Vec<CouplingStep<T>> {
    let mut steps = Vec::new();
    let mut targets = SEQUENCE_TARGETS.iter().peekable();
    for (k, (px, py)) in kernel.evolve(x).zip(kernel.evolve(y)).enumerate().skip(1).take(cap) {
        let d = tv_slices(px.as_slice(), py.as_slice());
        while let Some(&&m) = targets.peek() {
            if d <= T::one() / T::from_usize(m).expect("small integer") {
                steps.push(CouplingStep {
                    m,
                    k,
                    diagonal_mass: T::one() - d,
                });
                targets.next();
            } else {
                break;
            }
        }
        if targets.peek().is_none() {
            break;
        }
    }
    steps
}
