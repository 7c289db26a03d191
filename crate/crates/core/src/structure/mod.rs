//! Class structure of a finite chain and the B-family deciders:
//! aperiodicity, (weak) irreducibility, Harris recurrence, small sets,
//! maximal irreducibility and the recurrence lemma.

mod hitting;
mod limits;
mod small_set;

pub use hitting::{
    hit_probabilities, hitting_prob_l, hitting_prob_within, hitting_report, q_infinite,
    HittingReport,
};
pub use limits::LimitTable;
pub use small_set::{find_small_set, find_small_set_with, SmallSet};

use serde::{Deserialize, Serialize};

use crate::chain::{Distribution, Kernel};
use crate::error::{Error, Result};
use crate::graph;
use crate::report::{Condition, ConditionReport, Level, Method, Witness};
use crate::scalar::Prob;

/// A communicating class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommClass {
    /// Sorted state ids.
    pub members: Vec<usize>,
    /// Closed classes are exactly the recurrent ones on a finite chain.
    pub recurrent: bool,
    /// Gcd of cycle lengths; `None` for a transient singleton without a
    /// self-loop.
    pub period: Option<usize>,
    /// Cyclic cells `E_0, ..., E_{d-1}`; the move from `E_i` lands in
    /// `E_{i+1 mod d}`. Cell 0 contains the smallest member.
    pub cyclic_classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecomposition {
    pub classes: Vec<CommClass>,
    class_of: Vec<usize>,
    cell_of: Vec<usize>,
}

impl ClassDecomposition {
    /// Recurrent classes in order of their smallest member.
    pub fn recurrent(&self) -> impl Iterator<Item = &CommClass> + '_ {
        self.classes.iter().filter(|c| c.recurrent)
    }

    pub fn recurrent_count(&self) -> usize {
        self.recurrent().count()
    }

    /// Index into `classes`.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Position of the state's class among the recurrent classes.
    pub fn recurrent_index(&self, x: usize) -> Option<usize> {
        let c = self.class_of[x];
        if !self.classes[c].recurrent {
            return None;
        }
        Some(self.classes[..c].iter().filter(|k| k.recurrent).count())
    }

    pub fn is_recurrent_state(&self, x: usize) -> bool {
        self.classes[self.class_of[x]].recurrent
    }

    /// Cyclic cell of `x` within its class, if the class has a period.
    pub fn cell_of(&self, x: usize) -> Option<usize> {
        let c = &self.classes[self.class_of[x]];
        c.period.map(|_| self.cell_of[x])
    }

    pub fn period_lcm(&self) -> usize {
        self.recurrent()
            .map(|c| c.period.unwrap_or(1))
            .fold(1, graph::lcm)
    }
}

/// SCCs of the positive-probability digraph, closedness and periods.
pub fn decompose<T: Prob>(kernel: &Kernel<T>) -> ClassDecomposition {
    let adj = kernel.adjacency();
    let comps = graph::strongly_connected_components(&adj);
    let n = kernel.len();
    let mut class_of = vec![0; n];
    for (c, members) in comps.iter().enumerate() {
        for &m in members {
            class_of[m] = c;
        }
    }
    let mut cell_of = vec![0; n];
    let classes = comps
        .into_iter()
        .enumerate()
        .map(|(c, members)| {
            let recurrent = members
                .iter()
                .all(|&m| adj[m].iter().all(|&y| class_of[y] == c));
            let (period, cyclic_classes) = match graph::period_and_phases(&adj, &members) {
                Some((d, phases)) => {
                    let mut cells = vec![Vec::new(); d];
                    for (&m, &ph) in members.iter().zip(&phases) {
                        cells[ph].push(m);
                        cell_of[m] = ph;
                    }
                    (Some(d), cells)
                }
                None => (None, Vec::new()),
            };
            CommClass {
                members,
                recurrent,
                period,
                cyclic_classes,
            }
        })
        .collect();
    ClassDecomposition {
        classes,
        class_of,
        cell_of,
    }
}

/// Outcome of the aperiodicity decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Periodicity {
    Aperiodic,
    /// `mu(cells[0]) > 0` and the kernel moves `cells[i]` into
    /// `cells[i+1 mod period]` with probability one.
    Periodic {
        period: usize,
        cells: Vec<Vec<usize>>,
    },
}

impl Periodicity {
    pub fn is_aperiodic(&self) -> bool {
        matches!(self, Periodicity::Aperiodic)
    }
}

/// `d`-periodic for some `d >= 2` iff `d` divides the period of a
/// `mu`-charged recurrent class. The witness is the cyclic decomposition of
/// the first such class, rotated so that the first cell is charged.
pub fn is_aperiodic<T: Prob>(kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<Periodicity> {
    kernel.check_invariant(mu)?;
    Ok(periodicity(&decompose(kernel), mu))
}

pub(crate) fn periodicity<T: Prob>(dec: &ClassDecomposition, mu: &Distribution<T>) -> Periodicity {
    for class in dec.recurrent() {
        let d = class.period.unwrap_or(1);
        if d < 2 || mu.mass_of(class.members.iter().copied()) <= mu.tolerance() {
            continue;
        }
        let mut cells = class.cyclic_classes.clone();
        let first = cells
            .iter()
            .position(|c| mu.mass_of(c.iter().copied()) > mu.tolerance())
            .unwrap_or(0);
        cells.rotate_left(first);
        return Periodicity::Periodic { period: d, cells };
    }
    Periodicity::Aperiodic
}

/// Verdict of an irreducibility-type decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Irreducibility {
    pub holds: bool,
    /// `phi = delta_anchor` when the property holds.
    pub anchor: Option<usize>,
    /// States on which the property is asserted (all states, or `E_0`).
    pub domain: Vec<usize>,
    pub method: Method,
}

impl Irreducibility {
    fn witness<T>(&self) -> Witness<T> {
        match self.anchor {
            Some(anchor) if self.holds => Witness::Irreducible {
                anchor,
                domain: self.domain.clone(),
            },
            _ => Witness::None,
        }
    }
}

fn single_recurrent_anchor(dec: &ClassDecomposition) -> Option<usize> {
    let mut rec = dec.recurrent();
    match (rec.next(), rec.next()) {
        (Some(c), None) => Some(c.members[0]),
        _ => None,
    }
}

/// Irreducible iff exactly one recurrent class exists. Cross-checked by
/// evaluating `L(x, {z}) > 0` for every `x` and every candidate `z`.
pub fn is_irreducible<T: Prob>(kernel: &Kernel<T>) -> Result<Irreducibility> {
    let dec = decompose(kernel);
    let anchor = single_recurrent_anchor(&dec);
    let holds = anchor.is_some();
    let mut definitional = false;
    for z in 0..kernel.len() {
        let l = hitting_prob_l(kernel, &[z])?;
        if l.iter().all(|&v| v > T::zero()) {
            definitional = true;
            break;
        }
    }
    Ok(Irreducibility {
        holds,
        anchor,
        domain: (0..kernel.len()).collect(),
        method: Method::combine(holds, Some(definitional)),
    })
}

/// Weak irreducibility: the invariant set generated by the `mu`-charged
/// states carries a single recurrent class.
pub fn is_weakly_irreducible<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
) -> Result<Irreducibility> {
    kernel.check_invariant(mu)?;
    let charged = mu.charged();
    let closure = graph::reachable(&kernel.adjacency(), charged.iter().copied());
    let seed: Vec<usize> = (0..kernel.len()).filter(|&x| closure[x]).collect();
    let e0 = kernel.absorbing_closure(&seed);
    if e0.is_empty() || charged.iter().any(|&x| !e0.contains(x)) {
        return Ok(Irreducibility {
            holds: false,
            anchor: None,
            domain: e0.members,
            method: Method::Structural,
        });
    }
    let sub = kernel.restrict(&e0)?;
    let inner = is_irreducible(&sub)?;
    Ok(Irreducibility {
        holds: inner.holds,
        anchor: inner.anchor.map(|a| e0.members[a]),
        domain: e0.members,
        method: inner.method,
    })
}

/// Harris iff exactly one recurrent class. Cross-checked by searching for
/// a state `z` with `Q(x, {z}) = 1` for all `x`.
pub fn is_harris<T: Prob>(kernel: &Kernel<T>) -> Result<Irreducibility> {
    let dec = decompose(kernel);
    let anchor = single_recurrent_anchor(&dec);
    let holds = anchor.is_some();
    let one = T::one() - kernel.tolerance();
    let mut definitional = false;
    for z in 0..kernel.len() {
        let q = q_infinite(kernel, &[z])?;
        if q.iter().all(|&v| v >= one) {
            definitional = true;
            break;
        }
    }
    Ok(Irreducibility {
        holds,
        anchor,
        domain: (0..kernel.len()).collect(),
        method: Method::combine(holds, Some(definitional)),
    })
}

/// `B_1`: aperiodic and Harris; `B_2`: aperiodic and irreducible; `B_3`:
/// aperiodic and weakly irreducible.
pub fn check_b<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    level: Level,
) -> Result<ConditionReport<T>> {
    let per = is_aperiodic(kernel, mu)?;
    let (cond, name, irr) = match level {
        Level::One => (Condition::B1, "harris", is_harris(kernel)?),
        Level::Two => (Condition::B2, "irreducible", is_irreducible(kernel)?),
        Level::Three => (
            Condition::B3,
            "weakly_irreducible",
            is_weakly_irreducible(kernel, mu)?,
        ),
    };
    let aper_witness = match &per {
        Periodicity::Aperiodic => Witness::None,
        Periodicity::Periodic { period, cells } => Witness::Periodic {
            period: *period,
            cells: cells.clone(),
        },
    };
    let holds = per.is_aperiodic() && irr.holds;
    Ok(ConditionReport::new(
        cond,
        holds,
        irr.method,
        Witness::Conjunction {
            parts: vec![
                ("aperiodic".into(), per.is_aperiodic(), aper_witness),
                (name.into(), irr.holds, irr.witness()),
            ],
        },
    ))
}

/// Pass/fail outcome of a check the theory says cannot fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck<T> {
    pub passed: bool,
    /// Number of target sets examined.
    pub sets_checked: usize,
    /// `(x, B, value)` at the first failure.
    pub offending: Option<(usize, Vec<usize>, T)>,
}

/// If the chain is `phi`-irreducible it is also `mu`-irreducible for every
/// invariant `mu`: `L(x, {z}) > 0` for every `x` and every charged `z`.
pub fn check_maximal_irreducibility<T: Prob>(
    kernel: &Kernel<T>,
    phi: &Distribution<T>,
    mu: &Distribution<T>,
) -> Result<TheoremCheck<T>> {
    if phi.len() != kernel.len() {
        return Err(Error::SpaceMismatch {
            left: kernel.len(),
            right: phi.len(),
        });
    }
    for z in phi.charged() {
        let l = hitting_prob_l(kernel, &[z])?;
        if let Some(x) = l.iter().position(|&v| v <= T::zero()) {
            return Err(Error::PreconditionViolated(format!(
                "not phi-irreducible: L({x}, {{{z}}}) = 0"
            )));
        }
    }
    kernel.check_invariant(mu)?;
    let charged = mu.charged();
    for &z in &charged {
        let l = hitting_prob_l(kernel, &[z])?;
        if let Some(x) = l.iter().position(|&v| v <= T::zero()) {
            return Ok(TheoremCheck {
                passed: false,
                sets_checked: charged.len(),
                offending: Some((x, vec![z], l[x])),
            });
        }
    }
    Ok(TheoremCheck {
        passed: true,
        sets_checked: charged.len(),
        offending: None,
    })
}

/// Subsets of the charged support, exhaustively up to 12 states and as
/// singletons beyond.
fn charged_subsets(charged: &[usize]) -> Vec<Vec<usize>> {
    if charged.len() > 12 {
        return charged.iter().map(|&z| vec![z]).collect();
    }
    (1u32..(1 << charged.len()))
        .map(|mask| {
            charged
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &z)| z)
                .collect()
        })
        .collect()
}

/// Under the index-`level` A-condition, every charged `B` is visited
/// infinitely often: `mu`-a.e. (index 3), additionally with positive
/// probability from everywhere (index 2), or from everywhere (index 1).
pub fn recurrence_lemma_check<T: Prob>(
    kernel: &Kernel<T>,
    mu: &Distribution<T>,
    level: Level,
) -> Result<TheoremCheck<T>> {
    let which = match level {
        Level::One => crate::equivalence::AIndex::One,
        Level::Two => crate::equivalence::AIndex::Two,
        Level::Three => crate::equivalence::AIndex::Three,
    };
    let a = crate::equivalence::check_a(kernel, mu, which)?;
    if !a.holds {
        return Err(Error::PreconditionViolated(format!(
            "{} does not hold",
            a.condition
        )));
    }
    let charged = mu.charged();
    let one = T::one() - kernel.tolerance();
    let subsets = charged_subsets(&charged);
    for b in &subsets {
        let q = q_infinite(kernel, b)?;
        for x in 0..kernel.len() {
            let bad = match level {
                Level::One => q[x] < one,
                Level::Two => q[x] <= T::zero() || (mu.is_charged(x) && q[x] < one),
                Level::Three => mu.is_charged(x) && q[x] < one,
            };
            if bad {
                return Ok(TheoremCheck {
                    passed: false,
                    sets_checked: subsets.len(),
                    offending: Some((x, b.clone(), q[x])),
                });
            }
        }
    }
    Ok(TheoremCheck {
        passed: true,
        sets_checked: subsets.len(),
        offending: None,
    })
}
