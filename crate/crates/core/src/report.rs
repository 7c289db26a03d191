//! Condition tags, decision methods and witness payloads shared by every
//! checker.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equivalence::{AsymEquivWitness, DiagonalAtomWitness};

/// The convergence properties and the A/B/C/G assumption families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    P1,
    P2,
    P3,
    /// Almost-everywhere convergence plus uniqueness of the invariant measure.
    P2Tilde,
    A1,
    A2,
    A3,
    A3Prime,
    B1,
    B2,
    B3,
    C1,
    C1Hat,
    C1Ring,
    C1Prime,
    C2,
    C2Prime,
    C3,
    C3Prime,
    G1,
    G2,
    G3,
}

impl Condition {
    pub const ALL: [Condition; 22] = [
        Condition::P1,
        Condition::P2,
        Condition::P3,
        Condition::P2Tilde,
        Condition::A1,
        Condition::A2,
        Condition::A3,
        Condition::A3Prime,
        Condition::B1,
        Condition::B2,
        Condition::B3,
        Condition::C1,
        Condition::C1Hat,
        Condition::C1Ring,
        Condition::C1Prime,
        Condition::C2,
        Condition::C2Prime,
        Condition::C3,
        Condition::C3Prime,
        Condition::G1,
        Condition::G2,
        Condition::G3,
    ];

    /// The equivalence class (1, 2 or 3) the condition belongs to, if any.
    pub fn index(self) -> Option<Level> {
        use Condition::*;
        match self {
            P1 | A1 | B1 | C1 | C1Hat | C1Ring | C1Prime | G1 => Some(Level::One),
            P2 | A2 | B2 | C2 | C2Prime | G2 => Some(Level::Two),
            P3 | A3 | A3Prime | B3 | C3 | C3Prime | G3 => Some(Level::Three),
            P2Tilde => None,
        }
    }

    pub fn name(self) -> &'static str {
        use Condition::*;
        match self {
            P1 => "P1",
            P2 => "P2",
            P3 => "P3",
            P2Tilde => "P2~",
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            A3Prime => "A3'",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            C1 => "C1",
            C1Hat => "C1^",
            C1Ring => "C1o",
            C1Prime => "C1'",
            C2 => "C2",
            C2Prime => "C2'",
            C3 => "C3",
            C3Prime => "C3'",
            G1 => "G1",
            G2 => "G2",
            G3 => "G3",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index of a condition family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    One,
    Two,
    Three,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::One, Level::Two, Level::Three];

    pub fn number(self) -> usize {
        match self {
            Level::One => 1,
            Level::Two => 2,
            Level::Three => 3,
        }
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Decided from the class / period / limit structure of the chain.
    Structural,
    /// Decided by evaluating the defining property directly.
    Definitional,
    /// Both routes ran to a conclusion and returned the same boolean.
    BothAgree,
    /// Both routes ran to a conclusion and disagreed. Always a bug.
    Conflict,
}

impl Method {
    /// Combines a structural verdict with an optional conclusive
    /// definitional verdict.
    pub fn combine(structural: bool, definitional: Option<bool>) -> Self {
        match definitional {
            None => Method::Structural,
            Some(d) if d == structural => Method::BothAgree,
            Some(_) => Method::Conflict,
        }
    }
}

/// One step of a sequence of couplings: at step `k` the coupling puts
/// `diagonal_mass` on the diagonal. `m` is the target index (`1 - 1/m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStep<T> {
    pub m: usize,
    pub k: usize,
    pub diagonal_mass: T,
}

/// Condition-specific evidence attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness<T> {
    None,
    /// A pair of states at which the condition fails.
    CounterexamplePair { x: usize, y: usize, detail: String },
    /// A state at which the condition fails.
    CounterexampleState { x: usize, detail: String },
    /// Largest limiting distance `lim d(P_n(x,.), mu)` and where it occurs.
    Limits { worst_state: usize, limit: T },
    /// A cyclic decomposition `E_1, ..., E_d` with `mu(E_1) > 0`.
    Periodic { period: usize, cells: Vec<Vec<usize>> },
    /// `phi = delta_z` witnesses (weak) irreducibility on `domain`.
    Irreducible { anchor: usize, domain: Vec<usize> },
    /// Sub-verdicts of a conjunction (aperiodicity first).
    Conjunction {
        parts: Vec<(String, bool, Witness<T>)>,
    },
    /// Asymptotic-equivalence witnesses for the hardest pair found.
    AsymptoticEquivalence {
        x: usize,
        y: usize,
        witnesses: Vec<AsymEquivWitness<T>>,
    },
    /// Largest first time of non-singularity over the quantified pairs.
    NonSingularity { x: usize, y: usize, n: usize },
    /// Couplings of `P_k(x,.)` and `P_k(y,.)` with growing diagonal mass.
    CouplingSequence {
        x: usize,
        y: usize,
        steps: Vec<CouplingStep<T>>,
    },
    /// A coupling of `P_k(x,.)`, `P_k(y,.)` with positive diagonal mass.
    CouplingAtStep {
        x: usize,
        y: usize,
        k: usize,
        diagonal_mass: T,
    },
    /// The switching coupling used, with the smallest meeting probability
    /// over the quantified pairs.
    Switching {
        step: usize,
        p: T,
        x: usize,
        y: usize,
        meet_probability: T,
    },
    /// A generalized coupling `delta_z (x) delta_z`.
    DiagonalAtom(DiagonalAtomWitness),
}

/// Verdict for a single condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport<T> {
    pub condition: Condition,
    pub holds: bool,
    pub method: Method,
    pub witness: Witness<T>,
}

impl<T> ConditionReport<T> {
    pub fn new(condition: Condition, holds: bool, method: Method, witness: Witness<T>) -> Self {
        Self {
            condition,
            holds,
            method,
            witness,
        }
    }
}
