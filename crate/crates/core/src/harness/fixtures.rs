//! The three counterexample chains, truncated where countable, with
//! machine-readable expected verdicts.

use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::chain::{Distribution, Kernel, StateSpace};
use crate::equivalence::{asymptotically_equivalent, DiagonalAtomWitness};
use crate::error::{Error, Result};
use crate::report::Condition;
use crate::scalar::Prob;
use crate::structure::{hitting_prob_within, is_aperiodic, Periodicity};

pub const FIXTURE_NAMES: [&str; 3] = ["peri", "simple", "standard"];

/// Horizon at which the tail-dependent claims of "standard" are checked;
/// far below the time the walk needs to come back from the boundary.
pub const STANDARD_HORIZON: usize = 2000;

/// One expected property. Claims about truncated chains carry the horizon
/// up to which they are meant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case")]
pub enum Claim {
    /// Exact verdict of a condition on the shipped (finite) chain.
    Condition { condition: Condition, holds: bool },
    /// The chain has exactly one invariant measure, `delta_state`.
    UniqueIpm { state: usize },
    /// `is_aperiodic` returns this period and these cells.
    Periodic { period: usize, cells: Vec<Vec<usize>> },
    /// `d(P_n(x, .), mu) = value` for every `n <= up_to`.
    TvConstant { x: usize, value: f64, up_to: usize, tolerance: f64 },
    /// `lim d(P_n(x, .), mu) = value`.
    TvLimit { x: usize, value: f64, tolerance: f64 },
    /// `d(P_horizon(x, .), mu) = value`.
    TvAtHorizon { x: usize, value: f64, horizon: usize, tolerance: f64 },
    /// `P_x(hit target within horizon steps) = value`.
    HittingWithin { x: usize, target: usize, value: f64, horizon: usize, tolerance: f64 },
    /// `supp P_n(x, .) != supp P_n(y, .)` for `1 <= n <= up_to`.
    SupportsDiffer { x: usize, y: usize, up_to: usize },
    /// At step `n`, the support intersection is `set` and carries `masses`.
    AsymptoticWitness { x: usize, y: usize, n: usize, set: Vec<usize>, masses: (f64, f64), tolerance: f64 },
    /// The bounded asymptotic-equivalence search at `epsilon` fails up to
    /// `horizon` (the pattern of a non-equivalent pair).
    EquivalenceFailsUpTo { x: usize, y: usize, epsilon: f64, horizon: usize },
    /// `delta_z (x) delta_z` is a valid generalized coupling at step `k`.
    DiagonalAtom { x: usize, y: usize, k: usize, z: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedVerdicts {
    pub claims: Vec<(String, Claim)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub description: String,
    pub passed: bool,
    pub observed: String,
}

#[derive(Debug, Clone)]
pub struct Fixture<T> {
    pub name: String,
    pub kernel: Kernel<T>,
    pub mu: Distribution<T>,
    pub expected: ExpectedVerdicts,
}

pub fn fixture<T: Prob>(name: &str, truncation: usize) -> Result<Fixture<T>> {
    match name {
        "peri" => Ok(peri()),
        "simple" => simple(truncation),
        "standard" => standard(truncation),
        other => Err(Error::UnknownFixture(other.into())),
    }
}

/// Truncation used when none is requested.
pub fn default_truncation(name: &str) -> usize {
    match name {
        "simple" => 40,
        "standard" => 60,
        _ => 2,
    }
}

fn claim(text: impl Into<String>, c: Claim) -> (String, Claim) {
    (text.into(), c)
}

fn index_conditions(holds: bool, levels: &[usize]) -> Vec<(String, Claim)> {
    Condition::ALL
        .iter()
        .filter(|c| c.index().is_some_and(|l| levels.contains(&l.number())))
        .map(|&c| {
            claim(
                format!("{c} {}", if holds { "holds" } else { "fails" }),
                Claim::Condition { condition: c, holds },
            )
        })
        .collect()
}

fn peri<T: Prob>() -> Fixture<T> {
    let tol = T::default_tolerance();
    let kernel = Kernel::from_entries(
        StateSpace::indexed(2).expect("two labels"),
        [(0, 1, T::one()), (1, 0, T::one())],
        tol,
    )
    .expect("valid kernel");
    let mu = Distribution::uniform(2, tol);
    let mut claims = vec![
        claim(
            "2-periodic with cells {0}, {1}",
            Claim::Periodic { period: 2, cells: vec![vec![0], vec![1]] },
        ),
        claim(
            "d(P_n(0,.), mu) = 1/2 for n <= 100",
            Claim::TvConstant { x: 0, value: 0.5, up_to: 100, tolerance: 1e-12 },
        ),
        claim(
            "second clause of P2 holds: limit 1/2 at 0",
            Claim::TvLimit { x: 0, value: 0.5, tolerance: 1e-12 },
        ),
        claim(
            "second clause of P2 holds: limit 1/2 at 1",
            Claim::TvLimit { x: 1, value: 0.5, tolerance: 1e-12 },
        ),
        claim(
            "P_n(0,.) and P_n(1,.) singular for every n",
            Claim::EquivalenceFailsUpTo { x: 0, y: 1, epsilon: 0.25, horizon: 100 },
        ),
    ];
    claims.extend(index_conditions(false, &[1, 2, 3]));
    Fixture {
        name: "peri".into(),
        kernel,
        mu,
        expected: ExpectedVerdicts { claims },
    }
}

/// States `0..=N`; `0` jumps to `k` with mass `2^-k` and the tail mass
/// `2^-N` is added to state `N`; `k >= 2` steps down; `1` is absorbing.
fn simple<T: Prob>(n: usize) -> Result<Fixture<T>> {
    if n < 3 {
        return Err(Error::TruncationTooSmall {
            name: "simple".into(),
            truncation: n,
            min: 3,
        });
    }
    let tol = T::default_tolerance();
    let half = T::lit(0.5);
    let mut entries = vec![(1, 1, T::one())];
    for k in 1..n {
        entries.push((0, k, half.powi(k as i32)));
    }
    entries.push((0, n, half.powi(n as i32 - 1)));
    for k in 2..=n {
        entries.push((k, k - 1, T::one()));
    }
    let kernel = Kernel::from_entries(StateSpace::indexed(n + 1)?, entries, tol)?;
    let mu = Distribution::point(n + 1, 1, tol);
    let witness_up_to = (n - 1).min(30);
    let mut claims = vec![
        claim("unique invariant measure delta_1", Claim::UniqueIpm { state: 1 }),
        claim(
            format!("supports of P_n(0,.) and P_n(1,.) differ for n <= {}", n - 1),
            Claim::SupportsDiffer { x: 0, y: 1, up_to: n - 1 },
        ),
    ];
    for m in 1..=witness_up_to {
        let p = 1.0 - 0.5f64.powi(m as i32);
        claims.push(claim(
            format!("0 and 1 asymptotically equivalent: witness n = {m}, A = {{1}}"),
            Claim::AsymptoticWitness {
                x: 0,
                y: 1,
                n: m,
                set: vec![1],
                masses: (p, 1.0),
                tolerance: 1e-12,
            },
        ));
    }
    claims.extend(index_conditions(true, &[1, 2, 3]));
    Ok(Fixture {
        name: "simple".into(),
        kernel,
        mu,
        expected: ExpectedVerdicts { claims },
    })
}

/// States `0..=N`; `0` absorbing; `x >= 1` moves down with `1/3` and up
/// with `2/3`, the up-step at `N` reflected onto `N`.
fn standard<T: Prob>(n: usize) -> Result<Fixture<T>> {
    if n < 3 {
        return Err(Error::TruncationTooSmall {
            name: "standard".into(),
            truncation: n,
            min: 3,
        });
    }
    let tol = T::default_tolerance();
    let down = T::one() / T::lit(3.0);
    let up = T::lit(2.0) / T::lit(3.0);
    let mut entries = vec![(0, 0, T::one())];
    for x in 1..=n {
        entries.push((x, x - 1, down));
        entries.push((x, (x + 1).min(n), up));
    }
    let kernel = Kernel::from_entries(StateSpace::indexed(n + 1)?, entries, tol)?;
    let mu = Distribution::point(n + 1, 0, tol);
    let h = STANDARD_HORIZON;
    let reach = (n / 2).min(20);
    let mut claims = vec![claim("unique invariant measure delta_0", Claim::UniqueIpm { state: 0 })];
    for x in 0..=reach {
        let l = 0.5f64.powi(x as i32);
        claims.push(claim(
            format!("L({x}, {{0}}) = 2^-{x} up to horizon {h}"),
            Claim::HittingWithin { x, target: 0, value: l, horizon: h, tolerance: 1e-6 },
        ));
        claims.push(claim(
            format!("d(P_n({x},.), delta_0) = 1 - 2^-{x} at horizon {h}"),
            Claim::TvAtHorizon { x, value: 1.0 - l, horizon: h, tolerance: 1e-6 },
        ));
    }
    for (x, y) in [(0, 3), (1, 2), (2, 5), (4, 4), (7, 3)] {
        if x.max(y) <= n {
            claims.push(claim(
                format!("delta_0 (x) delta_0 couples P_k({x},.), P_k({y},.) at k = {}", x.max(y)),
                Claim::DiagonalAtom { x, y, k: x.max(y).max(1), z: 0 },
            ));
        }
    }
    claims.push(claim(
        format!("P1 pattern fails at horizon {h}: 0 and 3 not equivalent at epsilon 0.1"),
        Claim::EquivalenceFailsUpTo { x: 0, y: 3, epsilon: 0.1, horizon: h },
    ));
    claims.extend(index_conditions(true, &[2, 3]));
    claims.push(claim(
        "the truncated chain is technically P1 (exact limit 0 everywhere)",
        Claim::Condition { condition: Condition::P1, holds: true },
    ));
    Ok(Fixture {
        name: "standard".into(),
        kernel,
        mu,
        expected: ExpectedVerdicts { claims },
    })
}

impl ExpectedVerdicts {
    /// Evaluates every claim with the library's deciders.
    pub fn check<T: Prob>(&self, kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<Vec<ClaimOutcome>> {
        let analysis = Analysis::new(kernel)?;
        let reports = crate::verdict::all_reports(&analysis, mu)?;
        self.claims
            .iter()
            .map(|(description, c)| {
                let (passed, observed) = check_claim(&analysis, &reports, mu, c)?;
                Ok(ClaimOutcome {
                    description: description.clone(),
                    passed,
                    observed,
                })
            })
            .collect()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn check_claim<T: Prob>(
    analysis: &Analysis<'_, T>,
    reports: &[crate::report::ConditionReport<T>],
    mu: &Distribution<T>,
    claim: &Claim,
) -> Result<(bool, String)> {
    let kernel = analysis.kernel();
    Ok(match claim {
        Claim::Condition { condition, holds } => {
            let r = reports
                .iter()
                .find(|r| r.condition == *condition)
                .expect("every condition is reported");
            (r.holds == *holds, format!("{} = {}", condition, r.holds))
        }
        Claim::UniqueIpm { state } => {
            let ipms = analysis.ipms();
            let ok = ipms.len() == 1
                && ipms[0].mass(*state) >= T::one() - kernel.tolerance();
            (ok, format!("{} extremal ipm(s)", ipms.len()))
        }
        Claim::Periodic { period, cells } => match is_aperiodic(kernel, mu)? {
            Periodicity::Periodic { period: d, cells: c } => {
                (d == *period && &c == cells, format!("period {d}, cells {c:?}"))
            }
            Periodicity::Aperiodic => (false, "aperiodic".into()),
        },
        Claim::TvConstant { x, value, up_to, tolerance } => {
            let curve = analysis.tv_curve(*x, mu, (*up_to).max(1))?;
            let worst = curve
                .values
                .iter()
                .map(|v| (v.as_f64() - value).abs())
                .fold(0.0, f64::max);
            (worst <= *tolerance, format!("max deviation {worst:e}"))
        }
        Claim::TvLimit { x, value, tolerance } => {
            let l = analysis.limit_distance(*x, mu).as_f64();
            (close(l, *value, *tolerance), format!("limit {l}"))
        }
        Claim::TvAtHorizon { x, value, horizon, tolerance } => {
            let curve = analysis.tv_curve(*x, mu, *horizon)?;
            let v = curve.last().as_f64();
            (close(v, *value, *tolerance), format!("d = {v}"))
        }
        Claim::HittingWithin { x, target, value, horizon, tolerance } => {
            let h = hitting_prob_within(kernel, &[*target], *horizon)?[*x].as_f64();
            (close(h, *value, *tolerance), format!("probability {h}"))
        }
        Claim::SupportsDiffer { x, y, up_to } => {
            let first_equal = kernel
                .evolve(*x)
                .zip(kernel.evolve(*y))
                .enumerate()
                .skip(1)
                .take(*up_to)
                .find(|(_, (a, b))| a.support() == b.support())
                .map(|(n, _)| n);
            match first_equal {
                Some(n) => (false, format!("equal supports at n = {n}")),
                None => (true, format!("supports differ for n <= {up_to}")),
            }
        }
        Claim::AsymptoticWitness { x, y, n, set, masses, tolerance } => {
            let px = kernel.n_step(*x, *n);
            let py = kernel.n_step(*y, *n);
            let inter: Vec<usize> = (0..kernel.len())
                .filter(|&i| px.mass(i) > T::zero() && py.mass(i) > T::zero())
                .collect();
            let mx = px.mass_of(inter.iter().copied()).as_f64();
            let my = py.mass_of(inter.iter().copied()).as_f64();
            let ok = &inter == set && close(mx, masses.0, *tolerance) && close(my, masses.1, *tolerance);
            (ok, format!("A = {inter:?}, masses ({mx}, {my})"))
        }
        Claim::EquivalenceFailsUpTo { x, y, epsilon, horizon } => {
            let s = asymptotically_equivalent(kernel, *x, *y, &[T::lit(*epsilon)], *horizon)?;
            (!s.holds_up_to_cap(), format!("witness found: {}", s.holds_up_to_cap()))
        }
        Claim::DiagonalAtom { x, y, k, z } => {
            let w = DiagonalAtomWitness { x: *x, y: *y, k: *k, z: *z };
            let ok = w.validate(kernel);
            (ok, format!("valid: {ok}"))
        }
    })
}
