//! Exact P-property decisions, the uniqueness check, and the audit that
//! every condition of an index agrees.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::chain::{Distribution, Kernel};
use crate::coupling::c_conditions;
use crate::equivalence::AIndex;
use crate::error::{Error, Result};
use crate::report::{Condition, ConditionReport, Level, Method, Witness};
use crate::scalar::Prob;
use crate::structure::check_b;

pub fn decide_p<T: Prob>(kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<Vec<ConditionReport<T>>> {
    Analysis::new(kernel)?.decide_p(mu)
}

impl<T: Prob> Analysis<'_, T> {
    fn worst_limit(&self, states: &[usize], mu: &Distribution<T>) -> (usize, T) {
        states
            .iter()
            .map(|&x| (x, self.limit_distance(x, mu)))
            .fold((states[0], T::zero()), |acc, (x, d)| if d > acc.1 { (x, d) } else { acc })
    }

    /// `P_1`, `P_2`, `P_3` (in that order) from the exact limits
    /// `lim_n d(P_n(x, .), mu)`.
    pub fn decide_p(&self, mu: &Distribution<T>) -> Result<Vec<ConditionReport<T>>> {
        let kernel = self.kernel();
        kernel.check_invariant(mu)?;
        let tol = kernel.tolerance();
        let all: Vec<usize> = (0..kernel.len()).collect();
        let charged = mu.charged();

        let (wx, wd) = self.worst_limit(&all, mu);
        let p1 = wd <= tol;
        let (cx, cd) = self.worst_limit(&charged, mu);
        let p3 = cd <= tol;
        // lim d < 1 exactly when the limit shares a charged state with mu.
        let singular = all
            .iter()
            .copied()
            .find(|&x| !charged.iter().any(|&j| self.limits().support(x)[j]));
        let p2 = p3 && singular.is_none();

        let limits = |x, limit| Witness::Limits {
            worst_state: x,
            limit,
        };
        let p2_witness = match singular {
            Some(x) if p3 => Witness::CounterexampleState {
                x,
                detail: "lim d(P_n(x,.), mu) = 1".into(),
            },
            _ if !p3 => limits(cx, cd),
            _ => limits(wx, wd),
        };
        Ok(vec![
            ConditionReport::new(Condition::P1, p1, Method::Structural, limits(wx, wd)),
            ConditionReport::new(Condition::P2, p2, Method::Structural, p2_witness),
            ConditionReport::new(Condition::P3, p3, Method::Structural, limits(cx, cd)),
        ])
    }

    /// `P_3` together with uniqueness of the invariant measure.
    pub fn decide_p2_tilde(&self, mu: &Distribution<T>) -> Result<ConditionReport<T>> {
        let p3 = self.decide_p(mu)?.remove(2);
        let unique = self.ipms().len() == 1;
        Ok(ConditionReport::new(
            Condition::P2Tilde,
            p3.holds && unique,
            Method::Structural,
            Witness::Conjunction {
                parts: vec![
                    ("P3".into(), p3.holds, p3.witness),
                    ("unique_ipm".into(), unique, Witness::None),
                ],
            },
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub ipm_count: usize,
    pub p1: bool,
    pub p2: bool,
    /// `P_1` or `P_2` implies a single invariant measure.
    pub consistent: bool,
}

pub fn uniqueness_check<T: Prob>(kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<UniquenessVerdict> {
    let analysis = Analysis::new(kernel)?;
    let p = analysis.decide_p(mu)?;
    let ipm_count = analysis.ipms().len();
    let (p1, p2) = (p[0].holds, p[1].holds);
    Ok(UniquenessVerdict {
        ipm_count,
        p1,
        p2,
        consistent: !(p1 || p2) || ipm_count == 1,
    })
}

/// `from => to` evaluated on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub from: Condition,
    pub to: Condition,
    pub holds: bool,
}

/// Pairwise agreement of the conditions of one index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMatrix {
    pub level: Level,
    pub conditions: Vec<Condition>,
    /// `agree[i][j]`: conditions `i` and `j` returned the same boolean.
    pub agree: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub left: Condition,
    pub right: Condition,
    pub fingerprint: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceAudit<T> {
    pub fingerprint: u64,
    pub reports: Vec<ConditionReport<T>>,
    pub matrices: Vec<IndexMatrix>,
    pub implications: Vec<ImplicationCheck>,
    pub violations: Vec<Violation>,
}

impl<T: Prob> EquivalenceAudit<T> {
    pub fn report(&self, condition: Condition) -> Option<&ConditionReport<T>> {
        self.reports.iter().find(|r| r.condition == condition)
    }

    pub fn holds(&self, condition: Condition) -> Option<bool> {
        self.report(condition).map(|r| r.holds)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// `Err(AuditViolation)` with a summary of every report when any
    /// violation was recorded.
    pub fn into_result(self) -> Result<Self> {
        if self.violations.is_empty() {
            return Ok(self);
        }
        let mut summary = String::new();
        for v in &self.violations {
            let _ = writeln!(summary, "{} vs {}: {}", v.left, v.right, v.detail);
        }
        for r in &self.reports {
            let _ = writeln!(summary, "{} = {} ({:?})", r.condition, r.holds, r.method);
        }
        let _ = write!(summary, "fingerprint {:016x}", self.fingerprint);
        Err(Error::AuditViolation {
            count: self.violations.len(),
            summary,
        })
    }
}

/// One-directional implications asserted besides the index equivalences.
pub const IMPLICATIONS: [(Condition, Condition); 18] = [
    (Condition::C1Prime, Condition::C1Ring),
    (Condition::C1Ring, Condition::G1),
    (Condition::G1, Condition::A1),
    (Condition::P1, Condition::C1Hat),
    (Condition::C1Hat, Condition::C1),
    (Condition::C1, Condition::A1),
    (Condition::C2Prime, Condition::C2),
    (Condition::C2, Condition::G2),
    (Condition::G2, Condition::A2),
    (Condition::P2, Condition::A2),
    (Condition::P3, Condition::A3Prime),
    (Condition::A3Prime, Condition::A3),
    (Condition::C3Prime, Condition::C3),
    (Condition::C3, Condition::G3),
    (Condition::A1, Condition::B1),
    (Condition::A2, Condition::B2),
    (Condition::A3Prime, Condition::B3),
    (Condition::P1, Condition::P2),
];

/// FNV-1a over labels and probability bits.
pub fn fingerprint<T: Prob>(kernel: &Kernel<T>) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for label in kernel.space().labels() {
        feed(label.as_bytes());
        feed(&[0]);
    }
    for (x, y, p) in kernel.entries() {
        feed(&(x as u64).to_le_bytes());
        feed(&(y as u64).to_le_bytes());
        feed(&p.as_f64().to_bits().to_le_bytes());
    }
    h
}

/// Every condition evaluated by its own checker.
pub fn all_reports<T: Prob>(analysis: &Analysis<'_, T>, mu: &Distribution<T>) -> Result<Vec<ConditionReport<T>>> {
    let kernel = analysis.kernel();
    let mut reports = analysis.decide_p(mu)?;
    reports.push(analysis.decide_p2_tilde(mu)?);
    for which in [AIndex::One, AIndex::Two, AIndex::Three, AIndex::ThreePrime] {
        reports.push(analysis.check_a(mu, which)?);
    }
    for level in Level::ALL {
        reports.push(check_b(kernel, mu, level)?);
    }
    for level in Level::ALL {
        for &c in c_conditions(level) {
            reports.push(analysis.check_c(mu, c)?);
        }
    }
    for level in Level::ALL {
        reports.push(analysis.check_g(mu, level)?);
    }
    Ok(reports)
}

/// Evaluates every condition and records disagreements within an index,
/// failed implications, method conflicts and uniqueness failures. Never
/// fails on violations; see [`cross_check`].
pub fn audit<T: Prob>(kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<EquivalenceAudit<T>> {
    kernel.check_invariant(mu)?;
    let analysis = Analysis::new(kernel)?;
    let reports = all_reports(&analysis, mu)?;
    let fp = fingerprint(kernel);
    let holds = |c: Condition| {
        reports
            .iter()
            .find(|r| r.condition == c)
            .map(|r| r.holds)
            .expect("every condition is reported")
    };
    let mut violations = Vec::new();

    let mut matrices = Vec::new();
    for level in Level::ALL {
        let conditions: Vec<Condition> = Condition::ALL
            .iter()
            .copied()
            .filter(|c| c.index() == Some(level))
            .collect();
        let agree: Vec<Vec<bool>> = conditions
            .iter()
            .map(|&a| conditions.iter().map(|&b| holds(a) == holds(b)).collect())
            .collect();
        for (i, &a) in conditions.iter().enumerate() {
            for (j, &b) in conditions.iter().enumerate().skip(i + 1) {
                if !agree[i][j] {
                    violations.push(Violation {
                        left: a,
                        right: b,
                        fingerprint: fp,
                        detail: format!("{a} = {}, {b} = {}", holds(a), holds(b)),
                    });
                }
            }
        }
        matrices.push(IndexMatrix {
            level,
            conditions,
            agree,
        });
    }

    let implications: Vec<ImplicationCheck> = IMPLICATIONS
        .iter()
        .map(|&(from, to)| ImplicationCheck {
            from,
            to,
            holds: !holds(from) || holds(to),
        })
        .collect();
    for check in implications.iter().filter(|c| !c.holds) {
        violations.push(Violation {
            left: check.from,
            right: check.to,
            fingerprint: fp,
            detail: "implication fails".into(),
        });
    }
    if holds(Condition::P2) && !holds(Condition::P3) {
        violations.push(Violation {
            left: Condition::P2,
            right: Condition::P3,
            fingerprint: fp,
            detail: "implication fails".into(),
        });
    }

    for r in reports.iter().filter(|r| r.method == Method::Conflict) {
        violations.push(Violation {
            left: r.condition,
            right: r.condition,
            fingerprint: fp,
            detail: "structural and definitional routes disagree".into(),
        });
    }

    let ipm_count = analysis.ipms().len();
    if (holds(Condition::P1) || holds(Condition::P2)) && ipm_count != 1 {
        violations.push(Violation {
            left: Condition::P2,
            right: Condition::P2Tilde,
            fingerprint: fp,
            detail: format!("convergence with {ipm_count} extremal invariant measures"),
        });
    }

    Ok(EquivalenceAudit {
        fingerprint: fp,
        reports,
        matrices,
        implications,
        violations,
    })
}

/// [`audit`], failing with `AuditViolation` when anything disagrees.
pub fn cross_check<T: Prob>(kernel: &Kernel<T>, mu: &Distribution<T>) -> Result<EquivalenceAudit<T>> {
    audit(kernel, mu)?.into_result()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{fixture, random_chain, GeneratorParams};

    fn holds(reports: &[ConditionReport<f64>]) -> Vec<bool> {
        reports.iter().map(|r| r.holds).collect()
    }

    #[test]
    fn decide_p_examples() {
        let peri = fixture::<f64>("peri", 2).unwrap();
        assert_eq!(holds(&decide_p(&peri.kernel, &peri.mu).unwrap()), [false, false, false]);

        let st = fixture::<f64>("standard", 60).unwrap();
        let p = decide_p(&st.kernel, &st.mu).unwrap();
        // Truncation: absorbed in 0 from everywhere, hence P1 on the finite chain.
        assert_eq!(holds(&p), [true, true, true]);

        let k = Kernel::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        let mu = Distribution::point(2, 0, 1e-9);
        let p = decide_p(&k, &mu).unwrap();
        assert_eq!(holds(&p), [false, false, true]);
        assert!(matches!(p[1].witness, Witness::CounterexampleState { x: 1, .. }));

        let k = Kernel::from_dense(&[vec![0.5, 0.5], vec![0.0, 1.0]], 1e-9).unwrap();
        let mu = Distribution::point(2, 1, 1e-9);
        assert_eq!(holds(&decide_p(&k, &mu).unwrap()), [true, true, true]);

        let bad = Distribution::point(2, 0, 1e-9);
        assert!(matches!(decide_p(&k, &bad), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn p2_tilde_is_p3_and_unique() {
        let k = Kernel::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        let mu = Distribution::point(2, 0, 1e-9);
        let a = Analysis::new(&k).unwrap();
        assert!(!a.decide_p2_tilde(&mu).unwrap().holds);
        let s = fixture::<f64>("simple", 40).unwrap();
        let a = Analysis::new(&s.kernel).unwrap();
        assert!(a.decide_p2_tilde(&s.mu).unwrap().holds);
    }

    #[test]
    fn uniqueness_examples() {
        let k = Kernel::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        let mu = Distribution::new(vec![0.5, 0.5], 1e-9).unwrap();
        let u = uniqueness_check(&k, &mu).unwrap();
        assert_eq!((u.ipm_count, u.p1, u.p2, u.consistent), (2, false, false, true));
        let s = fixture::<f64>("simple", 40).unwrap();
        let u = uniqueness_check(&s.kernel, &s.mu).unwrap();
        assert_eq!((u.ipm_count, u.p1, u.consistent), (1, true, true));
    }

    #[test]
    fn fixtures_audit_clean() {
        for (name, n) in [("peri", 2), ("simple", 12), ("standard", 12)] {
            let f = fixture::<f64>(name, n).unwrap();
            let audit = cross_check(&f.kernel, &f.mu).unwrap();
            assert!(audit.is_clean(), "{name}: {:?}", audit.violations);
            assert_eq!(audit.reports.len(), Condition::ALL.len());
        }
        let peri = fixture::<f64>("peri", 2).unwrap();
        let audit = audit(&peri.kernel, &peri.mu).unwrap();
        for c in Condition::ALL {
            if c.index().is_some() {
                assert_eq!(audit.holds(c), Some(false), "{c}");
            }
        }
    }

    #[test]
    fn audit_round_trips_through_json() {
        let st = fixture::<f64>("standard", 12).unwrap();
        let a = cross_check(&st.kernel, &st.mu).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        let back: EquivalenceAudit<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn fingerprint_distinguishes_kernels() {
        let a = Kernel::from_dense(&[vec![0.5, 0.5], vec![0.5, 0.5]], 1e-9).unwrap();
        let b = Kernel::from_dense(&[vec![0.5, 0.5], vec![0.25, 0.75]], 1e-9).unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
        assert_ne!(fingerprint(&a), fingerprint(&b));
    }

    #[test]
    fn two_classes_break_p2() {
        let params = GeneratorParams {
            n_states: 6,
            n_recurrent_classes: 2,
            periods: vec![1, 1],
            transient_fraction: 0.0,
            sparsity: 0.3,
            seed: 11,
        };
        let (k, mu) = random_chain::<f64>(&params).unwrap();
        let p = decide_p(&k, &mu).unwrap();
        assert!(!p[0].holds && !p[1].holds);
        assert!(!uniqueness_check(&k, &mu).unwrap().p2);
    }
}
