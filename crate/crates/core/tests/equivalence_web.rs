#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use tvconv::equivalence::{asymptotically_equivalent, check_a, check_g, default_epsilons, AIndex};
use tvconv::structure::{
    check_b, check_maximal_irreducibility, decompose, find_small_set, is_aperiodic, is_irreducible, q_infinite,
    recurrence_lemma_check,
};
use tvconv::verdict::{cross_check, decide_p, uniqueness_check};
use tvconv::{Analysis, Condition, Distribution, Error, Level};

const TOL: f64 = 1e-9;

#[test]
fn audit_is_clean_on_random_chains() {
    for (params, k, mu) in random_instances(200, 8, 301) {
        let audit = cross_check(&k, &mu).unwrap_or_else(|e| panic!("{params:?}: {e}"));
        for level in Level::ALL {
            let values: Vec<bool> = audit
                .reports
                .iter()
                .filter(|r| r.condition.index() == Some(level))
                .map(|r| r.holds)
                .collect();
            assert!(values.windows(2).all(|w| w[0] == w[1]), "{params:?}");
        }
        assert_eq!(audit.holds(Condition::A3Prime), audit.holds(Condition::A3));
    }
}

#[test]
fn one_directional_consequences() {
    for (params, k, mu) in random_instances(200, 7, 302) {
        let a: Vec<bool> = [AIndex::One, AIndex::Two, AIndex::Three, AIndex::ThreePrime]
            .iter()
            .map(|&w| check_a(&k, &mu, w).unwrap().holds)
            .collect();
        let b: Vec<bool> = Level::ALL.iter().map(|&l| check_b(&k, &mu, l).unwrap().holds).collect();
        if a[2] {
            assert!(is_aperiodic(&k, &mu).unwrap().is_aperiodic(), "{params:?}");
        }
        assert!(!a[0] || b[0], "{params:?}");
        assert!(!a[1] || b[1], "{params:?}");
        assert!(!a[3] || b[2], "{params:?}");
        let p: Vec<bool> = decide_p(&k, &mu).unwrap().iter().map(|r| r.holds).collect();
        assert!(!p[0] || p[1]);
        assert!(!p[1] || p[2]);
        let u = uniqueness_check(&k, &mu).unwrap();
        assert!(u.consistent);
        if p[0] || p[1] {
            assert_eq!(u.ipm_count, 1);
        }
    }
}

#[test]
fn diagonal_atoms_match_pair_reachability() {
    for (params, k, mu) in random_instances(200, 7, 303) {
        for (level, which) in [(Level::Two, AIndex::Two), (Level::Three, AIndex::Three)] {
            let g = check_g(&k, &mu, level).unwrap();
            let a = check_a(&k, &mu, which).unwrap();
            assert_eq!(g.holds, a.holds, "{params:?}");
            if let tvconv::Witness::DiagonalAtom(w) = &g.witness {
                assert!(w.validate(&k));
            }
        }
    }
}

#[test]
fn asymptotic_equivalence_is_an_equivalence_relation() {
    for (params, k, _) in random_instances(120, 6, 304) {
        let a = Analysis::new(&k).unwrap();
        let n = k.len();
        for x in 0..n {
            assert!(a.structurally_equivalent(x, x));
            for y in 0..n {
                let xy = a.structurally_equivalent(x, y);
                assert_eq!(xy, a.structurally_equivalent(y, x));
                for z in 0..n {
                    if xy && a.structurally_equivalent(y, z) {
                        assert!(a.structurally_equivalent(x, z), "{params:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn bounded_witnesses_agree_with_structure() {
    for (params, k, _) in random_instances(80, 5, 305) {
        let a = Analysis::new(&k).unwrap();
        let n = k.len();
        for x in 0..n {
            for y in x..n {
                let search = asymptotically_equivalent(&k, x, y, &default_epsilons(), 4 * n * n).unwrap();
                for w in search.witnesses() {
                    assert!(w.verify(&k, x, y));
                }
                if search.holds_up_to_cap() {
                    assert!(a.structurally_equivalent(x, y), "{params:?} ({x},{y})");
                }
                if a.structurally_equivalent(x, y) {
                    assert!(search.holds_up_to_cap(), "{params:?} ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn curves_decrease_and_direct_bound_holds() {
    for (params, k, mu) in random_instances(150, 8, 306) {
        let p = dense(&k);
        let n = k.len();
        let horizon = 60;
        let all: Vec<Vec<Vec<f64>>> = (0..n).map(|x| rows(&p, x, horizon)).collect();
        for x in 0..n {
            let curve = Analysis::new(&k).unwrap().tv_curve(x, &mu, horizon).unwrap();
            assert!(curve.is_non_increasing(1e-12), "{params:?}");
            for t in 0..=horizon {
                let lhs = tv_positive_part(&all[x][t], mu.as_slice());
                assert!((lhs - curve.values[t]).abs() < 1e-12);
                let rhs: f64 = (0..n)
                    .map(|y| mu.mass(y) * tv_positive_part(&all[y][t], &all[x][t]))
                    .sum();
                assert!(lhs <= rhs + 1e-9, "{params:?} x={x} t={t}");
            }
        }
    }
}

#[test]
fn recurrence_lemma_on_random_instances() {
    let mut a2 = 0;
    let mut a1 = 0;
    for (params, k, mu) in random_instances(300, 8, 307) {
        for (level, which) in [(Level::One, AIndex::One), (Level::Two, AIndex::Two), (Level::Three, AIndex::Three)] {
            let holds = check_a(&k, &mu, which).unwrap().holds;
            let r = recurrence_lemma_check(&k, &mu, level);
            if holds {
                assert!(r.unwrap().passed, "{params:?} {level:?}");
                match level {
                    Level::One => a1 += 1,
                    Level::Two => a2 += 1,
                    _ => {}
                }
            } else {
                assert!(matches!(r, Err(Error::PreconditionViolated(_))));
            }
        }
    }
    assert!(a1 >= 30 && a2 >= 30, "{a1} {a2}");
}

#[test]
fn irreducible_chains_are_mu_irreducible() {
    let mut seen = 0;
    for (params, k, mu) in random_instances(300, 8, 308) {
        let irr = is_irreducible(&k).unwrap();
        let Some(z) = irr.anchor else { continue };
        seen += 1;
        let phi = Distribution::point(k.len(), z, TOL);
        let check = check_maximal_irreducibility(&k, &phi, &mu).unwrap();
        assert!(check.passed, "{params:?}");
        let p = dense(&k);
        for c in mu.charged() {
            assert!(value_iteration_l(&p, &[c], 3000).iter().all(|&v| v > 0.0));
        }
        // Harris solidarity on the aperiodic ones.
        let dec = decompose(&k);
        if dec.recurrent().all(|c| c.period == Some(1)) {
            for c in dec.recurrent().flat_map(|c| c.members.clone()) {
                let q = q_infinite(&k, &[c]).unwrap();
                assert!(q.iter().all(|&v| (v - 1.0).abs() < 1e-9));
            }
        }
        let small = find_small_set(&k).unwrap();
        assert!(small.verify(&k));
        for &x in &small.set {
            let row = n_step(&p, x, small.m);
            for y in 0..k.len() {
                assert!(row[y] + 1e-12 >= small.nu[y], "{params:?}");
            }
        }
        // Every invariant measure charges C.
        assert!(small.set.iter().any(|&x| mu.mass(x) > TOL), "{params:?}");
    }
    assert!(seen >= 100, "{seen}");
}
