mod common;

use common::*;
use tvconv::harness::STANDARD_HORIZON;
use tvconv::structure::{hitting_prob_l, hitting_prob_within, is_aperiodic, is_harris, is_irreducible, q_infinite, Periodicity};
use tvconv::verdict::decide_p;

const TOL: f64 = 1e-9;

#[test]
fn periods_match_exhaustive_cyclic_search() {
    for (params, k, mu) in random_instances(250, 5, 101) {
        let p = dense(&k);
        let feasible = brute_periods(&p, mu.as_slice(), TOL);
        match is_aperiodic(&k, &mu).unwrap() {
            Periodicity::Aperiodic => assert!(feasible.is_empty(), "{params:?}: {feasible:?}"),
            Periodicity::Periodic { period, cells } => {
                assert!(feasible.contains(&period), "{params:?}");
                assert!(is_cyclic_witness(&p, mu.as_slice(), &cells, TOL), "{params:?}");
            }
        }
    }
}

#[test]
fn irreducibility_matches_definition() {
    for (params, k, _) in random_instances(250, 5, 102) {
        let p = dense(&k);
        let r = reach_plus(&p);
        let n = p.len();
        // phi = delta_z works iff z is reachable from everywhere; any phi
        // works iff some point of its support does.
        let oracle = (0..n).any(|z| (0..n).all(|x| r[x][z]));
        let got = is_irreducible(&k).unwrap();
        assert_eq!(got.holds, oracle, "{params:?}");
        if let Some(z) = got.anchor {
            let l = value_iteration_l(&p, &[z], 4000);
            assert!(l.iter().all(|&v| v > 0.0), "{params:?}");
        }
    }
}

#[test]
fn harris_matches_definition() {
    for (params, k, _) in random_instances(250, 5, 103) {
        let p = dense(&k);
        let n = p.len();
        let oracle = (0..n).any(|z| {
            value_iteration_q(&p, &[z], 1_000_000, 1_000_000)
                .iter()
                .all(|&q| q > 1.0 - 1e-6)
        });
        assert_eq!(is_harris(&k).unwrap().holds, oracle, "{params:?}");
    }
}

#[test]
fn hitting_and_recurrence_values() {
    for (params, k, _) in random_instances(200, 5, 104) {
        let p = dense(&k);
        let n = p.len();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let l = hitting_prob_l(&k, &set).unwrap();
            let q = q_infinite(&k, &set).unwrap();
            let lo = value_iteration_l(&p, &set, 1_000_000);
            let qo = value_iteration_q(&p, &set, 1_000_000, 1_000_000);
            for x in 0..n {
                assert!((l[x] - lo[x]).abs() < 1e-6, "{params:?} L({x},{set:?})");
                assert!((q[x] - qo[x]).abs() < 1e-6, "{params:?} Q({x},{set:?})");
                assert!(q[x] <= l[x] + 1e-12);
                assert!((0.0..=1.0).contains(&l[x]) && (0.0..=1.0).contains(&q[x]));
            }
        }
    }
}

#[test]
fn p_properties_match_curve_thresholding() {
    for (params, k, mu) in random_instances(250, 6, 105) {
        let p = dense(&k);
        let (p1, p2, p3) = threshold_p(&p, mu.as_slice(), TOL);
        let got: Vec<bool> = decide_p(&k, &mu).unwrap().iter().map(|r| r.holds).collect();
        assert_eq!(got, [p1, p2, p3], "{params:?}");
    }
}

#[test]
fn fixture_examples_by_matrix_powers() {
    let peri = tvconv::fixture::<f64>("peri", 2).unwrap();
    let p = dense(&peri.kernel);
    for n in 0..=100 {
        let d = tv_subsets(&n_step(&p, 0, n), peri.mu.as_slice());
        assert!((d - 0.5).abs() < 1e-12);
    }
    assert_eq!(value_iteration_l(&p, &[0], 10)[0], 1.0);

    let st = tvconv::fixture::<f64>("standard", 60).unwrap();
    let p = dense(&st.kernel);
    // Entry to {0} within the horizon; the boundary leak is below 2^-40.
    let l = value_iteration_l(&p, &[0], STANDARD_HORIZON);
    let lib = hitting_prob_within(&st.kernel, &[0], STANDARD_HORIZON).unwrap();
    for x in 1..=20 {
        assert!((l[x] - 0.5f64.powi(x as i32)).abs() < 1e-6, "x = {x}");
        assert!((lib[x] - 0.5f64.powi(x as i32)).abs() < 1e-6, "x = {x}");
    }
    // Without a horizon the truncation absorbs everything.
    let exact = hitting_prob_l(&st.kernel, &[0]).unwrap();
    assert!(exact.iter().all(|&v| (v - 1.0).abs() < 1e-9));
}
