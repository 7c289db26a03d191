#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use proptest::prelude::*;
use tvconv::coupling::{coupling_set_c, glue, maximal_coupling, switching_kernel};
use tvconv::equivalence::{pair_reachability, tv_distance};
use tvconv::structure::{hitting_prob_l, q_infinite};
use tvconv::verdict::{decide_p, fingerprint};
use tvconv::{random_chain, ChainSpecFile, Distribution, GeneratorParams, Kernel};

const TOL: f64 = 1e-9;

fn measure(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], n).prop_filter_map("empty", |mut v| {
        let s: f64 = v.iter().sum();
        if s <= 0.0 {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= s);
        Some(v)
    })
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..10).prop_flat_map(|n| (measure(n), measure(n), measure(n)))
}

fn params() -> impl Strategy<Value = GeneratorParams> {
    (any::<u64>(), any::<u64>()).prop_map(|(a, b)| {
        let mut rng = rng(a);
        GeneratorParams::sample(&mut rng, 7, b)
    })
}

fn chain(p: &GeneratorParams) -> (Kernel<f64>, Distribution<f64>) {
    random_chain(p).unwrap()
}

fn dist(v: &[f64]) -> Distribution<f64> {
    Distribution::normalized(v.to_vec(), TOL).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tv_is_a_metric_in_unit_interval((a, b, c) in triple()) {
        let (a, b, c) = (dist(&a), dist(&b), dist(&c));
        let ab = tv_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert_eq!(ab, tv_distance(&b, &a).unwrap());
        prop_assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let ac = tv_distance(&a, &c).unwrap();
        let bc = tv_distance(&b, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        if a.len() <= 10 {
            prop_assert!((ab - tv_subsets(a.as_slice(), b.as_slice())).abs() < 1e-12);
        }
    }

    #[test]
    fn maximal_coupling_is_a_coupling_with_optimal_diagonal((a, b, _) in triple()) {
        let (a, b) = (dist(&a), dist(&b));
        let xi = maximal_coupling(&a, &b).unwrap();
        prop_assert!(xi.marginal_error(a.as_slice(), b.as_slice()) < 1e-12);
        prop_assert!(xi.entries().iter().all(|&(_, m)| m >= 0.0));
        let d = tv_distance(&a, &b).unwrap();
        prop_assert!((xi.diagonal_mass() - (1.0 - d)).abs() < 1e-12);
    }

    #[test]
    fn glue_projects_back((a, b, c) in triple()) {
        let (a, b, c) = (dist(&a), dist(&b), dist(&c));
        let ab = maximal_coupling(&a, &b).unwrap();
        let bc = maximal_coupling(&b, &c).unwrap();
        let t = glue(&ab, &bc, 1e-12).unwrap();
        let p12 = t.project_12();
        let p23 = t.project_23();
        for i in 0..a.len() {
            for j in 0..a.len() {
                prop_assert!((p12.mass(i, j) - ab.mass(i, j)).abs() < 1e-12);
                prop_assert!((p23.mass(i, j) - bc.mass(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generator_is_deterministic_and_mu_invariant(p in params()) {
        let (k1, mu1) = chain(&p);
        let (k2, mu2) = chain(&p);
        prop_assert_eq!(fingerprint(&k1), fingerprint(&k2));
        prop_assert_eq!(&k1, &k2);
        prop_assert_eq!(&mu1, &mu2);
        prop_assert!(k1.check_invariant(&mu1).is_ok());
        for x in 0..k1.len() {
            let s: f64 = k1.row(x).iter().map(|&(_, v)| v).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn n_step_rows_match_dense_powers(p in params(), n in 0usize..20) {
        let (k, _) = chain(&p);
        let d = dense(&k);
        for x in 0..k.len() {
            let lib = k.n_step(x, n);
            let oracle = n_step(&d, x, n);
            for y in 0..k.len() {
                prop_assert!((lib.mass(y) - oracle[y]).abs() < 1e-12);
            }
            prop_assert!((lib.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn q_below_l_in_unit_interval(p in params(), mask in 1u32..128) {
        let (k, _) = chain(&p);
        let set: Vec<usize> = (0..k.len()).filter(|&i| mask & (1 << i) != 0).collect();
        prop_assume!(!set.is_empty());
        let l = hitting_prob_l(&k, &set).unwrap();
        let q = q_infinite(&k, &set).unwrap();
        for x in 0..k.len() {
            prop_assert!(q[x] >= 0.0 && q[x] <= l[x] + 1e-12 && l[x] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn p_properties_are_nested(p in params()) {
        let (k, mu) = chain(&p);
        let r = decide_p(&k, &mu).unwrap();
        prop_assert!(!r[0].holds || r[1].holds);
        prop_assert!(!r[1].holds || r[2].holds);
        if r[1].holds {
            prop_assert_eq!(k.invariant_measures().unwrap().len(), 1);
        }
    }

    #[test]
    fn curves_are_non_increasing(p in params()) {
        let (k, mu) = chain(&p);
        let a = tvconv::Analysis::new(&k).unwrap();
        for x in 0..k.len() {
            let c = a.tv_curve(x, &mu, 40).unwrap();
            prop_assert!(c.is_non_increasing(1e-12));
            prop_assert!(c.limit <= c.last() + 1e-9);
        }
    }

    #[test]
    fn pair_reachability_is_symmetric_and_diagonal_is_immediate(p in params()) {
        let (k, _) = chain(&p);
        let t = pair_reachability(&k);
        for x in 0..k.len() {
            prop_assert_eq!(t.get(x, x), Some(1));
            for y in 0..k.len() {
                prop_assert_eq!(t.get(x, y), t.get(y, x));
            }
        }
    }

    #[test]
    fn switching_rows_have_chain_marginals(p in params(), step in 1usize..4, pexp in 1u32..5) {
        let (k, _) = chain(&p);
        let prob = 0.5f64.powi(pexp as i32);
        let set = coupling_set_c(&k, step, prob).unwrap();
        let pk = switching_kernel(&k, &set, step).unwrap();
        let d = dense(&k);
        for x in 0..k.len() {
            let rx = n_step(&d, x, step);
            for y in 0..k.len() {
                let ry = n_step(&d, y, step);
                prop_assert!(pk.row(x, y).marginal_error(&rx, &ry) < 1e-9);
            }
        }
    }

    #[test]
    fn chain_files_round_trip(p in params()) {
        let (k, mu) = chain(&p);
        let file = ChainSpecFile::from_kernel(&k, Some(&mu), &[]);
        let back = ChainSpecFile::parse(&file.to_string()).unwrap();
        let (k2, mu2) = back.to_kernel(TOL).unwrap();
        prop_assert_eq!(k2, k);
        prop_assert_eq!(mu2.unwrap(), mu);
    }
}
