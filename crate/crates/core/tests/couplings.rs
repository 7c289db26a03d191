mod common;

use common::*;
use tvconv::coupling::{
    coupling_set_c, glue, maximal_coupling, meeting_probabilities, optimal_coupling_lp, select_switching_params,
    switching_kernel, trace_rng, BridgeTable, Coupler, SwitchingParams,
};
use tvconv::equivalence::tv_distance;
use tvconv::{random_chain, Distribution, GeneratorParams, Kernel};

const TOL: f64 = 1e-9;

fn dist(v: Vec<f64>) -> Distribution<f64> {
    Distribution::normalized(v, TOL).unwrap()
}

#[test]
fn maximal_coupling_attains_lp_optimum() {
    let mut rng = rng(201);
    for i in 0..200 {
        let n = 2 + i % 12;
        let (a, b) = random_measure_pair(&mut rng, n, 12);
        let (da, db) = (dist(a.clone()), dist(b.clone()));
        let d = tv_distance(&da, &db).unwrap();
        let oracle = tv_subsets(da.as_slice(), db.as_slice());
        assert!((d - oracle).abs() < 1e-12);

        let xi = maximal_coupling(&da, &db).unwrap();
        assert!((xi.diagonal_mass() - (1.0 - d)).abs() < 1e-9);
        assert!(xi.marginal_error(da.as_slice(), db.as_slice()) < 1e-12);

        let (off, lp) = optimal_coupling_lp(&da, &db).unwrap();
        assert!((1.0 - off - xi.diagonal_mass()).abs() < 1e-9, "pair {i}");
        assert!(lp.marginal_error(da.as_slice(), db.as_slice()) < 1e-9);
        assert!(lp.entries().iter().all(|&(_, m)| m >= -1e-12));
    }
}

#[test]
fn glue_has_prescribed_projections() {
    let mut rng = rng(202);
    for _ in 0..50 {
        let (a, b) = random_measure_pair(&mut rng, 6, 6);
        let (_, c) = random_measure_pair(&mut rng, 6, 6);
        let (da, db, dc) = (dist(a), dist(b), dist(c));
        let ab = maximal_coupling(&da, &db).unwrap();
        let bc = maximal_coupling(&db, &dc).unwrap();
        let t = glue(&ab, &bc, 1e-12).unwrap();
        let (p12, p23) = (t.project_12(), t.project_23());
        for i in 0..6 {
            for j in 0..6 {
                assert!((p12.mass(i, j) - ab.mass(i, j)).abs() < 1e-12);
                assert!((p23.mass(i, j) - bc.mass(i, j)).abs() < 1e-12);
            }
        }
        let p13 = t.project_13();
        assert!(p13.marginal_error(da.as_slice(), dc.as_slice()) < 1e-12);
    }
}

fn b1_chain(n: usize, seed: u64) -> (Kernel<f64>, Distribution<f64>) {
    random_chain(&GeneratorParams {
        n_states: n,
        n_recurrent_classes: 1,
        periods: vec![1],
        transient_fraction: 0.25,
        sparsity: 0.5,
        seed,
    })
    .unwrap()
}

#[test]
fn switching_chain_meets_under_b1() {
    for seed in 0..30 {
        let (k, mu) = b1_chain(3 + (seed as usize) % 6, seed);
        let params = select_switching_params(&k, &mu);
        let set = coupling_set_c(&k, params.step, params.p).unwrap();
        let pk = switching_kernel(&k, &set, params.step).unwrap();
        let meet = meeting_probabilities(&pk, TOL).unwrap();
        assert!(meet.iter().all(|&m| (m - 1.0).abs() < 1e-9), "seed {seed}");
    }
}

#[test]
fn coupling_inequality_holds_empirically() {
    let traces = 4000;
    for seed in 0..8u64 {
        let (k, mu) = b1_chain(4 + (seed as usize) % 4, 300 + seed);
        let n = k.len();
        let horizon = 50 * n;
        let params = select_switching_params(&k, &mu);
        let coupler = Coupler::new(&k, params).unwrap();
        let (x, y) = (0, n - 1);
        let times = coupler.meeting_times(x, y, horizon, seed, traces).unwrap();
        let met = times.iter().filter(|t| t.is_some()).count();
        assert!(met as f64 / traces as f64 > 0.99, "seed {seed}: {met}");

        let p = dense(&k);
        let (rx, ry) = (rows(&p, x, horizon), rows(&p, y, horizon));
        for t in 0..=horizon {
            let d = tv_positive_part(&rx[t], &ry[t]);
            let tail = times.iter().filter(|m| m.is_none_or(|m| m > t)).count() as f64 / traces as f64;
            let sigma = (d * (1.0 - d) / traces as f64).sqrt();
            assert!(d <= tail + 3.0 * sigma + 1e-12, "seed {seed} t {t}: {d} vs {tail}");
        }
    }
}

#[test]
fn coupled_coordinates_have_chain_marginals() {
    let (k, _) = b1_chain(5, 77);
    let p = dense(&k);
    let traces = 20_000;
    for step in [1usize, 2, 3] {
        let coupler = Coupler::new(&k, SwitchingParams { step, p: 0.25 }).unwrap();
        let (x, y) = (0, 4);
        let horizon = 3 * step + 1;
        let paths: Vec<_> = (0..traces)
            .map(|i| coupler.trace(x, y, horizon, 9, &mut trace_rng(9, i)).unwrap().path)
            .collect();
        let (rx, ry) = (rows(&p, x, horizon), rows(&p, y, horizon));
        for t in 0..=horizon {
            for z in 0..k.len() {
                let fx = paths.iter().filter(|p| p[t].0 == z).count() as f64 / traces as f64;
                let fy = paths.iter().filter(|p| p[t].1 == z).count() as f64 / traces as f64;
                let band = |q: f64| 5.0 * (q * (1.0 - q) / traces as f64).sqrt() + 1e-9;
                assert!((fx - rx[t][z]).abs() <= band(rx[t][z]), "N={step} t={t} z={z}");
                assert!((fy - ry[t][z]).abs() <= band(ry[t][z]), "N={step} t={t} z={z}");
            }
        }
    }
}

#[test]
fn bridges_follow_the_conditioned_chain() {
    let (k, _) = b1_chain(5, 78);
    let p = dense(&k);
    let len = 3;
    let table = BridgeTable::new(&k, len).unwrap();
    let p3 = |a: usize, b: usize| n_step(&p, a, len)[b];
    let mut rng = trace_rng(5, 0);
    let draws = 4_000;
    let mut checked = 0;
    for from in 0..5 {
        for to in 0..5 {
            if p3(from, to) == 0.0 {
                continue;
            }
            checked += 1;
            let mut counts = [0usize; 25];
            for _ in 0..draws {
                let path = table.sample(&k, from, to, &mut rng).unwrap();
                assert_eq!(path.len(), len);
                assert_eq!(path[len - 1], to);
                counts[path[0] * 5 + path[1]] += 1;
            }
            // Exact law of (X_1, X_2) given X_0 = from, X_3 = to.
            for a in 0..5 {
                for b in 0..5 {
                    let exact = p[from][a] * p[a][b] * p[b][to] / p3(from, to);
                    let freq = counts[a * 5 + b] as f64 / draws as f64;
                    let band = 5.0 * (exact * (1.0 - exact) / draws as f64).sqrt() + 1e-9;
                    assert!((freq - exact).abs() <= band, "{from}->{to} ({a},{b})");
                }
            }
        }
    }
    assert!(checked > 0);
}
