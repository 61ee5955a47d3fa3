//! Sampler behavior against independent oracles and the statistical
//! properties that define blue-noise patterns: spreading, redness decay and
//! greedy quality relative to exhaustive search.

mod common;

use gbn_core::derive_seed;
use gbn_core::gen::sensor_graph;
use gbn_core::graph::DistanceMatrix;
use gbn_core::samplers::{
    greedy_sigma_min, greedy_spectral_proxy_order, vac_detailed, white_noise, VacParams,
};
use gbn_core::spectral::{cutoff_proxy, redness, SpectralBasis};

/// Direct transliteration of the void-and-cluster loop, kept deliberately
/// naive: full concentration recomputation, linear argmin/argmax scans.
fn vac_oracle(gamma: &DistanceMatrix, initial: &[usize], sigma: f64, tau: f64, iters: usize) -> Vec<usize> {
    let n = gamma.n();
    let mut s = vec![false; n];
    for &v in initial {
        s[v] = true;
    }
    let (mut ind_a, mut ind_b) = (usize::MAX, usize::MAX);
    for _ in 0..iters {
        let mut c = vec![0.0f64; n];
        for v in 0..n {
            let mass: f64 = (0..n)
                .filter(|&j| s[j])
                .map(|j| {
                    let d = gamma.dist(j, v);
                    (-d * d / sigma).exp()
                })
                .sum();
            c[v] = if s[v] { mass } else { mass - tau };
        }
        let mut amax = 0;
        let mut amin = 0;
        for v in 1..n {
            if c[v] > c[amax] {
                amax = v;
            }
            if c[v] < c[amin] {
                amin = v;
            }
        }
        s[amax] = false;
        s[amin] = true;
        if ind_a == amax && ind_b == amin {
            break;
        }
        ind_a = amin;
        ind_b = amax;
    }
    (0..n).filter(|&v| s[v]).collect()
}

#[test]
fn vac_matches_independent_loop_transcription() {
    // P5 with the documented parameters lands on the endpoints
    let p5 = gbn_core::graph::fixtures::path_graph(5);
    let gamma = p5.geodesic_distances().unwrap();
    let oracle = vac_oracle(&gamma, &[0, 1], 1.0, 10.0, 5);
    assert_eq!(oracle, vec![0, 4]);

    // random sensor instances, several densities
    let g = sensor_graph(40, 4, 101).unwrap();
    let gamma = g.geodesic_distances().unwrap();
    for (m, seed) in [(3usize, 7u64), (6, 8), (10, 9)] {
        let initial = common::random_subset(40, m, seed);
        let params = VacParams {
            m,
            sigma: 0.05,
            tau: 80.1,
            num_iter: 40,
            seed: 0,
        };
        let run = vac_detailed(&gamma, &params, Some(&initial), None).unwrap();
        let oracle = vac_oracle(&gamma, &initial, 0.05, 80.1, 40);
        assert_eq!(run.pattern.support(), &oracle[..], "m={m} diverged");
    }
}

#[test]
fn vac_spreads_samples_apart() {
    let g = sensor_graph(150, 6, 55).unwrap();
    let gamma = g.geodesic_distances().unwrap();
    let m = 15;
    let min_pairwise = |support: &[usize]| -> f64 {
        let mut best = f64::INFINITY;
        for (i, &a) in support.iter().enumerate() {
            for &b in &support[i + 1..] {
                best = best.min(gamma.dist(a, b));
            }
        }
        best
    };
    let mut improved = 0;
    for run_id in 0..50 {
        let seed = derive_seed(3, "spread", m, run_id);
        let params = VacParams::for_density(&gamma, m, seed).unwrap();
        let initial = white_noise(150, m, seed).unwrap();
        let run = vac_detailed(&gamma, &params, Some(initial.support()), None).unwrap();
        assert_eq!(run.pattern.m(), m);
        if min_pairwise(run.pattern.support()) >= min_pairwise(initial.support()) {
            improved += 1;
        }
    }
    assert!(improved >= 45, "spreading held in only {improved}/50 runs");
}

#[test]
fn vac_redness_trace_decays() {
    let g = sensor_graph(200, 6, 66).unwrap();
    let gamma = g.geodesic_distances().unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let n = 200;
    for d in [0.05, 0.1, 0.2] {
        let m = (d * n as f64).round() as usize;
        for trial in 0..5 {
            let seed = derive_seed(11, "redness-trace", m, trial);
            let params = VacParams::for_density(&gamma, m, seed)
                .unwrap();
            let run = vac_detailed(&gamma, &params, None, Some(n / 10)).unwrap();
            let trace: Vec<f64> = run
                .checkpoints
                .iter()
                .map(|p| {
                    assert_eq!(p.m(), m, "swap lost a sample");
                    redness(&basis, p).unwrap()
                })
                .collect();
            assert!(
                trace.last().unwrap() < trace.first().unwrap(),
                "final redness did not drop for d={d}: {trace:?}"
            );
            for w in trace.windows(2) {
                assert!(
                    w[1] <= w[0] * 1.1,
                    "redness rose by more than 10% within a checkpoint: {trace:?}"
                );
            }
        }
    }
}

#[test]
fn white_noise_selection_frequencies_are_uniform() {
    // Per-node frequencies over 10^3 draws concentrate at d = 0.1. The
    // ±0.03 band is 3.2 binomial sigmas, so out of 2000 nodes a few
    // outliers are expected from a correct sampler; the band must hold for
    // 99% of nodes and no node may stray past 6 sigmas.
    let n = 2000;
    let m = 200;
    let trials = 1000;
    let mut counts = vec![0u32; n];
    for t in 0..trials {
        let p = white_noise(n, m, derive_seed(42, "wn-freq", m, t)).unwrap();
        for &v in p.support() {
            counts[v] += 1;
        }
    }
    assert_eq!(counts.iter().map(|&c| c as usize).sum::<usize>(), m * trials);
    let mut worst = 0.0f64;
    let mut outside = 0usize;
    for &c in &counts {
        let dev = (c as f64 / trials as f64 - 0.1).abs();
        worst = worst.max(dev);
        if dev >= 0.03 {
            outside += 1;
        }
    }
    println!("white noise: worst per-node deviation {worst}, {outside}/{n} nodes outside ±0.03");
    assert!(outside <= n / 100, "{outside} nodes outside the ±0.03 band");
    assert!(worst < 0.06, "worst per-node deviation {worst}");
}

#[test]
fn chen_greedy_tracks_exhaustive_optimum() {
    // The greedy is a heuristic: the hard guarantee checked here is that
    // its σ_min stays within 30% of the exhaustive optimum over all
    // (20 choose 3) subsets. Exact optimum hits are rare on generic
    // float-weighted graphs (ties have measure zero), so the match rate is
    // reported rather than asserted. A naive per-candidate SVD greedy acts
    // as an independent check of the incremental Gram implementation.
    let k = 3;
    let m = 3;
    let n = 20;
    let mut matches = 0;
    for graph_id in 0..50u64 {
        let g = sensor_graph(n, 4, 7000 + graph_id).unwrap();
        let basis = SpectralBasis::from_graph(&g).unwrap();
        let u_k = basis.u_k(k);
        let sigma_min_of = |set: &[usize]| -> f64 {
            u_k.select_rows(set.iter())
                .svd(false, false)
                .singular_values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        };
        let mut best = 0.0f64;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    best = best.max(sigma_min_of(&[a, b, c]));
                }
            }
        }

        let mut naive: Vec<usize> = Vec::new();
        for _ in 0..m {
            let mut best_v = usize::MAX;
            let mut best_s = f64::NEG_INFINITY;
            for v in 0..n {
                if naive.contains(&v) {
                    continue;
                }
                let mut set = naive.clone();
                set.push(v);
                set.sort_unstable();
                let s = sigma_min_of(&set);
                if s > best_s * (1.0 + 1e-9) + 1e-15 {
                    best_s = s;
                    best_v = v;
                }
            }
            naive.push(best_v);
        }
        naive.sort_unstable();

        let greedy = greedy_sigma_min(&basis, k, m).unwrap();
        assert_eq!(
            greedy.support(),
            &naive[..],
            "graph {graph_id}: Gram-based greedy diverged from the naive greedy"
        );
        let got = sigma_min_of(greedy.support());
        assert!(
            got >= 0.7 * best,
            "graph {graph_id}: greedy σ_min {got} under 70% of optimum {best}"
        );
        if got >= best * (1.0 - 1e-9) {
            matches += 1;
        }
    }
    println!("greedy matched the exhaustive optimum on {matches}/50 graphs");
}

#[test]
fn anis_quality_improves_with_q() {
    let g = sensor_graph(40, 4, 88).unwrap();
    let l = g.laplacian();
    let mut monotone = 0;
    let trials: Vec<usize> = (1..=10).map(|i| 3 * i).collect();
    for &m in &trials {
        let mut prev = f64::NEG_INFINITY;
        let mut ok = true;
        for q in 1..=3u32 {
            let order = greedy_spectral_proxy_order(&l, m, q).unwrap();
            let omega = cutoff_proxy(&l, &order, q).unwrap();
            if omega < prev - 1e-9 {
                ok = false;
            }
            prev = omega;
        }
        if ok {
            monotone += 1;
        }
    }
    println!("Ω_q nondecreasing in q for {monotone}/{} sample counts", trials.len());
    assert!(monotone * 10 >= trials.len() * 7, "{monotone}/{}", trials.len());
}

#[test]
fn samplers_return_exactly_m_distinct_nodes() {
    let g = sensor_graph(30, 4, 5).unwrap();
    let gamma = g.geodesic_distances().unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let l = g.laplacian();
    for m in [1usize, 5, 15, 30] {
        let w = white_noise(30, m, 1).unwrap();
        assert_eq!(w.m(), m);
        let params = VacParams::for_density(&gamma, m, 2).unwrap();
        assert_eq!(gbn_core::samplers::vac(&gamma, &params).unwrap().m(), m);
        assert_eq!(greedy_sigma_min(&basis, 5.min(m), m).unwrap().m(), m);
        assert_eq!(
            gbn_core::samplers::greedy_spectral_proxy(&l, m, 1).unwrap().m(),
            m
        );
    }
}
