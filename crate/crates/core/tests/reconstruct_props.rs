//! Reconstruction checked against a normal-equations oracle and the
//! noise-free exact-recovery guarantee across samplers and graph families.

mod common;

use gbn_core::derive_seed;
use gbn_core::gen::{barabasi_albert, community_graph, sensor_graph};
use gbn_core::graph::Graph;
use gbn_core::reconstruct::{add_noise, mse, reconstruct_ls, reconstruct_with_report, sample_signal};
use gbn_core::samplers::{greedy_sigma_min, greedy_spectral_proxy, vac, white_noise, VacParams};
use gbn_core::spectral::{signal_sm1, SpectralBasis};
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[test]
fn pseudo_inverse_matches_normal_equations_when_well_conditioned() {
    let g = sensor_graph(15, 3, 70).unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..20 {
        let k = rng.random_range(2..6);
        let m = rng.random_range(k + 1..12);
        let set = common::random_subset(15, m, 100 + trial);
        let x = signal_sm1(&basis, k, 200 + trial).unwrap();
        let y = add_noise(&sample_signal(&x, &set).unwrap(), 15.0, trial).unwrap();
        let (x_rec, info) = reconstruct_ls(&basis, k, &set, &y).unwrap();
        if info.sigma_min < 1e-6 {
            continue;
        }

        // oracle: solve (A^T A) c = A^T y by Gaussian elimination on plain
        // vectors, then synthesize through the eigenvector columns
        let u_k = basis.u_k(k);
        let a: Vec<Vec<f64>> = set
            .iter()
            .map(|&v| (0..k).map(|c| u_k[(v, c)]).collect())
            .collect();
        let mut ata = vec![vec![0.0; k]; k];
        let mut aty = vec![0.0; k];
        for (row, &yi) in a.iter().zip(y.iter()) {
            for i in 0..k {
                aty[i] += row[i] * yi;
                for j in 0..k {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let coeffs = common::solve_dense(&ata, &aty);
        let mut oracle = [0.0; 15];
        for (v, val) in oracle.iter_mut().enumerate() {
            *val = (0..k).map(|c| u_k[(v, c)] * coeffs[c]).sum();
        }
        let diff: f64 = oracle
            .iter()
            .zip(x_rec.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = x_rec.norm().max(1.0);
        assert!(diff / scale < 1e-8, "trial {trial}: oracle gap {diff}");
    }
}

#[test]
fn noise_free_recovery_across_samplers_and_families() {
    let graphs: Vec<(&str, Graph)> = vec![
        ("sensor", sensor_graph(60, 5, 14).unwrap()),
        ("community", community_graph(60, 4, 15).unwrap()),
        ("ba", barabasi_albert(60, 2, 16).unwrap()),
    ];
    for (family, g) in graphs {
        let basis = SpectralBasis::from_graph(&g).unwrap();
        let gamma = g.geodesic_distances().unwrap();
        let l = g.laplacian();
        for k in [3usize, 6] {
            let m = 2 * k;
            let seed = derive_seed(1, family, k, 0);
            let sets = vec![
                ("random", white_noise(60, m, seed).unwrap()),
                (
                    "vac",
                    vac(&gamma, &VacParams::for_density(&gamma, m, seed).unwrap()).unwrap(),
                ),
                ("chen", greedy_sigma_min(&basis, k, m).unwrap()),
                ("anis", greedy_spectral_proxy(&l, m, 1).unwrap()),
            ];
            let x = signal_sm1(&basis, k, seed ^ 0xff).unwrap();
            for (name, pattern) in sets {
                let y = sample_signal(&x, pattern.support()).unwrap();
                let (x_rec, report) =
                    reconstruct_with_report(&basis, k, pattern.support(), &y, &x).unwrap();
                if report.sigma_min > 1e-8 {
                    assert!(
                        report.relative_error < 1e-8,
                        "{family}/{name} k={k}: rel err {} at sigma_min {}",
                        report.relative_error,
                        report.sigma_min
                    );
                }
                // reconstruction always lies in the bandlimited span
                let xhat = basis.gft(&x_rec).unwrap();
                for l_idx in k..60 {
                    assert!(xhat[l_idx].abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn min_norm_solution_under_rank_deficiency() {
    let g = sensor_graph(20, 4, 9).unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let k = 6;
    let set = [2usize, 11, 17]; // fewer samples than k
    let x = signal_sm1(&basis, k, 4).unwrap();
    let y = sample_signal(&x, &set).unwrap();
    let (x_rec, info) = reconstruct_ls(&basis, k, &set, &y).unwrap();
    assert!(info.rank_deficient);
    assert_eq!(info.sigma_min, 0.0);
    // the fit still interpolates the samples it saw
    let resampled = sample_signal(&x_rec, &set).unwrap();
    assert!((resampled - y).norm() < 1e-8);
}

#[test]
fn reported_mse_is_consistent_with_the_definition() {
    let g = sensor_graph(25, 4, 2).unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let x = signal_sm1(&basis, 5, 8).unwrap();
    let set = common::random_subset(25, 12, 6);
    let y = add_noise(&sample_signal(&x, &set).unwrap(), 20.0, 1).unwrap();
    let (x_rec, report) = reconstruct_with_report(&basis, 5, &set, &y, &x).unwrap();
    let direct = mse(&x, &x_rec).unwrap();
    assert_eq!(report.mse, direct);
    assert!(report.mse >= 0.0);
    let expected_rel = (&x_rec - &x).norm() / x.norm();
    assert_eq!(report.relative_error, expected_rel);
}

#[test]
fn full_sampling_with_noise_reaches_the_noise_floor() {
    let g = sensor_graph(40, 4, 44).unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let k = 10;
    let x = signal_sm1(&basis, k, 3).unwrap();
    let set: Vec<usize> = (0..40).collect();
    let y = add_noise(&sample_signal(&x, &set).unwrap(), 20.0, 7).unwrap();
    let sigma2 = (x.norm_squared() / 40.0) * 10f64.powf(-2.0);
    let (_, report) = reconstruct_with_report(&basis, k, &set, &y, &x).unwrap();
    // projecting onto k of n dimensions keeps roughly k/n of the noise
    assert!(report.mse < 3.0 * sigma2 * (k as f64 / 40.0) + 1e-12);
    assert!(report.mse > 0.0);
    let noise_free = sample_signal(&x, &set).unwrap();
    let (_, clean) = reconstruct_with_report(&basis, k, &set, &noise_free, &x).unwrap();
    assert!(clean.mse < 1e-20);
}

#[test]
fn dvector_projection_identity_for_full_band() {
    // k = n means reconstruction reproduces any signal from full samples
    let g = sensor_graph(12, 3, 5).unwrap();
    let basis = SpectralBasis::from_graph(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x = DVector::from_iterator(12, (0..12).map(|_| rng.random::<f64>()));
    let set: Vec<usize> = (0..12).collect();
    let y = sample_signal(&x, &set).unwrap();
    let (x_rec, _) = reconstruct_ls(&basis, 12, &set, &y).unwrap();
    assert!((x_rec - x).norm() < 1e-9);
}
