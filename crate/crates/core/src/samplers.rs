//! Sampling-set constructors: uniformly random (white noise), void-and-
//! cluster relocation on geodesic distances, and two greedy spectral
//! baselines (worst-case singular value and spectral-proxy heuristics).

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, SamplingPattern};
use crate::metrics::principal_wavelength;
use crate::spectral::{matrix_power, SpectralBasis};

const LN_10: f64 = std::f64::consts::LN_10;

/// Relative tolerance under which two scores count as tied; ties resolve
/// to the lowest node index regardless of evaluation order.
const TIE_TOL: f64 = 1e-9;

/// Uniformly random m-subset of the n nodes.
pub fn white_noise(n: usize, m: usize, seed: u64) -> Result<SamplingPattern> {
    if m > n {
        return Err(Error::PatternTooLarge { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // partial Fisher-Yates: the first m slots are a uniform m-subset
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    SamplingPattern::from_support(n, &pool[..m])
}

/// Parameters of the void-and-cluster run.
#[derive(Debug, Clone)]
pub struct VacParams {
    /// Number of sampling nodes.
    pub m: usize,
    /// Gaussian kernel bandwidth σ in `K(u,v) = exp(−Γ(u,v)²/σ)`.
    pub sigma: f64,
    /// Offset subtracted from non-sampling concentrations; any τ > N keeps
    /// them negative.
    pub tau: f64,
    /// Iteration cap; N iterations reach stationarity in practice.
    pub num_iter: usize,
    /// Seed for the random initial pattern.
    pub seed: u64,
}

impl VacParams {
    /// Defaults: τ = 2N, iteration cap N.
    pub fn new(n: usize, m: usize, sigma: f64, seed: u64) -> VacParams {
        VacParams {
            m,
            sigma,
            tau: 2.0 * n as f64,
            num_iter: n,
            seed,
        }
    }

    /// Full default set with σ derived from the target density via the
    /// principal wavelength (see [`default_sigma`]).
    pub fn for_density(gamma: &DistanceMatrix, m: usize, seed: u64) -> Result<VacParams> {
        let n = gamma.n();
        let d = m as f64 / n as f64;
        let sigma = default_sigma(gamma, d)?;
        Ok(VacParams::new(n, m, sigma, seed))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::EmptyPattern);
        }
        if self.m > n {
            return Err(Error::PatternTooLarge { m: self.m, n });
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.tau <= n as f64 {
            return Err(Error::InvalidParam(format!(
                "tau must exceed the node count {n}, got {}",
                self.tau
            )));
        }
        if self.num_iter == 0 {
            return Err(Error::InvalidParam("num_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Kernel bandwidth rule σ = λ_b² / ln 10: the kernel decays to 0.1 at the
/// principal wavelength for density d. Falls back to the mean geodesic
/// distance when the wavelength degenerates to zero (d = 1).
pub fn default_sigma(gamma: &DistanceMatrix, d: f64) -> Result<f64> {
    let lambda_b = principal_wavelength(gamma, d)?;
    if lambda_b > 0.0 {
        Ok(lambda_b * lambda_b / LN_10)
    } else {
        let mean = gamma.mean_offdiagonal();
        Ok((mean * mean / LN_10).max(f64::MIN_POSITIVE))
    }
}

/// Output of a void-and-cluster run.
#[derive(Debug, Clone)]
pub struct VacRun {
    pub pattern: SamplingPattern,
    /// Swap iterations actually executed.
    pub iterations: usize,
    /// True when the repeat check fired before the iteration cap.
    pub terminated_early: bool,
    /// Snapshots taken before iteration 1 and then every `checkpoint_every`
    /// iterations, ending with the final pattern. Empty when no checkpoint
    /// interval was requested.
    pub checkpoints: Vec<SamplingPattern>,
}

/// Void-and-cluster with a random initial pattern drawn from the seed.
pub fn vac(gamma: &DistanceMatrix, params: &VacParams) -> Result<SamplingPattern> {
    Ok(vac_detailed(gamma, params, None, None)?.pattern)
}

/// Void-and-cluster from an explicit initial support.
pub fn vac_with_initial(
    gamma: &DistanceMatrix,
    params: &VacParams,
    initial: &[usize],
) -> Result<SamplingPattern> {
    Ok(vac_detailed(gamma, params, Some(initial), None)?.pattern)
}

/// Full void-and-cluster driver.
///
/// Each iteration recomputes the concentration vector from the Gaussian
/// kernel over geodesic distances: sampling nodes carry the kernel mass of
/// the other sampling nodes (self term included; it offsets every sampling
/// node equally), non-sampling nodes carry the same mass minus τ so they
/// stay negative. The 1 at the concentration argmax (tightest cluster)
/// moves to the argmin (deepest void). The loop stops when a swap exactly
/// reverses the previous one or after `num_iter` iterations.
pub fn vac_detailed(
    gamma: &DistanceMatrix,
    params: &VacParams,
    initial: Option<&[usize]>,
    checkpoint_every: Option<usize>,
) -> Result<VacRun> {
    let n = gamma.n();
    params.validate(n)?;

    let initial_support: Vec<usize> = match initial {
        Some(set) => {
            let p = SamplingPattern::from_support(n, set)?;
            if p.m() != params.m {
                return Err(Error::InvalidParam(format!(
                    "initial support has {} nodes, expected m={}",
                    p.m(),
                    params.m
                )));
            }
            p.support().to_vec()
        }
        None => white_noise(n, params.m, params.seed)?.support().to_vec(),
    };

    let mut is_sample = vec![false; n];
    for &v in &initial_support {
        is_sample[v] = true;
    }

    let mut run = VacRun {
        pattern: SamplingPattern::from_support(n, &initial_support)?,
        iterations: 0,
        terminated_early: false,
        checkpoints: Vec::new(),
    };
    let snapshot = |flags: &[bool]| {
        let support: Vec<usize> = (0..n).filter(|&v| flags[v]).collect();
        SamplingPattern::from_support(n, &support).expect("swap preserves validity")
    };
    if checkpoint_every.is_some() {
        run.checkpoints.push(run.pattern.clone());
    }

    if params.m == n {
        // no voids to move into; the full pattern is already stationary
        run.pattern = snapshot(&is_sample);
        if checkpoint_every.is_some() {
            run.checkpoints.push(run.pattern.clone());
        }
        return Ok(run);
    }

    let kernel: Vec<f64> = {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let d = gamma.dist(i, j);
                k[i * n + j] = (-d * d / params.sigma).exp();
            }
        }
        k
    };

    let mut prev_max = usize::MAX;
    let mut prev_min = usize::MAX;
    let mut conc = vec![0.0f64; n];
    for iter in 1..=params.num_iter {
        // c(v) = Σ_{j in support} K(j, v), shifted by −τ off the support
        conc.iter_mut().for_each(|c| *c = 0.0);
        for j in 0..n {
            if is_sample[j] {
                let row = &kernel[j * n..(j + 1) * n];
                for (c, &k) in conc.iter_mut().zip(row) {
                    *c += k;
                }
            }
        }
        for v in 0..n {
            if !is_sample[v] {
                conc[v] -= params.tau;
            }
        }

        let mut arg_max = 0usize;
        let mut arg_min = 0usize;
        for v in 1..n {
            if conc[v] > conc[arg_max] {
                arg_max = v;
            }
            if conc[v] < conc[arg_min] {
                arg_min = v;
            }
        }

        is_sample[arg_max] = false;
        is_sample[arg_min] = true;
        run.iterations = iter;

        if let Some(every) = checkpoint_every {
            if every > 0 && iter % every == 0 {
                run.checkpoints.push(snapshot(&is_sample));
            }
        }

        if prev_max == arg_max && prev_min == arg_min {
            // the swap undid the previous one: stationary
            run.terminated_early = true;
            break;
        }
        prev_max = arg_min;
        prev_min = arg_max;
    }

    run.pattern = snapshot(&is_sample);
    if checkpoint_every.is_some() {
        run.checkpoints.push(run.pattern.clone());
    }
    Ok(run)
}

/// Greedy worst-case sampler: each step adds the node that maximizes the
/// smallest singular value of the row-sampled bandlimited basis
/// `U_k(S, :)`. Ties resolve to the lowest node index.
pub fn greedy_sigma_min(basis: &SpectralBasis, k: usize, m: usize) -> Result<SamplingPattern> {
    let order = greedy_sigma_min_order(basis, k, m)?;
    SamplingPattern::from_support(basis.n(), &order)
}

/// Selection order of [`greedy_sigma_min`]; prefixes of the order are the
/// greedy solutions for smaller m.
pub fn greedy_sigma_min_order(basis: &SpectralBasis, k: usize, m: usize) -> Result<Vec<usize>> {
    let n = basis.n();
    if m == 0 {
        return Err(Error::EmptyPattern);
    }
    if m > n {
        return Err(Error::PatternTooLarge { m, n });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!("k={k} out of range 1..={n}")));
    }
    let u_k = basis.u_k(k);
    let rows: Vec<DVector<f64>> = (0..n).map(|v| u_k.row(v).transpose()).collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut in_set = vec![false; n];
    // column Gram Σ_{i∈S} u_i u_iᵀ, used once |S| ≥ k
    let mut col_gram = DMatrix::<f64>::zeros(k, k);

    for step in 0..m {
        let s = step; // current |S|
        let scores: Vec<f64> = if s < k {
            // thin phase: smallest eigenvalue of the (s+1)×(s+1) row Gram
            let base: Vec<&DVector<f64>> = chosen.iter().map(|&i| &rows[i]).collect();
            let mut gram = DMatrix::<f64>::zeros(s + 1, s + 1);
            for a in 0..s {
                for b in a..s {
                    let g = base[a].dot(base[b]);
                    gram[(a, b)] = g;
                    gram[(b, a)] = g;
                }
            }
            (0..n)
                .into_par_iter()
                .map(|v| {
                    if in_set[v] {
                        return f64::NEG_INFINITY;
                    }
                    let mut gm = gram.clone();
                    for (a, base_row) in base.iter().enumerate() {
                        let g = base_row.dot(&rows[v]);
                        gm[(a, s)] = g;
                        gm[(s, a)] = g;
                    }
                    gm[(s, s)] = rows[v].dot(&rows[v]);
                    smallest_eigenvalue(&gm)
                })
                .collect()
        } else {
            (0..n)
                .into_par_iter()
                .map(|v| {
                    if in_set[v] {
                        return f64::NEG_INFINITY;
                    }
                    let mut gm = col_gram.clone();
                    gm.syger(1.0, &rows[v], &rows[v], 1.0);
                    smallest_eigenvalue(&gm)
                })
                .collect()
        };

        let pick = argmax_lowest_index(&scores);
        chosen.push(pick);
        in_set[pick] = true;
        col_gram.syger(1.0, &rows[pick], &rows[pick], 1.0);
    }
    Ok(chosen)
}

/// Greedy spectral-proxy sampler: each step takes the eigenvector of the
/// smallest eigenvalue of `L^{2q}` restricted to the unsampled nodes and
/// adds the unsampled node with the largest absolute component. Ties
/// resolve to the lowest node index.
pub fn greedy_spectral_proxy(l: &DMatrix<f64>, m: usize, q: u32) -> Result<SamplingPattern> {
    let order = greedy_spectral_proxy_order(l, m, q)?;
    SamplingPattern::from_support(l.nrows(), &order)
}

/// Selection order of [`greedy_spectral_proxy`].
pub fn greedy_spectral_proxy_order(l: &DMatrix<f64>, m: usize, q: u32) -> Result<Vec<usize>> {
    let n = l.nrows();
    if m > n {
        return Err(Error::PatternTooLarge { m, n });
    }
    if q == 0 {
        return Err(Error::InvalidParam("q must be >= 1".into()));
    }
    let lp = matrix_power(l, 2 * q);
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut in_set = vec![false; n];
    for _ in 0..m {
        let free: Vec<usize> = (0..n).filter(|&v| !in_set[v]).collect();
        let reduced = lp.select_rows(free.iter()).select_columns(free.iter());
        let eig = reduced.symmetric_eigen();
        let mut best_col = 0;
        for c in 1..free.len() {
            if eig.eigenvalues[c] < eig.eigenvalues[best_col] {
                best_col = c;
            }
        }
        let psi = eig.eigenvectors.column(best_col);
        let scores: Vec<f64> = (0..n)
            .map(|v| match free.binary_search(&v) {
                Ok(local) => psi[local].abs(),
                Err(_) => f64::NEG_INFINITY,
            })
            .collect();
        let pick = argmax_lowest_index(&scores);
        chosen.push(pick);
        in_set[pick] = true;
    }
    Ok(chosen)
}

fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Index of the maximum, with scores within a relative tolerance of the
/// maximum treated as tied and resolved to the lowest index.
fn argmax_lowest_index(scores: &[f64]) -> usize {
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(1e-12);
    scores
        .iter()
        .position(|&s| s >= best - tol)
        .expect("non-empty score list")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::path_graph;

    #[test]
    fn white_noise_edge_cases() {
        let p = white_noise(5, 0, 1).unwrap();
        assert_eq!(p.m(), 0);
        let p = white_noise(5, 5, 1).unwrap();
        assert_eq!(p.support(), &[0, 1, 2, 3, 4]);
        assert!(white_noise(5, 6, 1).is_err());
        // determinism
        assert_eq!(
            white_noise(100, 10, 7).unwrap(),
            white_noise(100, 10, 7).unwrap()
        );
    }

    #[test]
    fn vac_p5_converges_to_endpoints() {
        let gamma = path_graph(5).geodesic_distances().unwrap();
        let params = VacParams {
            m: 2,
            sigma: 1.0,
            tau: 10.0,
            num_iter: 5,
            seed: 0,
        };
        let p = vac_with_initial(&gamma, &params, &[0, 1]).unwrap();
        assert_eq!(p.support(), &[0, 4]);
    }

    #[test]
    fn vac_single_sample_terminates_by_repeat_check() {
        let gamma = path_graph(5).geodesic_distances().unwrap();
        let params = VacParams {
            m: 1,
            sigma: 1.0,
            tau: 10.0,
            num_iter: 100,
            seed: 0,
        };
        let run = vac_detailed(&gamma, &params, Some(&[2]), None).unwrap();
        assert_eq!(run.pattern.m(), 1);
        assert!(run.terminated_early);
        assert!(run.iterations < 100);
    }

    #[test]
    fn vac_preserves_sample_count_and_is_deterministic() {
        let gamma = crate::gen::sensor_graph(60, 4, 3)
            .unwrap()
            .geodesic_distances()
            .unwrap();
        let params = VacParams::for_density(&gamma, 9, 42).unwrap();
        let a = vac(&gamma, &params).unwrap();
        let b = vac(&gamma, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 9);
    }

    #[test]
    fn vac_rejects_bad_params() {
        let gamma = path_graph(4).geodesic_distances().unwrap();
        let mut p = VacParams::new(4, 0, 1.0, 0);
        assert!(vac(&gamma, &p).is_err());
        p.m = 2;
        p.sigma = 0.0;
        assert!(vac(&gamma, &p).is_err());
        p.sigma = 1.0;
        p.tau = 3.0;
        assert!(vac(&gamma, &p).is_err());
    }

    #[test]
    fn vac_full_pattern_is_identity() {
        let gamma = path_graph(4).geodesic_distances().unwrap();
        let params = VacParams::new(4, 4, 1.0, 0);
        let p = vac(&gamma, &params).unwrap();
        assert_eq!(p.support(), &[0, 1, 2, 3]);
    }

    #[test]
    fn chen_tie_break_picks_node_zero() {
        let basis = SpectralBasis::from_graph(&path_graph(4)).unwrap();
        let p = greedy_sigma_min(&basis, 1, 1).unwrap();
        assert_eq!(p.support(), &[0]);
    }

    #[test]
    fn chen_well_posed_when_m_reaches_k() {
        let g = crate::gen::sensor_graph(25, 4, 8).unwrap();
        let basis = SpectralBasis::from_graph(&g).unwrap();
        let k = 4;
        let p = greedy_sigma_min(&basis, k, 2 * k).unwrap();
        let rows = basis.u_k(k).select_rows(p.support().iter());
        let smin = rows
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(smin > 0.0);
        assert_eq!(p.m(), 2 * k);
    }

    #[test]
    fn anis_first_pick_on_p3_is_node_zero() {
        // smallest eigenvalue of the unrestricted L^2 is 0 with a constant
        // eigenvector, so every component ties and index 0 wins
        let l = path_graph(3).laplacian();
        let p = greedy_spectral_proxy(&l, 1, 1).unwrap();
        assert_eq!(p.support(), &[0]);
    }

    #[test]
    fn anis_full_selection_returns_all_nodes() {
        let l = path_graph(4).laplacian();
        let p = greedy_spectral_proxy(&l, 4, 1).unwrap();
        assert_eq!(p.support(), &[0, 1, 2, 3]);
        assert!(greedy_spectral_proxy(&l, 5, 1).is_err());
    }

    #[test]
    fn greedy_orders_are_prefix_consistent() {
        let g = crate::gen::sensor_graph(30, 4, 5).unwrap();
        let basis = SpectralBasis::from_graph(&g).unwrap();
        let long = greedy_sigma_min_order(&basis, 5, 10).unwrap();
        let short = greedy_sigma_min_order(&basis, 5, 4).unwrap();
        assert_eq!(&long[..4], &short[..]);

        let l = g.laplacian();
        let long = greedy_spectral_proxy_order(&l, 8, 1).unwrap();
        let short = greedy_spectral_proxy_order(&l, 3, 1).unwrap();
        assert_eq!(&long[..3], &short[..]);
    }
}
