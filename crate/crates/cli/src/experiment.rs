//! Config-driven experiment runner: per trial, draw a model signal, build
//! the sampling set, optionally contaminate the samples, reconstruct and
//! score. Rows are keyed deterministically by (sampler, rate, trial) and
//! every random stream is derived from the base seed, so reruns reproduce
//! the result table bit-for-bit.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use gbn_core::derive_seed;
use gbn_core::graph::{DistanceMatrix, Graph, SamplingPattern};
use gbn_core::reconstruct::{add_noise, reconstruct_with_report, sample_signal};
use gbn_core::samplers::{
    default_sigma, greedy_sigma_min_order, greedy_spectral_proxy_order, vac, white_noise,
    VacParams,
};
use gbn_core::spectral::{redness, signal_sm1, signal_sm2, SpectralBasis};
use nalgebra::DVector;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GraphSource, SamplerSpec, SignalModel};
use crate::plot::{render_chart, ChartSpec, Series};

/// One reconstruction trial.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub sampler: String,
    pub m: usize,
    pub trial: usize,
    pub mse: f64,
    pub relative_error: f64,
    pub sigma_min: f64,
    pub redness: f64,
    /// Wall-clock cost of the trial. Not a function of the seed, so it is
    /// serialized to a separate timings file to keep the result CSV
    /// byte-reproducible.
    pub runtime_ms: u64,
}

/// All rows of one run, ordered by (sampler position, m, trial).
#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Deterministic result columns.
    pub fn results_csv(&self) -> String {
        let mut out = String::from("sampler,m,trial,mse,relative_error,sigma_min,redness\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.sampler, r.m, r.trial, r.mse, r.relative_error, r.sigma_min, r.redness
            ));
        }
        out
    }

    /// Wall-clock sidecar, excluded from the determinism guarantee.
    pub fn timings_csv(&self) -> String {
        let mut out = String::from("sampler,m,trial,runtime_ms\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.sampler, r.m, r.trial, r.runtime_ms));
        }
        out
    }

    pub fn mean_mse(&self, sampler: &str, m: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.sampler == sampler && r.m == m)
            .map(|r| r.mse)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    pub fn samplers(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.sampler) {
                seen.push(r.sampler.clone());
            }
        }
        seen
    }

    pub fn rates(&self) -> Vec<usize> {
        let mut rates: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !rates.contains(&r.m) {
                rates.push(r.m);
            }
        }
        rates.sort_unstable();
        rates
    }
}

/// Graph plus the spectral and metric precomputations shared by trials.
pub struct PreparedGraph {
    pub graph: Graph,
    pub basis: SpectralBasis,
    pub gamma: DistanceMatrix,
}

pub fn prepare_graph(source: &GraphSource) -> anyhow::Result<PreparedGraph> {
    let graph = match source {
        GraphSource::Spec(spec) => spec.build().context("building graph from spec")?,
        GraphSource::File { path } => {
            Graph::load_csv(Path::new(path)).with_context(|| format!("loading graph {path}"))?
        }
    };
    let basis = SpectralBasis::from_graph(&graph).context("eigendecomposition")?;
    let gamma = graph.geodesic_distances().context("geodesic distances")?;
    Ok(PreparedGraph { graph, basis, gamma })
}

pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<ResultTable> {
    config.validate()?;
    let prepared = prepare_graph(&config.graph)?;
    run_experiment_on(config, &prepared)
}

/// Runner over an already prepared graph, for callers that reuse the
/// eigendecomposition across configs.
pub fn run_experiment_on(
    config: &ExperimentConfig,
    prepared: &PreparedGraph,
) -> anyhow::Result<ResultTable> {
    let n = prepared.graph.node_count();
    let k = config.signal_model.reconstruction_bandwidth();
    if k > n {
        bail!("config field `signal_model` bandwidth {k} exceeds node count {n}");
    }
    for &m in &config.sampling_rates {
        if m > n {
            bail!("config field `sampling_rates` entry {m} exceeds node count {n}");
        }
    }
    let max_rate = *config.sampling_rates.iter().max().expect("nonempty rates");

    // deterministic samplers are prefix-consistent: one order serves all rates
    let mut chen_orders: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut anis_orders: HashMap<u32, Vec<usize>> = HashMap::new();
    for sampler in &config.samplers {
        match *sampler {
            SamplerSpec::Chen { k: chen_k } => {
                let kk = chen_k.unwrap_or(k);
                if let std::collections::hash_map::Entry::Vacant(slot) = chen_orders.entry(kk) {
                    let order = greedy_sigma_min_order(&prepared.basis, kk, max_rate)
                        .context("config field `samplers`: chen order construction")?;
                    slot.insert(order);
                }
            }
            SamplerSpec::Anis { q } => {
                if let std::collections::hash_map::Entry::Vacant(slot) = anis_orders.entry(q) {
                    let l = prepared.graph.laplacian();
                    let order = greedy_spectral_proxy_order(&l, max_rate, q)
                        .context("config field `samplers`: anis order construction")?;
                    slot.insert(order);
                }
            }
            _ => {}
        }
    }

    // kernel bandwidth per rate for the void-and-cluster default
    let mut vac_sigma: HashMap<usize, f64> = HashMap::new();
    if config
        .samplers
        .iter()
        .any(|s| matches!(s, SamplerSpec::Vac { .. }))
    {
        for &m in &config.sampling_rates {
            let d = m as f64 / n as f64;
            vac_sigma.insert(m, default_sigma(&prepared.gamma, d).context("default sigma")?);
        }
    }

    struct Job {
        sampler_idx: usize,
        m: usize,
        trial: usize,
    }
    let mut jobs = Vec::new();
    for (sampler_idx, _) in config.samplers.iter().enumerate() {
        for &m in &config.sampling_rates {
            for trial in 0..config.trials {
                jobs.push(Job {
                    sampler_idx,
                    m,
                    trial,
                });
            }
        }
    }

    let rows: Vec<anyhow::Result<ResultRow>> = jobs
        .par_iter()
        .map(|job| -> anyhow::Result<ResultRow> {
            let started = Instant::now();
            let sampler = &config.samplers[job.sampler_idx];
            let label = sampler.label();
            let pattern_seed = derive_seed(config.seed, label, job.m, job.trial);

            let pattern: SamplingPattern = match *sampler {
                SamplerSpec::Random => white_noise(n, job.m, pattern_seed)?,
                SamplerSpec::Vac {
                    sigma,
                    tau,
                    num_iter,
                } => {
                    let mut params = VacParams::new(
                        n,
                        job.m,
                        sigma.unwrap_or(vac_sigma[&job.m]),
                        pattern_seed,
                    );
                    if let Some(t) = tau {
                        params.tau = t;
                    }
                    if let Some(it) = num_iter {
                        params.num_iter = it;
                    }
                    vac(&prepared.gamma, &params)?
                }
                SamplerSpec::Chen { k: chen_k } => {
                    let kk = chen_k.unwrap_or(k);
                    SamplingPattern::from_support(n, &chen_orders[&kk][..job.m])?
                }
                SamplerSpec::Anis { q } => {
                    SamplingPattern::from_support(n, &anis_orders[&q][..job.m])?
                }
            };

            // signals are shared across samplers and rates within a trial
            let signal_seed = derive_seed(config.seed, "signal", 0, job.trial);
            let x: DVector<f64> = match config.signal_model {
                SignalModel::Sm1 { k } => signal_sm1(&prepared.basis, k, signal_seed)?,
                SignalModel::Sm2 { ref_index } => {
                    signal_sm2(&prepared.basis, ref_index, signal_seed)?
                }
            };

            let mut y = sample_signal(&x, pattern.support())?;
            if let Some(snr) = config.snr_db {
                let noise_seed = derive_seed(config.seed, "noise", job.m, job.trial);
                y = add_noise(&y, snr, noise_seed)?;
            }
            let (_, report) = reconstruct_with_report(&prepared.basis, k, pattern.support(), &y, &x)?;
            let red = redness(&prepared.basis, &pattern)?;

            Ok(ResultRow {
                sampler: label.to_string(),
                m: job.m,
                trial: job.trial,
                mse: report.mse,
                relative_error: report.relative_error,
                sigma_min: report.sigma_min,
                redness: red,
                runtime_ms: started.elapsed().as_millis() as u64,
            })
        })
        .collect();

    let mut table = ResultTable::default();
    for row in rows {
        table.rows.push(row?);
    }
    // jobs were generated in (sampler, m, trial) order and rayon preserves
    // indices, but make the contract explicit
    let order: HashMap<&str, usize> = config
        .samplers
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label(), i))
        .collect();
    table
        .rows
        .sort_by_key(|r| (order[r.sampler.as_str()], r.m, r.trial));
    Ok(table)
}

/// Files produced by [`write_outputs`].
pub struct RunArtifacts {
    pub results_csv: PathBuf,
    pub timings_csv: PathBuf,
    pub manifest_json: PathBuf,
    pub mse_curve_svg: PathBuf,
    pub mse_curve_csv: PathBuf,
}

/// Writes the result table, a manifest echoing the config, and the MSE
/// curve plot into the configured output directory.
pub fn write_outputs(config: &ExperimentConfig, table: &ResultTable) -> anyhow::Result<RunArtifacts> {
    let dir = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("output dir {} is not reachable", dir.display()))?;

    let results_csv = dir.join("results.csv");
    std::fs::write(&results_csv, table.results_csv())?;
    let timings_csv = dir.join("timings.csv");
    std::fs::write(&timings_csv, table.timings_csv())?;

    let manifest_json = dir.join("manifest.json");
    let manifest = serde_json::json!({
        "config": config,
        "library_version": env!("CARGO_PKG_VERSION"),
        "outputs": {
            "results": "results.csv",
            "timings": "timings.csv",
            "mse_curve": "mse-curve.svg",
        },
        "notes": "timings.csv holds wall-clock measurements and is excluded from byte-level reproducibility",
    });
    std::fs::write(&manifest_json, serde_json::to_string_pretty(&manifest)?)?;

    let series: Vec<Series> = table
        .samplers()
        .into_iter()
        .map(|sampler| {
            let points: Vec<(f64, f64)> = table
                .rates()
                .into_iter()
                .filter_map(|m| table.mean_mse(&sampler, m).map(|v| (m as f64, v)))
                .collect();
            Series {
                label: sampler,
                points,
            }
        })
        .collect();
    let mse_curve_svg = dir.join("mse-curve.svg");
    let mse_curve_csv = render_chart(
        &ChartSpec {
            title: "Mean reconstruction MSE vs sampling rate",
            x_label: "m (samples)",
            y_label: "mean MSE",
            log_y: true,
        },
        &series,
        &mse_curve_svg,
    )?;

    Ok(RunArtifacts {
        results_csv,
        timings_csv,
        manifest_json,
        mse_curve_svg,
        mse_curve_csv,
    })
}
