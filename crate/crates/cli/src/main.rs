use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gbn_core::gen::GeneratorSpec;
use gbn_core::graph::{Graph, SamplingPattern};
use gbn_core::metrics;
use gbn_core::reconstruct::{add_noise, reconstruct_with_report, sample_signal};
use gbn_core::samplers::{
    default_sigma, greedy_sigma_min, greedy_spectral_proxy, vac, white_noise, VacParams,
};
use gbn_core::spectral::{self, SpectralBasis};

use gbn_cli::config::ExperimentConfig;
use gbn_cli::experiment::{run_experiment, write_outputs};
use gbn_cli::plot::{render_chart, PlotKind, Series};
use gbn_cli::theory;

/// Blue-noise sampling on graphs: generators, samplers, metrics,
/// reconstruction and the experiment pipeline.
#[derive(Parser)]
#[command(name = "gbn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as CSV plus a JSON sidecar.
    GenGraph(GenGraphArgs),
    /// Build a sampling pattern for a graph.
    Sample(SampleArgs),
    /// Pattern and graph quality metrics.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Sample a signal, optionally add noise, reconstruct and report.
    Reconstruct(ReconstructArgs),
    /// Run a config-driven experiment and emit CSV + SVG artifacts.
    Experiment(ExperimentArgs),
    /// Verify the analytic identities and bounds; exits 2 on violation.
    TheoryCheck(TheoryCheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Sensor,
    Community,
    BarabasiAlbert,
    Path,
    Grid,
    Complete,
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Node count (ignored for grid, which uses --rows/--cols).
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Nearest-neighbor cap for sensor graphs.
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Community count for community graphs.
    #[arg(long, default_value_t = 16)]
    communities: usize,
    #[arg(long, default_value_t = 0.3)]
    p_in: f64,
    #[arg(long, default_value_t = 0.005)]
    p_out: f64,
    /// Attachment count for Barabási–Albert graphs.
    #[arg(long, default_value_t = 2)]
    m_attach: usize,
    #[arg(long, default_value_t = 0)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    cols: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Random,
    Vac,
    Chen,
    Anis,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Number of sampling nodes.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bandwidth for the chen method.
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Proxy order for the anis method.
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// Kernel bandwidth for vac; defaults to the principal-wavelength rule.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    num_iter: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Ensemble pair correlation over geodesic annuli.
    PairCorrelation {
        #[arg(long)]
        graph: PathBuf,
        /// Pattern files; repeat for an ensemble.
        #[arg(long, required = true)]
        pattern: Vec<PathBuf>,
        /// Annulus half-width; defaults to the mean edge weight.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also render an SVG next to the CSV.
        #[arg(long, default_value_t = false)]
        plot: bool,
    },
    /// Low-frequency energy of one pattern.
    Redness {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Principal wavelength at a target density.
    Wavelength {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Uniqueness constant K_S of a pattern.
    Ks {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Λ constants of the pattern support and of its complement.
    LambdaSet {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Geodesic Voronoi partition seeded by the pattern.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    /// Reference signal as `node,value` CSV.
    #[arg(long)]
    signal: PathBuf,
    /// Reconstruction bandwidth.
    #[arg(long)]
    k: usize,
    /// Contaminate the samples at this SNR before reconstructing.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the reconstructed signal CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct TheoryCheckArgs {
    /// Graph names (p3, p5, k5, grid4x4, sensor:n:seed) or CSV paths;
    /// defaults to the built-in five-graph suite.
    #[arg(long)]
    graph: Vec<String>,
    /// Random patterns per graph.
    #[arg(long, default_value_t = 220)]
    patterns: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GBN_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    // exit codes: 0 success, 1 validation/usage error, 2 numeric failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            err.exit()
        }
        Err(err) => {
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::GenGraph(args) => gen_graph(args),
        Command::Sample(args) => sample(args),
        Command::Metrics(cmd) => run_metrics(cmd),
        Command::Reconstruct(args) => reconstruct(args),
        Command::Experiment(args) => experiment(args),
        Command::TheoryCheck(args) => theory_check(args),
    }
}

fn gen_graph(args: GenGraphArgs) -> anyhow::Result<ExitCode> {
    let spec = match args.family {
        Family::Sensor => GeneratorSpec::Sensor {
            n: args.n,
            k_max: args.k_max,
            seed: args.seed,
        },
        Family::Community => GeneratorSpec::Community {
            n: args.n,
            communities: args.communities,
            p_in: args.p_in,
            p_out: args.p_out,
            seed: args.seed,
        },
        Family::BarabasiAlbert => GeneratorSpec::BarabasiAlbert {
            n: args.n,
            m_attach: args.m_attach,
            seed: args.seed,
        },
        Family::Path => GeneratorSpec::Path { n: args.n },
        Family::Grid => GeneratorSpec::Grid {
            rows: args.rows,
            cols: args.cols,
        },
        Family::Complete => GeneratorSpec::Complete { n: args.n },
    };
    let (graph, report) = spec.build_detailed()?;
    graph.save_csv(&args.out)?;
    let sidecar = args.out.with_extension("json");
    let meta = serde_json::json!({
        "spec": spec,
        "n": graph.node_count(),
        "edges": graph.edges().len(),
        "bridges_added": report.bridges_added,
    });
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
    println!(
        "wrote {} ({} nodes, {} edges, {} bridge edges) and {}",
        args.out.display(),
        graph.node_count(),
        graph.edges().len(),
        report.bridges_added,
        sidecar.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn sample(args: SampleArgs) -> anyhow::Result<ExitCode> {
    let graph = Graph::load_csv(&args.graph)?;
    let n = graph.node_count();
    let pattern = match args.method {
        Method::Random => white_noise(n, args.m, args.seed)?,
        Method::Vac => {
            let gamma = graph.geodesic_distances()?;
            if args.m == 0 {
                anyhow::bail!("vac needs at least one sampling node (got --m 0)");
            }
            let sigma = match args.sigma {
                Some(s) => s,
                None => default_sigma(&gamma, args.m as f64 / n as f64)?,
            };
            let mut params = VacParams::new(n, args.m, sigma, args.seed);
            if let Some(t) = args.tau {
                params.tau = t;
            }
            if let Some(it) = args.num_iter {
                params.num_iter = it;
            }
            vac(&gamma, &params)?
        }
        Method::Chen => {
            let basis = SpectralBasis::from_graph(&graph)?;
            greedy_sigma_min(&basis, args.k.min(n), args.m)?
        }
        Method::Anis => greedy_spectral_proxy(&graph.laplacian(), args.m, args.q)?,
    };
    pattern.save_json(&args.out)?;
    println!(
        "wrote {} ({} of {} nodes sampled)",
        args.out.display(),
        pattern.m(),
        n
    );
    Ok(ExitCode::SUCCESS)
}

fn print_scalar(format: Format, name: &str, value: f64) {
    match format {
        Format::Csv => println!("{value}"),
        Format::Json => println!("{}", serde_json::json!({ name: value })),
    }
}

fn run_metrics(cmd: MetricsCommand) -> anyhow::Result<ExitCode> {
    match cmd {
        MetricsCommand::PairCorrelation {
            graph,
            pattern,
            theta,
            out,
            plot,
        } => {
            let g = Graph::load_csv(&graph)?;
            let gamma = g.geodesic_distances()?;
            let patterns: Vec<SamplingPattern> = pattern
                .iter()
                .map(|p| SamplingPattern::load_json(p))
                .collect::<gbn_core::Result<_>>()?;
            let theta = theta.unwrap_or_else(|| metrics::default_theta(&g));
            let pc = metrics::pair_correlation(&gamma, &patterns, theta)?;
            std::fs::write(&out, pc.to_csv())?;
            println!("wrote {} ({} radii)", out.display(), pc.rho.len());
            if plot {
                // the chart dumps its data next to the SVG; keep a distinct
                // stem so it cannot clobber the metric CSV itself
                let svg = out.with_extension("plot.svg");
                render_chart(
                    &PlotKind::PairCorrelation.chart_spec(),
                    &[Series {
                        label: "R".into(),
                        points: pc.rho.iter().cloned().zip(pc.values.iter().cloned()).collect(),
                    }],
                    &svg,
                )?;
                println!("wrote {}", svg.display());
            }
        }
        MetricsCommand::Redness {
            graph,
            pattern,
            format,
        } => {
            let g = Graph::load_csv(&graph)?;
            let basis = SpectralBasis::from_graph(&g)?;
            let s = SamplingPattern::load_json(&pattern)?;
            print_scalar(format, "redness", spectral::redness(&basis, &s)?);
        }
        MetricsCommand::Wavelength { graph, d, format } => {
            let g = Graph::load_csv(&graph)?;
            let gamma = g.geodesic_distances()?;
            print_scalar(format, "lambda_b", metrics::principal_wavelength(&gamma, d)?);
        }
        MetricsCommand::Ks {
            graph,
            pattern,
            format,
        } => {
            let g = Graph::load_csv(&graph)?;
            let s = SamplingPattern::load_json(&pattern)?;
            print_scalar(format, "ks", metrics::uniqueness_constant_ks(&g, s.support())?);
        }
        MetricsCommand::LambdaSet {
            graph,
            pattern,
            format,
        } => {
            let g = Graph::load_csv(&graph)?;
            let l = g.laplacian();
            let s = SamplingPattern::load_json(&pattern)?;
            let on_support = spectral::lambda_set(&l, s.support())?;
            let on_complement = spectral::lambda_set(&l, &s.complement())?;
            match format {
                Format::Csv => println!("{on_support},{on_complement}"),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "lambda_support": on_support,
                        "lambda_complement": on_complement,
                    })
                ),
            }
        }
        MetricsCommand::Partition {
            graph,
            pattern,
            out,
            format,
        } => {
            let g = Graph::load_csv(&graph)?;
            let gamma = g.geodesic_distances()?;
            let s = SamplingPattern::load_json(&pattern)?;
            let partition = metrics::partition_from_pattern(&g, &gamma, &s)?;
            std::fs::write(&out, partition.to_json())?;
            let gap = metrics::lambda_partition(&g, &partition)?;
            match format {
                Format::Csv => println!("{},{}", partition.lambda, gap.value),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "cells": partition.cells.len(),
                        "lambda": partition.lambda,
                        "lambda_partition": gap.value,
                        "degenerate_cells": gap.degenerate_cells,
                    })
                ),
            }
            println!("wrote {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn reconstruct(args: ReconstructArgs) -> anyhow::Result<ExitCode> {
    let g = Graph::load_csv(&args.graph)?;
    let basis = SpectralBasis::from_graph(&g)?;
    let s = SamplingPattern::load_json(&args.pattern)?;
    let x = spectral::signal_from_csv(&std::fs::read_to_string(&args.signal)?)?;
    let mut y = sample_signal(&x, s.support())?;
    if let Some(snr) = args.snr_db {
        y = add_noise(&y, snr, args.seed)?;
    }
    let (x_rec, report) = reconstruct_with_report(&basis, args.k, s.support(), &y, &x)?;
    std::fs::write(&args.out, spectral::signal_to_csv(&x_rec))?;
    println!(
        "{}",
        serde_json::json!({
            "mse": report.mse,
            "relative_error": report.relative_error,
            "sigma_min": report.sigma_min,
            "rank_deficient": report.rank_deficient,
            "out": args.out.display().to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    let table = run_experiment(&config)?;
    let artifacts = write_outputs(&config, &table)?;
    println!("results: {}", artifacts.results_csv.display());
    println!("plot:    {}", artifacts.mse_curve_svg.display());
    for sampler in table.samplers() {
        for m in table.rates() {
            if let Some(mean) = table.mean_mse(&sampler, m) {
                println!("  {sampler:<8} m={m:<5} mean MSE {mean:.6e}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn theory_check(args: TheoryCheckArgs) -> anyhow::Result<ExitCode> {
    let graphs: Vec<(String, Graph)> = if args.graph.is_empty() {
        theory::default_suite_graphs()
    } else {
        args.graph
            .iter()
            .map(|name| theory::named_graph(name).map(|g| (name.clone(), g)))
            .collect::<anyhow::Result<_>>()?
    };
    let total_patterns: usize = args.patterns * graphs.len();
    println!(
        "checking analytic identities on {} graphs x {} patterns ({} total)",
        graphs.len(),
        args.patterns,
        total_patterns
    );
    let reports = theory::full_check(&graphs, args.patterns, args.seed)?;
    let mut all_passed = true;
    for report in &reports {
        println!("{}", report.line());
        all_passed &= report.passed;
    }
    if all_passed {
        println!("all identities verified");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("numeric verification FAILED");
        Ok(ExitCode::from(2))
    }
}
