//! Benchmark CLI: ingest graph datasets, run community detectors,
//! evaluate covers, and sweep CAA parameters.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Algorithm, InputFormat, RunSettings};
use commsize::caa::CaaParams;
use config::ConfigOverrides;

/// Environment variable for the default output directory.
const OUT_ENV: &str = "COMMSIZE_OUT";

#[derive(Parser)]
#[command(
    name = "commsize",
    version,
    about = "Community detection and size-stratified quality evaluation on large graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input edge-list file.
    #[arg(long)]
    input: PathBuf,

    /// Input layout: `edges` (undirected) or `directed-edges`
    /// (mutualized on load).
    #[arg(long, value_enum)]
    format: Option<InputFormat>,

    /// Output directory (default: $COMMSIZE_OUT, else the current dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Warn when the loaded node count differs.
    #[arg(long)]
    expect_nodes: Option<usize>,

    /// Warn when the loaded edge count differs.
    #[arg(long)]
    expect_edges: Option<usize>,

    /// Key=value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Detector to run.
    #[arg(long, value_enum)]
    algo: Option<Algorithm>,

    /// CAA growing threshold.
    #[arg(long)]
    phi: Option<f64>,

    /// CAA overlapping threshold.
    #[arg(long)]
    omega: Option<f64>,

    /// Minimum seed clique size.
    #[arg(long)]
    min_clique: Option<usize>,

    /// RNG seed for the stochastic detectors.
    #[arg(long)]
    seed: Option<u64>,

    /// Cover file to evaluate (required with --algo import).
    #[arg(long)]
    cover: Option<PathBuf>,
}

#[derive(Args)]
struct SweepGrowArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Growing thresholds to sweep (repeatable).
    #[arg(long, required = true)]
    phi: Vec<f64>,

    /// Overlapping threshold applied before growing.
    #[arg(long)]
    omega: Option<f64>,

    /// Minimum seed clique size.
    #[arg(long)]
    min_clique: Option<usize>,

    /// Histogram bins, e.g. `3-9,10-150,151-500,501+`.
    #[arg(long)]
    bins: Option<String>,
}

#[derive(Args)]
struct SweepOverlapArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Overlapping thresholds to sweep (repeatable; default 0, 0.1, ..., 1).
    #[arg(long)]
    omega: Vec<f64>,

    /// Minimum clique size to enumerate.
    #[arg(long)]
    min_clique: Option<usize>,

    /// Also write the enumerated cliques to cliques.txt, one per line
    /// as original node ids.
    #[arg(long)]
    dump_cliques: bool,
}

#[derive(Args)]
struct DegreeDistArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ImportEvalArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Cover file to evaluate.
    #[arg(long)]
    cover: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load a graph, run a detector, and write cover + metric reports.
    Run(RunArgs),
    /// Community-size histograms across growing thresholds.
    SweepGrow(SweepGrowArgs),
    /// Retained-clique counts across overlapping thresholds.
    SweepOverlap(SweepOverlapArgs),
    /// Rank/degree distribution CSV for log-log plotting.
    DegreeDist(DegreeDistArgs),
    /// Evaluate an externally computed cover (alias for run --algo import).
    ImportEval(ImportEvalArgs),
}

struct Resolved {
    format: InputFormat,
    out_dir: PathBuf,
    expect_nodes: Option<usize>,
    expect_edges: Option<usize>,
}

fn resolve_common(common: &CommonArgs, overrides: &ConfigOverrides) -> Result<Resolved> {
    let format = overrides
        .resolve(common.format, "format")?
        .unwrap_or(InputFormat::Edges);
    let out_dir = overrides
        .resolve_path(common.out.clone(), "out")
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Some(threads) = overrides.resolve(common.threads, "threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("failed to configure the thread pool")?;
    }
    Ok(Resolved {
        format,
        out_dir,
        expect_nodes: overrides.resolve(common.expect_nodes, "expect-nodes")?,
        expect_edges: overrides.resolve(common.expect_edges, "expect-edges")?,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let overrides = ConfigOverrides::load(args.common.config.as_deref())?;
            let resolved = resolve_common(&args.common, &overrides)?;
            let settings = RunSettings {
                algorithm: overrides
                    .resolve(args.algo, "algo")?
                    .unwrap_or(Algorithm::Caa),
                params: CaaParams {
                    growing_threshold: overrides.resolve(args.phi, "phi")?.unwrap_or(0.7),
                    overlapping_threshold: overrides.resolve(args.omega, "omega")?.unwrap_or(0.0),
                    min_clique_size: overrides
                        .resolve(args.min_clique, "min-clique")?
                        .unwrap_or(3),
                },
                seed: overrides.resolve(args.seed, "seed")?.unwrap_or(1),
                cover_path: overrides.resolve_path(args.cover, "cover"),
            };
            let g = commands::load_graph(
                &args.common.input,
                resolved.format,
                resolved.expect_nodes,
                resolved.expect_edges,
            )?;
            commands::cmd_run(&g, &settings, &resolved.out_dir)
        }
        Command::ImportEval(args) => {
            let overrides = ConfigOverrides::load(args.common.config.as_deref())?;
            let resolved = resolve_common(&args.common, &overrides)?;
            let settings = RunSettings {
                algorithm: Algorithm::Import,
                params: CaaParams::default(),
                seed: 1,
                cover_path: Some(args.cover),
            };
            let g = commands::load_graph(
                &args.common.input,
                resolved.format,
                resolved.expect_nodes,
                resolved.expect_edges,
            )?;
            commands::cmd_run(&g, &settings, &resolved.out_dir)
        }
        Command::SweepGrow(args) => {
            let overrides = ConfigOverrides::load(args.common.config.as_deref())?;
            let resolved = resolve_common(&args.common, &overrides)?;
            let omega = overrides.resolve(args.omega, "omega")?.unwrap_or(0.0);
            let min_clique = overrides
                .resolve(args.min_clique, "min-clique")?
                .unwrap_or(3);
            let bins_spec = overrides
                .resolve(args.bins, "bins")?
                .unwrap_or_else(|| commands::DEFAULT_BINS.to_string());
            let bins = commands::parse_bins(&bins_spec)?;
            let g = commands::load_graph(
                &args.common.input,
                resolved.format,
                resolved.expect_nodes,
                resolved.expect_edges,
            )?;
            commands::cmd_sweep_grow(&g, &args.phi, omega, min_clique, &bins, &resolved.out_dir)
        }
        Command::SweepOverlap(args) => {
            let overrides = ConfigOverrides::load(args.common.config.as_deref())?;
            let resolved = resolve_common(&args.common, &overrides)?;
            let min_clique = overrides
                .resolve(args.min_clique, "min-clique")?
                .unwrap_or(3);
            let omegas = if args.omega.is_empty() {
                (0..=10).map(|i| i as f64 / 10.0).collect()
            } else {
                args.omega.clone()
            };
            let g = commands::load_graph(
                &args.common.input,
                resolved.format,
                resolved.expect_nodes,
                resolved.expect_edges,
            )?;
            commands::cmd_sweep_overlap(
                &g,
                &omegas,
                min_clique,
                args.dump_cliques,
                &resolved.out_dir,
            )
        }
        Command::DegreeDist(args) => {
            let overrides = ConfigOverrides::load(args.common.config.as_deref())?;
            let resolved = resolve_common(&args.common, &overrides)?;
            let g = commands::load_graph(
                &args.common.input,
                resolved.format,
                resolved.expect_nodes,
                resolved.expect_edges,
            )?;
            commands::cmd_degree_dist(&g, &resolved.out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
