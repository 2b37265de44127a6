//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use commsize::baselines::{self, DEFAULT_MAX_SWEEPS};
use commsize::caa::{self, CaaParams, Cover};
use commsize::cliques;
use commsize::graph::{self, Graph};
use commsize::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// Undirected edge list, one `u v` pair per line.
    Edges,
    /// Directed edge list; reduced to mutual edges on load.
    DirectedEdges,
}

impl std::str::FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" => Ok(InputFormat::Edges),
            "directed-edges" => Ok(InputFormat::DirectedEdges),
            other => Err(format!("unknown format {other:?} (edges|directed-edges)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Caa,
    LabelProp,
    Louvain,
    FastGreedy,
    /// Evaluate an externally computed cover file (requires --cover).
    Import,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Caa => "caa",
            Algorithm::LabelProp => "label-prop",
            Algorithm::Louvain => "louvain",
            Algorithm::FastGreedy => "fast-greedy",
            Algorithm::Import => "import",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "caa" => Ok(Algorithm::Caa),
            "label-prop" => Ok(Algorithm::LabelProp),
            "louvain" => Ok(Algorithm::Louvain),
            "fast-greedy" => Ok(Algorithm::FastGreedy),
            "import" => Ok(Algorithm::Import),
            other => Err(format!(
                "unknown algorithm {other:?} (caa|label-prop|louvain|fast-greedy|import)"
            )),
        }
    }
}

pub fn load_graph(
    input: &Path,
    format: InputFormat,
    expect_nodes: Option<usize>,
    expect_edges: Option<usize>,
) -> Result<Graph> {
    let g = match format {
        InputFormat::Edges => {
            let (g, stats) = graph::load_undirected(input)
                .with_context(|| format!("loading {}", input.display()))?;
            if stats.self_loops_dropped > 0 || stats.duplicate_edges_dropped > 0 {
                eprintln!(
                    "warning: dropped {} self-loop(s) and {} duplicate edge(s)",
                    stats.self_loops_dropped, stats.duplicate_edges_dropped
                );
            }
            g
        }
        InputFormat::DirectedEdges => {
            let directed = graph::load_directed(input)
                .with_context(|| format!("loading {}", input.display()))?;
            let (g, stats) = directed.mutualize();
            eprintln!(
                "mutualized {} directed edge(s) into {} mutual edge(s); {} node(s) dropped",
                stats.directed_edges, stats.mutual_edges, stats.nodes_dropped
            );
            if g.edge_count() == 0 {
                eprintln!("warning: no mutual edges; the graph is empty");
            }
            g
        }
    };
    if let Some(expected) = expect_nodes {
        if g.node_count() != expected {
            eprintln!(
                "warning: expected {} nodes, loaded {}",
                expected,
                g.node_count()
            );
        }
    }
    if let Some(expected) = expect_edges {
        if g.edge_count() != expected {
            eprintln!(
                "warning: expected {} edges, loaded {}",
                expected,
                g.edge_count()
            );
        }
    }
    println!("graph: {} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(g)
}

pub struct RunSettings {
    pub algorithm: Algorithm,
    pub params: CaaParams,
    pub seed: u64,
    pub cover_path: Option<PathBuf>,
}

fn run_algorithm(g: &Graph, settings: &RunSettings) -> Result<Cover> {
    match settings.algorithm {
        Algorithm::Caa => {
            settings.params.validate()?;
            Ok(caa::detect(g, &settings.params))
        }
        Algorithm::LabelProp => {
            let result = baselines::label_propagation(g, settings.seed, DEFAULT_MAX_SWEEPS);
            if !result.converged {
                eprintln!(
                    "warning: label propagation hit the sweep cap ({}) before converging",
                    result.sweeps
                );
            }
            Ok(result.partition.to_cover())
        }
        Algorithm::Louvain => Ok(baselines::louvain(g, settings.seed).to_cover()),
        Algorithm::FastGreedy => Ok(baselines::fast_greedy(g).to_cover()),
        Algorithm::Import => {
            let path = settings
                .cover_path
                .as_ref()
                .context("--cover is required when the algorithm is `import`")?;
            Ok(baselines::import_cover(path, g)?)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("failed to create {}", path.display())
    })?))
}

pub fn cmd_run(g: &Graph, settings: &RunSettings, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("failed to create {}", out_dir.display()))?;
    let label = settings.algorithm.label();

    let started = Instant::now();
    let cover = run_algorithm(g, settings)?;
    println!(
        "{label}: {} communities in {:.2?}",
        cover.len(),
        started.elapsed()
    );

    let report = report::evaluate(g, &cover);

    let cover_path = out_dir.join(format!("{label}.cover.txt"));
    let mut w = create(&cover_path)?;
    cover.write(&mut w, g)?;
    w.flush()?;

    let csv_path = out_dir.join(format!("{label}.communities.csv"));
    let mut w = create(&csv_path)?;
    report.write_csv(&mut w)?;
    w.flush()?;

    let json_path = out_dir.join(format!("{label}.report.json"));
    let mut w = create(&json_path)?;
    w.write_all(report.to_json().as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;

    print!("{}", report.render_table());
    println!(
        "wrote {}, {}, {}",
        cover_path.display(),
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeBin {
    low: usize,
    high: Option<usize>,
}

impl SizeBin {
    fn contains(&self, size: usize) -> bool {
        size >= self.low && self.high.is_none_or(|h| size <= h)
    }

    fn label(&self) -> String {
        match self.high {
            Some(h) => format!("{}-{}", self.low, h),
            None => format!("{}+", self.low),
        }
    }
}

pub const DEFAULT_BINS: &str = "3-9,10-150,151-500,501+";

pub fn parse_bins(spec: &str) -> Result<Vec<SizeBin>> {
    let mut bins = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let bin = if let Some(low) = part.strip_suffix('+') {
            SizeBin {
                low: low.parse().with_context(|| format!("bad bin {part:?}"))?,
                high: None,
            }
        } else if let Some((low, high)) = part.split_once('-') {
            SizeBin {
                low: low.parse().with_context(|| format!("bad bin {part:?}"))?,
                high: Some(high.parse().with_context(|| format!("bad bin {part:?}"))?),
            }
        } else {
            bail!("bad bin {part:?}: expected `low-high` or `low+`");
        };
        if bin.high.is_some_and(|h| h < bin.low) {
            bail!("bad bin {part:?}: empty range");
        }
        bins.push(bin);
    }
    if bins.is_empty() {
        bail!("no bins given");
    }
    Ok(bins)
}

pub fn cmd_sweep_grow(
    g: &Graph,
    phis: &[f64],
    omega: f64,
    min_clique: usize,
    bins: &[SizeBin],
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let all = cliques::maximal_cliques(g, min_clique);
    let seeds = caa::filter_overlapping_cliques(&all, omega);
    println!(
        "{} maximal cliques (size >= {}), {} retained at omega {} in {:.2?}",
        all.len(),
        min_clique,
        seeds.len(),
        omega,
        started.elapsed()
    );

    let csv_path = out_dir.join("sweep-grow.csv");
    let mut csv = create(&csv_path)?;
    writeln!(csv, "phi,bin,count")?;

    let labels: Vec<String> = bins.iter().map(|b| b.label()).collect();
    print!("{:<8}", "phi");
    for l in &labels {
        print!(" {l:>10}");
    }
    println!(" {:>10} {:>10}", "other", "mean_size");

    for &phi in phis {
        let communities = caa::grow_all(g, &seeds, phi);
        let mut counts = vec![0usize; bins.len()];
        let mut other = 0usize;
        let mut total_size = 0usize;
        for c in &communities {
            total_size += c.len();
            match bins.iter().position(|b| b.contains(c.len())) {
                Some(i) => counts[i] += 1,
                None => other += 1,
            }
        }
        let mean = if communities.is_empty() {
            0.0
        } else {
            total_size as f64 / communities.len() as f64
        };
        print!("{phi:<8}");
        for &c in &counts {
            print!(" {c:>10}");
        }
        println!(" {other:>10} {mean:>10.2}");
        for (label, &count) in labels.iter().zip(&counts) {
            writeln!(csv, "{phi},{label},{count}")?;
        }
        if other > 0 {
            writeln!(csv, "{phi},other,{other}")?;
        }
    }
    csv.flush()?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

pub fn cmd_sweep_overlap(
    g: &Graph,
    omegas: &[f64],
    min_clique: usize,
    dump_cliques: bool,
    out_dir: &Path,
) -> Result<()> {
    for &omega in omegas {
        if !(0.0..=1.0).contains(&omega) {
            bail!("overlapping threshold {omega} is outside [0, 1]");
        }
    }
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let all = cliques::maximal_cliques(g, min_clique);
    println!(
        "{} maximal cliques of size >= {} in {:.2?}",
        all.len(),
        min_clique,
        started.elapsed()
    );
    if dump_cliques {
        let path = out_dir.join("cliques.txt");
        let mut w = create(&path)?;
        cliques::write_cliques(&mut w, g, &all)?;
        w.flush()?;
        println!("wrote {}", path.display());
    }

    let csv_path = out_dir.join("sweep-overlap.csv");
    let mut csv = create(&csv_path)?;
    writeln!(csv, "omega,retained")?;
    println!("{:<8} {:>10}", "omega", "retained");
    for &omega in omegas {
        let retained = caa::filter_overlapping_cliques(&all, omega).len();
        println!("{omega:<8} {retained:>10}");
        writeln!(csv, "{omega},{retained}")?;
    }
    csv.flush()?;
    println!("total maximal cliques: {}", all.len());
    println!("wrote {}", csv_path.display());
    Ok(())
}

pub fn cmd_degree_dist(g: &Graph, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    if g.node_count() == 0 {
        eprintln!("warning: empty graph, writing an empty distribution");
    }
    let dist = graph::degree_distribution(g);
    let csv_path = out_dir.join("degree-dist.csv");
    let mut csv = create(&csv_path)?;
    writeln!(csv, "rank,degree")?;
    for (rank, degree) in &dist {
        writeln!(csv, "{rank},{degree}")?;
    }
    csv.flush()?;
    if let Some((_, top)) = dist.first() {
        println!("max degree {top}, {} nodes", dist.len());
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}
