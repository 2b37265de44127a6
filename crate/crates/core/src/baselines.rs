//! Comparison detectors: Label Propagation, Multilevel (Louvain) and
//! FastGreedy (CNM), plus an import adapter for partitions computed by
//! external tools.
//!
//! All three native algorithms return disjoint partitions; converting to
//! a [`Cover`] gives O_v = 1 everywhere so the overlap-aware metrics
//! reduce to their classic forms.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::caa::{Community, Cover};
use crate::graph::{Graph, NodeId};

/// One community id per node; ids are dense in `0..community_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    community_count: usize,
}

impl Partition {
    /// Densifies arbitrary labels into community ids ordered by first
    /// appearance.
    fn from_labels(labels: &[usize]) -> Self {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = remap.len();
            assignment.push(*remap.entry(l).or_insert(next));
        }
        Partition {
            assignment,
            community_count: remap.len(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    /// Communities as sorted node lists, ordered by community id.
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v as NodeId);
        }
        out
    }

    pub fn to_cover(&self) -> Cover {
        let communities = self.communities().into_iter().map(Community::new).collect();
        Cover::new(self.assignment.len(), communities)
    }
}

pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Outcome of a label-propagation run.
pub struct LabelPropagationResult {
    pub partition: Partition,
    /// False when the sweep cap was hit before every node's label was a
    /// neighborhood-majority label.
    pub converged: bool,
    pub sweeps: usize,
}

/// Asynchronous label propagation. Every node starts with a unique label;
/// each sweep visits the nodes in a fresh seeded random order and adopts
/// the majority label among neighbors, ties broken uniformly at random.
/// Stops once every node's label is among its neighborhood-majority
/// labels, or after `max_sweeps`.
pub fn label_propagation(g: &Graph, seed: u64, max_sweeps: usize) -> LabelPropagationResult {
    let n = g.node_count();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<NodeId> = g.nodes().collect();
    let mut counts: HashMap<usize, usize> = HashMap::new();

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        order.shuffle(&mut rng);
        for &v in &order {
            let neighbors = g.neighbors(v);
            if neighbors.is_empty() {
                continue;
            }
            counts.clear();
            for &w in neighbors {
                *counts.entry(labels[w as usize]).or_insert(0) += 1;
            }
            let best = *counts.values().max().unwrap();
            let mut tied: Vec<usize> = counts
                .iter()
                .filter(|&(_, &c)| c == best)
                .map(|(&l, _)| l)
                .collect();
            tied.sort_unstable();
            labels[v as usize] = tied[rng.random_range(0..tied.len())];
        }

        let stable = g.nodes().all(|v| {
            let neighbors = g.neighbors(v);
            if neighbors.is_empty() {
                return true;
            }
            let mut local: HashMap<usize, usize> = HashMap::new();
            for &w in neighbors {
                *local.entry(labels[w as usize]).or_insert(0) += 1;
            }
            let best = *local.values().max().unwrap();
            local.get(&labels[v as usize]) == Some(&best)
        });
        if stable {
            converged = true;
            break;
        }
    }

    LabelPropagationResult {
        partition: Partition::from_labels(&labels),
        converged,
        sweeps,
    }
}

const MODULARITY_GAIN_EPSILON: f64 = 1e-7;

/// Weighted multigraph for the aggregation levels. Self-loop weight is
/// kept apart from the neighbor map and counts twice toward the degree.
struct LevelGraph {
    adjacency: Vec<HashMap<usize, f64>>,
    self_loops: Vec<f64>,
    degrees: Vec<f64>,
    /// Total edge weight m, each edge counted once.
    total_weight: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Self {
        let n = g.node_count();
        let mut adjacency = vec![HashMap::new(); n];
        for (u, v) in g.edges() {
            adjacency[u as usize].insert(v as usize, 1.0);
            adjacency[v as usize].insert(u as usize, 1.0);
        }
        let degrees: Vec<f64> = (0..n).map(|v| g.degree(v as NodeId) as f64).collect();
        LevelGraph {
            adjacency,
            self_loops: vec![0.0; n],
            degrees,
            total_weight: g.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Q = sum_c [ L_c / m - (k_c / 2m)^2 ]
    fn modularity(&self, node_to_comm: &[usize]) -> f64 {
        let m = self.total_weight;
        if m == 0.0 {
            return 0.0;
        }
        let comm_count = node_to_comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut internal = vec![0.0; comm_count];
        let mut degree = vec![0.0; comm_count];
        for v in 0..self.len() {
            let c = node_to_comm[v];
            degree[c] += self.degrees[v];
            internal[c] += self.self_loops[v];
            for (&w, &weight) in &self.adjacency[v] {
                if node_to_comm[w] == c && v < w {
                    internal[c] += weight;
                }
            }
        }
        (0..comm_count)
            .map(|c| internal[c] / m - (degree[c] / (2.0 * m)).powi(2))
            .sum()
    }

    fn aggregate(&self, node_to_comm: &[usize], comm_count: usize) -> LevelGraph {
        let mut adjacency = vec![HashMap::new(); comm_count];
        let mut self_loops = vec![0.0; comm_count];
        for v in 0..self.len() {
            let cv = node_to_comm[v];
            self_loops[cv] += self.self_loops[v];
            for (&w, &weight) in &self.adjacency[v] {
                if v < w {
                    continue;
                }
                let cw = node_to_comm[w];
                if cv == cw {
                    self_loops[cv] += weight;
                } else {
                    *adjacency[cv].entry(cw).or_insert(0.0) += weight;
                    *adjacency[cw].entry(cv).or_insert(0.0) += weight;
                }
            }
        }
        let degrees: Vec<f64> = (0..comm_count)
            .map(|c| adjacency[c].values().sum::<f64>() + 2.0 * self_loops[c])
            .collect();
        LevelGraph {
            adjacency,
            self_loops,
            degrees,
            total_weight: self.total_weight,
        }
    }
}

/// One pass of local moving. Returns whether any node changed community.
fn louvain_local_moving(lg: &LevelGraph, node_to_comm: &mut [usize], rng: &mut StdRng) -> bool {
    let m = lg.total_weight;
    let n = lg.len();
    let mut comm_degree = vec![0.0; n];
    for v in 0..n {
        comm_degree[node_to_comm[v]] += lg.degrees[v];
    }
    let mut order: Vec<usize> = (0..n).collect();

    let mut moved_any = false;
    // strict positive gains bound the number of passes; the cap is a
    // guard against floating-point livelock
    for _ in 0..100 {
        let mut moves = 0;
        order.shuffle(rng);
        for &v in &order {
            let current = node_to_comm[v];
            let k_v = lg.degrees[v];
            comm_degree[current] -= k_v;

            let mut weight_to: HashMap<usize, f64> = HashMap::new();
            weight_to.insert(current, 0.0);
            for (&w, &weight) in &lg.adjacency[v] {
                *weight_to.entry(node_to_comm[w]).or_insert(0.0) += weight;
            }
            // score(c) = k_{v,c}/m - k_c * k_v / (2 m^2); shared terms in
            // the full gain cancel when comparing candidates
            let score = |c: usize, k_vc: f64| k_vc / m - comm_degree[c] * k_v / (2.0 * m * m);
            let current_score = score(current, weight_to[&current]);

            let mut candidates: Vec<usize> = weight_to.keys().copied().collect();
            candidates.sort_unstable();
            let mut best = current;
            let mut best_score = current_score;
            for c in candidates {
                if c == current {
                    continue;
                }
                let s = score(c, weight_to[&c]);
                if s > best_score {
                    best = c;
                    best_score = s;
                }
            }

            comm_degree[best] += k_v;
            if best != current {
                node_to_comm[v] = best;
                moves += 1;
                moved_any = true;
            }
        }
        if moves == 0 {
            break;
        }
    }
    moved_any
}

fn densify(node_to_comm: &mut [usize]) -> usize {
    let mut remap: HashMap<usize, usize> = HashMap::new();
    for c in node_to_comm.iter_mut() {
        let next = remap.len();
        *c = *remap.entry(*c).or_insert(next);
    }
    remap.len()
}

/// Two-phase Louvain: seeded local moving until no move improves
/// modularity, then graph aggregation; levels repeat until the
/// modularity gain drops below 1e-7.
pub fn louvain(g: &Graph, seed: u64) -> Partition {
    let n = g.node_count();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut lg = LevelGraph::from_graph(g);
    let mut node_to_final: Vec<usize> = (0..n).collect();
    let mut best_q = lg.modularity(&node_to_final);

    loop {
        let mut node_to_comm: Vec<usize> = (0..lg.len()).collect();
        let moved = louvain_local_moving(&lg, &mut node_to_comm, &mut rng);
        if !moved {
            break;
        }
        let comm_count = densify(&mut node_to_comm);
        for c in node_to_final.iter_mut() {
            *c = node_to_comm[*c];
        }
        let q = lg.modularity(&node_to_comm);
        lg = lg.aggregate(&node_to_comm, comm_count);
        if q - best_q < MODULARITY_GAIN_EPSILON {
            break;
        }
        best_q = q;
    }

    Partition::from_labels(&node_to_final)
}

/// Heap entry for CNM agglomeration: largest gain first, then the
/// lowest community-id pair.
#[derive(Debug, PartialEq)]
struct MergeCandidate {
    gain: f64,
    a: usize,
    b: usize,
}

impl Eq for MergeCandidate {}

impl Ord for MergeCandidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// FastGreedy (CNM) agglomeration: start from singletons and repeatedly
/// merge the connected community pair with the largest modularity gain
/// until no merge is strictly positive. Deterministic; stale heap
/// entries are skipped lazily.
pub fn fast_greedy(g: &Graph) -> Partition {
    let n = g.node_count();
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Partition::from_labels(&(0..n).collect::<Vec<_>>());
    }

    // a_i = k_i / 2m; delta-Q between adjacent singletons i, j is
    // 2 * (1/2m - a_i * a_j)
    let mut a: Vec<f64> = (0..n)
        .map(|v| g.degree(v as NodeId) as f64 / (2.0 * m))
        .collect();
    let mut gains: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
    let mut heap = std::collections::BinaryHeap::new();
    for (u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        let dq = 2.0 * (1.0 / (2.0 * m) - a[u] * a[v]);
        gains[u].insert(v, dq);
        gains[v].insert(u, dq);
        heap.push(MergeCandidate {
            gain: dq,
            a: u,
            b: v,
        });
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut active = vec![true; n];
    while let Some(MergeCandidate { gain, a: i, b: j }) = heap.pop() {
        if gain <= 0.0 {
            break;
        }
        if !active[i] || !active[j] || gains[i].get(&j) != Some(&gain) {
            continue; // stale
        }
        // merge j into i; for any third community k:
        //   adjacent to both:   dq' = dq_ik + dq_jk
        //   adjacent to i only: dq' = dq_ik - 2 a_j a_k
        //   adjacent to j only: dq' = dq_jk - 2 a_i a_k
        let neighbors_j: HashMap<usize, f64> = std::mem::take(&mut gains[j]);
        let neighbors_i: Vec<usize> = gains[i].keys().copied().filter(|&k| k != j).collect();
        for (&k, &dq_jk) in &neighbors_j {
            gains[k].remove(&j);
            if k == i {
                continue;
            }
            let new_dq = match gains[i].get(&k) {
                Some(&dq_ik) => dq_ik + dq_jk,
                None => dq_jk - 2.0 * a[i] * a[k],
            };
            gains[i].insert(k, new_dq);
            gains[k].insert(i, new_dq);
            heap.push(MergeCandidate {
                gain: new_dq,
                a: i.min(k),
                b: i.max(k),
            });
        }
        for &k in &neighbors_i {
            if neighbors_j.contains_key(&k) {
                continue; // handled above
            }
            let new_dq = gains[i][&k] - 2.0 * a[j] * a[k];
            gains[i].insert(k, new_dq);
            gains[k].insert(i, new_dq);
            heap.push(MergeCandidate {
                gain: new_dq,
                a: i.min(k),
                b: i.max(k),
            });
        }
        a[i] += a[j];
        active[j] = false;
        parent[j] = i;
    }

    let labels: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    Partition::from_labels(&labels)
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: unparseable node id {token:?}")]
    Parse {
        path: String,
        line: usize,
        token: String,
    },
    #[error("cover file {path} contains no communities")]
    EmptyFile { path: String },
    #[error("cover references {count} node id(s) not in the graph, first of them {sample:?}")]
    UnknownIds { count: usize, sample: Vec<u64> },
}

/// Reads a cover file (one community per line, whitespace-separated
/// original node ids; `#` comments allowed) and resolves ids through the
/// graph's label map. Nodes absent from the file stay uncovered.
pub fn import_cover(path: impl AsRef<Path>, g: &Graph) -> Result<Cover, ImportError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| ImportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut communities: Vec<Community> = Vec::new();
    let mut unknown: HashSet<u64> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| ImportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut members: Vec<NodeId> = Vec::new();
        for token in trimmed.split_whitespace() {
            let id: u64 = token.parse().map_err(|_| ImportError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                token: token.to_string(),
            })?;
            match g.dense_id(id) {
                Some(v) => members.push(v),
                None => {
                    unknown.insert(id);
                }
            }
        }
        if !members.is_empty() {
            communities.push(Community::new(members));
        }
    }

    if !unknown.is_empty() {
        let mut sample: Vec<u64> = unknown.iter().copied().collect();
        sample.sort_unstable();
        let count = sample.len();
        sample.truncate(10);
        return Err(ImportError::UnknownIds { count, sample });
    }
    if communities.is_empty() {
        return Err(ImportError::EmptyFile {
            path: path.display().to_string(),
        });
    }
    Ok(Cover::new(g.node_count(), communities))
}
