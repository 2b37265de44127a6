//! Graph representation and edge-list ingestion.
//!
//! Graphs are simple and undirected: no self-loops, no parallel edges.
//! Node ids are densified to `0..n` on load for O(1) adjacency access;
//! the original ids are kept in a label map so reports can re-emit them.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

/// Dense node identifier, contiguous in `0..node_count`.
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected two whitespace-separated integer ids, got {content:?}")]
    Parse {
        path: String,
        line: usize,
        content: String,
    },
    #[error("graph has no edges (after dropping self-loops and duplicates)")]
    Empty,
}

/// Counters for what the loader dropped or kept.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Edge lines parsed (comments and blank lines excluded).
    pub lines_parsed: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

/// Simple undirected graph with sorted neighbor lists.
///
/// Immutable after construction; safe to share across threads.
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    /// dense id -> original id
    labels: Vec<u64>,
    /// original id -> dense id
    index: HashMap<u64, NodeId>,
}

impl Graph {
    /// Builds a graph from raw (original-id) edges. Self-loops are dropped,
    /// duplicates deduplicated, and ids densified in first-seen order.
    ///
    /// Errors with [`GraphError::Empty`] if no edge survives cleaning.
    pub fn from_edges<I>(edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let (graph, _) = Self::build(edges);
        if graph.edge_count == 0 {
            return Err(GraphError::Empty);
        }
        Ok(graph)
    }

    /// Core builder. Unlike [`Graph::from_edges`] an edgeless result is
    /// permitted (mutualization can legitimately end up empty).
    pub(crate) fn build<I>(edges: I) -> (Graph, LoadStats)
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut stats = LoadStats::default();
        let mut index: HashMap<u64, NodeId> = HashMap::new();
        let mut labels: Vec<u64> = Vec::new();
        let mut dense_edges: Vec<(NodeId, NodeId)> = Vec::new();

        let intern = |raw: u64, labels: &mut Vec<u64>, index: &mut HashMap<u64, NodeId>| {
            *index.entry(raw).or_insert_with(|| {
                let id = labels.len() as NodeId;
                labels.push(raw);
                id
            })
        };

        for (a, b) in edges {
            stats.lines_parsed += 1;
            let u = intern(a, &mut labels, &mut index);
            let v = intern(b, &mut labels, &mut index);
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            dense_edges.push((u.min(v), u.max(v)));
        }

        dense_edges.sort_unstable();
        let before = dense_edges.len();
        dense_edges.dedup();
        stats.duplicate_edges_dropped = before - dense_edges.len();

        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(u, v) in &dense_edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let graph = Graph {
            adjacency,
            edge_count: dense_edges.len(),
            labels,
            index,
        };
        (graph, stats)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v as usize].len()
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.node_count() as NodeId
    }

    /// Each undirected edge once, as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Original id of a dense node.
    pub fn original_id(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    /// Dense id for an original id, if the node exists.
    pub fn dense_id(&self, original: u64) -> Option<NodeId> {
        self.index.get(&original).copied()
    }
}

/// Raw directed edge list as read from disk; duplicates permitted.
pub struct DirectedEdgeList {
    edges: Vec<(u64, u64)>,
}

/// Counters for [`DirectedEdgeList::mutualize`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutualizeStats {
    /// Distinct directed edges after deduplication.
    pub directed_edges: usize,
    /// Undirected edges kept (both directions present).
    pub mutual_edges: usize,
    /// Nodes present in the input but isolated after the mutual filter.
    pub nodes_dropped: usize,
}

impl DirectedEdgeList {
    pub fn new(edges: Vec<(u64, u64)>) -> Self {
        DirectedEdgeList { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Reduces the directed list to its mutual (reciprocated) undirected
    /// edges and drops the nodes left isolated. The result may be empty;
    /// callers decide whether that warrants a warning.
    ///
    /// Order of operations: dedupe, mutual filter, prune isolates.
    pub fn mutualize(&self) -> (Graph, MutualizeStats) {
        let mut directed: Vec<(u64, u64)> = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != b)
            .collect();
        directed.sort_unstable();
        directed.dedup();

        let seen: std::collections::HashSet<(u64, u64)> = directed.iter().copied().collect();
        let mut mutual: Vec<(u64, u64)> = directed
            .iter()
            .copied()
            .filter(|&(a, b)| a < b && seen.contains(&(b, a)))
            .collect();
        // sorted original-id order keeps dense ids deterministic
        mutual.sort_unstable();

        let mut input_nodes: Vec<u64> = directed.iter().flat_map(|&(a, b)| [a, b]).collect();
        input_nodes.sort_unstable();
        input_nodes.dedup();

        let (graph, _) = Graph::build(mutual);
        let stats = MutualizeStats {
            directed_edges: directed.len(),
            mutual_edges: graph.edge_count(),
            nodes_dropped: input_nodes.len() - graph.node_count(),
        };
        (graph, stats)
    }
}

fn parse_id_pair(
    path: &Path,
    line_no: usize,
    line: &str,
) -> Result<Option<(u64, u64)>, GraphError> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut it = trimmed.split_whitespace();
    let parse_err = || GraphError::Parse {
        path: path.display().to_string(),
        line: line_no,
        content: trimmed.to_string(),
    };
    let a: u64 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(parse_err)?;
    let b: u64 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(parse_err)?;
    if it.next().is_some() {
        return Err(parse_err());
    }
    Ok(Some((a, b)))
}

fn read_pairs(path: &Path) -> Result<Vec<(u64, u64)>, GraphError> {
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if let Some(pair) = parse_id_pair(path, i + 1, &line)? {
            pairs.push(pair);
        }
    }
    Ok(pairs)
}

/// Loads an undirected graph from a SNAP-style edge list: one edge per
/// line, two whitespace-separated integer ids, `#` comment lines ignored.
pub fn load_undirected(path: impl AsRef<Path>) -> Result<(Graph, LoadStats), GraphError> {
    let (graph, stats) = Graph::build(read_pairs(path.as_ref())?);
    if graph.edge_count() == 0 {
        return Err(GraphError::Empty);
    }
    Ok((graph, stats))
}

/// Loads a directed edge list (same file syntax; direction is first -> second).
pub fn load_directed(path: impl AsRef<Path>) -> Result<DirectedEdgeList, GraphError> {
    Ok(DirectedEdgeList::new(read_pairs(path.as_ref())?))
}

/// Degrees sorted descending, paired with 1-based rank. A node with larger
/// degree has lower rank; length equals the node count.
pub fn degree_distribution(g: &Graph) -> Vec<(usize, usize)> {
    let mut degrees: Vec<usize> = g.nodes().map(|v| g.degree(v)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| (i + 1, d))
        .collect()
}
