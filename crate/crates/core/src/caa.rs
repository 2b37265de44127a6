//! Clique Augmentation Algorithm (CAA).
//!
//! Pipeline: enumerate maximal cliques, filter heavily overlapping seeds
//! with the overlapping threshold, then grow each surviving clique into a
//! community under the growing threshold.
//!
//! Growth is round-based: the admission threshold is frozen at the start
//! of each round from the current community size, the whole qualifying
//! batch is added, and rounds repeat until no candidate qualifies. This
//! keeps the result independent of member iteration order.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::cliques::{is_canonical_order, maximal_cliques, Clique};
use crate::graph::{Graph, NodeId};

/// Tuning knobs for [`detect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaaParams {
    /// Growing threshold phi: an external node needs at least
    /// `(|C| - 1) * phi` edges into the community to be admitted.
    pub growing_threshold: f64,
    /// Overlapping threshold omega: a candidate clique is discarded when
    /// it shares more than `omega * min(sizes)` nodes with a retained one.
    pub overlapping_threshold: f64,
    /// Seeds smaller than this are ignored.
    pub min_clique_size: usize,
}

impl Default for CaaParams {
    fn default() -> Self {
        CaaParams {
            growing_threshold: 0.7,
            overlapping_threshold: 0.0,
            min_clique_size: 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum CaaParamError {
    #[error("growing threshold must be in [0, 1], got {0}")]
    GrowingThreshold(f64),
    #[error("overlapping threshold must be in [0, 1], got {0}")]
    OverlappingThreshold(f64),
    #[error("minimum clique size must be at least 2, got {0}")]
    MinCliqueSize(usize),
}

impl CaaParams {
    pub fn validate(&self) -> Result<(), CaaParamError> {
        if !(0.0..=1.0).contains(&self.growing_threshold) {
            return Err(CaaParamError::GrowingThreshold(self.growing_threshold));
        }
        if !(0.0..=1.0).contains(&self.overlapping_threshold) {
            return Err(CaaParamError::OverlappingThreshold(
                self.overlapping_threshold,
            ));
        }
        if self.min_clique_size < 2 {
            return Err(CaaParamError::MinCliqueSize(self.min_clique_size));
        }
        Ok(())
    }
}

/// A detected community: a non-empty node set, with the seed clique it
/// grew from when one exists.
#[derive(Debug, Clone)]
pub struct Community {
    nodes: Vec<NodeId>,
    seed: Option<Clique>,
}

impl Community {
    pub fn new(mut nodes: Vec<NodeId>) -> Self {
        assert!(!nodes.is_empty(), "a community has at least one node");
        nodes.sort_unstable();
        nodes.dedup();
        Community { nodes, seed: None }
    }

    pub fn with_seed(nodes: Vec<NodeId>, seed: Clique) -> Self {
        let mut c = Community::new(nodes);
        debug_assert!(seed.nodes().iter().all(|&v| c.contains(v)));
        c.seed = Some(seed);
        c
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn seed(&self) -> Option<&Clique> {
        self.seed.as_ref()
    }
}

/// A collection of possibly overlapping communities over a graph,
/// together with the per-node membership count O_v.
pub struct Cover {
    communities: Vec<Community>,
    membership: Vec<u32>,
}

impl Cover {
    /// `node_count` is the size of the underlying graph; nodes in no
    /// community keep a membership count of zero.
    pub fn new(node_count: usize, communities: Vec<Community>) -> Self {
        let mut membership = vec![0u32; node_count];
        for c in &communities {
            for &v in c.nodes() {
                membership[v as usize] += 1;
            }
        }
        Cover {
            communities,
            membership,
        }
    }

    pub fn communities(&self) -> &[Community] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    /// Number of communities node `v` belongs to (O_v).
    pub fn membership_count(&self, v: NodeId) -> u32 {
        self.membership[v as usize]
    }

    pub fn membership(&self) -> &[u32] {
        &self.membership
    }

    /// Writes one community per line as space-separated original node ids
    /// (the same layout as SNAP `.cmty` files).
    pub fn write<W: Write>(&self, w: &mut W, g: &Graph) -> io::Result<()> {
        for c in &self.communities {
            let mut first = true;
            for &v in c.nodes() {
                if !first {
                    write!(w, " ")?;
                }
                write!(w, "{}", g.original_id(v))?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Scans cliques in canonical order (size descending) and keeps a clique
/// only if its overlap with every already-retained clique stays within
/// `omega * min(size, retained size)`. Equality is retained, so omega = 1
/// keeps everything and omega = 0 forces pairwise-disjoint seeds.
pub fn filter_overlapping_cliques(cliques: &[Clique], omega: f64) -> Vec<Clique> {
    debug_assert!(is_canonical_order(cliques));
    let mut retained: Vec<Clique> = Vec::new();
    // node -> indices of retained cliques containing it
    let mut containing: HashMap<NodeId, Vec<usize>> = HashMap::new();
    let mut overlap: HashMap<usize, usize> = HashMap::new();

    for clique in cliques {
        overlap.clear();
        for &v in clique.nodes() {
            if let Some(ids) = containing.get(&v) {
                for &i in ids {
                    *overlap.entry(i).or_insert(0) += 1;
                }
            }
        }
        let ok = overlap.iter().all(|(&i, &shared)| {
            let cap = omega * clique.size().min(retained[i].size()) as f64;
            shared as f64 <= cap
        });
        if ok {
            let idx = retained.len();
            for &v in clique.nodes() {
                containing.entry(v).or_default().push(idx);
            }
            retained.push(clique.clone());
        }
    }
    retained
}

/// Grows a seed clique to its fixpoint under the growing threshold.
///
/// Each round: freeze the threshold `(|C| - 1) * phi`, collect every
/// external node whose edge count into the community meets it (admission
/// is `>=`, with the threshold kept as an exact real), admit the whole
/// batch, repeat until the batch is empty.
pub fn grow_community(g: &Graph, seed: &Clique, phi: f64) -> Community {
    let mut members: Vec<NodeId> = seed.nodes().to_vec();
    let mut in_community: HashSet<NodeId> = members.iter().copied().collect();
    // edges from each external candidate into the community
    let mut incoming: HashMap<NodeId, usize> = HashMap::new();
    for &v in &members {
        for &w in g.neighbors(v) {
            if !in_community.contains(&w) {
                *incoming.entry(w).or_insert(0) += 1;
            }
        }
    }

    loop {
        let threshold = (members.len() - 1) as f64 * phi;
        let mut batch: Vec<NodeId> = incoming
            .iter()
            .filter(|&(_, &count)| count as f64 >= threshold)
            .map(|(&u, _)| u)
            .collect();
        if batch.is_empty() {
            break;
        }
        batch.sort_unstable();
        for &u in &batch {
            incoming.remove(&u);
            in_community.insert(u);
        }
        for &u in &batch {
            members.push(u);
            for &w in g.neighbors(u) {
                if !in_community.contains(&w) {
                    *incoming.entry(w).or_insert(0) += 1;
                }
            }
        }
    }

    Community::with_seed(members, seed.clone())
}

/// Grows every seed in parallel, drops communities that converged to an
/// identical node set (keeping the first in seed order), and returns the
/// rest canonically sorted (size descending, then lexicographic).
pub fn grow_all(g: &Graph, seeds: &[Clique], phi: f64) -> Vec<Community> {
    let grown: Vec<Community> = seeds
        .par_iter()
        .map(|seed| grow_community(g, seed, phi))
        .collect();

    let mut seen: HashSet<&[NodeId]> = HashSet::with_capacity(grown.len());
    let mut keep = vec![false; grown.len()];
    for (i, c) in grown.iter().enumerate() {
        if seen.insert(c.nodes()) {
            keep[i] = true;
        }
    }
    let mut unique: Vec<Community> = grown
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    unique.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.nodes().cmp(b.nodes())));
    unique
}

/// Runs the full pipeline: enumerate seeds, filter overlaps, grow each
/// retained clique, and deduplicate communities that converged to the
/// same node set. Panics on invalid parameters; call
/// [`CaaParams::validate`] first for user-supplied values.
pub fn detect(g: &Graph, params: &CaaParams) -> Cover {
    params.validate().expect("invalid CAA parameters");
    let cliques = maximal_cliques(g, params.min_clique_size);
    let seeds = filter_overlapping_cliques(&cliques, params.overlapping_threshold);
    Cover::new(
        g.node_count(),
        grow_all(g, &seeds, params.growing_threshold),
    )
}
