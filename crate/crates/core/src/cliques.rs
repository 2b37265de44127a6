//! Maximal clique enumeration.
//!
//! Bron-Kerbosch with pivoting, driven by a degeneracy ordering at the
//! outer level so that million-edge social graphs stay tractable. A
//! brute-force subset oracle (small graphs only) backs the tests.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// A set of pairwise-adjacent nodes, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clique {
    nodes: Vec<NodeId>,
}

impl Clique {
    pub fn new(mut nodes: Vec<NodeId>) -> Self {
        assert!(!nodes.is_empty(), "a clique has at least one node");
        nodes.sort_unstable();
        nodes.dedup();
        Clique { nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// Number of nodes shared with another clique.
    pub fn overlap(&self, other: &Clique) -> usize {
        intersect_count(&self.nodes, &other.nodes)
    }
}

#[derive(Debug, Error)]
pub enum CliqueEnumError {
    #[error("brute-force enumeration refused: graph has {nodes} nodes, limit is {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

/// Sorts size descending, ties broken lexicographically by member ids.
/// This is the canonical order the overlap filter expects.
pub fn canonical_sort(cliques: &mut [Clique]) {
    cliques.sort_unstable_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.nodes.cmp(&b.nodes)));
}

/// True when the slice is already in canonical order.
pub fn is_canonical_order(cliques: &[Clique]) -> bool {
    cliques.windows(2).all(|w| {
        w[0].size() > w[1].size() || (w[0].size() == w[1].size() && w[0].nodes <= w[1].nodes)
    })
}

fn intersect(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersect_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Smallest-last (degeneracy) vertex ordering via a bucket queue,
/// O(n + m). Repeatedly removes a minimum-degree vertex.
fn degeneracy_order(g: &Graph) -> Vec<NodeId> {
    let n = g.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v as NodeId)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<NodeId>> = vec![Vec::new(); max_degree + 1];
    let mut slot = vec![0usize; n];
    for v in 0..n {
        slot[v] = buckets[degree[v]].len();
        buckets[degree[v]].push(v as NodeId);
    }

    let remove_from_bucket =
        |buckets: &mut Vec<Vec<NodeId>>, slot: &mut Vec<usize>, w: usize, d: usize| {
            let moved = *buckets[d].last().unwrap();
            buckets[d].swap_remove(slot[w]);
            if moved as usize != w {
                slot[moved as usize] = slot[w];
            }
        };

    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cursor = 0usize;
    while order.len() < n {
        // min degree drops by at most one per removal
        cursor = cursor.saturating_sub(1);
        while buckets[cursor].is_empty() {
            cursor += 1;
        }
        let v = *buckets[cursor].last().unwrap();
        remove_from_bucket(&mut buckets, &mut slot, v as usize, cursor);
        removed[v as usize] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !removed[w] {
                remove_from_bucket(&mut buckets, &mut slot, w, degree[w]);
                degree[w] -= 1;
                slot[w] = buckets[degree[w]].len();
                buckets[degree[w]].push(w as NodeId);
            }
        }
    }
    order
}

fn bron_kerbosch_pivot(
    g: &Graph,
    current: &mut Vec<NodeId>,
    mut candidates: Vec<NodeId>,
    mut excluded: Vec<NodeId>,
    min_size: usize,
    out: &mut Vec<Clique>,
) {
    if candidates.is_empty() && excluded.is_empty() {
        if current.len() >= min_size {
            out.push(Clique::new(current.clone()));
        }
        return;
    }
    if current.len() + candidates.len() < min_size {
        return;
    }
    // Tomita pivot: maximize |candidates ∩ N(u)| over candidates ∪ excluded
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&u| intersect_count(&candidates, g.neighbors(u)))
        .unwrap();
    let pivot_neighbors = g.neighbors(pivot);
    let branch: Vec<NodeId> = candidates
        .iter()
        .copied()
        .filter(|&v| pivot_neighbors.binary_search(&v).is_err())
        .collect();
    for v in branch {
        let neighbors = g.neighbors(v);
        current.push(v);
        bron_kerbosch_pivot(
            g,
            current,
            intersect(&candidates, neighbors),
            intersect(&excluded, neighbors),
            min_size,
            out,
        );
        current.pop();
        let pos = candidates.binary_search(&v).unwrap();
        candidates.remove(pos);
        let pos = excluded.binary_search(&v).unwrap_err();
        excluded.insert(pos, v);
    }
}

/// Enumerates every maximal clique of size at least `min_size`, each
/// exactly once, in canonical order (size descending, then lexicographic).
///
/// Outer branches run in parallel; the final sort makes the result
/// independent of scheduling.
pub fn maximal_cliques(g: &Graph, min_size: usize) -> Vec<Clique> {
    assert!(min_size >= 1, "min_size must be at least 1");
    let order = degeneracy_order(g);
    let mut position = vec![0usize; g.node_count()];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }

    let mut cliques: Vec<Clique> = order
        .par_iter()
        .map(|&v| {
            let pos = position[v as usize];
            let mut candidates = Vec::new();
            let mut excluded = Vec::new();
            for &w in g.neighbors(v) {
                if position[w as usize] > pos {
                    candidates.push(w);
                } else {
                    excluded.push(w);
                }
            }
            let mut local = Vec::new();
            bron_kerbosch_pivot(g, &mut vec![v], candidates, excluded, min_size, &mut local);
            local
        })
        .flatten()
        .collect();
    canonical_sort(&mut cliques);
    cliques
}

const BRUTE_FORCE_NODE_LIMIT: usize = 20;

/// Exhaustive subset-enumeration oracle. Refuses graphs with more than
/// 20 nodes. Returns the same canonical order as [`maximal_cliques`].
pub fn brute_force_maximal_cliques(g: &Graph) -> Result<Vec<Clique>, CliqueEnumError> {
    let n = g.node_count();
    if n > BRUTE_FORCE_NODE_LIMIT {
        return Err(CliqueEnumError::TooLarge {
            nodes: n,
            limit: BRUTE_FORCE_NODE_LIMIT,
        });
    }
    let adj_mask: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v as NodeId)
                .iter()
                .fold(0u32, |m, &w| m | (1 << w))
        })
        .collect();

    let is_clique = |mask: u32| -> bool {
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj_mask[v] & mask != mask & !(1 << v) {
                return false;
            }
        }
        true
    };

    let mut cliques = Vec::new();
    for mask in 1u32..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let extensible = (0..n).any(|w| mask & (1 << w) == 0 && adj_mask[w] & mask == mask);
        if !extensible {
            let members = (0..n)
                .filter(|&v| mask & (1 << v) != 0)
                .map(|v| v as NodeId)
                .collect();
            cliques.push(Clique::new(members));
        }
    }
    canonical_sort(&mut cliques);
    Ok(cliques)
}

/// Writes one clique per line as space-separated original node ids.
pub fn write_cliques<W: Write>(w: &mut W, g: &Graph, cliques: &[Clique]) -> io::Result<()> {
    for c in cliques {
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
