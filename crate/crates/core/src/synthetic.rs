//! Seeded synthetic graph generators for benchmarks and smoke tests.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::graph::Graph;

/// Preferential-attachment graph (Barabasi-Albert style) with a
/// power-law-ish degree distribution.
///
/// Starts from a clique on `edges_per_node + 1` nodes; every further node
/// attaches to `edges_per_node` distinct existing nodes sampled
/// proportionally to their current degree. Deterministic for a given
/// `(n, edges_per_node, seed)`.
///
/// Panics if `n < edges_per_node + 1` or `edges_per_node == 0`.
pub fn preferential_attachment(n: usize, edges_per_node: usize, seed: u64) -> Graph {
    assert!(edges_per_node >= 1, "need at least one edge per node");
    assert!(n > edges_per_node, "need at least edges_per_node + 1 nodes");
    let mut rng = StdRng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64)> = Vec::new();
    // one entry per edge endpoint; sampling an index uniformly is
    // sampling a node proportionally to its degree
    let mut endpoints: Vec<u64> = Vec::new();

    let core = edges_per_node + 1;
    for i in 0..core as u64 {
        for j in (i + 1)..core as u64 {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }

    for v in core as u64..n as u64 {
        let mut targets: Vec<u64> = Vec::with_capacity(edges_per_node);
        while targets.len() < edges_per_node {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            endpoints.push(v);
            endpoints.push(t);
        }
    }

    Graph::from_edges(edges).expect("generator always produces edges")
}

/// Planted-partition graph: `groups` blocks of `group_size` nodes, with
/// edge probability `p_in` inside a block and `p_out` across blocks.
/// Deterministic for a given seed.
pub fn planted_partition(
    groups: usize,
    group_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Graph {
    assert!(groups >= 1 && group_size >= 1);
    let mut rng = StdRng::seed_from_u64(seed);
    let n = (groups * group_size) as u64;
    let block = |v: u64| v / group_size as u64;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if rng.random_range(0.0..1.0) < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(edges).expect("planted partition with reasonable p_in is connected enough")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_distribution;

    #[test]
    fn preferential_attachment_is_deterministic_and_simple() {
        let a = preferential_attachment(300, 3, 9);
        let b = preferential_attachment(300, 3, 9);
        assert_eq!(a.node_count(), 300);
        assert_eq!(a.edge_count(), b.edge_count());
        let degree_sum: usize = a.nodes().map(|v| a.degree(v)).sum();
        assert_eq!(degree_sum, 2 * a.edge_count());
        // every new node brings at most edges_per_node edges
        assert!(a.edge_count() <= 3 + 297 * 3);
    }

    #[test]
    fn preferential_attachment_degrees_are_heavy_tailed() {
        let g = preferential_attachment(2000, 3, 4);
        let dist = degree_distribution(&g);
        let top = dist[0].1;
        let median = dist[dist.len() / 2].1;
        assert!(
            top > 10 * median,
            "expected hub degrees, top {top} median {median}"
        );
    }

    #[test]
    fn planted_partition_is_denser_inside_blocks() {
        let g = planted_partition(4, 20, 0.6, 0.02, 11);
        let mut inside = 0usize;
        let mut across = 0usize;
        for (u, v) in g.edges() {
            // block membership is defined on the original ids
            if g.original_id(u) / 20 == g.original_id(v) / 20 {
                inside += 1;
            } else {
                across += 1;
            }
        }
        assert!(inside > 4 * across, "inside {inside} across {across}");
    }
}
