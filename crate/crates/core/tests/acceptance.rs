//! Acceptance suite: one test per criterion, each printing a
//! PASS/FAIL/SKIP line (run with `--nocapture` to see them all).
//!
//! The DBLP-backed criteria (1, 7, 8) need the SNAP files; run
//! `scripts/fetch-dblp.sh` first or point `COMMSIZE_DATA_DIR` at a
//! directory containing `com-dblp.ungraph.txt`,
//! `com-dblp.top5000.cmty.txt` and `com-dblp.all.cmty.txt`. Without
//! them those criteria report SKIP.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use commsize::baselines::{
    fast_greedy, import_cover, label_propagation, louvain, DEFAULT_MAX_SWEEPS,
};
use commsize::caa::{self, CaaParams, Community, Cover};
use commsize::cliques::{brute_force_maximal_cliques, maximal_cliques, Clique};
use commsize::graph::{load_undirected, Graph, NodeId};
use commsize::metrics::{self, SizeClass};
use commsize::synthetic;

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn report(id: &str, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("acceptance criterion {id} ({name}): PASS {detail}"),
        Err(msg) => {
            println!("acceptance criterion {id} ({name}): FAIL - {msg}");
            panic!("acceptance criterion {id} ({name}) failed: {msg}");
        }
    }
}

fn skip(id: &str, name: &str, why: &str) {
    println!("acceptance criterion {id} ({name}): SKIP - {why}");
}

fn data_dir() -> Option<PathBuf> {
    let candidates = [
        std::env::var_os("COMMSIZE_DATA_DIR").map(PathBuf::from),
        Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")),
    ];
    candidates
        .into_iter()
        .flatten()
        .find(|d| d.join("com-dblp.ungraph.txt").is_file())
}

fn random_graph(rng: &mut StdRng, n: u64, p: f64) -> Option<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_range(0.0..1.0) < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(edges).ok()
}

fn complete(ids: &[u64]) -> Vec<(u64, u64)> {
    let mut edges = Vec::new();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            edges.push((ids[i], ids[j]));
        }
    }
    edges
}

fn bridged_k5s() -> Graph {
    let mut edges = complete(&[0, 1, 2, 3, 4]);
    edges.extend(complete(&[5, 6, 7, 8, 9]));
    edges.push((4, 5));
    Graph::from_edges(edges).unwrap()
}

/// Independent classic (Newman) modularity of a disjoint partition.
fn classic_modularity(g: &Graph, assignment: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    let count = assignment.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; count];
    let mut degree = vec![0.0; count];
    for v in g.nodes() {
        degree[assignment[v as usize]] += g.degree(v) as f64;
    }
    for (u, v) in g.edges() {
        if assignment[u as usize] == assignment[v as usize] {
            internal[assignment[u as usize]] += 1.0;
        }
    }
    (0..count)
        .map(|c| internal[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

#[test]
fn criterion_1_dblp_ground_truth_conformance() {
    let id = "1";
    let name = "dblp_ground_truth_conformance";
    let Some(dir) = data_dir() else {
        skip(id, name, "dataset not present; run scripts/fetch-dblp.sh");
        return;
    };
    report(
        id,
        name,
        (|| {
            let started = Instant::now();
            let (g, _) = load_undirected(dir.join("com-dblp.ungraph.txt"))
                .map_err(|e| format!("loading graph: {e}"))?;
            check!(
                g.node_count() == 317_080 && g.edge_count() == 1_049_866,
                "unexpected graph shape: {} nodes, {} edges",
                g.node_count(),
                g.edge_count()
            );

            let conformance = |cover: &Cover| {
                let dist = metrics::size_distribution(cover);
                let desirable =
                    dist.counts[&SizeClass::CloseFriend] + dist.counts[&SizeClass::CasualFriend];
                desirable as f64 / cover.len() as f64
            };

            let top = import_cover(dir.join("com-dblp.top5000.cmty.txt"), &g)
                .map_err(|e| format!("importing top-5000 cover: {e}"))?;
            check!(
                (4950..=5050).contains(&top.len()),
                "top cover has {} communities, expected ~5000",
                top.len()
            );
            let top_conf = conformance(&top);
            check!(
                top_conf >= 0.985,
                "top-5000 conformance {top_conf:.4} < 0.985"
            );

            let all = import_cover(dir.join("com-dblp.all.cmty.txt"), &g)
                .map_err(|e| format!("importing full cover: {e}"))?;
            let all_conf = conformance(&all);
            check!(
                (all_conf - 0.94).abs() <= 0.02,
                "full-cover conformance {all_conf:.4} outside 94% +/- 2%"
            );

            let elapsed = started.elapsed();
            check!(
                elapsed <= Duration::from_secs(60),
                "took {elapsed:.2?}, budget 60s"
            );
            Ok(format!(
                "(top-5000: {:.2}% in 4-150, all {} communities: {:.2}%, {:.2?})",
                top_conf * 100.0,
                all.len(),
                all_conf * 100.0,
                elapsed
            ))
        })(),
    );
}

#[test]
fn criterion_2_extended_modularity_reduces_to_classic() {
    report(
        "2",
        "extended_modularity_reduction",
        (|| {
            let mut rng = StdRng::seed_from_u64(20_240_601);
            let mut worst: f64 = 0.0;
            let mut checked = 0;
            while checked < 50 {
                let n = rng.random_range(2..=30u64);
                let p = rng.random_range(0.1..0.7);
                let Some(g) = random_graph(&mut rng, n, p) else {
                    continue;
                };
                let communities = rng.random_range(1..=g.node_count());
                let assignment: Vec<usize> = (0..g.node_count())
                    .map(|_| rng.random_range(0..communities))
                    .collect();
                let mut groups: Vec<Vec<NodeId>> = vec![Vec::new(); communities];
                for (v, &c) in assignment.iter().enumerate() {
                    groups[c].push(v as NodeId);
                }
                let cover = Cover::new(
                    g.node_count(),
                    groups
                        .into_iter()
                        .filter(|gr| !gr.is_empty())
                        .map(Community::new)
                        .collect(),
                );
                let eq = metrics::extended_modularity(&g, &cover)
                    .map_err(|e| format!("unexpected: {e}"))?;
                let classic = classic_modularity(&g, &assignment);
                let diff = (eq - classic).abs();
                worst = worst.max(diff);
                check!(
                    diff <= 1e-12,
                    "graph {checked}: |EQ - classic| = {diff:.3e} > 1e-12"
                );
                checked += 1;
            }
            Ok(format!("(50 graphs, worst |EQ - classic| = {worst:.3e})"))
        })(),
    );
}

#[test]
fn criterion_3_clique_enumeration_matches_oracle() {
    report(
        "3",
        "clique_oracle_equivalence",
        (|| {
            let started = Instant::now();
            let mut rng = StdRng::seed_from_u64(3);
            let mut checked = 0;
            while checked < 100 {
                let n = rng.random_range(2..=12u64);
                let p = rng.random_range(0.15..0.85);
                let Some(g) = random_graph(&mut rng, n, p) else {
                    continue;
                };
                let fast = maximal_cliques(&g, 1);
                let brute = brute_force_maximal_cliques(&g).unwrap();
                check!(
                    fast == brute,
                    "graph {checked} (n={n}): {} fast vs {} brute cliques",
                    fast.len(),
                    brute.len()
                );
                checked += 1;
            }
            let elapsed = started.elapsed();
            check!(
                elapsed <= Duration::from_secs(10),
                "took {elapsed:.2?}, budget 10s"
            );
            Ok(format!("(100 graphs, {elapsed:.2?})"))
        })(),
    );
}

#[test]
fn criterion_4_caa_worked_examples() {
    report(
        "4",
        "caa_worked_examples",
        (|| {
            // overlap: sizes 10 and 5 at omega 0.7; 2 shared keeps both,
            // 4 shared discards the smaller
            let big = Clique::new((0..10).collect());
            let keepable = Clique::new(vec![8, 9, 10, 11, 12]);
            let kept = caa::filter_overlapping_cliques(&[big.clone(), keepable], 0.7);
            check!(
                kept.len() == 2,
                "overlap 2 of 5: expected both kept, got {}",
                kept.len()
            );

            let discards = Clique::new(vec![6, 7, 8, 9, 10]);
            let kept = caa::filter_overlapping_cliques(&[big.clone(), discards], 0.7);
            check!(
                kept.len() == 1,
                "overlap 4 of 5: expected discard, got {}",
                kept.len()
            );
            check!(kept[0] == big, "the larger clique must survive");

            // growth: |C| = 10 at phi 0.7 -> threshold 6.3; 7 incoming edges
            // admit, 6 reject
            let members: Vec<u64> = (0..10).collect();
            let mut edges = complete(&members);
            for m in 0..7 {
                edges.push((100, m));
            }
            for m in 0..6 {
                edges.push((200, m));
            }
            let g = Graph::from_edges(edges).unwrap();
            let seed = Clique::new((0..10).map(|i| g.dense_id(i).unwrap()).collect());
            let grown = caa::grow_community(&g, &seed, 0.7);
            check!(
                grown.contains(g.dense_id(100).unwrap()),
                "node with 7 incoming edges must be admitted"
            );
            check!(
                !grown.contains(g.dense_id(200).unwrap()),
                "node with 6 incoming edges must be rejected"
            );
            Ok(String::new())
        })(),
    );
}

#[test]
fn criterion_5_metric_fixed_points() {
    report(
        "5",
        "metric_fixed_points",
        (|| {
            for k in 3..=8u64 {
                // a k-clique with a sparse halo so the clique is not the
                // whole graph
                let ids: Vec<u64> = (0..k).collect();
                let mut edges = complete(&ids);
                edges.push((0, k));
                edges.push((1, k + 1));
                let g = Graph::from_edges(edges).unwrap();
                let clique_comm = Community::new((0..k).map(|i| g.dense_id(i).unwrap()).collect());
                check!(
                    metrics::tpr(&g, &clique_comm) == 1.0,
                    "k={k}: TPR of a clique must be exactly 1.0"
                );
                check!(
                    metrics::internal_density(&g, &clique_comm) == Some(1.0),
                    "k={k}: internal density of a clique must be exactly 1.0"
                );
                check!(
                    metrics::transitivity(&g, &clique_comm) == Some(1.0),
                    "k={k}: transitivity of a clique must be exactly 1.0"
                );

                let everyone = Community::new(g.nodes().collect());
                check!(
                    metrics::conductance(&g, &everyone) == Some(0.0),
                    "k={k}: conductance of the all-nodes community must be exactly 0.0"
                );
            }
            Ok("(cliques k=3..8, exact equality)".to_string())
        })(),
    );
}

/// Visits every set partition of n elements (restricted-growth strings).
fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn recurse(labels: &mut Vec<usize>, used: usize, n: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for c in 0..=used {
            labels.push(c);
            recurse(labels, used.max(c + 1), n, f);
            labels.pop();
        }
    }
    recurse(&mut Vec::with_capacity(n), 0, n, f);
}

fn recovers_the_two_cliques(groups: &mut Vec<Vec<NodeId>>) -> bool {
    groups.sort();
    *groups == vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]
}

#[test]
fn criterion_6_baseline_sanity_louvain_fastgreedy_and_optimum() {
    report(
        "6a",
        "baseline_sanity_optimizers",
        (|| {
            let g = bridged_k5s();

            // the two cliques are the unique global modularity optimum over
            // all 115,975 partitions of the ten nodes
            let two_cliques = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
            let best_q = classic_modularity(&g, &two_cliques);
            let mut ties = 0usize;
            let mut beaten = false;
            for_each_partition(10, &mut |labels| {
                let q = classic_modularity(&g, labels);
                if q > best_q + 1e-12 {
                    beaten = true;
                } else if (q - best_q).abs() <= 1e-12 {
                    ties += 1;
                }
            });
            check!(!beaten, "a partition beats the two-clique split");
            check!(ties == 1, "optimum is not unique: {ties} partitions tie");

            for seed in 0..100u64 {
                let mut groups = louvain(&g, seed).communities();
                check!(
                    recovers_the_two_cliques(&mut groups),
                    "louvain seed {seed} returned {groups:?}"
                );
            }
            let mut groups = fast_greedy(&g).communities();
            check!(
                recovers_the_two_cliques(&mut groups),
                "fast_greedy returned {groups:?}"
            );
            Ok(
                "(brute force over 115,975 partitions; louvain 100/100 seeds; fast_greedy)"
                    .to_string(),
            )
        })(),
    );
}

// KNOWN RED: asynchronous label propagation with uniformly random tie
// breaking merges the two bridged K5s for ~1.3% of seeds (measured
// 13/1000 under this rng stream; an independent simulation of the same
// update rule reproduces the rate). In sweep 1 every neighbor label is
// distinct, so the bridge endpoint adopts the far side's label with
// probability ~1/5, and that label can flood both cliques; the merged
// state satisfies the convergence predicate and is absorbing. No
// faithful variant of the update rule avoids this, so requiring all 100
// seeds to recover the cliques cannot hold; the check is kept as stated
// rather than weakened.
#[test]
fn criterion_6_baseline_sanity_label_propagation_all_seeds() {
    report(
        "6b",
        "baseline_sanity_label_propagation",
        (|| {
            let g = bridged_k5s();
            let mut failing: Vec<u64> = Vec::new();
            for seed in 0..100u64 {
                let result = label_propagation(&g, seed, DEFAULT_MAX_SWEEPS);
                let mut groups = result.partition.communities();
                if !recovers_the_two_cliques(&mut groups) {
                    failing.push(seed);
                }
            }
            check!(
                failing.is_empty(),
                "label propagation merged the bridged cliques for seed(s) {failing:?}; \
             asynchronous label propagation with uniform tie-breaking cannot guarantee \
             recovery for every seed (see comment above this test)"
            );
            Ok("(label propagation 100/100 seeds)".to_string())
        })(),
    );
}

#[test]
fn criterion_7_overlap_sweep_monotonicity() {
    let id = "7";
    let name = "sweep_monotonicity";
    let Some(dir) = data_dir() else {
        skip(id, name, "dataset not present; run scripts/fetch-dblp.sh");
        return;
    };
    report(
        id,
        name,
        (|| {
            let (g, _) = load_undirected(dir.join("com-dblp.ungraph.txt"))
                .map_err(|e| format!("loading graph: {e}"))?;
            // cliques of size > 15
            let cliques = maximal_cliques(&g, 16);
            check!(!cliques.is_empty(), "no cliques of size > 15 found");
            let mut previous = 0usize;
            let mut counts = Vec::new();
            for i in 0..=10 {
                let omega = i as f64 / 10.0;
                let retained = caa::filter_overlapping_cliques(&cliques, omega).len();
                check!(
                    retained >= previous,
                    "retained count dropped from {previous} to {retained} at omega {omega}"
                );
                previous = retained;
                counts.push(retained);
            }
            check!(
                *counts.last().unwrap() == cliques.len(),
                "omega = 1 retained {} of {} cliques",
                counts.last().unwrap(),
                cliques.len()
            );
            Ok(format!(
                "({} cliques of size > 15, retained {:?})",
                cliques.len(),
                counts
            ))
        })(),
    );
}

#[test]
fn criterion_8_caa_scales_to_full_dblp() {
    let id = "8";
    let name = "scale_check";
    let Some(dir) = data_dir() else {
        skip(id, name, "dataset not present; run scripts/fetch-dblp.sh");
        return;
    };
    report(
        id,
        name,
        (|| {
            let started = Instant::now();
            let (g, _) = load_undirected(dir.join("com-dblp.ungraph.txt"))
                .map_err(|e| format!("loading graph: {e}"))?;
            let cover = caa::detect(&g, &CaaParams::default());
            let elapsed = started.elapsed();
            check!(
                elapsed <= Duration::from_secs(30 * 60),
                "took {elapsed:.2?}, budget 30 minutes"
            );
            check!(!cover.is_empty(), "empty cover on DBLP");

            let mut file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
            cover.write(&mut file, &g).map_err(|e| e.to_string())?;

            let dist = metrics::size_distribution(&cover);
            check!(
                dist.largest_share <= 0.05,
                "largest community holds {:.3}% of nodes, cap is 5%",
                dist.largest_share * 100.0
            );
            Ok(format!(
                "({} communities, largest {} nodes = {:.3}%, {:.2?})",
                cover.len(),
                dist.largest_size,
                dist.largest_share * 100.0,
                elapsed
            ))
        })(),
    );
}

#[test]
fn criterion_9_synthetic_power_law_smoke() {
    report(
        "9",
        "synthetic_power_law_smoke",
        (|| {
            let g = synthetic::preferential_attachment(20_000, 3, 424_242);
            let degree_sum: usize = g.nodes().map(|v| g.degree(v)).sum();
            check!(
                degree_sum == 2 * g.edge_count(),
                "degree sum invariant broken"
            );

            let params = CaaParams::default();
            let cover = caa::detect(&g, &params);
            let total_membership: u64 = cover.membership().iter().map(|&o| o as u64).sum();
            let total_sizes: usize = cover.communities().iter().map(|c| c.len()).sum();
            check!(
                total_membership as usize == total_sizes,
                "membership counts inconsistent"
            );
            for c in cover.communities() {
                check!(c.len() >= params.min_clique_size, "undersized community");
                let seed = c.seed().ok_or("missing seed provenance")?;
                check!(
                    seed.nodes().iter().all(|&v| c.contains(v)),
                    "community lost part of its seed"
                );
            }

            let report = commsize::report::evaluate(&g, &cover);
            if let Some(eq) = report.extended_modularity {
                check!((-1.0..=1.0).contains(&eq), "EQ {eq} out of range");
            }
            check!(
                (0.0..=1.0).contains(&report.desirable_coverage),
                "coverage out of range"
            );
            for row in &report.rows {
                check!((0.0..=1.0).contains(&row.tpr), "tpr out of range");
                for v in [row.conductance, row.internal_density, row.transitivity]
                    .into_iter()
                    .flatten()
                {
                    check!((0.0..=1.0).contains(&v), "metric out of range");
                }
            }

            // a clustered synthetic graph exercises the same pipeline with
            // real community structure
            let pp = synthetic::planted_partition(30, 12, 0.55, 0.01, 7);
            let pp_cover = caa::detect(&pp, &params);
            check!(!pp_cover.is_empty(), "no communities on the planted graph");
            let pp_report = commsize::report::evaluate(&pp, &pp_cover);
            check!(
                pp_report.extended_modularity.is_some(),
                "EQ undefined on the planted graph"
            );
            Ok(format!(
                "(pa graph: {} nodes, {} communities; planted graph: {} communities)",
                g.node_count(),
                cover.len(),
                pp_cover.len()
            ))
        })(),
    );
}
