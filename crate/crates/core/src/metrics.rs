//! Community quality metrics and Dunbar-style size stratification.
//!
//! Fraction-valued metrics that can be undefined for a community
//! (conductance with zero volume, density below two nodes, transitivity
//! with no length-2 paths) return `None`; aggregation excludes those
//! rows from class means and records how many were excluded.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::caa::{Community, Cover};
use crate::graph::{Graph, NodeId};

/// Desirable community size range: large enough to act as a group,
/// within Dunbar's limit of 150.
pub const DESIRABLE_MIN: usize = 4;
pub const DESIRABLE_MAX: usize = 150;

/// Size buckets used throughout the reports. The four named classes
/// partition sizes 4 and up; 1-3 is kept as its own undersized bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    /// 1-3 nodes: too small to act as a community.
    Undersized,
    /// 4-50 nodes.
    CloseFriend,
    /// 51-150 nodes.
    CasualFriend,
    /// 151-500 nodes.
    Acquaintance,
    /// 501+ nodes.
    JustAFace,
}

impl SizeClass {
    pub const ALL: [SizeClass; 5] = [
        SizeClass::Undersized,
        SizeClass::CloseFriend,
        SizeClass::CasualFriend,
        SizeClass::Acquaintance,
        SizeClass::JustAFace,
    ];

    pub fn classify(size: usize) -> SizeClass {
        match size {
            0..=3 => SizeClass::Undersized,
            4..=50 => SizeClass::CloseFriend,
            51..=150 => SizeClass::CasualFriend,
            151..=500 => SizeClass::Acquaintance,
            _ => SizeClass::JustAFace,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SizeClass::Undersized => "undersized",
            SizeClass::CloseFriend => "close_friend",
            SizeClass::CasualFriend => "casual_friend",
            SizeClass::Acquaintance => "acquaintance",
            SizeClass::JustAFace => "just_a_face",
        }
    }

    pub fn range_label(&self) -> &'static str {
        match self {
            SizeClass::Undersized => "1-3",
            SizeClass::CloseFriend => "4-50",
            SizeClass::CasualFriend => "51-150",
            SizeClass::Acquaintance => "151-500",
            SizeClass::JustAFace => "501+",
        }
    }
}

/// The finer six-way social-circle breakdown that the four classes above
/// collapse. Sizes 1-3 fall outside every circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SocialCircle {
    /// 4-5
    SupportClique,
    /// 6-15
    SympathyGroup,
    /// 16-50
    CloseFriend,
    /// 51-150
    CasualFriend,
    /// 151-500
    Acquaintance,
    /// 501+
    JustAFace,
}

impl SocialCircle {
    pub fn classify(size: usize) -> Option<SocialCircle> {
        match size {
            0..=3 => None,
            4..=5 => Some(SocialCircle::SupportClique),
            6..=15 => Some(SocialCircle::SympathyGroup),
            16..=50 => Some(SocialCircle::CloseFriend),
            51..=150 => Some(SocialCircle::CasualFriend),
            151..=500 => Some(SocialCircle::Acquaintance),
            _ => Some(SocialCircle::JustAFace),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("modularity is undefined on a graph with no edges")]
    NoEdges,
}

/// Sums floats in a value-sorted order so the result is independent of
/// community ordering.
fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|a, b| a.total_cmp(b));
    values.iter().sum()
}

/// Per-community inner sums of the overlap-weighted modularity:
/// `sum_{v,w in C} (1/(O_v O_w)) [A_vw - k_v k_w / 2m]` over ordered
/// pairs including v = w (A_vv = 0). Divide by 2m to get the community's
/// share of EQ.
fn community_modularity_term(g: &Graph, membership: &[u32], c: &Community) -> f64 {
    let two_m = 2.0 * g.edge_count() as f64;
    let members: HashSet<NodeId> = c.nodes().iter().copied().collect();
    let mut edge_term = 0.0;
    let mut weighted_degree = 0.0;
    for &v in c.nodes() {
        let o_v = membership[v as usize] as f64;
        weighted_degree += g.degree(v) as f64 / o_v;
        for &w in g.neighbors(v) {
            if members.contains(&w) {
                edge_term += 1.0 / (o_v * membership[w as usize] as f64);
            }
        }
    }
    edge_term - weighted_degree * weighted_degree / two_m
}

/// Overlap-aware extended modularity EQ in [-1, 1]. With a disjoint
/// cover every O_v is 1 and this reduces to classic modularity.
pub fn extended_modularity(g: &Graph, cover: &Cover) -> Result<f64, MetricsError> {
    if g.edge_count() == 0 {
        return Err(MetricsError::NoEdges);
    }
    let mut terms: Vec<f64> = cover
        .communities()
        .iter()
        .map(|c| community_modularity_term(g, cover.membership(), c))
        .collect();
    Ok(stable_sum(&mut terms) / (2.0 * g.edge_count() as f64))
}

/// Splits the EQ sum by the size class of each community. Values over
/// all classes (undersized included) sum to [`extended_modularity`].
pub fn partial_modularity_by_class(
    g: &Graph,
    cover: &Cover,
) -> Result<BTreeMap<SizeClass, f64>, MetricsError> {
    if g.edge_count() == 0 {
        return Err(MetricsError::NoEdges);
    }
    let two_m = 2.0 * g.edge_count() as f64;
    let mut by_class: BTreeMap<SizeClass, Vec<f64>> = BTreeMap::new();
    for c in cover.communities() {
        by_class
            .entry(SizeClass::classify(c.len()))
            .or_default()
            .push(community_modularity_term(g, cover.membership(), c));
    }
    let mut out = BTreeMap::new();
    for class in SizeClass::ALL {
        let term = match by_class.get_mut(&class) {
            Some(values) => stable_sum(values) / two_m,
            None => 0.0,
        };
        out.insert(class, term);
    }
    Ok(out)
}

/// Induced subgraph of a community, with local ids.
struct Induced {
    /// local adjacency, sorted
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

fn induced_subgraph(g: &Graph, c: &Community) -> Induced {
    let nodes = c.nodes();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut edge_count = 0;
    for (i, &v) in nodes.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Ok(j) = nodes.binary_search(&w) {
                adjacency[i].push(j);
                if i < j {
                    edge_count += 1;
                }
            }
        }
    }
    Induced {
        adjacency,
        edge_count,
    }
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
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

/// Triangle participation ratio: the fraction of members that belong to
/// at least one triangle lying entirely inside the community.
pub fn tpr(g: &Graph, c: &Community) -> f64 {
    let k = c.len();
    if k < 3 {
        return 0.0;
    }
    let induced = induced_subgraph(g, c);
    let mut in_triangle = vec![false; k];
    for i in 0..k {
        for &j in &induced.adjacency[i] {
            if j <= i {
                continue;
            }
            if sorted_intersection_count(&induced.adjacency[i], &induced.adjacency[j]) > 0 {
                in_triangle[i] = true;
                in_triangle[j] = true;
                for &l in &induced.adjacency[i] {
                    if induced.adjacency[j].binary_search(&l).is_ok() {
                        in_triangle[l] = true;
                    }
                }
            }
        }
    }
    in_triangle.iter().filter(|&&t| t).count() as f64 / k as f64
}

/// Boundary edges over the summed whole-graph degrees of the members.
/// `None` when the community has zero total degree.
pub fn conductance(g: &Graph, c: &Community) -> Option<f64> {
    let mut cut = 0usize;
    let mut volume = 0usize;
    for &v in c.nodes() {
        volume += g.degree(v);
        cut += g.neighbors(v).iter().filter(|&&w| !c.contains(w)).count();
    }
    if volume == 0 {
        return None;
    }
    Some(cut as f64 / volume as f64)
}

/// Internal edges over all possible member pairs. `None` below two nodes.
pub fn internal_density(g: &Graph, c: &Community) -> Option<f64> {
    let k = c.len();
    if k < 2 {
        return None;
    }
    let induced = induced_subgraph(g, c);
    let possible = k * (k - 1) / 2;
    Some(induced.edge_count as f64 / possible as f64)
}

/// Induced-subgraph transitivity: 3 x triangles over length-2 paths.
/// `None` when the induced subgraph has no length-2 paths.
pub fn transitivity(g: &Graph, c: &Community) -> Option<f64> {
    if c.len() < 3 {
        return None;
    }
    let induced = induced_subgraph(g, c);
    let triads: usize = induced
        .adjacency
        .iter()
        .map(|nbrs| nbrs.len() * nbrs.len().saturating_sub(1) / 2)
        .sum();
    if triads == 0 {
        return None;
    }
    // summing |N(i) ∩ N(j)| over internal edges counts each triangle
    // three times, which is exactly the numerator
    let mut closed = 0usize;
    for i in 0..induced.adjacency.len() {
        for &j in &induced.adjacency[i] {
            if j > i {
                closed += sorted_intersection_count(&induced.adjacency[i], &induced.adjacency[j]);
            }
        }
    }
    Some(closed as f64 / triads as f64)
}

/// Fraction of all graph nodes that belong to at least one community of
/// desirable size (4-150).
pub fn desirable_coverage(g: &Graph, cover: &Cover) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    let mut covered = vec![false; g.node_count()];
    for c in cover.communities() {
        if (DESIRABLE_MIN..=DESIRABLE_MAX).contains(&c.len()) {
            for &v in c.nodes() {
                covered[v as usize] = true;
            }
        }
    }
    covered.iter().filter(|&&x| x).count() as f64 / g.node_count() as f64
}

/// Community counts per size class plus the largest community.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SizeDistribution {
    pub counts: BTreeMap<SizeClass, usize>,
    pub largest_size: usize,
    /// Largest community size over the node count of the graph.
    pub largest_share: f64,
}

pub fn size_distribution(cover: &Cover) -> SizeDistribution {
    let mut counts: BTreeMap<SizeClass, usize> = SizeClass::ALL.iter().map(|&c| (c, 0)).collect();
    let mut largest = 0usize;
    for c in cover.communities() {
        *counts.get_mut(&SizeClass::classify(c.len())).unwrap() += 1;
        largest = largest.max(c.len());
    }
    let share = if cover.node_count() == 0 {
        0.0
    } else {
        largest as f64 / cover.node_count() as f64
    };
    SizeDistribution {
        counts,
        largest_size: largest,
        largest_share: share,
    }
}
