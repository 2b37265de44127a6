//! Aggregated metric reports: per-community rows, per-class summaries,
//! and the global figures, with CSV and JSON emitters.
//!
//! Report schema (bump `SCHEMA_VERSION` on breaking changes):
//! - CSV rows: `community,size,class,tpr,conductance,internal_density,transitivity`
//!   with undefined values left as empty fields;
//! - JSON: the [`MetricReport`] aggregates without the rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::caa::Cover;
use crate::graph::Graph;
use crate::metrics::{self, SizeClass, SizeDistribution};

pub const SCHEMA_VERSION: u32 = 1;

/// Raw metric values for one community.
#[derive(Debug, Clone, Serialize)]
pub struct CommunityRow {
    pub community: usize,
    pub size: usize,
    pub class: SizeClass,
    pub tpr: f64,
    pub conductance: Option<f64>,
    pub internal_density: Option<f64>,
    pub transitivity: Option<f64>,
}

/// Unweighted means over the communities of one size class; undefined
/// rows are excluded from the mean and counted instead.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ClassAggregate {
    pub community_count: usize,
    pub mean_tpr: Option<f64>,
    pub mean_conductance: Option<f64>,
    pub mean_internal_density: Option<f64>,
    pub mean_transitivity: Option<f64>,
    /// This class's share of the extended-modularity sum.
    pub partial_modularity: Option<f64>,
    pub undefined_conductance: usize,
    pub undefined_internal_density: usize,
    pub undefined_transitivity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub schema_version: u32,
    pub node_count: usize,
    pub edge_count: usize,
    pub community_count: usize,
    /// `None` on graphs without edges.
    pub extended_modularity: Option<f64>,
    pub desirable_coverage: f64,
    pub size_distribution: SizeDistribution,
    pub classes: BTreeMap<SizeClass, ClassAggregate>,
    #[serde(skip)]
    pub rows: Vec<CommunityRow>,
}

/// Permutation-invariant mean over the defined values; also returns how
/// many values were undefined.
fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let mut defined: Vec<f64> = Vec::new();
    let mut undefined = 0usize;
    for v in values {
        match v {
            Some(x) => defined.push(x),
            None => undefined += 1,
        }
    }
    if defined.is_empty() {
        return (None, undefined);
    }
    defined.sort_unstable_by(|a, b| a.total_cmp(b));
    let sum: f64 = defined.iter().sum();
    (Some(sum / defined.len() as f64), undefined)
}

/// Computes every per-community metric and aggregates them by size
/// class. Undefined per-community values become row annotations and
/// exclusion counts; the evaluation itself never fails.
pub fn evaluate(g: &Graph, cover: &Cover) -> MetricReport {
    let rows: Vec<CommunityRow> = cover
        .communities()
        .par_iter()
        .enumerate()
        .map(|(i, c)| CommunityRow {
            community: i,
            size: c.len(),
            class: SizeClass::classify(c.len()),
            tpr: metrics::tpr(g, c),
            conductance: metrics::conductance(g, c),
            internal_density: metrics::internal_density(g, c),
            transitivity: metrics::transitivity(g, c),
        })
        .collect();

    let eq = metrics::extended_modularity(g, cover).ok();
    let partials = metrics::partial_modularity_by_class(g, cover).ok();

    let mut classes: BTreeMap<SizeClass, ClassAggregate> = BTreeMap::new();
    for class in SizeClass::ALL {
        let in_class: Vec<&CommunityRow> = rows.iter().filter(|r| r.class == class).collect();
        let (mean_tpr, _) = mean_defined(in_class.iter().map(|r| Some(r.tpr)));
        let (mean_conductance, undefined_conductance) =
            mean_defined(in_class.iter().map(|r| r.conductance));
        let (mean_internal_density, undefined_internal_density) =
            mean_defined(in_class.iter().map(|r| r.internal_density));
        let (mean_transitivity, undefined_transitivity) =
            mean_defined(in_class.iter().map(|r| r.transitivity));
        classes.insert(
            class,
            ClassAggregate {
                community_count: in_class.len(),
                mean_tpr,
                mean_conductance,
                mean_internal_density,
                mean_transitivity,
                partial_modularity: partials.as_ref().map(|p| p[&class]),
                undefined_conductance,
                undefined_internal_density,
                undefined_transitivity,
            },
        );
    }

    MetricReport {
        schema_version: SCHEMA_VERSION,
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        community_count: cover.len(),
        extended_modularity: eq,
        desirable_coverage: metrics::desirable_coverage(g, cover),
        size_distribution: metrics::size_distribution(cover),
        classes,
        rows,
    }
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricReport {
    /// Per-community rows as CSV.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "community,size,class,tpr,conductance,internal_density,transitivity"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.community,
                r.size,
                r.class.name(),
                r.tpr,
                csv_field(r.conductance),
                csv_field(r.internal_density),
                csv_field(r.transitivity),
            )?;
        }
        Ok(())
    }

    /// Aggregates as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Plain-text size-distribution table for stdout.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:<14} {:>12}", "size", "class", "communities");
        for class in SizeClass::ALL {
            let _ = writeln!(
                out,
                "{:<12} {:<14} {:>12}",
                class.range_label(),
                class.name(),
                self.size_distribution.counts[&class]
            );
        }
        let _ = writeln!(
            out,
            "communities: {}   largest: {} ({:.4}% of nodes)",
            self.community_count,
            self.size_distribution.largest_size,
            self.size_distribution.largest_share * 100.0
        );
        let _ = writeln!(
            out,
            "desirable coverage: {:.4}   extended modularity: {}",
            self.desirable_coverage,
            self.extended_modularity
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "undefined (no edges)".to_string())
        );
        out
    }
}
