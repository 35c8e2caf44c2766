use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::clustering::{
    agglomerative_cluster, divisive_cluster, overlapping_cluster, ClusterError, ClusterMethod,
    ClusterOptions, Clustering, OverlapClustering,
};
use crate::graph::{VertexSet, WeightedDigraph};
use crate::influence::influence_vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub source: Option<String>,
    pub eps: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub members: Vec<String>,
    pub cyclicality: f64,
    /// Single-vertex cluster.
    pub iota: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub members: Vec<String>,
    pub cyclicality: f64,
    pub residual_cyclicality: f64,
    pub terminal: bool,
    pub iota: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub base: ClusterMethod,
    pub rounds: usize,
    pub clusters: Vec<OverlapEntry>,
}

/// Everything computed for one graph. Field order is the JSON field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub metadata: Metadata,
    pub labels: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub radius: f64,
    pub cyclicality: f64,
    pub influence: Vec<f64>,
    pub divisive: Vec<ClusterEntry>,
    pub agglomerative: Vec<ClusterEntry>,
    pub overlapping: Vec<OverlapReport>,
}

/// Which clusterings [`AnalysisReport::build`] runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportContents {
    pub divisive: bool,
    pub agglomerative: bool,
    pub overlapping: Vec<ClusterMethod>,
}

impl ReportContents {
    pub fn influence_only() -> Self {
        Self::default()
    }

    pub fn everything() -> Self {
        ReportContents {
            divisive: true,
            agglomerative: true,
            overlapping: vec![ClusterMethod::Divisive, ClusterMethod::Agglomerative],
        }
    }
}

fn members(g: &WeightedDigraph, s: &VertexSet) -> Vec<String> {
    s.iter().map(|i| g.labels()[i].clone()).collect()
}

fn cluster_entries(g: &WeightedDigraph, c: &Clustering) -> Vec<ClusterEntry> {
    c.clusters
        .iter()
        .zip(&c.per_cluster_cyclicality)
        .zip(&c.singleton_flags)
        .map(|((s, &cyclicality), &iota)| ClusterEntry {
            members: members(g, s),
            cyclicality,
            iota,
        })
        .collect()
}

fn overlap_report(g: &WeightedDigraph, o: &OverlapClustering) -> OverlapReport {
    let clusters = (0..o.clusters.len())
        .map(|k| OverlapEntry {
            members: members(g, &o.clusters[k]),
            cyclicality: o.per_cluster_cyclicality[k],
            residual_cyclicality: o.residual_cyclicality[k],
            terminal: o.terminal[k],
            iota: o.clusters[k].len() == 1,
        })
        .collect();
    OverlapReport {
        base: o.base,
        rounds: o.rounds,
        clusters,
    }
}

impl AnalysisReport {
    pub fn build(
        g: &WeightedDigraph,
        source: Option<String>,
        contents: &ReportContents,
        opts: &ClusterOptions,
    ) -> Result<Self, ClusterError> {
        let influence = influence_vector(g, &opts.spectral)?;
        let mut report = AnalysisReport {
            metadata: Metadata {
                source,
                eps: opts.eps,
                tol: opts.spectral.tol,
            },
            labels: g.labels().to_vec(),
            weights: g.to_rows(),
            radius: influence.base_radius,
            cyclicality: influence.cyclicality,
            influence: influence.per_vertex,
            divisive: Vec::new(),
            agglomerative: Vec::new(),
            overlapping: Vec::new(),
        };
        if contents.divisive {
            report.divisive = cluster_entries(g, &divisive_cluster(g, opts)?);
        }
        if contents.agglomerative {
            report.agglomerative = cluster_entries(g, &agglomerative_cluster(g, opts)?);
        }
        for &base in &contents.overlapping {
            report
                .overlapping
                .push(overlap_report(g, &overlapping_cluster(g, base, opts)?));
        }
        Ok(report)
    }

    /// The embedded graph.
    pub fn graph(&self) -> Result<WeightedDigraph, IngestError> {
        Ok(WeightedDigraph::from_weight_matrix(
            self.labels.clone(),
            self.weights.clone(),
        )?)
    }

    /// Checks that influences and clusters agree with the embedded graph:
    /// lengths match, every member is a known label, and the divisive and
    /// agglomerative clusterings partition the labels.
    pub fn check_consistency(&self) -> Result<(), String> {
        let g = self.graph().map_err(|e| e.to_string())?;
        let n = g.n();
        if self.influence.len() != n {
            return Err(format!(
                "{} influences for {n} vertices",
                self.influence.len()
            ));
        }
        if let Some(v) = self.influence.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(format!("influence {v} outside [0, 1]"));
        }
        if n >= 2 {
            let sum: f64 = self.influence.iter().sum();
            if (sum - self.cyclicality).abs() > 1e-9 * n as f64 {
                return Err(format!(
                    "cyclicality {} but influences sum to {sum}",
                    self.cyclicality
                ));
            }
        }
        let check_members = |m: &[String]| -> Result<Vec<usize>, String> {
            m.iter()
                .map(|l| g.index_of(l).ok_or_else(|| format!("unknown label {l:?}")))
                .collect()
        };
        for (name, entries) in [
            ("divisive", &self.divisive),
            ("agglomerative", &self.agglomerative),
        ] {
            if entries.is_empty() {
                continue;
            }
            let mut seen = vec![false; n];
            for e in entries.iter() {
                if e.members.is_empty() || e.iota != (e.members.len() == 1) {
                    return Err(format!("{name}: bad cluster {:?}", e.members));
                }
                for i in check_members(&e.members)? {
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(format!("{name}: vertex {} in two clusters", g.labels()[i]));
                    }
                }
            }
            if !seen.iter().all(|&s| s) {
                return Err(format!("{name}: clusters do not cover every vertex"));
            }
        }
        for o in &self.overlapping {
            for e in &o.clusters {
                check_members(&e.members)?;
            }
        }
        Ok(())
    }
}

/// Pretty-printed JSON; floats use the shortest representation that parses
/// back to the same `f64` (at most 17 significant digits).
pub fn emit_report_json<W: Write>(report: &AnalysisReport, mut out: W) -> Result<(), IngestError> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn parse_report_json<R: Read>(input: R) -> Result<AnalysisReport, IngestError> {
    Ok(serde_json::from_reader(input)?)
}
