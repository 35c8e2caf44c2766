//! Divisive, agglomerative and overlapping cyclicality clustering.
//!
//! All comparisons between cyclicalities use a relative slack
//! `eps * max(1, |x|)`. Candidates whose score is within the slack of the
//! best score count as tied, and ties go to the smallest original vertex
//! index (or the lexicographically smallest pair for agglomerative seeds).
//! Candidate scans run in parallel; the reduction is sequential, so results do
//! not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{VertexSet, WeightedDigraph};
use crate::influence::{spectral_cyclicality, InfluenceError};
use crate::spectral::SpectralOptions;

pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("cannot cluster an empty graph")]
    EmptyGraph,
    #[error("eps must be positive and finite, got {0}")]
    InvalidEps(f64),
    #[error("overlapping clustering made no progress in round {round}: cluster {cluster} has no arc to remove")]
    DegenerateLoop { round: usize, cluster: VertexSet },
    #[error(transparent)]
    Influence(#[from] InfluenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMethod {
    Divisive,
    Agglomerative,
}

impl std::fmt::Display for ClusterMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusterMethod::Divisive => "divisive",
            ClusterMethod::Agglomerative => "agglomerative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptions {
    pub eps: f64,
    pub spectral: SpectralOptions,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            eps: DEFAULT_EPS,
            spectral: SpectralOptions::default(),
        }
    }
}

impl ClusterOptions {
    fn slack(&self, x: f64) -> f64 {
        self.eps * x.abs().max(1.0)
    }

    fn validate(&self, g: &WeightedDigraph) -> Result<(), ClusterError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(ClusterError::InvalidEps(self.eps));
        }
        if g.n() == 0 {
            return Err(ClusterError::EmptyGraph);
        }
        Ok(())
    }
}

/// A partition of the vertex set, in extraction order.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub clusters: Vec<VertexSet>,
    pub per_cluster_cyclicality: Vec<f64>,
    /// `true` for clusters of a single vertex.
    pub singleton_flags: Vec<bool>,
    pub method: ClusterMethod,
}

impl Clustering {
    fn new(method: ClusterMethod) -> Self {
        Clustering {
            clusters: Vec::new(),
            per_cluster_cyclicality: Vec::new(),
            singleton_flags: Vec::new(),
            method,
        }
    }

    fn push(&mut self, cluster: VertexSet, cyclicality: f64) {
        self.singleton_flags.push(cluster.len() == 1);
        self.clusters.push(cluster);
        self.per_cluster_cyclicality.push(cyclicality);
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster positions ordered by decreasing cyclicality (stable).
    pub fn order_by_cyclicality(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.per_cluster_cyclicality[b].total_cmp(&self.per_cluster_cyclicality[a])
        });
        order
    }

    /// Position of the cluster containing vertex `v`.
    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(v))
    }
}

/// Possibly overlapping clusters, one per round.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapClustering {
    pub clusters: Vec<VertexSet>,
    /// Cyclicality of each cluster's own subgraph in the round it was extracted.
    pub per_cluster_cyclicality: Vec<f64>,
    /// Cyclicality of the whole graph after the cluster's inner arcs were zeroed.
    pub residual_cyclicality: Vec<f64>,
    /// Marks the last cluster, recorded after the loop condition failed.
    pub terminal: Vec<bool>,
    /// Number of rounds in which the loop condition held.
    pub rounds: usize,
    pub base: ClusterMethod,
}

fn cyclicality_of(
    g: &WeightedDigraph,
    set: &VertexSet,
    opts: &ClusterOptions,
) -> Result<f64, ClusterError> {
    let sub = g.restrict_to(set).map_err(InfluenceError::from)?;
    Ok(spectral_cyclicality(&sub, &opts.spectral)?)
}

/// Index of the first candidate within slack of the maximum score.
fn pick_best(scores: &[f64], opts: &ClusterOptions) -> Option<(usize, f64)> {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = best - opts.slack(best);
    scores
        .iter()
        .position(|&s| s >= floor)
        .map(|k| (k, scores[k]))
}

fn score_all<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Result<f64, ClusterError> + Sync + Send,
) -> Result<Vec<f64>, ClusterError> {
    items.par_iter().map(f).collect()
}

struct DivisiveStep {
    cluster: VertexSet,
    cyclicality: f64,
    removed: VertexSet,
}

/// Deletes vertices from `set` while some deletion does not lower the cyclicality.
fn divisive_extract(
    g: &WeightedDigraph,
    set: &VertexSet,
    opts: &ClusterOptions,
) -> Result<DivisiveStep, ClusterError> {
    let mut current = set.clone();
    let mut removed = Vec::new();
    let mut score = cyclicality_of(g, &current, opts)?;
    while current.len() > 1 {
        let cands: Vec<usize> = current.iter().collect();
        let scores = score_all(&cands, |&i| cyclicality_of(g, &current.without(i), opts))?;
        let Some((k, best)) = pick_best(&scores, opts) else {
            break;
        };
        if best < score - opts.slack(score) {
            break;
        }
        current = current.without(cands[k]);
        removed.push(cands[k]);
        score = best;
    }
    Ok(DivisiveStep {
        cluster: current,
        cyclicality: score,
        removed: VertexSet::new(removed),
    })
}

/// Divisive cyclicality clustering; the deleted vertices are re-clustered on
/// the original weights restricted to them.
pub fn divisive_cluster(
    g: &WeightedDigraph,
    opts: &ClusterOptions,
) -> Result<Clustering, ClusterError> {
    opts.validate(g)?;
    let mut out = Clustering::new(ClusterMethod::Divisive);
    let mut pending = VertexSet::full(g.n());
    while !pending.is_empty() {
        let step = divisive_extract(g, &pending, opts)?;
        out.push(step.cluster, step.cyclicality);
        pending = step.removed;
    }
    Ok(out)
}

enum AgglomerativeStep {
    Cluster(VertexSet, f64),
    /// No pair of remaining vertices has cyclicality above one.
    Split,
}

fn agglomerative_extract(
    g: &WeightedDigraph,
    remaining: &VertexSet,
    opts: &ClusterOptions,
) -> Result<AgglomerativeStep, ClusterError> {
    if remaining.len() == 1 {
        return Ok(AgglomerativeStep::Cluster(remaining.clone(), 1.0));
    }
    let idx = remaining.indices();
    let pairs: Vec<VertexSet> = idx
        .iter()
        .enumerate()
        .flat_map(|(a, &j)| idx[a + 1..].iter().map(move |&k| VertexSet::new([j, k])))
        .collect();
    let scores = score_all(&pairs, |p| cyclicality_of(g, p, opts))?;
    let (k, seed_score) = pick_best(&scores, opts).expect("at least one pair");
    if seed_score <= 1.0 + opts.eps {
        return Ok(AgglomerativeStep::Split);
    }

    let mut cluster = pairs[k].clone();
    let mut score = seed_score;
    loop {
        let cands: Vec<usize> = remaining.iter().filter(|&i| !cluster.contains(i)).collect();
        if cands.is_empty() {
            break;
        }
        let scores = score_all(&cands, |&i| cyclicality_of(g, &cluster.with(i), opts))?;
        let (k, best) = pick_best(&scores, opts).expect("nonempty candidates");
        if best > score + opts.slack(score) {
            cluster = cluster.with(cands[k]);
            score = best;
        } else {
            break;
        }
    }
    Ok(AgglomerativeStep::Cluster(cluster, score))
}

/// Agglomerative cyclicality clustering. When no remaining pair has
/// cyclicality above one, every remaining vertex becomes its own cluster.
pub fn agglomerative_cluster(
    g: &WeightedDigraph,
    opts: &ClusterOptions,
) -> Result<Clustering, ClusterError> {
    opts.validate(g)?;
    let mut out = Clustering::new(ClusterMethod::Agglomerative);
    let mut remaining = VertexSet::full(g.n());
    while !remaining.is_empty() {
        match agglomerative_extract(g, &remaining, opts)? {
            AgglomerativeStep::Cluster(cluster, score) => {
                remaining = VertexSet::new(remaining.iter().filter(|&i| !cluster.contains(i)));
                out.push(cluster, score);
            }
            AgglomerativeStep::Split => {
                for i in remaining.iter() {
                    out.push(VertexSet::singleton(i), 1.0);
                }
                break;
            }
        }
    }
    Ok(out)
}

pub fn cluster(
    g: &WeightedDigraph,
    method: ClusterMethod,
    opts: &ClusterOptions,
) -> Result<Clustering, ClusterError> {
    match method {
        ClusterMethod::Divisive => divisive_cluster(g, opts),
        ClusterMethod::Agglomerative => agglomerative_cluster(g, opts),
    }
}

/// The first cluster the base method would extract, with its cyclicality.
pub fn first_cluster(
    g: &WeightedDigraph,
    base: ClusterMethod,
    opts: &ClusterOptions,
) -> Result<(VertexSet, f64), ClusterError> {
    opts.validate(g)?;
    let all = VertexSet::full(g.n());
    match base {
        ClusterMethod::Divisive => {
            let step = divisive_extract(g, &all, opts)?;
            Ok((step.cluster, step.cyclicality))
        }
        ClusterMethod::Agglomerative => match agglomerative_extract(g, &all, opts)? {
            AgglomerativeStep::Cluster(c, s) => Ok((c, s)),
            AgglomerativeStep::Split => Ok((VertexSet::singleton(0), 1.0)),
        },
    }
}

/// Overlapping clustering: extract a first cluster, zero its inner arcs, and
/// repeat while the zeroed graph keeps cyclicality above one.
pub fn overlapping_cluster(
    g: &WeightedDigraph,
    base: ClusterMethod,
    opts: &ClusterOptions,
) -> Result<OverlapClustering, ClusterError> {
    opts.validate(g)?;
    let mut out = OverlapClustering {
        clusters: Vec::new(),
        per_cluster_cyclicality: Vec::new(),
        residual_cyclicality: Vec::new(),
        terminal: Vec::new(),
        rounds: 0,
        base,
    };
    let mut w = g.clone();
    let (mut current, mut score) = first_cluster(&w, base, opts)?;
    loop {
        let zeroed = w.zero_intra_arcs(&current).map_err(InfluenceError::from)?;
        let residual = spectral_cyclicality(&zeroed, &opts.spectral)?;
        let go_on = residual > 1.0 + opts.eps;
        if go_on && zeroed == w {
            return Err(ClusterError::DegenerateLoop {
                round: out.rounds,
                cluster: current,
            });
        }
        out.clusters.push(current);
        out.per_cluster_cyclicality.push(score);
        out.residual_cyclicality.push(residual);
        out.terminal.push(!go_on);
        if !go_on {
            break;
        }
        out.rounds += 1;
        w = zeroed;
        (current, score) = first_cluster(&w, base, opts)?;
    }
    Ok(out)
}
