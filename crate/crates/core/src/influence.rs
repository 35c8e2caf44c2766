//! Spectral influence of vertex subsets and spectral cyclicality of a graph.
//!
//! `influence(S) = (ρ(W) - ρ(W(S))) / ρ(W)`, and the cyclicality is the sum
//! of single-vertex influences. Conventions at the boundary:
//!
//! * `ρ(W) = 0` (no cycle and no loop): every influence is 0.
//! * deleting every vertex leaves the empty graph, whose radius is 0.
//! * the empty graph has cyclicality 0; a one-vertex graph has cyclicality 1
//!   whatever its loop weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, VertexSet, WeightedDigraph};
use crate::spectral::{spectral_radius, SpectralError, SpectralOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InfluenceError {
    #[error("influence of the empty subset is undefined")]
    EmptySubset,
    #[error("no non-additivity witness found in {trials} trials")]
    NotFound { trials: usize },
    #[error("witness search needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    /// Influence of each single vertex, indexed like the graph.
    pub per_vertex: Vec<f64>,
    pub cyclicality: f64,
    pub base_radius: f64,
}

fn radius(g: &WeightedDigraph, opts: &SpectralOptions) -> Result<f64, InfluenceError> {
    Ok(spectral_radius(g, opts)?.radius)
}

fn relative_drop(base: f64, reduced: f64) -> f64 {
    if base <= 0.0 {
        0.0
    } else {
        ((base - reduced) / base).clamp(0.0, 1.0)
    }
}

/// Spectral influence of a nonempty subset.
pub fn influence_of_subset(
    g: &WeightedDigraph,
    s: &VertexSet,
    opts: &SpectralOptions,
) -> Result<f64, InfluenceError> {
    if s.is_empty() {
        return Err(InfluenceError::EmptySubset);
    }
    let reduced = g.delete_vertices(s)?;
    let base = radius(g, opts)?;
    if base == 0.0 {
        return Ok(0.0);
    }
    Ok(relative_drop(base, radius(&reduced, opts)?))
}

fn single_vertex_influences(
    g: &WeightedDigraph,
    base: f64,
    opts: &SpectralOptions,
) -> Result<Vec<f64>, InfluenceError> {
    if base == 0.0 {
        return Ok(vec![0.0; g.n()]);
    }
    (0..g.n())
        .into_par_iter()
        .map(|s| {
            let reduced = g.delete_vertices(&VertexSet::singleton(s))?;
            Ok(relative_drop(base, radius(&reduced, opts)?))
        })
        .collect()
}

/// Per-vertex influences and the graph cyclicality.
pub fn influence_vector(
    g: &WeightedDigraph,
    opts: &SpectralOptions,
) -> Result<InfluenceReport, InfluenceError> {
    let base = radius(g, opts)?;
    let per_vertex = single_vertex_influences(g, base, opts)?;
    let cyclicality = match g.n() {
        0 => 0.0,
        1 => 1.0,
        _ => per_vertex.iter().sum(),
    };
    Ok(InfluenceReport {
        per_vertex,
        cyclicality,
        base_radius: base,
    })
}

/// Spectral cyclicality `Σ_s influence({s})`, with the empty and one-vertex conventions.
pub fn spectral_cyclicality(
    g: &WeightedDigraph,
    opts: &SpectralOptions,
) -> Result<f64, InfluenceError> {
    match g.n() {
        0 => Ok(0.0),
        1 => Ok(1.0),
        _ => {
            let base = radius(g, opts)?;
            Ok(single_vertex_influences(g, base, opts)?.iter().sum())
        }
    }
}

/// Closed-form cyclicality of `[[a, b], [c, d]]`.
pub fn cyclicality_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let k = crate::spectral::pow2_scale(a.max(b).max(c).max(d));
    let (a, b, c, d) = (a / k, b / k, c / k, d / k);
    let disc = (a - d) * (a - d) + 4.0 * b * c;
    if disc == 0.0 {
        // either the zero radius convention or the a = d > 0, bc = 0 limit
        return 0.0;
    }
    2.0 / (1.0 + (a + d) / disc.sqrt())
}

/// A graph and subset on which single-vertex radius drops do not add up to
/// the joint drop.
#[derive(Debug, Clone, PartialEq)]
pub struct NonAdditivityWitness {
    pub graph: WeightedDigraph,
    pub subset: VertexSet,
    /// `Σ_{s∈S} (ρ(W) - ρ(W(s)))`.
    pub sum_of_parts: f64,
    /// `ρ(W) - ρ(W(S))`.
    pub whole: f64,
    pub gap: f64,
}

pub const WITNESS_MIN_GAP: f64 = 1e-6;

/// Random search for a non-additivity witness on `n` vertices.
pub fn nonadditivity_witness(
    n: usize,
    trials: usize,
    seed: u64,
    opts: &SpectralOptions,
) -> Result<NonAdditivityWitness, InfluenceError> {
    if n < 3 {
        return Err(InfluenceError::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.random_bool(0.5) {
                            rng.random::<f64>()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let size = rng.random_range(2..=n);
        let mut members: Vec<usize> = (0..n).collect();
        for k in 0..size {
            let j = rng.random_range(k..n);
            members.swap(k, j);
        }
        let subset = VertexSet::new(members[..size].iter().copied());
        let graph = WeightedDigraph::from_unlabeled(rows)?;

        let base = radius(&graph, opts)?;
        let mut sum_of_parts = 0.0;
        for s in subset.iter() {
            sum_of_parts += base - radius(&graph.delete_vertices(&VertexSet::singleton(s))?, opts)?;
        }
        let whole = base - radius(&graph.delete_vertices(&subset)?, opts)?;
        let gap = (sum_of_parts - whole).abs();
        if gap > WITNESS_MIN_GAP {
            return Ok(NonAdditivityWitness {
                graph,
                subset,
                sum_of_parts,
                whole,
                gap,
            });
        }
    }
    Err(InfluenceError::NotFound { trials })
}
