//! Brute-force cycle machinery for small graphs.
//!
//! Simple cycles are enumerated with Johnson's algorithm over the
//! positive-weight arcs. Each cycle is reported once, rotated to start at its
//! smallest vertex. These routines are exponential and meant for validating
//! the spectral code on graphs with at most [`MAX_ORACLE_VERTICES`] vertices.

use crate::graph::WeightedDigraph;

pub const MAX_ORACLE_VERTICES: usize = 12;

/// Relative slack under which two geometric means count as equal.
const GEO_MEAN_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("cycle enumeration is limited to {MAX_ORACLE_VERTICES} vertices, got {0}")]
    TooLarge(usize),
    #[error("max_len {max_len} exceeds the vertex count {n}")]
    InvalidMaxLen { max_len: usize, n: usize },
    #[error("graph has no cycle")]
    NoCycle,
    #[error("not a closed walk along positive arcs: {0}")]
    NotAClosedWalk(String),
}

/// A simple cycle; `vertices[0]` is followed by `vertices[1]`, ..., and the
/// last vertex closes back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    /// Product of the traversed arc weights.
    pub value: f64,
    /// `value^(1/len)`.
    pub geo_mean: f64,
}

impl Cycle {
    fn from_vertices(g: &WeightedDigraph, vertices: Vec<usize>) -> Cycle {
        let len = vertices.len();
        let value: f64 = (0..len)
            .map(|k| g.weight(vertices[k], vertices[(k + 1) % len]))
            .product();
        Cycle {
            geo_mean: value.powf(1.0 / len as f64),
            vertices,
            value,
        }
    }

    fn canonical(g: &WeightedDigraph, mut vertices: Vec<usize>) -> Cycle {
        let start = vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map_or(0, |(k, _)| k);
        vertices.rotate_left(start);
        Cycle::from_vertices(g, vertices)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Arcs `(from, to)` in traversal order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let len = self.len();
        (0..len)
            .map(|k| (self.vertices[k], self.vertices[(k + 1) % len]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleCatalog {
    /// Sorted lexicographically by vertex sequence.
    pub cycles: Vec<Cycle>,
    /// Position of the dominant cycle, `None` for an acyclic graph.
    pub dominant: Option<usize>,
}

impl CycleCatalog {
    pub fn dominant_cycle(&self) -> Option<&Cycle> {
        self.dominant.map(|k| &self.cycles[k])
    }
}

/// `a` dominates `b`: larger geometric mean, then shorter, then lexicographically smaller.
fn dominates(a: &Cycle, b: &Cycle) -> bool {
    let scale = a.geo_mean.max(b.geo_mean);
    if (a.geo_mean - b.geo_mean).abs() > GEO_MEAN_TIE * scale {
        return a.geo_mean > b.geo_mean;
    }
    (a.len(), &a.vertices) < (b.len(), &b.vertices)
}

struct Johnson<'a> {
    g: &'a WeightedDigraph,
    start: usize,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (self.start..self.g.n()).filter(move |&w| self.g.has_arc(v, w))
    }

    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.blocked_by[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let succ: Vec<usize> = self.successors(v).collect();
        for &w in &succ {
            if w == self.start {
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w) {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &succ {
                if !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        closed
    }
}

/// All simple cycles (loops included) with at most `max_len` vertices.
pub fn enumerate_simple_cycles(
    g: &WeightedDigraph,
    max_len: usize,
) -> Result<CycleCatalog, OracleError> {
    let n = g.n();
    if n > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    if max_len > n {
        return Err(OracleError::InvalidMaxLen { max_len, n });
    }
    let mut raw = Vec::new();
    for start in 0..n {
        let mut j = Johnson {
            g,
            start,
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            found: Vec::new(),
        };
        j.circuit(start);
        raw.extend(j.found);
    }
    let mut cycles: Vec<Cycle> = raw
        .into_iter()
        .filter(|c| c.len() <= max_len)
        .map(|c| Cycle::from_vertices(g, c))
        .collect();
    cycles.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    let mut dominant: Option<usize> = None;
    for (k, c) in cycles.iter().enumerate() {
        if dominant.is_none_or(|d| dominates(c, &cycles[d])) {
            dominant = Some(k);
        }
    }
    Ok(CycleCatalog { cycles, dominant })
}

/// The simple cycle with the largest geometric mean.
pub fn dominant_cycle(g: &WeightedDigraph) -> Result<Cycle, OracleError> {
    let catalog = enumerate_simple_cycles(g, g.n())?;
    catalog
        .dominant_cycle()
        .cloned()
        .ok_or(OracleError::NoCycle)
}

/// Product of the arc weights along a walk given as `v0, v1, ..., vm`.
pub fn walk_value(g: &WeightedDigraph, walk: &[usize]) -> f64 {
    walk.windows(2).map(|w| g.weight(w[0], w[1])).product()
}

/// Splits a closed walk `v0, ..., vm` (with `vm == v0`) into simple cycles
/// by peeling the segment between each pair of repeated vertices.
pub fn decompose_closed_walk(
    g: &WeightedDigraph,
    walk: &[usize],
) -> Result<Vec<Cycle>, OracleError> {
    if walk.len() < 2 || walk.first() != walk.last() {
        return Err(OracleError::NotAClosedWalk(
            "walk must have at least one arc and end where it starts".into(),
        ));
    }
    if let Some(&v) = walk.iter().find(|&&v| v >= g.n()) {
        return Err(OracleError::NotAClosedWalk(format!(
            "vertex {v} out of range"
        )));
    }
    if let Some(w) = walk.windows(2).find(|w| !g.has_arc(w[0], w[1])) {
        return Err(OracleError::NotAClosedWalk(format!(
            "no arc {} -> {}",
            w[0], w[1]
        )));
    }

    let mut cycles = Vec::new();
    let mut path: Vec<usize> = vec![walk[0]];
    for &u in &walk[1..] {
        if let Some(p) = path.iter().position(|&x| x == u) {
            let peeled: Vec<usize> = path.drain(p..).collect();
            cycles.push(Cycle::canonical(g, peeled));
        }
        path.push(u);
    }
    debug_assert_eq!(path, vec![walk[0]]);
    Ok(cycles)
}
