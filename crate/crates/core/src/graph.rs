//! Weighted digraph model and the principal-submatrix operators used by the
//! influence and clustering code.
//!
//! A graph is a list of unique vertex labels together with a dense,
//! non-negative weight matrix. Entry `(i, j)` is the weight of the arc
//! `i -> j`; an arc exists exactly when its weight is strictly positive and a
//! loop is a positive diagonal entry.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("weight matrix is not square with side {expected}: row {row} has {found} entries")]
    NonSquare {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },
    #[error("non-finite weight at ({row}, {col})")]
    NonFiniteWeight { row: usize, col: usize },
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("vertex index {index} out of range for a graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Sorted set of vertex positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(i: usize) -> Self {
        VertexSet(vec![i])
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        VertexSet((0..n).filter(|i| !self.contains(*i)).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn with(&self, i: usize) -> VertexSet {
        self.union(&VertexSet::singleton(i))
    }

    pub fn without(&self, i: usize) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&j| j != i).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    fn check(&self, n: usize) -> Result<(), GraphError> {
        match self.0.last() {
            Some(&index) if index >= n => Err(GraphError::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Weighted digraph `G = (V, A, W)` with dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    labels: Vec<String>,
    weights: DMatrix<f64>,
}

impl WeightedDigraph {
    /// Builds a graph from row-major weights; `matrix[i][j]` is the weight of `i -> j`.
    pub fn from_weight_matrix<S: Into<String>>(
        labels: Vec<S>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self, GraphError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if matrix.len() != n {
            return Err(GraphError::NonSquare {
                expected: n,
                row: matrix.len().min(n),
                found: matrix.get(n).map_or(0, Vec::len),
            });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(GraphError::NonSquare {
                    expected: n,
                    row,
                    found: r.len(),
                });
            }
        }
        let weights = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        Self::from_parts(labels, weights)
    }

    /// Builds a graph from an already-shaped matrix.
    pub fn from_parts(labels: Vec<String>, weights: DMatrix<f64>) -> Result<Self, GraphError> {
        let n = labels.len();
        if weights.nrows() != n || weights.ncols() != n {
            return Err(GraphError::NonSquare {
                expected: n,
                row: 0,
                found: weights.ncols(),
            });
        }
        for row in 0..n {
            for col in 0..n {
                let value = weights[(row, col)];
                if !value.is_finite() {
                    return Err(GraphError::NonFiniteWeight { row, col });
                }
                if value < 0.0 {
                    return Err(GraphError::NegativeWeight { row, col, value });
                }
            }
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        Ok(WeightedDigraph { labels, weights })
    }

    /// Graph with labels `"0"`, `"1"`, ....
    pub fn from_unlabeled(matrix: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::from_weight_matrix(labels, matrix)
    }

    pub fn empty() -> Self {
        WeightedDigraph {
            labels: Vec::new(),
            weights: DMatrix::zeros(0, 0),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.weights[(i, j)] > 0.0
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Row-major copy of the weights.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.weights[(i, j)]).collect())
            .collect()
    }

    /// Multiplies every weight by `c >= 0`.
    pub fn scaled(&self, c: f64) -> WeightedDigraph {
        WeightedDigraph {
            labels: self.labels.clone(),
            weights: &self.weights * c,
        }
    }

    /// Copy with all loops removed.
    pub fn without_loops(&self) -> WeightedDigraph {
        let mut weights = self.weights.clone();
        weights.fill_diagonal(0.0);
        WeightedDigraph {
            labels: self.labels.clone(),
            weights,
        }
    }

    /// Reorders vertices so that new vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> WeightedDigraph {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length must equal vertex count");
        WeightedDigraph {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            weights: DMatrix::from_fn(n, n, |i, j| self.weights[(perm[i], perm[j])]),
        }
    }

    /// `W(S)`: removes the rows and columns of `s`.
    pub fn delete_vertices(&self, s: &VertexSet) -> Result<WeightedDigraph, GraphError> {
        s.check(self.n())?;
        Ok(self.induced(&s.complement(self.n())))
    }

    /// `W~(S)`: keeps only the rows and columns of `s`.
    pub fn restrict_to(&self, s: &VertexSet) -> Result<WeightedDigraph, GraphError> {
        s.check(self.n())?;
        Ok(self.induced(s))
    }

    /// `W̄(S)`: zeroes every arc between two distinct vertices of `s`; loops are kept.
    pub fn zero_intra_arcs(&self, s: &VertexSet) -> Result<WeightedDigraph, GraphError> {
        s.check(self.n())?;
        let mut weights = self.weights.clone();
        for i in s.iter() {
            for j in s.iter() {
                if i != j {
                    weights[(i, j)] = 0.0;
                }
            }
        }
        Ok(WeightedDigraph {
            labels: self.labels.clone(),
            weights,
        })
    }

    /// Number of positive off-diagonal entries.
    pub fn off_diagonal_arc_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.weights[(i, j)] > 0.0)
            .count()
    }

    /// Strongly connected components over the positive-weight arcs, each
    /// sorted, listed in order of their smallest vertex.
    pub fn strongly_connected_components(&self) -> Vec<VertexSet> {
        let n = self.n();
        let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for i in 0..n {
            for j in 0..n {
                if self.weights[(i, j)] > 0.0 {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let mut comps: Vec<VertexSet> = tarjan_scc(&g)
            .into_iter()
            .map(|c| VertexSet::new(c.into_iter().map(|x| x.index())))
            .collect();
        comps.sort_by_key(|c| c.indices()[0]);
        comps
    }

    /// True iff the graph is non-empty and strongly connected.
    pub fn is_irreducible(&self) -> bool {
        self.n() >= 1 && self.strongly_connected_components().len() == 1
    }

    fn induced(&self, keep: &VertexSet) -> WeightedDigraph {
        let idx = keep.indices();
        WeightedDigraph {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            weights: DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.weights[(idx[a], idx[b])]),
        }
    }
}
