//! Sparse weighted undirected graphs, the similar/dissimilar pair built on
//! top of them, and the per-graph degree normalization used by propagation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense 0-based node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One of the two classes of the binary problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    /// Class 1, written as `+1` in label files.
    One,
    /// Class 2, written as `-1` in label files.
    Two,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::One, Class::Two];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Class::One => 0,
            Class::Two => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Class {
        if i == 0 {
            Class::One
        } else {
            Class::Two
        }
    }

    #[inline]
    pub fn other(self) -> Class {
        match self {
            Class::One => Class::Two,
            Class::Two => Class::One,
        }
    }
}

/// Which graph of a mixed pair an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Similar,
    Dissimilar,
}

/// Weighted undirected graph in compressed sparse row layout.
///
/// Each undirected edge is stored once per endpoint; neighbor lists are
/// sorted by node index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseUndirectedGraph<T> {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Scalar> SparseUndirectedGraph<T> {
    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Self {
        Self { offsets: vec![0; node_count + 1], neighbors: Vec::new(), weights: Vec::new() }
    }

    /// Builds a graph from undirected `(u, v, weight)` triples.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut degree = vec![0usize; node_count];
        let mut list = Vec::new();
        for (u, v, w) in edges {
            check_edge(node_count, u, v, w)?;
            degree[u] += 1;
            degree[v] += 1;
            list.push((u, v, w));
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut cursor = offsets[..node_count].to_vec();
        let mut slots: Vec<(usize, T)> = vec![(0, T::zero()); total];
        for (u, v, w) in list {
            slots[cursor[u]] = (v, w);
            cursor[u] += 1;
            slots[cursor[v]] = (u, w);
            cursor[v] += 1;
        }
        for i in 0..node_count {
            let row = &mut slots[offsets[i]..offsets[i + 1]];
            row.sort_by_key(|&(j, _)| j);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                let j = pair[0].0;
                return Err(Error::DuplicateEdge { u: i.min(j), v: i.max(j) });
            }
        }
        let (neighbors, weights) = slots.into_iter().unzip();
        Ok(Self { offsets, neighbors, weights })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Neighbors of `i` with their edge weights, in increasing node order.
    #[inline]
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    #[inline]
    pub fn neighbor_count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Weighted degree of node `i`.
    pub fn degree(&self, i: usize) -> T {
        self.weights[self.offsets[i]..self.offsets[i + 1]].iter().copied().sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<T> {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.neighbors[range.clone()].binary_search(&v).ok().map(|k| self.weights[range.start + k])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v).is_some()
    }

    /// Undirected edges as `(u, v, w)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.neighbors(u).filter(move |&(v, _)| v > u).map(move |(v, w)| (u, v, w)))
    }
}

fn check_edge<T: Scalar>(node_count: usize, u: usize, v: usize, w: T) -> Result<()> {
    for node in [u, v] {
        if node >= node_count {
            return Err(Error::NodeOutOfRange { node, node_count });
        }
    }
    if u == v {
        return Err(Error::SelfLoop { node: u });
    }
    if !w.is_finite() || w < T::zero() {
        return Err(Error::InvalidWeight { u, v, weight: w.to_f64_lossy() });
    }
    Ok(())
}

/// A similar graph and a dissimilar graph over one node set, with disjoint
/// edge sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGraph<T> {
    similar: SparseUndirectedGraph<T>,
    dissimilar: SparseUndirectedGraph<T>,
}

impl<T: Scalar> MixedGraph<T> {
    pub fn new(similar: SparseUndirectedGraph<T>, dissimilar: SparseUndirectedGraph<T>) -> Result<Self> {
        if similar.node_count() != dissimilar.node_count() {
            return Err(Error::NodeCountMismatch { left: similar.node_count(), right: dissimilar.node_count() });
        }
        if let Some((u, v, _)) = dissimilar.edges().find(|&(u, v, _)| similar.has_edge(u, v)) {
            return Err(Error::DuplicateEdge { u, v });
        }
        Ok(Self { similar, dissimilar })
    }

    /// Wraps a plain graph as a mixed graph with no dissimilar edges.
    pub fn similar_only(similar: SparseUndirectedGraph<T>) -> Self {
        let n = similar.node_count();
        Self { similar, dissimilar: SparseUndirectedGraph::empty(n) }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.similar.node_count()
    }

    #[inline]
    pub fn similar(&self) -> &SparseUndirectedGraph<T> {
        &self.similar
    }

    #[inline]
    pub fn dissimilar(&self) -> &SparseUndirectedGraph<T> {
        &self.dissimilar
    }

    pub fn graph(&self, kind: EdgeKind) -> &SparseUndirectedGraph<T> {
        match kind {
            EdgeKind::Similar => &self.similar,
            EdgeKind::Dissimilar => &self.dissimilar,
        }
    }

    /// All edges of both graphs, tagged with their kind, sorted by `(u, v)`.
    pub fn tagged_edges(&self) -> Vec<EdgeSpec<T>> {
        let mut out: Vec<EdgeSpec<T>> = self
            .similar
            .edges()
            .map(|(u, v, weight)| EdgeSpec { u, v, weight, kind: EdgeKind::Similar })
            .chain(self.dissimilar.edges().map(|(u, v, weight)| EdgeSpec { u, v, weight, kind: EdgeKind::Dissimilar }))
            .collect();
        out.sort_by_key(|e| (e.u, e.v));
        out
    }
}

/// One input edge for [`build_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec<T> {
    pub u: usize,
    pub v: usize,
    pub weight: T,
    pub kind: EdgeKind,
}

impl<T> EdgeSpec<T> {
    pub fn new(u: usize, v: usize, weight: T, kind: EdgeKind) -> Self {
        Self { u, v, weight, kind }
    }
}

/// Splits a tagged edge list into a [`MixedGraph`].
///
/// An undirected pair may appear at most once across both kinds.
pub fn build_graph<T: Scalar>(node_count: usize, edges: &[EdgeSpec<T>]) -> Result<MixedGraph<T>> {
    let mut seen = HashSet::with_capacity(edges.len());
    let mut similar = Vec::new();
    let mut dissimilar = Vec::new();
    for e in edges {
        check_edge(node_count, e.u, e.v, e.weight)?;
        let key = (e.u.min(e.v), e.u.max(e.v));
        if !seen.insert(key) {
            return Err(Error::DuplicateEdge { u: key.0, v: key.1 });
        }
        match e.kind {
            EdgeKind::Similar => similar.push((e.u, e.v, e.weight)),
            EdgeKind::Dissimilar => dissimilar.push((e.u, e.v, e.weight)),
        }
    }
    MixedGraph::new(
        SparseUndirectedGraph::from_edges(node_count, similar)?,
        SparseUndirectedGraph::from_edges(node_count, dissimilar)?,
    )
}

/// Partial map from nodes to classes. Labeled nodes form `L`, the rest `UL`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAssignment {
    labels: Vec<Option<Class>>,
}

impl LabelAssignment {
    /// All nodes unlabeled.
    pub fn unlabeled(node_count: usize) -> Self {
        Self { labels: vec![None; node_count] }
    }

    pub fn from_options(labels: Vec<Option<Class>>) -> Self {
        Self { labels }
    }

    /// Every node labeled with its true class.
    pub fn full(truth: &[Class]) -> Self {
        Self { labels: truth.iter().copied().map(Some).collect() }
    }

    /// Reveals `truth` on the nodes of `labeled` only.
    pub fn reveal(truth: &[Class], labeled: &[NodeId]) -> Result<Self> {
        let mut out = Self::unlabeled(truth.len());
        for &node in labeled {
            let c = *truth.get(node.0).ok_or(Error::NodeOutOfRange { node: node.0, node_count: truth.len() })?;
            out.labels[node.0] = Some(c);
        }
        Ok(out)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<Class> {
        self.labels[i]
    }

    #[inline]
    pub fn is_labeled(&self, i: usize) -> bool {
        self.labels[i].is_some()
    }

    pub fn set(&mut self, i: usize, class: Option<Class>) {
        self.labels[i] = class;
    }

    pub fn as_slice(&self) -> &[Option<Class>] {
        &self.labels
    }

    pub fn labeled_nodes(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&i| self.is_labeled(i)).map(NodeId).collect()
    }

    pub fn unlabeled_nodes(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&i| !self.is_labeled(i)).map(NodeId).collect()
    }

    /// Labeled node counts per class, indexed by [`Class::index`].
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for c in self.labels.iter().flatten() {
            counts[c.index()] += 1;
        }
        counts
    }

    /// Same assignment with the two classes exchanged.
    pub fn flipped(&self) -> Self {
        Self { labels: self.labels.iter().map(|c| c.map(Class::other)).collect() }
    }
}

/// Directed, possibly asymmetric edge weights derived from an undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedWeights<T> {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Scalar> DirectedWeights<T> {
    /// Raw symmetric weights, both directions of every edge.
    pub fn raw(g: &SparseUndirectedGraph<T>) -> Self {
        Self { offsets: g.offsets.clone(), targets: g.neighbors.clone(), weights: g.weights.clone() }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    #[inline]
    pub fn row_len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.weights[self.offsets[i]..self.offsets[i + 1]].iter().copied().sum()
    }

    /// Weight of the directed entry `i -> j`.
    pub fn weight(&self, i: usize, j: usize) -> Option<T> {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()].binary_search(&j).ok().map(|k| self.weights[range.start + k])
    }
}

/// Degree normalization `D⁻¹ W` of one graph.
///
/// Every node with positive degree gets outgoing weights summing to one;
/// zero-degree nodes keep an empty row. The result is row-stochastic and in
/// general not symmetric.
pub fn row_normalize<T: Scalar>(g: &SparseUndirectedGraph<T>) -> DirectedWeights<T> {
    let mut out = DirectedWeights::raw(g);
    for i in 0..g.node_count() {
        let row = &mut out.weights[out.offsets[i]..out.offsets[i + 1]];
        let total: T = row.iter().copied().sum();
        if total > T::zero() {
            row.iter_mut().for_each(|w| *w = *w / total);
        } else {
            // zero-weight edges only: treat the node as isolated
            row.iter_mut().for_each(|w| *w = T::zero());
        }
    }
    out
}

/// Directed weight views of both graphs of a [`MixedGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixedView<T> {
    pub similar: DirectedWeights<T>,
    pub dissimilar: DirectedWeights<T>,
}

impl<T: Scalar> MixedView<T> {
    /// Each graph normalized by its own degrees.
    pub fn normalized(g: &MixedGraph<T>) -> Self {
        Self { similar: row_normalize(g.similar()), dissimilar: row_normalize(g.dissimilar()) }
    }

    /// Raw weights, no normalization.
    pub fn raw(g: &MixedGraph<T>) -> Self {
        Self { similar: DirectedWeights::raw(g.similar()), dissimilar: DirectedWeights::raw(g.dissimilar()) }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.similar.node_count()
    }

    #[inline]
    pub fn is_isolated(&self, i: usize) -> bool {
        self.similar.row_len(i) == 0 && self.dissimilar.row_len(i) == 0
    }
}
