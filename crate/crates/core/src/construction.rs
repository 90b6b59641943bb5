//! Graph builders: Gaussian-weighted kNN graphs from features, two-Gaussian
//! synthetic data, and oracle-based extraction of a mixed graph from a
//! single graph.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::{Class, MixedGraph, NodeId, SparseUndirectedGraph};
use crate::scalar::Scalar;

/// Deterministic RNG used by every seeded operation in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-major matrix of node feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    data: Vec<T>,
    dim: usize,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(data: Vec<T>, dim: usize) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "feature data of length {} does not split into rows of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidParameter(format!("row {i} has {} features, expected {dim}", r.len())));
        }
        Self::new(rows.into_iter().flatten().collect(), dim)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn squared_distance(&self, i: usize, j: usize) -> T {
        self.row(i).iter().zip(self.row(j)).map(|(&a, &b)| (a - b) * (a - b)).sum()
    }
}

/// Kernel width of the Gaussian edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sigma<T> {
    /// Mean distance from each node to its k-th nearest neighbor.
    Auto,
    Fixed(T),
}

/// Union-symmetrized kNN graph with weights `exp(-‖x_i - x_j‖² / (2σ²))`.
///
/// Distance ties are broken toward the smaller node index.
pub fn knn_gaussian_graph<T: Scalar>(
    x: &FeatureMatrix<T>,
    k: usize,
    sigma: Sigma<T>,
) -> Result<SparseUndirectedGraph<T>> {
    let n = x.rows();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("k must satisfy 0 < k < n = {n}, got {k}")));
    }

    let mut knn: Vec<Vec<(usize, T)>> = Vec::with_capacity(n);
    let mut candidates: Vec<(T, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        candidates.clear();
        candidates.extend((0..n).filter(|&j| j != i).map(|j| (x.squared_distance(i, j), j)));
        let by_distance = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1));
        candidates.select_nth_unstable_by(k - 1, by_distance);
        let nearest = &mut candidates[..k];
        nearest.sort_unstable_by(by_distance);
        knn.push(nearest.iter().map(|&(d2, j)| (j, d2)).collect());
    }

    let sigma = match sigma {
        Sigma::Fixed(s) => s,
        Sigma::Auto => {
            let total: T = knn.iter().map(|row| row[k - 1].1.sqrt()).sum();
            total / T::from_usize(n).unwrap()
        }
    };
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(Error::InvalidParameter(format!("kernel width must be positive and finite, got {sigma}")));
    }

    let two_sigma_sq = T::lit(2.0) * sigma * sigma;
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (i, row) in knn.iter().enumerate() {
        for &(j, d2) in row {
            if seen.insert((i.min(j), i.max(j))) {
                edges.push((i, j, (-d2 / two_sigma_sq).exp()));
            }
        }
    }
    SparseUndirectedGraph::from_edges(n, edges)
}

/// Mean separation `‖μ₁ - μ₂‖` giving Bayes error `bayes_error` between two
/// unit-covariance Gaussians with equal priors.
pub fn mean_separation(bayes_error: f64) -> Result<f64> {
    if !(bayes_error > 0.0 && bayes_error < 0.5) {
        return Err(Error::InvalidParameter(format!("bayes_error must lie in (0, 0.5), got {bayes_error}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(2.0 * normal.inverse_cdf(1.0 - bayes_error))
}

/// Samples `n` points from two unit-covariance Gaussians in `d` dimensions.
///
/// Each point is class 1 with probability `balance`. The class means sit at
/// `±s/2` on the first axis with `s` from [`mean_separation`].
pub fn gen_two_gaussians<T: Scalar>(
    n: usize,
    d: usize,
    bayes_error: f64,
    balance: f64,
    seed: u64,
) -> Result<(FeatureMatrix<T>, Vec<Class>)> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    if !(balance > 0.0 && balance < 1.0) {
        return Err(Error::InvalidParameter(format!("balance must lie in (0, 1), got {balance}")));
    }
    let half = mean_separation(bayes_error)? / 2.0;
    let mut rng = seeded_rng(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let class = if rng.random::<f64>() < balance { Class::One } else { Class::Two };
        let offset = if class == Class::One { half } else { -half };
        for axis in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            data.push(T::lit(if axis == 0 { z + offset } else { z }));
        }
        truth.push(class);
    }
    Ok((FeatureMatrix::new(data, d)?, truth))
}

/// How the dissimilar graph is formed from the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractionModel {
    /// Move a fraction of the opposite-label unlabeled-unlabeled edges out of
    /// the base graph into the dissimilar graph.
    #[default]
    Extract,
    /// Keep the base graph as the similar graph and add new unit-weight edges
    /// between random opposite-label unlabeled pairs.
    Goldberg,
}

impl std::str::FromStr for ExtractionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extract" => Ok(Self::Extract),
            "goldberg" => Ok(Self::Goldberg),
            other => Err(Error::InvalidParameter(format!("unknown extraction model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionSpec {
    /// Percentage `P` of candidate dissimilar edges, in `[0, 100]`.
    pub p_percent: f64,
    pub seed: u64,
    #[serde(default)]
    pub model: ExtractionModel,
}

impl ExtractionSpec {
    pub fn new(p_percent: f64, seed: u64) -> Self {
        Self { p_percent, seed, model: ExtractionModel::Extract }
    }
}

/// Edges of `g` joining two unlabeled nodes of opposite true class, in
/// `(u, v)` order.
pub fn unlabeled_dissimilar_edges<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    truth: &[Class],
    labeled: &[bool],
) -> Vec<(usize, usize, T)> {
    g.edges().filter(|&(u, v, _)| !labeled[u] && !labeled[v] && truth[u] != truth[v]).collect()
}

/// Splits `g` into a mixed graph using the true labels as an oracle.
///
/// The sample size is `⌊P · |D_UU| / 100⌋`, where `D_UU` are the
/// opposite-label edges between unlabeled nodes. Dissimilar edges touching a
/// labeled node always stay in the similar graph.
pub fn extract_mixed<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    truth: &[Class],
    labeled_set: &[NodeId],
    spec: &ExtractionSpec,
) -> Result<MixedGraph<T>> {
    let n = g.node_count();
    if truth.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: truth.len() });
    }
    if !(0.0..=100.0).contains(&spec.p_percent) {
        return Err(Error::InvalidParameter(format!("P must lie in [0, 100], got {}", spec.p_percent)));
    }
    let mut labeled = vec![false; n];
    for &node in labeled_set {
        if node.0 >= n {
            return Err(Error::NodeOutOfRange { node: node.0, node_count: n });
        }
        labeled[node.0] = true;
    }

    let candidates = unlabeled_dissimilar_edges(g, truth, &labeled);
    let count = ((spec.p_percent * candidates.len() as f64) / 100.0).floor() as usize;
    let mut rng = seeded_rng(spec.seed);

    match spec.model {
        ExtractionModel::Extract => {
            let chosen: HashSet<(usize, usize)> = index::sample(&mut rng, candidates.len(), count)
                .into_iter()
                .map(|k| (candidates[k].0, candidates[k].1))
                .collect();
            let (moved, kept): (Vec<_>, Vec<_>) = g.edges().partition(|&(u, v, _)| chosen.contains(&(u, v)));
            MixedGraph::new(SparseUndirectedGraph::from_edges(n, kept)?, SparseUndirectedGraph::from_edges(n, moved)?)
        }
        ExtractionModel::Goldberg => {
            let added = random_opposite_pairs(g, truth, &labeled, count, &mut rng);
            let dissimilar = SparseUndirectedGraph::from_edges(n, added.into_iter().map(|(u, v)| (u, v, T::one())))?;
            MixedGraph::new(g.clone(), dissimilar)
        }
    }
}

/// Up to `count` distinct non-adjacent unlabeled pairs of opposite class.
fn random_opposite_pairs<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    truth: &[Class],
    labeled: &[bool],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let pool = |c: Class| -> Vec<usize> { (0..truth.len()).filter(|&i| !labeled[i] && truth[i] == c).collect() };
    let (ones, twos) = (pool(Class::One), pool(Class::Two));
    let key = |a: usize, b: usize| (a.min(b), a.max(b));

    if ones.len().saturating_mul(twos.len()) <= 1 << 22 {
        let all: Vec<(usize, usize)> = ones
            .iter()
            .flat_map(|&a| twos.iter().map(move |&b| key(a, b)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        let take = count.min(all.len());
        let mut picked: Vec<_> = index::sample(rng, all.len(), take).into_iter().map(|k| all[k]).collect();
        picked.sort_unstable();
        return picked;
    }

    let mut picked = HashSet::with_capacity(count);
    let mut attempts = 0usize;
    while picked.len() < count && attempts < count.saturating_mul(100) {
        attempts += 1;
        let a = ones[rng.random_range(0..ones.len())];
        let b = twos[rng.random_range(0..twos.len())];
        let pair = key(a, b);
        if !g.has_edge(pair.0, pair.1) {
            picked.insert(pair);
        }
    }
    if picked.len() < count {
        log::warn!("placed {} of {count} requested dissimilar pairs", picked.len());
    }
    let mut picked: Vec<_> = picked.into_iter().collect();
    picked.sort_unstable();
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FeatureMatrix<f64> {
        FeatureMatrix::new(points.to_vec(), 1).unwrap()
    }

    #[test]
    fn knn_weights() {
        let x = FeatureMatrix::from_rows(vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let g = knn_gaussian_graph(&x, 1, Sigma::Fixed(1.0)).unwrap();
        assert_eq!(g.weight(0, 1), Some(1.0));

        // ‖x_i - x_j‖ = σ√2
        let x = line(&[0.0, 2f64.sqrt() * 0.5]);
        let g = knn_gaussian_graph(&x, 1, Sigma::Fixed(0.5)).unwrap();
        assert!((g.weight(0, 1).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn knn_union_on_a_line() {
        let g = knn_gaussian_graph(&line(&[0.0, 1.0, 3.0]), 1, Sigma::Auto).unwrap();
        let edges: Vec<_> = g.edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn knn_errors() {
        assert!(knn_gaussian_graph(&line(&[0.0, 1.0]), 2, Sigma::Auto).is_err());
        assert!(knn_gaussian_graph(&line(&[1.0, 1.0, 1.0]), 1, Sigma::Auto).is_err());
        assert!(knn_gaussian_graph(&line(&[1.0, 2.0, 3.0]), 1, Sigma::Fixed(0.0)).is_err());
    }

    #[test]
    fn separation_for_five_percent() {
        // 2·Φ⁻¹(0.95), 30-digit reference 3.28970725390294542972769781598
        assert!((mean_separation(0.05).unwrap() - 3.289_707_253_902_945).abs() < 1e-9);
        assert!(mean_separation(0.5).is_err());
    }

    #[test]
    fn two_gaussians_deterministic() {
        let (a, ta) = gen_two_gaussians::<f64>(50, 3, 0.05, 0.5, 9).unwrap();
        let (b, tb) = gen_two_gaussians::<f64>(50, 3, 0.05, 0.5, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let (c, _) = gen_two_gaussians::<f64>(50, 3, 0.05, 0.5, 10).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.rows(), 50);
        assert_eq!(a.dim(), 3);
    }

    fn path() -> (SparseUndirectedGraph<f64>, Vec<Class>) {
        let g = SparseUndirectedGraph::from_edges(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        (g, vec![Class::One, Class::Two, Class::Two, Class::One])
    }

    #[test]
    fn extract_path_example() {
        let (g, truth) = path();
        let mixed = extract_mixed(&g, &truth, &[NodeId(0)], &ExtractionSpec::new(100.0, 1)).unwrap();
        let d: Vec<_> = mixed.dissimilar().edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(d, vec![(2, 3)]);
        let s: Vec<_> = mixed.similar().edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(s, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn extract_zero_percent_is_identity() {
        let (g, truth) = path();
        let mixed = extract_mixed(&g, &truth, &[NodeId(0)], &ExtractionSpec::new(0.0, 1)).unwrap();
        assert_eq!(mixed.similar(), &g);
        assert_eq!(mixed.dissimilar().edge_count(), 0);
    }

    #[test]
    fn goldberg_adds_new_pairs() {
        let (g, truth) = path();
        let spec = ExtractionSpec { p_percent: 100.0, seed: 3, model: ExtractionModel::Goldberg };
        let mixed = extract_mixed(&g, &truth, &[NodeId(0)], &spec).unwrap();
        assert_eq!(mixed.similar(), &g);
        // D_UU = {(2,3)} so one pair is added; the only non-adjacent
        // opposite-label unlabeled pair is (1, 3)
        let d: Vec<_> = mixed.dissimilar().edges().collect();
        assert_eq!(d, vec![(1, 3, 1.0)]);
    }

    #[test]
    fn extract_rejects_bad_input() {
        let (g, truth) = path();
        assert!(extract_mixed(&g, &truth, &[NodeId(9)], &ExtractionSpec::new(10.0, 0)).is_err());
        assert!(extract_mixed(&g, &truth, &[], &ExtractionSpec::new(101.0, 0)).is_err());
        assert!(extract_mixed(&g, &truth[..2], &[], &ExtractionSpec::new(10.0, 0)).is_err());
    }
}
