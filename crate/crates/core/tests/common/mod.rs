//! Random instance generators shared by the integration tests.

#![allow(dead_code)]

use mixgraph::{
    build_graph, gen_two_gaussians, knn_gaussian_graph, seeded_rng, Class, EdgeKind, EdgeSpec, Graph, LabelAssignment,
    Mixed, Priors, Sigma,
};
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub graph: Mixed,
    pub labels: LabelAssignment,
    pub priors: Priors,
    pub gamma: f64,
}

fn random_class(rng: &mut ChaCha8Rng) -> Class {
    if rng.random::<bool>() {
        Class::One
    } else {
        Class::Two
    }
}

/// Edge list over `n` nodes, each pair present with probability `p`.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64, weights: Range<f64>) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, rng.random_range(weights.clone())));
            }
        }
    }
    edges
}

/// Random edges with kinds and weights drawn independently; roughly
/// `mean_degree` edges per node.
pub fn random_mixed(rng: &mut ChaCha8Rng, n: usize, mean_degree: f64) -> Mixed {
    let p = (mean_degree / (n.max(2) - 1) as f64).min(1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                let kind = if rng.random::<bool>() { EdgeKind::Similar } else { EdgeKind::Dissimilar };
                edges.push(EdgeSpec::new(u, v, rng.random_range(0.1..2.0), kind));
            }
        }
    }
    build_graph(n, &edges).unwrap()
}

/// Random graph of `n` nodes with exactly `unlabeled` unlabeled nodes (the
/// rest labeled at random) and a random γ.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, unlabeled: usize, mean_degree: f64) -> Instance {
    let graph = random_mixed(rng, n, mean_degree);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = LabelAssignment::unlabeled(n);
    for &i in &order[unlabeled..] {
        labels.set(i, Some(random_class(rng)));
    }
    let priors = Priors::one_hot(&labels);
    Instance { graph, labels, priors, gamma: rng.random_range(0.0..=1.0) }
}

/// Instance with up to `max_nodes` nodes and a random fraction of them labeled
/// (at least one).
pub fn random_sized_instance(rng: &mut ChaCha8Rng, max_nodes: usize) -> Instance {
    let n = rng.random_range(2..=max_nodes);
    let labeled = rng.random_range(1..=n.div_ceil(2));
    let degree = rng.random_range(1.0..6.0);
    random_instance(rng, n, n - labeled, degree)
}

/// Balanced planted instance: each similar edge joins same-class nodes with
/// probability `1 - noise`, each dissimilar edge opposite-class nodes with
/// probability `1 - noise`. Unit weights, no pair carries both kinds.
pub fn planted(n: usize, degree_s: f64, degree_d: f64, noise: f64, seed: u64) -> (Mixed, Vec<Class>) {
    let mut rng = seeded_rng(seed);
    let truth: Vec<Class> = (0..n).map(|i| if i % 2 == 0 { Class::One } else { Class::Two }).collect();
    let mut used = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (kind, degree) in [(EdgeKind::Similar, degree_s), (EdgeKind::Dissimilar, degree_d)] {
        let target = (degree * n as f64 / 2.0).round() as usize;
        let mut placed = 0;
        while placed < target {
            let agree = rng.random::<f64>() >= noise;
            let want_same = (kind == EdgeKind::Similar) == agree;
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v || (truth[u] == truth[v]) != want_same || !used.insert((u.min(v), u.max(v))) {
                continue;
            }
            edges.push(EdgeSpec::new(u.min(v), u.max(v), 1.0, kind));
            placed += 1;
        }
    }
    (build_graph(n, &edges).unwrap(), truth)
}

/// Two-Gaussian data with a kNN graph, shaped like the G50C benchmark.
pub fn g50c(seed: u64) -> (Graph, Vec<Class>) {
    let (x, truth) = gen_two_gaussians::<f64>(550, 50, 0.05, 0.5, seed).unwrap();
    (knn_gaussian_graph(&x, 50, Sigma::Auto).unwrap(), truth)
}
