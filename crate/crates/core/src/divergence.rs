//! Two-class distributions, KL / Jensen-Shannon divergences and the
//! mixed-graph regularization objective.
//!
//! All logarithms are natural, so JS is bounded by ln 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Class, LabelAssignment, MixedView};
use crate::scalar::Scalar;

/// A probability vector over the two classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution2<T>([T; 2]);

impl<T: Scalar> Distribution2<T> {
    /// Validates `q1 + q2 = 1` (within 1e-9) and non-negativity.
    pub fn new(q1: T, q2: T) -> Result<Self> {
        let valid = q1 >= T::zero() && q2 >= T::zero() && ((q1 + q2) - T::one()).abs() <= T::lit(1e-9);
        if valid {
            Ok(Self([q1, q2]))
        } else {
            Err(Error::InvalidDistribution { q1: q1.to_f64_lossy(), q2: q2.to_f64_lossy() })
        }
    }

    /// Builds `(q1, 1 - q1)`; `q1` must lie in `[0, 1]`.
    pub fn from_first(q1: T) -> Result<Self> {
        Self::new(q1, T::one() - q1)
    }

    #[inline]
    pub(crate) fn from_parts(q1: T, q2: T) -> Self {
        Self([q1, q2])
    }

    pub fn uniform() -> Self {
        Self([T::half(), T::half()])
    }

    /// All mass on `class`.
    pub fn point(class: Class) -> Self {
        let mut q = [T::zero(); 2];
        q[class.index()] = T::one();
        Self(q)
    }

    #[inline]
    pub fn first(&self) -> T {
        self.0[0]
    }

    #[inline]
    pub fn second(&self) -> T {
        self.0[1]
    }

    #[inline]
    pub fn prob(&self, class: Class) -> T {
        self.0[class.index()]
    }

    #[inline]
    pub fn as_array(&self) -> [T; 2] {
        self.0
    }

    /// Exchanges the two class probabilities (`1 - q`).
    #[inline]
    pub fn swap(self) -> Self {
        Self([self.0[1], self.0[0]])
    }

    /// Pointwise average of two distributions.
    #[inline]
    pub fn midpoint(self, other: Self) -> Self {
        Self([T::half() * (self.0[0] + other.0[0]), T::half() * (self.0[1] + other.0[1])])
    }

    /// Largest absolute component difference.
    #[inline]
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.0[0] - other.0[0]).abs().max((self.0[1] - other.0[1]).abs())
    }

    /// Raises both components to at least `floor` and renormalizes.
    pub fn floored(self, floor: T) -> Self {
        let a = self.0[0].max(floor);
        let b = self.0[1].max(floor);
        let s = a + b;
        Self([a / s, b / s])
    }

    /// Class with the larger probability; ties go to [`Class::One`].
    pub fn argmax(&self) -> Class {
        if self.0[0] >= self.0[1] {
            Class::One
        } else {
            Class::Two
        }
    }
}

/// `swap(q) = (q2, q1)`.
#[inline]
pub fn swap<T: Scalar>(q: Distribution2<T>) -> Distribution2<T> {
    q.swap()
}

/// Kullback-Leibler divergence `Σ p_k ln(p_k / q_k)`.
///
/// Returns `+∞` when `q` assigns zero mass where `p` does not.
pub fn kl<T: Scalar>(p: &Distribution2<T>, q: &Distribution2<T>) -> T {
    T::xlogy_ratio(p.0[0], q.0[0]) + T::xlogy_ratio(p.0[1], q.0[1])
}

/// Jensen-Shannon divergence, `½ KL(p‖m) + ½ KL(q‖m)` with `m = (p + q) / 2`.
pub fn js<T: Scalar>(p: &Distribution2<T>, q: &Distribution2<T>) -> T {
    let m = p.midpoint(*q);
    // m_k = 0 forces p_k = q_k = 0, so the support-mismatch branch never fires
    let value = T::half() * (kl(p, &m) + kl(q, &m));
    value.max(T::zero())
}

/// Fixed distributions of the labeled nodes; `None` marks an unlabeled node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPriors<T> {
    priors: Vec<Option<Distribution2<T>>>,
}

impl<T: Scalar> LabeledPriors<T> {
    pub fn new(priors: Vec<Option<Distribution2<T>>>) -> Self {
        Self { priors }
    }

    /// Point-mass priors for every labeled node.
    pub fn one_hot(labels: &LabelAssignment) -> Self {
        Self { priors: labels.as_slice().iter().map(|c| c.map(Distribution2::point)).collect() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.priors.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<&Distribution2<T>> {
        self.priors[i].as_ref()
    }

    #[inline]
    pub fn is_labeled(&self, i: usize) -> bool {
        self.priors[i].is_some()
    }

    pub fn labeled_count(&self) -> usize {
        self.priors.iter().filter(|p| p.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<&Distribution2<T>>> {
        self.priors.iter().map(Option::as_ref)
    }

    /// Swaps the classes of every prior.
    pub fn flipped(&self) -> Self {
        Self { priors: self.priors.iter().map(|p| p.map(Distribution2::swap)).collect() }
    }
}

/// Regularization weights of the similar and dissimilar terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams<T> {
    pub lambda_s: T,
    pub lambda_d: T,
}

impl<T: Scalar> ObjectiveParams<T> {
    pub fn new(lambda_s: T, lambda_d: T) -> Result<Self> {
        if lambda_s < T::zero() || lambda_d < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "regularization weights must be non-negative, got ({lambda_s}, {lambda_d})"
            )));
        }
        Ok(Self { lambda_s, lambda_d })
    }

    /// `λ_S = λγ`, `λ_D = λ(1 - γ)`.
    pub fn from_gamma(lambda: T, gamma: T) -> Result<Self> {
        Self::new(lambda * gamma, lambda * (T::one() - gamma))
    }
}

/// Mixed-graph information regularization objective:
///
/// ```text
/// Σ_{i∈L} JS(p_i‖q_i) + λ_S Σ_{i→j ∈ S} w_ij JS(q_i‖q_j) + λ_D Σ_{i→j ∈ D} w_ij JS(q_i‖swap(q_j))
/// ```
///
/// Edge sums run over the directed entries of `view`, so each undirected
/// edge contributes once per direction with that direction's weight. With
/// `labeled_fixed` the data-fit sum is dropped.
pub fn objective_eq2<T: Scalar>(
    q: &[Distribution2<T>],
    priors: &LabeledPriors<T>,
    view: &MixedView<T>,
    params: ObjectiveParams<T>,
    labeled_fixed: bool,
) -> Result<T> {
    let n = view.node_count();
    if q.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: q.len() });
    }
    if priors.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: priors.len() });
    }

    let mut fit = T::zero();
    if !labeled_fixed {
        for (i, p) in priors.iter().enumerate() {
            if let Some(p) = p {
                fit = fit + js(p, &q[i]);
            }
        }
    }

    let mut similar = T::zero();
    let mut dissimilar = T::zero();
    for i in 0..n {
        for (j, w) in view.similar.row(i) {
            similar = similar + w * js(&q[i], &q[j]);
        }
        for (j, w) in view.dissimilar.row(i) {
            dissimilar = dissimilar + w * js(&q[i], &q[j].swap());
        }
    }
    Ok(fit + params.lambda_s * similar + params.lambda_d * dissimilar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeKind, EdgeSpec, MixedGraph, SparseUndirectedGraph};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn dist(q1: f64) -> Distribution2<f64> {
        Distribution2::from_first(q1).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution2::new(0.3, 0.7).is_ok());
        assert!(Distribution2::new(0.3, 0.6).is_err());
        assert!(Distribution2::new(-0.1, 1.1).is_err());
        assert!(Distribution2::new(0.5, 0.5 + 1e-10).is_ok());
    }

    #[test]
    fn kl_examples() {
        let p = dist(0.3);
        assert_eq!(kl(&p, &p), 0.0);
        assert!((kl(&dist(1.0), &dist(0.5)) - LN_2).abs() < 1e-15);
        assert_eq!(kl(&dist(1.0), &dist(0.0)), f64::INFINITY);
    }

    #[test]
    fn js_examples() {
        let p = dist(0.3);
        assert_eq!(js(&p, &p), 0.0);
        assert!((js(&dist(1.0), &dist(0.0)) - LN_2).abs() < 1e-15);
        // 30-digit reference: 0.0338220755686052300003735989209
        assert!((js(&dist(0.5), &dist(0.25)) - 0.033_822_075_568_605_23).abs() < 1e-15);
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap(dist(0.3)).as_array(), [0.7, 0.3]);
        let q = dist(0.123);
        assert_eq!(swap(swap(q)), q);
        assert_eq!(swap(dist(0.5)), dist(0.5));
    }

    #[test]
    fn floored_keeps_interior() {
        let q = dist(1.0).floored(1e-12);
        assert!(q.second() >= 1e-12 * (1.0 - 1e-9));
        assert!((q.first() + q.second() - 1.0).abs() < 1e-15);
    }

    fn edge(u: usize, v: usize, kind: EdgeKind) -> EdgeSpec<f64> {
        EdgeSpec::new(u, v, 1.0, kind)
    }

    #[test]
    fn objective_zero_cases() {
        let params = ObjectiveParams::new(1.0, 1.0).unwrap();

        let g = MixedGraph::similar_only(SparseUndirectedGraph::empty(2));
        let priors = LabeledPriors::new(vec![Some(dist(1.0)), Some(dist(0.0))]);
        let q = vec![dist(1.0), dist(0.0)];
        let f = objective_eq2(&q, &priors, &MixedView::normalized(&g), params, false).unwrap();
        assert_eq!(f, 0.0);

        let g = build_graph(2, &[edge(0, 1, EdgeKind::Similar)]).unwrap();
        let q = vec![dist(0.3), dist(0.3)];
        let none = LabeledPriors::new(vec![None, None]);
        let f = objective_eq2(&q, &none, &MixedView::normalized(&g), params, true).unwrap();
        assert_eq!(f, 0.0);

        let g = build_graph(2, &[edge(0, 1, EdgeKind::Dissimilar)]).unwrap();
        let q = vec![dist(0.3), dist(0.7)];
        let f = objective_eq2(&q, &none, &MixedView::normalized(&g), params, true).unwrap();
        assert!(f.abs() < 1e-15);
        let q = vec![dist(0.3), dist(0.3)];
        let f = objective_eq2(&q, &none, &MixedView::normalized(&g), params, true).unwrap();
        assert!(f > 0.0);
    }

    #[test]
    fn objective_counts_both_directions() {
        // node 0 has two neighbors, so w'_01 = 1/2 and w'_10 = 1
        let g = build_graph(3, &[edge(0, 1, EdgeKind::Similar), edge(0, 2, EdgeKind::Similar)]).unwrap();
        let q = vec![dist(0.9), dist(0.2), dist(0.9)];
        let none = LabeledPriors::new(vec![None; 3]);
        let params = ObjectiveParams::new(2.0, 0.0).unwrap();
        let f = objective_eq2(&q, &none, &MixedView::normalized(&g), params, true).unwrap();
        let expected = 2.0 * 1.5 * js(&dist(0.9), &dist(0.2));
        assert!((f - expected).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_missing_nodes() {
        let g = MixedGraph::similar_only(SparseUndirectedGraph::<f64>::empty(3));
        let priors = LabeledPriors::new(vec![None; 3]);
        let err = objective_eq2(
            &[dist(0.5)],
            &priors,
            &MixedView::normalized(&g),
            ObjectiveParams::new(1.0, 1.0).unwrap(),
            true,
        );
        assert_eq!(err, Err(Error::LengthMismatch { expected: 3, actual: 1 }));
    }

    proptest! {
        #[test]
        fn js_symmetric_and_bounded(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (p, q) = (dist(a), dist(b));
            prop_assert!((js(&p, &q) - js(&q, &p)).abs() < 1e-12);
            let v = js(&p, &q);
            prop_assert!((0.0..=LN_2 + 1e-12).contains(&v));
        }

        #[test]
        fn swap_is_involution(a in 0.0f64..=1.0) {
            prop_assert_eq!(swap(swap(dist(a))), dist(a));
        }
    }
}
