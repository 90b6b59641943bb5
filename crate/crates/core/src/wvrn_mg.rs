//! Weighted-vote relational neighbor classification on mixed graphs
//! (WvRN-MG) with annealed relaxation labeling.
//!
//! Similar neighbors vote with their distribution, dissimilar neighbors with
//! the swapped distribution:
//!
//! ```text
//! q̃_ik = (γ Σ_S w_ij q_jk + (1-γ) Σ_D w_ij (1 - q_jk)) / ψ
//! q_ik ← β q̃_ik + (1 - β) q_ik,     β ← β ν after every step
//! ```

use crate::divergence::{Distribution2, LabeledPriors};
use crate::error::{Error, Result};
use crate::graph::{MixedGraph, MixedView};
use crate::propagation::{check_floor, check_gamma, init_state, Propagation, PropagationState};
use crate::scalar::Scalar;

/// Parameters of a WvRN-MG run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig<T> {
    pub gamma: T,
    /// Blend weight of the first step.
    pub beta0: T,
    /// Geometric decay of the blend weight.
    pub nu: T,
    pub epsilon: T,
    pub max_iters: usize,
    pub prob_floor: T,
}

impl<T: Scalar> AnnealConfig<T> {
    pub fn new(gamma: T) -> Self {
        Self {
            gamma,
            beta0: T::one(),
            nu: T::lit(0.95),
            epsilon: T::lit(1e-3),
            max_iters: 1000,
            prob_floor: T::lit(1e-12),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_floor(self.prob_floor)?;
        if !(self.nu > T::zero() && self.nu < T::one()) {
            return Err(Error::InvalidParameter(format!("nu must lie in (0, 1), got {}", self.nu)));
        }
        if !(self.beta0 > T::zero() && self.beta0 <= T::one()) {
            return Err(Error::InvalidParameter(format!("beta0 must lie in (0, 1], got {}", self.beta0)));
        }
        if self.epsilon.is_nan() || self.epsilon <= T::zero() {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Normalized weighted vote of node `i`'s neighbors, or `None` when the vote
/// carries no mass (no edges, or only edges whose graph has zero weight).
pub fn relational_vote<T: Scalar>(
    q: &[Distribution2<T>],
    view: &MixedView<T>,
    gamma: T,
    i: usize,
) -> Option<Distribution2<T>> {
    let (mut s1, mut s2) = (T::zero(), T::zero());
    for (j, w) in view.similar.row(i) {
        s1 = s1 + w * q[j].first();
        s2 = s2 + w * q[j].second();
    }
    let (mut d1, mut d2) = (T::zero(), T::zero());
    for (j, w) in view.dissimilar.row(i) {
        d1 = d1 + w * q[j].second();
        d2 = d2 + w * q[j].first();
    }
    let a = gamma * s1 + (T::one() - gamma) * d1;
    let b = gamma * s2 + (T::one() - gamma) * d2;
    let psi = a + b;
    (psi > T::zero()).then(|| Distribution2::from_parts(a / psi, b / psi))
}

/// One synchronous annealed relaxation-labeling step with blend weight `beta`.
pub fn wvrn_step<T: Scalar>(
    state: &PropagationState<T>,
    view: &MixedView<T>,
    priors: &LabeledPriors<T>,
    cfg: &AnnealConfig<T>,
    beta: T,
) -> PropagationState<T> {
    let q = &state.q;
    let mut next = q.clone();
    let mut max_delta = T::zero();
    for i in 0..q.len() {
        if priors.is_labeled(i) {
            continue;
        }
        let Some(vote) = relational_vote(q, view, cfg.gamma, i) else {
            continue;
        };
        let keep = T::one() - beta;
        let mut updated = Distribution2::from_parts(
            beta * vote.first() + keep * q[i].first(),
            beta * vote.second() + keep * q[i].second(),
        );
        if updated.first() < cfg.prob_floor || updated.second() < cfg.prob_floor {
            updated = updated.floored(cfg.prob_floor);
        }
        max_delta = max_delta.max(updated.max_abs_diff(&q[i]));
        next[i] = updated;
    }
    PropagationState { q: next, iteration: state.iteration + 1, max_delta }
}

/// Runs WvRN-MG from the class-prior initialization on per-graph normalized
/// weights.
pub fn wvrn_run<T: Scalar>(
    g: &MixedGraph<T>,
    priors: &LabeledPriors<T>,
    cfg: &AnnealConfig<T>,
) -> Result<Propagation<T>> {
    cfg.validate()?;
    let view = MixedView::normalized(g);
    let mut state = init_state(g, priors, cfg.prob_floor)?;
    let mut beta = cfg.beta0;
    let mut converged = false;
    while state.iteration < cfg.max_iters {
        state = wvrn_step(&state, &view, priors, cfg, beta);
        beta = beta * cfg.nu;
        if state.max_delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(Propagation { posteriors: state.q, iterations: state.iteration, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Class, EdgeKind, EdgeSpec, LabelAssignment};

    fn dist(q1: f64) -> Distribution2<f64> {
        Distribution2::from_first(q1).unwrap()
    }

    fn close(a: Distribution2<f64>, b: [f64; 2], tol: f64) -> bool {
        (a.first() - b[0]).abs() < tol && (a.second() - b[1]).abs() < tol
    }

    /// Node 0 unlabeled; nodes 1, 2 similar neighbors and node 3 a dissimilar
    /// neighbor, all labeled class 1, unit weights.
    fn vote_fixture() -> (MixedView<f64>, LabeledPriors<f64>, Vec<Distribution2<f64>>) {
        let g = build_graph(
            4,
            &[
                EdgeSpec::new(0, 1, 1.0, EdgeKind::Similar),
                EdgeSpec::new(0, 2, 1.0, EdgeKind::Similar),
                EdgeSpec::new(0, 3, 1.0, EdgeKind::Dissimilar),
            ],
        )
        .unwrap();
        let labels = LabelAssignment::from_options(vec![None, Some(Class::One), Some(Class::One), Some(Class::One)]);
        let q = vec![dist(0.5), dist(1.0), dist(1.0), dist(1.0)];
        (MixedView::raw(&g), LabeledPriors::one_hot(&labels), q)
    }

    #[test]
    fn step_raw_weight_vote() {
        let (view, priors, q) = vote_fixture();
        let state = PropagationState { q, iteration: 0, max_delta: f64::INFINITY };
        let cfg = AnnealConfig::new(0.5);
        let next = wvrn_step(&state, &view, &priors, &cfg, 1.0);
        assert!(close(next.q[0], [2.0 / 3.0, 1.0 / 3.0], 1e-15));

        let half = wvrn_step(&state, &view, &priors, &cfg, 0.5);
        assert!(close(half.q[0], [7.0 / 12.0, 5.0 / 12.0], 1e-15));
        assert_eq!(half.q[1], dist(1.0));
    }

    #[test]
    fn pure_homophily_vote() {
        let (view, _, q) = vote_fixture();
        let vote = relational_vote(&q, &view, 1.0, 0).unwrap();
        assert_eq!(vote.as_array(), [1.0, 0.0]);
    }

    #[test]
    fn star_leaves_follow_hub() {
        let edges: Vec<_> = (1..6).map(|j| EdgeSpec::new(0, j, 1.0, EdgeKind::Similar)).collect();
        let g = build_graph(7, &edges).unwrap();
        let mut labels = LabelAssignment::unlabeled(7);
        labels.set(0, Some(Class::One));
        labels.set(6, Some(Class::Two));
        let out = wvrn_run(&g, &LabeledPriors::one_hot(&labels), &AnnealConfig::new(1.0)).unwrap();
        assert!(out.converged);
        for i in 1..6 {
            assert!(out.posteriors[i].first() > 0.99);
        }
    }

    #[test]
    fn symmetric_conflict_stays_uniform() {
        let g = build_graph(
            3,
            &[EdgeSpec::new(0, 1, 1.0, EdgeKind::Dissimilar), EdgeSpec::new(0, 2, 1.0, EdgeKind::Dissimilar)],
        )
        .unwrap();
        let labels = LabelAssignment::from_options(vec![None, Some(Class::One), Some(Class::Two)]);
        let out = wvrn_run(&g, &LabeledPriors::one_hot(&labels), &AnnealConfig::new(0.0)).unwrap();
        assert!(close(out.posteriors[0], [0.5, 0.5], 1e-15));
    }

    #[test]
    fn isolated_node_keeps_prior() {
        let g = build_graph(3, &[EdgeSpec::new(0, 1, 1.0, EdgeKind::Similar)]).unwrap();
        let labels = LabelAssignment::from_options(vec![Some(Class::One), None, None]);
        let out = wvrn_run(&g, &LabeledPriors::one_hot(&labels), &AnnealConfig::new(1.0)).unwrap();
        // single-class prior, clamped
        assert!(out.posteriors[2].first() > 0.999);
        assert!(out.posteriors[2].second() > 0.0);
    }

    #[test]
    fn validation() {
        let mut cfg = AnnealConfig::<f64>::new(0.5);
        cfg.nu = 1.0;
        assert!(cfg.validate().is_err());
        cfg.nu = 0.95;
        cfg.beta0 = 0.0;
        assert!(cfg.validate().is_err());
    }
}
