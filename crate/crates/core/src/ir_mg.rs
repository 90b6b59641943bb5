//! Information regularization on mixed graphs (IR-MG).
//!
//! Labeled distributions stay fixed. Each step computes, from the frozen
//! estimates `q⁽ᵗ⁾`, the edge midpoints
//!
//! ```text
//! u_ij = ½(q_i + q_j)        on similar edges
//! z_ij = ½(q_i + 1 - q_j)    on dissimilar edges
//! ```
//!
//! and moves every unlabeled node to the normalized weighted geometric mean
//! of its `u` and `z` vectors. This is an exact alternating minimization of
//! the objective in [`crate::divergence::objective_eq2`] with `λ_S = γ` and
//! `λ_D = 1 - γ`, so the objective never increases.

use crate::divergence::{Distribution2, LabeledPriors};
use crate::error::{Error, Result};
use crate::graph::{MixedGraph, MixedView};
use crate::propagation::{check_floor, check_gamma, init_state, Propagation, PropagationState};
use crate::scalar::Scalar;

/// Parameters of an IR-MG run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig<T> {
    /// Weight of the similar graph; `1 - gamma` goes to the dissimilar graph.
    pub gamma: T,
    pub epsilon: T,
    pub max_iters: usize,
    pub prob_floor: T,
}

impl<T: Scalar> PropagationConfig<T> {
    pub fn new(gamma: T) -> Self {
        Self { gamma, epsilon: T::lit(1e-3), max_iters: 1000, prob_floor: T::lit(1e-12) }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_floor(self.prob_floor)?;
        if self.epsilon.is_nan() || self.epsilon <= T::zero() {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One coupling term of a node's update.
#[derive(Debug, Clone, Copy)]
struct Term<T> {
    neighbor: usize,
    coef: T,
    dissimilar: bool,
}

/// Per-node update coefficients for a fixed γ.
///
/// An undirected edge enters node `i`'s update with weight `w'_ij + w'_ji`
/// (both directed terms of the objective touch `q_i`), scaled by `γ` or
/// `1 - γ`. The exponent is divided by the node's total coefficient.
struct Coupling<T> {
    offsets: Vec<usize>,
    terms: Vec<Term<T>>,
    total: Vec<T>,
}

impl<T: Scalar> Coupling<T> {
    fn new(view: &MixedView<T>, gamma: T) -> Self {
        let n = view.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut terms = Vec::new();
        let mut total = Vec::with_capacity(n);
        offsets.push(0);
        let parts = [(&view.similar, gamma, false), (&view.dissimilar, T::one() - gamma, true)];
        for i in 0..n {
            let mut sum = T::zero();
            for (weights, scale, dissimilar) in parts {
                for (j, w) in weights.row(i) {
                    let back = weights.weight(j, i).unwrap_or_else(T::zero);
                    let coef = scale * (w + back);
                    if coef > T::zero() {
                        terms.push(Term { neighbor: j, coef, dissimilar });
                        sum = sum + coef;
                    }
                }
            }
            total.push(sum);
            offsets.push(terms.len());
        }
        Self { offsets, terms, total }
    }

    fn step(&self, state: &PropagationState<T>, priors: &LabeledPriors<T>, prob_floor: T) -> PropagationState<T> {
        let q = &state.q;
        let mut next = q.clone();
        let mut max_delta = T::zero();
        for i in 0..q.len() {
            if priors.is_labeled(i) || self.total[i] <= T::zero() {
                continue;
            }
            // exp(Σ c ln v_k) / ψ for k = 1, 2 equals a logistic function of
            // the weighted log-ratio, which avoids overflow in exp
            let mut log_ratio = T::zero();
            for t in &self.terms[self.offsets[i]..self.offsets[i + 1]] {
                let other = if t.dissimilar { q[t.neighbor].swap() } else { q[t.neighbor] };
                let v = q[i].midpoint(other);
                log_ratio = log_ratio + t.coef * (v.first() / v.second()).ln();
            }
            let a = log_ratio / self.total[i];
            let q1 = T::one() / (T::one() + (-a).exp());
            let q2 = T::one() / (T::one() + a.exp());
            let mut updated = Distribution2::from_parts(q1 / (q1 + q2), q2 / (q1 + q2));
            if updated.first() < prob_floor || updated.second() < prob_floor {
                updated = updated.floored(prob_floor);
            }
            max_delta = max_delta.max(updated.max_abs_diff(&q[i]));
            next[i] = updated;
        }
        PropagationState { q: next, iteration: state.iteration + 1, max_delta }
    }
}

/// One synchronous IR-MG update over all unlabeled nodes.
///
/// `view` holds the per-graph normalized weights. Labeled nodes, and nodes
/// without any edge carrying positive coefficient, are left unchanged.
pub fn ir_step<T: Scalar>(
    state: &PropagationState<T>,
    view: &MixedView<T>,
    priors: &LabeledPriors<T>,
    cfg: &PropagationConfig<T>,
) -> PropagationState<T> {
    Coupling::new(view, cfg.gamma).step(state, priors, cfg.prob_floor)
}

/// Runs IR-MG from the class-prior initialization until the largest change
/// drops below `epsilon` or `max_iters` steps have been taken.
pub fn ir_run<T: Scalar>(
    g: &MixedGraph<T>,
    priors: &LabeledPriors<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Propagation<T>> {
    let mut trace = |_: &PropagationState<T>| {};
    ir_run_traced(g, priors, cfg, &mut trace)
}

/// [`ir_run`] with a callback invoked on the initial state and after every step.
pub fn ir_run_traced<T: Scalar>(
    g: &MixedGraph<T>,
    priors: &LabeledPriors<T>,
    cfg: &PropagationConfig<T>,
    observe: &mut dyn FnMut(&PropagationState<T>),
) -> Result<Propagation<T>> {
    cfg.validate()?;
    let view = MixedView::normalized(g);
    let coupling = Coupling::new(&view, cfg.gamma);
    let mut state = init_state(g, priors, cfg.prob_floor)?;
    observe(&state);
    let mut converged = false;
    while state.iteration < cfg.max_iters {
        state = coupling.step(&state, priors, cfg.prob_floor);
        observe(&state);
        if state.max_delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(Propagation { posteriors: state.q, iterations: state.iteration, converged })
}
