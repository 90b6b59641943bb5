//! Single-graph methods the mixed-graph algorithms reduce to: plain
//! information regularization and classic WvRN with relaxation labeling.
//!
//! Both assume every edge is a similar edge. They share no update code with
//! [`crate::ir_mg`] or [`crate::wvrn_mg`].

use crate::divergence::{Distribution2, LabeledPriors};
use crate::error::{Error, Result};
use crate::graph::{row_normalize, SparseUndirectedGraph};
use crate::propagation::{class_prior, Propagation};
use crate::scalar::Scalar;

fn initial<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    priors: &LabeledPriors<T>,
    floor: T,
) -> Result<Vec<Distribution2<T>>> {
    if priors.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), actual: priors.len() });
    }
    let prior = class_prior(priors, floor)?;
    Ok(priors.iter().map(|p| p.copied().unwrap_or(prior)).collect())
}

/// Information regularization on a similar-only graph.
///
/// Each unlabeled node moves to the weighted geometric mean of the midpoints
/// `½(q_i + q_j)` over its neighbors, with edge weight `w'_ij + w'_ji` from
/// the degree-normalized graph.
pub fn information_regularization<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    priors: &LabeledPriors<T>,
    epsilon: T,
    max_iters: usize,
    floor: T,
) -> Result<Propagation<T>> {
    let w = row_normalize(g);
    let n = g.node_count();
    let mut q = initial(g, priors, floor)?;
    let mut iterations = 0;
    while iterations < max_iters {
        let mut next = q.clone();
        let mut delta = T::zero();
        for i in (0..n).filter(|&i| !priors.is_labeled(i)) {
            let mut total = T::zero();
            let mut log_u = [T::zero(); 2];
            for (j, wij) in w.row(i) {
                let c = wij + w.weight(j, i).unwrap_or_else(T::zero);
                if c <= T::zero() {
                    continue;
                }
                total = total + c;
                for (k, acc) in log_u.iter_mut().enumerate() {
                    let u = T::half() * (q[i].as_array()[k] + q[j].as_array()[k]);
                    *acc = *acc + c * u.ln();
                }
            }
            if total <= T::zero() {
                continue;
            }
            let (a, b) = (log_u[0] / total, log_u[1] / total);
            let m = a.max(b);
            let (ea, eb) = ((a - m).exp(), (b - m).exp());
            let updated = Distribution2::from_parts(ea / (ea + eb), eb / (ea + eb)).floored(floor);
            delta = delta.max(updated.max_abs_diff(&q[i]));
            next[i] = updated;
        }
        q = next;
        iterations += 1;
        if delta < epsilon {
            return Ok(Propagation { posteriors: q, iterations, converged: true });
        }
    }
    Ok(Propagation { posteriors: q, iterations, converged: false })
}

/// WvRN with annealed relaxation labeling on a similar-only graph.
pub fn weighted_vote_relaxation<T: Scalar>(
    g: &SparseUndirectedGraph<T>,
    priors: &LabeledPriors<T>,
    beta0: T,
    nu: T,
    epsilon: T,
    max_iters: usize,
    floor: T,
) -> Result<Propagation<T>> {
    let n = g.node_count();
    let mut q = initial(g, priors, floor)?;
    let mut beta = beta0;
    let mut iterations = 0;
    while iterations < max_iters {
        let mut next = q.clone();
        let mut delta = T::zero();
        for i in (0..n).filter(|&i| !priors.is_labeled(i)) {
            let mut vote = [T::zero(); 2];
            for (j, wij) in g.neighbors(i) {
                vote[0] = vote[0] + wij * q[j].first();
                vote[1] = vote[1] + wij * q[j].second();
            }
            let psi = vote[0] + vote[1];
            if psi <= T::zero() {
                continue;
            }
            let blend = |k: usize| beta * vote[k] / psi + (T::one() - beta) * q[i].as_array()[k];
            let mut updated = Distribution2::from_parts(blend(0), blend(1));
            if updated.first() < floor || updated.second() < floor {
                updated = updated.floored(floor);
            }
            delta = delta.max(updated.max_abs_diff(&q[i]));
            next[i] = updated;
        }
        q = next;
        beta = beta * nu;
        iterations += 1;
        if delta < epsilon {
            return Ok(Propagation { posteriors: q, iterations, converged: true });
        }
    }
    Ok(Propagation { posteriors: q, iterations, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Class, LabelAssignment};

    #[test]
    fn ir_path_graph_follows_label() {
        let g = SparseUndirectedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let labels = LabelAssignment::from_options(vec![Some(Class::Two), None, Some(Class::Two)]);
        let out = information_regularization(&g, &LabeledPriors::one_hot(&labels), 1e-3, 1000, 1e-12).unwrap();
        assert!(out.posteriors[1].second() > 0.99);
    }

    #[test]
    fn wvrn_splits_between_opposite_labels() {
        let g = SparseUndirectedGraph::<f64>::from_edges(3, vec![(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let labels = LabelAssignment::from_options(vec![Some(Class::One), None, Some(Class::Two)]);
        let out = weighted_vote_relaxation(&g, &LabeledPriors::one_hot(&labels), 1.0, 0.95, 1e-3, 1000, 1e-12).unwrap();
        assert!((out.posteriors[1].first() - 0.25).abs() < 1e-12);
    }
}
