//! State and initialization shared by the propagation algorithms, plus a
//! method-agnostic entry point used by the evaluation harness.

use serde::{Deserialize, Serialize};

use crate::divergence::{Distribution2, LabeledPriors};
use crate::error::{Error, Result};
use crate::graph::MixedGraph;
use crate::scalar::Scalar;
use crate::{ir_mg, wvrn_mg};

/// Per-node distributions during propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationState<T> {
    pub q: Vec<Distribution2<T>>,
    pub iteration: usize,
    /// Largest component change over unlabeled nodes in the last step.
    pub max_delta: T,
}

/// Final posteriors of a propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation<T> {
    pub posteriors: Vec<Distribution2<T>>,
    pub iterations: usize,
    /// False iff the iteration cap was hit.
    pub converged: bool,
}

/// Empirical class prior of the labeled nodes.
///
/// A prior with a vanishing component (all labels from one class) is pushed
/// to `prob_floor` so the algorithms stay in the interior of the simplex.
pub fn class_prior<T: Scalar>(priors: &LabeledPriors<T>, prob_floor: T) -> Result<Distribution2<T>> {
    let labeled: Vec<_> = priors.iter().flatten().collect();
    if labeled.is_empty() {
        return Err(Error::NoLabeledNodes);
    }
    let count = T::from_usize(labeled.len()).unwrap();
    let q1 = labeled.iter().map(|p| p.first()).sum::<T>() / count;
    let q2 = labeled.iter().map(|p| p.second()).sum::<T>() / count;
    let prior = Distribution2::from_parts(q1, q2);
    if q1 < prob_floor || q2 < prob_floor {
        log::warn!("labeled nodes cover a single class; clamping the class prior to the probability floor");
        return Ok(prior.floored(prob_floor));
    }
    Ok(prior)
}

/// Labeled nodes take their priors, unlabeled nodes the class prior.
pub fn init_state<T: Scalar>(
    g: &MixedGraph<T>,
    priors: &LabeledPriors<T>,
    prob_floor: T,
) -> Result<PropagationState<T>> {
    if priors.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), actual: priors.len() });
    }
    let prior = class_prior(priors, prob_floor)?;
    let q = priors.iter().map(|p| p.copied().unwrap_or(prior)).collect();
    Ok(PropagationState { q, iteration: 0, max_delta: T::infinity() })
}

pub(crate) fn check_floor<T: Scalar>(prob_floor: T) -> Result<()> {
    if prob_floor > T::zero() && prob_floor < T::half() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("prob_floor must lie in (0, 0.5), got {prob_floor}")))
    }
}

pub(crate) fn check_gamma<T: Scalar>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && gamma <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma must lie in [0, 1], got {gamma}")))
    }
}

/// Propagation algorithm for mixed graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ir-mg")]
    IrMg,
    #[serde(rename = "wvrn-mg")]
    WvrnMg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::IrMg => "ir-mg",
            Method::WvrnMg => "wvrn-mg",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ir-mg" | "irmg" => Ok(Method::IrMg),
            "wvrn-mg" | "wvrnmg" => Ok(Method::WvrnMg),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Everything but γ needed to run either method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationSettings {
    pub epsilon: f64,
    pub max_iters: usize,
    pub prob_floor: f64,
    /// Annealing rate (WvRN-MG only).
    pub nu: f64,
    /// Initial blend weight (WvRN-MG only).
    pub beta0: f64,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self { epsilon: 1e-3, max_iters: 1000, prob_floor: 1e-12, nu: 0.95, beta0: 1.0 }
    }
}

impl Method {
    pub fn run<T: Scalar>(
        self,
        g: &MixedGraph<T>,
        priors: &LabeledPriors<T>,
        gamma: T,
        settings: &PropagationSettings,
    ) -> Result<Propagation<T>> {
        match self {
            Method::IrMg => {
                let cfg = ir_mg::PropagationConfig {
                    gamma,
                    epsilon: T::lit(settings.epsilon),
                    max_iters: settings.max_iters,
                    prob_floor: T::lit(settings.prob_floor),
                };
                ir_mg::ir_run(g, priors, &cfg)
            }
            Method::WvrnMg => {
                let cfg = wvrn_mg::AnnealConfig {
                    gamma,
                    beta0: T::lit(settings.beta0),
                    nu: T::lit(settings.nu),
                    epsilon: T::lit(settings.epsilon),
                    max_iters: settings.max_iters,
                    prob_floor: T::lit(settings.prob_floor),
                };
                wvrn_mg::wvrn_run(g, priors, &cfg)
            }
        }
    }
}
