//! The `evaluate` input and output documents.

use std::path::{Path, PathBuf};

use mixgraph::{
    CvConfig, ExperimentSpec, ExperimentSummary, ExtractionModel, GammaPolicy, Method, PropagationSettings,
    RealizationResult, Sigma,
};
use serde::{Deserialize, Deserializer, Serialize};

use crate::formats::{parse_sigma, round6};
use crate::manifest::RunManifest;

/// A single value or a list; lists are swept.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

fn sigma_field<'de, D: Deserializer<'de>>(d: D) -> Result<Sigma<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Value(f64),
        Name(String),
    }
    let text = match Repr::deserialize(d)? {
        Repr::Value(v) => v.to_string(),
        Repr::Name(s) => s,
    };
    parse_sigma(&text).map_err(serde::de::Error::custom)
}

fn auto() -> Sigma<f64> {
    Sigma::Auto
}

/// Where the graph comes from. Relative paths resolve against the spec
/// file's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// Two-Gaussian data with a kNN graph built in memory.
    Generated {
        #[serde(default = "defaults::n")]
        n: usize,
        #[serde(default = "defaults::d")]
        d: usize,
        #[serde(default = "defaults::bayes_error")]
        bayes_error: f64,
        #[serde(default = "defaults::balance")]
        balance: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "defaults::k")]
        k: usize,
        #[serde(default = "auto", deserialize_with = "sigma_field")]
        sigma: Sigma<f64>,
    },
    /// Features file turned into a kNN graph.
    Features {
        features: PathBuf,
        labels: PathBuf,
        k: usize,
        #[serde(default = "auto", deserialize_with = "sigma_field")]
        sigma: Sigma<f64>,
    },
    /// Edges file. With only S edges each realization extracts a mixed graph;
    /// with any D edge the file is used as the mixed graph directly.
    Edges { edges: PathBuf, labels: PathBuf },
}

pub mod defaults {
    pub fn n() -> usize {
        550
    }
    pub fn d() -> usize {
        50
    }
    pub fn bayes_error() -> f64 {
        0.05
    }
    pub fn balance() -> f64 {
        0.5
    }
    pub fn k() -> usize {
        50
    }
}

fn one_realization_count() -> usize {
    25
}

fn zero_percent() -> OneOrMany<f64> {
    OneOrMany::One(0.0)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSpec {
    pub dataset: DatasetSpec,
    pub method: OneOrMany<Method>,
    pub num_labeled: OneOrMany<usize>,
    #[serde(default = "zero_percent")]
    pub p_percent: OneOrMany<f64>,
    pub gamma_policy: OneOrMany<GammaPolicy>,
    #[serde(default = "one_realization_count")]
    pub realizations: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub model: ExtractionModel,
    #[serde(default)]
    pub settings: PropagationSettings,
    #[serde(default)]
    pub cv: CvConfig,
}

impl EvaluateSpec {
    /// Sweep in method, num_labeled, p_percent, gamma_policy order (last varies fastest).
    pub fn experiments(&self) -> Vec<ExperimentSpec> {
        let mut out = Vec::new();
        for method in self.method.to_vec() {
            for l in self.num_labeled.to_vec() {
                for p in self.p_percent.to_vec() {
                    for policy in self.gamma_policy.to_vec() {
                        out.push(ExperimentSpec {
                            method,
                            num_labeled: l,
                            p_percent: p,
                            gamma_policy: policy,
                            realizations: self.realizations,
                            base_seed: self.base_seed,
                            model: self.model,
                            settings: self.settings,
                            cv: self.cv.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Input files named by the dataset, resolved against `base`.
    pub fn input_files(&self, base: &Path) -> Vec<PathBuf> {
        match &self.dataset {
            DatasetSpec::Generated { .. } => Vec::new(),
            DatasetSpec::Features { features, labels, .. } => vec![base.join(features), base.join(labels)],
            DatasetSpec::Edges { edges, labels } => vec![base.join(edges), base.join(labels)],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizationReport {
    pub auc: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gamma_used: f64,
}

impl From<&RealizationResult> for RealizationReport {
    fn from(r: &RealizationResult) -> Self {
        Self { auc: round6(r.auc), iterations: r.iterations, converged: r.converged, gamma_used: round6(r.gamma_used) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub method: Method,
    pub num_labeled: usize,
    pub p_percent: f64,
    pub gamma_policy: GammaPolicy,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub realizations: Vec<RealizationReport>,
}

impl RunReport {
    pub fn new(spec: &ExperimentSpec, summary: &ExperimentSummary) -> Self {
        Self {
            method: spec.method,
            num_labeled: spec.num_labeled,
            p_percent: spec.p_percent,
            gamma_policy: spec.gamma_policy,
            mean_auc: round6(summary.mean_auc),
            std_auc: round6(summary.std_auc),
            realizations: summary.realizations.iter().map(RealizationReport::from).collect(),
        }
    }
}

/// `evaluate` output. A single-configuration sweep also exposes its numbers
/// at the top level.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<Vec<RealizationReport>>,
    pub runs: Vec<RunReport>,
    pub manifest: RunManifest,
}

impl Report {
    pub fn new(runs: Vec<RunReport>, manifest: RunManifest) -> Self {
        let single = (runs.len() == 1).then(|| runs[0].clone());
        Self {
            mean_auc: single.as_ref().map(|r| r.mean_auc),
            std_auc: single.as_ref().map(|r| r.std_auc),
            realizations: single.map(|r| r.realizations),
            runs,
            manifest,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweeps_and_defaults() {
        let spec: EvaluateSpec = serde_json::from_str(
            r#"{
                "dataset": {"kind": "generated", "seed": 3, "sigma": 1.5},
                "method": ["ir-mg", "wvrn-mg"],
                "num_labeled": 50,
                "p_percent": [5, 10],
                "gamma_policy": ["cv", 0.5]
            }"#,
        )
        .unwrap();
        assert_eq!(
            spec.dataset,
            DatasetSpec::Generated {
                n: 550,
                d: 50,
                bayes_error: 0.05,
                balance: 0.5,
                seed: 3,
                k: 50,
                sigma: Sigma::Fixed(1.5)
            }
        );
        assert_eq!(spec.realizations, 25);
        let runs = spec.experiments();
        assert_eq!(runs.len(), 8);
        assert_eq!(runs[1].gamma_policy, GammaPolicy::Fixed(0.5));
        assert_eq!(runs[2].p_percent, 10.0);
        assert_eq!(runs[4].method, Method::WvrnMg);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = r#"{"dataset": {"kind": "edges", "edges": "e", "labels": "l", "k": 3},
                      "method": "ir-mg", "num_labeled": 4, "gamma_policy": "nac"}"#;
        assert!(serde_json::from_str::<EvaluateSpec>(bad).is_err());
    }
}
