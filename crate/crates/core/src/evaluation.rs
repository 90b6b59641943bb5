//! AUC scoring, stratified labeling, cross-validated γ selection, the
//! multi-realization experiment runner and a brute-force objective oracle.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::assortativity::{gamma_from_nac, graph_nac};
use crate::construction::{extract_mixed, seeded_rng, ExtractionModel, ExtractionSpec};
use crate::divergence::{objective_eq2, Distribution2, LabeledPriors, ObjectiveParams};
use crate::error::{Error, Result};
use crate::graph::{Class, LabelAssignment, MixedGraph, MixedView, NodeId, SparseUndirectedGraph};
use crate::propagation::{Method, PropagationSettings};
use crate::scalar::Scalar;

/// Area under the ROC curve in Mann-Whitney form: the probability that a
/// random positive scores above a random negative, ties counting one half.
pub fn auc<T: Scalar>(scores: &[T], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::LengthMismatch { expected: scores.len(), actual: positive.len() });
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass("AUC needs at least one positive and one negative".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(std::cmp::Ordering::Equal));

    // sum of 1-based mid-ranks of the positives
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        rank_sum += mid_rank * order[start..end].iter().filter(|&&k| positive[k]).count() as f64;
        start = end;
    }
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// AUC of `posteriors` restricted to `nodes`, scoring by the probability of
/// `positive_class`.
pub fn auc_on_nodes<T: Scalar>(
    posteriors: &[Distribution2<T>],
    truth: &[Class],
    nodes: &[NodeId],
    positive_class: Class,
) -> Result<f64> {
    let scores: Vec<T> = nodes.iter().map(|n| posteriors[n.0].prob(positive_class)).collect();
    let positive: Vec<bool> = nodes.iter().map(|n| truth[n.0] == positive_class).collect();
    auc(&scores, &positive)
}

/// Draws `l` nodes preserving class proportions.
///
/// Each class receives `⌊l · n_c / n⌋` nodes, the rounding remainder goes to
/// the larger class, and both classes receive at least one node.
pub fn stratified_sample(truth: &[Class], l: usize, seed: u64) -> Result<Vec<NodeId>> {
    let n = truth.len();
    if l < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 labeled nodes, got {l}")));
    }
    if l > n {
        return Err(Error::InvalidParameter(format!("cannot label {l} of {n} nodes")));
    }
    let members: [Vec<usize>; 2] = Class::BOTH.map(|c| (0..n).filter(|&i| truth[i] == c).collect());
    let sizes = [members[0].len(), members[1].len()];
    if sizes[0] == 0 || sizes[1] == 0 {
        return Err(Error::SingleClass("stratified sampling needs both classes".into()));
    }

    let mut quota = [l * sizes[0] / n, l * sizes[1] / n];
    let larger = if sizes[0] >= sizes[1] { 0 } else { 1 };
    quota[larger] += l - quota[0] - quota[1];
    for c in 0..2 {
        if quota[c] == 0 {
            quota[c] = 1;
            quota[1 - c] -= 1;
        }
    }
    for c in 0..2 {
        if quota[c] > sizes[c] {
            let excess = quota[c] - sizes[c];
            quota[c] = sizes[c];
            quota[1 - c] += excess;
        }
    }

    let mut rng = seeded_rng(seed);
    let mut picked: Vec<NodeId> = Vec::with_capacity(l);
    for c in 0..2 {
        picked.extend(index::sample(&mut rng, sizes[c], quota[c]).into_iter().map(|k| NodeId(members[c][k])));
    }
    picked.sort_unstable();
    Ok(picked)
}

/// How γ is chosen for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPolicy {
    Fixed(f64),
    /// NAC-based estimate, falling back to cross-validation when unusable.
    Nac,
    Cv,
}

impl FromStr for GammaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nac" => Ok(Self::Nac),
            "cv" => Ok(Self::Cv),
            other => other.parse::<f64>().ok().filter(|g| (0.0..=1.0).contains(g)).map(Self::Fixed).ok_or_else(|| {
                Error::InvalidParameter(format!("gamma must be nac, cv or a value in [0, 1], got {s:?}"))
            }),
        }
    }
}

impl fmt::Display for GammaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(g) => write!(f, "{g}"),
            Self::Nac => f.write_str("nac"),
            Self::Cv => f.write_str("cv"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GammaRepr {
    Value(f64),
    Name(String),
}

impl Serialize for GammaPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Fixed(g) => GammaRepr::Value(*g),
            other => GammaRepr::Name(other.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GammaPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match GammaRepr::deserialize(d)? {
            GammaRepr::Value(g) => g.to_string(),
            GammaRepr::Name(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Cross-validation settings for γ selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub grid: Vec<f64>,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { folds: 5, grid: (0..=10).map(|k| k as f64 / 10.0).collect() }
    }
}

/// Picks γ from `cfg.grid` by stratified k-fold cross-validation over the
/// labeled nodes.
///
/// Each fold's labels are hidden (its nodes become unlabeled), the method is
/// run, and the fold is scored by AUC. The γ with the best mean AUC wins;
/// ties go to the γ nearest 0.5, then to the smaller γ. Folds lacking one of
/// the classes are skipped.
pub fn cv_gamma<T: Scalar>(
    g: &MixedGraph<T>,
    labels: &LabelAssignment,
    method: Method,
    settings: &PropagationSettings,
    cfg: &CvConfig,
    seed: u64,
) -> Result<f64> {
    if cfg.grid.is_empty() {
        return Err(Error::InvalidParameter("empty gamma grid".into()));
    }
    if let Some(g) = cfg.grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::InvalidParameter(format!("grid value {g} outside [0, 1]")));
    }
    let labeled = labels.labeled_nodes();
    if cfg.folds < 2 || labeled.len() < cfg.folds {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= folds <= labeled nodes, got {} folds for {} labeled nodes",
            cfg.folds,
            labeled.len()
        )));
    }
    if cfg.grid.len() == 1 {
        return Ok(cfg.grid[0]);
    }

    let mut rng = seeded_rng(seed);
    let mut folds: Vec<Vec<NodeId>> = vec![Vec::new(); cfg.folds];
    let mut slot = 0;
    for class in Class::BOTH {
        let mut members: Vec<NodeId> = labeled.iter().copied().filter(|n| labels.get(n.0) == Some(class)).collect();
        members.shuffle(&mut rng);
        for node in members {
            folds[slot % cfg.folds].push(node);
            slot += 1;
        }
    }

    let truth: Vec<Class> = (0..labels.len()).map(|i| labels.get(i).unwrap_or(Class::One)).collect();
    let usable: Vec<(LabeledPriors<T>, &Vec<NodeId>)> = folds
        .iter()
        .enumerate()
        .filter_map(|(k, fold)| {
            let counts = Class::BOTH.map(|c| fold.iter().filter(|n| truth[n.0] == c).count());
            if counts.contains(&0) {
                log::warn!("cross-validation fold {k} lacks a class; skipping it");
                return None;
            }
            let mut train = labels.clone();
            for n in fold {
                train.set(n.0, None);
            }
            if train.labeled_nodes().is_empty() {
                log::warn!("cross-validation fold {k} leaves no training labels; skipping it");
                return None;
            }
            Some((LabeledPriors::one_hot(&train), fold))
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::AllFoldsSkipped);
    }

    let jobs: Vec<(usize, usize)> =
        (0..cfg.grid.len()).flat_map(|gi| (0..usable.len()).map(move |fi| (gi, fi))).collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(gi, fi)| {
            let (priors, fold) = &usable[fi];
            let out = method.run(g, priors, T::lit(cfg.grid[gi]), settings)?;
            auc_on_nodes(&out.posteriors, &truth, fold, Class::One)
        })
        .collect::<Result<_>>()?;

    let per_fold = usable.len() as f64;
    let mut best: Option<(f64, f64)> = None;
    for (gi, &gamma) in cfg.grid.iter().enumerate() {
        let mean = scores[gi * usable.len()..(gi + 1) * usable.len()].iter().sum::<f64>() / per_fold;
        let better = match best {
            None => true,
            Some((best_gamma, best_mean)) => {
                if (mean - best_mean).abs() > 1e-12 {
                    mean > best_mean
                } else {
                    let (d, bd) = ((gamma - 0.5).abs(), (best_gamma - 0.5).abs());
                    d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && gamma < best_gamma)
                }
            }
        };
        if better {
            best = Some((gamma, mean));
        }
    }
    Ok(best.unwrap().0)
}

/// γ estimate from the NAC of both graphs on labeled-labeled edges.
///
/// A dissimilar graph without any labeled-labeled edge (the usual case for
/// oracle-extracted graphs, which touch only unlabeled nodes) is taken to be
/// pure, `N_D = -1`.
pub fn nac_gamma<T: Scalar>(g: &MixedGraph<T>, labels: &LabelAssignment) -> Result<f64> {
    let n_s = graph_nac(g.similar(), labels, true)?;
    let n_d = match graph_nac(g.dissimilar(), labels, true) {
        Ok(v) => v,
        Err(Error::NacUndefined(reason)) => {
            log::debug!("dissimilar NAC undefined ({reason}); assuming a pure dissimilar graph");
            -T::one()
        }
        Err(e) => return Err(e),
    };
    Ok(gamma_from_nac(n_s, n_d)?.to_f64_lossy())
}

/// Resolves `policy` to a concrete γ for one labeled realization.
pub fn resolve_gamma<T: Scalar>(
    policy: GammaPolicy,
    g: &MixedGraph<T>,
    labels: &LabelAssignment,
    method: Method,
    settings: &PropagationSettings,
    cv: &CvConfig,
    seed: u64,
) -> Result<f64> {
    match policy {
        GammaPolicy::Fixed(gamma) => Ok(gamma),
        GammaPolicy::Cv => cv_gamma(g, labels, method, settings, cv, seed),
        GammaPolicy::Nac => match nac_gamma(g, labels) {
            Ok(gamma) => Ok(gamma),
            Err(e) if e.is_undefined_quantity() => {
                log::info!("{e}; selecting gamma by cross-validation");
                cv_gamma(g, labels, method, settings, cv, seed)
            }
            Err(e) => Err(e),
        },
    }
}

/// Input graph of an experiment.
#[derive(Debug, Clone)]
pub enum Dataset<T> {
    /// A single graph; each realization extracts a mixed graph from it.
    Base { graph: SparseUndirectedGraph<T>, truth: Vec<Class> },
    /// A fixed mixed graph used as-is by every realization.
    Mixed { graph: MixedGraph<T>, truth: Vec<Class> },
}

impl<T> Dataset<T> {
    pub fn truth(&self) -> &[Class] {
        match self {
            Dataset::Base { truth, .. } | Dataset::Mixed { truth, .. } => truth,
        }
    }
}

/// One configuration of the realization protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub method: Method,
    pub num_labeled: usize,
    /// Extraction percentage; ignored for [`Dataset::Mixed`].
    #[serde(default)]
    pub p_percent: f64,
    pub gamma_policy: GammaPolicy,
    #[serde(default = "default_realizations")]
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

fn default_realizations() -> usize {
    25
}

impl ExperimentSpec {
    pub fn new(method: Method, num_labeled: usize, p_percent: f64, gamma_policy: GammaPolicy) -> Self {
        Self {
            method,
            num_labeled,
            p_percent,
            gamma_policy,
            realizations: default_realizations(),
            base_seed: 0,
            model: ExtractionModel::Extract,
            settings: PropagationSettings::default(),
            cv: CvConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be at least 1".into()));
        }
        if self.num_labeled < 2 {
            return Err(Error::InvalidParameter("num_labeled must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub auc: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gamma_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub mean_auc: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for one realization.
    pub std_auc: f64,
    pub realizations: Vec<RealizationResult>,
}

/// Mean and sample standard deviation of the realization AUCs.
pub fn summarize(realizations: Vec<RealizationResult>) -> ExperimentSummary {
    let n = realizations.len() as f64;
    let mean = realizations.iter().map(|r| r.auc).sum::<f64>() / n;
    let std = if realizations.len() > 1 {
        (realizations.iter().map(|r| (r.auc - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    ExperimentSummary { mean_auc: mean, std_auc: std, realizations }
}

/// Runs one realization with the given seed: label, extract, pick γ,
/// propagate, score the unlabeled nodes.
pub fn run_realization<T: Scalar>(dataset: &Dataset<T>, spec: &ExperimentSpec, seed: u64) -> Result<RealizationResult> {
    let truth = dataset.truth();
    let labeled = stratified_sample(truth, spec.num_labeled, seed)?;
    let extracted;
    let graph = match dataset {
        Dataset::Base { graph, .. } => {
            let extraction = ExtractionSpec { p_percent: spec.p_percent, seed, model: spec.model };
            extracted = extract_mixed(graph, truth, &labeled, &extraction)?;
            &extracted
        }
        Dataset::Mixed { graph, .. } => graph,
    };
    let labels = LabelAssignment::reveal(truth, &labeled)?;
    let gamma = resolve_gamma(spec.gamma_policy, graph, &labels, spec.method, &spec.settings, &spec.cv, seed)?;
    let out = spec.method.run(graph, &LabeledPriors::one_hot(&labels), T::lit(gamma), &spec.settings)?;
    let auc = auc_on_nodes(&out.posteriors, truth, &labels.unlabeled_nodes(), Class::One)?;
    Ok(RealizationResult { auc, iterations: out.iterations, converged: out.converged, gamma_used: gamma })
}

/// Runs `spec.realizations` realizations with seeds `base_seed + 1 ..=
/// base_seed + realizations` and aggregates them.
///
/// Realizations run on the current rayon pool; results are gathered in seed
/// order, so the summary does not depend on the thread count.
pub fn run_experiment<T: Scalar>(dataset: &Dataset<T>, spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let results = (1..=spec.realizations as u64)
        .into_par_iter()
        .map(|r| run_realization(dataset, spec, spec.base_seed + r))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(results))
}

/// Brute-force minimizer of the mixed-graph objective (labeled nodes fixed,
/// `λ_S = γ`, `λ_D = 1 - γ`) over a grid of unlabeled distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    /// Best grid point for each unlabeled node.
    pub assignment: Vec<(NodeId, Distribution2<T>)>,
    pub objective: T,
}

pub const ORACLE_MAX_UNLABELED: usize = 4;

/// Searches `q_i1 ∈ {step, 2·step, …, 1 - step}` for every unlabeled node.
pub fn grid_search_oracle<T: Scalar>(
    g: &MixedGraph<T>,
    priors: &LabeledPriors<T>,
    gamma: T,
    step: T,
) -> Result<OracleSolution<T>> {
    if priors.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), actual: priors.len() });
    }
    if !(step > T::zero() && step < T::half()) {
        return Err(Error::InvalidParameter(format!("grid step must lie in (0, 0.5), got {step}")));
    }
    let unlabeled: Vec<usize> = (0..g.node_count()).filter(|&i| !priors.is_labeled(i)).collect();
    if unlabeled.len() > ORACLE_MAX_UNLABELED {
        return Err(Error::TooManyUnlabeled { count: unlabeled.len(), max: ORACLE_MAX_UNLABELED });
    }

    let points = (T::one() / step).round().to_usize().unwrap() - 1;
    let grid: Vec<Distribution2<T>> = (1..=points)
        .map(|k| {
            let q1 = step * T::from_usize(k).unwrap();
            Distribution2::from_parts(q1, T::one() - q1)
        })
        .collect();
    let view = MixedView::normalized(g);
    let params = ObjectiveParams::from_gamma(T::one(), gamma)?;
    let mut q: Vec<Distribution2<T>> = priors.iter().map(|p| p.copied().unwrap_or(grid[0])).collect();

    let mut cursor = vec![0usize; unlabeled.len()];
    let mut best = (objective_eq2(&q, priors, &view, params, true)?, cursor.clone());
    'search: loop {
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == cursor.len() {
                break 'search;
            }
            cursor[pos] += 1;
            if cursor[pos] < grid.len() {
                break;
            }
            cursor[pos] = 0;
            pos += 1;
        }
        for (slot, &node) in unlabeled.iter().enumerate() {
            q[node] = grid[cursor[slot]];
        }
        let value = objective_eq2(&q, priors, &view, params, true)?;
        if value < best.0 {
            best = (value, cursor.clone());
        }
    }

    let assignment = unlabeled.iter().zip(&best.1).map(|(&node, &k)| (NodeId(node), grid[k])).collect();
    Ok(OracleSolution { assignment, objective: best.0 })
}
