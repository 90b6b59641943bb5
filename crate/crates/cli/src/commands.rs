use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use mixgraph::{
    extract_mixed, gen_two_gaussians, graph_nac, knn_gaussian_graph, resolve_gamma, run_experiment, CvConfig, Dataset,
    EdgeKind, Error, ExtractionSpec, LabelAssignment, Mixed, Priors, PropagationSettings,
};

use crate::cli::{Cli, Command, EvaluateArgs, GenArgs, KnnArgs, NacArgs, ReplayArgs, RunArgs, SplitArgs};
use crate::error::{CliError, CliResult, Context};
use crate::experiment::{DatasetSpec, EvaluateSpec, Report, RunReport};
use crate::formats::{self, fmt_g6};
use crate::manifest::{RunManifest, TOOL};

pub const THREADS_ENV: &str = "MIXEDGRAPH_THREADS";

/// Worker count for `command`: one, except for `evaluate`, which uses
/// `--threads` or every core. `MIXEDGRAPH_THREADS` caps either.
fn thread_count(command: &Command) -> CliResult<usize> {
    let wanted = match command {
        Command::Evaluate(args) => {
            args.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        }
        _ => 1,
    };
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Invalid(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => usize::MAX,
    };
    Ok(wanted.clamp(1, cap))
}

/// Runs `cli`. `argv` are the arguments after the program name, recorded in
/// the manifests.
pub fn execute(cli: &Cli, argv: &[String]) -> CliResult<()> {
    let threads = thread_count(&cli.command)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Invalid(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| dispatch(&cli.command, argv))
}

fn dispatch(command: &Command, argv: &[String]) -> CliResult<()> {
    let manifest = RunManifest::new(command.name(), argv)?;
    match command {
        Command::GenG50c(a) => gen_g50c(a, manifest),
        Command::BuildKnn(a) => build_knn(a, manifest),
        Command::SplitMixed(a) => split_mixed(a, manifest),
        Command::Nac(a) => nac(a),
        Command::Run(a) => run(a, manifest),
        Command::Evaluate(a) => evaluate(a, manifest),
        Command::Replay(a) => replay(a),
    }
}

fn gen_g50c(a: &GenArgs, manifest: RunManifest) -> CliResult<()> {
    let [features, labels] = a.output.as_slice() else {
        return Err(CliError::Invalid("gen-g50c needs two outputs: -o features.csv -o labels.tsv".into()));
    };
    let (x, truth) =
        gen_two_gaussians::<f64>(a.n, a.d, a.bayes_error, a.balance, a.seed).context(|| "gen-g50c".into())?;
    formats::write_features(features, &x)?;
    formats::write_labels(labels, &truth)?;
    manifest.with_seed(a.seed).finish(&[features, labels])
}

fn build_knn(a: &KnnArgs, mut manifest: RunManifest) -> CliResult<()> {
    let x = formats::read_features(&a.features)?;
    manifest.add_input(&a.features)?;
    let g = knn_gaussian_graph(&x, a.k, a.sigma).context(|| a.features.display().to_string())?;
    formats::write_edges(&a.output, &Mixed::similar_only(g))?;
    manifest.finish(&[&a.output])
}

fn split_mixed(a: &SplitArgs, mut manifest: RunManifest) -> CliResult<()> {
    let truth = formats::read_labels(&a.labels)?;
    let input = formats::read_edges(&a.edges, truth.len())?;
    if input.dissimilar().edge_count() > 0 {
        return Err(CliError::Invalid(format!("{}: expected only S edges", a.edges.display())));
    }
    let labeled = formats::read_labeled_set(&a.labeled, truth.len())?;
    for path in [&a.edges, &a.labels, &a.labeled] {
        manifest.add_input(path)?;
    }
    let spec = ExtractionSpec { p_percent: a.p, seed: a.seed, model: a.model };
    let mixed = extract_mixed(input.similar(), &truth, &labeled, &spec).context(|| "split-mixed".into())?;
    formats::write_edges(&a.output, &mixed)?;
    manifest.with_seed(a.seed).finish(&[&a.output])
}

fn nac(a: &NacArgs) -> CliResult<()> {
    let truth = formats::read_labels(&a.labels)?;
    let g = formats::read_edges(&a.edges, truth.len())?;
    let labels = match (&a.labeled, a.restrict_labeled) {
        (Some(path), true) => {
            let labeled = formats::read_labeled_set(path, truth.len())?;
            LabelAssignment::reveal(&truth, &labeled).context(|| path.display().to_string())?
        }
        _ => LabelAssignment::full(&truth),
    };
    let mut undefined = Vec::new();
    for (kind, tag) in [(EdgeKind::Similar, "S"), (EdgeKind::Dissimilar, "D")] {
        let graph = g.graph(kind);
        if graph.edge_count() == 0 {
            continue;
        }
        match graph_nac(graph, &labels, a.restrict_labeled) {
            Ok(v) => println!("{tag}\t{}", fmt_g6(v)),
            Err(Error::NacUndefined(reason)) => {
                println!("{tag}\tundefined");
                undefined.push(format!("{tag}: {reason}"));
            }
            Err(e) => return Err(e).context(|| a.edges.display().to_string()),
        }
    }
    if g.similar().edge_count() + g.dissimilar().edge_count() == 0 {
        undefined.push("the graph has no edges".into());
    }
    if undefined.is_empty() {
        Ok(())
    } else {
        Err(CliError::Undefined(format!("NAC undefined ({})", undefined.join("; "))))
    }
}

fn run(a: &RunArgs, mut manifest: RunManifest) -> CliResult<()> {
    let truth = formats::read_labels(&a.labels)?;
    let g = formats::read_edges(&a.mixed, truth.len())?;
    let labeled = formats::read_labeled_set(&a.labeled, truth.len())?;
    for path in [&a.mixed, &a.labels, &a.labeled] {
        manifest.add_input(path)?;
    }
    let labels = LabelAssignment::reveal(&truth, &labeled).context(|| a.labeled.display().to_string())?;
    let settings = PropagationSettings {
        epsilon: a.epsilon,
        max_iters: a.max_iters,
        prob_floor: a.prob_floor,
        nu: a.nu,
        beta0: a.beta0,
    };
    let cv = CvConfig { folds: a.cv_folds, grid: a.grid.clone().unwrap_or_else(|| CvConfig::default().grid) };
    let gamma = resolve_gamma(a.gamma, &g, &labels, a.method, &settings, &cv, a.seed).context(|| "gamma".into())?;
    let out = a.method.run(&g, &Priors::one_hot(&labels), gamma, &settings).context(|| a.method.name().into())?;
    if !out.converged {
        log::warn!("{} stopped after {} iterations without converging", a.method.name(), out.iterations);
    }
    formats::write_posteriors(&a.output, &out.posteriors)?;
    println!("gamma\t{}\niterations\t{}\nconverged\t{}", fmt_g6(gamma), out.iterations, out.converged);
    manifest.with_seed(a.seed).finish(&[&a.output])
}

fn load_dataset(spec: &DatasetSpec, base: &Path) -> CliResult<Dataset<f64>> {
    Ok(match spec {
        DatasetSpec::Generated { n, d, bayes_error, balance, seed, k, sigma } => {
            let (x, truth) =
                gen_two_gaussians::<f64>(*n, *d, *bayes_error, *balance, *seed).context(|| "dataset".into())?;
            let graph = knn_gaussian_graph(&x, *k, *sigma).context(|| "dataset".into())?;
            Dataset::Base { graph, truth }
        }
        DatasetSpec::Features { features, labels, k, sigma } => {
            let x = formats::read_features(&base.join(features))?;
            let truth = formats::read_labels(&base.join(labels))?;
            if truth.len() != x.rows() {
                return Err(CliError::Invalid(format!(
                    "{} has {} rows but {} has {} labels",
                    features.display(),
                    x.rows(),
                    labels.display(),
                    truth.len()
                )));
            }
            let graph = knn_gaussian_graph(&x, *k, *sigma).context(|| features.display().to_string())?;
            Dataset::Base { graph, truth }
        }
        DatasetSpec::Edges { edges, labels } => {
            let truth = formats::read_labels(&base.join(labels))?;
            let graph = formats::read_edges(&base.join(edges), truth.len())?;
            if graph.dissimilar().edge_count() == 0 {
                Dataset::Base { graph: graph.similar().clone(), truth }
            } else {
                Dataset::Mixed { graph, truth }
            }
        }
    })
}

fn evaluate(a: &EvaluateArgs, mut manifest: RunManifest) -> CliResult<()> {
    let text = fs::read_to_string(&a.spec).map_err(|e| CliError::io(&a.spec, e))?;
    let spec: EvaluateSpec =
        serde_json::from_str(&text).map_err(|e| CliError::parse(&a.spec, e.line() as u64, e.to_string()))?;
    let base = a.spec.parent().map(Path::to_path_buf).unwrap_or_default();
    manifest.add_input(&a.spec)?;
    for path in spec.input_files(&base) {
        manifest.add_input(&path)?;
    }
    let dataset = load_dataset(&spec.dataset, &base)?;
    if matches!(dataset, Dataset::Mixed { .. }) && spec.p_percent.to_vec().iter().any(|&p| p != 0.0) {
        log::warn!("the dataset is already a mixed graph; p_percent is ignored");
    }

    let mut runs = Vec::new();
    for experiment in spec.experiments() {
        let summary = run_experiment(&dataset, &experiment).context(|| {
            format!(
                "{} with L = {}, P = {}, gamma {}",
                experiment.method.name(),
                experiment.num_labeled,
                experiment.p_percent,
                experiment.gamma_policy
            )
        })?;
        log::info!(
            "{} L={} P={} gamma={}: mean AUC {}",
            experiment.method.name(),
            experiment.num_labeled,
            experiment.p_percent,
            experiment.gamma_policy,
            fmt_g6(summary.mean_auc)
        );
        runs.push(RunReport::new(&experiment, &summary));
    }

    manifest = manifest.with_seed(spec.base_seed);
    let report = Report::new(runs, manifest.clone());
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(&a.output, json).map_err(|e| CliError::io(&a.output, e))?;
    manifest.finish(&[&a.output])
}

fn replay(a: &ReplayArgs) -> CliResult<()> {
    let recorded = RunManifest::load(&a.manifest)?;
    if recorded.tool != TOOL {
        return Err(CliError::Invalid(format!("{}: not a {TOOL} manifest", a.manifest.display())));
    }
    if recorded.version != env!("CARGO_PKG_VERSION") {
        log::warn!("manifest written by version {}, replaying with {}", recorded.version, env!("CARGO_PKG_VERSION"));
    }
    let here = std::env::current_dir().map_err(|e| CliError::io(Path::new("."), e))?;
    std::env::set_current_dir(&recorded.cwd).map_err(|e| CliError::io(&recorded.cwd, e))?;
    let result = replay_in_place(&recorded);
    std::env::set_current_dir(&here).map_err(|e| CliError::io(&here, e))?;
    result
}

fn replay_in_place(recorded: &RunManifest) -> CliResult<()> {
    let changed = RunManifest::changed(&recorded.inputs)?;
    if !changed.is_empty() {
        return Err(CliError::Invalid(format!("inputs changed since the recorded run: {}", changed.join(", "))));
    }
    let cli = Cli::try_parse_from(std::iter::once(TOOL.to_string()).chain(recorded.argv.iter().cloned()))
        .map_err(|e| CliError::Invalid(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Invalid("a replay manifest cannot itself be replayed".into()));
    }
    dispatch(&cli.command, &recorded.argv)?;
    let differing = RunManifest::changed(&recorded.outputs)?;
    if !differing.is_empty() {
        return Err(CliError::Invalid(format!("replay produced different bytes for: {}", differing.join(", "))));
    }
    let outputs: Vec<PathBuf> = recorded.outputs.keys().map(PathBuf::from).collect();
    println!(
        "reproduced {} output(s): {}",
        outputs.len(),
        recorded.outputs.keys().cloned().collect::<Vec<_>>().join(", ")
    );
    Ok(())
}
