//! Implementations of the experiment commands: collect, estimate-k, train,
//! evaluate and ablate. Each command reads and updates the experiment
//! directory's manifest so every artifact stays reproducible and verifiable.

use crate::manifest::{sha256_bytes, sha256_file, Manifest, ModelEntry, CONFIG_NAME};
use anyhow::{bail, ensure, Context, Result};
use rand::RngCore;
use safescale_core::learn::{
    default_hidden_count, estimate_k, load_model, save_model, train, Dataset, KEstimate,
    ScalingPredictor, TrainConfig, TrainOutcome,
};
use safescale_core::plan::{
    GreedyPolicy, MonteCarloParams, MonteCarloPolicy, RandomPolicy, ReactivePolicy,
    RoundRobinPolicy, SelectionPolicy,
};
use safescale_core::sim::{
    build_training_set, episode_rng, run_episode, EpisodeLimit, EpisodeResult, RunOptions,
    CHANNEL_POLICY,
};
use safescale_core::sim::log::{
    read_log_file, write_log_file, write_metrics_file, LogRecord, TaskMetric,
};
use safescale_core::WorkspaceConfig;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub const RESULTS_NAME: &str = "results.csv";
pub const RESULTS_HEADER: &str =
    "label,policy,episodes,tasks,mean_exec_time,std_exec_time,mean_scaling,seed,config_sha256,model_sha256";

// ──────────────────────────────────────────────────────────────────────────
// Episode running
// ──────────────────────────────────────────────────────────────────────────

/// Run `episodes` numbered episodes, spread over the available cores.
///
/// Every episode draws all randomness from its own seed-derived streams, so
/// the results are bitwise identical to a sequential run whatever the
/// thread count or scheduling; the output is ordered by episode index.
pub fn run_episodes_parallel(
    cfg: &WorkspaceConfig,
    episodes: u64,
    master_seed: u64,
    limit: EpisodeLimit,
    opts: &RunOptions,
    factory: &(dyn Fn(u64) -> Box<dyn SelectionPolicy> + Sync),
) -> Result<Vec<EpisodeResult>> {
    ensure!(episodes > 0, "need at least one episode");
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(episodes as usize);
    if threads <= 1 {
        let mut out = Vec::with_capacity(episodes as usize);
        for ep in 0..episodes {
            let mut policy = factory(ep);
            out.push(run_episode(cfg, policy.as_mut(), limit, ep, master_seed, opts)?);
        }
        return Ok(out);
    }

    let next = AtomicU64::new(0);
    let mut buckets: Vec<Vec<(u64, safescale_core::Result<EpisodeResult>)>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let ep = next.fetch_add(1, Ordering::Relaxed);
                        if ep >= episodes {
                            break;
                        }
                        let mut policy = factory(ep);
                        local.push((ep, run_episode(cfg, policy.as_mut(), limit, ep, master_seed, opts)));
                    }
                    local
                })
            })
            .collect();
        buckets = handles
            .into_iter()
            .map(|h| h.join().expect("episode worker panicked"))
            .collect();
    });

    let mut indexed: Vec<(u64, safescale_core::Result<EpisodeResult>)> =
        buckets.into_iter().flatten().collect();
    indexed.sort_by_key(|(ep, _)| *ep);
    let mut out = Vec::with_capacity(indexed.len());
    for (_, result) in indexed {
        out.push(result?);
    }
    Ok(out)
}

// ──────────────────────────────────────────────────────────────────────────
// collect
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct CollectOpts {
    pub config: PathBuf,
    pub out: PathBuf,
    pub episodes: u64,
    pub seed: u64,
    pub limit: EpisodeLimit,
}

/// Run randomized episodes and persist one log file per episode.
pub fn collect(o: &CollectOpts) -> Result<Vec<PathBuf>> {
    ensure!(o.episodes > 0, "nothing to collect: --episodes must be at least 1");
    ensure!(o.episodes <= 9999, "at most 9999 episodes per directory");
    let cfg = WorkspaceConfig::load(&o.config)
        .with_context(|| format!("loading {}", o.config.display()))?;

    let logs_dir = o.out.join("logs");
    if logs_dir.exists() {
        std::fs::remove_dir_all(&logs_dir)
            .with_context(|| format!("clearing {}", logs_dir.display()))?;
    }
    std::fs::create_dir_all(&logs_dir)
        .with_context(|| format!("creating {}", logs_dir.display()))?;

    // The source config is copied byte-for-byte so the directory is
    // self-contained and its hash matches the original file's.
    let cfg_bytes = std::fs::read(&o.config)?;
    std::fs::write(o.out.join(CONFIG_NAME), &cfg_bytes)?;

    let mut manifest = Manifest::load_or_new(&o.out)?;
    manifest.config_sha256 = Some(sha256_bytes(&cfg_bytes));
    manifest.seeds.insert("collect".into(), o.seed);
    manifest.files.retain(|k, _| !k.starts_with("logs/"));

    let seed = o.seed;
    let results = run_episodes_parallel(&cfg, o.episodes, seed, o.limit, &RunOptions::default(), &|ep| {
        Box::new(RandomPolicy::new(episode_rng(seed, ep, CHANNEL_POLICY)))
    })?;

    let mut paths = Vec::with_capacity(results.len());
    for r in &results {
        let rel = format!("logs/ep_{:04}.csv", r.episode);
        let path = o.out.join(&rel);
        write_log_file(&path, &r.records)?;
        manifest.record_file(&o.out, &rel)?;
        paths.push(path);
    }
    manifest.record_file(&o.out, CONFIG_NAME)?;
    manifest.save(&o.out)?;
    Ok(paths)
}

// ──────────────────────────────────────────────────────────────────────────
// estimate-k
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct EstimateKOpts {
    pub out: PathBuf,
}

pub const K_ESTIMATE_NAME: &str = "k_estimate.txt";

/// Estimate the number of scaling plateaus from the collected logs and
/// persist the result.
pub fn estimate_k_cmd(o: &EstimateKOpts) -> Result<KEstimate> {
    let mut manifest = Manifest::load(&o.out)?;
    let records = read_verified_logs(&o.out, &manifest)?;
    let samples: Vec<f64> = records.iter().map(|r| r.s).collect();
    let est = estimate_k(&samples)?;

    let mut text = format!("k {}\n", est.k);
    match est.silhouette {
        Some(s) => text.push_str(&format!("silhouette {s}\n")),
        None => text.push_str("silhouette none\n"),
    }
    let centers: Vec<String> = est.centers.iter().map(|c| format!("{c}")).collect();
    text.push_str(&format!("centers {}\n", centers.join(" ")));
    std::fs::write(o.out.join(K_ESTIMATE_NAME), text)?;

    manifest.record_file(&o.out, K_ESTIMATE_NAME)?;
    manifest.save(&o.out)?;
    Ok(est)
}

fn read_k_estimate(out: &Path) -> Result<usize> {
    let path = out.join(K_ESTIMATE_NAME);
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().next().unwrap_or_default();
    match first.strip_prefix("k ") {
        Some(k) => k.trim().parse().with_context(|| format!("bad k line {first:?}")),
        None => bail!("{} does not start with a k line", path.display()),
    }
}

// ──────────────────────────────────────────────────────────────────────────
// train
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct TrainOpts {
    pub out: PathBuf,
    /// Softmax width; read from the persisted estimate when absent.
    pub k: Option<usize>,
    /// Hidden block count; architecture default when absent.
    pub hidden: Option<usize>,
    /// Prediction horizon in seconds; converted to samples via the config.
    pub horizon: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Try several hidden block counts and keep the best by held-out MSE.
    pub grid_search: bool,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub k: usize,
    pub hidden: usize,
    pub window: usize,
    pub rows: usize,
    pub best_epoch: usize,
    pub best_test_mse: f64,
    pub model_path: PathBuf,
}

pub const MODEL_NAME: &str = "model.json";
pub const HISTORY_NAME: &str = "history.csv";
pub const GRID_SEARCH_NAME: &str = "grid_search.csv";
const GRID_HIDDEN_CANDIDATES: [usize; 5] = [3, 4, 5, 6, 7];

/// Train the scaling predictor on the directory's collected logs.
pub fn train_cmd(o: &TrainOpts) -> Result<TrainSummary> {
    let cfg = load_dir_config(&o.out)?;
    let mut manifest = Manifest::load(&o.out)?;
    let records = read_verified_logs(&o.out, &manifest)?;

    let k = match o.k {
        Some(k) => k,
        None => read_k_estimate(&o.out)
            .context("no --k given; run estimate-k first or pass --k explicitly")?,
    };
    ensure!(k >= 1, "k must be at least 1");
    ensure!(
        o.horizon.is_finite() && o.horizon > 0.0,
        "horizon must be a positive number of seconds"
    );
    let window = (o.horizon / cfg.sample_period).round() as usize;
    ensure!(window >= 1, "horizon {} s is shorter than one sample period", o.horizon);

    let rows = build_training_set(&records, window)?;
    let data = Dataset::from_rows(&rows, o.seed)?;
    let tc = TrainConfig { max_epochs: o.epochs, seed: o.seed, ..TrainConfig::default() };

    let (hidden, outcome) = if o.grid_search {
        grid_search(&o.out, &mut manifest, k, &data, &tc)?
    } else {
        let hidden = o.hidden.unwrap_or_else(|| default_hidden_count(k));
        let outcome = train(k, Some(hidden), &data, &tc)
            .with_context(|| format!("training k={k} hidden={hidden}"))?;
        (hidden, outcome)
    };

    let model_path = o.out.join(MODEL_NAME);
    save_model(&outcome.model, &model_path)?;

    let mut history = String::from("epoch,train_mse,test_mse\n");
    for e in &outcome.history {
        history.push_str(&format!("{},{},{}\n", e.epoch, e.train_mse, e.test_mse));
    }
    std::fs::write(o.out.join(HISTORY_NAME), history)?;

    manifest.models.insert(
        MODEL_NAME.into(),
        ModelEntry {
            sha256: sha256_file(&model_path)?,
            config_sha256: manifest.config_sha256.clone().unwrap_or_default(),
            k,
            hidden,
            window,
            train_seed: o.seed,
        },
    );
    manifest.seeds.insert("train".into(), o.seed);
    manifest.record_file(&o.out, HISTORY_NAME)?;
    manifest.save(&o.out)?;

    Ok(TrainSummary {
        k,
        hidden,
        window,
        rows: rows.len(),
        best_epoch: outcome.best_epoch,
        best_test_mse: outcome.best_test_mse,
        model_path,
    })
}

fn grid_search(
    out: &Path,
    manifest: &mut Manifest,
    k: usize,
    data: &Dataset,
    tc: &TrainConfig,
) -> Result<(usize, TrainOutcome)> {
    let mut lines = String::from("hidden,best_epoch,best_test_mse\n");
    let mut best: Option<(usize, TrainOutcome)> = None;
    for hidden in GRID_HIDDEN_CANDIDATES {
        let outcome = train(k, Some(hidden), data, tc)
            .with_context(|| format!("grid search: training k={k} hidden={hidden}"))?;
        lines.push_str(&format!(
            "{},{},{}\n",
            hidden, outcome.best_epoch, outcome.best_test_mse
        ));
        let better = match &best {
            Some((_, b)) => outcome.best_test_mse < b.best_test_mse,
            None => true,
        };
        if better {
            best = Some((hidden, outcome));
        }
    }
    std::fs::write(out.join(GRID_SEARCH_NAME), lines)?;
    manifest.record_file(out, GRID_SEARCH_NAME)?;
    Ok(best.expect("at least one grid candidate"))
}

// ──────────────────────────────────────────────────────────────────────────
// evaluate
// ──────────────────────────────────────────────────────────────────────────

/// Selectable policies, as spelled on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyKind {
    Random,
    RoundRobin,
    Reactive,
    Greedy,
    MonteCarlo,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::RoundRobin => "round-robin",
            PolicyKind::Reactive => "reactive",
            PolicyKind::Greedy => "greedy",
            PolicyKind::MonteCarlo => "monte-carlo",
        }
    }

    fn needs_model(self) -> bool {
        matches!(self, PolicyKind::Greedy | PolicyKind::MonteCarlo)
    }
}

#[derive(Debug, Clone)]
pub struct EvaluateOpts {
    /// Evaluation environment (may differ from the training config, e.g.
    /// for the batch-replacement variant).
    pub config: PathBuf,
    pub out: PathBuf,
    pub policy: PolicyKind,
    /// Row label; defaults to the policy name. Lets one policy appear in
    /// several configurations (e.g. greedy with different models).
    pub label: Option<String>,
    pub model: Option<PathBuf>,
    pub episodes: u64,
    pub seed: u64,
    pub limit: EpisodeLimit,
    /// Observation staleness override; defaults to the config's value.
    pub lead_time: Option<f64>,
}

/// One row of the persisted result table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub label: String,
    pub policy: String,
    pub episodes: u64,
    pub tasks: usize,
    /// Mean and sample std of per-task execution time (decision instant to
    /// action completion), seconds.
    pub mean_exec_time: f64,
    pub std_exec_time: f64,
    /// Time-weighted mean of the logged scaling over the whole run.
    pub mean_scaling: f64,
    pub seed: u64,
    pub config_sha256: String,
    pub model_sha256: Option<String>,
}

/// Run one policy over fresh evaluation episodes, persist its logs and task
/// metrics, and replace its row in the result table.
pub fn evaluate_cmd(o: &EvaluateOpts) -> Result<ResultRow> {
    ensure!(o.episodes > 0, "need at least one evaluation episode");
    ensure!(o.episodes <= 9999, "at most 9999 episodes per evaluation");
    let cfg = WorkspaceConfig::load(&o.config)
        .with_context(|| format!("loading {}", o.config.display()))?;
    let config_sha256 = sha256_file(&o.config)?;
    let mut manifest = Manifest::load_or_new(&o.out)?;

    let label = o.label.clone().unwrap_or_else(|| o.policy.name().to_string());
    ensure!(
        !label.is_empty()
            && label
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_'),
        "label {label:?} must be lowercase alphanumeric with '-' or '_'"
    );

    let model = match (o.policy.needs_model(), &o.model) {
        (true, Some(path)) => Some(load_checked_model(&o.out, &manifest, path)?),
        (true, None) => bail!("policy {} requires --model", o.policy.name()),
        (false, _) => None,
    };

    let lead_time = o.lead_time.unwrap_or_else(|| cfg.mc_config().lead_time);
    ensure!(lead_time >= 0.0, "lead time must be non-negative");
    let run_opts = RunOptions { lead_time };
    let seed = o.seed;

    let factory: Box<dyn Fn(u64) -> Box<dyn SelectionPolicy> + Sync> = match o.policy {
        PolicyKind::Random => Box::new(move |ep| {
            Box::new(RandomPolicy::new(episode_rng(seed, ep, CHANNEL_POLICY)))
        }),
        PolicyKind::RoundRobin => Box::new(|_| Box::new(RoundRobinPolicy::new())),
        PolicyKind::Reactive => Box::new(|_| Box::new(ReactivePolicy)),
        PolicyKind::Greedy => {
            let oracle = model.as_ref().unwrap().0.clone();
            Box::new(move |_| Box::new(GreedyPolicy::new(oracle.clone())))
        }
        PolicyKind::MonteCarlo => {
            let oracle = model.as_ref().unwrap().0.clone();
            let params = MonteCarloParams::from_config(&cfg);
            Box::new(move |ep| {
                let mc_seed = episode_rng(seed, ep, CHANNEL_POLICY).next_u64();
                Box::new(MonteCarloPolicy::new(oracle.clone(), params, mc_seed))
            })
        }
    };

    let results =
        run_episodes_parallel(&cfg, o.episodes, seed, o.limit, &run_opts, factory.as_ref())?;

    // Persist per-episode logs.
    let rel_dir = format!("eval_logs/{label}");
    let dir = o.out.join(&rel_dir);
    if dir.exists() {
        std::fs::remove_dir_all(&dir)?;
    }
    std::fs::create_dir_all(&dir)?;
    manifest.files.retain(|kk, _| !kk.starts_with(&format!("{rel_dir}/")));
    for r in &results {
        let rel = format!("{rel_dir}/ep_{:04}.csv", r.episode);
        write_log_file(&o.out.join(&rel), &r.records)?;
        manifest.record_file(&o.out, &rel)?;
    }

    // Per-task metrics.
    let metrics: Vec<TaskMetric> = results.iter().flat_map(|r| r.tasks.iter().copied()).collect();
    ensure!(
        !metrics.is_empty(),
        "no completed tasks in the evaluation; lengthen the episodes"
    );
    let metrics_rel = format!("metrics_{label}.csv");
    write_metrics_file(&o.out.join(&metrics_rel), &metrics)?;
    manifest.record_file(&o.out, &metrics_rel)?;

    // Table row.
    let times: Vec<f64> = metrics.iter().map(|m| m.end_t - m.start_t).collect();
    let n = times.len() as f64;
    let mean_exec_time = times.iter().sum::<f64>() / n;
    let std_exec_time = if times.len() > 1 {
        (times.iter().map(|t| (t - mean_exec_time).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let samples: usize = results.iter().map(|r| r.records.len()).sum();
    let scaling_sum: f64 = results.iter().flat_map(|r| r.records.iter().map(|rec| rec.s)).sum();
    let row = ResultRow {
        label: label.clone(),
        policy: o.policy.name().to_string(),
        episodes: o.episodes,
        tasks: metrics.len(),
        mean_exec_time,
        std_exec_time,
        mean_scaling: scaling_sum / samples as f64,
        seed,
        config_sha256,
        model_sha256: model.map(|(_, hash)| hash),
    };

    let results_path = o.out.join(RESULTS_NAME);
    let mut rows = read_results(&results_path)?;
    rows.retain(|r| r.label != row.label);
    rows.push(row.clone());
    rows.sort_by(|a, b| a.label.cmp(&b.label));
    write_results(&results_path, &rows)?;

    manifest.seeds.insert(format!("evaluate/{label}"), seed);
    manifest.record_file(&o.out, RESULTS_NAME)?;
    manifest.save(&o.out)?;
    Ok(row)
}

/// Load a model for evaluation, enforcing manifest integrity when the model
/// lives in the experiment directory: both the model file and the
/// directory's config must still hash to what they were at training time.
fn load_checked_model(
    out: &Path,
    manifest: &Manifest,
    path: &Path,
) -> Result<(Arc<ScalingPredictor>, String)> {
    ensure!(path.exists(), "missing model: {}", path.display());
    let hash = sha256_file(path)?;

    let canon_out = std::fs::canonicalize(out).unwrap_or_else(|_| out.to_path_buf());
    let canon_model = std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
    if let Ok(rel) = canon_model.strip_prefix(&canon_out) {
        let rel = rel.to_string_lossy().replace('\\', "/");
        if let Some(entry) = manifest.models.get(rel.as_str()) {
            ensure!(
                entry.sha256 == hash,
                "stale model: {} changed since it was trained",
                path.display()
            );
            let cfg_path = out.join(CONFIG_NAME);
            ensure!(cfg_path.exists(), "stale model: {CONFIG_NAME} is gone");
            ensure!(
                entry.config_sha256 == sha256_file(&cfg_path)?,
                "stale model: {CONFIG_NAME} changed since the model was trained"
            );
        }
    }

    let model = load_model(path).with_context(|| format!("loading {}", path.display()))?;
    Ok((Arc::new(model), hash))
}

// ──────────────────────────────────────────────────────────────────────────
// ablate
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct AblateOpts {
    pub config: PathBuf,
    pub out: PathBuf,
    /// Model trained in an environment with fewer plateaus.
    pub model_k3: PathBuf,
    /// Model trained with inflated distance thresholds.
    pub model_inflated: PathBuf,
    pub episodes: u64,
    pub seed: u64,
    pub limit: EpisodeLimit,
}

/// Evaluate greedy under deliberately mismatched predictors alongside the
/// matched predictor and the random baseline, all on matched seeds.
pub fn ablate_cmd(o: &AblateOpts) -> Result<Vec<ResultRow>> {
    for (path, which) in [(&o.model_k3, "k3"), (&o.model_inflated, "inflated")] {
        ensure!(path.exists(), "missing mismatched model ({which}): {}", path.display());
    }
    let matched = o.out.join(MODEL_NAME);
    ensure!(matched.exists(), "missing matched model: {} (run train first)", matched.display());

    let runs: [(PolicyKind, &str, Option<PathBuf>); 4] = [
        (PolicyKind::Random, "random", None),
        (PolicyKind::Greedy, "greedy", Some(matched)),
        (PolicyKind::Greedy, "greedy-k3", Some(o.model_k3.clone())),
        (PolicyKind::Greedy, "greedy-inflated", Some(o.model_inflated.clone())),
    ];
    let mut rows = Vec::with_capacity(runs.len());
    for (policy, label, model) in runs {
        rows.push(evaluate_cmd(&EvaluateOpts {
            config: o.config.clone(),
            out: o.out.clone(),
            policy,
            label: Some(label.to_string()),
            model,
            episodes: o.episodes,
            seed: o.seed,
            limit: o.limit,
            lead_time: None,
        })?);
    }
    Ok(rows)
}

// ──────────────────────────────────────────────────────────────────────────
// Shared plumbing
// ──────────────────────────────────────────────────────────────────────────

pub fn load_dir_config(out: &Path) -> Result<WorkspaceConfig> {
    let path = out.join(CONFIG_NAME);
    ensure!(path.exists(), "no {CONFIG_NAME} in {}: run collect first", out.display());
    Ok(WorkspaceConfig::load(&path)?)
}

/// Read every collected log listed in the manifest, verifying content
/// hashes so silently edited logs cannot poison later stages.
pub fn read_verified_logs(out: &Path, manifest: &Manifest) -> Result<Vec<LogRecord>> {
    let names: Vec<&String> =
        manifest.files.keys().filter(|k| k.starts_with("logs/")).collect();
    ensure!(!names.is_empty(), "no collected logs in the manifest: run collect first");
    let mut records = Vec::new();
    for rel in names {
        let path = out.join(rel);
        let hash = sha256_file(&path)?;
        ensure!(
            &hash == manifest.files.get(rel).unwrap(),
            "stale log {rel}: content changed since collect"
        );
        records.extend(read_log_file(&path)?);
    }
    Ok(records)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let mut lines = text.lines();
    ensure!(
        lines.next() == Some(RESULTS_HEADER),
        "{}: missing or unexpected header",
        path.display()
    );
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        ensure!(f.len() == 10, "{}:{}: expected 10 fields, got {}", path.display(), i + 2, f.len());
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().with_context(|| format!("{}:{}: bad float {s:?}", path.display(), i + 2))
        };
        rows.push(ResultRow {
            label: f[0].to_string(),
            policy: f[1].to_string(),
            episodes: f[2].parse()?,
            tasks: f[3].parse()?,
            mean_exec_time: parse_f(f[4])?,
            std_exec_time: parse_f(f[5])?,
            mean_scaling: parse_f(f[6])?,
            seed: f[7].parse()?,
            config_sha256: f[8].to_string(),
            model_sha256: if f[9].is_empty() { None } else { Some(f[9].to_string()) },
        });
    }
    Ok(rows)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut text = String::from(RESULTS_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.label,
            r.policy,
            r.episodes,
            r.tasks,
            r.mean_exec_time,
            r.std_exec_time,
            r.mean_scaling,
            r.seed,
            r.config_sha256,
            r.model_sha256.as_deref().unwrap_or("")
        ));
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
