//! Benchmarks for the paths the simulator and planners hit in tight loops:
//! staircase lookups, windowed averages, network inference, action
//! selection, and whole simulated episodes.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safescale_core::sim::{episode_rng, CHANNEL_POLICY};
use safescale_core::{
    greedy_select, monte_carlo_select, run_episode, EpisodeLimit, MonteCarloParams,
    PlannerContext, ProcessState, RandomPolicy, RunOptions, ScalingOracle, ScalingPredictor,
    ScalingTrace, Vec3, WorkspaceConfig,
};
use std::hint::black_box;

// ──────────────────────────────────────────────────────────────────────────
// Fixtures
// ──────────────────────────────────────────────────────────────────────────

/// Distance-blend stand-in for the trained network: cheap, deterministic,
/// and spread over [0, 1] so the planners exercise their full logic.
struct DistanceOracle;

impl ScalingOracle for DistanceOracle {
    fn predict_scaling(&self, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> f64 {
        let blend = 0.5 * g_r.distance(x_h) + 0.3 * g_r.distance(g_h_mu) + 0.2 * x_r.distance(x_h);
        (blend / 3.0).clamp(0.0, 1.0)
    }
}

fn decision_context(cfg: &WorkspaceConfig) -> PlannerContext {
    let process = ProcessState::new();
    let actions = process
        .available_actions(cfg)
        .into_iter()
        .cloned()
        .collect();
    PlannerContext {
        t: 0.0,
        x_r: Vec3::new(0.0, -0.6, 0.4),
        x_h: Vec3::new(-1.0, 0.5, 0.7),
        goal: cfg.human_goals[0].clone(),
        actions,
        process,
    }
}

fn scaling_trace(cfg: &WorkspaceConfig) -> ScalingTrace {
    let mut policy = RandomPolicy::new(episode_rng(7, 0, CHANNEL_POLICY));
    let result = run_episode(
        cfg,
        &mut policy,
        EpisodeLimit::Duration(60.0),
        0,
        7,
        &RunOptions::default(),
    )
    .expect("bench episode");
    ScalingTrace {
        t0: 0.0,
        dt: cfg.sample_period,
        samples: result.records.iter().map(|r| r.s).collect(),
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Benchmarks
// ──────────────────────────────────────────────────────────────────────────

fn bench_eval_scaling(c: &mut Criterion) {
    let cfg = WorkspaceConfig::default_scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pairs: Vec<(Vec3, Vec3)> = (0..1024)
        .map(|_| {
            let p = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), 0.4);
            let q = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), 0.7);
            (p, q)
        })
        .collect();
    c.bench_function("eval_scaling_1024_pairs", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &(p, q) in &pairs {
                acc += cfg.safety.eval_scaling(black_box(p), black_box(q));
            }
            black_box(acc)
        })
    });
}

fn bench_window_average(c: &mut Criterion) {
    let cfg = WorkspaceConfig::default_scenario();
    let trace = scaling_trace(&cfg);
    let starts: Vec<f64> = (0..64).map(|i| i as f64 * 0.5).collect();
    c.bench_function("window_average_140_x64", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &t in &starts {
                acc += trace.window_average(black_box(t), 140).expect("window fits");
            }
            black_box(acc)
        })
    });
}

fn bench_predict(c: &mut Criterion) {
    let model = ScalingPredictor::init(5, 5, 3);
    let x_r = Vec3::new(0.0, -0.6, 0.4);
    let x_h = Vec3::new(-1.0, 0.5, 0.7);
    let g_r = Vec3::new(0.9, 0.3, 0.4);
    let g_h = Vec3::new(-1.15, 0.4, 0.7);
    c.bench_function("predict_single", |b| {
        b.iter(|| {
            model
                .predict(black_box(x_r), black_box(x_h), black_box(g_r), black_box(g_h))
                .expect("finite inputs")
        })
    });
}

fn bench_select(c: &mut Criterion) {
    let cfg = WorkspaceConfig::default_scenario();
    let ctx = decision_context(&cfg);
    let oracle = DistanceOracle;
    c.bench_function("greedy_select_4_actions", |b| {
        b.iter(|| greedy_select(black_box(&ctx), &oracle).expect("actions available"))
    });

    let params = MonteCarloParams {
        gamma: 0.9,
        time_budget: 60.0,
        max_sequence_length: 4,
        max_rollouts: Some(16),
    };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(20);
    group.bench_function("mc_select_16_rollouts", |b| {
        b.iter(|| {
            monte_carlo_select(black_box(&ctx), &cfg, &oracle, &params, 99)
                .expect("actions available")
        })
    });
    group.finish();
}

fn bench_episode(c: &mut Criterion) {
    let cfg = WorkspaceConfig::default_scenario();
    let mut group = c.benchmark_group("simulator");
    group.sample_size(20);
    group.bench_function("episode_60s_random", |b| {
        b.iter(|| {
            let mut policy = RandomPolicy::new(episode_rng(5, 1, CHANNEL_POLICY));
            run_episode(
                &cfg,
                &mut policy,
                EpisodeLimit::Duration(60.0),
                1,
                5,
                &RunOptions::default(),
            )
            .expect("bench episode")
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_eval_scaling,
    bench_window_average,
    bench_predict,
    bench_select,
    bench_episode
);
criterion_main!(benches);
