//! Scratch probe: v4 coin-geometry — MSE floor, directional check, policy
//! margins, and a mini ablation (k3 / inflated models trained in their own
//! envs, evaluated in the true env).

use safescale_core::learn::{train, Dataset, TrainConfig};
use safescale_core::sim::{
    build_training_set, episode_rng, run_episode, EpisodeLimit, RunOptions, CHANNEL_POLICY,
};
use safescale_core::{
    ActionId, ActionKind, EpisodeResult, GoalDistribution, GoalId, GreedyPolicy, RandomPolicy,
    RobotAction, ScalingPredictor, SelectionPolicy, SlotId, StaircaseSafety, TrainingRow,
    Variant, Vec3, WorkspaceConfig,
};
use std::sync::Arc;

fn coin_scenario() -> WorkspaceConfig {
    let mut cfg = WorkspaceConfig::default_scenario();
    cfg.robot_nominal_speed = 0.25;
    cfg.dwell.pick = 6.0;
    cfg.dwell.place = 6.0;
    cfg.dwell.human = 60.0;
    cfg.robot_actions = vec![
        RobotAction { id: ActionId(0), goal: Vec3::new(0.0, -0.984, 0.4), kind: ActionKind::Pick, slot: None },
        RobotAction { id: ActionId(1), goal: Vec3::new(-0.722, 0.272, 0.4), kind: ActionKind::Place, slot: Some(SlotId(1)) },
        RobotAction { id: ActionId(2), goal: Vec3::new(-0.378, 0.492, 0.4), kind: ActionKind::Place, slot: Some(SlotId(2)) },
        RobotAction { id: ActionId(3), goal: Vec3::new(0.378, 0.492, 0.4), kind: ActionKind::Place, slot: Some(SlotId(3)) },
        RobotAction { id: ActionId(4), goal: Vec3::new(0.722, 0.272, 0.4), kind: ActionKind::Place, slot: Some(SlotId(4)) },
    ];
    cfg.human_goals = vec![
        GoalDistribution { id: GoalId(1), mu: Vec3::new(-0.936, 0.411, 0.7), sigma: Vec3::new(0.05, 0.05, 0.0) },
        GoalDistribution { id: GoalId(2), mu: Vec3::new(0.936, 0.411, 0.7), sigma: Vec3::new(0.05, 0.05, 0.0) },
        GoalDistribution { id: GoalId(3), mu: Vec3::new(0.0, 1.780, 0.7), sigma: Vec3::new(0.05, 0.05, 0.0) },
        GoalDistribution { id: GoalId(4), mu: Vec3::new(-0.70, -0.30, 0.7), sigma: Vec3::new(0.05, 0.05, 0.0) },
        GoalDistribution { id: GoalId(5), mu: Vec3::new(0.70, -0.30, 0.7), sigma: Vec3::new(0.05, 0.05, 0.0) },
        GoalDistribution { id: GoalId(6), mu: Vec3::new(0.0, 3.4, 0.9), sigma: Vec3::new(0.05, 0.05, 0.0) },
    ];
    cfg
}

fn collect_rows(cfg: &WorkspaceConfig, episodes: u64, seed: u64, window: usize) -> Vec<TrainingRow> {
    let mut records = Vec::new();
    for ep in 0..episodes {
        let mut policy = RandomPolicy::new(episode_rng(seed, ep, CHANNEL_POLICY));
        let r = run_episode(cfg, &mut policy, EpisodeLimit::Duration(60.0), ep, seed, &RunOptions::default()).unwrap();
        records.extend(r.records);
    }
    build_training_set(&records, window).unwrap()
}

fn train_on(cfg: &WorkspaceConfig, episodes: u64, seed: u64, k: usize) -> (ScalingPredictor, f64, usize, f64) {
    let rows = collect_rows(cfg, episodes, seed, 140);
    let data = Dataset::from_rows(&rows, 11).unwrap();
    let mean = rows.iter().map(|r| r.target).sum::<f64>() / rows.len() as f64;
    let var = rows.iter().map(|r| (r.target - mean).powi(2)).sum::<f64>() / rows.len() as f64;
    let tc = TrainConfig { max_epochs: 120, patience: 30, seed: 11, ..TrainConfig::default() };
    let out = train(k, None, &data, &tc).unwrap();
    (out.model, out.best_test_mse, out.best_epoch, var)
}

fn run_eval(
    cfg: &WorkspaceConfig,
    episodes: u64,
    seed: u64,
    mut make: impl FnMut(u64) -> Box<dyn SelectionPolicy>,
) -> Vec<EpisodeResult> {
    (0..episodes)
        .map(|ep| {
            let mut policy = make(ep);
            run_episode(cfg, policy.as_mut(), EpisodeLimit::Tasks(8), ep, seed, &RunOptions::default()).unwrap()
        })
        .collect()
}

fn exec_and_scaling(results: &[EpisodeResult]) -> (f64, f64, f64) {
    let mut exec = Vec::new();
    let mut s_sum = 0.0;
    let mut s_n = 0usize;
    let mut hi = 0usize;
    for r in results {
        for t in &r.tasks {
            exec.push(t.end_t - t.start_t);
        }
        for rec in &r.records {
            s_sum += rec.s;
            s_n += 1;
            if rec.s >= 0.75 - 1e-9 {
                hi += 1;
            }
        }
    }
    (exec.iter().sum::<f64>() / exec.len() as f64, s_sum / s_n as f64, hi as f64 / s_n as f64)
}

fn greedy_eval(cfg: &WorkspaceConfig, model: &Arc<ScalingPredictor>, seed: u64) -> (f64, f64, f64) {
    let m = model.clone();
    exec_and_scaling(&run_eval(cfg, 30, seed, move |_| Box::new(GreedyPolicy::new(m.clone()))))
}

fn main() {
    let cfg = coin_scenario();

    let (model_k5, mse5, ep5, var) = train_on(&cfg, 400, 501, 5);
    println!("matched k5: var {var:.4}  best test {mse5:.6} (epoch {ep5})");
    let (_k20, mse20, ep20, _) = train_on(&cfg, 400, 501, 20);
    println!("k20       : best test {mse20:.6} (epoch {ep20})  (need k20 >= k5)");

    let matched = Arc::new(model_k5);

    let rand1 = exec_and_scaling(&run_eval(&cfg, 30, 777, |ep| {
        Box::new(RandomPolicy::new(episode_rng(777, ep, CHANNEL_POLICY)))
    }));
    let greedy1 = greedy_eval(&cfg, &matched, 777);
    println!(
        "v1: exec greedy {:.2} vs random {:.2} (ratio {:.3})  scaling {:.3} vs {:.3} (diff {:+.3})",
        greedy1.0, rand1.0, greedy1.0 / rand1.0, greedy1.1, rand1.1, greedy1.1 - rand1.1
    );

    let mut cfg2 = cfg.clone();
    cfg2.variant = Variant::BatchReplacement;
    let rand2 = exec_and_scaling(&run_eval(&cfg2, 30, 778, |ep| {
        Box::new(RandomPolicy::new(episode_rng(778, ep, CHANNEL_POLICY)))
    }));
    let greedy2 = greedy_eval(&cfg2, &matched, 778);
    println!("v2: hi-fraction greedy {:.3} vs random {:.3} (diff {:+.3})", greedy2.2, rand2.2, greedy2.2 - rand2.2);

    let mut env_k3 = cfg.clone();
    env_k3.safety = StaircaseSafety::new(vec![1.0, 2.0], vec![0.0, 0.5, 1.0]).unwrap();
    let (model_k3, mse_k3, _, _) = train_on(&env_k3, 120, 1003, 3);
    println!("k3 model  : best test {mse_k3:.4} (its own env)");

    let mut env_inf = cfg.clone();
    env_inf.safety =
        StaircaseSafety::new(vec![0.6, 1.2, 1.8, 2.4], vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let (model_inf, mse_inf, _, _) = train_on(&env_inf, 120, 1004, 5);
    println!("infl model: best test {mse_inf:.4} (its own env)");

    let g_matched = greedy_eval(&cfg, &matched, 2002);
    let g_k3 = greedy_eval(&cfg, &Arc::new(model_k3), 2002);
    let g_inf = greedy_eval(&cfg, &Arc::new(model_inf), 2002);
    let rand_abl = exec_and_scaling(&run_eval(&cfg, 30, 2002, |ep| {
        Box::new(RandomPolicy::new(episode_rng(2002, ep, CHANNEL_POLICY)))
    }));
    println!(
        "ablation exec: matched {:.2} | k3 {:.2} | inflated {:.2} | random {:.2}",
        g_matched.0, g_k3.0, g_inf.0, rand_abl.0
    );
    println!("need: matched < k3 && matched < inflated && k3 < random && inflated < random");
}
