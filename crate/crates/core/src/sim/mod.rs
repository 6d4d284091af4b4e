//! Discrete-time simulation of the shared workcell.
//!
//! One episode advances a human worker and a pick-and-place robot on a
//! fixed tick (`sample_period`). The human cycles between goal areas along
//! slightly randomised two-segment paths, dwelling at each goal; the robot
//! repeats pick → decide → place → return cycles, moving in straight lines
//! at `robot_nominal_speed` times the staircase speed scaling of the
//! current human-robot distance. Whenever the robot finishes a pick it asks
//! the configured policy for the next place action; that instant starts a
//! task, which ends when the robot asks again.
//!
//! Human behaviour depends only on its own RNG stream, so runs with the
//! same seed see identical human trajectories regardless of policy — which
//! makes policy comparisons paired.

pub mod log;

pub use self::log::{LogRecord, TaskMetric, LOG_HEADER, METRICS_HEADER};

use crate::config::{ActionId, GoalDistribution, WorkspaceConfig};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::plan::{PlannerContext, SelectionPolicy};
use crate::process::ProcessState;
use crate::safety::ScalingTrace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Standard deviation of the lateral noise applied to the midpoint of each
/// human walking path, metres (horizontal axes only).
pub const MIDPOINT_NOISE_STD: f64 = 0.25;

/// When an episode stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpisodeLimit {
    /// Run for this many seconds of simulated time.
    Duration(f64),
    /// Run until this many tasks have completed.
    Tasks(usize),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Planning lead: policies observe the human position from this many
    /// seconds before the decision instant (0 = current position).
    pub lead_time: f64,
}

/// RNG stream for one purpose within one episode. All deterministic
/// behaviour in the simulator derives from these streams.
pub fn episode_rng(master_seed: u64, episode: u64, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(episode * 8 + channel);
    rng
}

/// Channel used by the human model.
pub const CHANNEL_HUMAN: u64 = 0;
/// Channel handed to policies that need randomness.
pub const CHANNEL_POLICY: u64 = 1;

// ──────────────────────────────────────────────────────────────────────────
// Human model
// ──────────────────────────────────────────────────────────────────────────

struct HumanSim<'a> {
    cfg: &'a WorkspaceConfig,
    rng: ChaCha8Rng,
    pos: Vec3,
    goal_idx: usize,
    /// Remaining waypoints of the current walk; empty while dwelling.
    path: Vec<Vec3>,
    next_wp: usize,
    dwell_left: f64,
    /// Completed goal arrivals, by goal index (diagnostics/tests).
    visits: Vec<u64>,
}

impl<'a> HumanSim<'a> {
    fn new(cfg: &'a WorkspaceConfig, mut rng: ChaCha8Rng) -> Self {
        // Start dwelling at a uniformly drawn goal.
        let goal_idx = rng.random_range(0..cfg.human_goals.len());
        let pos = cfg.human_goals[goal_idx].sample(&mut rng);
        let mut visits = vec![0; cfg.human_goals.len()];
        visits[goal_idx] += 1;
        HumanSim {
            cfg,
            rng,
            pos,
            goal_idx,
            path: Vec::new(),
            next_wp: 0,
            dwell_left: cfg.dwell.human,
            visits,
        }
    }

    fn current_goal(&self) -> &GoalDistribution {
        &self.cfg.human_goals[self.goal_idx]
    }

    /// Draw the next goal (uniform over all goals, repeats allowed) and lay
    /// out a two-segment path to a noisy sample of it, with lateral noise
    /// on the midpoint.
    fn replan(&mut self) {
        self.goal_idx = self.rng.random_range(0..self.cfg.human_goals.len());
        let target = self.cfg.human_goals[self.goal_idx].sample(&mut self.rng);
        let zx: f64 = self.rng.sample(StandardNormal);
        let zy: f64 = self.rng.sample(StandardNormal);
        let mid = (self.pos + target) * 0.5
            + Vec3::new(MIDPOINT_NOISE_STD * zx, MIDPOINT_NOISE_STD * zy, 0.0);
        self.path = vec![mid, target];
        self.next_wp = 0;
    }

    fn advance(&mut self, dt: f64) {
        let mut left = dt;
        // A tick can span several phase changes (finish a dwell, start a
        // walk, arrive, ...). The guard bounds pathological configurations
        // with zero dwell and zero-length paths.
        let mut transitions = 0;
        while left > 1e-12 && transitions < 64 {
            if self.next_wp < self.path.len() {
                let target = self.path[self.next_wp];
                let dist = self.pos.distance(target);
                let t_need = dist / self.cfg.human_speed;
                if t_need <= left {
                    self.pos = target;
                    left -= t_need;
                    self.next_wp += 1;
                    transitions += 1;
                    if self.next_wp == self.path.len() {
                        self.path.clear();
                        self.next_wp = 0;
                        self.dwell_left = self.cfg.dwell.human;
                        self.visits[self.goal_idx] += 1;
                    }
                } else {
                    let dir = (target - self.pos).normalized();
                    self.pos += dir * (self.cfg.human_speed * left);
                    left = 0.0;
                }
            } else if self.dwell_left > left {
                self.dwell_left -= left;
                left = 0.0;
            } else {
                left -= self.dwell_left;
                self.dwell_left = 0.0;
                self.replan();
                transitions += 1;
            }
        }
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Robot model
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
enum RobotPhase {
    /// Holding a part at the pick point, waiting for a decision.
    Idle,
    ToPlace,
    DwellPlace,
    ToPick,
    DwellPick,
}

struct RobotSim<'a> {
    cfg: &'a WorkspaceConfig,
    pos: Vec3,
    goal: Vec3,
    pick_goal: Vec3,
    phase: RobotPhase,
    dwell_left: f64,
}

impl<'a> RobotSim<'a> {
    fn new(cfg: &'a WorkspaceConfig, pick_goal: Vec3) -> Self {
        RobotSim {
            cfg,
            pos: pick_goal,
            goal: pick_goal,
            pick_goal,
            phase: RobotPhase::Idle,
            dwell_left: 0.0,
        }
    }

    fn start_task(&mut self, place_goal: Vec3) {
        self.goal = place_goal;
        self.phase = RobotPhase::ToPlace;
    }

    /// Advance by one tick under a fixed speed scaling (frozen at the tick
    /// start, matching the logged value).
    fn advance(&mut self, dt: f64, scaling: f64) {
        let mut left = dt;
        while left > 1e-12 {
            match self.phase {
                RobotPhase::Idle => break,
                RobotPhase::ToPlace | RobotPhase::ToPick => {
                    let speed = self.cfg.robot_nominal_speed * scaling;
                    if speed <= 0.0 {
                        // Safety stop: hold position for the rest of the tick.
                        break;
                    }
                    let dist = self.pos.distance(self.goal);
                    let t_need = dist / speed;
                    if t_need <= left {
                        self.pos = self.goal;
                        left -= t_need;
                        if self.phase == RobotPhase::ToPlace {
                            self.phase = RobotPhase::DwellPlace;
                            self.dwell_left = self.cfg.dwell.place;
                        } else {
                            self.phase = RobotPhase::DwellPick;
                            self.dwell_left = self.cfg.dwell.pick;
                        }
                    } else {
                        let dir = (self.goal - self.pos).normalized();
                        self.pos += dir * (speed * left);
                        left = 0.0;
                    }
                }
                RobotPhase::DwellPlace => {
                    if self.dwell_left > left {
                        self.dwell_left -= left;
                        left = 0.0;
                    } else {
                        left -= self.dwell_left;
                        self.dwell_left = 0.0;
                        self.goal = self.pick_goal;
                        self.phase = RobotPhase::ToPick;
                    }
                }
                RobotPhase::DwellPick => {
                    if self.dwell_left > left {
                        self.dwell_left -= left;
                        left = 0.0;
                    } else {
                        left -= self.dwell_left;
                        self.dwell_left = 0.0;
                        self.phase = RobotPhase::Idle;
                    }
                }
            }
        }
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Episodes
// ──────────────────────────────────────────────────────────────────────────

/// Everything produced by one episode.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub episode: u64,
    pub dt: f64,
    pub records: Vec<LogRecord>,
    pub tasks: Vec<TaskMetric>,
    /// Decision instants, one per started task.
    pub decision_times: Vec<f64>,
}

impl EpisodeResult {
    /// Time-weighted mean of the logged scaling (ticks are uniform, so this
    /// is the plain mean over records).
    pub fn mean_scaling(&self) -> f64 {
        if self.records.is_empty() {
            return f64::NAN;
        }
        self.records.iter().map(|r| r.s).sum::<f64>() / self.records.len() as f64
    }

    pub fn trace(&self) -> ScalingTrace {
        let t0 = self.records.first().map(|r| r.t).unwrap_or(0.0);
        ScalingTrace::new(t0, self.dt, self.records.iter().map(|r| r.s).collect())
    }
}

fn stale_x_h(records: &[LogRecord], t: f64, lead: f64, dt: f64, current: Vec3) -> Vec3 {
    if records.is_empty() {
        return current;
    }
    let target = t - lead;
    if target <= 0.0 {
        return records[0].x_h;
    }
    let idx = ((target / dt).round() as usize).min(records.len() - 1);
    records[idx].x_h
}

/// Run a single episode under `policy`.
///
/// `master_seed` and `episode` fully determine the human trajectory; the
/// policy receives its own randomness (if any) from the caller.
pub fn run_episode(
    cfg: &WorkspaceConfig,
    policy: &mut dyn SelectionPolicy,
    limit: EpisodeLimit,
    episode: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<EpisodeResult> {
    cfg.validate()?;
    let pick = cfg.pick_action()?;
    if cfg.place_actions().next().is_none() {
        return Err(Error::Config("scenario needs at least one place action".into()));
    }
    let dt = cfg.sample_period;

    let mut human = HumanSim::new(cfg, episode_rng(master_seed, episode, CHANNEL_HUMAN));
    let mut robot = RobotSim::new(cfg, pick.goal);
    let mut process = ProcessState::new();

    let mut records: Vec<LogRecord> = Vec::new();
    let mut tasks: Vec<TaskMetric> = Vec::new();
    let mut decision_times: Vec<f64> = Vec::new();
    let mut open_task: Option<(usize, ActionId, f64)> = None;

    let mut tick: u64 = 0;
    loop {
        let t = tick as f64 * dt;
        if let EpisodeLimit::Duration(d) = limit {
            if t > d - 0.5 * dt {
                break;
            }
        }

        if robot.phase == RobotPhase::Idle {
            if let Some((index, action_id, start_t)) = open_task.take() {
                tasks.push(TaskMetric {
                    episode,
                    task_index: index,
                    action_id,
                    start_t,
                    end_t: t,
                    mean_scaling: f64::NAN, // filled in below
                });
            }
            if let EpisodeLimit::Tasks(m) = limit {
                if tasks.len() >= m {
                    break;
                }
            }
            let available = process.available_actions(cfg);
            if available.is_empty() {
                break; // terminal state
            }
            let x_h_obs = if opts.lead_time > 0.0 {
                stale_x_h(&records, t, opts.lead_time, dt, human.pos)
            } else {
                human.pos
            };
            let ctx = PlannerContext {
                t,
                x_r: robot.pos,
                x_h: x_h_obs,
                goal: human.current_goal().clone(),
                actions: available.into_iter().cloned().collect(),
                process: process.clone(),
            };
            let chosen = policy.select(cfg, &ctx)?;
            let action = ctx
                .actions
                .iter()
                .find(|a| a.id == chosen)
                .ok_or(Error::IllegalAction(chosen.0))?
                .clone();
            process.apply(cfg, &action);
            robot.start_task(action.goal);
            open_task = Some((decision_times.len(), chosen, t));
            decision_times.push(t);
        }

        // Scaling is evaluated on the tick-start positions; the same value
        // is logged and applied to the robot's motion over this tick.
        let s = cfg.safety.eval_scaling(robot.pos, human.pos);
        records.push(LogRecord {
            episode,
            t,
            x_r: robot.pos,
            x_h: human.pos,
            g_r: robot.goal,
            g_h_mu: human.current_goal().mu,
            s,
        });

        human.advance(dt);
        robot.advance(dt, s);
        tick += 1;
    }

    // Mean scaling per task: uniform-tick mean over [start, end).
    for task in &mut tasks {
        let si = (task.start_t / dt).round() as usize;
        let ei = ((task.end_t / dt).round() as usize).min(records.len());
        let slice = &records[si..ei];
        task.mean_scaling = slice.iter().map(|r| r.s).sum::<f64>() / slice.len() as f64;
    }

    Ok(EpisodeResult { episode, dt, records, tasks, decision_times })
}

/// Run `episodes` sequentially numbered episodes, building a fresh policy
/// per episode so that policy randomness is seeded per episode.
pub fn run_episodes(
    cfg: &WorkspaceConfig,
    episodes: u64,
    master_seed: u64,
    limit: EpisodeLimit,
    opts: &RunOptions,
    policy_factory: &mut dyn FnMut(u64) -> Box<dyn SelectionPolicy>,
) -> Result<Vec<EpisodeResult>> {
    let mut out = Vec::with_capacity(episodes as usize);
    for ep in 0..episodes {
        let mut policy = policy_factory(ep);
        out.push(run_episode(cfg, policy.as_mut(), limit, ep, master_seed, opts)?);
    }
    Ok(out)
}

// ──────────────────────────────────────────────────────────────────────────
// Training windows
// ──────────────────────────────────────────────────────────────────────────

/// One supervised example: the instantaneous state and the mean scaling
/// over the following window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingRow {
    pub episode: u64,
    pub features: [f64; 12],
    pub target: f64,
}

pub fn features_of(x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> [f64; 12] {
    [
        x_r.x, x_r.y, x_r.z, //
        x_h.x, x_h.y, x_h.z, //
        g_r.x, g_r.y, g_r.z, //
        g_h_mu.x, g_h_mu.y, g_h_mu.z,
    ]
}

/// Turn logged records into supervised rows. Each record whose episode
/// still contains `window` further samples becomes one row; the target is
/// the mean of the `window + 1` scaling samples starting at the record.
/// Windows never cross episode boundaries; records too close to an episode
/// end are dropped.
pub fn build_training_set(records: &[LogRecord], window: usize) -> Result<Vec<TrainingRow>> {
    let mut rows = Vec::new();
    let mut start = 0usize;
    while start < records.len() {
        let episode = records[start].episode;
        let mut end = start + 1;
        while end < records.len() && records[end].episode == episode {
            end += 1;
        }
        let run = &records[start..end];
        if run.len() > window {
            // Prefix sums give every window mean in O(1).
            let mut cum = Vec::with_capacity(run.len() + 1);
            cum.push(0.0);
            for r in run {
                cum.push(cum.last().unwrap() + r.s);
            }
            for i in 0..run.len() - window {
                let target = (cum[i + window + 1] - cum[i]) / (window + 1) as f64;
                let r = &run[i];
                rows.push(TrainingRow {
                    episode,
                    features: features_of(r.x_r, r.x_h, r.g_r, r.g_h_mu),
                    target,
                });
            }
        }
        start = end;
    }
    if rows.is_empty() {
        return Err(Error::NoTrainableWindows);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::{RandomPolicy, SelectionPolicy};

    fn default_test_config() -> WorkspaceConfig {
        WorkspaceConfig::default_scenario()
    }

    fn random_policy(master_seed: u64, ep: u64) -> Box<dyn SelectionPolicy> {
        Box::new(RandomPolicy::new(episode_rng(master_seed, ep, CHANNEL_POLICY)))
    }

    fn sixty_second_episode(seed: u64, ep: u64) -> EpisodeResult {
        let cfg = default_test_config();
        let mut policy = random_policy(seed, ep);
        run_episode(
            &cfg,
            policy.as_mut(),
            EpisodeLimit::Duration(60.0),
            ep,
            seed,
            &RunOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn a_minute_at_ten_hertz_yields_six_hundred_records() {
        let result = sixty_second_episode(12, 0);
        assert!((result.records.len() as i64 - 600).abs() <= 1, "{}", result.records.len());
        // Timestamps sit on the uniform grid.
        for (i, r) in result.records.iter().enumerate() {
            assert!((r.t - i as f64 * 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn logged_scaling_matches_logged_positions() {
        let cfg = default_test_config();
        let result = sixty_second_episode(3, 1);
        for r in &result.records {
            assert_eq!(r.s, cfg.safety.eval_scaling(r.x_r, r.x_h));
        }
    }

    #[test]
    fn robot_is_frozen_while_scaling_is_zero() {
        let mut seen_freeze = false;
        for ep in 0..40 {
            let result = sixty_second_episode(4, ep);
            for w in result.records.windows(2) {
                if w[0].s == 0.0 {
                    seen_freeze = true;
                    assert_eq!(w[0].x_r, w[1].x_r, "robot moved under a full stop");
                }
            }
        }
        assert!(seen_freeze, "scenario never produced a full stop; geometry too tame");
    }

    #[test]
    fn robot_speed_respects_the_scaled_limit() {
        let cfg = default_test_config();
        let result = sixty_second_episode(5, 2);
        for w in result.records.windows(2) {
            let moved = w[1].x_r.distance(w[0].x_r);
            let budget = cfg.robot_nominal_speed * w[0].s * cfg.sample_period;
            assert!(moved <= budget + 1e-9, "moved {moved} with budget {budget}");
        }
    }

    #[test]
    fn human_speed_is_respected_and_paths_stay_finite() {
        let cfg = default_test_config();
        let result = sixty_second_episode(6, 3);
        for w in result.records.windows(2) {
            let moved = w[1].x_h.distance(w[0].x_h);
            assert!(moved <= cfg.human_speed * cfg.sample_period + 1e-9);
            assert!(w[1].x_h.is_finite());
        }
    }

    #[test]
    fn decisions_happen_at_the_pick_point() {
        let cfg = default_test_config();
        let pick_goal = cfg.pick_action().unwrap().goal;
        let result = sixty_second_episode(7, 4);
        assert!(!result.decision_times.is_empty());
        for &tau in &result.decision_times {
            let idx = (tau / cfg.sample_period).round() as usize;
            assert_eq!(result.records[idx].x_r, pick_goal);
        }
    }

    #[test]
    fn task_metrics_are_consistent_with_the_log() {
        let cfg = default_test_config();
        let mut policy = random_policy(9, 0);
        let result = run_episode(
            &cfg,
            policy.as_mut(),
            EpisodeLimit::Tasks(5),
            0,
            9,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(result.tasks.len(), 5);
        for (k, task) in result.tasks.iter().enumerate() {
            assert_eq!(task.task_index, k);
            assert!(task.end_t > task.start_t);
            assert!((0.0..=1.0).contains(&task.mean_scaling));
            // Recompute the mean from the records.
            let si = (task.start_t / cfg.sample_period).round() as usize;
            let ei = (task.end_t / cfg.sample_period).round() as usize;
            let mean = result.records[si..ei].iter().map(|r| r.s).sum::<f64>()
                / (ei - si) as f64;
            assert!((task.mean_scaling - mean).abs() < 1e-12);
        }
        // Tasks tile the decision sequence.
        for (task, tau) in result.tasks.iter().zip(&result.decision_times) {
            assert_eq!(task.start_t, *tau);
        }
    }

    #[test]
    fn same_seed_same_episode_is_bitwise_identical() {
        let a = sixty_second_episode(21, 5);
        let b = sixty_second_episode(21, 5);
        assert_eq!(a.records, b.records);
        assert_eq!(a.tasks, b.tasks);
        let c = sixty_second_episode(21, 6);
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn human_trajectory_is_policy_independent() {
        let cfg = default_test_config();
        let mut random = random_policy(13, 2);
        let a = run_episode(
            &cfg,
            random.as_mut(),
            EpisodeLimit::Duration(40.0),
            2,
            13,
            &RunOptions::default(),
        )
        .unwrap();
        let mut round_robin = crate::plan::RoundRobinPolicy::new();
        let b = run_episode(
            &cfg,
            &mut round_robin,
            EpisodeLimit::Duration(40.0),
            2,
            13,
            &RunOptions::default(),
        )
        .unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.x_h, rb.x_h);
            assert_eq!(ra.g_h_mu, rb.g_h_mu);
        }
    }

    #[test]
    fn goal_visits_are_uniform() {
        let cfg = default_test_config();
        let mut human = HumanSim::new(&cfg, episode_rng(31, 0, CHANNEL_HUMAN));
        let mut counts = vec![0u64; cfg.human_goals.len()];
        for _ in 0..3000 {
            human.replan();
            counts[human.goal_idx] += 1;
        }
        let n: u64 = counts.iter().sum();
        let expect = n as f64 / counts.len() as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // 1% critical value for k-1 = 2 degrees of freedom.
        assert!(chi2 < 9.21, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn training_rows_average_the_forward_window() {
        let result = sixty_second_episode(17, 0);
        let window = 40;
        let rows = build_training_set(&result.records, window).unwrap();
        assert_eq!(rows.len(), result.records.len() - window);
        // Check a few rows against a direct mean.
        for idx in [0usize, 100, rows.len() - 1] {
            let direct: f64 = result.records[idx..=idx + window].iter().map(|r| r.s).sum::<f64>()
                / (window + 1) as f64;
            assert!((rows[idx].target - direct).abs() < 1e-12);
            assert_eq!(rows[idx].features[0], result.records[idx].x_r.x);
            assert_eq!(rows[idx].features[5], result.records[idx].x_h.z);
            assert_eq!(rows[idx].features[9], result.records[idx].g_h_mu.x);
        }
    }

    #[test]
    fn windows_do_not_cross_episode_boundaries() {
        let a = sixty_second_episode(19, 0);
        let b = sixty_second_episode(19, 1);
        let mut all = a.records.clone();
        all.extend(b.records.iter().cloned());
        let window = 50;
        let rows = build_training_set(&all, window).unwrap();
        assert_eq!(rows.len(), (a.records.len() - window) + (b.records.len() - window));
        // Short episodes contribute nothing rather than leaking across.
        let short = &a.records[..30];
        assert!(matches!(build_training_set(short, window), Err(Error::NoTrainableWindows)));
    }

    #[test]
    fn lead_time_makes_policies_see_stale_positions() {
        struct Probe {
            seen: Vec<(f64, Vec3)>,
        }
        impl SelectionPolicy for Probe {
            fn name(&self) -> &'static str {
                "probe"
            }
            fn select(
                &mut self,
                _cfg: &WorkspaceConfig,
                ctx: &PlannerContext,
            ) -> crate::error::Result<ActionId> {
                self.seen.push((ctx.t, ctx.x_h));
                Ok(ctx.actions[0].id)
            }
        }
        let cfg = default_test_config();
        let lead = 2.0;
        let mut probe = Probe { seen: Vec::new() };
        let result = run_episode(
            &cfg,
            &mut probe,
            EpisodeLimit::Duration(150.0),
            0,
            23,
            &RunOptions { lead_time: lead },
        )
        .unwrap();
        assert!(probe.seen.len() >= 2);
        for (t, seen_xh) in &probe.seen {
            let expect = if *t <= lead {
                result.records[0].x_h
            } else {
                let idx = ((*t - lead) / cfg.sample_period).round() as usize;
                result.records[idx].x_h
            };
            assert_eq!(*seen_xh, expect, "at decision t={t}");
        }
    }

    #[test]
    fn batch_replacement_cycles_all_slots() {
        let mut cfg = default_test_config();
        cfg.variant = crate::config::Variant::BatchReplacement;
        let mut policy = random_policy(29, 0);
        let result = run_episode(
            &cfg,
            policy.as_mut(),
            EpisodeLimit::Tasks(8),
            0,
            29,
            &RunOptions::default(),
        )
        .unwrap();
        // Two full batches of four distinct boxes each.
        let first: std::collections::BTreeSet<u32> =
            result.tasks[..4].iter().map(|t| t.action_id.0).collect();
        let second: std::collections::BTreeSet<u32> =
            result.tasks[4..].iter().map(|t| t.action_id.0).collect();
        assert_eq!(first.len(), 4);
        assert_eq!(second.len(), 4);
    }
}
