//! Action-selection policies.
//!
//! The planners rank the place actions that are currently available by the
//! speed scaling the robot is expected to sustain while executing them: a
//! higher predicted scaling means less slowdown, so the planners maximise
//! it. Ties are always broken toward the lowest action id, which keeps every
//! policy deterministic given its inputs.

use crate::config::{ActionId, GoalDistribution, RobotAction, WorkspaceConfig};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::process::ProcessState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

/// Anything that can score a candidate robot motion: given the robot
/// position, human position, robot goal and the mean of the human's current
/// goal area, return the predicted mean speed scaling over the horizon.
///
/// Inputs are expected to be finite; the trained network satisfies this by
/// construction when driven from the simulator.
pub trait ScalingOracle: Send + Sync {
    fn predict_scaling(&self, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> f64;
}

impl<T: ScalingOracle + ?Sized> ScalingOracle for &T {
    fn predict_scaling(&self, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> f64 {
        (**self).predict_scaling(x_r, x_h, g_r, g_h_mu)
    }
}

/// Everything a policy may look at when asked for the next action.
#[derive(Debug, Clone)]
pub struct PlannerContext {
    /// Decision instant.
    pub t: f64,
    /// Robot position at the decision (the pick point in the nominal cycle).
    pub x_r: Vec3,
    /// Human position as observed by the planner. When a planning lead time
    /// is configured this is the position observed `lead_time` seconds
    /// before the decision.
    pub x_h: Vec3,
    /// The human's current goal area.
    pub goal: GoalDistribution,
    /// Available actions, sorted by id. Never empty when a policy is asked.
    pub actions: Vec<RobotAction>,
    /// Slot state at the decision, used to roll availability forward.
    pub process: ProcessState,
}

/// A policy consulted by the simulator whenever the robot needs a new
/// action.
pub trait SelectionPolicy: Send {
    fn name(&self) -> &'static str;
    fn select(&mut self, cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId>;
}

/// Clamp a raw prediction into the valid scaling range. Applied at the
/// planner boundary only; training and evaluation always see raw outputs.
fn clamped(oracle: &dyn ScalingOracle, x_r: Vec3, x_h: Vec3, g_r: Vec3, g_h_mu: Vec3) -> f64 {
    oracle.predict_scaling(x_r, x_h, g_r, g_h_mu).clamp(0.0, 1.0)
}

/// Pick the entry with the highest score; ties go to the lowest action id.
/// `scored` must be ordered by ascending id.
fn argmax_by_id(scored: &[(ActionId, f64)]) -> Option<ActionId> {
    let mut best: Option<(ActionId, f64)> = None;
    for &(id, score) in scored {
        match best {
            Some((_, s)) if score <= s => {}
            _ => best = Some((id, score)),
        }
    }
    best.map(|(id, _)| id)
}

// ──────────────────────────────────────────────────────────────────────────
// Greedy selection
// ──────────────────────────────────────────────────────────────────────────

/// One-step lookahead: score every available action by the predicted mean
/// scaling of executing it now, return the best.
pub fn greedy_select(ctx: &PlannerContext, oracle: &dyn ScalingOracle) -> Result<ActionId> {
    if ctx.actions.is_empty() {
        return Err(Error::NoActions);
    }
    let mut scored: Vec<(ActionId, f64)> = ctx
        .actions
        .iter()
        .map(|a| (a.id, clamped(oracle, ctx.x_r, ctx.x_h, a.goal, ctx.goal.mu)))
        .collect();
    scored.sort_by_key(|(id, _)| *id);
    Ok(argmax_by_id(&scored).unwrap())
}

// ──────────────────────────────────────────────────────────────────────────
// Monte Carlo selection
// ──────────────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy)]
pub struct MonteCarloParams {
    /// Discount applied across successive rollouts of one worker.
    pub gamma: f64,
    /// Wall-clock rollout budget per decision, seconds.
    pub time_budget: f64,
    /// Maximum number of propagated actions per sequence, counting the
    /// root action.
    pub max_sequence_length: usize,
    /// Optional hard cap on rollouts per worker. The wall-clock budget is
    /// inherently scheduling-dependent; fixing the rollout count instead
    /// makes a selection fully reproducible, which the tests rely on.
    pub max_rollouts: Option<usize>,
}

impl MonteCarloParams {
    pub fn from_config(cfg: &WorkspaceConfig) -> Self {
        let mc = cfg.mc_config();
        MonteCarloParams {
            gamma: mc.gamma,
            time_budget: mc.budget,
            max_sequence_length: mc.max_len,
            max_rollouts: None,
        }
    }
}

/// Simulation state carried through a rollout.
#[derive(Debug, Clone)]
pub struct RolloutState {
    pub x_r: Vec3,
    pub process: ProcessState,
    /// Number of actions propagated so far, counting the root action.
    pub depth: usize,
}

impl RolloutState {
    pub fn is_terminal(&self, cfg: &WorkspaceConfig, params: &MonteCarloParams) -> bool {
        self.depth >= params.max_sequence_length
            || self.process.available_actions(cfg).is_empty()
    }
}

/// Advance the model by one action: the robot commits to the action's goal,
/// the human is placed at `x_h` if supplied (the root call passes the
/// observed position) or drawn from the goal area otherwise, and the reward
/// is the predicted mean scaling of the motion.
pub fn propagate(
    x_r: Vec3,
    goal: &GoalDistribution,
    action: &RobotAction,
    x_h: Option<Vec3>,
    oracle: &dyn ScalingOracle,
    rng: &mut ChaCha8Rng,
) -> (Vec3, f64) {
    let g_r = action.goal;
    let x_h = x_h.unwrap_or_else(|| goal.sample(rng));
    let reward = clamped(oracle, x_r, x_h, g_r, goal.mu);
    (g_r, reward)
}

/// Run one rollout from `state` until a terminal state, accumulating the
/// (undiscounted) rewards of uniformly random actions against uniformly
/// random human goals.
pub fn perform_rollout(
    mut state: RolloutState,
    cfg: &WorkspaceConfig,
    oracle: &dyn ScalingOracle,
    params: &MonteCarloParams,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let mut total = 0.0;
    while !state.is_terminal(cfg, params) {
        let actions = state.process.available_actions(cfg);
        let action = actions[rng.random_range(0..actions.len())].clone();
        let goal = &cfg.human_goals[rng.random_range(0..cfg.human_goals.len())];
        let (x_r, reward) = propagate(state.x_r, goal, &action, None, oracle, rng);
        state.x_r = x_r;
        state.process.apply(cfg, &action);
        state.depth += 1;
        total += reward;
    }
    total
}

/// RNG for one Monte Carlo worker, derived from the decision seed and the
/// action id so results do not depend on thread scheduling.
fn worker_rng(seed: u64, id: ActionId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(id.0) + 1);
    rng
}

fn worker_score(
    ctx: &PlannerContext,
    cfg: &WorkspaceConfig,
    action: &RobotAction,
    oracle: &dyn ScalingOracle,
    params: &MonteCarloParams,
    seed: u64,
) -> f64 {
    let mut rng = worker_rng(seed, action.id);
    let (x_r, mut total) = propagate(ctx.x_r, &ctx.goal, action, Some(ctx.x_h), oracle, &mut rng);
    let mut process = ctx.process.clone();
    process.apply(cfg, action);
    let child = RolloutState { x_r, process, depth: 1 };

    let mut rollouts = 0usize;
    if !child.is_terminal(cfg, params) {
        let start = Instant::now();
        loop {
            if let Some(cap) = params.max_rollouts {
                if rollouts >= cap {
                    break;
                }
            }
            if start.elapsed().as_secs_f64() >= params.time_budget {
                break;
            }
            let reward = perform_rollout(child.clone(), cfg, oracle, params, &mut rng);
            total += params.gamma.powi(rollouts as i32) * reward;
            rollouts += 1;
        }
        if rollouts == 0 {
            log::warn!(
                "monte carlo worker for action {} finished zero rollouts within {}s; \
                 scoring by the propagate reward alone",
                action.id,
                params.time_budget
            );
        }
    }

    if rollouts == 0 {
        total
    } else {
        total / rollouts as f64
    }
}

/// Monte Carlo action selection: one worker per available action propagates
/// the action once from the observed state and then repeats random rollouts
/// until the budget runs out; the action with the best average score wins.
pub fn monte_carlo_select(
    ctx: &PlannerContext,
    cfg: &WorkspaceConfig,
    oracle: &dyn ScalingOracle,
    params: &MonteCarloParams,
    seed: u64,
) -> Result<ActionId> {
    if ctx.actions.is_empty() {
        return Err(Error::NoActions);
    }
    let mut scored: Vec<(ActionId, f64)> = Vec::with_capacity(ctx.actions.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = ctx
            .actions
            .iter()
            .map(|action| {
                scope.spawn(move || {
                    (action.id, worker_score(ctx, cfg, action, oracle, params, seed))
                })
            })
            .collect();
        for h in handles {
            scored.push(h.join().expect("monte carlo worker panicked"));
        }
    });
    // Sorting by id before the argmax makes the outcome independent of both
    // thread scheduling and the order actions were presented in.
    scored.sort_by_key(|(id, _)| *id);
    Ok(argmax_by_id(&scored).unwrap())
}

// ──────────────────────────────────────────────────────────────────────────
// Policies
// ──────────────────────────────────────────────────────────────────────────

/// Uniformly random choice among the available actions.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(rng: ChaCha8Rng) -> Self {
        RandomPolicy { rng }
    }
}

impl SelectionPolicy for RandomPolicy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn select(&mut self, _cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId> {
        if ctx.actions.is_empty() {
            return Err(Error::NoActions);
        }
        Ok(ctx.actions[self.rng.random_range(0..ctx.actions.len())].id)
    }
}

/// Cycle through the action ids in order, skipping unavailable ones.
#[derive(Default)]
pub struct RoundRobinPolicy {
    last: Option<ActionId>,
}

impl RoundRobinPolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SelectionPolicy for RoundRobinPolicy {
    fn name(&self) -> &'static str {
        "round-robin"
    }

    fn select(&mut self, _cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId> {
        if ctx.actions.is_empty() {
            return Err(Error::NoActions);
        }
        // `ctx.actions` is sorted by id; take the first id after the last
        // pick, wrapping around to the smallest.
        let chosen = match self.last {
            Some(last) => ctx
                .actions
                .iter()
                .find(|a| a.id > last)
                .unwrap_or(&ctx.actions[0])
                .id,
            None => ctx.actions[0].id,
        };
        self.last = Some(chosen);
        Ok(chosen)
    }
}

/// Move away from the human: pick the action whose goal is farthest from
/// the observed human position.
pub struct ReactivePolicy;

impl SelectionPolicy for ReactivePolicy {
    fn name(&self) -> &'static str {
        "reactive"
    }

    fn select(&mut self, _cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId> {
        if ctx.actions.is_empty() {
            return Err(Error::NoActions);
        }
        let scored: Vec<(ActionId, f64)> = ctx
            .actions
            .iter()
            .map(|a| (a.id, a.goal.distance(ctx.x_h)))
            .collect();
        Ok(argmax_by_id(&scored).unwrap())
    }
}

/// One-step lookahead against a scaling oracle.
pub struct GreedyPolicy {
    oracle: Arc<dyn ScalingOracle>,
}

impl GreedyPolicy {
    pub fn new(oracle: Arc<dyn ScalingOracle>) -> Self {
        GreedyPolicy { oracle }
    }
}

impl SelectionPolicy for GreedyPolicy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn select(&mut self, _cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId> {
        greedy_select(ctx, self.oracle.as_ref())
    }
}

/// Monte Carlo lookahead. Each decision draws fresh worker RNG streams from
/// the policy seed and a per-decision counter.
pub struct MonteCarloPolicy {
    oracle: Arc<dyn ScalingOracle>,
    params: MonteCarloParams,
    seed: u64,
    decisions: u64,
}

impl MonteCarloPolicy {
    pub fn new(oracle: Arc<dyn ScalingOracle>, params: MonteCarloParams, seed: u64) -> Self {
        MonteCarloPolicy { oracle, params, seed, decisions: 0 }
    }
}

impl SelectionPolicy for MonteCarloPolicy {
    fn name(&self) -> &'static str {
        "monte-carlo"
    }

    fn select(&mut self, cfg: &WorkspaceConfig, ctx: &PlannerContext) -> Result<ActionId> {
        let seed = self.seed.wrapping_add(self.decisions.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        self.decisions += 1;
        monte_carlo_select(ctx, cfg, self.oracle.as_ref(), &self.params, seed)
    }
}
