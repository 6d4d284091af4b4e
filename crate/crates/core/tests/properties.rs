//! Property tests for the safety staircase, window statistics, geometry and
//! slot bookkeeping: randomised inputs with invariants that must hold for
//! every generated case, shrunk to minimal counterexamples on failure.

use proptest::prelude::*;
use safescale_core::{
    ActionId, ActionKind, GoalDistribution, GoalId, ProcessState, RobotAction, ScalingTrace,
    SlotId, StaircaseSafety, Variant, Vec3, WorkspaceConfig,
};

// ──────────────────────────────────────────────────────────────────────────
// Generators
// ──────────────────────────────────────────────────────────────────────────

/// Any structurally valid staircase: 1..=8 plateaus, strictly increasing
/// positive thresholds, strictly increasing plateau values ending at 1.
fn staircase_strategy() -> impl Strategy<Value = StaircaseSafety> {
    (1usize..=8).prop_flat_map(|k| {
        let value_gaps = prop::collection::vec(0.01f64..0.75, k);
        let threshold_gaps = prop::collection::vec(0.05f64..0.9, k - 1);
        (value_gaps, threshold_gaps).prop_map(|(vg, tg)| {
            let total: f64 = vg.iter().sum();
            let mut acc = 0.0;
            let values: Vec<f64> = vg
                .iter()
                .map(|g| {
                    acc += g;
                    acc / total
                })
                .collect();
            let mut t = 0.0;
            let thresholds: Vec<f64> = tg
                .iter()
                .map(|g| {
                    t += g;
                    t
                })
                .collect();
            StaircaseSafety::new(thresholds, values).expect("generator made a valid staircase")
        })
    })
}

/// A staircase plus a trace sampled exactly on its plateaus, together with a
/// window and a start index for which the window is fully covered.
fn trace_strategy(
) -> impl Strategy<Value = (StaircaseSafety, ScalingTrace, usize, usize)> {
    (staircase_strategy(), 0usize..40, 0usize..20, 0.01f64..1.0, -5.0f64..5.0).prop_flat_map(
        |(safety, window, slack, dt, t0)| {
            let n = window + 1 + slack;
            let k = safety.k();
            (
                Just(safety),
                prop::collection::vec(0..k, n),
                Just(window),
                0..=slack,
                Just(dt),
                Just(t0),
            )
                .prop_map(|(safety, plateau_idx, window, start, dt, t0)| {
                    let samples = plateau_idx.iter().map(|&i| safety.values[i]).collect();
                    (safety, ScalingTrace::new(t0, dt, samples), window, start)
                })
        },
    )
}

fn vec3_strategy() -> impl Strategy<Value = Vec3> {
    (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Batch-replacement config with `slots` place boxes of capacity one.
fn batch_config(slots: usize) -> WorkspaceConfig {
    let mut actions = vec![RobotAction {
        id: ActionId(0),
        goal: Vec3::new(0.0, -0.6, 0.4),
        kind: ActionKind::Pick,
        slot: None,
    }];
    for i in 1..=slots as u32 {
        actions.push(RobotAction {
            id: ActionId(i),
            goal: Vec3::new(i as f64 * 0.3, 0.5, 0.4),
            kind: ActionKind::Place,
            slot: Some(SlotId(i)),
        });
    }
    WorkspaceConfig {
        rng_seed: 0,
        variant: Variant::BatchReplacement,
        robot_nominal_speed: 0.5,
        human_speed: 1.0,
        sample_period: 0.1,
        dwell: Default::default(),
        safety: StaircaseSafety::new(vec![1.0], vec![0.5, 1.0]).unwrap(),
        mc: None,
        robot_actions: actions,
        human_goals: vec![GoalDistribution {
            id: GoalId(1),
            mu: Vec3::new(0.0, 2.0, 0.7),
            sigma: Vec3::ZERO,
        }],
    }
}

/// Naive reference implementation of the band lookup.
fn linear_scan_value(s: &StaircaseSafety, d: f64) -> f64 {
    for (i, t) in s.thresholds.iter().enumerate() {
        if d < *t {
            return s.values[i];
        }
    }
    *s.values.last().unwrap()
}

// ──────────────────────────────────────────────────────────────────────────
// Staircase properties
// ──────────────────────────────────────────────────────────────────────────

proptest! {
    #[test]
    fn lookup_matches_the_linear_scan(s in staircase_strategy(), d in 0.0f64..12.0) {
        prop_assert_eq!(s.value_for_distance(d), linear_scan_value(&s, d));
    }

    #[test]
    fn thresholds_resolve_to_the_upper_band(s in staircase_strategy()) {
        for (i, &edge) in s.thresholds.iter().enumerate() {
            prop_assert_eq!(s.value_for_distance(edge), s.values[i + 1]);
            // Just below the edge the lower band must still apply.
            let below = edge - 1e-9;
            prop_assert_eq!(s.value_for_distance(below), s.values[i]);
        }
    }

    #[test]
    fn scaling_never_decreases_with_distance(
        s in staircase_strategy(),
        a in 0.0f64..12.0,
        b in 0.0f64..12.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(s.value_for_distance(lo) <= s.value_for_distance(hi));
    }

    #[test]
    fn scaling_is_symmetric_in_the_two_positions(
        s in staircase_strategy(),
        x_r in vec3_strategy(),
        x_h in vec3_strategy(),
    ) {
        prop_assert_eq!(s.eval_scaling(x_r, x_h), s.eval_scaling(x_h, x_r));
    }

    #[test]
    fn every_plateau_value_is_recognised(s in staircase_strategy()) {
        for (i, &v) in s.values.iter().enumerate() {
            prop_assert_eq!(s.plateau_of_value(v, 1e-9), Some(i));
        }
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Window statistics properties
// ──────────────────────────────────────────────────────────────────────────

proptest! {
    #[test]
    fn window_average_stays_within_the_sample_range(
        (_s, trace, window, start) in trace_strategy(),
    ) {
        let t = trace.time(start);
        let avg = trace.window_average(t, window).unwrap();
        let slice = &trace.samples[start..=start + window];
        let lo = slice.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(avg >= lo - 1e-12 && avg <= hi + 1e-12, "avg {avg} outside [{lo}, {hi}]");
    }

    #[test]
    fn alpha_fractions_are_a_distribution_and_rebuild_the_average(
        (s, trace, window, start) in trace_strategy(),
    ) {
        let t = trace.time(start);
        let alpha = trace.alpha_decompose(&s, t, window).unwrap();
        prop_assert_eq!(alpha.len(), s.k());

        let total: f64 = alpha.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "fractions sum to {total}");

        // Each fraction is a sample count over the window size.
        let n = (window + 1) as f64;
        for &a in &alpha {
            let count = a * n;
            prop_assert!((count - count.round()).abs() <= 1e-9, "fraction {a} not a count / {n}");
            prop_assert!((0.0..=1.0).contains(&a));
        }

        let rebuilt: f64 = alpha.iter().zip(&s.values).map(|(a, v)| a * v).sum();
        let avg = trace.window_average(t, window).unwrap();
        prop_assert!((rebuilt - avg).abs() <= 1e-12, "rebuilt {rebuilt} vs average {avg}");
    }

    #[test]
    fn windows_past_the_end_are_rejected(
        (_s, trace, window, _start) in trace_strategy(),
    ) {
        // Starting at the last sample, any positive window runs off the end.
        let t_last = trace.time(trace.len() - 1);
        prop_assert!(trace.window_average(t_last, window + 1).is_err());
        // Starting off the grid is rejected as well.
        let off_grid = trace.t0 + 0.4321 * trace.dt;
        prop_assert!(trace.window_average(off_grid, window).is_err());
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Geometry properties
// ──────────────────────────────────────────────────────────────────────────

proptest! {
    #[test]
    fn distance_is_a_metric(
        a in vec3_strategy(),
        b in vec3_strategy(),
        c in vec3_strategy(),
    ) {
        prop_assert!(a.distance(b) >= 0.0);
        prop_assert_eq!(a.distance(b), b.distance(a));
        prop_assert_eq!(a.distance(a), 0.0);
        prop_assert!(a.distance(c) <= a.distance(b) + b.distance(c) + 1e-9);
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Slot bookkeeping properties
// ──────────────────────────────────────────────────────────────────────────

proptest! {
    #[test]
    fn batch_availability_shrinks_by_one_or_resets(
        slots in 2usize..=6,
        picks in prop::collection::vec(0usize..64, 1..48),
    ) {
        let cfg = batch_config(slots);
        let mut state = ProcessState::new();
        for raw in picks {
            let avail: Vec<RobotAction> =
                state.available_actions(&cfg).into_iter().cloned().collect();
            prop_assert!(!avail.is_empty(), "batch replacement must never dead-end");
            let action = &avail[raw % avail.len()];
            state.apply(&cfg, action);
            let now = state.available_actions(&cfg);

            if avail.len() == 1 {
                // Last empty slot filled: the batch is replaced wholesale.
                prop_assert_eq!(now.len(), slots);
            } else {
                prop_assert_eq!(now.len(), avail.len() - 1);
                // Strict subset: nothing new appears mid-batch.
                for a in &now {
                    prop_assert!(avail.iter().any(|p| p.id == a.id));
                }
                // The applied action is the one that vanished.
                prop_assert!(now.iter().all(|a| a.id != action.id));
            }
        }
    }

    #[test]
    fn continuous_flow_availability_is_constant(
        slots in 2usize..=6,
        picks in prop::collection::vec(0usize..64, 1..32),
    ) {
        let mut cfg = batch_config(slots);
        cfg.variant = Variant::ContinuousFlow;
        let mut state = ProcessState::new();
        let initial: Vec<ActionId> =
            state.available_actions(&cfg).iter().map(|a| a.id).collect();
        prop_assert_eq!(initial.len(), slots);
        for raw in picks {
            let avail: Vec<RobotAction> =
                state.available_actions(&cfg).into_iter().cloned().collect();
            state.apply(&cfg, &avail[raw % avail.len()]);
            let now: Vec<ActionId> =
                state.available_actions(&cfg).iter().map(|a| a.id).collect();
            prop_assert_eq!(&now, &initial);
        }
    }
}
