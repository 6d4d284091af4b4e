//! Slot bookkeeping that determines which place actions are available.

use crate::config::{ActionKind, RobotAction, SlotId, Variant, WorkspaceConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Mutable process state: which capacity slots currently hold a part.
///
/// Under continuous flow the state is inert (full boxes are swapped out
/// immediately), under batch replacement a filled slot blocks its actions
/// until every slot is full, at which point the whole batch is replaced and
/// all slots empty again.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessState {
    filled: BTreeSet<SlotId>,
}

impl ProcessState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_filled(&self, slot: SlotId) -> bool {
        self.filled.contains(&slot)
    }

    /// Place actions currently selectable, sorted by id. An empty result
    /// signals a terminal state to the planners.
    pub fn available_actions<'a>(&self, cfg: &'a WorkspaceConfig) -> Vec<&'a RobotAction> {
        let mut out: Vec<&RobotAction> = cfg
            .robot_actions
            .iter()
            .filter(|a| a.kind == ActionKind::Place)
            .filter(|a| match cfg.variant {
                Variant::ContinuousFlow => true,
                Variant::BatchReplacement => {
                    a.slot.map(|s| !self.is_filled(s)).unwrap_or(true)
                }
            })
            .collect();
        out.sort_by_key(|a| a.id);
        out
    }

    /// Record the execution of `action`. In the batch-replacement variant
    /// this fills the action's slot and, once every slot is full, replaces
    /// the batch (emptying all slots).
    pub fn apply(&mut self, cfg: &WorkspaceConfig, action: &RobotAction) {
        if cfg.variant != Variant::BatchReplacement {
            return;
        }
        let Some(slot) = action.slot else { return };
        self.filled.insert(slot);
        let all: BTreeSet<SlotId> = cfg
            .robot_actions
            .iter()
            .filter(|a| a.kind == ActionKind::Place)
            .filter_map(|a| a.slot)
            .collect();
        if all.iter().all(|s| self.filled.contains(s)) {
            self.filled.clear();
        }
    }
}
