//! Fragile plans: short argmax lines committed when the agent is certain,
//! dropped when the opponent deviates or the psyche shakes them loose.

use serde::{Deserialize, Serialize};

use crate::board::{BoardState, MoveId};
use crate::policy::PolicySource;

/// Plans are only generated above this confidence.
pub const PLAN_CONFIDENCE_THRESHOLD: f64 = 0.70;

pub const DEFAULT_LOOKAHEAD: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    origin_ply: u32,
    depth: usize,
    confidence: f64,
    /// Own moves at even indices, predicted replies at odd ones.
    moves: Vec<MoveId>,
}

impl Plan {
    pub fn origin_ply(&self) -> u32 {
        self.origin_ply
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn moves(&self) -> &[MoveId] {
        &self.moves
    }
}

/// Single-slot plan store. `cursor` points at the next predicted reply.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanBuffer {
    slot: Option<Plan>,
    cursor: usize,
}

impl PlanBuffer {
    pub fn new() -> PlanBuffer {
        PlanBuffer::default()
    }

    /// Replaces whatever was stored. The plan's first own move is taken as
    /// already played.
    pub fn store(&mut self, plan: Plan) {
        self.slot = Some(plan);
        self.cursor = 1;
    }

    pub fn clear(&mut self) {
        self.slot = None;
        self.cursor = 0;
    }

    pub fn plan(&self) -> Option<&Plan> {
        self.slot.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.slot.is_none()
    }

    pub fn expected_reply(&self) -> Option<MoveId> {
        self.slot.as_ref().map(|p| p.moves[self.cursor])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisruptionParams {
    pub threshold: f64,
    pub stress_rate: f64,
    pub overconfident_rate: f64,
}

impl Default for DisruptionParams {
    fn default() -> Self {
        DisruptionParams {
            threshold: 0.0,
            stress_rate: 0.80,
            overconfident_rate: 0.60,
        }
    }
}

impl DisruptionParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..100.0).contains(&self.threshold) {
            return Err("disruption threshold must lie in [0, 100)".into());
        }
        let unit = |r: f64| (0.0..=1.0).contains(&r);
        if !unit(self.stress_rate) || !unit(self.overconfident_rate) {
            return Err("disruption rates must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// Chance that a confirmed plan is abandoned anyway. Zero within the
/// threshold, rising linearly to the pole's rate at |ψ| = 100.
pub fn disruption_probability(psyche: f64, p: &DisruptionParams) -> f64 {
    let magnitude = psyche.abs().min(100.0);
    if magnitude <= p.threshold {
        return 0.0;
    }
    let rate = if psyche < 0.0 {
        p.stress_rate
    } else {
        p.overconfident_rate
    };
    (magnitude - p.threshold) / (100.0 - p.threshold) * rate
}

/// Rolls the policy argmax forward `2·depth − 1` plies from `b`. Returns
/// `None` below the confidence threshold or when the line runs into a
/// finished game before it is complete.
pub fn maybe_generate_plan(
    b: &BoardState,
    policy: &dyn PolicySource,
    confidence: f64,
    depth: usize,
) -> Option<Plan> {
    if confidence <= PLAN_CONFIDENCE_THRESHOLD || depth == 0 {
        return None;
    }
    let len = 2 * depth - 1;
    let mut pos = b.clone();
    let mut moves = Vec::with_capacity(len);
    for _ in 0..len {
        if pos.status().is_over() {
            return None;
        }
        let m = policy.distribution(&pos).argmax();
        pos = pos.apply_unchecked(m);
        moves.push(m);
    }
    Some(Plan {
        origin_ply: b.ply(),
        depth,
        confidence,
        moves,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome", content = "move")]
pub enum PlanOutcome {
    NoPlan,
    MismatchDiscard,
    DisruptedDiscard,
    Execute(MoveId),
}

/// Compares the opponent's `reply` against the stored prediction.
pub fn check_plan(
    buf: &mut PlanBuffer,
    reply: MoveId,
    psyche: f64,
    p: &DisruptionParams,
    draw: f64,
) -> PlanOutcome {
    let Some(expected) = buf.expected_reply() else {
        return PlanOutcome::NoPlan;
    };
    if expected != reply {
        buf.clear();
        return PlanOutcome::MismatchDiscard;
    }
    if draw < disruption_probability(psyche, p) {
        buf.clear();
        return PlanOutcome::DisruptedDiscard;
    }
    let plan = buf.slot.as_ref().expect("expected reply implies a plan");
    let next = plan.moves[buf.cursor + 1];
    if buf.cursor + 2 >= plan.moves.len() {
        buf.clear();
    } else {
        buf.cursor += 2;
    }
    PlanOutcome::Execute(next)
}
