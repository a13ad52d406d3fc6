//! The signal chain: gate → dynamics → EQ → saturation → renormalize.
//!
//! Every stage is a pure transform over a [`MoveDistribution`]. Parameters
//! come from a [`PersonalityPreset`] interpolated at the current psyche.

mod preset;

pub use preset::{
    builtin, builtin_source, load_preset, AnchorTriple, EqGains, PersonalityPreset, PresetError,
    BAND_COUNT, BAND_NAMES, BUILTIN_NAMES,
};

use serde::{Deserialize, Serialize};

use crate::distribution::MoveDistribution;

/// Piecewise-linear interpolation between the three psyche anchors.
pub fn interp_anchor(a: &AnchorTriple, psyche: f64) -> f64 {
    let x = (psyche / 100.0).clamp(-1.0, 1.0);
    if x <= 0.0 {
        a.neutral + (a.stress - a.neutral) * x.abs()
    } else {
        a.neutral + (a.overconfident - a.neutral) * x
    }
}

/// Zeroes moves below `threshold`. When every move would be silenced the
/// input is returned unchanged and the skip flag is set.
pub fn gate(d: &MoveDistribution, threshold: f64) -> (MoveDistribution, bool) {
    if threshold > d.max_prob() {
        return (d.clone(), true);
    }
    let weights = d
        .probs()
        .iter()
        .map(|&p| if p < threshold { 0.0 } else { p })
        .collect();
    (d.with_weights(weights), false)
}

/// Power-law reshaping: α < 1 flattens, α > 1 sharpens. Zeros stay zero.
pub fn dynamics(d: &MoveDistribution, alpha: f64) -> MoveDistribution {
    let weights = d
        .probs()
        .iter()
        .map(|&p| if p > 0.0 { p.powf(alpha) } else { 0.0 })
        .collect();
    d.with_weights(weights)
}

/// Equal-count rank bands: band index (0 = best .. 4 = worst) per move, in
/// the distribution's own order.
pub fn partition_bands(d: &MoveDistribution) -> Vec<usize> {
    let probs = d.probs();
    let n = probs.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps canonical order among equal probabilities.
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    let mut bands = vec![0; n];
    for (rank, &idx) in order.iter().enumerate() {
        bands[idx] = BAND_COUNT * rank / n;
    }
    bands
}

/// Wet/dry blend of a gain toward unity by confidence `c`.
pub fn wet_dry(gain: f64, confidence: f64) -> f64 {
    1.0 + (gain - 1.0) * confidence
}

/// Effective per-band gains at ψ after the wet/dry mix.
pub fn effective_gains(preset: &PersonalityPreset, psyche: f64, confidence: f64) -> [f64; BAND_COUNT] {
    preset.band_gains(psyche).map(|g| wet_dry(g, confidence))
}

pub fn eq_apply(
    d: &MoveDistribution,
    preset: &PersonalityPreset,
    psyche: f64,
    confidence: f64,
) -> MoveDistribution {
    let gains = effective_gains(preset, psyche, confidence);
    eq_with_gains(d, &gains)
}

fn eq_with_gains(d: &MoveDistribution, gains: &[f64; BAND_COUNT]) -> MoveDistribution {
    let bands = partition_bands(d);
    let weights = d
        .probs()
        .iter()
        .zip(&bands)
        .map(|(&p, &k)| p * gains[k])
        .collect();
    d.with_weights(weights)
}

/// Single-pass ceiling then renormalize; the result may exceed the ceiling.
pub fn saturate(d: &MoveDistribution, ceiling: f64) -> MoveDistribution {
    let weights = d.probs().iter().map(|&p| p.min(ceiling)).collect();
    d.with_weights(weights)
}

/// Which stages run. Final renormalization always runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StageMask {
    pub enable_gate: bool,
    pub enable_dynamics: bool,
    pub enable_eq: bool,
    pub enable_saturation: bool,
}

impl Default for StageMask {
    fn default() -> Self {
        StageMask::FULL
    }
}

impl StageMask {
    pub const FULL: StageMask = StageMask {
        enable_gate: true,
        enable_dynamics: true,
        enable_eq: true,
        enable_saturation: true,
    };

    pub const NONE: StageMask = StageMask {
        enable_gate: false,
        enable_dynamics: false,
        enable_eq: false,
        enable_saturation: false,
    };

    pub const DYNAMICS_ONLY: StageMask = StageMask {
        enable_dynamics: true,
        ..StageMask::NONE
    };

    pub fn without_gate(self) -> StageMask {
        StageMask {
            enable_gate: false,
            ..self
        }
    }

    pub fn without_dynamics(self) -> StageMask {
        StageMask {
            enable_dynamics: false,
            ..self
        }
    }

    pub fn without_eq(self) -> StageMask {
        StageMask {
            enable_eq: false,
            ..self
        }
    }

    pub fn without_saturation(self) -> StageMask {
        StageMask {
            enable_saturation: false,
            ..self
        }
    }
}

/// Distributions after each enabled stage, for debugging and display.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutputs {
    pub gate: Vec<f64>,
    pub dynamics: Vec<f64>,
    pub eq: Vec<f64>,
    pub saturation: Vec<f64>,
}

/// Parameters the chain actually used for one decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub psyche: f64,
    pub confidence: f64,
    pub gate: f64,
    pub alpha: f64,
    pub sigma: f64,
    /// Post wet/dry gains, best..worst.
    pub eq_gains: [f64; BAND_COUNT],
    pub gate_skipped: bool,
    pub mask: StageMask,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageOutputs>,
}

impl ChainTrace {
    pub fn new(preset: &PersonalityPreset, psyche: f64, confidence: f64, mask: StageMask) -> ChainTrace {
        ChainTrace {
            psyche,
            confidence,
            gate: preset.gate.at(psyche),
            alpha: preset.dynamics.at(psyche),
            sigma: preset.saturation.at(psyche),
            eq_gains: effective_gains(preset, psyche, confidence),
            gate_skipped: false,
            mask,
            stages: None,
        }
    }
}

pub fn apply_chain(
    d: &MoveDistribution,
    psyche: f64,
    preset: &PersonalityPreset,
    confidence: f64,
    mask: StageMask,
) -> (MoveDistribution, ChainTrace) {
    run_chain(d, psyche, preset, confidence, mask, false)
}

/// Like [`apply_chain`] but also records every intermediate distribution.
pub fn apply_chain_traced(
    d: &MoveDistribution,
    psyche: f64,
    preset: &PersonalityPreset,
    confidence: f64,
    mask: StageMask,
) -> (MoveDistribution, ChainTrace) {
    run_chain(d, psyche, preset, confidence, mask, true)
}

fn run_chain(
    d: &MoveDistribution,
    psyche: f64,
    preset: &PersonalityPreset,
    confidence: f64,
    mask: StageMask,
    record: bool,
) -> (MoveDistribution, ChainTrace) {
    let mut trace = ChainTrace::new(preset, psyche, confidence, mask);
    if d.len() == 1 {
        let out = MoveDistribution::point_mass(d.moves().to_vec(), 0).expect("non-empty");
        if record {
            let p = out.probs().to_vec();
            trace.stages = Some(StageOutputs {
                gate: p.clone(),
                dynamics: p.clone(),
                eq: p.clone(),
                saturation: p,
            });
        }
        return (out, trace);
    }

    let mut p = d.clone();
    if mask.enable_gate {
        let (gated, skipped) = gate(&p, trace.gate);
        p = gated;
        trace.gate_skipped = skipped;
    }
    let after_gate = record.then(|| p.probs().to_vec());
    if mask.enable_dynamics {
        p = dynamics(&p, trace.alpha);
    }
    let after_dynamics = record.then(|| p.probs().to_vec());
    if mask.enable_eq {
        p = eq_with_gains(&p, &trace.eq_gains);
    }
    let after_eq = record.then(|| p.probs().to_vec());
    if mask.enable_saturation {
        p = saturate(&p, trace.sigma);
    }
    let out = p.with_weights(p.probs().to_vec());
    if record {
        trace.stages = Some(StageOutputs {
            gate: after_gate.unwrap_or_default(),
            dynamics: after_dynamics.unwrap_or_default(),
            eq: after_eq.unwrap_or_default(),
            saturation: out.probs().to_vec(),
        });
    }
    (out, trace)
}
