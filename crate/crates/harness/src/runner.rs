use std::sync::Arc;

use psychess_core::board::{BoardState, Side};
use psychess_core::engine::{play_agents, Agent, AgentConfig, GameRecord};
use psychess_core::policy::PolicySource;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Variant};
use crate::metrics::{zone_metrics, ZoneMetrics};
use crate::output::OutputSink;
use crate::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionRun {
    pub label: String,
    pub psyche0: f64,
    pub records: Vec<GameRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantRun {
    pub variant: Variant,
    pub conditions: Vec<ConditionRun>,
    pub metrics: Vec<ZoneMetrics>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub variants: Vec<VariantRun>,
}

impl ExperimentRun {
    pub fn variant(&self, label: &str) -> Option<&VariantRun> {
        self.variants.iter().find(|v| v.variant.label == label)
    }

    pub fn all_metrics(&self) -> impl Iterator<Item = &ZoneMetrics> {
        self.variants.iter().flat_map(|v| v.metrics.iter())
    }
}

/// Game `index` of a condition: agent colour and seed. Seeds repeat across
/// conditions and variants so that they are paired.
pub fn schedule(cfg: &ExperimentConfig, index: usize) -> (Side, u64) {
    let side = if cfg.color_balanced && index % 2 == 1 {
        Side::Black
    } else {
        Side::White
    };
    (side, cfg.base_seed.wrapping_add(index as u64))
}

struct Players {
    agent: AgentConfig,
    agent_policy: Arc<dyn PolicySource>,
    opponent: AgentConfig,
    opponent_policy: Arc<dyn PolicySource>,
}

impl Players {
    fn play(&self, cfg: &ExperimentConfig, label: &str, index: usize) -> Result<GameRecord, HarnessError> {
        let (side, seed) = schedule(cfg, index);
        let mut agent = Agent::with_policy(self.agent.clone(), self.agent_policy.clone())?;
        let mut opponent = Agent::with_policy(self.opponent.clone(), self.opponent_policy.clone())?;
        let mut record = match side {
            Side::White => play_agents(&mut agent, &mut opponent, BoardState::initial(), seed),
            Side::Black => play_agents(&mut opponent, &mut agent, BoardState::initial(), seed),
        };
        record.condition = Some(label.to_string());
        record.agent_side = Some(side);
        Ok(record)
    }
}

fn pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| HarnessError::Config(e.to_string()))
}

/// Plays every condition of every variant. Records of each condition are
/// handed to `sink` before its metrics are computed.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    sink: &mut dyn OutputSink,
) -> Result<ExperimentRun, HarnessError> {
    cfg.validate()?;
    let pool = pool(cfg)?;
    let opponent_policy = cfg.opponent.policy.build()?;
    let labels = cfg.condition_labels();
    let mut variants = Vec::new();
    for variant in cfg.effective_variants() {
        let template = variant.apply(&cfg.agent);
        let agent_policy = template.policy.build()?;
        let mut conditions = Vec::new();
        let mut metrics = Vec::new();
        for (&psyche0, label) in cfg.conditions.iter().zip(&labels) {
            let players = Players {
                agent: AgentConfig {
                    initial_psyche: psyche0,
                    ..template.clone()
                },
                agent_policy: agent_policy.clone(),
                opponent: cfg.opponent.clone(),
                opponent_policy: opponent_policy.clone(),
            };
            let records: Vec<GameRecord> = pool.install(|| {
                (0..cfg.games_per_condition)
                    .into_par_iter()
                    .map(|i| players.play(cfg, label, i))
                    .collect::<Result<_, _>>()
            })?;
            sink.records(&variant.label, label, &records)?;
            metrics.push(zone_metrics(
                &variant.label,
                label,
                psyche0,
                &records,
                cfg.bootstrap_resamples,
                cfg.base_seed,
            )?);
            conditions.push(ConditionRun {
                label: label.clone(),
                psyche0,
                records,
            });
        }
        variants.push(VariantRun {
            variant,
            conditions,
            metrics,
        });
    }
    let run = ExperimentRun {
        config: cfg.clone(),
        variants,
    };
    sink.finish(&run)?;
    Ok(run)
}

/// Runs in memory, writing files only when the config names a directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun, HarnessError> {
    match &cfg.output_dir {
        Some(dir) => run_experiment_with(cfg, &mut crate::output::DirSink::create(dir, cfg)?),
        None => run_experiment_with(cfg, &mut crate::output::NullSink),
    }
}

/// Recomputes every metrics row from stored records.
pub fn metrics_from_records(
    cfg: &ExperimentConfig,
    variant: &str,
    records: &[GameRecord],
) -> Result<Vec<ZoneMetrics>, HarnessError> {
    cfg.conditions
        .iter()
        .zip(cfg.condition_labels())
        .map(|(&psyche0, label)| {
            let subset: Vec<GameRecord> = records
                .iter()
                .filter(|r| r.condition.as_deref() == Some(label.as_str()))
                .cloned()
                .collect();
            Ok(zone_metrics(
                variant,
                &label,
                psyche0,
                &subset,
                cfg.bootstrap_resamples,
                cfg.base_seed,
            )?)
        })
        .collect()
}
