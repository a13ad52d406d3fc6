//! Desk-scale experiments: forced-psyche match conditions, stage ablations,
//! per-condition metrics and the files they are written to.

use std::path::Path;

use thiserror::Error;

pub mod config;
pub mod metrics;
pub mod output;
pub mod runner;
pub mod study;

pub use config::{ablation_variants, confidence_variants, ExperimentConfig, Variant};
pub use metrics::{
    chi_square, chi_square_wdl, cohens_d, cohens_d_from_stats, top_move_agreement, zone_metrics,
    zone_spread, ZoneMetrics,
};
pub use runner::{run_experiment, run_experiment_with, ExperimentRun};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("config parse: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Engine(#[from] psychess_core::engine::EngineError),
    #[error(transparent)]
    Preset(#[from] psychess_core::chain::PresetError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Board(#[from] psychess_core::board::BoardError),
    #[error(transparent)]
    Pgn(#[from] psychess_core::pgn::PgnError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(String),
    #[error("record line {line}: {reason}")]
    Record { line: usize, reason: String },
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> HarnessError {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
