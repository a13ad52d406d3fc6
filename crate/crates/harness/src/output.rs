//! Files written by a run: records, PGN, metrics and run metadata.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use psychess_core::engine::{GameRecord, RECORD_SCHEMA_VERSION};
use psychess_core::pgn::record_to_pgn;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::metrics::ZoneMetrics;
use crate::runner::ExperimentRun;
use crate::HarnessError;

pub trait OutputSink {
    fn records(&mut self, variant: &str, condition: &str, records: &[GameRecord]) -> Result<(), HarnessError>;
    fn finish(&mut self, run: &ExperimentRun) -> Result<(), HarnessError>;
}

pub struct NullSink;

impl OutputSink for NullSink {
    fn records(&mut self, _: &str, _: &str, _: &[GameRecord]) -> Result<(), HarnessError> {
        Ok(())
    }

    fn finish(&mut self, _: &ExperimentRun) -> Result<(), HarnessError> {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub label: String,
    pub tool_version: String,
    pub record_schema: u32,
    pub config_sha256: String,
    pub base_seed: u64,
    pub games_per_condition: usize,
    pub conditions: Vec<f64>,
    pub variants: Vec<String>,
    pub total_games: usize,
}

pub const METRICS_FILE: &str = "metrics.csv";
pub const METADATA_FILE: &str = "run-metadata.json";
pub const CONFIG_FILE: &str = "config.toml";

pub fn records_file(variant: &str) -> String {
    format!("records-{variant}.jsonl")
}

pub fn pgn_file(variant: &str) -> String {
    format!("games-{variant}.pgn")
}

/// Writes everything under one directory. Records are flushed condition by
/// condition so an interrupted run keeps what it finished.
pub struct DirSink {
    dir: PathBuf,
    event: String,
    rounds: std::collections::HashMap<String, usize>,
}

impl DirSink {
    pub fn create(dir: &Path, cfg: &ExperimentConfig) -> Result<DirSink, HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        for v in cfg.effective_variants() {
            for name in [records_file(&v.label), pgn_file(&v.label)] {
                let p = dir.join(name);
                File::create(&p).map_err(|e| HarnessError::io(&p, e))?;
            }
        }
        let p = dir.join(CONFIG_FILE);
        std::fs::write(&p, cfg.to_toml_string()).map_err(|e| HarnessError::io(&p, e))?;
        Ok(DirSink {
            dir: dir.to_path_buf(),
            event: cfg.label.clone(),
            rounds: Default::default(),
        })
    }

    fn append(&self, name: &str, text: &str) -> Result<(), HarnessError> {
        let p = self.dir.join(name);
        let mut f = OpenOptions::new()
            .append(true)
            .create(true)
            .open(&p)
            .map_err(|e| HarnessError::io(&p, e))?;
        f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(&p, e))
    }
}

impl OutputSink for DirSink {
    fn records(&mut self, variant: &str, _: &str, records: &[GameRecord]) -> Result<(), HarnessError> {
        let mut jsonl = String::new();
        let mut pgn = String::new();
        let round = self.rounds.entry(variant.to_string()).or_insert(0);
        for r in records {
            jsonl.push_str(&r.to_json_line());
            jsonl.push('\n');
            *round += 1;
            pgn.push_str(&record_to_pgn(r, &self.event, *round));
            pgn.push('\n');
        }
        self.append(&records_file(variant), &jsonl)?;
        self.append(&pgn_file(variant), &pgn)
    }

    fn finish(&mut self, run: &ExperimentRun) -> Result<(), HarnessError> {
        let rows: Vec<&ZoneMetrics> = run.all_metrics().collect();
        write_metrics_csv(&self.dir.join(METRICS_FILE), rows)?;
        let cfg = &run.config;
        let meta = RunMetadata {
            label: cfg.label.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            record_schema: RECORD_SCHEMA_VERSION,
            config_sha256: cfg.hash(),
            base_seed: cfg.base_seed,
            games_per_condition: cfg.games_per_condition,
            conditions: cfg.conditions.clone(),
            variants: run.variants.iter().map(|v| v.variant.label.clone()).collect(),
            total_games: run
                .variants
                .iter()
                .flat_map(|v| &v.conditions)
                .map(|c| c.records.len())
                .sum(),
        };
        let p = self.dir.join(METADATA_FILE);
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
        std::fs::write(&p, text).map_err(|e| HarnessError::io(&p, e))
    }
}

pub fn write_metrics_csv<'a>(
    path: &Path,
    rows: impl IntoIterator<Item = &'a ZoneMetrics>,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::Csv(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<ZoneMetrics>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Csv(e.to_string()))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Csv(e.to_string()))
}

pub fn write_records(path: &Path, records: &[GameRecord]) -> Result<(), HarnessError> {
    let f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(f);
    for r in records {
        writeln!(w, "{}", r.to_json_line()).map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<GameRecord>, HarnessError> {
    let f = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(GameRecord::from_json_line(&line).map_err(|e| HarnessError::Record {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}
