use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use psychess_core::board::{BoardState, Side};
use psychess_core::cognition::StudyParams;
use psychess_core::engine::replay_psyche;
use psychess_core::pgn::parse_pgn;
use psychess_core::psyche::PsycheParams;
use psychess_harness::config::{ablation_variants, confidence_variants, ExperimentConfig};
use psychess_harness::metrics::{chi_square_wdl, zone_spread, ZoneMetrics};
use psychess_harness::output::read_records;
use psychess_harness::runner::metrics_from_records;
use psychess_harness::study::{study_lines_jsonl, study_losses};
use psychess_harness::{run_experiment, HarnessError};
use psychess_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "psychess", version, about = "Psyche-modulated chess agents: matches, ablations, study and live play")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sweep {
    Stages,
    Confidence,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Match {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        games: Option<usize>,
    },
    /// Run a config under a standard sweep of agent variants.
    Ablate {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Sweep::Stages)]
        sweep: Sweep,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        games: Option<usize>,
    },
    /// Recompute psyche trajectories and metrics from a records file or PGN.
    Replay {
        file: PathBuf,
        /// Config used to label conditions when recomputing metrics.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        white_psyche: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        black_psyche: f64,
    },
    /// Study the agent's lost games from a records file.
    Study {
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the live-play JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Append finished games to this records file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
}

fn print_metrics(rows: &[ZoneMetrics]) {
    println!(
        "{:<20} {:<14} {:>5} {:>5} {:>5} {:>5} {:>6} {:>7} {:>7} {:>6} {:>7} {:>16}",
        "config", "condition", "games", "W", "D", "L", "score", "ply", "entropy", "conf", "agree%", "95% CI"
    );
    for m in rows {
        println!(
            "{:<20} {:<14} {:>5} {:>5} {:>5} {:>5} {:>6.3} {:>7.1} {:>7.3} {:>6.3} {:>7.1} {:>7.1}–{:<7.1}",
            m.config,
            m.condition,
            m.games,
            m.wins,
            m.draws,
            m.losses,
            m.score,
            m.mean_ply,
            m.mean_entropy,
            m.mean_confidence,
            m.agreement,
            m.agreement_ci_low,
            m.agreement_ci_high
        );
    }
}

fn summarize(rows: &[ZoneMetrics]) {
    let mut configs: Vec<&str> = rows.iter().map(|m| m.config.as_str()).collect();
    configs.dedup();
    for c in configs {
        let subset: Vec<ZoneMetrics> = rows.iter().filter(|m| m.config == c).cloned().collect();
        let spread = zone_spread(&subset).map_or("n/a".to_string(), |s| format!("{s:.1} pp"));
        let chi = chi_square_wdl(&subset).map_or("n/a".to_string(), |t| {
            format!("chi2 = {:.1} (dof {}), V = {:.3}", t.statistic, t.dof, t.cramers_v)
        });
        println!("{c}: spread {spread}; {chi}");
    }
}

fn load_config(
    path: &Path,
    out: Option<PathBuf>,
    threads: Option<usize>,
    games: Option<usize>,
) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if out.is_some() {
        cfg.output_dir = out;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    if let Some(g) = games {
        cfg.games_per_condition = g;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Match {
            config,
            out,
            threads,
            games,
        } => {
            let cfg = load_config(&config, out, threads, games)?;
            let run = run_experiment(&cfg)?;
            let rows: Vec<ZoneMetrics> = run.all_metrics().cloned().collect();
            print_metrics(&rows);
            summarize(&rows);
        }
        Command::Ablate {
            config,
            sweep,
            out,
            threads,
            games,
        } => {
            let mut cfg = load_config(&config, out, threads, games)?;
            cfg.variants = match sweep {
                Sweep::Stages => ablation_variants(),
                Sweep::Confidence => confidence_variants(),
            };
            let run = run_experiment(&cfg)?;
            let rows: Vec<ZoneMetrics> = run.all_metrics().cloned().collect();
            print_metrics(&rows);
            summarize(&rows);
        }
        Command::Replay {
            file,
            config,
            white_psyche,
            black_psyche,
        } => {
            let is_pgn = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgn"));
            if is_pgn {
                let text = std::fs::read_to_string(&file).map_err(|e| HarnessError::io(&file, e))?;
                for (i, g) in parse_pgn(&text)?.iter().enumerate() {
                    let [w, b] = replay_psyche(
                        &g.start,
                        &g.moves,
                        [white_psyche, black_psyche],
                        &PsycheParams::default(),
                    )?;
                    println!(
                        "game {}: {} plies, result {}, final psyche white {:.2} black {:.2}",
                        i + 1,
                        g.moves.len(),
                        g.result,
                        w.last().copied().unwrap_or(white_psyche),
                        b.last().copied().unwrap_or(black_psyche),
                    );
                }
                return Ok(());
            }
            let records = read_records(&file)?;
            let mut mismatches = 0;
            for r in &records {
                let start = BoardState::from_fen(&r.start_fen)?;
                let initial = [r.white.initial_psyche, r.black.initial_psyche];
                let params = r.config(r.agent_side.unwrap_or(Side::White)).psyche;
                let [w, b] = replay_psyche(&start, &r.moves, initial, &params)?;
                if w != r.psyche_white || b != r.psyche_black {
                    mismatches += 1;
                }
            }
            println!(
                "{} records replayed, {} trajectory mismatches",
                records.len(),
                mismatches
            );
            if let Some(path) = config {
                let cfg = ExperimentConfig::load(&path)?;
                let label = file
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .and_then(|s| s.strip_prefix("records-"))
                    .unwrap_or("replay")
                    .to_string();
                let rows = metrics_from_records(&cfg, &label, &records)?;
                print_metrics(&rows);
                summarize(&rows);
            }
        }
        Command::Study { records, out, seed } => {
            let recs = read_records(&records)?;
            let sessions = study_losses(&recs, &StudyParams::default(), seed)?;
            let skipped = sessions.iter().filter(|s| s.skipped).count();
            let lines: usize = sessions.iter().map(|s| s.lines.len()).sum();
            let kept: usize = sessions.iter().flat_map(|s| &s.lines).filter(|l| l.kept).count();
            println!(
                "{} losses, {} sessions skipped, {} lines explored, {} kept",
                sessions.len(),
                skipped,
                lines,
                kept
            );
            let path = out.unwrap_or_else(|| records.with_file_name("study.jsonl"));
            std::fs::write(&path, study_lines_jsonl(&sessions)).map_err(|e| HarnessError::io(&path, e))?;
            println!("study lines written to {}", path.display());
        }
        Command::Serve { addr, records } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| HarnessError::io(Path::new(&addr), e))?;
            rt.block_on(psychess_service::serve_with(&addr, ServiceConfig { records }))
                .map_err(|e| HarnessError::io(Path::new(&addr), e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psychess: {e}");
            ExitCode::FAILURE
        }
    }
}
