//! Study sessions over lost games.

use psychess_core::board::{BoardState, Side};
use psychess_core::chain::load_preset;
use psychess_core::cognition::{
    detect_turning_points, effective_duration, explore_lines, skip_probability, study_budget,
    StudyParams,
};
use psychess_core::engine::GameRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// One explored line, as written to the study output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyLine {
    pub game: usize,
    pub turning_ply: usize,
    pub psyche: f64,
    pub fen: String,
    pub first_move: String,
    pub line: Vec<String>,
    /// Raw-policy entropy confidence at the end of the line.
    pub terminal_confidence: f64,
    pub original: bool,
    pub kept: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySession {
    pub game: usize,
    pub psyche: f64,
    pub skipped: bool,
    pub minutes: f64,
    pub turning_points: Vec<usize>,
    pub lines: Vec<StudyLine>,
}

/// The agent's decision at or before ply `t`: position and move played.
fn decision_before(r: &GameRecord, side: Side, t: usize) -> Option<(usize, BoardState)> {
    let start = BoardState::from_fen(&r.start_fen).ok()?;
    let mut b = start;
    let mut last = None;
    for (ply, &m) in r.moves.iter().enumerate().take(t + 1) {
        if b.side_to_move() == side {
            last = Some((ply, b.clone()));
        }
        b = b.apply_move(m).ok()?;
    }
    last
}

/// Studies every game the agent lost. The psyche left at the end of the
/// game decides whether study happens and how many turning points fit.
pub fn study_losses(
    records: &[GameRecord],
    params: &StudyParams,
    seed: u64,
) -> Result<Vec<StudySession>, HarnessError> {
    params.validate().map_err(HarnessError::Config)?;
    let mut sessions = Vec::new();
    for (game, r) in records.iter().enumerate() {
        let side = r.agent_side.unwrap_or(Side::White);
        if r.status.winner != Some(side.opponent()) {
            continue;
        }
        let cfg = r.config(side);
        let policy = cfg.policy.build()?;
        let preset = load_preset(&cfg.preset)?;
        let traj = r.trajectory(side);
        let psyche = *traj.last().expect("trajectory has ψ₀");
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(game as u64));
        let minutes = effective_duration(psyche, params.base_duration);
        if rng.gen::<f64>() < skip_probability(psyche, params) {
            sessions.push(StudySession {
                game,
                psyche,
                skipped: true,
                minutes: 0.0,
                turning_points: Vec::new(),
                lines: Vec::new(),
            });
            continue;
        }
        let points = detect_turning_points(traj, study_budget(psyche, params));
        let mut lines = Vec::new();
        let mut studied = Vec::new();
        for &t in &points {
            let Some((ply, b)) = decision_before(r, side, t) else {
                continue;
            };
            if studied.contains(&ply) {
                continue;
            }
            studied.push(ply);
            let explored = explore_lines(
                &b,
                r.moves[ply],
                policy.as_ref(),
                psyche,
                &preset,
                params,
                rng.gen(),
            );
            lines.extend(explored.into_iter().map(|l| StudyLine {
                game,
                turning_ply: ply,
                psyche,
                fen: l.fen,
                first_move: l.first_move.to_string(),
                line: l.line.iter().map(ToString::to_string).collect(),
                terminal_confidence: l.terminal_confidence,
                original: l.original,
                kept: l.kept,
            }));
        }
        sessions.push(StudySession {
            game,
            psyche,
            skipped: false,
            minutes,
            turning_points: points,
            lines,
        });
    }
    Ok(sessions)
}

pub fn study_lines_jsonl(sessions: &[StudySession]) -> String {
    let mut out = String::new();
    for l in sessions.iter().flat_map(|s| &s.lines) {
        out.push_str(&serde_json::to_string(l).expect("study line serializes"));
        out.push('\n');
    }
    out
}
