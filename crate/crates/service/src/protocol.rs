//! Wire types. Field names are camelCase on the wire.

use psychess_core::board::{GameStatus, Side, StatusTag};
use psychess_core::engine::{MoveTrace, PlanEvent};
use psychess_core::psyche::PsycheZone;
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewGameRequest {
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default)]
    pub psyche0: f64,
    #[serde(default = "default_color")]
    pub human_color: Side,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub thinking: bool,
    /// Defaults to the standard initial position.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_fen: Option<String>,
}

fn default_preset() -> String {
    "human".into()
}

fn default_color() -> Side {
    Side::White
}

impl Default for NewGameRequest {
    fn default() -> Self {
        NewGameRequest {
            preset: default_preset(),
            psyche0: 0.0,
            human_color: Side::White,
            seed: 0,
            thinking: false,
            start_fen: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MoveRequest {
    /// UCI, e.g. `e2e4` or `e7e8q`.
    #[serde(rename = "move")]
    pub uci: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceView {
    pub ply: u32,
    #[serde(rename = "move")]
    pub selected: String,
    pub san: String,
    /// Raw policy's top move.
    pub argmax: String,
    pub psyche: f64,
    pub entropy: f64,
    pub confidence: f64,
    pub gate: f64,
    pub alpha: f64,
    pub sigma: f64,
    /// Effective gains after the wet/dry mix, best band first.
    pub eq_gains: [f64; 5],
    pub gate_skipped: bool,
    pub agreement: bool,
    pub plan_event: PlanEvent,
}

impl TraceView {
    pub fn new(t: &MoveTrace, san: String) -> TraceView {
        TraceView {
            ply: t.ply,
            selected: t.selected.to_string(),
            san,
            argmax: t.argmax.to_string(),
            psyche: t.psyche,
            entropy: t.entropy,
            confidence: t.confidence,
            gate: t.chain.gate,
            alpha: t.chain.alpha,
            sigma: t.chain.sigma,
            eq_gains: t.chain.eq_gains,
            gate_skipped: t.chain.gate_skipped,
            agreement: t.agreement,
            plan_event: t.plan_event,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatusView {
    pub tag: StatusTag,
    pub winner: Option<Side>,
    pub result: String,
    pub over: bool,
}

impl From<GameStatus> for StatusView {
    fn from(s: GameStatus) -> StatusView {
        StatusView {
            tag: s.tag,
            winner: s.winner,
            result: s.result_token().to_string(),
            over: s.is_over(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub protocol_version: u32,
    pub session_id: u64,
    pub preset: String,
    pub human_color: Side,
    pub side_to_move: Side,
    pub fen: String,
    pub psyche: f64,
    pub zone: PsycheZone,
    /// Agent psyche before the first ply and after each ply.
    pub psyche_history: Vec<f64>,
    pub legal_moves: Vec<String>,
    pub move_history: Vec<String>,
    pub status: StatusView,
    /// The agent's most recent decision.
    pub trace: Option<TraceView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PresetInfo {
    pub name: String,
    pub character: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PresetList {
    pub protocol_version: u32,
    pub presets: Vec<PresetInfo>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    BadRequest,
    UnknownPreset,
    InvalidPsyche,
    MalformedMove,
    IllegalMove,
    NotYourTurn,
    GameOver,
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub message: String,
}
